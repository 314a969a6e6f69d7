//! Scalar coefficient arithmetic: integers, (p-local) rationals, residues.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// The scalar domain a ring's coefficients live in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScalarKind {
    Int,
    /// Rationals; `local` restricts denominators to be prime to p.
    Rat { local: Option<u64> },
    /// Residues modulo `modulus` = p^k.
    Res { p: u64, k: u32, modulus: BigInt },
}

impl ScalarKind {
    pub fn res(p: u64, k: u32) -> ScalarKind {
        ScalarKind::Res { p, k, modulus: BigInt::from(p).pow(k) }
    }
}

/// A normalized scalar value. Residues are stored in [0, modulus);
/// rationals are reduced with positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scalar {
    Int(BigInt),
    Rat(BigRational),
    Res(BigInt),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Int(x) => x.is_zero(),
            Scalar::Rat(x) => x.is_zero(),
            Scalar::Res(x) => x.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Int(x) => x.is_one(),
            Scalar::Rat(x) => x.is_one(),
            Scalar::Res(x) => x.is_one(),
        }
    }
}

/// p-adic valuation of a rational; None encodes +∞ (the valuation of 0).
pub fn p_valuation_rat(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0i64;
    let mut n = x.numer().clone();
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    let mut d = x.denom().clone();
    while (&d % &p).is_zero() {
        d /= &p;
        v -= 1;
    }
    Some(v)
}

pub fn p_valuation_int(x: &BigInt, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0i64;
    let mut n = x.clone();
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    Some(v)
}

pub fn mod_reduce(x: &BigInt, modulus: &BigInt) -> BigInt {
    let r = x % modulus;
    if r.is_negative() {
        r + modulus
    } else {
        r
    }
}

/// Inverse of x modulo m (m a prime power), if x is a unit.
pub fn mod_inverse(x: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = x.extended_gcd(m);
    if e.gcd.is_one() {
        Some(mod_reduce(&e.x, m))
    } else {
        None
    }
}

impl ScalarKind {
    pub fn zero(&self) -> Scalar {
        match self {
            ScalarKind::Int => Scalar::Int(BigInt::zero()),
            ScalarKind::Rat { .. } => Scalar::Rat(BigRational::zero()),
            ScalarKind::Res { .. } => Scalar::Res(BigInt::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            ScalarKind::Int => Scalar::Int(BigInt::one()),
            ScalarKind::Rat { .. } => Scalar::Rat(BigRational::one()),
            ScalarKind::Res { .. } => Scalar::Res(BigInt::one()),
        }
    }

    pub fn from_int(&self, x: &BigInt) -> Scalar {
        match self {
            ScalarKind::Int => Scalar::Int(x.clone()),
            ScalarKind::Rat { .. } => Scalar::Rat(BigRational::from(x.clone())),
            ScalarKind::Res { modulus, .. } => Scalar::Res(mod_reduce(x, modulus)),
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (ScalarKind::Int, Scalar::Int(x), Scalar::Int(y)) => Scalar::Int(x + y),
            (ScalarKind::Rat { .. }, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            (ScalarKind::Res { modulus, .. }, Scalar::Res(x), Scalar::Res(y)) => {
                Scalar::Res(mod_reduce(&(x + y), modulus))
            }
            _ => panic!("scalar kind mismatch"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (ScalarKind::Int, Scalar::Int(x)) => Scalar::Int(-x),
            (ScalarKind::Rat { .. }, Scalar::Rat(x)) => Scalar::Rat(-x),
            (ScalarKind::Res { modulus, .. }, Scalar::Res(x)) => {
                Scalar::Res(mod_reduce(&(-x), modulus))
            }
            _ => panic!("scalar kind mismatch"),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (ScalarKind::Int, Scalar::Int(x), Scalar::Int(y)) => Scalar::Int(x * y),
            (ScalarKind::Rat { .. }, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            (ScalarKind::Res { modulus, .. }, Scalar::Res(x), Scalar::Res(y)) => {
                Scalar::Res(mod_reduce(&(x * y), modulus))
            }
            _ => panic!("scalar kind mismatch"),
        }
    }

    /// Whether a is a unit of this scalar domain.
    pub fn is_unit(&self, a: &Scalar) -> bool {
        match (self, a) {
            (ScalarKind::Int, Scalar::Int(x)) => x.abs().is_one(),
            (ScalarKind::Rat { local: None }, Scalar::Rat(x)) => !x.is_zero(),
            (ScalarKind::Rat { local: Some(p) }, Scalar::Rat(x)) => {
                p_valuation_rat(x, *p) == Some(0)
            }
            (ScalarKind::Res { p, .. }, Scalar::Res(x)) => !(x % BigInt::from(*p)).is_zero(),
            _ => panic!("scalar kind mismatch"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        match (self, a) {
            (ScalarKind::Int, Scalar::Int(x)) => {
                if x.abs().is_one() {
                    Some(Scalar::Int(x.clone()))
                } else {
                    None
                }
            }
            (ScalarKind::Rat { local }, Scalar::Rat(x)) => {
                if x.is_zero() {
                    return None;
                }
                if let Some(p) = local {
                    if p_valuation_rat(x, *p) != Some(0) {
                        return None;
                    }
                }
                Some(Scalar::Rat(x.recip()))
            }
            (ScalarKind::Res { modulus, .. }, Scalar::Res(x)) => {
                mod_inverse(x, modulus).map(Scalar::Res)
            }
            _ => panic!("scalar kind mismatch"),
        }
    }

    /// Exact division a/b, defined when the quotient exists in the domain.
    pub fn div_exact(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        match (self, a, b) {
            (ScalarKind::Int, Scalar::Int(x), Scalar::Int(y)) => {
                if y.is_zero() {
                    return None;
                }
                let (q, r) = x.div_rem(y);
                if r.is_zero() {
                    Some(Scalar::Int(q))
                } else {
                    None
                }
            }
            (ScalarKind::Rat { local }, Scalar::Rat(x), Scalar::Rat(y)) => {
                if y.is_zero() {
                    return None;
                }
                let q = x / y;
                if let Some(p) = local {
                    if let Some(v) = p_valuation_rat(&q, *p) {
                        if v < 0 {
                            return None;
                        }
                    }
                }
                Some(Scalar::Rat(q))
            }
            (ScalarKind::Res { .. }, _, b2) => {
                let binv = self.inv(b2)?;
                Some(self.mul(a, &binv))
            }
            _ => panic!("scalar kind mismatch"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        let x = BigRational::new(BigInt::from(9), BigInt::from(2));
        assert_eq!(p_valuation_rat(&x, 3), Some(2));
        assert_eq!(p_valuation_rat(&x, 2), Some(-1));
        assert_eq!(p_valuation_rat(&BigRational::zero(), 5), None);
        assert_eq!(p_valuation_rat(&BigRational::one(), 7), Some(0));
    }

    #[test]
    fn residue_arithmetic() {
        let k = ScalarKind::res(2, 5);
        let a = k.from_int(&BigInt::from(7));
        let b = k.from_int(&BigInt::from(5));
        assert_eq!(k.mul(&a, &b), k.from_int(&BigInt::from(3))); // 35 mod 32
        let inv = k.inv(&a).unwrap();
        assert!(k.mul(&a, &inv).is_one());
        assert!(k.inv(&k.from_int(&BigInt::from(6))).is_none());
    }

    #[test]
    fn p_local_units() {
        let k = ScalarKind::Rat { local: Some(3) };
        let half = Scalar::Rat(BigRational::new(BigInt::one(), BigInt::from(2)));
        assert!(k.is_unit(&half));
        let third = Scalar::Rat(BigRational::new(BigInt::one(), BigInt::from(3)));
        assert!(!k.is_unit(&third));
    }
}
