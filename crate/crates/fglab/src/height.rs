//! p-series analysis over F_p-algebras: height detection, v_n, the ideal
//! chain I_n, Frobenius twists, Frobenius factorization and Verschiebung
//! series.

use std::fmt;

use crate::fgl::{check_homomorphism, n_series, FglError, FormalGroupLawBud};
use crate::ring::{Elem, Ring};
use crate::series::{SeriesError, TruncSeries};

#[derive(Clone, Debug)]
pub enum HeightError {
    WrongCharacteristic,
    NonvanishingDerivative { exponent: u32 },
    HeightTooSmall { required: u32, detected: Height },
    Fgl(FglError),
    Series(SeriesError),
}

impl fmt::Display for HeightError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeightError::WrongCharacteristic => {
                write!(f, "base ring does not have the required characteristic p")
            }
            HeightError::NonvanishingDerivative { exponent } => {
                write!(f, "series has a term of exponent {} not divisible by p", exponent)
            }
            HeightError::HeightTooSmall { required, detected } => {
                write!(f, "height {} required, law has {}", required, detected)
            }
            HeightError::Fgl(e) => write!(f, "{}", e),
            HeightError::Series(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for HeightError {}

impl From<FglError> for HeightError {
    fn from(e: FglError) -> Self {
        HeightError::Fgl(e)
    }
}

impl From<SeriesError> for HeightError {
    fn from(e: SeriesError) -> Self {
        HeightError::Series(e)
    }
}

pub type HResult<T> = Result<T, HeightError>;

/// Detected height: exact, or only a lower bound (the truncation bound
/// cannot certify infinite height).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Height {
    Exact(u32),
    /// [p] vanishes to the bound; height is at least this.
    AtLeast(u32),
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Exact(h) => write!(f, "{}", h),
            Height::AtLeast(h) => write!(f, ">= {}", h),
        }
    }
}

/// Analysis of the p-series of a law over a characteristic-p base.
#[derive(Clone, Debug)]
pub struct PSeriesData {
    pub p: u64,
    pub p_series: TruncSeries,
    pub height: Height,
    /// a_{p^h}, the v_h coordinate representative (degree p^h - 1 as a
    /// section of ω^{⊗(p^h-1)}), when the height is exact.
    pub vn: Option<Elem>,
    /// Grading degree p^h - 1 of v_h.
    pub vn_degree: Option<i64>,
    /// Generators (p, u_1, ..., u_{n-1}) of the ideal chain, when a
    /// p-typical coordinate was supplied.
    pub ideal_chain: Option<Vec<String>>,
}

fn require_char_p(ring: &Ring, p: u64) -> HResult<()> {
    match ring.char_p() {
        Some(q) if q == p => Ok(()),
        _ => Err(HeightError::WrongCharacteristic),
    }
}

/// Analyze [p](x) over a field of characteristic p: the least h with the
/// x^{p^h}-coefficient nonzero (after verifying everything lower vanishes),
/// or a lower bound when [p] vanishes to the truncation bound.
pub fn p_series_analyze(g: &FormalGroupLawBud, p: u64) -> HResult<PSeriesData> {
    require_char_p(g.ring(), p)?;
    let ps = n_series(g, p as i64)?;
    let bound = g.bound();
    let hmax = {
        let mut h = 0u32;
        while (p as u64).pow(h + 1) <= bound as u64 {
            h += 1;
        }
        h
    };
    // least h with a_{p^h} != 0; all lower-degree coefficients must vanish
    let mut height = Height::AtLeast(hmax);
    let mut vn = None;
    'scan: for h in 0..=hmax {
        let ph = (p as u64).pow(h);
        for (e, _) in ps.terms() {
            let d = e.0[0] as u64;
            if d < ph {
                // nonzero coefficient below p^h: not height >= h; the scan
                // would have stopped earlier, so this cannot happen
                break 'scan;
            }
        }
        let c = ps.coeff(&[ph as u16]);
        if !c.is_zero() {
            height = Height::Exact(h);
            vn = Some(c);
            break;
        }
    }
    let vn_degree = match height {
        Height::Exact(h) => Some((p as i64).pow(h) - 1),
        Height::AtLeast(_) => None,
    };
    Ok(PSeriesData {
        p,
        p_series: ps,
        height,
        vn,
        vn_degree,
        ideal_chain: None,
    })
}

/// p-series analysis for a p-typical coordinate over a (not necessarily
/// field) F_p-algebra: instead of a single height, report the ideal chain
/// I_n = (p, u_1, ..., u_{n-1}) read off the supplied coordinate data.
pub fn p_series_ideal_chain(u_names: &[String]) -> Vec<Vec<String>> {
    let mut chains = Vec::new();
    for n in 0..=u_names.len() {
        let mut gens = vec!["p".to_string()];
        gens.extend(u_names[..n].iter().cloned());
        if n == 0 {
            chains.push(Vec::new());
        } else {
            chains.push(gens);
        }
    }
    chains
}

/// The Frobenius twist G^{(p)}: coefficients raised to the p-th power.
pub fn frobenius_twist(g: &FormalGroupLawBud, p: u64) -> HResult<FormalGroupLawBud> {
    match g.ring().residue_params() {
        Some((q, 1)) if q == p => {}
        _ => return Err(HeightError::WrongCharacteristic),
    }
    let f = g
        .series()
        .map_coefficients(g.ring(), &|c| Ok(c.pow(p as u32)))
        .map_err(HeightError::Series)?;
    Ok(FormalGroupLawBud::new_unchecked(f, false))
}

/// Verify that x -> x^p is a homomorphism G -> G^{(p)}.
pub fn frobenius_is_homomorphism(g: &FormalGroupLawBud, p: u64) -> HResult<bool> {
    let tw = frobenius_twist(g, p)?;
    let x = TruncSeries::var(g.ring(), &["x"], g.bound(), "x")?;
    let (ok, _) = check_homomorphism(&x.pow(p as u32), g, &tw)?;
    Ok(ok)
}

/// Write φ(x) = g(x^p): defined when every exponent of φ is divisible by p
/// (equivalently φ' = 0 identically in characteristic p). Since φ is only
/// known modulo degree bound+1, g carries the honest bound ⌊bound/p⌋.
pub fn frobenius_factor(phi: &TruncSeries, p: u64) -> HResult<TruncSeries> {
    if phi.vars().len() != 1 {
        return Err(HeightError::Series(SeriesError::NotUnivariate));
    }
    for (e, _) in phi.terms() {
        if e.0[0] as u64 % p != 0 {
            return Err(HeightError::NonvanishingDerivative { exponent: e.0[0] as u32 });
        }
    }
    let mut out = TruncSeries::zero(phi.ring(), &["x"], phi.bound() / p as u32);
    for (e, c) in phi.terms() {
        out.set_coeff(&[e.0[0] / p as u16], c.clone());
    }
    Ok(out)
}

/// The n-fold Verschiebung factor V_n with [p](x) = V_n(x^{p^n}), obtained
/// by n applications of the Frobenius factorization.
pub fn verschiebung_series(g: &FormalGroupLawBud, p: u64, n: u32) -> HResult<TruncSeries> {
    require_char_p(g.ring(), p)?;
    let data = p_series_analyze(g, p)?;
    let enough = match data.height {
        Height::Exact(h) => h >= n,
        Height::AtLeast(h) => h >= n,
    };
    if !enough {
        return Err(HeightError::HeightTooSmall { required: n, detected: data.height });
    }
    let mut v = data.p_series;
    for _ in 0..n {
        v = frobenius_factor(&v, p)?;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgl::FormalGroupLawBud;
    use crate::ptypical::{honda_fgl, universal_p_typical, Convention};
    use crate::ring::{make_ring, reduce_mod_p, Elem, RingSpec};

    #[test]
    fn multiplicative_height_one() {
        let f3 = make_ring(&RingSpec::PrimeField(3)).unwrap();
        let mult = FormalGroupLawBud::multiplicative(&f3, 9);
        let d = p_series_analyze(&mult, 3).unwrap();
        assert_eq!(d.height, Height::Exact(1));
        assert!(d.vn.unwrap().is_one());
        assert_eq!(d.vn_degree, Some(2));
    }

    #[test]
    fn additive_height_unbounded() {
        let f3 = make_ring(&RingSpec::PrimeField(3)).unwrap();
        let add = FormalGroupLawBud::additive(&f3, 9);
        let d = p_series_analyze(&add, 3).unwrap();
        assert_eq!(d.height, Height::AtLeast(2)); // 3^2 = 9 <= bound
        assert!(d.vn.is_none());
    }

    #[test]
    fn honda_heights() {
        for (p, n, bound) in [(2u64, 1u32, 8u32), (3, 1, 9), (2, 2, 16)] {
            let h = honda_fgl(p, n, bound).unwrap();
            let d = p_series_analyze(&h, p).unwrap();
            assert_eq!(d.height, Height::Exact(n), "honda({},{})", p, n);
            assert!(d.vn.unwrap().is_one());
        }
    }

    #[test]
    fn wrong_characteristic_rejected() {
        let z = make_ring(&RingSpec::Integers).unwrap();
        let mult = FormalGroupLawBud::multiplicative(&z, 4);
        assert!(matches!(
            p_series_analyze(&mult, 2),
            Err(HeightError::WrongCharacteristic)
        ));
    }

    #[test]
    fn frobenius_twist_examples() {
        // coefficients in F_p are fixed
        let f2 = make_ring(&RingSpec::PrimeField(2)).unwrap();
        let mult = FormalGroupLawBud::multiplicative(&f2, 6);
        let tw = frobenius_twist(&mult, 2).unwrap();
        assert_eq!(tw.series(), mult.series());
        // over F_4: w -> w^2 = w + 1
        let f4 = make_ring(&crate::ring::finite_field_spec(2, 2).unwrap()).unwrap();
        let w = f4.gen("w").unwrap();
        let x = TruncSeries::var(&f4, &["x", "y"], 4, "x").unwrap();
        let y = TruncSeries::var(&f4, &["x", "y"], 4, "y").unwrap();
        let f = x.add(&y).add(&x.mul(&y).scale(&w));
        let g = FormalGroupLawBud::new(f, false).unwrap();
        let tw = frobenius_twist(&g, 2).unwrap();
        assert_eq!(tw.series().coeff(&[1, 1]), w.mul(&w));
        // x -> x^p is a homomorphism G -> G^{(p)}
        assert!(frobenius_is_homomorphism(&g, 2).unwrap());
    }

    #[test]
    fn frobenius_factor_examples() {
        let f2 = make_ring(&RingSpec::PrimeField(2)).unwrap();
        let x = TruncSeries::var(&f2, &["x"], 8, "x").unwrap();
        assert_eq!(frobenius_factor(&x.pow(2), 2).unwrap(), x.truncate(4));
        assert_eq!(frobenius_factor(&x.pow(4), 2).unwrap(), x.pow(2).truncate(4));
        assert!(matches!(
            frobenius_factor(&x, 2),
            Err(HeightError::NonvanishingDerivative { exponent: 1 })
        ));
        // factorization undoes precomposition with x^p
        let s = x.pow(2).add(&x.pow(6));
        let f = frobenius_factor(&s, 2).unwrap();
        let recomposed = f.compose(&x.pow(2)).unwrap();
        assert_eq!(recomposed, s);
    }

    #[test]
    fn verschiebung_examples() {
        // honda(p,n): V_n = x
        let h = honda_fgl(2, 2, 16).unwrap();
        let v = verschiebung_series(&h, 2, 2).unwrap();
        let x = TruncSeries::var(h.ring(), &["x"], 16, "x").unwrap();
        assert_eq!(v, x.truncate(v.bound()));
        // multiplicative over F_p: V_1 = x
        let f3 = make_ring(&RingSpec::PrimeField(3)).unwrap();
        let mult = FormalGroupLawBud::multiplicative(&f3, 9);
        let v = verschiebung_series(&mult, 3, 1).unwrap();
        let x3 = TruncSeries::var(&f3, &["x"], 9, "x").unwrap();
        assert_eq!(v, x3.truncate(v.bound()));
        // height too small is refused
        assert!(matches!(
            verschiebung_series(&mult, 3, 2),
            Err(HeightError::HeightTooSmall { .. })
        ));
    }

    #[test]
    fn universal_verschiebung_display() {
        // universal p-typical mod p, n = 1: V_1 = u_1 x +_F u_2 x^p +_F ...
        let p = 2u64;
        let univ = universal_p_typical(p, 8, Convention::Araki).unwrap();
        let src = univ.law.ring().clone();
        let fp = make_ring(&RingSpec::PrimeField(p)).unwrap();
        let fpu = crate::ring::polynomial_ring(
            &fp,
            src.gens().to_vec(),
        )
        .unwrap();
        let modp = univ
            .law
            .map_coefficients(&fpu, &|c: &Elem| {
                let images: Vec<Elem> = c
                    .ring()
                    .gens()
                    .iter()
                    .map(|g| fpu.gen(&g.name))
                    .collect::<Result<_, _>>()?;
                c.map_into(&fpu, &images, &|s| match s {
                    crate::ring::scalar::Scalar::Rat(q) => {
                        let two = num_bigint::BigInt::from(2);
                        let d = crate::ring::scalar::mod_reduce(q.denom(), &two);
                        let dinv = crate::ring::scalar::mod_inverse(&d, &two)
                            .ok_or(crate::ring::RingError::NotAUnit)?;
                        Ok(crate::ring::scalar::Scalar::Res(crate::ring::scalar::mod_reduce(
                            &(q.numer() * dinv),
                            &two,
                        )))
                    }
                    _ => Err(crate::ring::RingError::RingMismatch),
                })
            })
            .unwrap();
        let v1 = verschiebung_series(&modp, p, 1).unwrap();
        // expected: u1 x +_F u2 x^p, folded in the mod-p law
        let x = TruncSeries::var(&fpu, &["x"], 8, "x").unwrap();
        let u1 = fpu.gen("u1").unwrap();
        let u2 = fpu.gen("u2").unwrap();
        let u3 = fpu.gen("u3").unwrap();
        let expect = modp
            .sum_many(&[
                x.scale(&u1),
                x.pow(2).scale(&u2),
                x.pow(4).scale(&u3),
            ])
            .unwrap();
        assert_eq!(v1, expect.truncate(v1.bound()));
        let _ = reduce_mod_p;
    }
}
