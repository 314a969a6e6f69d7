//! Dense univariate polynomial arithmetic modulo p^k, used for finite-field
//! and Galois-ring element inversion and for modulus validation.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::scalar::{mod_inverse, mod_reduce};

/// Coefficients c[i] of sum c[i] x^i, normalized mod `m` with no trailing zeros.
pub type Poly = Vec<BigInt>;

pub fn trim(mut f: Poly) -> Poly {
    while f.last().map_or(false, |c| c.is_zero()) {
        f.pop();
    }
    f
}

pub fn deg(f: &Poly) -> Option<usize> {
    if f.is_empty() {
        None
    } else {
        Some(f.len() - 1)
    }
}

pub fn add(f: &Poly, g: &Poly, m: &BigInt) -> Poly {
    let n = f.len().max(g.len());
    let mut out = vec![BigInt::zero(); n];
    for i in 0..n {
        let a = f.get(i).cloned().unwrap_or_default();
        let b = g.get(i).cloned().unwrap_or_default();
        out[i] = mod_reduce(&(a + b), m);
    }
    trim(out)
}

pub fn sub(f: &Poly, g: &Poly, m: &BigInt) -> Poly {
    let n = f.len().max(g.len());
    let mut out = vec![BigInt::zero(); n];
    for i in 0..n {
        let a = f.get(i).cloned().unwrap_or_default();
        let b = g.get(i).cloned().unwrap_or_default();
        out[i] = mod_reduce(&(a - b), m);
    }
    trim(out)
}

pub fn mul(f: &Poly, g: &Poly, m: &BigInt) -> Poly {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); f.len() + g.len() - 1];
    for (i, a) in f.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in g.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    for c in &mut out {
        *c = mod_reduce(c, m);
    }
    trim(out)
}

/// Remainder of f modulo the monic polynomial g.
pub fn rem_monic(f: &Poly, g: &Poly, m: &BigInt) -> Poly {
    let gd = deg(g).expect("zero modulus");
    assert!(g[gd].is_one(), "modulus must be monic");
    let mut r = f.clone();
    while deg(&r).map_or(false, |d| d >= gd) {
        let d = deg(&r).unwrap();
        let lead = r[d].clone();
        if lead.is_zero() {
            r.pop();
            continue;
        }
        let shift = d - gd;
        for i in 0..=gd {
            let t = &lead * &g[i];
            r[i + shift] = mod_reduce(&(&r[i + shift] - t), m);
        }
        r = trim(r);
    }
    r
}

pub fn mul_mod(f: &Poly, g: &Poly, modulus: &Poly, m: &BigInt) -> Poly {
    rem_monic(&mul(f, g, m), modulus, m)
}

pub fn pow_mod(f: &Poly, mut e: num_bigint::BigUint, modulus: &Poly, m: &BigInt) -> Poly {
    let mut base = rem_monic(f, modulus, m);
    let mut acc = vec![BigInt::one()];
    let one = num_bigint::BigUint::one();
    let zero = num_bigint::BigUint::zero();
    while e > zero {
        if (&e & &one) == one {
            acc = mul_mod(&acc, &base, modulus, m);
        }
        e >>= 1;
        if e > zero {
            base = mul_mod(&base, &base, modulus, m);
        }
    }
    acc
}

/// Monic gcd over the field Z/p.
pub fn gcd_mod_p(f: &Poly, g: &Poly, p: &BigInt) -> Poly {
    let mut a = trim(f.clone());
    let mut b = trim(g.clone());
    while !b.is_empty() {
        // make b monic, reduce a mod b, rotate
        let bd = deg(&b).unwrap();
        let lead_inv = mod_inverse(&b[bd], p).expect("leading coeff not invertible");
        let monic_b: Poly = b.iter().map(|c| mod_reduce(&(c * &lead_inv), p)).collect();
        let r = rem_monic(&a, &monic_b, p);
        a = monic_b;
        b = r;
    }
    if a.is_empty() {
        return a;
    }
    let ad = deg(&a).unwrap();
    let inv = mod_inverse(&a[ad], p).expect("leading coeff not invertible");
    a.iter().map(|c| mod_reduce(&(c * &inv), p)).collect()
}

/// Rabin irreducibility test for a monic polynomial over Z/p.
pub fn is_irreducible_mod_p(f: &Poly, p: u64) -> bool {
    let pb = BigInt::from(p);
    let Some(m) = deg(f) else { return false };
    if m == 0 {
        return false;
    }
    if !f[m].is_one() {
        return false;
    }
    let x: Poly = vec![BigInt::zero(), BigInt::one()];
    let pm = num_bigint::BigUint::from(p).pow(m as u32);
    // x^{p^m} == x mod f
    let xq = pow_mod(&x, pm, f, &pb);
    if trim(sub(&xq, &x, &pb)) != Vec::<BigInt>::new() {
        return false;
    }
    // for each prime divisor q of m: gcd(x^{p^{m/q}} - x, f) == 1
    let mut m_rest = m;
    let mut q = 2;
    let mut prime_divs = Vec::new();
    while q * q <= m_rest {
        if m_rest % q == 0 {
            prime_divs.push(q);
            while m_rest % q == 0 {
                m_rest /= q;
            }
        }
        q += 1;
    }
    if m_rest > 1 {
        prime_divs.push(m_rest);
    }
    for q in prime_divs {
        let e = num_bigint::BigUint::from(p).pow((m / q) as u32);
        let xq = pow_mod(&x, e, f, &pb);
        let d = gcd_mod_p(&sub(&xq, &x, &pb), f, &pb);
        if deg(&d) != Some(0) {
            return false;
        }
    }
    true
}

/// The canonical irreducible monic polynomial of degree m over Z/p: the
/// first irreducible in the little-endian coefficient enumeration
/// w^m, w^m + 1, w^m + w, w^m + w + 1, ...
pub fn canonical_irreducible(p: u64, m: u32) -> Poly {
    assert!(m >= 1);
    let pb = BigInt::from(p);
    let total = (p as u128).pow(m);
    for k in 0..total {
        let mut f = vec![BigInt::zero(); m as usize + 1];
        f[m as usize] = BigInt::one();
        let mut kk = k;
        for i in 0..m as usize {
            f[i] = BigInt::from((kk % p as u128) as u64);
            kk /= p as u128;
        }
        let f = trim(f);
        if is_irreducible_mod_p(&f, p) {
            return f;
        }
        let _ = &pb;
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

/// Inverse of f in Z/p^k [w] / (modulus): invert mod p, then Hensel-lift.
pub fn inverse_mod(f: &Poly, modulus: &Poly, p: u64, k: u32) -> Option<Poly> {
    let pb = BigInt::from(p);
    let f_red: Poly = trim(f.iter().map(|c| mod_reduce(c, &pb)).collect());
    let mod_red: Poly = modulus.iter().map(|c| mod_reduce(c, &pb)).collect();
    // invert mod p via extended euclid: find g with f*g = 1 mod (modulus, p)
    let mut g = ext_inverse_field(&f_red, &trim(mod_red), &pb)?;
    // Hensel: g <- g(2 - f g) doubles precision each step
    let mut prec = 1u32;
    while prec < k {
        prec = (prec * 2).min(k);
        let m = BigInt::from(p).pow(prec);
        let fg = mul_mod(&g, f, modulus, &m);
        let two_minus = sub(&[BigInt::from(2)].to_vec(), &fg, &m);
        g = mul_mod(&g, &two_minus, modulus, &m);
    }
    Some(g)
}

/// Extended-Euclid inverse of f modulo the monic irreducible `modulus`, over Z/p.
fn ext_inverse_field(f: &Poly, modulus: &Poly, p: &BigInt) -> Option<Poly> {
    if trim(f.clone()).is_empty() {
        return None;
    }
    // maintain r0 = modulus, r1 = f, with s-coefficients tracking f-multiples
    let mut r0 = modulus.clone();
    let mut r1 = trim(f.clone());
    let mut s0: Poly = Vec::new();
    let mut s1: Poly = vec![BigInt::one()];
    while !r1.is_empty() {
        // q = r0 div r1 over the field
        let d1 = deg(&r1).unwrap();
        let lead_inv = mod_inverse(&r1[d1], p)?;
        let mut q: Poly = Vec::new();
        let mut r = r0.clone();
        while deg(&r).map_or(false, |d| d >= d1) {
            let d = deg(&r).unwrap();
            let c = mod_reduce(&(&r[d] * &lead_inv), p);
            let shift = d - d1;
            if q.len() < shift + 1 {
                q.resize(shift + 1, BigInt::zero());
            }
            q[shift] = c.clone();
            for i in 0..=d1 {
                let t = &c * &r1[i];
                r[i + shift] = mod_reduce(&(&r[i + shift] - t), p);
            }
            r = trim(r);
        }
        let new_s = sub(&s0, &mul(&q, &s1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = new_s;
    }
    // r0 = gcd; must be a nonzero constant
    if deg(&r0) != Some(0) {
        return None;
    }
    let c_inv = mod_inverse(&r0[0], p)?;
    Some(trim(s0.iter().map(|c| mod_reduce(&(c * &c_inv), p)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_moduli() {
        // F_4: w^2 + w + 1 is the first irreducible
        let f = canonical_irreducible(2, 2);
        assert_eq!(f, vec![BigInt::one(), BigInt::one(), BigInt::one()]);
        // F_9: w^2 + 1
        let f = canonical_irreducible(3, 2);
        assert_eq!(f, vec![BigInt::one(), BigInt::zero(), BigInt::one()]);
        // F_8: w^3 + w + 1
        let f = canonical_irreducible(2, 3);
        assert_eq!(f, vec![BigInt::one(), BigInt::one(), BigInt::zero(), BigInt::one()]);
    }

    #[test]
    fn irreducibility() {
        let p = 2;
        // w^2 + 1 = (w+1)^2 mod 2
        let f = vec![BigInt::one(), BigInt::zero(), BigInt::one()];
        assert!(!is_irreducible_mod_p(&f, p));
        let g = vec![BigInt::one(), BigInt::one(), BigInt::one()];
        assert!(is_irreducible_mod_p(&g, p));
    }

    #[test]
    fn galois_inverse() {
        // in Z/4[w]/(w^2+w+1): (1+2w) * its inverse = 1
        let modulus = vec![BigInt::one(), BigInt::one(), BigInt::one()];
        let f = vec![BigInt::one(), BigInt::from(2)];
        let m = BigInt::from(4);
        let g = inverse_mod(&f, &modulus, 2, 2).unwrap();
        let prod = mul_mod(&f, &g, &modulus, &m);
        assert_eq!(prod, vec![BigInt::one()]);
    }

    #[test]
    fn field_inverse_f4() {
        // w * w^{-1} = 1 in F_4
        let modulus = vec![BigInt::one(), BigInt::one(), BigInt::one()];
        let w = vec![BigInt::zero(), BigInt::one()];
        let m = BigInt::from(2);
        let inv = inverse_mod(&w, &modulus, 2, 1).unwrap();
        assert_eq!(mul_mod(&w, &inv, &modulus, &m), vec![BigInt::one()]);
    }
}
