//! Sparse multivariate power series truncated at a total-degree bound.
//!
//! A `TruncSeries` is the universal container for formal group laws,
//! logarithms, isomorphisms and p-series: a sparse polynomial over an exact
//! coefficient ring, with every operation truncating at the common bound.
//! Derivatives mark their top degree unreliable instead of silently keeping
//! it; binary operations propagate the reliable range.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::ring::{Elem, Ring, RingError};

/// Exponent vector, ordered by (total degree, lexicographic).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exp(pub Box<[u16]>);

impl Exp {
    pub fn total(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    fn mul(&self, other: &Exp) -> Exp {
        Exp(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }
}

impl PartialOrd for Exp {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exp {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total().cmp(&other.total()).then_with(|| self.0.cmp(&other.0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesError {
    RingMismatch,
    BoundMismatch,
    VariableMismatch,
    NonzeroConstantTerm,
    NonUnitLinearCoefficient,
    UnknownVariable(String),
    NotUnivariate,
    Ring(RingError),
    Parse(String),
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::RingMismatch => write!(f, "series have different coefficient rings"),
            SeriesError::BoundMismatch => write!(f, "series have different truncation bounds"),
            SeriesError::VariableMismatch => write!(f, "series have different variables"),
            SeriesError::NonzeroConstantTerm => write!(f, "inner series has a nonzero constant term"),
            SeriesError::NonUnitLinearCoefficient => {
                write!(f, "linear coefficient is not a unit")
            }
            SeriesError::UnknownVariable(v) => write!(f, "unknown variable: {}", v),
            SeriesError::NotUnivariate => write!(f, "operation needs a univariate series"),
            SeriesError::Ring(e) => write!(f, "{}", e),
            SeriesError::Parse(s) => write!(f, "parse error: {}", s),
        }
    }
}

impl std::error::Error for SeriesError {}

impl From<RingError> for SeriesError {
    fn from(e: RingError) -> Self {
        SeriesError::Ring(e)
    }
}

/// Sparse truncated multivariate power series.
#[derive(Clone, Debug)]
pub struct TruncSeries {
    ring: Ring,
    vars: Arc<Vec<String>>,
    bound: u32,
    /// Degrees above this are present but unreliable (derivative convention).
    valid_to: u32,
    terms: BTreeMap<Exp, Elem>,
}

impl PartialEq for TruncSeries {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring
            && *self.vars == *other.vars
            && self.bound == other.bound
            && self.terms == other.terms
    }
}

impl Eq for TruncSeries {}

pub type SResult<T> = Result<T, SeriesError>;

impl TruncSeries {
    pub fn zero(ring: &Ring, vars: &[&str], bound: u32) -> TruncSeries {
        TruncSeries {
            ring: ring.clone(),
            vars: Arc::new(vars.iter().map(|s| s.to_string()).collect()),
            bound,
            valid_to: bound,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Ring, vars: &[&str], bound: u32, c: Elem) -> TruncSeries {
        let mut s = TruncSeries::zero(ring, vars, bound);
        if !c.is_zero() {
            s.terms.insert(Exp(vec![0; s.vars.len()].into_boxed_slice()), c);
        }
        s
    }

    /// The series consisting of the single variable `name`.
    pub fn var(ring: &Ring, vars: &[&str], bound: u32, name: &str) -> SResult<TruncSeries> {
        let mut s = TruncSeries::zero(ring, vars, bound);
        let i = s.var_index(name)?;
        if bound >= 1 {
            let mut e = vec![0u16; s.vars.len()];
            e[i] = 1;
            s.terms.insert(Exp(e.into_boxed_slice()), ring.one());
        }
        Ok(s)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn valid_to(&self) -> u32 {
        self.valid_to
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &Elem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn var_index(&self, name: &str) -> SResult<usize> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| SeriesError::UnknownVariable(name.to_string()))
    }

    /// Coefficient of the given exponent vector (zero if absent).
    pub fn coeff(&self, exps: &[u16]) -> Elem {
        let key = Exp(exps.to_vec().into_boxed_slice());
        self.terms.get(&key).cloned().unwrap_or_else(|| self.ring.zero())
    }

    /// Coefficient of x^k for a univariate series.
    pub fn coeff1(&self, k: u16) -> Elem {
        assert_eq!(self.vars.len(), 1, "coeff1 needs a univariate series");
        self.coeff(&[k])
    }

    pub fn constant_term(&self) -> Elem {
        self.coeff(&vec![0u16; self.vars.len()])
    }

    /// Insert or replace a coefficient; zero coefficients are removed.
    pub fn set_coeff(&mut self, exps: &[u16], c: Elem) {
        let key = Exp(exps.to_vec().into_boxed_slice());
        if key.total() > self.bound || c.is_zero() {
            self.terms.remove(&key);
            if !c.is_zero() && key.total() > self.bound {
                return;
            }
        } else {
            self.terms.insert(key, c);
        }
    }

    fn check_compatible(&self, other: &TruncSeries) -> SResult<()> {
        if self.ring != other.ring {
            return Err(SeriesError::RingMismatch);
        }
        if *self.vars != *other.vars {
            return Err(SeriesError::VariableMismatch);
        }
        if self.bound != other.bound {
            return Err(SeriesError::BoundMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncSeries) -> TruncSeries {
        self.try_add(other).expect("incompatible series")
    }

    pub fn try_add(&self, other: &TruncSeries) -> SResult<TruncSeries> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.valid_to = self.valid_to.min(other.valid_to);
        for (e, c) in &other.terms {
            let cur = out.terms.get(e);
            let s = match cur {
                Some(x) => x.add(c),
                None => c.clone(),
            };
            if s.is_zero() {
                out.terms.remove(e);
            } else {
                out.terms.insert(e.clone(), s);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> TruncSeries {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &TruncSeries) -> TruncSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Elem) -> TruncSeries {
        let mut out = TruncSeries {
            ring: self.ring.clone(),
            vars: self.vars.clone(),
            bound: self.bound,
            valid_to: self.valid_to,
            terms: BTreeMap::new(),
        };
        if c.is_zero() {
            return out;
        }
        for (e, v) in &self.terms {
            let s = v.mul(c);
            if !s.is_zero() {
                out.terms.insert(e.clone(), s);
            }
        }
        out
    }

    pub fn mul(&self, other: &TruncSeries) -> TruncSeries {
        self.try_mul(other).expect("incompatible series")
    }

    pub fn try_mul(&self, other: &TruncSeries) -> SResult<TruncSeries> {
        self.check_compatible(other)?;
        let mut acc: BTreeMap<Exp, Elem> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            let d1 = e1.total();
            if d1 > self.bound {
                continue;
            }
            for (e2, c2) in &other.terms {
                if d1 + e2.total() > self.bound {
                    continue;
                }
                let e = e1.mul(e2);
                let c = c1.mul(c2);
                if c.is_zero() {
                    continue;
                }
                match acc.entry(e) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        let s = o.get().add(&c);
                        if s.is_zero() {
                            o.remove();
                        } else {
                            *o.get_mut() = s;
                        }
                    }
                }
            }
        }
        Ok(TruncSeries {
            ring: self.ring.clone(),
            vars: self.vars.clone(),
            bound: self.bound,
            valid_to: self.valid_to.min(other.valid_to),
            terms: acc,
        })
    }

    pub fn pow(&self, e: u32) -> TruncSeries {
        let one = TruncSeries::constant(&self.ring, &self.var_refs(), self.bound, self.ring.one());
        let mut acc = one;
        acc.valid_to = self.valid_to;
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    fn var_refs(&self) -> Vec<&str> {
        self.vars.iter().map(|s| s.as_str()).collect()
    }

    /// Truncate to a smaller bound M (degrees > M are dropped).
    pub fn truncate(&self, m: u32) -> TruncSeries {
        let mut out = self.clone();
        out.bound = m.min(self.bound);
        out.valid_to = self.valid_to.min(out.bound);
        out.terms.retain(|e, _| e.total() <= out.bound);
        out
    }

    /// Same data viewed at a larger bound; degrees above the old bound are
    /// unknown, so the reliable range stays at the old bound.
    pub fn with_bound(&self, m: u32) -> TruncSeries {
        if m <= self.bound {
            return self.truncate(m);
        }
        let mut out = self.clone();
        out.bound = m;
        out.valid_to = self.valid_to;
        out
    }

    /// Formal partial derivative. Top-degree information becomes unreliable,
    /// which is tracked in `valid_to` (the bound itself is unchanged).
    pub fn partial(&self, var: &str) -> SResult<TruncSeries> {
        let i = self.var_index(var)?;
        let mut out = TruncSeries {
            ring: self.ring.clone(),
            vars: self.vars.clone(),
            bound: self.bound,
            valid_to: self.valid_to.saturating_sub(1),
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            if e.0[i] == 0 {
                continue;
            }
            let mut v = e.0.to_vec();
            let k = v[i];
            v[i] -= 1;
            let factor = self.ring.from_i64(k as i64);
            let s = c.mul(&factor);
            if !s.is_zero() {
                out.terms.insert(Exp(v.into_boxed_slice()), s);
            }
        }
        Ok(out)
    }

    /// Substitute each variable by the corresponding series. Every image must
    /// have zero constant term (truncation soundness) and live in a common
    /// series algebra.
    pub fn subst(&self, images: &[&TruncSeries]) -> SResult<TruncSeries> {
        assert_eq!(images.len(), self.vars.len(), "one image per variable");
        let Some(first) = images.first() else {
            // no variables: constant series; reinterpret in trivial context
            return Err(SeriesError::NotUnivariate);
        };
        for im in images {
            first.check_compatible(im)?;
            if !im.constant_term().is_zero() {
                return Err(SeriesError::NonzeroConstantTerm);
            }
        }
        let bound = first.bound;
        let mut valid = first.valid_to.min(self.valid_to);
        for im in images {
            valid = valid.min(im.valid_to);
        }
        let mut out = TruncSeries {
            ring: first.ring.clone(),
            vars: first.vars.clone(),
            bound,
            valid_to: valid,
            terms: BTreeMap::new(),
        };
        // cache powers of each image
        let mut pow_cache: Vec<Vec<TruncSeries>> = images
            .iter()
            .map(|im| {
                vec![TruncSeries::constant(&im.ring, &im.var_refs(), bound, im.ring.one())]
            })
            .collect();
        for (e, c) in &self.terms {
            if e.total() > bound {
                continue;
            }
            let mut t =
                TruncSeries::constant(&out.ring, &out.var_refs(), bound, c.clone());
            let mut skip = false;
            for (i, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if k as u32 > bound {
                    skip = true;
                    break;
                }
                while pow_cache[i].len() <= k as usize {
                    let next = pow_cache[i].last().unwrap().mul(images[i]);
                    pow_cache[i].push(next);
                }
                t = t.mul(&pow_cache[i][k as usize]);
                if t.is_zero() {
                    break;
                }
            }
            if skip {
                continue;
            }
            out = out.add(&t);
        }
        out.valid_to = valid;
        Ok(out)
    }

    /// Compose a univariate series with an inner series: self ∘ inner.
    pub fn compose(&self, inner: &TruncSeries) -> SResult<TruncSeries> {
        if self.vars.len() != 1 {
            return Err(SeriesError::NotUnivariate);
        }
        self.subst(&[inner])
    }

    /// Reinterpret over a different variable list: variable i of self becomes
    /// variable `mapping[i]` of the new list.
    pub fn inject(&self, vars: &[&str], mapping: &[usize]) -> TruncSeries {
        assert_eq!(mapping.len(), self.vars.len());
        let mut out = TruncSeries::zero(&self.ring, vars, self.bound);
        out.valid_to = self.valid_to;
        for (e, c) in &self.terms {
            let mut v = vec![0u16; vars.len()];
            for (i, &k) in e.0.iter().enumerate() {
                v[mapping[i]] += k;
            }
            out.terms.insert(Exp(v.into_boxed_slice()), c.clone());
        }
        out
    }

    /// Apply a coefficient map (e.g. reduction or base change) termwise.
    pub fn map_coefficients(
        &self,
        target: &Ring,
        f: &dyn Fn(&Elem) -> Result<Elem, RingError>,
    ) -> SResult<TruncSeries> {
        let mut out = TruncSeries {
            ring: target.clone(),
            vars: self.vars.clone(),
            bound: self.bound,
            valid_to: self.valid_to,
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            let v = f(c)?;
            if !v.is_zero() {
                out.terms.insert(e.clone(), v);
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse of a series with unit constant term.
    pub fn inv_series(&self) -> SResult<TruncSeries> {
        let c0 = self.constant_term();
        let c0inv = c0.inv().map_err(|_| SeriesError::NonUnitLinearCoefficient)?;
        let mut g = TruncSeries::constant(&self.ring, &self.var_refs(), self.bound, c0inv);
        let two = TruncSeries::constant(
            &self.ring,
            &self.var_refs(),
            self.bound,
            self.ring.from_i64(2),
        );
        let mut prec = 1u32;
        loop {
            // g <- g(2 - f g), doubling precision
            let fg = self.mul(&g);
            g = g.mul(&two.sub(&fg));
            if prec >= self.bound {
                break;
            }
            prec *= 2;
        }
        g.valid_to = self.valid_to;
        Ok(g)
    }

    /// Composition inverse of a univariate series with f(0) = 0 and unit
    /// linear coefficient: returns g with f∘g = g∘f = x up to the bound.
    pub fn reversion(&self) -> SResult<TruncSeries> {
        if self.vars.len() != 1 {
            return Err(SeriesError::NotUnivariate);
        }
        if !self.constant_term().is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let f1 = self.coeff(&[1]);
        let f1inv = f1.inv().map_err(|_| SeriesError::NonUnitLinearCoefficient)?;
        let var = self.vars[0].clone();
        let x = TruncSeries::var(&self.ring, &self.var_refs(), self.bound, &var)?;
        let mut g = x.scale(&f1inv);
        if self.bound <= 1 {
            return Ok(g);
        }
        let fp = self.partial(&var)?;
        let mut prec = 1u32;
        while prec < self.bound {
            prec = (prec * 2).min(self.bound);
            let fg = self.subst(&[&g])?;
            let defect = fg.sub(&x);
            if defect.is_zero() {
                break;
            }
            let fpg = fp.subst(&[&g])?;
            let corr = defect.mul(&fpg.inv_series()?);
            g = g.sub(&corr);
        }
        g.valid_to = self.valid_to;
        Ok(g)
    }

    /// Equality of all terms of total degree ≤ d.
    pub fn eq_up_to(&self, other: &TruncSeries, d: u32) -> bool {
        if self.ring != other.ring || *self.vars != *other.vars {
            return false;
        }
        let mine: Vec<_> = self.terms.iter().filter(|(e, _)| e.total() <= d).collect();
        let theirs: Vec<_> = other.terms.iter().filter(|(e, _)| e.total() <= d).collect();
        mine == theirs
    }

    pub fn is_zero_up_to(&self, d: u32) -> bool {
        self.terms.keys().all(|e| e.total() > d)
    }

    /// Largest degree both series are reliable to.
    pub fn common_valid(&self, other: &TruncSeries) -> u32 {
        self.valid_to.min(other.valid_to)
    }

    /// Tighten the reliable range (used by operations that know better).
    pub fn restrict_valid_to(&mut self, v: u32) {
        self.valid_to = self.valid_to.min(v);
    }

    /// Canonical text serialization.
    pub fn serialize(&self) -> String {
        let mut out = format!("N={}; vars={}\n", self.bound, self.vars.join(","));
        for (e, c) in &self.terms {
            let exps: Vec<String> = e.0.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("term {}: {}\n", exps.join(","), c));
        }
        out
    }

    /// Parse the canonical text serialization over the given ring.
    pub fn deserialize(ring: &Ring, input: &str) -> SResult<TruncSeries> {
        let mut lines = input.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| SeriesError::Parse("empty series".into()))?;
        let mut bound = None;
        let mut vars: Vec<String> = Vec::new();
        for part in header.split(';') {
            let part = part.trim();
            if let Some(v) = part.strip_prefix("N=") {
                bound = Some(
                    v.trim()
                        .parse::<u32>()
                        .map_err(|_| SeriesError::Parse(format!("bad bound {}", v)))?,
                );
            } else if let Some(v) = part.strip_prefix("vars=") {
                vars = v.split(',').map(|s| s.trim().to_string()).collect();
            }
        }
        let bound = bound.ok_or_else(|| SeriesError::Parse("missing N=".into()))?;
        if vars.is_empty() {
            return Err(SeriesError::Parse("missing vars=".into()));
        }
        let var_refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
        let mut s = TruncSeries::zero(ring, &var_refs, bound);
        for line in lines {
            let line = line.trim();
            let Some(rest) = line.strip_prefix("term ") else {
                return Err(SeriesError::Parse(format!("bad line: {}", line)));
            };
            let (exps, coef) = rest
                .split_once(':')
                .ok_or_else(|| SeriesError::Parse(format!("bad line: {}", line)))?;
            let e: Result<Vec<u16>, _> =
                exps.split(',').map(|x| x.trim().parse::<u16>()).collect();
            let e = e.map_err(|_| SeriesError::Parse(format!("bad exponents: {}", exps)))?;
            if e.len() != vars.len() {
                return Err(SeriesError::Parse("exponent arity mismatch".into()));
            }
            let c = ring.parse(coef.trim())?;
            s.set_coeff(&e, c);
        }
        Ok(s)
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if first {
                first = false;
            } else {
                write!(f, " + ")?;
            }
            let mut parts = Vec::new();
            let cs = format!("{}", c);
            let needs_parens = cs.contains('+') || cs.contains(' ');
            if e.total() == 0 || !c.is_one() {
                if needs_parens {
                    parts.push(format!("({})", cs));
                } else {
                    parts.push(cs);
                }
            }
            for (i, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if k == 1 {
                    parts.push(self.vars[i].clone());
                } else {
                    parts.push(format!("{}^{}", self.vars[i], k));
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

// Spec-facing free functions with the documented error contracts.

pub fn series_mul(a: &TruncSeries, b: &TruncSeries) -> SResult<TruncSeries> {
    a.try_mul(b)
}

pub fn series_compose(outer: &TruncSeries, inner: &TruncSeries) -> SResult<TruncSeries> {
    outer.compose(inner)
}

pub fn series_reversion(f: &TruncSeries) -> SResult<TruncSeries> {
    f.reversion()
}

pub fn series_partial(f: &TruncSeries, var: &str) -> SResult<TruncSeries> {
    f.partial(var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{make_ring, RingSpec};

    fn zz() -> Ring {
        make_ring(&RingSpec::Integers).unwrap()
    }

    fn qq() -> Ring {
        make_ring(&RingSpec::Rationals).unwrap()
    }

    #[test]
    fn mul_truncates() {
        let r = zz();
        let x = TruncSeries::var(&r, &["x"], 4, "x").unwrap();
        let one = TruncSeries::constant(&r, &["x"], 4, r.one());
        // (1+x)(1-x) = 1 - x^2
        let a = one.add(&x);
        let b = one.sub(&x);
        let p = a.mul(&b);
        let expect = one.sub(&x.pow(2));
        assert_eq!(p, expect);
        // x^4 * x = 0
        assert!(x.pow(4).mul(&x).is_zero());
    }

    #[test]
    fn two_var_square() {
        let r = zz();
        let x = TruncSeries::var(&r, &["x", "y"], 3, "x").unwrap();
        let y = TruncSeries::var(&r, &["x", "y"], 3, "y").unwrap();
        let s = x.add(&y).pow(2);
        assert_eq!(s.coeff(&[1, 1]), r.from_i64(2));
        assert_eq!(s.coeff(&[2, 0]), r.one());
    }

    #[test]
    fn composition() {
        let r = zz();
        // (x + x^2) ∘ (x^2) = x^2 + x^4 at N=5
        let x = TruncSeries::var(&r, &["x"], 5, "x").unwrap();
        let outer = x.add(&x.pow(2));
        let inner = x.pow(2);
        let c = outer.compose(&inner).unwrap();
        assert_eq!(c, x.pow(2).add(&x.pow(4)));
        // f ∘ x = f
        assert_eq!(outer.compose(&x).unwrap(), outer);
        // (x^2) ∘ (x+y) at N=3
        let x2 = TruncSeries::var(&r, &["x"], 3, "x").unwrap().pow(2);
        let xb = TruncSeries::var(&r, &["x", "y"], 3, "x").unwrap();
        let yb = TruncSeries::var(&r, &["x", "y"], 3, "y").unwrap();
        let c = x2.compose(&xb.add(&yb)).unwrap();
        assert_eq!(c, xb.add(&yb).pow(2));
    }

    #[test]
    fn reversion_catalan() {
        let r = zz();
        let x = TruncSeries::var(&r, &["x"], 4, "x").unwrap();
        let f = x.add(&x.pow(2));
        let g = f.reversion().unwrap();
        // x - x^2 + 2x^3 - 5x^4
        assert_eq!(g.coeff(&[1]), r.one());
        assert_eq!(g.coeff(&[2]), r.from_i64(-1));
        assert_eq!(g.coeff(&[3]), r.from_i64(2));
        assert_eq!(g.coeff(&[4]), r.from_i64(-5));
        let back = f.compose(&g).unwrap();
        assert_eq!(back, x);
        assert_eq!(g.compose(&f).unwrap(), x);
        // reversion of x is x
        assert_eq!(x.reversion().unwrap(), x);
        // reversion of λx is λ^{-1} x over Q
        let q = qq();
        let xq = TruncSeries::var(&q, &["x"], 3, "x").unwrap();
        let lam = q.from_i64(3);
        let g = xq.scale(&lam).reversion().unwrap();
        assert_eq!(g, xq.scale(&q.from_ratio(1, 3).unwrap()));
    }

    #[test]
    fn partial_derivative() {
        let r = zz();
        let x = TruncSeries::var(&r, &["x", "y"], 5, "x").unwrap();
        let y = TruncSeries::var(&r, &["x", "y"], 5, "y").unwrap();
        // d/dx (x^2 y + x y^2) = 2xy + y^2
        let f = x.pow(2).mul(&y).add(&x.mul(&y.pow(2)));
        let d = f.partial("x").unwrap();
        assert_eq!(d, x.mul(&y).scale(&r.from_i64(2)).add(&y.pow(2)));
        assert_eq!(d.valid_to(), 4);
        // derivative of constant is 0
        let c = TruncSeries::constant(&r, &["x", "y"], 5, r.from_i64(7));
        assert!(c.partial("x").unwrap().is_zero());
        // unknown variable errors
        assert!(f.partial("z").is_err());
    }

    #[test]
    fn leibniz_rule() {
        let r = zz();
        let x = TruncSeries::var(&r, &["x", "y"], 6, "x").unwrap();
        let y = TruncSeries::var(&r, &["x", "y"], 6, "y").unwrap();
        let a = x.add(&y.pow(2)).add(&x.mul(&y));
        let b = y.add(&x.pow(3));
        let lhs = a.mul(&b).partial("x").unwrap();
        let rhs = a.partial("x").unwrap().mul(&b).add(&a.mul(&b.partial("x").unwrap()));
        let d = lhs.common_valid(&rhs);
        assert!(lhs.eq_up_to(&rhs, d));
    }

    #[test]
    fn truncation_coherence() {
        let r = zz();
        let x = TruncSeries::var(&r, &["x"], 8, "x").unwrap();
        let one = TruncSeries::constant(&r, &["x"], 8, r.one());
        let f = one.add(&x).add(&x.pow(3));
        let g = one.sub(&x.pow(2)).add(&x.pow(5));
        // compute at 8 then truncate to 5 == compute at 5
        let hi = f.mul(&g).truncate(5);
        let lo = f.truncate(5).mul(&g.truncate(5));
        assert_eq!(hi, lo);
    }

    #[test]
    fn inverse_geometric() {
        let r = zz();
        let x = TruncSeries::var(&r, &["x"], 5, "x").unwrap();
        let one = TruncSeries::constant(&r, &["x"], 5, r.one());
        let inv = one.add(&x).inv_series().unwrap();
        // 1 - x + x^2 - x^3 + x^4 - x^5
        let mut expect = TruncSeries::zero(&r, &["x"], 5);
        for k in 0..=5u16 {
            expect.set_coeff(&[k], r.from_i64(if k % 2 == 0 { 1 } else { -1 }));
        }
        assert_eq!(inv, expect);
    }

    #[test]
    fn serialization_round_trip() {
        let q = make_ring(&RingSpec::PLocalRationals(2)).unwrap();
        let x = TruncSeries::var(&q, &["x", "y"], 4, "x").unwrap();
        let y = TruncSeries::var(&q, &["x", "y"], 4, "y").unwrap();
        let f = x.add(&y).add(&x.mul(&y).scale(&q.from_ratio(3, 5).unwrap()));
        let text = f.serialize();
        let g = TruncSeries::deserialize(&q, &text).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn composition_associativity() {
        let q = qq();
        let x = TruncSeries::var(&q, &["x"], 7, "x").unwrap();
        let f = x.add(&x.pow(2)).add(&x.pow(3).scale(&q.from_i64(2)));
        let g = x.sub(&x.pow(2));
        let h = x.add(&x.pow(4));
        let a = f.compose(&g).unwrap().compose(&h).unwrap();
        let b = f.compose(&g.compose(&h).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
