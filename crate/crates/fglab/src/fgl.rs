//! Formal group law buds and their calculus: axiom validation, symmetric
//! 2-cocycles, n-series, inverses, coordinate changes, invariant
//! differentials, logarithms, homomorphism checks and grading.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::ring::{self, Elem, Ring, RingError};
use crate::series::{SeriesError, TruncSeries};

pub const FGL_VARS: [&str; 2] = ["x", "y"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FglError {
    Series(SeriesError),
    Ring(RingError),
    NotAFormalGroupLaw(ValidationReport),
    NonUnitDenominator(i64),
    NonInvertibleDenominator(u64),
    NonUnitLinearCoefficient,
    WrongVariables,
}

impl fmt::Display for FglError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FglError::Series(e) => write!(f, "{}", e),
            FglError::Ring(e) => write!(f, "{}", e),
            FglError::NotAFormalGroupLaw(r) => write!(f, "not a formal group law: {}", r),
            FglError::NonUnitDenominator(n) => write!(f, "{} is not a unit in the base ring", n),
            FglError::NonInvertibleDenominator(n) => {
                write!(f, "integration requires inverting {}, which is not possible", n)
            }
            FglError::NonUnitLinearCoefficient => write!(f, "linear coefficient is not a unit"),
            FglError::WrongVariables => write!(f, "series must be in the variables (x, y)"),
        }
    }
}

impl std::error::Error for FglError {}

impl From<SeriesError> for FglError {
    fn from(e: SeriesError) -> Self {
        FglError::Series(e)
    }
}

impl From<RingError> for FglError {
    fn from(e: RingError) -> Self {
        FglError::Ring(e)
    }
}

pub type FResult<T> = Result<T, FglError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    LeftUnit,
    RightUnit,
    Commutativity,
    Associativity,
    Grading,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::LeftUnit => "left unit",
            Axiom::RightUnit => "right unit",
            Axiom::Commutativity => "commutativity",
            Axiom::Associativity => "associativity",
            Axiom::Grading => "grading",
        };
        write!(f, "{}", s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomFailure {
    pub axiom: Axiom,
    /// Lowest-degree offending monomial, rendered.
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub failures: Vec<AxiomFailure>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            return write!(f, "all axioms pass");
        }
        let msgs: Vec<String> = self
            .failures
            .iter()
            .map(|x| format!("{} fails at {}", x.axiom, x.witness))
            .collect();
        write!(f, "{}", msgs.join("; "))
    }
}

fn lowest_witness(s: &TruncSeries) -> String {
    match s.terms().next() {
        Some((e, c)) => {
            let vars = s.vars();
            let mut parts = Vec::new();
            for (i, &k) in e.0.iter().enumerate() {
                if k == 1 {
                    parts.push(vars[i].clone());
                } else if k > 1 {
                    parts.push(format!("{}^{}", vars[i], k));
                }
            }
            if parts.is_empty() {
                format!("constant {}", c)
            } else {
                parts.join("*")
            }
        }
        None => "0".to_string(),
    }
}

/// Substitute 0 for the variable at index `idx` of a two-variable series;
/// the surviving variable is returned as a univariate series in "x".
pub fn set_var_zero(f: &TruncSeries, idx: usize) -> TruncSeries {
    let mut out = TruncSeries::zero(f.ring(), &["x"], f.bound());
    for (e, c) in f.terms() {
        if e.0[idx] != 0 {
            continue;
        }
        let other = e.0[1 - idx];
        let prev = out.coeff(&[other]);
        out.set_coeff(&[other], prev.add(c));
    }
    out.restrict_valid_to(f.valid_to());
    out
}

/// Check the bud axioms of a candidate F(x, y); failures are reported as
/// data, with the lowest-degree offending monomial for each axiom.
pub fn validate_fgl(f: &TruncSeries) -> FResult<ValidationReport> {
    if f.vars() != FGL_VARS {
        return Err(FglError::WrongVariables);
    }
    let ring = f.ring().clone();
    let n = f.bound();
    let mut failures = Vec::new();
    let x1 = TruncSeries::var(&ring, &["x"], n, "x")?;
    let fx0 = set_var_zero(f, 1);
    if fx0 != x1 {
        failures.push(AxiomFailure {
            axiom: Axiom::RightUnit,
            witness: lowest_witness(&fx0.sub(&x1)),
        });
    }
    let f0y = set_var_zero(f, 0);
    if f0y != x1 {
        failures.push(AxiomFailure {
            axiom: Axiom::LeftUnit,
            witness: lowest_witness(&f0y.sub(&x1)),
        });
    }
    let swapped = f.inject(&FGL_VARS, &[1, 0]);
    if swapped != *f {
        failures.push(AxiomFailure {
            axiom: Axiom::Commutativity,
            witness: lowest_witness(&swapped.sub(f)),
        });
    }
    // associativity in three variables at the same total-degree bound
    let vars3 = ["x", "y", "z"];
    let x3 = TruncSeries::var(&ring, &vars3, n, "x")?;
    let y3 = TruncSeries::var(&ring, &vars3, n, "y")?;
    let z3 = TruncSeries::var(&ring, &vars3, n, "z")?;
    let fxy = f.subst(&[&x3, &y3])?;
    let fyz = f.subst(&[&y3, &z3])?;
    let lhs = f.subst(&[&fxy, &z3])?;
    let rhs = f.subst(&[&x3, &fyz])?;
    if lhs != rhs {
        failures.push(AxiomFailure {
            axiom: Axiom::Associativity,
            witness: lowest_witness(&lhs.sub(&rhs)),
        });
    }
    Ok(ValidationReport { failures })
}

/// A formal group law modulo total degree bound+1 over an exact base ring.
/// With `graded` set, the ring's declared generator degrees are asserted as
/// a grading in which the coefficient of x^i y^j has degree i + j - 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalGroupLawBud {
    f: TruncSeries,
    graded: bool,
}

impl FormalGroupLawBud {
    pub fn new(f: TruncSeries, graded: bool) -> FResult<FormalGroupLawBud> {
        let report = validate_fgl(&f)?;
        if !report.passed() {
            return Err(FglError::NotAFormalGroupLaw(report));
        }
        let bud = FormalGroupLawBud { f, graded };
        if graded {
            let g = bud.grading_check();
            if !g.passed() {
                return Err(FglError::NotAFormalGroupLaw(g));
            }
        }
        Ok(bud)
    }

    /// Wrap without validation, for constructions that verify separately.
    pub fn new_unchecked(f: TruncSeries, graded: bool) -> FormalGroupLawBud {
        FormalGroupLawBud { f, graded }
    }

    pub fn series(&self) -> &TruncSeries {
        &self.f
    }

    pub fn ring(&self) -> &Ring {
        self.f.ring()
    }

    pub fn bound(&self) -> u32 {
        self.f.bound()
    }

    pub fn graded(&self) -> bool {
        self.graded
    }

    /// The additive law x + y.
    pub fn additive(ring: &Ring, bound: u32) -> FormalGroupLawBud {
        let x = TruncSeries::var(ring, &FGL_VARS, bound, "x").unwrap();
        let y = TruncSeries::var(ring, &FGL_VARS, bound, "y").unwrap();
        FormalGroupLawBud { f: x.add(&y), graded: false }
    }

    /// The multiplicative law x + y + xy.
    pub fn multiplicative(ring: &Ring, bound: u32) -> FormalGroupLawBud {
        let x = TruncSeries::var(ring, &FGL_VARS, bound, "x").unwrap();
        let y = TruncSeries::var(ring, &FGL_VARS, bound, "y").unwrap();
        FormalGroupLawBud { f: x.add(&y).add(&x.mul(&y)), graded: false }
    }

    /// Formal sum a +_F b of two series over the same algebra (any variable
    /// set, zero constant terms).
    pub fn sum(&self, a: &TruncSeries, b: &TruncSeries) -> FResult<TruncSeries> {
        let bound = a.bound().min(self.f.bound());
        Ok(self.f.truncate(bound).subst(&[a, b])?)
    }

    /// Fold a nonempty list of series with the formal sum.
    pub fn sum_many(&self, terms: &[TruncSeries]) -> FResult<TruncSeries> {
        let Some(first) = terms.first() else {
            return Err(FglError::WrongVariables);
        };
        let mut acc = first.clone();
        for t in &terms[1..] {
            acc = self.sum(&acc, t)?;
        }
        Ok(acc)
    }

    /// Base-change the law along a coefficient map.
    pub fn map_coefficients(
        &self,
        target: &Ring,
        conv: &dyn Fn(&Elem) -> Result<Elem, RingError>,
    ) -> FResult<FormalGroupLawBud> {
        let f = self.f.map_coefficients(target, conv)?;
        Ok(FormalGroupLawBud { f, graded: self.graded })
    }

    /// Truncate the law to a smaller bound.
    pub fn truncate(&self, bound: u32) -> FormalGroupLawBud {
        FormalGroupLawBud { f: self.f.truncate(bound), graded: self.graded }
    }

    /// Grading report: every coefficient c_{ij} must be homogeneous of
    /// weighted degree i + j - 1 under the ring's declared degrees. This is
    /// exactly the statement that conjugating by a central unit λ rescales
    /// c_{ij} by λ^{i+j-1}.
    pub fn grading_check(&self) -> ValidationReport {
        let ring = self.f.ring();
        let mut failures = Vec::new();
        for (e, c) in self.f.terms() {
            let want = e.total() as i64 - 1;
            let ok = match ring.weighted_degree_checked(c) {
                Some(None) => true,
                Some(Some(d)) => d == want,
                None => false,
            };
            if !ok {
                failures.push(AxiomFailure {
                    axiom: Axiom::Grading,
                    witness: format!(
                        "coefficient of x^{}*y^{} (needs degree {})",
                        e.0[0], e.0[1], want
                    ),
                });
            }
        }
        ValidationReport { failures }
    }
}

/// A strict-or-not isomorphism of buds: φ with φ(F_src(x,y)) = F_tgt(φx, φy).
#[derive(Clone, Debug)]
pub struct BudIsomorphism {
    pub source: FormalGroupLawBud,
    pub target: FormalGroupLawBud,
    pub phi: TruncSeries,
    pub strict: bool,
}

impl BudIsomorphism {
    pub fn new(
        source: FormalGroupLawBud,
        target: FormalGroupLawBud,
        phi: TruncSeries,
    ) -> FResult<BudIsomorphism> {
        let lin = phi.coeff(&[1]);
        if !lin.is_unit() {
            return Err(FglError::NonUnitLinearCoefficient);
        }
        let (ok, _) = check_homomorphism(&phi, &source, &target)?;
        if !ok {
            return Err(FglError::NotAFormalGroupLaw(ValidationReport {
                failures: vec![AxiomFailure {
                    axiom: Axiom::Associativity,
                    witness: "phi is not a homomorphism".into(),
                }],
            }));
        }
        let strict = lin.is_one();
        Ok(BudIsomorphism { source, target, phi, strict })
    }
}

/// The n-th homogeneous symmetric 2-cocycle ((x+y)^n - x^n - y^n)/d_n with
/// d_n = p when n is a power of the prime p, else 1.
pub fn symmetric_cocycle(n: u32, ring: &Ring) -> TruncSeries {
    assert!(n >= 2);
    let d = cocycle_denominator(n);
    let mut s = TruncSeries::zero(ring, &FGL_VARS, n);
    for i in 1..n {
        let b = binomial(n, i) / BigInt::from(d);
        let c = ring.from_int(&b);
        if !c.is_zero() {
            s.set_coeff(&[i as u16, (n - i) as u16], c);
        }
    }
    s
}

/// d_n = p if n = p^k for a prime p, else 1.
pub fn cocycle_denominator(n: u32) -> u64 {
    let mut m = n as u64;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            return if m == 1 { p } else { 1 };
        }
        p += 1;
    }
    m
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// The n-series [n](x): [0] = 0, [m+1](x) = F([m](x), x), [-m] = ι ∘ [m].
pub fn n_series(g: &FormalGroupLawBud, n: i64) -> FResult<TruncSeries> {
    let ring = g.ring().clone();
    let bound = g.bound();
    let x = TruncSeries::var(&ring, &["x"], bound, "x")?;
    if n == 0 {
        return Ok(TruncSeries::zero(&ring, &["x"], bound));
    }
    let mut acc = x.clone();
    for _ in 1..n.unsigned_abs() {
        acc = g.sum(&acc, &x)?;
    }
    if n < 0 {
        let iota = formal_inverse(g)?;
        acc = iota.compose(&acc)?;
    }
    Ok(acc)
}

/// The [1/n]-series: composition inverse of [n], defined when n is a unit.
pub fn one_over_n_series(g: &FormalGroupLawBud, n: i64) -> FResult<TruncSeries> {
    let nn = g.ring().from_i64(n);
    if !nn.is_unit() {
        return Err(FglError::NonUnitDenominator(n));
    }
    Ok(n_series(g, n)?.reversion()?)
}

/// The formal inverse ι(x) with F(x, ι(x)) = 0, ι(0) = 0, ι'(0) = -1.
pub fn formal_inverse(g: &FormalGroupLawBud) -> FResult<TruncSeries> {
    let ring = g.ring().clone();
    let bound = g.bound();
    let x = TruncSeries::var(&ring, &["x"], bound, "x")?;
    let mut iota = x.neg();
    for _ in 0..bound {
        let defect = g.sum(&x, &iota)?;
        if defect.is_zero() {
            break;
        }
        iota = iota.sub(&defect);
    }
    Ok(iota)
}

/// Coordinate change: (Fφ)(x,y) = φ^{-1}(F(φ(x), φ(y))) for unit-linear φ
/// with φ(0) = 0; φ is then an isomorphism from Fφ to F.
pub fn coordinate_change(
    g: &FormalGroupLawBud,
    phi: &TruncSeries,
) -> FResult<FormalGroupLawBud> {
    if phi.vars().len() != 1 {
        return Err(FglError::Series(SeriesError::NotUnivariate));
    }
    if !phi.constant_term().is_zero() {
        return Err(FglError::Series(SeriesError::NonzeroConstantTerm));
    }
    if !phi.coeff(&[1]).is_unit() {
        return Err(FglError::NonUnitLinearCoefficient);
    }
    let bound = g.bound();
    let phi = phi.with_bound(bound).truncate(bound);
    let phi_inv = phi.reversion()?;
    let x = TruncSeries::var(g.ring(), &FGL_VARS, bound, "x")?;
    let y = TruncSeries::var(g.ring(), &FGL_VARS, bound, "y")?;
    let phi_x = phi.compose(&x)?;
    let phi_y = phi.compose(&y)?;
    let inner = g.series().subst(&[&phi_x, &phi_y])?;
    let f_new = phi_inv.compose(&inner)?;
    Ok(FormalGroupLawBud { f: f_new, graded: false })
}

/// The invariant differential coefficient series f(x) = 1/F_x(0, x) with
/// f(0) = 1; reliable to degree bound - 1.
pub fn invariant_differential(g: &FormalGroupLawBud) -> FResult<TruncSeries> {
    let fx = g.series().partial("x")?;
    let h = set_var_zero(&fx, 0);
    Ok(h.inv_series()?)
}

/// The logarithm (termwise antiderivative of the invariant differential,
/// over the rational extension of the base) and its inverse exp.
pub fn logarithm(g: &FormalGroupLawBud) -> FResult<(TruncSeries, TruncSeries)> {
    let qring = ring::q_extension(g.ring())?;
    let gq = g.map_coefficients(&qring, &|c| ring::to_rational(c, &qring))?;
    let f = invariant_differential(&gq)?;
    let bound = g.bound();
    let mut log = TruncSeries::zero(&qring, &["x"], bound);
    for (e, c) in f.terms() {
        let k = e.0[0] as u32;
        if k + 1 > bound {
            continue;
        }
        let den = qring.from_i64((k + 1) as i64);
        let q = c
            .div_exact(&den)
            .ok_or(FglError::NonInvertibleDenominator((k + 1) as u64))?;
        log.set_coeff(&[(k + 1) as u16], q);
    }
    let exp = log.reversion()?;
    Ok((log, exp))
}

/// Homomorphism check: φ(F(x,y)) = F'(φ(x), φ(y)) through the reliable
/// degree; also returns the derivative at zero (the induced map on
/// invariant differentials).
pub fn check_homomorphism(
    phi: &TruncSeries,
    g: &FormalGroupLawBud,
    h: &FormalGroupLawBud,
) -> FResult<(bool, Elem)> {
    if phi.vars().len() != 1 {
        return Err(FglError::Series(SeriesError::NotUnivariate));
    }
    if !phi.constant_term().is_zero() {
        return Err(FglError::Series(SeriesError::NonzeroConstantTerm));
    }
    let bound = g.bound().min(h.bound()).min(phi.bound());
    let phi = phi.truncate(bound);
    let lhs = phi.compose(&g.series().truncate(bound))?;
    let x = TruncSeries::var(g.ring(), &FGL_VARS, bound, "x")?;
    let y = TruncSeries::var(g.ring(), &FGL_VARS, bound, "y")?;
    let phi_x = phi.compose(&x)?;
    let phi_y = phi.compose(&y)?;
    let rhs = h.series().truncate(bound).subst(&[&phi_x, &phi_y])?;
    let d = lhs.common_valid(&rhs);
    Ok((lhs.eq_up_to(&rhs, d), phi.coeff(&[1])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{make_ring, polynomial_ring, GenSpec, RingSpec};

    fn zz() -> Ring {
        make_ring(&RingSpec::Integers).unwrap()
    }

    #[test]
    fn validate_basic_laws() {
        let r = zz();
        let add = FormalGroupLawBud::additive(&r, 6);
        assert!(validate_fgl(add.series()).unwrap().passed());
        let mult = FormalGroupLawBud::multiplicative(&r, 6);
        assert!(validate_fgl(mult.series()).unwrap().passed());
        let x = TruncSeries::var(&r, &FGL_VARS, 4, "x").unwrap();
        let y = TruncSeries::var(&r, &FGL_VARS, 4, "y").unwrap();
        let bad = x.add(&y).add(&x.pow(2));
        let rep = validate_fgl(&bad).unwrap();
        assert!(!rep.passed());
        assert!(rep.failures.iter().any(|f| f.axiom == Axiom::RightUnit && f.witness == "x^2"));
    }

    #[test]
    fn cocycles_small() {
        let r = zz();
        let c2 = symmetric_cocycle(2, &r);
        assert_eq!(c2.coeff(&[1, 1]), r.one());
        assert_eq!(c2.num_terms(), 1);
        let c3 = symmetric_cocycle(3, &r);
        assert_eq!(c3.coeff(&[2, 1]), r.one());
        assert_eq!(c3.coeff(&[1, 2]), r.one());
        let c4 = symmetric_cocycle(4, &r);
        assert_eq!(c4.coeff(&[3, 1]), r.from_i64(2));
        assert_eq!(c4.coeff(&[2, 2]), r.from_i64(3));
        assert_eq!(c4.coeff(&[1, 3]), r.from_i64(2));
    }

    #[test]
    fn cocycle_denominators() {
        for (n, d) in [(2, 2), (3, 3), (4, 2), (6, 1), (8, 2), (9, 3), (12, 1), (49, 7)] {
            assert_eq!(cocycle_denominator(n), d, "n = {}", n);
        }
    }

    #[test]
    fn n_series_examples() {
        let r = zz();
        let add = FormalGroupLawBud::additive(&r, 5);
        let x = TruncSeries::var(&r, &["x"], 5, "x").unwrap();
        assert_eq!(n_series(&add, 7).unwrap(), x.scale(&r.from_i64(7)));
        let mult = FormalGroupLawBud::multiplicative(&r, 5);
        let two = n_series(&mult, 2).unwrap();
        assert_eq!(two, x.scale(&r.from_i64(2)).add(&x.pow(2)));
        let f2 = make_ring(&RingSpec::PrimeField(2)).unwrap();
        let mult2 = FormalGroupLawBud::multiplicative(&f2, 5);
        let x2 = TruncSeries::var(&f2, &["x"], 5, "x").unwrap();
        assert_eq!(n_series(&mult2, 2).unwrap(), x2.pow(2));
    }

    #[test]
    fn m_plus_n_and_m_times_n() {
        let r = zz();
        let mult = FormalGroupLawBud::multiplicative(&r, 6);
        for (m, n) in [(2i64, 3i64), (-1, 2), (2, -3)] {
            let lhs = n_series(&mult, m + n).unwrap();
            let rhs = mult
                .sum(&n_series(&mult, m).unwrap(), &n_series(&mult, n).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs, "[{}] +_F [{}]", m, n);
            let comp =
                n_series(&mult, m).unwrap().compose(&n_series(&mult, n).unwrap()).unwrap();
            assert_eq!(comp, n_series(&mult, m * n).unwrap(), "[{}]∘[{}]", m, n);
        }
    }

    #[test]
    fn one_over_n_round_trip() {
        let q = make_ring(&RingSpec::Rationals).unwrap();
        let mult = FormalGroupLawBud::multiplicative(&q, 6);
        let three = n_series(&mult, 3).unwrap();
        let third = one_over_n_series(&mult, 3).unwrap();
        let x = TruncSeries::var(&q, &["x"], 6, "x").unwrap();
        assert_eq!(three.compose(&third).unwrap(), x);
        // 2 is not a unit over Z
        let z = zz();
        let multz = FormalGroupLawBud::multiplicative(&z, 4);
        assert!(matches!(
            one_over_n_series(&multz, 2),
            Err(FglError::NonUnitDenominator(2))
        ));
    }

    #[test]
    fn formal_inverse_examples() {
        let r = zz();
        let add = FormalGroupLawBud::additive(&r, 5);
        let x = TruncSeries::var(&r, &["x"], 5, "x").unwrap();
        assert_eq!(formal_inverse(&add).unwrap(), x.neg());
        let mult = FormalGroupLawBud::multiplicative(&r, 3);
        let iota = formal_inverse(&mult).unwrap();
        let x3 = TruncSeries::var(&r, &["x"], 3, "x").unwrap();
        assert_eq!(iota, x3.neg().add(&x3.pow(2)).sub(&x3.pow(3)));
        let mult6 = FormalGroupLawBud::multiplicative(&r, 6);
        let iota6 = formal_inverse(&mult6).unwrap();
        let x6 = TruncSeries::var(&r, &["x"], 6, "x").unwrap();
        assert_eq!(iota6.compose(&iota6).unwrap(), x6);
        assert!(mult6.sum(&x6, &iota6).unwrap().is_zero());
    }

    #[test]
    fn coordinate_change_matches_cocycle_shift() {
        // G = x + y, φ = x + a x^2: result is x + y - 2a·xy = F - d_2 a C_2
        let z = zz();
        let za = polynomial_ring(&z, vec![GenSpec::new("a", 1)]).unwrap();
        let a = za.gen("a").unwrap();
        let add = FormalGroupLawBud::additive(&za, 2);
        let x = TruncSeries::var(&za, &["x"], 2, "x").unwrap();
        let phi = x.add(&x.pow(2).scale(&a));
        let changed = coordinate_change(&add, &phi).unwrap();
        assert_eq!(changed.series().coeff(&[1, 1]), za.from_i64(-2).mul(&a));
        assert!(validate_fgl(changed.series()).unwrap().passed());
    }

    #[test]
    fn coordinate_change_identity_and_scaling() {
        let r = zz();
        let mult = FormalGroupLawBud::multiplicative(&r, 5);
        let x = TruncSeries::var(&r, &["x"], 5, "x").unwrap();
        assert_eq!(coordinate_change(&mult, &x).unwrap().series(), mult.series());
        // λ-conjugation of multiplicative: x + y + λxy
        let zl = polynomial_ring(&r, vec![GenSpec::laurent("l", 1)]).unwrap();
        let lam = zl.gen("l").unwrap();
        let multl = FormalGroupLawBud::multiplicative(&zl, 4);
        let xl = TruncSeries::var(&zl, &["x"], 4, "x").unwrap();
        let phi = xl.scale(&lam);
        let changed = coordinate_change(&multl, &phi).unwrap();
        assert_eq!(changed.series().coeff(&[1, 1]), lam);
        assert_eq!(changed.series().coeff(&[1, 0]), zl.one());
    }

    #[test]
    fn coordinate_change_is_group_action() {
        let rq = make_ring(&RingSpec::Rationals).unwrap();
        let mult = FormalGroupLawBud::multiplicative(&rq, 6);
        let x = TruncSeries::var(&rq, &["x"], 6, "x").unwrap();
        let phi = x.add(&x.pow(2).scale(&rq.from_i64(2)));
        let psi = x.scale(&rq.from_i64(3)).add(&x.pow(3));
        let lhs = coordinate_change(&coordinate_change(&mult, &phi).unwrap(), &psi).unwrap();
        let rhs = coordinate_change(&mult, &phi.compose(&psi).unwrap()).unwrap();
        assert_eq!(lhs.series(), rhs.series());
    }

    #[test]
    fn coordinate_change_yields_isomorphism() {
        let rq = make_ring(&RingSpec::Rationals).unwrap();
        let mult = FormalGroupLawBud::multiplicative(&rq, 5);
        let xq = TruncSeries::var(&rq, &["x"], 5, "x").unwrap();
        let phi = xq.add(&xq.pow(2).scale(&rq.from_i64(3)));
        let fphi = coordinate_change(&mult, &phi).unwrap();
        let iso = BudIsomorphism::new(fphi, mult, phi).unwrap();
        assert!(iso.strict);
    }

    #[test]
    fn invariant_differential_examples() {
        let r = zz();
        let add = FormalGroupLawBud::additive(&r, 6);
        let f = invariant_differential(&add).unwrap();
        assert!(f.constant_term().is_one());
        assert_eq!(f.num_terms(), 1);
        let mult = FormalGroupLawBud::multiplicative(&r, 6);
        let f = invariant_differential(&mult).unwrap();
        assert_eq!(f.coeff1(0), r.one());
        assert_eq!(f.coeff1(1), r.from_i64(-1));
        assert_eq!(f.coeff1(2), r.one());
        // invariance: f(F(x,y)) · F_x(x,y) = f(x) through the reliable degree
        let fxy = mult.series();
        let f_of_f = f.compose(fxy).unwrap();
        let fx = fxy.partial("x").unwrap();
        let lhs = f_of_f.mul(&fx);
        let x = TruncSeries::var(&r, &FGL_VARS, 6, "x").unwrap();
        let rhs = f.compose(&x).unwrap();
        let d = lhs.common_valid(&rhs);
        assert!(lhs.eq_up_to(&rhs, d), "invariance identity");
    }

    #[test]
    fn logarithm_examples() {
        let r = zz();
        let add = FormalGroupLawBud::additive(&r, 6);
        let (log, _exp) = logarithm(&add).unwrap();
        assert!(log.coeff1(1).is_one());
        assert_eq!(log.num_terms(), 1);
        let mult = FormalGroupLawBud::multiplicative(&r, 5);
        let (log, exp) = logarithm(&mult).unwrap();
        let q = log.ring().clone();
        assert_eq!(log.coeff1(2), q.from_ratio(-1, 2).unwrap());
        assert_eq!(log.coeff1(3), q.from_ratio(1, 3).unwrap());
        assert_eq!(log.coeff1(4), q.from_ratio(-1, 4).unwrap());
        let x = TruncSeries::var(&q, &["x"], 5, "x").unwrap();
        assert_eq!(exp.compose(&log).unwrap(), x);
        // log linearizes
        let multq = FormalGroupLawBud::multiplicative(&q, 5);
        let logf = log.compose(multq.series()).unwrap();
        let xx = TruncSeries::var(&q, &FGL_VARS, 5, "x").unwrap();
        let yy = TruncSeries::var(&q, &FGL_VARS, 5, "y").unwrap();
        let sum = log.compose(&xx).unwrap().add(&log.compose(&yy).unwrap());
        assert_eq!(logf, sum);
    }

    #[test]
    fn homomorphism_examples() {
        let r = zz();
        let mult = FormalGroupLawBud::multiplicative(&r, 6);
        let x = TruncSeries::var(&r, &["x"], 6, "x").unwrap();
        let (ok, d) = check_homomorphism(&x, &mult, &mult).unwrap();
        assert!(ok);
        assert!(d.is_one());
        let two = n_series(&mult, 2).unwrap();
        let (ok, d) = check_homomorphism(&two, &mult, &mult).unwrap();
        assert!(ok);
        assert_eq!(d, r.from_i64(2));
        let f3 = make_ring(&RingSpec::PrimeField(3)).unwrap();
        let mult3 = FormalGroupLawBud::multiplicative(&f3, 9);
        let x3 = TruncSeries::var(&f3, &["x"], 9, "x").unwrap();
        let (ok, d) = check_homomorphism(&x3.pow(3), &mult3, &mult3).unwrap();
        assert!(ok, "x^p is an endomorphism of the multiplicative law mod p");
        assert!(d.is_zero());
        let (ok, _) = check_homomorphism(&x.add(&x.pow(2)), &mult, &mult).unwrap();
        assert!(!ok);
    }

    #[test]
    fn grading_examples() {
        let r = zz();
        for (deg, expect) in [(1i64, true), (2, false)] {
            let ru = polynomial_ring(&r, vec![GenSpec::new("u", deg)]).unwrap();
            let u = ru.gen("u").unwrap();
            let x = TruncSeries::var(&ru, &FGL_VARS, 4, "x").unwrap();
            let y = TruncSeries::var(&ru, &FGL_VARS, 4, "y").unwrap();
            let f = x.add(&y).add(&x.mul(&y).scale(&u));
            let bud = FormalGroupLawBud::new_unchecked(f, true);
            assert_eq!(bud.grading_check().passed(), expect, "deg u = {}", deg);
        }
        let add = FormalGroupLawBud::additive(&r, 4);
        assert!(add.grading_check().passed());
    }

    #[test]
    fn cocycle_identity_through_50() {
        // C_n(y,z) - C_n(x+y,z) + C_n(x,y+z) - C_n(x,y) = 0 over Z
        let r = zz();
        let vars3 = ["x", "y", "z"];
        for n in 2..=50u32 {
            let c = symmetric_cocycle(n, &r);
            let x = TruncSeries::var(&r, &vars3, n, "x").unwrap();
            let y = TruncSeries::var(&r, &vars3, n, "y").unwrap();
            let z = TruncSeries::var(&r, &vars3, n, "z").unwrap();
            let c3 = |a: &TruncSeries, b: &TruncSeries| c.subst(&[a, b]).unwrap();
            let sum = c3(&y, &z)
                .sub(&c3(&x.add(&y), &z))
                .add(&c3(&x, &y.add(&z)))
                .sub(&c3(&x, &y));
            assert!(sum.is_zero(), "cocycle identity fails at n = {}", n);
        }
    }
}
