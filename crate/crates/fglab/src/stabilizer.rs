//! Isomorphisms and automorphisms of p^k-buds of strict-height-n formal
//! group laws over finite fields, by the lifting recursion: level k
//! solutions are tuples (b_0, ..., b_{k-1}) with
//!
//!   φ = b_0 x +_H b_1 x^p +_H ... +_H b_{k-1} x^{p^{k-1}}   (H the target)
//!
//! subject to the twisted Verschiebung identity
//! V_H(φ^{(p^n)}(x)) = φ(V_G(x)). Each level contributes one equation:
//! b_0^{p^n - 1} = v at level 1 and the Artin–Schreier constraint
//! b^{p^n} - v·b + w = 0 for lifts, with v and w computed symbolically and
//! solved by field enumeration. Every returned isomorphism is re-verified
//! against the bud-homomorphism identity.

use std::fmt;

use crate::fgl::{check_homomorphism, FglError, FormalGroupLawBud};
use crate::height::{p_series_analyze, verschiebung_series, Height, HeightError};
use crate::ptypical::{p_typicality_test, PTypicalError};
use crate::ring::{embed_field, enumerate_field, finite_field_spec, make_ring, polynomial_ring,
    Elem, GenSpec, Ring, RingError, RingSpec};
use crate::series::{SeriesError, TruncSeries};

/// Fields are capped at p^m <= 2^16 for exhaustive enumeration.
pub const FIELD_CAP: u64 = 1 << 16;

#[derive(Clone, Debug)]
pub enum StabilizerError {
    HeightMismatch { source: Height, target: Height },
    HeightNotCertified(Height),
    NotPTypicalCoordinate(String),
    BoundTooSmall { have: u32, need: u32 },
    FieldTooLarge(u64),
    CapExceeded(u32),
    InternalDefect(String),
    Height(HeightError),
    Fgl(FglError),
    Series(SeriesError),
    Ring(RingError),
    PTypical(PTypicalError),
}

impl fmt::Display for StabilizerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabilizerError::HeightMismatch { source, target } => {
                write!(f, "strict heights differ: {} vs {}", source, target)
            }
            StabilizerError::HeightNotCertified(h) => {
                write!(f, "height {} cannot be certified at this truncation", h)
            }
            StabilizerError::NotPTypicalCoordinate(s) => {
                write!(f, "not a p-typical coordinate: {}", s)
            }
            StabilizerError::BoundTooSmall { have, need } => {
                write!(f, "law bound {} too small; need at least {}", have, need)
            }
            StabilizerError::FieldTooLarge(n) => write!(f, "field of size {} exceeds cap", n),
            StabilizerError::CapExceeded(m) => {
                write!(f, "no splitting field found up to extension degree {}", m)
            }
            StabilizerError::InternalDefect(s) => write!(f, "internal check failed: {}", s),
            StabilizerError::Height(e) => write!(f, "{}", e),
            StabilizerError::Fgl(e) => write!(f, "{}", e),
            StabilizerError::Series(e) => write!(f, "{}", e),
            StabilizerError::Ring(e) => write!(f, "{}", e),
            StabilizerError::PTypical(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for StabilizerError {}

impl From<HeightError> for StabilizerError {
    fn from(e: HeightError) -> Self {
        StabilizerError::Height(e)
    }
}

impl From<FglError> for StabilizerError {
    fn from(e: FglError) -> Self {
        StabilizerError::Fgl(e)
    }
}

impl From<SeriesError> for StabilizerError {
    fn from(e: SeriesError) -> Self {
        StabilizerError::Series(e)
    }
}

impl From<RingError> for StabilizerError {
    fn from(e: RingError) -> Self {
        StabilizerError::Ring(e)
    }
}

impl From<PTypicalError> for StabilizerError {
    fn from(e: PTypicalError) -> Self {
        StabilizerError::PTypical(e)
    }
}

pub type StResult<T> = Result<T, StabilizerError>;

/// The level equation solved by a lift coefficient: b^{p^n} - v·b + w = 0,
/// or b^{p^n - 1} - v = 0 at level 1 (where w is zero by convention).
#[derive(Clone, Debug)]
pub struct LevelEquation {
    pub v: Elem,
    pub w: Elem,
}

/// One isomorphism at a given level: its defining coefficient tuple, the
/// rendered truncated series, and the parent it lifts.
#[derive(Clone, Debug)]
pub struct LevelIso {
    pub coeffs: Vec<Elem>,
    pub series: TruncSeries,
    pub parent: Option<usize>,
    pub equation: LevelEquation,
}

/// All isomorphisms of the p^{k-1}-buds at one level of the tower.
#[derive(Clone, Debug)]
pub struct BudIsoLevel {
    pub level: u32,
    /// Truncation degree p^{level-1}: series live modulo x^{trunc+1}.
    pub truncation: u32,
    pub isos: Vec<LevelIso>,
}

/// The lifting tower between two laws over a common finite field.
#[derive(Clone, Debug)]
pub struct IsoTower {
    pub p: u64,
    pub n: u32,
    pub field: Ring,
    pub levels: Vec<BudIsoLevel>,
    /// Present when the search is empty by the height dichotomy.
    pub empty_reason: Option<String>,
}

fn strict_height(g: &FormalGroupLawBud, p: u64) -> StResult<u32> {
    let d = p_series_analyze(g, p)?;
    match d.height {
        Height::Exact(h) => Ok(h),
        other => Err(StabilizerError::HeightNotCertified(other)),
    }
}

fn field_size(ring: &Ring) -> StResult<u64> {
    match ring.spec() {
        RingSpec::PrimeField(p) => Ok(*p),
        RingSpec::FiniteField { p, m, .. } => {
            let mut s: u64 = 1;
            for _ in 0..*m {
                s = s.checked_mul(*p).ok_or(StabilizerError::FieldTooLarge(u64::MAX))?;
            }
            Ok(s)
        }
        _ => Err(StabilizerError::NotPTypicalCoordinate(
            "stabilizer computations need a finite field base".into(),
        )),
    }
}

/// Verify the p-typicality precondition by the root-of-unity tester route,
/// skipping primes whose minimal root extension exceeds the field cap.
fn require_p_typical(g: &FormalGroupLawBud, p: u64) -> StResult<()> {
    let rep = p_typicality_test(g, p)?;
    if !rep.is_p_typical {
        let bad = rep
            .evidence
            .iter()
            .find(|(_, ok, _)| !ok)
            .map(|(_, _, w)| w.clone())
            .unwrap_or_default();
        return Err(StabilizerError::NotPTypicalCoordinate(bad));
    }
    Ok(())
}

/// Coefficientwise q-power Frobenius of a series.
fn twist_series(s: &TruncSeries, q: u32) -> TruncSeries {
    s.map_coefficients(s.ring(), &|c| Ok(c.pow(q))).expect("frobenius twist")
}

/// φ = b_0 x +_H b_1 x^p +_H ... evaluated at the given truncation.
fn phi_from_coeffs(
    h: &FormalGroupLawBud,
    coeffs: &[TruncSeries],
) -> StResult<TruncSeries> {
    Ok(h.sum_many(coeffs)?)
}

/// Defect of the twisted Verschiebung identity for a candidate iso.
fn v_identity_defect(
    phi: &TruncSeries,
    v_g: &TruncSeries,
    v_h: &TruncSeries,
    p: u64,
    n: u32,
    trunc: u32,
) -> StResult<TruncSeries> {
    let q = (p as u32).pow(n);
    let phi_tw = twist_series(phi, q);
    let lhs = v_h.truncate(trunc).compose(&phi_tw.truncate(trunc))?;
    let rhs = phi.truncate(trunc).compose(&v_g.truncate(trunc))?;
    Ok(lhs.sub(&rhs).truncate(trunc))
}

/// Enumerate the level tower of bud isomorphisms G -> H up to level k.
/// Both laws must live over the same finite field, be p-typical, and have
/// the same certified strict height n; their bound must be at least
/// p^{n+k-1} so the Verschiebung data reaches truncation p^{k-1}.
pub fn bud_isomorphisms(
    g: &FormalGroupLawBud,
    h: &FormalGroupLawBud,
    p: u64,
    k: u32,
) -> StResult<IsoTower> {
    let field = g.ring().clone();
    let size = field_size(&field)?;
    if size > FIELD_CAP {
        return Err(StabilizerError::FieldTooLarge(size));
    }
    if h.ring() != &field {
        return Err(StabilizerError::Ring(RingError::RingMismatch));
    }
    require_p_typical(g, p)?;
    require_p_typical(h, p)?;
    let ng = strict_height(g, p)?;
    let nh = strict_height(h, p)?;
    if ng != nh {
        // dichotomy: no isomorphisms at any level
        return Ok(IsoTower {
            p,
            n: ng,
            field,
            levels: vec![BudIsoLevel { level: 1, truncation: 1, isos: vec![] }],
            empty_reason: Some(format!(
                "strict heights differ ({} vs {}); isomorphism set is empty",
                ng, nh
            )),
        });
    }
    let n = ng;
    let need = (p as u64).pow(n + k - 1);
    if need > g.bound() as u64 || need > h.bound() as u64 {
        return Err(StabilizerError::BoundTooSmall {
            have: g.bound().min(h.bound()),
            need: need as u32,
        });
    }
    let v_g = verschiebung_series(g, p, n)?;
    let v_h = verschiebung_series(h, p, n)?;
    let elements = enumerate_field(&field)?;
    let q = (p as u32).pow(n);

    let mut levels: Vec<BudIsoLevel> = Vec::new();
    // level 1: b_0 x with u'_n b_0^{p^n} = u_n b_0
    {
        let u_n = v_g.coeff1(1);
        let u_n_h = v_h.coeff1(1);
        let v = u_n.div_exact(&u_n_h).expect("strict height makes u_n a unit");
        let mut isos = Vec::new();
        for b in &elements {
            if b.is_zero() {
                continue;
            }
            if b.pow(q - 1) == v {
                let x = TruncSeries::var(&field, &["x"], 1, "x")?;
                let series = x.scale(b);
                isos.push(LevelIso {
                    coeffs: vec![b.clone()],
                    series,
                    parent: None,
                    equation: LevelEquation { v: v.clone(), w: field.zero() },
                });
            }
        }
        levels.push(BudIsoLevel { level: 1, truncation: 1, isos });
    }

    // symbolic ring F[b] for the lift equations
    let sring = polynomial_ring(&field, vec![GenSpec::new("b", 0)])?;
    let b_sym = sring.gen("b")?;
    let embed_s = |s: &TruncSeries| -> StResult<TruncSeries> {
        Ok(s.map_coefficients(&sring, &|c| {
            let images: Vec<Elem> = c
                .ring()
                .gens()
                .iter()
                .map(|gn| sring.gen(&gn.name))
                .collect::<Result<_, _>>()?;
            c.map_into(&sring, &images, &|sc| Ok(sc.clone()))
        })?)
    };

    for level in 2..=k {
        let trunc = (p as u32).pow(level - 1);
        let h_s = FormalGroupLawBud::new_unchecked(embed_s(h.series())?, false);
        let v_g_s = embed_s(&v_g)?;
        let v_h_s = embed_s(&v_h)?;
        let x_s = TruncSeries::var(&sring, &["x"], trunc, "x")?;
        let prev = levels.last().unwrap().isos.clone();
        let mut isos = Vec::new();
        for (pi, parent) in prev.iter().enumerate() {
            // candidate φ = Σ_H s_i x^{p^i} +_H b x^{p^{level-1}}, b symbolic
            let mut terms: Vec<TruncSeries> = Vec::new();
            for (i, c) in parent.coeffs.iter().enumerate() {
                let e = (p as u32).pow(i as u32);
                let c_s = embed_elem(c, &sring)?;
                terms.push(x_s.pow(e).scale(&c_s));
            }
            terms.push(x_s.pow(trunc).scale(&b_sym));
            let phi_s = phi_from_coeffs(&h_s, &terms)?;
            let defect = v_identity_defect(&phi_s, &v_g_s, &v_h_s, p, n, trunc)?;
            // degrees below the top must vanish identically
            for (e, c) in defect.terms() {
                if (e.total()) < trunc && !c.is_zero() {
                    return Err(StabilizerError::InternalDefect(format!(
                        "level {} parent {}: defect at degree {} is {}",
                        level,
                        pi,
                        e.total(),
                        c
                    )));
                }
            }
            // top coefficient: c_q b^{p^n} + c_1 b + c_0
            let top = defect.coeff(&[trunc as u16]);
            let (cq, c1, c0) = artin_schreier_parts(&top, &sring, q)?;
            let cq_inv = cq.inv().map_err(StabilizerError::Ring)?;
            let v_eq = scalar_part(&c1.neg().mul(&cq_inv), &field)?;
            let w_eq = scalar_part(&c0.mul(&cq_inv), &field)?;
            for beta in &elements {
                // b^{p^n} - v b + w at b = beta
                let val = beta.pow(q).sub(&v_eq.mul(beta)).add(&w_eq);
                if !val.is_zero() {
                    continue;
                }
                let mut coeffs = parent.coeffs.clone();
                coeffs.push(beta.clone());
                let x = TruncSeries::var(&field, &["x"], trunc, "x")?;
                let terms: Vec<TruncSeries> = coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| x.pow((p as u32).pow(i as u32)).scale(c))
                    .collect();
                let series = phi_from_coeffs(&h.truncate(trunc), &terms)?;
                // verify: bud homomorphism identity and the V-identity
                let (ok, _) =
                    check_homomorphism(&series, &g.truncate(trunc), &h.truncate(trunc))?;
                if !ok {
                    return Err(StabilizerError::InternalDefect(format!(
                        "level {} solution fails the homomorphism identity",
                        level
                    )));
                }
                let d = v_identity_defect(&series, &v_g, &v_h, p, n, trunc)?;
                if !d.is_zero() {
                    return Err(StabilizerError::InternalDefect(format!(
                        "level {} solution fails the Verschiebung identity",
                        level
                    )));
                }
                isos.push(LevelIso {
                    coeffs,
                    series,
                    parent: Some(pi),
                    equation: LevelEquation { v: v_eq.clone(), w: w_eq.clone() },
                });
            }
        }
        levels.push(BudIsoLevel { level, truncation: trunc, isos });
    }
    Ok(IsoTower { p, n, field, levels, empty_reason: None })
}

fn embed_elem(c: &Elem, target: &Ring) -> StResult<Elem> {
    let images: Vec<Elem> = c
        .ring()
        .gens()
        .iter()
        .map(|g| target.gen(&g.name))
        .collect::<Result<_, _>>()?;
    Ok(c.map_into(target, &images, &|sc| Ok(sc.clone()))?)
}

/// Split an element of F[b] into the coefficients of b^{p^n}, b, and 1;
/// any other power of b is an internal error.
fn artin_schreier_parts(top: &Elem, sring: &Ring, q: u32) -> StResult<(Elem, Elem, Elem)> {
    let bi = sring.gen_index("b")?;
    let mut cq = sring.zero();
    let mut c1 = sring.zero();
    let mut c0 = sring.zero();
    for (m, c) in top.terms() {
        let e = m.0[bi];
        let mut rest = m.0.to_vec();
        rest[bi] = 0;
        let part = sring.monomial(&rest, c.clone());
        if e == q as i32 {
            cq = cq.add(&part);
        } else if e == 1 {
            c1 = c1.add(&part);
        } else if e == 0 {
            c0 = c0.add(&part);
        } else {
            return Err(StabilizerError::InternalDefect(format!(
                "unexpected power b^{} in the lift equation",
                e
            )));
        }
    }
    Ok((cq, c1, c0))
}

/// Project an element of F[b] with no b-dependence back into F.
fn scalar_part(x: &Elem, field: &Ring) -> StResult<Elem> {
    let images: Vec<Elem> = x
        .ring()
        .gens()
        .iter()
        .map(|g| {
            if g.name == "b" {
                Ok(field.zero())
            } else {
                field.gen(&g.name)
            }
        })
        .collect::<Result<Vec<_>, RingError>>()?;
    Ok(x.map_into(field, &images, &|sc| Ok(sc.clone()))?)
}

/// A finite Morava stabilizer quotient: the automorphism buds of a law at
/// one level, with verified group structure.
#[derive(Clone, Debug)]
pub struct FiniteStabilizerGroup {
    pub p: u64,
    pub n: u32,
    pub level: u32,
    pub field_degree: u32,
    pub truncation: u32,
    pub elements: Vec<TruncSeries>,
    /// composition[i][j] = index of elements[i] ∘ elements[j]
    pub composition: Vec<Vec<usize>>,
    pub inverses: Vec<usize>,
    pub identity: usize,
    /// |level j| for j = 1..=level.
    pub level_counts: Vec<usize>,
    /// Lift counts per level-(j-1) element, for j = 2..=level.
    pub lift_counts: Vec<Vec<usize>>,
}

impl FiniteStabilizerGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// Base-change a law over F_p or F_{p^m'} into F_{p^m}.
pub fn law_over_extension(
    g: &FormalGroupLawBud,
    p: u64,
    m: u32,
) -> StResult<FormalGroupLawBud> {
    let target = make_ring(&finite_field_spec(p, m)?)?;
    if g.ring() == &target {
        return Ok(g.clone());
    }
    Ok(g.map_coefficients(&target, &|c| embed_field(c, &target))?)
}

/// The automorphism group of the level-k bud of G over F_{p^m}, with group
/// structure, the stabilizer-algebra relation a_i^{p^n} = a_i on every
/// coefficient, and the per-level lift counts.
pub fn automorphism_group(
    g: &FormalGroupLawBud,
    p: u64,
    k: u32,
    m: u32,
) -> StResult<FiniteStabilizerGroup> {
    let gm = law_over_extension(g, p, m)?;
    let tower = bud_isomorphisms(&gm, &gm, p, k)?;
    let n = tower.n;
    let top = tower.levels.last().unwrap();
    let elements: Vec<TruncSeries> = top.isos.iter().map(|i| i.series.clone()).collect();
    let trunc = top.truncation;
    // stabilizer-algebra relation on every series coefficient
    let q = (p as u32).pow(n);
    for s in &elements {
        for (e, c) in s.terms() {
            if c.pow(q) != *c {
                return Err(StabilizerError::InternalDefect(format!(
                    "coefficient {} of x^{} violates a^(p^n) = a",
                    c,
                    e.total()
                )));
            }
        }
    }
    // group structure by composition of truncated series
    let find = |s: &TruncSeries| -> StResult<usize> {
        elements
            .iter()
            .position(|t| t == s)
            .ok_or_else(|| StabilizerError::InternalDefect("composition left the set".into()))
    };
    let mut composition = vec![vec![0usize; elements.len()]; elements.len()];
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            let c = a.compose(b)?.truncate(trunc);
            composition[i][j] = find(&c)?;
        }
    }
    let x = TruncSeries::var(&tower.field, &["x"], trunc, "x")?;
    let identity = find(&x)?;
    let mut inverses = vec![0usize; elements.len()];
    for (i, a) in elements.iter().enumerate() {
        let inv = a.reversion()?.truncate(trunc);
        inverses[i] = find(&inv)?;
        if composition[i][inverses[i]] != identity {
            return Err(StabilizerError::InternalDefect("inverse check failed".into()));
        }
    }
    let level_counts: Vec<usize> = tower.levels.iter().map(|l| l.isos.len()).collect();
    let mut lift_counts = Vec::new();
    for w in tower.levels.windows(2) {
        let mut counts = vec![0usize; w[0].isos.len()];
        for iso in &w[1].isos {
            counts[iso.parent.unwrap()] += 1;
        }
        lift_counts.push(counts);
    }
    Ok(FiniteStabilizerGroup {
        p,
        n,
        level: k,
        field_degree: m,
        truncation: trunc,
        elements,
        composition,
        inverses,
        identity,
        level_counts,
        lift_counts,
    })
}

/// The least extension degree m for which the level-k isomorphism set of
/// G, H over F_{p^m} is nonempty.
pub fn minimal_splitting_degree(
    g: &FormalGroupLawBud,
    h: &FormalGroupLawBud,
    p: u64,
    k: u32,
    cap: u32,
) -> StResult<u32> {
    for m in 1..=cap {
        let gm = law_over_extension(g, p, m)?;
        let hm = law_over_extension(h, p, m)?;
        let tower = bud_isomorphisms(&gm, &hm, p, k)?;
        if let Some(last) = tower.levels.last() {
            if !last.isos.is_empty() {
                return Ok(m);
            }
        }
    }
    Err(StabilizerError::CapExceeded(cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ptypical::{cartier_typify, honda_fgl};
    use crate::ring::RingSpec;

    #[test]
    fn honda21_level1_over_f2() {
        let g = honda_fgl(2, 1, 8).unwrap();
        let tower = bud_isomorphisms(&g, &g, 2, 1).unwrap();
        assert_eq!(tower.levels[0].isos.len(), 1);
        let x = TruncSeries::var(g.ring(), &["x"], 1, "x").unwrap();
        assert_eq!(tower.levels[0].isos[0].series, x);
    }

    #[test]
    fn honda31_level1_over_f3() {
        let g = honda_fgl(3, 1, 9).unwrap();
        let tower = bud_isomorphisms(&g, &g, 3, 1).unwrap();
        // {x, 2x}
        assert_eq!(tower.levels[0].isos.len(), 2);
    }

    #[test]
    fn honda22_level1_fields() {
        let g = honda_fgl(2, 2, 16).unwrap();
        // over F_2: only b_0 = 1 solves b^3 = 1
        let tower = bud_isomorphisms(&g, &g, 2, 1).unwrap();
        assert_eq!(tower.levels[0].isos.len(), 1);
        // over F_4: three cube roots of unity
        let g4 = law_over_extension(&g, 2, 2).unwrap();
        let tower = bud_isomorphisms(&g4, &g4, 2, 1).unwrap();
        assert_eq!(tower.levels[0].isos.len(), 3);
    }

    #[test]
    fn aut_orders_match_etale_degrees() {
        // (3,1), k = 2, m = 1: order 6
        let g = honda_fgl(3, 1, 9).unwrap();
        let grp = automorphism_group(&g, 3, 2, 1).unwrap();
        assert_eq!(grp.order(), 6);
        assert_eq!(grp.level_counts, vec![2, 6]);
        for c in &grp.lift_counts[0] {
            assert_eq!(*c, 3); // étale degree p^n = 3
        }
        // (2,2), k = 2, m = 2: order 12
        let g = honda_fgl(2, 2, 16).unwrap();
        let grp = automorphism_group(&g, 2, 2, 2).unwrap();
        assert_eq!(grp.order(), 12);
        assert_eq!(grp.level_counts, vec![3, 12]);
        for c in &grp.lift_counts[0] {
            assert_eq!(*c, 4); // étale degree p^n = 4
        }
    }

    #[test]
    fn aut_group_axioms() {
        let g = honda_fgl(2, 1, 8).unwrap();
        let grp = automorphism_group(&g, 2, 3, 1).unwrap();
        // order (p-1) p^{k-1} = 4
        assert_eq!(grp.order(), 4);
        // identity present, closure encoded in the table, inverses verified
        assert!(grp.composition.iter().all(|row| row.len() == grp.order()));
        let e = grp.identity;
        for i in 0..grp.order() {
            assert_eq!(grp.composition[i][e], i);
            assert_eq!(grp.composition[e][i], i);
        }
    }

    #[test]
    fn height_dichotomy_empties_the_tower() {
        let g1 = honda_fgl(2, 1, 16).unwrap();
        let g2 = honda_fgl(2, 2, 16).unwrap();
        let tower = bud_isomorphisms(&g1, &g2, 2, 1).unwrap();
        assert!(tower.empty_reason.is_some());
        assert!(tower.levels[0].isos.is_empty());
    }

    #[test]
    fn splitting_degrees() {
        let g = honda_fgl(2, 2, 16).unwrap();
        assert_eq!(minimal_splitting_degree(&g, &g, 2, 1, 4).unwrap(), 1); // identity exists
        // two height-2 laws that only become isomorphic over F_4: conjugate
        // honda(2,2) by a linear coordinate change with a non-cube unit...
        // over F_2 every unit is 1, so instead check the μ_3 count jump:
        let g4 = law_over_extension(&g, 2, 2).unwrap();
        let tower = bud_isomorphisms(&g4, &g4, 2, 1).unwrap();
        assert_eq!(tower.levels[0].isos.len(), 3);
    }

    #[test]
    fn typified_multiplicative_matches_honda_height_one() {
        // multiplicative law is not p-typical; typify its Z_(p)-lift, reduce
        // mod p, then compare with honda(p,1) at level 1 over F_p
        let p = 3u64;
        let zp = make_ring(&RingSpec::PLocalRationals(p)).unwrap();
        let mult = FormalGroupLawBud::multiplicative(&zp, 9);
        let (e_law, _) = cartier_typify(&mult, p).unwrap();
        let fp = make_ring(&RingSpec::PrimeField(p)).unwrap();
        let e_mod_p = e_law
            .map_coefficients(&fp, &|c| crate::ring::to_residue(c, &fp))
            .unwrap();
        let honda = honda_fgl(p, 1, 9).unwrap();
        let tower = bud_isomorphisms(&e_mod_p, &honda, p, 1).unwrap();
        assert!(tower.empty_reason.is_none());
        assert!(!tower.levels[0].isos.is_empty());
        // and the non-typified multiplicative law is rejected
        let multp = FormalGroupLawBud::multiplicative(&fp, 9);
        assert!(matches!(
            bud_isomorphisms(&multp, &honda, p, 1),
            Err(StabilizerError::NotPTypicalCoordinate(_))
        ));
    }
}
