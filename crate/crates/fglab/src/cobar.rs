//! Bidegree-bounded reduced cobar complexes over graded Hopf algebroids and
//! Ext charts computed by exact integer linear algebra.
//!
//! The complex at cohomological degree s is Γ̄^{⊗s} ⊗ M with Γ̄ = ker ε. A
//! ℤ-basis in internal degree t is given by (A-monomial, s nonempty
//! γ-monomial slots, comodule generator). The differential is the full
//! alternating face sum; terms with an empty slot cancel between faces
//! (this is asserted), which realizes the reduced complex. Coefficients
//! migrate across tensor slots through η_R, encoding γ·η_R(a) ⊗ γ' =
//! γ ⊗ a·γ'.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::hopf::{GradedHopfAlgebroid, HopfError, HopfResult};
use crate::linalg::{homology, order_in_quotient, subgroup_invariants, GroupInvariants, IntMat, Subquotient};
use crate::ring::{self, Elem, GenSpec, Ring, RingError};

/// A finitely generated free graded comodule with diagonal η_R-coaction:
/// M = ⊕_i A(shift_i), ψ(g_i) = 1 ⊗ g_i. The structure comodule is a single
/// generator in degree 0; degree shifts present the powers of the sheaf of
/// invariant differentials in strict graded form.
#[derive(Clone, Debug)]
pub struct GradedComodule {
    pub gen_degrees: Vec<i64>,
}

impl GradedComodule {
    pub fn structure() -> Self {
        GradedComodule { gen_degrees: vec![0] }
    }

    pub fn shifted(t: i64) -> Self {
        GradedComodule { gen_degrees: vec![t] }
    }
}

/// Precision of chart coefficients: exact ℤ, or the lattice model of ℤ_p
/// at precision p^K.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartCoefficients {
    Integers,
    PAdic { p: u64, precision: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartEntry {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
    /// Torsion orders that reach the precision cap (reported as >= p^K).
    pub capped: Vec<bool>,
}

impl ChartEntry {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for ChartEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        for (t, c) in self.torsion.iter().zip(&self.capped) {
            if *c {
                parts.push(format!("Z/(>={})", t));
            } else {
                parts.push(format!("Z/{}", t));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Cobar basis element: A-monomial exponents, slot monomials (γ-exponents),
/// comodule generator index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CobarBasisElem {
    pub a_mono: Vec<i32>,
    pub slots: Vec<Vec<i32>>,
    pub m_gen: usize,
}

/// The cobar complex of a comodule, with differentials assembled per
/// bidegree as exact integer matrices, and d∘d = 0 witnessed.
pub struct CobarComplex {
    pub algebroid: GradedHopfAlgebroid,
    pub comodule: GradedComodule,
    pub s_max: u32,
    pub t_bound: i64,
    pub coefficients: ChartCoefficients,
    /// Basis per (s, t).
    pub bases: BTreeMap<(u32, i64), Vec<CobarBasisElem>>,
    /// Differential matrix per (s, t): C^{s,t} -> C^{s+1,t}.
    pub differentials: BTreeMap<(u32, i64), IntMat>,
}

fn a_gen_degrees(alg: &GradedHopfAlgebroid) -> Vec<i64> {
    alg.a_ring.gens().iter().map(|g| g.degree).collect()
}

fn gamma_only_degrees(alg: &GradedHopfAlgebroid) -> Vec<i64> {
    alg.gamma_gens.iter().map(|g| alg.gamma_gen_degree(g)).collect()
}

/// Enumerate exponent vectors with the given positive generator degrees
/// summing to exactly `degree`.
fn monomials_of_degree(degrees: &[i64], degree: i64) -> Vec<Vec<i32>> {
    fn rec(degrees: &[i64], idx: usize, remaining: i64, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if idx == degrees.len() {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let d = degrees[idx];
        let max = if d > 0 { remaining / d } else { 0 };
        for e in 0..=max {
            cur.push(e as i32);
            rec(degrees, idx + 1, remaining - e * d, cur, out);
            cur.pop();
        }
    }
    if degree < 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    rec(degrees, 0, degree, &mut cur, &mut out);
    out
}

/// Compositions of `total` into `parts` strictly positive integers.
fn positive_compositions(total: i64, parts: usize) -> Vec<Vec<i64>> {
    fn rec(total: i64, parts: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if parts == 0 {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for first in 1..=(total - (parts as i64 - 1)) {
            cur.push(first);
            rec(total - first, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(total, parts, &mut cur, &mut out);
    out
}

impl CobarComplex {
    /// The basis of C^{s,t}.
    fn basis(
        alg: &GradedHopfAlgebroid,
        m: &GradedComodule,
        s: u32,
        t: i64,
    ) -> Vec<CobarBasisElem> {
        let adeg = a_gen_degrees(alg);
        let gdeg = gamma_only_degrees(alg);
        let mut out = Vec::new();
        for (gi, &mdeg) in m.gen_degrees.iter().enumerate() {
            let rest = t - mdeg;
            // split rest = a-degree + slot degrees (each >= 1)
            for a_deg in 0..=rest {
                let slot_total = rest - a_deg;
                let a_monos = monomials_of_degree(&adeg, a_deg);
                if a_monos.is_empty() {
                    continue;
                }
                for comp in positive_compositions(slot_total, s as usize) {
                    // slot monomial choices per slot degree
                    let per_slot: Vec<Vec<Vec<i32>>> = comp
                        .iter()
                        .map(|&d| monomials_of_degree(&gdeg, d))
                        .collect();
                    if per_slot.iter().any(|v| v.is_empty()) {
                        continue;
                    }
                    // cartesian product
                    let mut stack: Vec<Vec<Vec<i32>>> = vec![Vec::new()];
                    for options in &per_slot {
                        let mut next = Vec::new();
                        for partial in &stack {
                            for opt in options {
                                let mut p = partial.clone();
                                p.push(opt.clone());
                                next.push(p);
                            }
                        }
                        stack = next;
                    }
                    for slots in stack {
                        for am in &a_monos {
                            out.push(CobarBasisElem {
                                a_mono: am.clone(),
                                slots: slots.clone(),
                                m_gen: gi,
                            });
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Build the complex with all differentials for s <= s_max, |t| <= t_bound,
    /// verifying d∘d = 0 on every computed bidegree.
    pub fn build(
        algebroid: GradedHopfAlgebroid,
        comodule: GradedComodule,
        s_max: u32,
        t_bound: i64,
        coefficients: ChartCoefficients,
    ) -> HopfResult<CobarComplex> {
        let mut c = CobarComplex {
            algebroid,
            comodule,
            s_max,
            t_bound,
            coefficients,
            bases: BTreeMap::new(),
            differentials: BTreeMap::new(),
        };
        let t_min = c.comodule.gen_degrees.iter().copied().min().unwrap_or(0);
        for t in t_min..=t_bound {
            for s in 0..=(s_max + 1) {
                let b = Self::basis(&c.algebroid, &c.comodule, s, t);
                c.bases.insert((s, t), b);
            }
        }
        for t in t_min..=t_bound {
            for s in 0..=s_max {
                let m = c.matrix_of_d(s, t)?;
                c.differentials.insert((s, t), m);
            }
        }
        // d∘d = 0 on every composable pair
        for t in t_min..=t_bound {
            for s in 0..s_max {
                let d1 = &c.differentials[&(s, t)];
                let d2 = &c.differentials[&(s + 1, t)];
                let prod = d2.mul(d1);
                let ok = match c.coefficients {
                    ChartCoefficients::Integers => prod.is_zero(),
                    ChartCoefficients::PAdic { p, precision } => {
                        let m = BigInt::from(p).pow(precision);
                        (0..prod.rows).all(|i| {
                            (0..prod.cols).all(|j| (&prod[(i, j)] % &m).is_zero())
                        })
                    }
                };
                if !ok {
                    return Err(HopfError::AxiomFailure(format!(
                        "d∘d != 0 at (s, t) = ({}, {})",
                        s, t
                    )));
                }
            }
        }
        Ok(c)
    }

    /// The differential on a single basis element, as an element of the
    /// (s+1)-slot flat tensor algebra tagged by comodule generator.
    fn differential_of(
        &self,
        elem: &CobarBasisElem,
    ) -> HopfResult<Vec<(CobarBasisElem, Elem)>> {
        let alg = &self.algebroid;
        let s = elem.slots.len();
        let t_big = self.tensor_ring(s + 1)?;
        let t_small = self.tensor_ring(s)?;
        // the element as a monomial of the s-slot ring
        let x = self.encode(elem, &t_small)?;
        let mut total = t_big.zero();
        for i in 0..=(s + 1) {
            let face = self.face_map(&x, i, s, &t_small, &t_big)?;
            if i % 2 == 0 {
                total = total.add(&face);
            } else {
                total = total.sub(&face);
            }
        }
        // decompose; every monomial must have all s+1 slots nonempty
        self.decode(&total, s + 1, elem.m_gen, &t_big)
    }

    /// k-slot tensor ring of the algebroid.
    fn tensor_ring(&self, k: usize) -> HopfResult<Ring> {
        let gammas: Vec<GenSpec> = (1..=k)
            .flat_map(|slot| {
                self.algebroid.gamma_gens.iter().map(move |g| (g.clone(), slot))
            })
            .map(|(g, slot)| {
                GenSpec::new(&format!("{}_{}", g, slot), self.algebroid.gamma_gen_degree(&g))
            })
            .collect();
        Ok(ring::polynomial_ring(&self.algebroid.a_ring, gammas)?)
    }

    fn encode(&self, elem: &CobarBasisElem, tring: &Ring) -> HopfResult<Elem> {
        let mut exps = vec![0i32; tring.gens().len()];
        for (slot, mono) in elem.slots.iter().enumerate() {
            for (gi, &e) in mono.iter().enumerate() {
                let name = format!("{}_{}", self.algebroid.gamma_gens[gi], slot + 1);
                exps[tring.gen_index(&name)?] += e;
            }
        }
        for (ai, &e) in elem.a_mono.iter().enumerate() {
            let name = &self.algebroid.a_ring.gens()[ai].name;
            exps[tring.gen_index(name)?] += e;
        }
        Ok(tring.monomial(&exps, tring.scalar_kind().one()))
    }

    fn decode(
        &self,
        x: &Elem,
        slots: usize,
        m_gen: usize,
        tring: &Ring,
    ) -> HopfResult<Vec<(CobarBasisElem, Elem)>> {
        let n_gamma = self.algebroid.gamma_gens.len();
        let n_a = self.algebroid.a_ring.gens().len();
        let mut out = Vec::new();
        for (mono, sc) in x.terms() {
            let mut slot_monos = vec![vec![0i32; n_gamma]; slots];
            let mut a_mono = vec![0i32; n_a];
            for (idx, &e) in mono.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = &tring.gens()[idx].name;
                // slot gens come first in construction order, then A gens
                let mut matched = false;
                for (gi, g) in self.algebroid.gamma_gens.iter().enumerate() {
                    if let Some(rest) = name.strip_prefix(&format!("{}_", g)) {
                        if let Ok(slot) = rest.parse::<usize>() {
                            slot_monos[slot - 1][gi] += e;
                            matched = true;
                            break;
                        }
                    }
                }
                if !matched {
                    let ai = self.algebroid.a_ring.gen_index(name)?;
                    a_mono[ai] += e;
                }
            }
            if slot_monos.iter().any(|m| m.iter().all(|&e| e == 0)) {
                return Err(HopfError::AxiomFailure(format!(
                    "reduced-complex term with an empty slot survived: {}",
                    x
                )));
            }
            out.push((
                CobarBasisElem { a_mono, slots: slot_monos, m_gen },
                self.algebroid.a_ring.from_scalar(sc.clone()),
            ));
        }
        Ok(out)
    }

    /// Face i of the cosimplicial structure, on a flat s-slot element.
    fn face_map(
        &self,
        x: &Elem,
        i: usize,
        s: usize,
        t_small: &Ring,
        t_big: &Ring,
    ) -> HopfResult<Elem> {
        let alg = &self.algebroid;
        if i == s + 1 {
            // coaction face: diagonal comodule appends an empty slot; slots
            // and A-part unchanged
            let images: Vec<Elem> = t_small
                .gens()
                .iter()
                .map(|g| t_big.gen(&g.name))
                .collect::<Result<_, _>>()?;
            return Ok(x.map_into(t_big, &images, &|sc| Ok(sc.clone()))?);
        }
        if i == 0 {
            // insert an empty slot at position 1: existing slots shift up,
            // A-generators migrate through η_R into slot 1
            let images: Vec<Elem> = t_small
                .gens()
                .iter()
                .map(|g| -> HopfResult<Elem> {
                    if let Some((gname, slot)) = split_slot_name(&g.name, &alg.gamma_gens) {
                        Ok(t_big.gen(&format!("{}_{}", gname, slot + 1))?)
                    } else {
                        alg.lift_a_gen(&g.name, t_big, 1)
                    }
                })
                .collect::<Result<Vec<_>, HopfError>>()?;
            return Ok(x.map_into(t_big, &images, &|sc| Ok(sc.clone()))?);
        }
        // face i in 1..=s: Δ on slot i
        let images: Vec<Elem> = t_small
            .gens()
            .iter()
            .map(|g| -> HopfResult<Elem> {
                if let Some((gname, slot)) = split_slot_name(&g.name, &alg.gamma_gens) {
                    if slot < i {
                        Ok(t_big.gen(&g.name)?)
                    } else if slot > i {
                        Ok(t_big.gen(&format!("{}_{}", gname, slot + 1))?)
                    } else {
                        let gi = alg
                            .gamma_gens
                            .iter()
                            .position(|n| n == &gname)
                            .expect("gamma generator");
                        alg.rename_delta_into(&alg.delta[gi].clone(), t_big, [i, i + 1], i - 1)
                    }
                } else {
                    Ok(t_big.gen(&g.name)?)
                }
            })
            .collect::<Result<Vec<_>, HopfError>>()?;
        Ok(x.map_into(t_big, &images, &|sc| Ok(sc.clone()))?)
    }

    /// Assemble the matrix of d: C^{s,t} -> C^{s+1,t}.
    fn matrix_of_d(&self, s: u32, t: i64) -> HopfResult<IntMat> {
        let src = &self.bases[&(s, t)];
        let dst = &self.bases[&(s + 1, t)];
        let index: BTreeMap<&CobarBasisElem, usize> =
            dst.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut m = IntMat::zero(dst.len(), src.len());
        for (j, elem) in src.iter().enumerate() {
            for (target, coeff) in self.differential_of(elem)? {
                let Some(&i) = index.get(&target) else {
                    return Err(HopfError::DegreeOverflow(format!(
                        "differential leaves the computed range at (s,t)=({},{})",
                        s, t
                    )));
                };
                let v = self.scalar_to_int(&coeff)?;
                m[(i, j)] = &m[(i, j)] + v;
            }
        }
        Ok(m)
    }

    fn scalar_to_int(&self, c: &Elem) -> HopfResult<BigInt> {
        if !c.is_scalar() {
            return Err(HopfError::AxiomFailure(format!(
                "differential coefficient is not scalar: {}",
                c
            )));
        }
        match (self.coefficients, c.constant_scalar()) {
            (_, ring::scalar::Scalar::Int(v)) => Ok(v),
            (ChartCoefficients::PAdic { p, precision }, ring::scalar::Scalar::Rat(q)) => {
                let m = BigInt::from(p).pow(precision + 1);
                let d = ring::scalar::mod_reduce(q.denom(), &m);
                let dinv = ring::scalar::mod_inverse(&d, &m).ok_or_else(|| {
                    HopfError::AxiomFailure(format!("denominator {} not a p-unit", q.denom()))
                })?;
                Ok(ring::scalar::mod_reduce(&(q.numer() * dinv), &m))
            }
            (ChartCoefficients::Integers, ring::scalar::Scalar::Rat(q)) => {
                if q.denom().is_one() {
                    Ok(q.numer().clone())
                } else {
                    Err(HopfError::AxiomFailure(format!(
                        "non-integer coefficient {} in an integral chart",
                        q
                    )))
                }
            }
            _ => Err(HopfError::AxiomFailure("unsupported chart scalar".into())),
        }
    }

    fn relation_lattice_at(&self, rank: usize, precision: Option<u32>) -> IntMat {
        match (self.coefficients, precision) {
            (ChartCoefficients::Integers, _) => IntMat::zero(rank, 0),
            (ChartCoefficients::PAdic { p, .. }, Some(k)) => {
                let m = BigInt::from(p).pow(k);
                let mut rel = IntMat::zero(rank, rank);
                for i in 0..rank {
                    rel[(i, i)] = m.clone();
                }
                rel
            }
            (ChartCoefficients::PAdic { .. }, None) => unreachable!("precision required"),
        }
    }

    fn homology_at_precision(
        &self,
        s: u32,
        t: i64,
        precision: Option<u32>,
    ) -> HopfResult<Subquotient> {
        let dim = self.bases[&(s, t)].len();
        let d_out = self
            .differentials
            .get(&(s, t))
            .cloned()
            .unwrap_or_else(|| IntMat::zero(0, dim));
        let d_in = if s == 0 {
            IntMat::zero(dim, 0)
        } else {
            self.differentials[&(s - 1, t)].clone()
        };
        let rels_prev = self.relation_lattice_at(d_in.cols, precision);
        let rels_here = self.relation_lattice_at(dim, precision);
        let rels_next = self.relation_lattice_at(d_out.rows, precision);
        Ok(homology(&rels_prev, &d_in, &rels_here, &d_out, &rels_next))
    }

    /// Homology at (s, t) at the requested precision.
    pub fn homology_at(&self, s: u32, t: i64) -> HopfResult<Subquotient> {
        let prec = match self.coefficients {
            ChartCoefficients::Integers => None,
            ChartCoefficients::PAdic { precision, .. } => Some(precision),
        };
        self.homology_at_precision(s, t, prec)
    }

    /// Invariants at (s, t). Over ℤ the homology itself; over ℤ/p^K the
    /// stable part: the image of the comparison H(K+1) -> H(K), which kills
    /// kernel classes that exist only at finite precision.
    pub fn ext_at(&self, s: u32, t: i64) -> HopfResult<ChartEntry> {
        match self.coefficients {
            ChartCoefficients::Integers => {
                let h = self.homology_at_precision(s, t, None)?;
                Ok(self.cap(h.invariants()))
            }
            ChartCoefficients::PAdic { precision, .. } => {
                let h_lo = self.homology_at_precision(s, t, Some(precision))?;
                let h_hi = self.homology_at_precision(s, t, Some(precision + 1))?;
                // cycles at K+1 are cycles at K; the image subgroup of H(K)
                // generated by them is the stable answer
                let mut gens: Vec<Vec<BigInt>> = Vec::new();
                for j in 0..h_hi.cycles.cols {
                    let v = h_hi.cycles.col(j);
                    let c = h_lo.coords(&v).ok_or_else(|| {
                        HopfError::AxiomFailure(
                            "precision-(K+1) cocycle is not a precision-K cocycle".into(),
                        )
                    })?;
                    gens.push(c);
                }
                Ok(self.cap(subgroup_invariants(&h_lo.group, gens)))
            }
        }
    }

    fn cap(&self, inv: GroupInvariants) -> ChartEntry {
        match self.coefficients {
            ChartCoefficients::Integers => ChartEntry {
                free_rank: inv.free_rank,
                capped: vec![false; inv.torsion.len()],
                torsion: inv.torsion,
            },
            ChartCoefficients::PAdic { p, precision } => {
                let m = BigInt::from(p).pow(precision);
                let capped = inv.torsion.iter().map(|t| *t >= m).collect();
                ChartEntry { free_rank: inv.free_rank, torsion: inv.torsion, capped }
            }
        }
    }

    /// The order of the class of a single basis monomial in H^{s,t}, or
    /// None when the class has infinite order. Errors if the element is not
    /// a cocycle.
    pub fn class_order(
        &self,
        s: u32,
        t: i64,
        elem: &CobarBasisElem,
    ) -> HopfResult<Option<BigInt>> {
        let h = self.homology_at(s, t)?;
        let j = self.bases[&(s, t)]
            .iter()
            .position(|b| b == elem)
            .ok_or_else(|| HopfError::DegreeOverflow("element outside the basis".into()))?;
        let dim = self.bases[&(s, t)].len();
        let mut v = vec![BigInt::zero(); dim];
        v[j] = BigInt::one();
        let coords = h.coords(&v).ok_or_else(|| {
            HopfError::AxiomFailure("element is not a cocycle at this precision".into())
        })?;
        Ok(order_in_quotient(&h.group, &coords))
    }
}

fn split_slot_name(name: &str, gamma_gens: &[String]) -> Option<(String, usize)> {
    for g in gamma_gens {
        if let Some(rest) = name.strip_prefix(&format!("{}_", g)) {
            if let Ok(slot) = rest.parse::<usize>() {
                return Some((g.clone(), slot));
            }
        }
    }
    None
}

impl GradedHopfAlgebroid {
    /// η_R-migration image of a single A-generator at a slot boundary.
    pub(crate) fn lift_a_gen(
        &self,
        name: &str,
        target: &Ring,
        slot: usize,
    ) -> HopfResult<Elem> {
        let g = self.a_ring.gen(name)?;
        self.lift_a_into_slots_pub(&g, target, slot)
    }
}

/// The full Ext chart over the computed range.
#[derive(Clone, Debug)]
pub struct ExtChart {
    pub entries: BTreeMap<(u32, i64), ChartEntry>,
    pub s_max: u32,
    pub t_bound: i64,
    pub coefficients: ChartCoefficients,
}

impl ExtChart {
    pub fn records(&self) -> Vec<String> {
        let mut out = Vec::new();
        for ((s, t), e) in &self.entries {
            let torsion: Vec<String> = e
                .torsion
                .iter()
                .zip(&e.capped)
                .map(|(o, c)| if *c { format!(">={}", o) } else { o.to_string() })
                .collect();
            let prec = match self.coefficients {
                ChartCoefficients::Integers => "exact".to_string(),
                ChartCoefficients::PAdic { p, precision } => format!("{}^{}", p, precision),
            };
            out.push(format!(
                "s={} t={} free_rank={} torsion=[{}] precision={}",
                s,
                t,
                e.free_rank,
                torsion.join(","),
                prec
            ));
        }
        out
    }
}

/// Compute the Ext chart of a comodule over the algebroid.
pub fn ext_chart(
    algebroid: GradedHopfAlgebroid,
    comodule: GradedComodule,
    s_max: u32,
    t_bound: i64,
    coefficients: ChartCoefficients,
) -> HopfResult<(ExtChart, CobarComplex)> {
    let complex = CobarComplex::build(algebroid, comodule, s_max, t_bound, coefficients)?;
    let mut entries = BTreeMap::new();
    let t_min = complex.comodule.gen_degrees.iter().copied().min().unwrap_or(0);
    for t in t_min..=t_bound {
        for s in 0..=s_max {
            let e = complex.ext_at(s, t)?;
            entries.insert((s, t), e);
        }
    }
    Ok((
        ExtChart { entries, s_max, t_bound, coefficients },
        complex,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::{build_bud_algebroid, build_ptypical_algebroid};

    #[test]
    fn bud2_chart_anchors() {
        let alg = build_bud_algebroid(2).unwrap();
        let (chart, complex) = ext_chart(
            alg,
            GradedComodule::structure(),
            3,
            6,
            ChartCoefficients::Integers,
        )
        .unwrap();
        // Ext^{0,0} = Z
        let e00 = &chart.entries[&(0, 0)];
        assert_eq!(e00.free_rank, 1);
        assert!(e00.torsion.is_empty());
        // Ext^{1,1} = Z/2 generated by a1
        let e11 = &chart.entries[&(1, 1)];
        assert_eq!(e11.free_rank, 0);
        assert_eq!(e11.torsion, vec![BigInt::from(2)]);
        let a1 = CobarBasisElem { a_mono: vec![0], slots: vec![vec![1]], m_gen: 0 };
        let ord = complex.class_order(1, 1, &a1).unwrap();
        assert_eq!(ord, Some(BigInt::from(2)));
    }

    #[test]
    fn ptypical_p3_chart_anchor() {
        let alg = build_ptypical_algebroid(3, 8).unwrap();
        let (chart, complex) = ext_chart(
            alg,
            GradedComodule::structure(),
            2,
            6,
            ChartCoefficients::PAdic { p: 3, precision: 4 },
        )
        .unwrap();
        // Ext^{1,2} contains a class of order 3 represented by t1
        let t1 = CobarBasisElem { a_mono: vec![0, 0], slots: vec![vec![1, 0]], m_gen: 0 };
        let ord = complex.class_order(1, 2, &t1).unwrap();
        assert_eq!(ord, Some(BigInt::from(3)));
        let e12 = &chart.entries[&(1, 2)];
        assert!(e12.torsion.contains(&BigInt::from(3)));
        // Ext^{0,t} = 0 for 0 < t <= bound (no nonconstant primitives)
        for t in 1..=5 {
            let e = &chart.entries[&(0, t)];
            assert!(e.is_trivial(), "Ext^(0,{}) = {}", t, e);
        }
        // Ext^{0,0}: the constants Z/3^4 at this precision
        let e00 = &chart.entries[&(0, 0)];
        assert_eq!(e00.torsion.len(), 1);
        assert!(e00.capped[0]);
    }
}
