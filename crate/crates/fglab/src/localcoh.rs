//! Koszul and stable-Koszul complexes on graded modules realized degreewise,
//! local cohomology with stabilization detection, chromatic modules
//! O/I_n^∞, the Landweber criterion, transition-zero and fracture checks.
//!
//! Modules are monomial-windowed: a graded piece is the free lattice on the
//! monomials whose exponents lie in per-generator windows, with an optional
//! p-power torsion cap. The scalar p participates in sequences as a
//! degree-zero element. The stable-Koszul stage complex is assembled in
//! "negative window" coordinates (monomials ν·Πu_i^{-k}), where its
//! differentials are signed inclusions; homology is computed by exact
//! integer linear algebra and stabilization is detected by comparing
//! consecutive stages through the induced maps.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::linalg::{
    cokernel, homology, is_iso, kernel_group, GroupInvariants, IntMat, PresentedGroup,
    Subquotient,
};
use crate::ring::{Ring, RingError};

#[derive(Clone, Debug)]
pub enum LocalCohError {
    UnsupportedIdeal(String),
    NonStabilizing { degree: i64, stage: i64 },
    NotRegular(String),
    InfinitePiece { degree: i64 },
    Ring(RingError),
}

impl fmt::Display for LocalCohError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalCohError::UnsupportedIdeal(s) => write!(f, "unsupported ideal: {}", s),
            LocalCohError::NonStabilizing { degree, stage } => {
                write!(f, "no stabilization at degree {} within stage {}", degree, stage)
            }
            LocalCohError::NotRegular(s) => write!(f, "sequence is not regular: {}", s),
            LocalCohError::InfinitePiece { degree } => {
                write!(f, "graded piece at degree {} is not finite", degree)
            }
            LocalCohError::Ring(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for LocalCohError {}

impl From<RingError> for LocalCohError {
    fn from(e: RingError) -> Self {
        LocalCohError::Ring(e)
    }
}

pub type LResult<T> = Result<T, LocalCohError>;

/// An entry of a Koszul-type sequence: the scalar p, or a ring generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeqEntry {
    P,
    Gen(usize),
}

impl SeqEntry {
    pub fn degree(&self, ring: &Ring) -> i64 {
        match self {
            SeqEntry::P => 0,
            SeqEntry::Gen(i) => ring.gens()[*i].degree,
        }
    }

    pub fn name(&self, ring: &Ring) -> String {
        match self {
            SeqEntry::P => "p".to_string(),
            SeqEntry::Gen(i) => ring.gens()[*i].name.clone(),
        }
    }
}

/// A graded module presented degreewise by monomial windows: the piece at
/// degree d is free (modulo the p-power cap) on the monomials with
/// exponents in [lo_i, hi_i] and weighted degree d.
#[derive(Clone, Debug)]
pub struct GradedModule {
    pub ring: Ring,
    pub lo: Vec<i64>,
    /// None = unbounded above.
    pub hi: Vec<Option<i64>>,
    /// None = exact ℤ lattice (torsion-free scalars); Some(c) adds p^c
    /// relations to every piece.
    pub p_cap: Option<u32>,
    pub p: u64,
}

pub type Monomial = Vec<i64>;

impl GradedModule {
    /// The free module R itself (nonnegative exponents).
    pub fn free(ring: &Ring, p: u64, p_cap: Option<u32>) -> GradedModule {
        let n = ring.gens().len();
        GradedModule { ring: ring.clone(), lo: vec![0; n], hi: vec![None; n], p_cap, p }
    }

    /// Quotient by pure powers: generator i capped at exponent < power.
    pub fn with_power_quotient(&self, gen: usize, power: i64) -> GradedModule {
        let mut m = self.clone();
        m.hi[gen] = Some(power - 1);
        m
    }

    /// Laurent direction: exponents of generator i unbounded below.
    pub fn with_laurent(&self, gen: usize) -> GradedModule {
        let mut m = self.clone();
        m.lo[gen] = i64::MIN;
        m
    }

    fn degrees(&self) -> Vec<i64> {
        self.ring.gens().iter().map(|g| g.degree).collect()
    }

    /// Enumerate the monomial basis at weighted degree d.
    pub fn basis(&self, d: i64) -> LResult<Vec<Monomial>> {
        let degs = self.degrees();
        let n = degs.len();
        let mut out = Vec::new();
        let mut cur = vec![0i64; n];
        // feasibility bounds: exponent of gen i is limited by the degree
        // budget after all other generators sit at their windows' extremes
        fn rec(
            m: &GradedModule,
            degs: &[i64],
            idx: usize,
            remaining: i64,
            cur: &mut Vec<i64>,
            out: &mut Vec<Monomial>,
            d: i64,
        ) -> LResult<()> {
            if idx == degs.len() {
                if remaining == 0 {
                    out.push(cur.clone());
                }
                return Ok(());
            }
            let deg = degs[idx];
            if deg <= 0 {
                return Err(LocalCohError::UnsupportedIdeal(
                    "module windows need positive generator degrees".into(),
                ));
            }
            // minimal degree the later generators can absorb
            let later_min: i64 = (idx + 1..degs.len())
                .map(|j| {
                    if m.lo[j] == i64::MIN {
                        i64::MIN / 4
                    } else {
                        m.lo[j] * degs[j]
                    }
                })
                .sum();
            let later_unbounded_neg = (idx + 1..degs.len()).any(|j| m.lo[j] == i64::MIN);
            // e*deg <= remaining - later_min (when later windows bounded below)
            let hi_budget = if later_unbounded_neg {
                // only sound when this is the last generator
                if idx + 1 != degs.len() {
                    return Err(LocalCohError::InfinitePiece { degree: d });
                }
                remaining
            } else {
                remaining - later_min
            };
            let mut hi = hi_budget.div_euclid(deg);
            if let Some(h) = m.hi[idx] {
                hi = hi.min(h);
            }
            let later_max_unbounded = (idx + 1..degs.len()).any(|j| m.hi[j].is_none());
            let lo = if m.lo[idx] == i64::MIN {
                if later_max_unbounded {
                    return Err(LocalCohError::InfinitePiece { degree: d });
                }
                let later_max: i64 = (idx + 1..degs.len())
                    .map(|j| m.hi[j].unwrap_or(0) * degs[j])
                    .sum();
                (remaining - later_max).div_euclid(deg)
            } else {
                m.lo[idx]
            };
            for e in lo..=hi {
                cur[idx] = e;
                rec(m, degs, idx + 1, remaining - e * deg, cur, out, d)?;
                cur[idx] = 0;
            }
            Ok(())
        }
        rec(self, &degs, 0, d, &mut cur, &mut out, d)?;
        out.sort();
        Ok(out)
    }

    pub fn piece(&self, d: i64) -> LResult<(Vec<Monomial>, PresentedGroup)> {
        let b = self.basis(d)?;
        let g = match self.p_cap {
            None => PresentedGroup::free(b.len()),
            Some(c) => PresentedGroup::free_mod(b.len(), &BigInt::from(self.p).pow(c)),
        };
        Ok((b, g))
    }

    /// Matrix of multiplication by a sequence entry from degree d.
    pub fn mult_matrix(
        &self,
        entry: SeqEntry,
        power: u32,
        src: &[Monomial],
        dst: &[Monomial],
    ) -> IntMat {
        let mut m = IntMat::zero(dst.len(), src.len());
        let index: BTreeMap<&Monomial, usize> =
            dst.iter().enumerate().map(|(i, b)| (b, i)).collect();
        match entry {
            SeqEntry::P => {
                let c = BigInt::from(self.p).pow(power);
                for (j, mono) in src.iter().enumerate() {
                    if let Some(&i) = index.get(mono) {
                        m[(i, j)] = c.clone();
                    }
                }
            }
            SeqEntry::Gen(g) => {
                for (j, mono) in src.iter().enumerate() {
                    let mut t = mono.clone();
                    t[g] += power as i64;
                    if let Some(&i) = index.get(&t) {
                        m[(i, j)] = BigInt::one();
                    }
                }
            }
        }
        m
    }
}

/// Cohomology data per (cohomological degree, internal degree).
#[derive(Clone, Debug)]
pub struct CohTable {
    pub entries: BTreeMap<(u32, i64), GroupInvariants>,
}

impl CohTable {
    pub fn get(&self, s: u32, d: i64) -> GroupInvariants {
        self.entries
            .get(&(s, d))
            .cloned()
            .unwrap_or(GroupInvariants { free_rank: 0, torsion: vec![] })
    }
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let mut s = Vec::new();
        for i in 0..n {
            if mask & (1 << i) != 0 {
                s.push(i);
            }
        }
        out.push(s);
    }
    out.sort_by_key(|s| (s.len(), s.clone()));
    out
}

fn subset_sign(s: &[usize], i: usize) -> i64 {
    // sign of inserting/removing i: (-1)^{position of i in s}
    let pos = s.iter().position(|&x| x == i).unwrap_or_else(|| {
        s.iter().filter(|&&x| x < i).count()
    });
    if pos % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The (homological) Koszul complex K(u) ⊗ M at one internal degree:
/// returns H_s for s = 0..=len(u).
pub fn koszul_homology(
    module: &GradedModule,
    seq: &[SeqEntry],
    degrees: &[i64],
) -> LResult<CohTable> {
    let n = seq.len();
    let subs = subsets(n);
    let mut entries = BTreeMap::new();
    for &d in degrees {
        // component for subset S sits in internal degree d + Σ_{i∈S} deg u_i
        // (K_s = ⊕ M(-Σ deg); the piece of K_s at degree d is M at
        // d - Σ... using homological grading with differential lowering s)
        // gather bases per subset
        let mut bases: BTreeMap<Vec<usize>, Vec<Monomial>> = BTreeMap::new();
        for s in &subs {
            let shift: i64 = s.iter().map(|&i| seq[i].degree(&module.ring)).sum();
            bases.insert(s.clone(), module.basis(d - shift)?);
        }
        // assemble per homological degree
        let max_s = n as u32;
        for hs in 0..=max_s {
            // d_hs: K_hs -> K_{hs-1}, d_{hs+1}: K_{hs+1} -> K_hs
            let mk = |from: u32, to: u32| -> (IntMat, usize, usize) {
                let from_subs: Vec<&Vec<usize>> =
                    subs.iter().filter(|s| s.len() == from as usize).collect();
                let to_subs: Vec<&Vec<usize>> =
                    subs.iter().filter(|s| s.len() == to as usize).collect();
                let from_dim: usize = from_subs.iter().map(|s| bases[*s].len()).sum();
                let to_dim: usize = to_subs.iter().map(|s| bases[*s].len()).sum();
                let mut m = IntMat::zero(to_dim, from_dim);
                let mut col0 = 0;
                for s in &from_subs {
                    let src = &bases[*s];
                    for &i in s.iter() {
                        let mut t: Vec<usize> = s.iter().copied().filter(|&x| x != i).collect();
                        t.sort();
                        let mut row0 = 0;
                        for ts in &to_subs {
                            if **ts == t {
                                break;
                            }
                            row0 += bases[*ts].len();
                        }
                        let dst = &bases[&t];
                        let block = module.mult_matrix(seq[i], 1, src, dst);
                        let sign = subset_sign(s, i);
                        for r in 0..block.rows {
                            for c in 0..block.cols {
                                if !block[(r, c)].is_zero() {
                                    let v = if sign > 0 {
                                        block[(r, c)].clone()
                                    } else {
                                        -block[(r, c)].clone()
                                    };
                                    m[(row0 + r, col0 + c)] = &m[(row0 + r, col0 + c)] + v;
                                }
                            }
                        }
                    }
                    col0 += src.len();
                }
                (m, from_dim, to_dim)
            };
            let (d_in, dim_hi, dim_here) = if hs < max_s {
                mk(hs + 1, hs)
            } else {
                let here: usize = subs
                    .iter()
                    .filter(|s| s.len() == hs as usize)
                    .map(|s| bases[s].len())
                    .sum();
                (IntMat::zero(here, 0), 0, here)
            };
            let (d_out, _, dim_lo) = if hs > 0 {
                mk(hs, hs - 1)
            } else {
                (IntMat::zero(0, dim_here), dim_here, 0)
            };
            let rel = |r: usize| match module.p_cap {
                None => IntMat::zero(r, 0),
                Some(c) => {
                    let m = BigInt::from(module.p).pow(c);
                    let mut rels = IntMat::zero(r, r);
                    for i in 0..r {
                        rels[(i, i)] = m.clone();
                    }
                    rels
                }
            };
            let h = homology(&rel(dim_hi), &d_in, &rel(dim_here), &d_out, &rel(dim_lo));
            entries.insert((hs, d), h.invariants());
        }
    }
    Ok(CohTable { entries })
}

/// Windowed (stage-k) stable-Koszul/Čech complex: component S is the module
/// with the S-variables' windows opened to depth k_i below, with signed
/// inclusion differentials; p participates through a widened torsion cap
/// and a p^{k_p}-multiplication into the opened component.
struct StageComplex<'a> {
    module: &'a GradedModule,
    seq: &'a [SeqEntry],
    /// per-sequence-entry depth
    depth: Vec<i64>,
}

impl<'a> StageComplex<'a> {
    fn component(&self, s: &[usize]) -> GradedModule {
        let mut m = self.module.clone();
        for &i in s {
            match self.seq[i] {
                SeqEntry::Gen(g) => {
                    m.lo[g] = m.lo[g].saturating_sub(self.depth[i]);
                }
                SeqEntry::P => {
                    if let Some(c) = m.p_cap {
                        m.p_cap = Some(c + self.depth[i] as u32);
                    }
                }
            }
        }
        m
    }

    /// Inclusion-style map between components S ⊆ T at one degree: identity
    /// on common monomials, multiplied by p^{depth} when the p-slot opens.
    fn inclusion(
        &self,
        s: &[usize],
        t: &[usize],
        src: &[Monomial],
        dst: &[Monomial],
    ) -> IntMat {
        let opened_p = t
            .iter()
            .find(|&&i| !s.contains(&i) && matches!(self.seq[i], SeqEntry::P));
        let scale = match opened_p {
            Some(&i) => BigInt::from(self.module.p).pow(self.depth[i] as u32),
            None => BigInt::one(),
        };
        let index: BTreeMap<&Monomial, usize> =
            dst.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut m = IntMat::zero(dst.len(), src.len());
        for (j, mono) in src.iter().enumerate() {
            if let Some(&i) = index.get(mono) {
                m[(i, j)] = scale.clone();
            }
        }
        m
    }

    /// Cohomology H^s at internal degree d for s = 0..=n, as subquotients
    /// plus the bases (for induced-map computations).
    fn cohomology(
        &self,
        d: i64,
    ) -> LResult<(Vec<Subquotient>, BTreeMap<Vec<usize>, (Vec<Monomial>, GradedModule)>)> {
        let n = self.seq.len();
        let subs = subsets(n);
        let mut data: BTreeMap<Vec<usize>, (Vec<Monomial>, GradedModule)> = BTreeMap::new();
        for s in &subs {
            let comp = self.component(s);
            let b = comp.basis(d)?;
            data.insert(s.clone(), (b, comp));
        }
        let dims = |k: usize| -> usize {
            subs.iter().filter(|s| s.len() == k).map(|s| data[s].0.len()).sum()
        };
        let mat = |k: usize| -> IntMat {
            // d: C^k -> C^{k+1}
            let from: Vec<&Vec<usize>> = subs.iter().filter(|s| s.len() == k).collect();
            let to: Vec<&Vec<usize>> = subs.iter().filter(|s| s.len() == k + 1).collect();
            let mut m = IntMat::zero(dims(k + 1), dims(k));
            let mut col0 = 0;
            for s in &from {
                let (src, _) = &data[*s];
                for i in 0..self.seq.len() {
                    if s.contains(&i) {
                        continue;
                    }
                    let mut t: Vec<usize> = (*s).clone();
                    t.push(i);
                    t.sort();
                    let mut row0 = 0;
                    for ts in &to {
                        if **ts == t {
                            break;
                        }
                        row0 += data[*ts].0.len();
                    }
                    let (dst, _) = &data[&t];
                    let block = self.inclusion(s, &t, src, dst);
                    let sign = subset_sign(&t, i);
                    for r in 0..block.rows {
                        for c in 0..block.cols {
                            if !block[(r, c)].is_zero() {
                                let v = if sign > 0 {
                                    block[(r, c)].clone()
                                } else {
                                    -block[(r, c)].clone()
                                };
                                m[(row0 + r, col0 + c)] = &m[(row0 + r, col0 + c)] + v;
                            }
                        }
                    }
                }
                col0 += src.len();
            }
            m
        };
        let rel_for = |k: usize| -> IntMat {
            // block relation lattice: per component its torsion cap
            let comps: Vec<&Vec<usize>> = subs.iter().filter(|s| s.len() == k).collect();
            let total = dims(k);
            let mut cols: Vec<Vec<BigInt>> = Vec::new();
            let mut off = 0;
            for s in comps {
                let (b, comp) = &data[s];
                if let Some(c) = comp.p_cap {
                    let m = BigInt::from(comp.p).pow(c);
                    for i in 0..b.len() {
                        let mut col = vec![BigInt::zero(); total];
                        col[off + i] = m.clone();
                        cols.push(col);
                    }
                }
                off += b.len();
            }
            IntMat::from_cols(total, cols)
        };
        let mut out = Vec::new();
        for s in 0..=n {
            let d_out = if s < n { mat(s) } else { IntMat::zero(0, dims(n)) };
            let d_in = if s > 0 {
                mat(s - 1)
            } else {
                IntMat::zero(dims(0), 0)
            };
            let h = homology(
                &rel_for(s.saturating_sub(1)),
                &d_in,
                &rel_for(s),
                &d_out,
                &rel_for(s + 1),
            );
            out.push(h);
        }
        Ok((out, data))
    }
}

/// Result of a local cohomology computation.
#[derive(Clone, Debug)]
pub struct LocalCohResult {
    /// (s, internal degree) -> invariants at stabilization.
    pub table: CohTable,
    /// Stage depths used per degree.
    pub stages: BTreeMap<i64, i64>,
    /// Whether torsion saturated the precision cap somewhere.
    pub precision: Option<(u64, u32)>,
}

/// Depth needed at internal degree d so that every potentially contributing
/// monomial fits the windows, plus the stabilization slack.
fn depth_for_degree(module: &GradedModule, seq: &[SeqEntry], d: i64, window: i64) -> i64 {
    let degs = module.degrees();
    let mut max_neg = 0i64;
    for e in seq {
        if let SeqEntry::Gen(g) = e {
            // deepest useful exponent of generator g at degree |d|
            let other_min: i64 = 0; // other gens at >= 0
            let _ = other_min;
            let depth = (d.abs() + degs.iter().sum::<i64>()) / degs[*g] + 1;
            max_neg = max_neg.max(depth);
        }
    }
    max_neg + window
}

/// Degreewise local cohomology H^s_I(M) for I spanned by the sequence,
/// computed as the stabilized windowed stable-Koszul cohomology. The ideal
/// must contain (a power of) every positive-degree generator of the ring,
/// otherwise graded pieces fail to stabilize and the computation refuses.
pub fn local_cohomology(
    module: &GradedModule,
    seq: &[SeqEntry],
    degrees: &[i64],
) -> LResult<LocalCohResult> {
    // irrelevant-ideal precondition
    for (i, g) in module.ring.gens().iter().enumerate() {
        if g.degree > 0
            && module.hi[i].is_none()
            && !seq.iter().any(|e| matches!(e, SeqEntry::Gen(j) if *j == i))
        {
            return Err(LocalCohError::UnsupportedIdeal(format!(
                "generator {} does not appear in the sequence; graded pieces of the localization would not stabilize",
                g.name
            )));
        }
    }
    let window = 4i64;
    let mut entries = BTreeMap::new();
    let mut stages = BTreeMap::new();
    // the p-slot is never staged: its depth is pinned at the precision cap
    // (deeper p-divisibility is invisible at precision p^K), so stage
    // transitions are honest inclusions in the u-directions only
    let p_depth = module.p_cap.unwrap_or(0) as i64;
    let depth_vec = |d: i64| -> Vec<i64> {
        seq.iter()
            .map(|e| match e {
                SeqEntry::P => p_depth,
                SeqEntry::Gen(_) => d,
            })
            .collect()
    };
    for &d in degrees {
        let base_depth = depth_for_degree(module, seq, d, 0);
        // verify stabilization: invariants equal and induced maps iso across
        // the window
        let mut agreed: Option<Vec<Subquotient>> = None;
        for w in 0..window {
            let depth_lo = base_depth + w;
            let depth_hi = base_depth + w + 1;
            let st_lo = StageComplex {
                module,
                seq,
                depth: depth_vec(depth_lo),
            };
            let st_hi = StageComplex {
                module,
                seq,
                depth: depth_vec(depth_hi),
            };
            let (h_lo, data_lo) = st_lo.cohomology(d)?;
            let (h_hi, data_hi) = st_hi.cohomology(d)?;
            // induced map: inclusion of stage-lo components into stage-hi
            for s in 0..h_lo.len() {
                let f = stage_inclusion_matrix(&st_lo, &st_hi, &data_lo, &data_hi, s)?;
                // restrict to cycles: coords of image of h_lo cycles in h_hi
                let mut cols = Vec::new();
                for j in 0..h_lo[s].cycles.cols {
                    let v = h_lo[s].cycles.col(j);
                    let img = f.mul_vec(&v);
                    let c = h_hi[s].coords(&img).ok_or(LocalCohError::NonStabilizing {
                        degree: d,
                        stage: depth_hi,
                    })?;
                    cols.push(c);
                }
                let induced = IntMat::from_cols(h_hi[s].cycles.cols, cols);
                if !is_iso(&induced, &h_lo[s].group.rels, &h_hi[s].group.rels) {
                    if w == window - 1 {
                        return Err(LocalCohError::NonStabilizing { degree: d, stage: depth_hi });
                    }
                    agreed = None;
                    break;
                }
                if s == h_lo.len() - 1 {
                    agreed = Some(h_lo.clone());
                }
            }
            if agreed.is_some() {
                stages.insert(d, depth_lo);
                break;
            }
        }
        let hs = agreed.ok_or(LocalCohError::NonStabilizing {
            degree: d,
            stage: base_depth + window,
        })?;
        for (s, h) in hs.iter().enumerate() {
            entries.insert((s as u32, d), h.invariants());
        }
    }
    Ok(LocalCohResult {
        table: CohTable { entries },
        stages,
        precision: module.p_cap.map(|c| (module.p, c)),
    })
}

fn stage_inclusion_matrix(
    lo: &StageComplex,
    hi: &StageComplex,
    data_lo: &BTreeMap<Vec<usize>, (Vec<Monomial>, GradedModule)>,
    data_hi: &BTreeMap<Vec<usize>, (Vec<Monomial>, GradedModule)>,
    s: usize,
) -> LResult<IntMat> {
    let subs: Vec<&Vec<usize>> = data_lo.keys().filter(|k| k.len() == s).collect();
    let dim_lo: usize = subs.iter().map(|k| data_lo[*k].0.len()).sum();
    let dim_hi: usize = subs.iter().map(|k| data_hi[*k].0.len()).sum();
    let mut m = IntMat::zero(dim_hi, dim_lo);
    let mut col0 = 0;
    let mut row0 = 0;
    for sset in &subs {
        let (src, _) = &data_lo[*sset];
        let (dst, _) = &data_hi[*sset];
        // p-slot deepening multiplies by p^{Δdepth}
        let mut scale = BigInt::one();
        for &i in sset.iter() {
            if matches!(lo.seq[i], SeqEntry::P) {
                let delta = (hi.depth[i] - lo.depth[i]) as u32;
                scale = BigInt::from(lo.module.p).pow(delta);
            }
        }
        let index: BTreeMap<&Monomial, usize> =
            dst.iter().enumerate().map(|(i, b)| (b, i)).collect();
        for (j, mono) in src.iter().enumerate() {
            if let Some(&i) = index.get(mono) {
                m[(row0 + i, col0 + j)] = scale.clone();
            }
        }
        col0 += src.len();
        row0 += dst.len();
    }
    Ok(m)
}

/// Independent Čech oracle for the free module: a monomial contributes to
/// H^s exactly when it is negative in every sequence variable (then s = the
/// full cohomological degree), by contractibility of the sub-simplex of
/// components containing it. Torsion in the p-direction is p^min(cap, ∞).
pub fn cech_oracle_free(
    ring: &Ring,
    p: u64,
    p_cap: Option<u32>,
    seq: &[SeqEntry],
    degrees: &[i64],
) -> LResult<CohTable> {
    let n = seq.len();
    let has_p = seq.iter().any(|e| matches!(e, SeqEntry::P));
    let u_gens: Vec<usize> = seq
        .iter()
        .filter_map(|e| match e {
            SeqEntry::Gen(g) => Some(*g),
            SeqEntry::P => None,
        })
        .collect();
    let degs: Vec<i64> = ring.gens().iter().map(|g| g.degree).collect();
    let mut entries = BTreeMap::new();
    for &d in degrees {
        // count monomials with exponents <= -1 in every u-direction of the
        // sequence and >= 0 elsewhere (non-sequence gens must be absent for
        // an irrelevant ideal, but handle them as >= 0)
        let mut count = 0usize;
        // enumerate: exponents a_g <= -1 for g in u_gens, others >= 0
        fn rec(
            degs: &[i64],
            u_gens: &[usize],
            idx: usize,
            remaining: i64,
            count: &mut usize,
        ) {
            if idx == degs.len() {
                if remaining == 0 {
                    *count += 1;
                }
                return;
            }
            let deg = degs[idx];
            if u_gens.contains(&idx) {
                // negative exponents: -1 down to whatever the budget allows
                let mut e = -1i64;
                loop {
                    let rest = remaining - e * deg;
                    // later variables can absorb at most ... recurse; stop
                    // when even all-positive later cannot compensate
                    if rest < -((idx + 1..degs.len())
                        .filter(|j| u_gens.contains(j))
                        .map(|j| degs[j])
                        .sum::<i64>())
                    {
                        break;
                    }
                    rec(degs, u_gens, idx + 1, rest, count);
                    e -= 1;
                }
            } else {
                let max = if deg > 0 { remaining.max(0) / deg } else { 0 };
                for e in 0..=max {
                    rec(degs, u_gens, idx + 1, remaining - e * deg, count);
                }
            }
        }
        rec(&degs, &u_gens, 0, d, &mut count);
        let top = n as u32;
        if count > 0 {
            let inv = match (has_p, p_cap) {
                (_, Some(c)) => GroupInvariants {
                    free_rank: 0,
                    torsion: vec![BigInt::from(p).pow(c); count],
                },
                (false, None) => GroupInvariants { free_rank: count, torsion: vec![] },
                (true, None) => GroupInvariants {
                    free_rank: 0,
                    torsion: vec![],
                },
            };
            entries.insert((top, d), inv);
        }
    }
    Ok(CohTable { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{make_ring, polynomial_ring, GenSpec, RingSpec};

    fn fp_ring(p: u64, degs: &[i64]) -> Ring {
        let base = make_ring(&RingSpec::PrimeField(p)).unwrap();
        let gens: Vec<GenSpec> = degs
            .iter()
            .enumerate()
            .map(|(i, &d)| GenSpec::new(&format!("u{}", i + 1), d))
            .collect();
        polynomial_ring(&base, gens).unwrap()
    }

    #[test]
    fn koszul_regular_element() {
        // R = F_p[u], u = (u): H_0 = F_p at degree 0 only, H_1 = 0
        let r = fp_ring(3, &[2]);
        let m = GradedModule::free(&r, 3, Some(1));
        let degrees: Vec<i64> = (0..=8).collect();
        let t = koszul_homology(&m, &[SeqEntry::Gen(0)], &degrees).unwrap();
        assert_eq!(t.get(0, 0).torsion, vec![BigInt::from(3)]);
        for d in 1..=8 {
            assert!(t.get(0, d).is_trivial(), "H_0 at degree {}", d);
        }
        for d in 0..=8 {
            assert!(t.get(1, d).is_trivial(), "H_1 at degree {}", d);
        }
    }

    #[test]
    fn koszul_zero_divisor() {
        // M = R/u: H_1 = M (u acts as zero)
        let r = fp_ring(3, &[2]);
        let m = GradedModule::free(&r, 3, Some(1)).with_power_quotient(0, 1);
        let t = koszul_homology(&m, &[SeqEntry::Gen(0)], &[2]).unwrap();
        // H_1 at internal degree 2: basis is u^0 at degree 2 - 2 = 0
        assert_eq!(t.get(1, 2).torsion, vec![BigInt::from(3)]);
    }

    #[test]
    fn koszul_p_on_zpk() {
        // R = Z/p^K (no gens), u = (p): H_0 = Z/p, H_1 = Z/p (truncation artifact)
        let base = make_ring(&RingSpec::ModPrimePower(2, 5)).unwrap();
        let r = polynomial_ring(&base, vec![]).unwrap();
        let m = GradedModule::free(&r, 2, Some(5));
        let t = koszul_homology(&m, &[SeqEntry::P], &[0]).unwrap();
        assert_eq!(t.get(0, 0).torsion, vec![BigInt::from(2)]);
        assert_eq!(t.get(1, 0).torsion, vec![BigInt::from(2)]);
    }

    #[test]
    fn local_cohomology_one_variable() {
        // R = F_p[u1], deg u1 = p-1 = 2, I = (u1): H^0 = 0, H^1 one class
        // in each degree -2k
        let r = fp_ring(3, &[2]);
        let m = GradedModule::free(&r, 3, Some(1));
        let degrees: Vec<i64> = (-8..=4).collect();
        let res = local_cohomology(&m, &[SeqEntry::Gen(0)], &degrees).unwrap();
        for d in -8..=4i64 {
            assert!(res.table.get(0, d).is_trivial(), "H^0 at {}", d);
            let h1 = res.table.get(1, d);
            if d <= -2 && d % 2 == 0 {
                assert_eq!(h1.torsion, vec![BigInt::from(3)], "H^1 at {}", d);
            } else {
                assert!(h1.is_trivial(), "H^1 at {}", d);
            }
        }
    }

    #[test]
    fn local_cohomology_two_variables_vanishing() {
        // R = F_2[u1, u2], I = (u1, u2): H^s = 0 for s != 2; H^2 matches the
        // negative-monomial count
        let r = fp_ring(2, &[1, 3]);
        let m = GradedModule::free(&r, 2, Some(1));
        let degrees: Vec<i64> = (-10..=2).collect();
        let seq = [SeqEntry::Gen(0), SeqEntry::Gen(1)];
        let res = local_cohomology(&m, &seq, &degrees).unwrap();
        let oracle = cech_oracle_free(&r, 2, Some(1), &seq, &degrees).unwrap();
        for &d in &degrees {
            assert!(res.table.get(0, d).is_trivial());
            assert!(res.table.get(1, d).is_trivial());
            assert_eq!(res.table.get(2, d), oracle.get(2, d), "top at {}", d);
        }
        // spot check: degree -4 = -(a + 3b) with a,b >= 1: a=1,b=1: one class
        assert_eq!(res.table.get(2, -4).torsion, vec![BigInt::from(2)]);
    }

    #[test]
    fn local_cohomology_with_p() {
        // R = Z/p^K-lattice [u1], I = (p, u1): H^2 nonzero in degrees
        // -k deg(u1), capped at p^K
        let base = make_ring(&RingSpec::ModPrimePower(2, 3)).unwrap();
        let r = polynomial_ring(&base, vec![GenSpec::new("u1", 1)]).unwrap();
        let m = GradedModule::free(&r, 2, Some(3));
        let seq = [SeqEntry::P, SeqEntry::Gen(0)];
        let degrees: Vec<i64> = (-5..=1).collect();
        let res = local_cohomology(&m, &seq, &degrees).unwrap();
        for &d in &degrees {
            assert!(res.table.get(0, d).is_trivial());
            assert!(res.table.get(1, d).is_trivial(), "H^1 at {}: {:?}", d, res.table.get(1, d));
            let h2 = res.table.get(2, d);
            if d <= -1 {
                assert_eq!(h2.torsion, vec![BigInt::from(8)], "H^2 at {}", d);
            } else {
                assert!(h2.is_trivial(), "H^2 at {}", d);
            }
        }
    }

    #[test]
    fn unsupported_ideal_refused() {
        let r = fp_ring(2, &[1, 3]);
        let m = GradedModule::free(&r, 2, Some(1));
        assert!(matches!(
            local_cohomology(&m, &[SeqEntry::Gen(0)], &[0]),
            Err(LocalCohError::UnsupportedIdeal(_))
        ));
    }

    #[test]
    fn unit_ideal_all_vanish() {
        // after quotienting by all variables the sequence is still checked,
        // but a module with hi-windows making it finite works: M = R/(u1)
        // localized at u1 is zero
        let r = fp_ring(2, &[1]);
        let m = GradedModule::free(&r, 2, Some(1)).with_power_quotient(0, 1);
        let res = local_cohomology(&m, &[SeqEntry::Gen(0)], &[0]).unwrap();
        // H^0 = Γ_I(M) = M here since u1 is nilpotent on M... the module is
        // I-torsion so H^0 = M and H^1 = 0
        assert_eq!(res.table.get(0, 0).torsion, vec![BigInt::from(2)]);
        assert!(res.table.get(1, 0).is_trivial());
    }
}
