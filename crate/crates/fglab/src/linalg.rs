//! Exact integer linear algebra: Smith normal form, integer linear solving,
//! and homology of complexes of finitely presented abelian groups.
//!
//! Everything here works over ℤ with `BigInt` entries. Finite coefficient
//! rings (𝔽_p, ℤ/p^K) are handled by adding the scalar relation p^K to the
//! presentation lattice, so a single engine serves homology over ℤ, 𝔽_p and
//! the precision-K model of ℤ_p.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix in row-major order.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl std::fmt::Debug for IntMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IntMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        IntMat { rows: r, cols: c, data }
    }

    /// Build from column vectors; `rows` must be given explicitly so the
    /// empty-column-list case keeps its ambient rank.
    pub fn from_cols(rows: usize, cols: Vec<Vec<BigInt>>) -> Self {
        let mut m = IntMat::zero(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for i in 0..rows {
                m[(i, j)] = col[i].clone();
            }
        }
        m
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let t = a * b;
                        out[(i, j)] += t;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    /// Horizontal concatenation [self | other].
    pub fn hcat(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.rows, other.rows);
        let mut m = IntMat::zero(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[a] += c * row[b]
    fn add_row(&mut self, a: usize, b: usize, c: &BigInt) {
        for j in 0..self.cols {
            let t = c * &self[(b, j)];
            self[(a, j)] += t;
        }
    }

    /// col[a] += c * col[b]
    fn add_col(&mut self, a: usize, b: usize, c: &BigInt) {
        for i in 0..self.rows {
            let t = c * &self[(i, b)];
            self[(i, a)] += t;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let t = -self[(a, j)].clone();
            self[(a, j)] = t;
        }
    }

    fn negate_col(&mut self, a: usize) {
        for i in 0..self.rows {
            let t = -self[(i, a)].clone();
            self[(i, a)] = t;
        }
    }
}

/// Smith normal form data: u·a·v = diag with u, v invertible over ℤ.
/// The diagonal entries are nonnegative and each divides the next.
pub struct Smith {
    /// Diagonal invariant factors, including any zeros.
    pub diag: Vec<BigInt>,
    /// Right transform: columns of `v` give the change of basis on the source.
    pub v: IntMat,
    /// Left transform: u * a * v = diag.
    pub u: IntMat,
}

/// Compute the Smith normal form of `a`.
pub fn smith(a: &IntMat) -> Smith {
    let mut m = a.clone();
    let mut u = IntMat::identity(m.rows);
    let mut v = IntMat::identity(m.cols);
    let n = m.rows.min(m.cols);
    let mut t = 0;
    while t < n {
        // find pivot: nonzero entry of minimal absolute value in m[t.., t..]
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..m.rows {
            for j in t..m.cols {
                if !m[(i, j)].is_zero()
                    && pivot.map_or(true, |(pi, pj)| m[(i, j)].abs() < m[(pi, pj)].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap_rows(t, pi);
        u.swap_rows(t, pi);
        m.swap_cols(t, pj);
        v.swap_cols(t, pj);
        // clear row and column t
        let mut again = false;
        for i in (t + 1)..m.rows {
            if !m[(i, t)].is_zero() {
                let q = -(&m[(i, t)] / &m[(t, t)]);
                m.add_row(i, t, &q);
                u.add_row(i, t, &q);
                if !m[(i, t)].is_zero() {
                    again = true;
                }
            }
        }
        for j in (t + 1)..m.cols {
            if !m[(t, j)].is_zero() {
                let q = -(&m[(t, j)] / &m[(t, t)]);
                m.add_col(j, t, &q);
                v.add_col(j, t, &q);
                if !m[(t, j)].is_zero() {
                    again = true;
                }
            }
        }
        if again {
            continue; // smaller remainders appeared; re-pivot at t
        }
        // divisibility: m[t][t] must divide every entry of the remaining block
        let mut fixed = true;
        'outer: for i in (t + 1)..m.rows {
            for j in (t + 1)..m.cols {
                if !(&m[(i, j)] % &m[(t, t)]).is_zero() {
                    m.add_row(t, i, &BigInt::one());
                    u.add_row(t, i, &BigInt::one());
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if fixed {
            t += 1;
        }
    }
    for i in 0..n {
        if m[(i, i)].is_negative() {
            m.negate_row(i);
            u.negate_row(i);
        }
    }
    let diag = (0..n).map(|i| m[(i, i)].clone()).collect();
    Smith { diag, v, u }
}

/// Basis of the integer kernel of `a` (columns x with a·x = 0).
pub fn kernel_basis(a: &IntMat) -> Vec<Vec<BigInt>> {
    let s = smith(a);
    let mut out = Vec::new();
    for j in 0..a.cols {
        let dj = if j < s.diag.len() { s.diag[j].clone() } else { BigInt::zero() };
        if dj.is_zero() {
            out.push(s.v.col(j));
        }
    }
    out
}

/// Solve a·x = b over ℤ; returns one solution if it exists.
pub fn solve(a: &IntMat, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let s = smith(a);
    let ub = s.u.mul_vec(b);
    let mut y = vec![BigInt::zero(); a.cols];
    for i in 0..a.rows {
        let di = if i < s.diag.len() { s.diag[i].clone() } else { BigInt::zero() };
        if di.is_zero() {
            if !ub[i].is_zero() {
                return None;
            }
        } else {
            let (q, r) = ub[i].div_rem(&di);
            if !r.is_zero() {
                return None;
            }
            if i < y.len() {
                y[i] = q;
            } else {
                return None;
            }
        }
    }
    Some(s.v.mul_vec(&y))
}

/// A finitely generated abelian group presented as ℤ^rank / column span of `rels`.
#[derive(Clone, Debug)]
pub struct PresentedGroup {
    pub rank: usize,
    pub rels: IntMat,
}

/// Isomorphism invariants of a finitely generated abelian group:
/// free rank plus the list of torsion orders (> 1, each dividing the next).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupInvariants {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl GroupInvariants {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Order of the group, or None if infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            return None;
        }
        let mut o = BigInt::one();
        for t in &self.torsion {
            o *= t;
        }
        Some(o)
    }
}

impl std::fmt::Display for GroupInvariants {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        for t in &self.torsion {
            parts.push(format!("Z/{}", t));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl PresentedGroup {
    pub fn free(rank: usize) -> Self {
        PresentedGroup { rank, rels: IntMat::zero(rank, 0) }
    }

    pub fn trivial() -> Self {
        PresentedGroup::free(0)
    }

    /// ℤ^rank with every generator killed by `n` (so (ℤ/n)^rank).
    pub fn free_mod(rank: usize, n: &BigInt) -> Self {
        let mut rels = IntMat::zero(rank, rank);
        for i in 0..rank {
            rels[(i, i)] = n.clone();
        }
        PresentedGroup { rank, rels }
    }

    pub fn invariants(&self) -> GroupInvariants {
        let s = smith(&self.rels);
        let mut torsion = Vec::new();
        let mut pivots = 0;
        for d in &s.diag {
            if d.is_zero() {
                continue;
            }
            pivots += 1;
            if !d.is_one() {
                torsion.push(d.clone());
            }
        }
        GroupInvariants { free_rank: self.rank - pivots, torsion }
    }
}

/// A subquotient H = P / (im f + Λ) of ℤ^n, where P = {x : g·x ∈ Λ_C} is the
/// preimage lattice of a relation lattice under a map g. Carries enough data
/// to express further maps on H.
#[derive(Clone, Debug)]
pub struct Subquotient {
    /// Ambient rank n.
    pub ambient: usize,
    /// Columns: a basis of the cycle lattice P ⊆ ℤ^n.
    pub cycles: IntMat,
    /// The group P / (boundaries + relations), presented on the columns of `cycles`.
    pub group: PresentedGroup,
}

impl Subquotient {
    pub fn invariants(&self) -> GroupInvariants {
        self.group.invariants()
    }

    /// Express an ambient vector (which must lie in P) in cycle coordinates.
    pub fn coords(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        solve(&self.cycles, v)
    }
}

/// Lattice of x ∈ ℤ^n with a·x ∈ column-span(lat). Returns a matrix whose
/// columns form a basis.
pub fn preimage_lattice(a: &IntMat, lat: &IntMat) -> IntMat {
    // kernel of [a | lat] gives pairs (x, y) with a·x = lat·y; project to x.
    let stacked = a.hcat(lat);
    let ker = kernel_basis(&stacked);
    let cols: Vec<Vec<BigInt>> = ker.into_iter().map(|k| k[..a.cols].to_vec()).collect();
    // column-reduce to a basis (drop dependent columns) via HNF of the lattice
    lattice_basis(a.cols, cols)
}

/// Column basis (HNF-style) of the lattice spanned by `cols` in ℤ^rank.
pub fn lattice_basis(rank: usize, cols: Vec<Vec<BigInt>>) -> IntMat {
    hnf_cols(IntMat::from_cols(rank, cols))
}

/// Hermite normal form using column operations only; returns a matrix whose
/// nonzero columns are a basis of the column lattice.
pub fn hnf_cols(mut m: IntMat) -> IntMat {
    let mut row = 0;
    let mut col = 0;
    while row < m.rows && col < m.cols {
        // pivot: nonzero entry in row `row` at column >= col with min |.|
        loop {
            let mut pivot: Option<usize> = None;
            for j in col..m.cols {
                if !m[(row, j)].is_zero()
                    && pivot.map_or(true, |p| m[(row, j)].abs() < m[(row, p)].abs())
                {
                    pivot = Some(j);
                }
            }
            let Some(p) = pivot else { break };
            m.swap_cols(col, p);
            let mut done = true;
            for j in (col + 1)..m.cols {
                if !m[(row, j)].is_zero() {
                    let q = -(&m[(row, j)] / &m[(row, col)]);
                    m.add_col(j, col, &q);
                    if !m[(row, j)].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if !m[(row, col)].is_zero() {
            if m[(row, col)].is_negative() {
                m.negate_col(col);
            }
            col += 1;
        }
        row += 1;
    }
    // drop zero columns
    let mut keep = Vec::new();
    for j in 0..m.cols {
        if (0..m.rows).any(|i| !m[(i, j)].is_zero()) {
            keep.push(m.col(j));
        }
    }
    IntMat::from_cols(m.rows, keep)
}

/// Homology at B of a three-term complex A --f--> B --g--> C of presented
/// groups, where f and g are given on ambient generators and are assumed to
/// send relation lattices into relation lattices with g∘f ≡ 0 mod rels(C).
pub fn homology(
    rels_a: &IntMat,
    f: &IntMat,
    rels_b: &IntMat,
    g: &IntMat,
    rels_c: &IntMat,
) -> Subquotient {
    let _ = rels_a;
    let cycles = preimage_lattice(g, rels_c);
    // boundaries + relations, expressed in cycle coordinates
    let span = f.hcat(rels_b);
    let mut rel_cols = Vec::new();
    for j in 0..span.cols {
        let v = span.col(j);
        let c = solve(&cycles, &v).expect("boundary/relation not in cycle lattice");
        rel_cols.push(c);
    }
    let rels = IntMat::from_cols(cycles.cols, rel_cols);
    let rank = cycles.cols;
    Subquotient { ambient: g.cols, cycles, group: PresentedGroup { rank, rels } }
}

/// The order of v's class in ℤ^rank / rels, or None when infinite.
pub fn order_in_quotient(group: &PresentedGroup, v: &[BigInt]) -> Option<BigInt> {
    let s = smith(&group.rels);
    let y = s.u.mul_vec(v);
    let mut order = BigInt::one();
    for (i, yi) in y.iter().enumerate() {
        let di = if i < s.diag.len() { s.diag[i].clone() } else { BigInt::zero() };
        if di.is_zero() {
            if !yi.is_zero() {
                return None;
            }
        } else {
            let g = yi.gcd(&di);
            order = order.lcm(&(&di / g));
        }
    }
    Some(order)
}

/// Invariants of the subgroup of ℤ^rank / rels generated by the classes of
/// the given vectors.
pub fn subgroup_invariants(group: &PresentedGroup, gens: Vec<Vec<BigInt>>) -> GroupInvariants {
    let mut cols = gens;
    for j in 0..group.rels.cols {
        cols.push(group.rels.col(j));
    }
    let basis = lattice_basis(group.rank, cols);
    let mut rel_cols = Vec::new();
    for j in 0..group.rels.cols {
        let v = group.rels.col(j);
        let c = solve(&basis, &v).expect("relation lattice inside the subgroup lattice");
        rel_cols.push(c);
    }
    let rels = IntMat::from_cols(basis.cols, rel_cols);
    PresentedGroup { rank: basis.cols, rels }.invariants()
}

/// The cokernel of f : ℤ^a → B as a presented group.
pub fn cokernel(f: &IntMat, rels_b: &IntMat) -> PresentedGroup {
    PresentedGroup { rank: f.rows, rels: f.hcat(rels_b) }
}

/// Kernel of the induced map (ℤ^a / rels_a) → (ℤ^b / rels_b), as invariants.
/// That is, {x : f·x ∈ span(rels_b)} / rels_a.
pub fn kernel_group(f: &IntMat, rels_a: &IntMat, rels_b: &IntMat) -> Subquotient {
    let cycles = preimage_lattice(f, rels_b);
    let mut rel_cols = Vec::new();
    for j in 0..rels_a.cols {
        let v = rels_a.col(j);
        let c = solve(&cycles, &v).expect("relation not in kernel lattice");
        rel_cols.push(c);
    }
    let rels = IntMat::from_cols(cycles.cols, rel_cols);
    let rank = cycles.cols;
    Subquotient { ambient: f.cols, cycles, group: PresentedGroup { rank, rels } }
}

/// Whether the induced map (ℤ^a/rels_a) → (ℤ^b/rels_b) given by f on
/// generators is an isomorphism of groups.
pub fn is_iso(f: &IntMat, rels_a: &IntMat, rels_b: &IntMat) -> bool {
    // surjective: f's columns together with rels_b span ℤ^b modulo rels_b,
    // i.e. coker(f) = 0
    if !cokernel(f, rels_b).invariants().is_trivial() {
        return false;
    }
    kernel_group(f, rels_a, rels_b).invariants().is_trivial()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn smith_small() {
        let a = IntMat::from_rows(vec![
            vec![bi(2), bi(4), bi(4)],
            vec![bi(-6), bi(6), bi(12)],
            vec![bi(10), bi(4), bi(16)],
        ]);
        let s = smith(&a);
        assert_eq!(s.diag, vec![bi(2), bi(2), bi(156)]);
        // verify u*a*v = diag
        let prod = s.u.mul(&a).mul(&s.v);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { s.diag[i].clone() } else { BigInt::zero() };
                assert_eq!(prod[(i, j)], expect);
            }
        }
    }

    #[test]
    fn smith_divisibility_chain() {
        let a = IntMat::from_rows(vec![vec![bi(6), bi(0)], vec![bi(0), bi(4)]]);
        let s = smith(&a);
        assert_eq!(s.diag, vec![bi(2), bi(12)]);
    }

    #[test]
    fn kernel_and_solve() {
        // x + 2y + 3z = 0
        let a = IntMat::from_rows(vec![vec![bi(1), bi(2), bi(3)]]);
        let k = kernel_basis(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.mul_vec(v).iter().all(|x| x.is_zero()));
        }
        let sol = solve(&a, &[bi(7)]).unwrap();
        assert_eq!(a.mul_vec(&sol), vec![bi(7)]);
        // no solution: 2x = 1
        let b = IntMat::from_rows(vec![vec![bi(2)]]);
        assert!(solve(&b, &[bi(1)]).is_none());
    }

    #[test]
    fn presented_invariants() {
        // Z^2 / <(2,0),(0,3)> = Z/2 + Z/3 = Z/6 in invariant form
        let g = PresentedGroup {
            rank: 2,
            rels: IntMat::from_rows(vec![vec![bi(2), bi(0)], vec![bi(0), bi(3)]]),
        };
        let inv = g.invariants();
        assert_eq!(inv.free_rank, 0);
        assert_eq!(inv.torsion, vec![bi(6)]);
    }

    #[test]
    fn homology_of_mod_p_complex() {
        // Z --2--> Z --0--> Z with relations 8 on the middle: H = ker(0)/im(2)
        // in Z/8: ker = all of Z/8, im = 2Z/8: H = Z/2
        let rels = IntMat::from_rows(vec![vec![bi(8)]]);
        let f = IntMat::from_rows(vec![vec![bi(2)]]);
        let g = IntMat::from_rows(vec![vec![bi(0)]]);
        let h = homology(&IntMat::zero(1, 0), &f, &rels, &g, &rels);
        let inv = h.invariants();
        assert_eq!(inv.free_rank, 0);
        assert_eq!(inv.torsion, vec![bi(2)]);
    }

    #[test]
    fn iso_detection() {
        let rels = IntMat::from_rows(vec![vec![bi(4)]]);
        // multiplication by 3 is an iso of Z/4; by 2 is not
        assert!(is_iso(&IntMat::from_rows(vec![vec![bi(3)]]), &rels, &rels));
        assert!(!is_iso(&IntMat::from_rows(vec![vec![bi(2)]]), &rels, &rels));
    }
}
