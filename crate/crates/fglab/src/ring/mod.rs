//! Exact coefficient-ring tower: integers, (p-local) rationals, ℤ/p^K,
//! prime and finite fields, truncated Witt (Galois) rings, and graded
//! polynomial/Laurent quotients over any of these.
//!
//! Every ring is immutable after construction and every element carries a
//! handle to its owning ring. Polynomial towers are flattened to a single
//! generator list with monomial rewrite rules, so one sparse-polynomial
//! arithmetic serves the whole tower.

pub mod scalar;
pub mod univar;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use scalar::{Scalar, ScalarKind};

/// Generator of a graded polynomial ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub name: String,
    pub degree: i64,
    pub invertible: bool,
}

impl GenSpec {
    pub fn new(name: &str, degree: i64) -> Self {
        GenSpec { name: name.to_string(), degree, invertible: false }
    }

    pub fn laurent(name: &str, degree: i64) -> Self {
        GenSpec { name: name.to_string(), degree, invertible: true }
    }
}

/// Description of a coefficient ring in the supported tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingSpec {
    Integers,
    Rationals,
    PLocalRationals(u64),
    PrimeField(u64),
    ModPrimePower(u64, u32),
    /// F_{p^m} = Z/p[w]/(f); modulus coefficients c_0..c_{m-1} of the monic
    /// f = w^m + sum c_i w^i.
    FiniteField { p: u64, m: u32, modulus: Vec<BigInt> },
    /// Galois ring Z/p^k[w]/(f), f a monic lift of an irreducible mod p.
    GaloisRing { p: u64, k: u32, m: u32, modulus: Vec<BigInt> },
    GradedPolynomial {
        base: Box<RingSpec>,
        gens: Vec<GenSpec>,
        /// Relations in canonical element syntax over the free ring.
        relations: Vec<String>,
        /// Optional total (weighted) degree cap: monomials above it are zero.
        degree_cap: Option<i64>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingError {
    NonPrimeModulus(u64),
    ReducibleModulusPolynomial,
    InhomogeneousRelation(String),
    NonMonicRelation(String),
    DuplicateGenerator(String),
    InvalidParameter(String),
    InfiniteRing,
    NotAUnit,
    RingMismatch,
    UnknownGenerator(String),
    Parse(String),
}

impl fmt::Display for RingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingError::NonPrimeModulus(p) => write!(f, "{} is not prime", p),
            RingError::ReducibleModulusPolynomial => write!(f, "modulus polynomial is reducible"),
            RingError::InhomogeneousRelation(r) => write!(f, "relation is not homogeneous: {}", r),
            RingError::NonMonicRelation(r) => {
                write!(f, "relation has no monic leading monomial: {}", r)
            }
            RingError::DuplicateGenerator(n) => write!(f, "duplicate generator name: {}", n),
            RingError::InvalidParameter(s) => write!(f, "invalid parameter: {}", s),
            RingError::InfiniteRing => write!(f, "ring is not a finite field"),
            RingError::NotAUnit => write!(f, "element is not a unit"),
            RingError::RingMismatch => write!(f, "elements belong to different rings"),
            RingError::UnknownGenerator(n) => write!(f, "unknown generator: {}", n),
            RingError::Parse(s) => write!(f, "parse error: {}", s),
        }
    }
}

impl std::error::Error for RingError {}

/// Exponent vector over the ring's flat generator list, ordered by
/// (total degree, lexicographic), i.e. graded lex on the declared order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mono(pub Box<[i32]>);

impl Mono {
    pub fn empty(n: usize) -> Self {
        Mono(vec![0; n].into_boxed_slice())
    }

    pub fn total(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// self / other if other divides (componentwise, nonnegative rule lead).
    fn div_by(&self, lead: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        for (e, l) in self.0.iter().zip(lead.0.iter()) {
            if l > &0 && e < l {
                return None;
            }
            out.push(e - l);
        }
        Some(Mono(out.into_boxed_slice()))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total().cmp(&other.total()).then_with(|| self.0.cmp(&other.0))
    }
}

type TermMap = BTreeMap<Mono, Scalar>;

#[derive(Clone, Debug)]
struct Rule {
    lead: Mono,
    repl: TermMap,
}

#[derive(Debug)]
struct ExtInfo {
    /// Index of the extension generator in the flat list.
    gen: usize,
    m: u32,
    /// Monic modulus as dense coefficients c_0..c_m (c_m = 1).
    modulus: univar::Poly,
    p: u64,
    k: u32,
}

#[derive(Debug)]
pub struct RingData {
    spec: RingSpec,
    scalar: ScalarKind,
    gens: Vec<GenSpec>,
    ext: Option<ExtInfo>,
    rules: Vec<Rule>,
    degree_cap: Option<i64>,
}

/// Handle to an immutable ring.
#[derive(Clone, Debug)]
pub struct Ring(Arc<RingData>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for Ring {}

/// An exact element of a ring, in canonical normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elem {
    ring: Ring,
    terms: TermMap,
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    // deterministic Miller–Rabin for u64
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    let pow = |mut b: u128, mut e: u64, m: u128| -> u128 {
        let mut acc = 1u128;
        b %= m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % m;
            }
            b = b * b % m;
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if a % n == 0 {
            continue;
        }
        let mut x = pow(a as u128, d, n as u128);
        if x == 1 || x == (n as u128 - 1) {
            continue;
        }
        for _ in 1..s {
            x = x * x % n as u128;
            if x == n as u128 - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Validate a ring description and build a ring handle.
pub fn make_ring(spec: &RingSpec) -> Result<Ring, RingError> {
    match spec {
        RingSpec::Integers => Ok(raw_ring(spec.clone(), ScalarKind::Int, vec![], None, vec![], None)),
        RingSpec::Rationals => {
            Ok(raw_ring(spec.clone(), ScalarKind::Rat { local: None }, vec![], None, vec![], None))
        }
        RingSpec::PLocalRationals(p) => {
            require_prime(*p)?;
            Ok(raw_ring(spec.clone(), ScalarKind::Rat { local: Some(*p) }, vec![], None, vec![], None))
        }
        RingSpec::PrimeField(p) => {
            require_prime(*p)?;
            Ok(raw_ring(spec.clone(), ScalarKind::res(*p, 1), vec![], None, vec![], None))
        }
        RingSpec::ModPrimePower(p, k) => {
            require_prime(*p)?;
            if *k < 1 {
                return Err(RingError::InvalidParameter("K must be >= 1".into()));
            }
            Ok(raw_ring(spec.clone(), ScalarKind::res(*p, *k), vec![], None, vec![], None))
        }
        RingSpec::FiniteField { p, m, modulus } => build_ext_ring(spec, *p, 1, *m, modulus),
        RingSpec::GaloisRing { p, k, m, modulus } => build_ext_ring(spec, *p, *k, *m, modulus),
        RingSpec::GradedPolynomial { base, gens, relations, degree_cap } => {
            let base_ring = make_ring(base)?;
            let free = polynomial_ring(&base_ring, gens.clone())?;
            let free = match degree_cap {
                Some(c) => with_degree_cap(&free, *c),
                None => free,
            };
            let rels: Result<Vec<Elem>, RingError> =
                relations.iter().map(|r| free.parse(r)).collect();
            with_relations(&free, rels?)
        }
    }
}

fn require_prime(p: u64) -> Result<(), RingError> {
    if is_prime_u64(p) {
        Ok(())
    } else {
        Err(RingError::NonPrimeModulus(p))
    }
}

fn raw_ring(
    spec: RingSpec,
    scalar: ScalarKind,
    gens: Vec<GenSpec>,
    ext: Option<ExtInfo>,
    rules: Vec<Rule>,
    degree_cap: Option<i64>,
) -> Ring {
    Ring(Arc::new(RingData { spec, scalar, gens, ext, rules, degree_cap }))
}

fn build_ext_ring(
    spec: &RingSpec,
    p: u64,
    k: u32,
    m: u32,
    modulus: &[BigInt],
) -> Result<Ring, RingError> {
    require_prime(p)?;
    if m < 1 || k < 1 {
        return Err(RingError::InvalidParameter("m and K must be >= 1".into()));
    }
    if modulus.len() != m as usize {
        return Err(RingError::InvalidParameter(format!(
            "modulus must list {} coefficients c_0..c_{}",
            m,
            m - 1
        )));
    }
    // the monic dense polynomial w^m + sum c_i w^i
    let mut dense: univar::Poly = modulus.to_vec();
    dense.push(BigInt::one());
    // reduction mod p must be irreducible
    let pb = BigInt::from(p);
    let red: univar::Poly =
        univar::trim(dense.iter().map(|c| scalar::mod_reduce(c, &pb)).collect());
    if univar::deg(&red) != Some(m as usize) || !univar::is_irreducible_mod_p(&red, p) {
        return Err(RingError::ReducibleModulusPolynomial);
    }
    let sk = ScalarKind::res(p, k);
    let gens = vec![GenSpec::new("w", 0)];
    // rewrite rule: w^m -> -(c_0 + c_1 w + ... + c_{m-1} w^{m-1})
    let mut repl: TermMap = BTreeMap::new();
    let modulus_big = BigInt::from(p).pow(k);
    for (i, c) in modulus.iter().enumerate() {
        let v = scalar::mod_reduce(&-c, &modulus_big);
        if !v.is_zero() {
            repl.insert(Mono(vec![i as i32].into_boxed_slice()), Scalar::Res(v));
        }
    }
    let rules = vec![Rule { lead: Mono(vec![m as i32].into_boxed_slice()), repl }];
    let ext = Some(ExtInfo { gen: 0, m, modulus: dense, p, k });
    Ok(raw_ring(spec.clone(), sk, gens, ext, rules, None))
}

/// Free graded polynomial ring over `base`, flattening the generator lists.
pub fn polynomial_ring(base: &Ring, new_gens: Vec<GenSpec>) -> Result<Ring, RingError> {
    let mut names: Vec<&str> = new_gens.iter().map(|g| g.name.as_str()).collect();
    names.extend(base.0.gens.iter().map(|g| g.name.as_str()));
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(RingError::DuplicateGenerator(n.to_string()));
        }
    }
    let offset = new_gens.len();
    let mut gens = new_gens.clone();
    gens.extend(base.0.gens.iter().cloned());
    // shift the base's rules and ext info to the new indices
    let shift = |m: &Mono| -> Mono {
        let mut v = vec![0i32; gens.len()];
        for (i, e) in m.0.iter().enumerate() {
            v[offset + i] = *e;
        }
        Mono(v.into_boxed_slice())
    };
    let rules = base
        .0
        .rules
        .iter()
        .map(|r| Rule {
            lead: shift(&r.lead),
            repl: r.repl.iter().map(|(m, c)| (shift(m), c.clone())).collect(),
        })
        .collect();
    let ext = base.0.ext.as_ref().map(|e| ExtInfo {
        gen: e.gen + offset,
        m: e.m,
        modulus: e.modulus.clone(),
        p: e.p,
        k: e.k,
    });
    let spec = RingSpec::GradedPolynomial {
        base: Box::new(base.0.spec.clone()),
        gens: new_gens,
        relations: vec![],
        degree_cap: None,
    };
    Ok(raw_ring(spec, base.0.scalar.clone(), gens, ext, rules, base.0.degree_cap))
}

/// Quotient by homogeneous, monic-leading relations (monomial reduction).
pub fn with_relations(ring: &Ring, relations: Vec<Elem>) -> Result<Ring, RingError> {
    let mut rules = ring.0.rules.clone();
    let mut rel_strings = Vec::new();
    for rel in &relations {
        if rel.ring != *ring {
            return Err(RingError::RingMismatch);
        }
        if ring.weighted_degree_checked(rel).is_none() {
            return Err(RingError::InhomogeneousRelation(rel.to_string()));
        }
        rel_strings.push(rel.to_string());
        // leading monomial in the canonical order must be monic
        let Some((lead, c)) = rel.terms.iter().next_back() else {
            continue; // zero relation
        };
        if !c.is_one() {
            return Err(RingError::NonMonicRelation(rel.to_string()));
        }
        if lead.0.iter().any(|&e| e < 0) {
            return Err(RingError::InvalidParameter(
                "relations must not involve negative powers".into(),
            ));
        }
        let mut repl: TermMap = BTreeMap::new();
        for (m, c) in rel.terms.iter() {
            if m == lead {
                continue;
            }
            repl.insert(m.clone(), ring.0.scalar.neg(c));
        }
        rules.push(Rule { lead: lead.clone(), repl });
    }
    let spec = match &ring.0.spec {
        RingSpec::GradedPolynomial { base, gens, relations: old, degree_cap } => {
            let mut all = old.clone();
            all.extend(rel_strings);
            RingSpec::GradedPolynomial {
                base: base.clone(),
                gens: gens.clone(),
                relations: all,
                degree_cap: *degree_cap,
            }
        }
        other => {
            return Err(RingError::InvalidParameter(format!(
                "cannot attach relations to {:?}",
                other
            )))
        }
    };
    Ok(raw_ring(
        spec,
        ring.0.scalar.clone(),
        ring.0.gens.clone(),
        ring.0.ext.as_ref().map(|e| ExtInfo {
            gen: e.gen,
            m: e.m,
            modulus: e.modulus.clone(),
            p: e.p,
            k: e.k,
        }),
        rules,
        ring.0.degree_cap,
    ))
}

/// Same ring with all monomials of weighted degree > cap collapsed to zero.
pub fn with_degree_cap(ring: &Ring, cap: i64) -> Ring {
    let spec = match &ring.0.spec {
        RingSpec::GradedPolynomial { base, gens, relations, .. } => RingSpec::GradedPolynomial {
            base: base.clone(),
            gens: gens.clone(),
            relations: relations.clone(),
            degree_cap: Some(cap),
        },
        other => other.clone(),
    };
    raw_ring(
        spec,
        ring.0.scalar.clone(),
        ring.0.gens.clone(),
        ring.0.ext.as_ref().map(|e| ExtInfo {
            gen: e.gen,
            m: e.m,
            modulus: e.modulus.clone(),
            p: e.p,
            k: e.k,
        }),
        ring.0.rules.clone(),
        Some(cap),
    )
}

/// W(F_{p^m}) truncated at precision p^K: the Galois ring GR(p,K,m), or
/// Z/p^K when m = 1. The modulus is the fixed lift of the canonical
/// irreducible of degree m over F_p.
pub fn witt_ring(p: u64, m: u32, k: u32) -> Result<RingSpec, RingError> {
    require_prime(p)?;
    if m < 1 || k < 1 {
        return Err(RingError::InvalidParameter("m and K must be >= 1".into()));
    }
    if m == 1 {
        return Ok(RingSpec::ModPrimePower(p, k));
    }
    let f = univar::canonical_irreducible(p, m);
    let coeffs: Vec<BigInt> = f[..m as usize].to_vec();
    Ok(RingSpec::GaloisRing { p, k, m, modulus: coeffs })
}

/// The canonical finite field F_{p^m} (canonical modulus), as a spec.
pub fn finite_field_spec(p: u64, m: u32) -> Result<RingSpec, RingError> {
    require_prime(p)?;
    if m == 1 {
        return Ok(RingSpec::PrimeField(p));
    }
    let f = univar::canonical_irreducible(p, m);
    Ok(RingSpec::FiniteField { p, m, modulus: f[..m as usize].to_vec() })
}

fn q_ext_spec(spec: &RingSpec) -> Result<RingSpec, RingError> {
    match spec {
        RingSpec::Integers | RingSpec::Rationals | RingSpec::PLocalRationals(_) => {
            Ok(RingSpec::Rationals)
        }
        RingSpec::GradedPolynomial { base, gens, relations, degree_cap } => {
            Ok(RingSpec::GradedPolynomial {
                base: Box::new(q_ext_spec(base)?),
                gens: gens.clone(),
                relations: relations.clone(),
                degree_cap: *degree_cap,
            })
        }
        other => Err(RingError::InvalidParameter(format!(
            "{} has no rational extension",
            other
        ))),
    }
}

/// The same ring with rational scalars (ℚ-extension of a torsion-free base).
pub fn q_extension(ring: &Ring) -> Result<Ring, RingError> {
    if matches!(ring.scalar_kind(), ScalarKind::Rat { local: None }) {
        return Ok(ring.clone());
    }
    make_ring(&q_ext_spec(ring.spec())?)
}

/// Map an element of a torsion-free scalar ring into its rational extension
/// (or any ring with the same generators and rational scalars).
pub fn to_rational(x: &Elem, target: &Ring) -> Result<Elem, RingError> {
    let images: Vec<Elem> = x
        .ring()
        .gens()
        .iter()
        .map(|g| target.gen(&g.name))
        .collect::<Result<_, _>>()?;
    x.map_into(target, &images, &|c| match c {
        Scalar::Int(v) => Ok(Scalar::Rat(BigRational::from(v.clone()))),
        Scalar::Rat(q) => Ok(Scalar::Rat(q.clone())),
        Scalar::Res(_) => Err(RingError::InvalidParameter(
            "residue scalars have no rational extension".into(),
        )),
    })
}

/// Extended p-adic valuation: None encodes +∞ (only for 0).
pub fn p_valuation(x: &Elem, p: u64) -> Result<Option<i64>, RingError> {
    if x.terms.is_empty() {
        return Ok(None);
    }
    if x.terms.len() != 1 || !x.terms.keys().next().unwrap().is_empty() {
        return Err(RingError::InvalidParameter(
            "p-adic valuation is defined for scalar elements".into(),
        ));
    }
    match x.terms.values().next().unwrap() {
        Scalar::Int(v) => Ok(scalar::p_valuation_int(v, p)),
        Scalar::Rat(v) => Ok(scalar::p_valuation_rat(v, p)),
        Scalar::Res(_) => Err(RingError::InvalidParameter(
            "p-adic valuation needs a characteristic-zero scalar".into(),
        )),
    }
}

impl Ring {
    pub fn spec(&self) -> &RingSpec {
        &self.0.spec
    }

    pub fn scalar_kind(&self) -> &ScalarKind {
        &self.0.scalar
    }

    pub fn gens(&self) -> &[GenSpec] {
        &self.0.gens
    }

    pub fn degree_cap(&self) -> Option<i64> {
        self.0.degree_cap
    }

    /// Characteristic p when the scalar domain is ℤ/p^K with K = 1.
    pub fn char_p(&self) -> Option<u64> {
        match &self.0.scalar {
            ScalarKind::Res { p, k: 1, .. } => Some(*p),
            _ => None,
        }
    }

    /// (p, K) for residue-scalar rings.
    pub fn residue_params(&self) -> Option<(u64, u32)> {
        match &self.0.scalar {
            ScalarKind::Res { p, k, .. } => Some((*p, *k)),
            _ => None,
        }
    }

    /// The prime this ring is local to, when meaningful.
    pub fn local_prime(&self) -> Option<u64> {
        match &self.0.scalar {
            ScalarKind::Res { p, .. } => Some(*p),
            ScalarKind::Rat { local } => *local,
            ScalarKind::Int => None,
        }
    }

    pub fn zero(&self) -> Elem {
        Elem { ring: self.clone(), terms: BTreeMap::new() }
    }

    pub fn one(&self) -> Elem {
        self.from_int(&BigInt::one())
    }

    pub fn from_int(&self, x: &BigInt) -> Elem {
        let c = self.0.scalar.from_int(x);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::empty(self.0.gens.len()), c);
        }
        self.normalized(terms)
    }

    pub fn from_i64(&self, x: i64) -> Elem {
        self.from_int(&BigInt::from(x))
    }

    pub fn from_ratio(&self, num: i64, den: i64) -> Result<Elem, RingError> {
        match &self.0.scalar {
            ScalarKind::Rat { local } => {
                let q = BigRational::new(BigInt::from(num), BigInt::from(den));
                if let Some(p) = local {
                    if scalar::p_valuation_rat(&q, *p).map_or(false, |v| v < 0) {
                        return Err(RingError::InvalidParameter(format!(
                            "{}/{} is not {}-local",
                            num, den, p
                        )));
                    }
                }
                Ok(self.from_scalar(Scalar::Rat(q)))
            }
            _ => {
                let d = self.from_i64(den);
                let dinv = d.inv()?;
                Ok(self.from_i64(num).mul(&dinv))
            }
        }
    }

    pub fn from_scalar(&self, c: Scalar) -> Elem {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::empty(self.0.gens.len()), c);
        }
        self.normalized(terms)
    }

    pub fn gen_index(&self, name: &str) -> Result<usize, RingError> {
        self.0
            .gens
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| RingError::UnknownGenerator(name.to_string()))
    }

    pub fn gen(&self, name: &str) -> Result<Elem, RingError> {
        let i = self.gen_index(name)?;
        let mut e = vec![0i32; self.0.gens.len()];
        e[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(Mono(e.into_boxed_slice()), self.0.scalar.one());
        Ok(self.normalized(terms))
    }

    pub fn monomial(&self, exps: &[i32], c: Scalar) -> Elem {
        assert_eq!(exps.len(), self.0.gens.len());
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono(exps.to_vec().into_boxed_slice()), c);
        }
        self.normalized(terms)
    }

    fn normalized(&self, terms: TermMap) -> Elem {
        let terms = self.normalize_terms(terms);
        Elem { ring: self.clone(), terms }
    }

    fn normalize_terms(&self, terms: TermMap) -> TermMap {
        let mut out: TermMap = BTreeMap::new();
        let mut queue: Vec<(Mono, Scalar)> = terms.into_iter().collect();
        while let Some((m, c)) = queue.pop() {
            if c.is_zero() {
                continue;
            }
            if let Some(cap) = self.0.degree_cap {
                if self.weighted_degree_mono(&m) > cap {
                    continue;
                }
            }
            // find a rewrite rule whose lead divides m
            let mut rewritten = false;
            for rule in &self.0.rules {
                if let Some(rest) = m.div_by(&rule.lead) {
                    for (rm, rc) in &rule.repl {
                        queue.push((rest.mul(rm), self.0.scalar.mul(&c, rc)));
                    }
                    rewritten = true;
                    break;
                }
            }
            if rewritten {
                continue;
            }
            match out.entry(m) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(c);
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let s = self.0.scalar.add(o.get(), &c);
                    if s.is_zero() {
                        o.remove();
                    } else {
                        *o.get_mut() = s;
                    }
                }
            }
        }
        out
    }

    /// Weighted degree of a monomial under the declared grading.
    pub fn weighted_degree_mono(&self, m: &Mono) -> i64 {
        m.0.iter().zip(self.0.gens.iter()).map(|(&e, g)| e as i64 * g.degree).sum()
    }

    /// Some(degree) if the element is homogeneous (0 counts as any degree: None).
    pub fn weighted_degree_checked(&self, x: &Elem) -> Option<Option<i64>> {
        let mut deg = None;
        for m in x.terms.keys() {
            let d = self.weighted_degree_mono(m);
            match deg {
                None => deg = Some(d),
                Some(d0) if d0 != d => return None,
                _ => {}
            }
        }
        Some(deg)
    }

    pub fn parse(&self, input: &str) -> Result<Elem, RingError> {
        parse_elem(self, input)
    }
}

impl Elem {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map_or(false, |(m, c)| m.is_empty() && c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The scalar coefficient of the empty monomial.
    pub fn constant_scalar(&self) -> Scalar {
        self.terms
            .iter()
            .find(|(m, _)| m.is_empty())
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| self.ring.0.scalar.zero())
    }

    /// Whether the element is a scalar (no generator appears).
    pub fn is_scalar(&self) -> bool {
        self.terms.keys().all(|m| m.is_empty())
    }

    pub fn add(&self, other: &Elem) -> Elem {
        assert_eq!(self.ring, other.ring, "ring mismatch");
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            match terms.entry(m.clone()) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(c.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let s = self.ring.0.scalar.add(o.get(), c);
                    if s.is_zero() {
                        o.remove();
                    } else {
                        *o.get_mut() = s;
                    }
                }
            }
        }
        // addition cannot create reducible monomials, but the cap may apply
        Elem { ring: self.ring.clone(), terms }
    }

    pub fn neg(&self) -> Elem {
        let terms =
            self.terms.iter().map(|(m, c)| (m.clone(), self.ring.0.scalar.neg(c))).collect();
        Elem { ring: self.ring.clone(), terms }
    }

    pub fn sub(&self, other: &Elem) -> Elem {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Elem) -> Elem {
        assert_eq!(self.ring, other.ring, "ring mismatch");
        let mut terms: TermMap = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = m1.mul(m2);
                if let Some(cap) = self.ring.0.degree_cap {
                    if self.ring.weighted_degree_mono(&m) > cap {
                        continue;
                    }
                }
                let c = self.ring.0.scalar.mul(c1, c2);
                if c.is_zero() {
                    continue;
                }
                match terms.entry(m) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        let s = self.ring.0.scalar.add(o.get(), &c);
                        if s.is_zero() {
                            o.remove();
                        } else {
                            *o.get_mut() = s;
                        }
                    }
                }
            }
        }
        self.ring.normalized(terms)
    }

    pub fn scale(&self, c: &Scalar) -> Elem {
        if c.is_zero() {
            return self.ring.zero();
        }
        let terms =
            self.terms.iter().map(|(m, v)| (m.clone(), self.ring.0.scalar.mul(v, c))).collect();
        self.ring.normalized(terms)
    }

    pub fn pow(&self, e: u32) -> Elem {
        let mut acc = self.ring.one();
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

    pub fn is_unit(&self) -> bool {
        self.inv().is_ok()
    }

    /// Exact inverse of a unit.
    pub fn inv(&self) -> Result<Elem, RingError> {
        let ring = &self.ring;
        if self.is_zero() {
            return Err(RingError::NotAUnit);
        }
        // pure scalar
        if self.is_scalar() {
            let c = self.constant_scalar();
            let i = ring.0.scalar.inv(&c).ok_or(RingError::NotAUnit)?;
            return Ok(ring.from_scalar(i));
        }
        // single term: unit scalar times an invertible monomial
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            let non_ext_ok = m.0.iter().enumerate().all(|(i, &e)| {
                e == 0
                    || ring.0.gens[i].invertible
                    || ring.0.ext.as_ref().map_or(false, |x| x.gen == i)
            });
            if non_ext_ok {
                let cinv = ring.0.scalar.inv(c).ok_or(RingError::NotAUnit)?;
                // invert the extension-generator part via the univariate engine
                let mut exps: Vec<i32> = vec![0; m.0.len()];
                let mut acc = ring.from_scalar(cinv);
                for (i, &e) in m.0.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    if ring.0.gens[i].invertible {
                        exps[i] = -e;
                    } else {
                        // ext generator with positive power
                        let x = ring.0.ext.as_ref().unwrap();
                        let winv = ext_elem_inverse(ring, x, &w_power_elem(ring, x, 1))?;
                        acc = acc.mul(&winv.pow(e as u32));
                    }
                }
                let mono = ring.monomial(&exps, ring.0.scalar.one());
                return Ok(acc.mul(&mono));
            }
            return Err(RingError::NotAUnit);
        }
        // multi-term: allowed when only the extension generator appears
        if let Some(x) = ring.0.ext.as_ref() {
            if self.terms.keys().all(|m| {
                m.0.iter().enumerate().all(|(i, &e)| e == 0 || (i == x.gen && e > 0))
            }) {
                return ext_elem_inverse(ring, x, self);
            }
        }
        Err(RingError::NotAUnit)
    }

    /// a / b when b is a unit, or when b is scalar and divides every
    /// coefficient exactly.
    pub fn div_exact(&self, other: &Elem) -> Option<Elem> {
        if let Ok(i) = other.inv() {
            return Some(self.mul(&i));
        }
        if other.is_scalar() && !other.is_zero() {
            let c = other.constant_scalar();
            let mut terms = BTreeMap::new();
            for (m, v) in &self.terms {
                let q = self.ring.0.scalar.div_exact(v, &c)?;
                terms.insert(m.clone(), q);
            }
            return Some(Elem { ring: self.ring.clone(), terms });
        }
        None
    }

    /// Substitute ring generators by elements of `target`; scalars are
    /// converted with `conv`.
    pub fn map_into(
        &self,
        target: &Ring,
        images: &[Elem],
        conv: &dyn Fn(&Scalar) -> Result<Scalar, RingError>,
    ) -> Result<Elem, RingError> {
        assert_eq!(images.len(), self.ring.0.gens.len());
        let mut acc = target.zero();
        for (m, c) in &self.terms {
            let mut t = target.from_scalar(conv(c)?);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let img = if e > 0 { images[i].clone() } else { images[i].inv()? };
                t = t.mul(&img.pow(e.unsigned_abs()));
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }
}

fn w_power_elem(ring: &Ring, x: &ExtInfo, e: i32) -> Elem {
    let mut exps = vec![0i32; ring.0.gens.len()];
    exps[x.gen] = e;
    ring.monomial(&exps, ring.0.scalar.one())
}

/// Inverse of an element supported only on powers of the extension generator.
fn ext_elem_inverse(ring: &Ring, x: &ExtInfo, e: &Elem) -> Result<Elem, RingError> {
    let mut dense: univar::Poly = vec![BigInt::zero(); x.m as usize];
    for (m, c) in &e.terms {
        let pw = m.0[x.gen] as usize;
        let Scalar::Res(v) = c else { return Err(RingError::NotAUnit) };
        dense[pw] = v.clone();
    }
    let inv = univar::inverse_mod(&univar::trim(dense), &x.modulus, x.p, x.k)
        .ok_or(RingError::NotAUnit)?;
    let mut out = ring.zero();
    for (i, c) in inv.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        out = out.add(&w_power_elem(ring, x, i as i32).scale(&Scalar::Res(c.clone())));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// rendering
// ---------------------------------------------------------------------------

fn scalar_to_string(c: &Scalar) -> String {
    match c {
        Scalar::Int(x) => x.to_string(),
        Scalar::Rat(x) => {
            if x.denom().is_one() {
                x.numer().to_string()
            } else {
                format!("{}/{}", x.numer(), x.denom())
            }
        }
        Scalar::Res(x) => x.to_string(),
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        // canonical order, leading (largest) term first
        for (m, c) in self.terms.iter().rev() {
            let neg = match c {
                Scalar::Int(x) => x.is_negative(),
                Scalar::Rat(x) => x.is_negative(),
                Scalar::Res(_) => false,
            };
            let abs = if neg { self.ring.0.scalar.neg(c) } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            if m.is_empty() || !abs.is_one() {
                parts.push(scalar_to_string(&abs));
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if e == 1 {
                    parts.push(self.ring.0.gens[i].name.clone());
                } else {
                    parts.push(format!("{}^{}", self.ring.0.gens[i].name, e));
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Integers => write!(f, "ZZ"),
            RingSpec::Rationals => write!(f, "QQ"),
            RingSpec::PLocalRationals(p) => write!(f, "Z_({})", p),
            RingSpec::PrimeField(p) => write!(f, "GF({})", p),
            RingSpec::ModPrimePower(p, k) => write!(f, "Z/{}^{}", p, k),
            RingSpec::FiniteField { p, m, modulus } => {
                write!(f, "GF({},{};{})", p, m, poly_string(modulus, *m))
            }
            RingSpec::GaloisRing { p, k, m, modulus } => {
                write!(f, "GR({},{},{};{})", p, k, m, poly_string(modulus, *m))
            }
            RingSpec::GradedPolynomial { base, gens, relations, degree_cap } => {
                let gs: Vec<String> = gens
                    .iter()
                    .map(|g| {
                        if g.invertible {
                            format!("{}:{}:inv", g.name, g.degree)
                        } else {
                            format!("{}:{}", g.name, g.degree)
                        }
                    })
                    .collect();
                write!(f, "poly({}; gens={}", base, gs.join(","))?;
                if !relations.is_empty() {
                    write!(f, "; rels={}", relations.join(","))?;
                }
                if let Some(c) = degree_cap {
                    write!(f, "; cap={}", c)?;
                }
                write!(f, ")")
            }
        }
    }
}

fn poly_string(coeffs: &[BigInt], m: u32) -> String {
    let mut parts = vec![format!("w^{}", m)];
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let var = match i {
            0 => String::new(),
            1 => "w".to_string(),
            _ => format!("w^{}", i),
        };
        if var.is_empty() {
            parts.push(c.to_string());
        } else if c.is_one() {
            parts.push(var);
        } else {
            parts.push(format!("{}*{}", c, var));
        }
    }
    parts.join("+")
}

// ---------------------------------------------------------------------------
// element parsing
// ---------------------------------------------------------------------------

fn parse_elem(ring: &Ring, input: &str) -> Result<Elem, RingError> {
    let mut acc = ring.zero();
    let s = input.trim();
    if s.is_empty() {
        return Err(RingError::Parse("empty element".into()));
    }
    let mut rest = s;
    let mut sign = 1i64;
    // leading sign
    if let Some(r) = rest.strip_prefix('-') {
        sign = -1;
        rest = r.trim_start();
    } else if let Some(r) = rest.strip_prefix('+') {
        rest = r.trim_start();
    }
    loop {
        // find the end of this term: a top-level '+' or '-' not inside an exponent
        let mut end = rest.len();
        let mut prev_char = ' ';
        for (i, ch) in rest.char_indices() {
            if (ch == '+' || ch == '-') && prev_char != '^' && prev_char != '*' && i > 0 {
                end = i;
                break;
            }
            if !ch.is_whitespace() {
                prev_char = ch;
            }
        }
        let term = rest[..end].trim();
        acc = acc.add(&parse_term(ring, term, sign)?);
        if end == rest.len() {
            break;
        }
        sign = if rest.as_bytes()[end] == b'-' { -1 } else { 1 };
        rest = rest[end + 1..].trim_start();
        if rest.is_empty() {
            return Err(RingError::Parse("dangling sign".into()));
        }
    }
    Ok(acc)
}

fn parse_term(ring: &Ring, term: &str, sign: i64) -> Result<Elem, RingError> {
    let mut coef_num: Option<BigInt> = None;
    let mut coef_den: Option<BigInt> = None;
    let mut exps = vec![0i32; ring.0.gens.len()];
    for factor in term.split('*') {
        let factor = factor.trim();
        if factor.is_empty() {
            return Err(RingError::Parse(format!("empty factor in term '{}'", term)));
        }
        if factor.chars().next().unwrap().is_ascii_digit() {
            // integer or fraction
            if let Some((n, d)) = factor.split_once('/') {
                let n: BigInt =
                    n.trim().parse().map_err(|_| RingError::Parse(format!("bad number {}", n)))?;
                let d: BigInt =
                    d.trim().parse().map_err(|_| RingError::Parse(format!("bad number {}", d)))?;
                coef_num = Some(coef_num.unwrap_or_else(BigInt::one) * n);
                coef_den = Some(coef_den.unwrap_or_else(BigInt::one) * d);
            } else {
                let n: BigInt = factor
                    .parse()
                    .map_err(|_| RingError::Parse(format!("bad number {}", factor)))?;
                coef_num = Some(coef_num.unwrap_or_else(BigInt::one) * n);
            }
        } else {
            let (name, exp) = match factor.split_once('^') {
                Some((n, e)) => {
                    let e: i32 = e
                        .trim()
                        .parse()
                        .map_err(|_| RingError::Parse(format!("bad exponent in {}", factor)))?;
                    (n.trim(), e)
                }
                None => (factor, 1),
            };
            let i = ring.gen_index(name)?;
            exps[i] += exp;
        }
    }
    let num = coef_num.unwrap_or_else(BigInt::one) * BigInt::from(sign);
    let c = match (&ring.0.scalar, coef_den) {
        (ScalarKind::Rat { local }, den) => {
            let q = BigRational::new(num, den.unwrap_or_else(BigInt::one));
            if let Some(p) = local {
                if scalar::p_valuation_rat(&q, *p).map_or(false, |v| v < 0) {
                    return Err(RingError::Parse(format!("{} is not {}-local", q, p)));
                }
            }
            Scalar::Rat(q)
        }
        (k, None) => k.from_int(&num),
        (_, Some(_)) => {
            return Err(RingError::Parse("fraction in a non-rational ring".into()));
        }
    };
    Ok(ring.monomial(&exps, c))
}

// ---------------------------------------------------------------------------
// finite-field enumeration and embeddings
// ---------------------------------------------------------------------------

/// All elements of a prime or finite field, in degree-then-coefficient
/// lexicographic order (leading coefficient compared first within a degree).
pub fn enumerate_field(ring: &Ring) -> Result<Vec<Elem>, RingError> {
    match &ring.0.spec {
        RingSpec::PrimeField(p) => {
            Ok((0..*p).map(|i| ring.from_int(&BigInt::from(i))).collect())
        }
        RingSpec::FiniteField { p, m, .. } => {
            let x = ring.0.ext.as_ref().expect("finite field has an extension generator");
            let mut out = vec![ring.zero()];
            for d in 0..*m as usize {
                // polynomials of exact degree d: leading coeff 1..p-1, rest free
                let mut stack: Vec<Vec<u64>> = vec![vec![]];
                // enumerate coefficient tuples (c_d, c_{d-1}, ..., c_0) lexicographically
                fn rec(
                    ring: &Ring,
                    x: &ExtInfo,
                    d: usize,
                    p: u64,
                    prefix: &mut Vec<u64>,
                    out: &mut Vec<Elem>,
                ) {
                    if prefix.len() == d + 1 {
                        let mut e = ring.zero();
                        for (j, &c) in prefix.iter().enumerate() {
                            if c != 0 {
                                let pw = w_power_elem(ring, x, (d - j) as i32);
                                e = e.add(&pw.scale(&Scalar::Res(BigInt::from(c))));
                            }
                        }
                        out.push(e);
                        return;
                    }
                    let lo = if prefix.is_empty() { 1 } else { 0 };
                    for c in lo..p {
                        prefix.push(c);
                        rec(ring, x, d, p, prefix, out);
                        prefix.pop();
                    }
                }
                let mut prefix = Vec::new();
                rec(ring, x, d, *p, &mut prefix, &mut out);
                stack.clear();
            }
            Ok(out)
        }
        _ => Err(RingError::InfiniteRing),
    }
}

/// Reduction Z/p^K -> Z/p on scalars, extended coefficient-wise; maps the
/// Galois ring onto its residue field and Z/p^K onto GF(p).
pub fn reduce_mod_p(x: &Elem, target: &Ring) -> Result<Elem, RingError> {
    let (p_src, _) = x.ring().residue_params().ok_or(RingError::RingMismatch)?;
    let (p_tgt, k_tgt) = target.residue_params().ok_or(RingError::RingMismatch)?;
    if p_src != p_tgt {
        return Err(RingError::RingMismatch);
    }
    let modulus = BigInt::from(p_tgt).pow(k_tgt);
    let images: Vec<Elem> = x
        .ring()
        .gens()
        .iter()
        .map(|g| target.gen(&g.name))
        .collect::<Result<_, _>>()?;
    x.map_into(target, &images, &|c| match c {
        Scalar::Res(v) => Ok(Scalar::Res(scalar::mod_reduce(v, &modulus))),
        _ => Err(RingError::RingMismatch),
    })
}

/// Map an element of a characteristic-zero scalar ring into a residue ring
/// (p-local rationals map via a·b^{-1} mod p^K; fails on non-p-local input).
pub fn to_residue(x: &Elem, target: &Ring) -> Result<Elem, RingError> {
    let (p, k) = target.residue_params().ok_or(RingError::RingMismatch)?;
    let modulus = BigInt::from(p).pow(k);
    let images: Vec<Elem> = x
        .ring()
        .gens()
        .iter()
        .map(|g| target.gen(&g.name))
        .collect::<Result<_, _>>()?;
    x.map_into(target, &images, &|c| match c {
        Scalar::Int(v) => Ok(Scalar::Res(scalar::mod_reduce(v, &modulus))),
        Scalar::Rat(q) => {
            let d = scalar::mod_reduce(q.denom(), &modulus);
            let dinv = scalar::mod_inverse(&d, &modulus).ok_or_else(|| {
                RingError::InvalidParameter(format!("denominator {} is not a unit mod {}^{}", q.denom(), p, k))
            })?;
            Ok(Scalar::Res(scalar::mod_reduce(&(q.numer() * dinv), &modulus)))
        }
        Scalar::Res(v) => Ok(Scalar::Res(scalar::mod_reduce(v, &modulus))),
    })
}

/// Embed a prime field or smaller finite field into F_{p^m}; the image of w
/// is the first root (in enumeration order) of the source modulus.
pub fn embed_field(x: &Elem, target: &Ring) -> Result<Elem, RingError> {
    match (&x.ring().0.spec, &target.0.spec) {
        (RingSpec::PrimeField(p), RingSpec::PrimeField(q)) if p == q => {
            Ok(target.from_scalar(x.constant_scalar()))
        }
        (RingSpec::PrimeField(p), RingSpec::FiniteField { p: q, .. }) if p == q => {
            Ok(target.from_scalar(x.constant_scalar()))
        }
        (RingSpec::FiniteField { p, m: m1, modulus }, RingSpec::FiniteField { p: q, m: m2, .. })
            if p == q && m2 % m1 == 0 =>
        {
            let root = modulus_root(modulus, target)?;
            let images = vec![root];
            x.map_into(target, &images, &|c| Ok(c.clone()))
        }
        _ => Err(RingError::RingMismatch),
    }
}

fn modulus_root(modulus: &[BigInt], target: &Ring) -> Result<Elem, RingError> {
    for cand in enumerate_field(target)? {
        // evaluate w^m + sum c_i w^i at cand
        let mut acc = cand.pow(modulus.len() as u32);
        for (i, c) in modulus.iter().enumerate() {
            let term = cand.pow(i as u32).scale(&Scalar::Res(c.clone()));
            acc = acc.add(&term);
        }
        if acc.is_zero() {
            return Ok(cand);
        }
    }
    Err(RingError::InvalidParameter("modulus has no root in the target field".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let r = make_ring(&RingSpec::PrimeField(5)).unwrap();
        let a = r.from_i64(2);
        let b = r.from_i64(4);
        assert_eq!(a.add(&b), r.from_i64(1));
    }

    #[test]
    fn finite_field_f4() {
        let spec = finite_field_spec(2, 2).unwrap();
        let r = make_ring(&spec).unwrap();
        let w = r.gen("w").unwrap();
        // w*w = w + 1
        let w2 = w.mul(&w);
        assert_eq!(w2, w.add(&r.one()));
        assert_eq!(format!("{}", w2), "w + 1");
    }

    #[test]
    fn mod_prime_power() {
        let r = make_ring(&RingSpec::ModPrimePower(2, 5)).unwrap();
        assert_eq!(r.from_i64(7).mul(&r.from_i64(5)), r.from_i64(3));
    }

    #[test]
    fn non_prime_rejected() {
        assert_eq!(
            make_ring(&RingSpec::PrimeField(4)).unwrap_err(),
            RingError::NonPrimeModulus(4)
        );
    }

    #[test]
    fn reducible_modulus_rejected() {
        // w^2 + 1 is reducible mod 2
        let spec = RingSpec::FiniteField { p: 2, m: 2, modulus: vec![BigInt::one(), BigInt::zero()] };
        assert_eq!(make_ring(&spec).unwrap_err(), RingError::ReducibleModulusPolynomial);
    }

    #[test]
    fn witt_ring_squares() {
        // (1+2w)^2 = 1 in Z/4[w]/(w^2+w+1)
        let spec = witt_ring(2, 2, 2).unwrap();
        let r = make_ring(&spec).unwrap();
        let x = r.one().add(&r.gen("w").unwrap().scale(&Scalar::Res(BigInt::from(2))));
        assert_eq!(x.mul(&x), r.one());
    }

    #[test]
    fn witt_is_zpk_for_m1() {
        assert_eq!(witt_ring(3, 1, 4).unwrap(), RingSpec::ModPrimePower(3, 4));
    }

    #[test]
    fn galois_reduction() {
        let spec = witt_ring(2, 2, 3).unwrap();
        let gr = make_ring(&spec).unwrap();
        let ff = make_ring(&finite_field_spec(2, 2).unwrap()).unwrap();
        let w = gr.gen("w").unwrap();
        let img = reduce_mod_p(&w, &ff).unwrap();
        assert_eq!(img, ff.gen("w").unwrap());
        // reduction is a ring map on a sample product
        let a = w.mul(&w).add(&gr.from_i64(3));
        let got = reduce_mod_p(&a, &ff).unwrap();
        let expect = img.mul(&img).add(&ff.from_i64(3));
        assert_eq!(got, expect);
    }

    #[test]
    fn enumerate_orders() {
        let f3 = make_ring(&RingSpec::PrimeField(3)).unwrap();
        let e: Vec<String> = enumerate_field(&f3).unwrap().iter().map(|x| x.to_string()).collect();
        assert_eq!(e, vec!["0", "1", "2"]);
        let f4 = make_ring(&finite_field_spec(2, 2).unwrap()).unwrap();
        assert_eq!(enumerate_field(&f4).unwrap().len(), 4);
        let f9 = make_ring(&finite_field_spec(3, 2).unwrap()).unwrap();
        assert_eq!(enumerate_field(&f9).unwrap().len(), 9);
        assert!(enumerate_field(&make_ring(&RingSpec::Integers).unwrap()).is_err());
    }

    #[test]
    fn p_valuations() {
        let q = make_ring(&RingSpec::Rationals).unwrap();
        let x = q.from_ratio(9, 2).unwrap();
        assert_eq!(p_valuation(&x, 3).unwrap(), Some(2));
        assert_eq!(p_valuation(&q.one(), 5).unwrap(), Some(0));
        assert_eq!(p_valuation(&q.zero(), 5).unwrap(), None);
    }

    #[test]
    fn polynomial_rings_and_relations() {
        let z = make_ring(&RingSpec::Integers).unwrap();
        let r = polynomial_ring(&z, vec![GenSpec::new("u1", 1), GenSpec::new("u2", 3)]).unwrap();
        let u1 = r.gen("u1").unwrap();
        let u2 = r.gen("u2").unwrap();
        let x = u1.pow(3).add(&u2.scale(&Scalar::Int(BigInt::from(2))));
        assert_eq!(format!("{}", x), "u1^3 + 2*u2");
        // homogeneous: deg u1^3 = 3 = deg u2
        assert_eq!(r.weighted_degree_checked(&x), Some(Some(3)));
        // quotient by u1^2 = 0
        let quo = with_relations(&r, vec![u1.pow(2)]).unwrap();
        let u1q = quo.gen("u1").unwrap();
        assert!(u1q.pow(2).is_zero());
        assert!(!u1q.is_zero());
    }

    #[test]
    fn artin_schreier_relation() {
        // F_3[a]/(a^3 - a): a^3 rewrites to a (degree 0, so the relation is homogeneous)
        let f3 = make_ring(&RingSpec::PrimeField(3)).unwrap();
        let r = polynomial_ring(&f3, vec![GenSpec::new("a", 0)]).unwrap();
        let a = r.gen("a").unwrap();
        let rel = a.pow(3).sub(&a);
        let quo = with_relations(&r, vec![rel]).unwrap();
        let aq = quo.gen("a").unwrap();
        assert_eq!(aq.pow(4), aq.pow(2));
    }

    #[test]
    fn laurent_generators() {
        let z = make_ring(&RingSpec::Integers).unwrap();
        let r = polynomial_ring(&z, vec![GenSpec::laurent("t", 1)]).unwrap();
        let t = r.gen("t").unwrap();
        let tinv = t.inv().unwrap();
        assert!(t.mul(&tinv).is_one());
    }

    #[test]
    fn parse_round_trip() {
        let q = make_ring(&RingSpec::PLocalRationals(3)).unwrap();
        let r = polynomial_ring(&q, vec![GenSpec::new("u1", 2), GenSpec::new("u2", 8)]).unwrap();
        let x = r.parse("1/2*u1^3 - u2 + 4").unwrap();
        let s = x.to_string();
        let y = r.parse(&s).unwrap();
        assert_eq!(x, y);
        assert!(r.parse("1/3*u1").is_err()); // not 3-local
    }

    #[test]
    fn normalization_idempotent() {
        let f4 = make_ring(&finite_field_spec(2, 2).unwrap()).unwrap();
        let w = f4.gen("w").unwrap();
        let x = w.pow(5).add(&w.pow(2)); // reduces
        let y = x.add(&f4.zero());
        assert_eq!(x, y);
    }

    #[test]
    fn degree_cap() {
        let z = make_ring(&RingSpec::Integers).unwrap();
        let r = polynomial_ring(&z, vec![GenSpec::new("u", 2)]).unwrap();
        let r = with_degree_cap(&r, 5);
        let u = r.gen("u").unwrap();
        assert!(u.pow(3).is_zero()); // degree 6 > 5
        assert!(!u.pow(2).is_zero());
    }

    #[test]
    fn field_embedding() {
        let f2 = make_ring(&RingSpec::PrimeField(2)).unwrap();
        let f4 = make_ring(&finite_field_spec(2, 2).unwrap()).unwrap();
        let one = embed_field(&f2.one(), &f4).unwrap();
        assert!(one.is_one());
    }

    #[test]
    fn ring_axioms_randomized() {
        // lightweight deterministic sweep over a few rings and triples
        let rings = vec![
            make_ring(&RingSpec::Integers).unwrap(),
            make_ring(&RingSpec::PrimeField(5)).unwrap(),
            make_ring(&finite_field_spec(2, 3).unwrap()).unwrap(),
            make_ring(&witt_ring(3, 2, 2).unwrap()).unwrap(),
        ];
        for r in rings {
            let mut vals = vec![r.from_i64(3), r.from_i64(-2), r.from_i64(7)];
            if r.gen("w").is_ok() {
                vals.push(r.gen("w").unwrap().add(&r.from_i64(1)));
            }
            for a in &vals {
                for b in &vals {
                    for c in &vals {
                        let ab_c = a.mul(b).mul(c);
                        let a_bc = a.mul(&b.mul(c));
                        assert_eq!(ab_c, a_bc);
                        let dist = a.mul(&b.add(c));
                        let dist2 = a.mul(b).add(&a.mul(c));
                        assert_eq!(dist, dist2);
                        assert_eq!(a.mul(b), b.mul(a));
                    }
                }
            }
        }
    }
}
