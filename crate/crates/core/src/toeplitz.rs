//! Exact computation in the dense *-subalgebra of the Toeplitz algebra.
//!
//! Elements are kept in generator normal form: finite combinations of
//! `T[α,β]` with `src(α) = src(β)`, where `T[α,β]` acts on the Fock module
//! by `δ_{β·z} ↦ δ_{α·z}`. On a path-category system the product of two
//! generators is again a single generator or zero, governed by unique
//! factorization, so the normal form is closed under multiplication,
//! involution and the gauge grading. Since distinct generators have
//! linearly independent Fock matrices, term-map equality decides equality
//! in the dense subalgebra.
//!
//! [`evaluate_on_fock`] is the independent matrix oracle: it implements the
//! defining action directly on the truncated Fock basis, without using the
//! generator product rule.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graded_graph::{ArrowId, GradedSystem, GraphError};
use crate::scalar::Scalar;

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum ToeplitzError {
    #[error("operation requires a path-category system")]
    NotPathCategory,
    #[error("system fails validation")]
    InvalidSystem,
    #[error("degree {degree} exceeds the cap {cap}")]
    CapExceeded { degree: u32, cap: u32 },
    #[error("degree order violated: {j} > {k}")]
    DegreeOrder { j: u32, k: u32 },
    #[error("arrows have different sources")]
    SourceMismatch,
}

fn path_category_guard(sys: &GradedSystem) -> Result<(), ToeplitzError> {
    match sys.path_verdict() {
        Ok(v) if v.is_path_category => Ok(()),
        Ok(_) => Err(ToeplitzError::NotPathCategory),
        Err(GraphError::InvalidSystem(_)) => Err(ToeplitzError::InvalidSystem),
        Err(_) => Err(ToeplitzError::NotPathCategory),
    }
}

/// A generator `T[α,β]`; meaningful when `src(α) = src(β)`.
///
/// Ordering follows the arrow id order, which is the canonical
/// `(degree, name)` order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Generator {
    pub alpha: ArrowId,
    pub beta: ArrowId,
}

impl Generator {
    /// Gauge degree `deg(α) − deg(β)`.
    pub fn gauge_degree(&self, sys: &GradedSystem) -> i64 {
        sys.degree(self.alpha) as i64 - sys.degree(self.beta) as i64
    }
}

/// An element of the dense *-subalgebra in generator normal form.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ToeplitzElement {
    terms: BTreeMap<Generator, Scalar>,
}

impl ToeplitzElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, g: Generator, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        let entry = self.terms.entry(g).or_insert_with(Scalar::zero);
        *entry += s;
        if entry.is_zero() {
            self.terms.remove(&g);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Generator, &Scalar)> + '_ {
        self.terms.iter().map(|(g, s)| (*g, s))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = ToeplitzElement::zero();
        for (g, c) in self.iter() {
            out.add_term(g, &(s * c));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in other.iter() {
            out.add_term(g, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    /// Largest path degree appearing among the generators.
    pub fn max_path_degree(&self, sys: &GradedSystem) -> u32 {
        self.terms
            .keys()
            .map(|g| sys.degree(g.alpha).max(sys.degree(g.beta)))
            .max()
            .unwrap_or(0)
    }

    pub fn render(&self, sys: &GradedSystem) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(g, s)| {
                format!(
                    "({})·T[{},{}]",
                    s,
                    sys.arrow_name(g.alpha),
                    sys.arrow_name(g.beta)
                )
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Result of [`make_generator`]: source-mismatched pairs denote the zero
/// rank-one operator, flagged rather than rejected.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BuiltGenerator {
    pub element: ToeplitzElement,
    pub source_mismatch: bool,
}

/// The singleton element `T[α,β]`. When `src(α) != src(β)` the rank-one
/// operator `|δ_α⟩⟨δ_β|` is zero, and the zero element is returned with the
/// flag set.
pub fn make_generator(sys: &GradedSystem, alpha: ArrowId, beta: ArrowId) -> BuiltGenerator {
    if sys.src(alpha) != sys.src(beta) {
        return BuiltGenerator {
            element: ToeplitzElement::zero(),
            source_mismatch: true,
        };
    }
    let mut element = ToeplitzElement::zero();
    element.add_term(Generator { alpha, beta }, &Scalar::one());
    BuiltGenerator {
        element,
        source_mismatch: false,
    }
}

/// Generator product by unique factorization:
/// `T[α,β]·T[γ,δ] = T[α·ε, δ]` if `γ = β·ε`, `T[α, δ·ε]` if `β = γ·ε`,
/// and zero otherwise.
fn multiply_generators(
    sys: &GradedSystem,
    a: Generator,
    b: Generator,
) -> Result<Option<Generator>, ToeplitzError> {
    let (beta, gamma) = (a.beta, b.alpha);
    let db = sys.degree(beta);
    let dg = sys.degree(gamma);
    if db <= dg {
        // γ = β·ε?
        let Some(eps) = sys.factor_by_prefix(gamma, beta) else {
            return Ok(None);
        };
        let new_deg = sys.degree(a.alpha) + sys.degree(eps);
        if new_deg > sys.cap() {
            return Err(ToeplitzError::CapExceeded {
                degree: new_deg,
                cap: sys.cap(),
            });
        }
        let alpha = sys
            .compose(a.alpha, eps)
            .expect("src(α)=src(β)=rng(ε) and degree fits, so the composite exists");
        Ok(Some(Generator {
            alpha,
            beta: b.beta,
        }))
    } else {
        // β = γ·ε?
        let Some(eps) = sys.factor_by_prefix(beta, gamma) else {
            return Ok(None);
        };
        let new_deg = sys.degree(b.beta) + sys.degree(eps);
        if new_deg > sys.cap() {
            return Err(ToeplitzError::CapExceeded {
                degree: new_deg,
                cap: sys.cap(),
            });
        }
        let beta = sys
            .compose(b.beta, eps)
            .expect("src(γ)=src(δ)=rng(ε) and degree fits, so the composite exists");
        Ok(Some(Generator {
            alpha: a.alpha,
            beta,
        }))
    }
}

/// Bilinear product in normal form. Requires the path-category property;
/// fails with `CapExceeded` when a product generator would leave the
/// truncated degree range.
pub fn multiply(
    sys: &GradedSystem,
    x: &ToeplitzElement,
    y: &ToeplitzElement,
) -> Result<ToeplitzElement, ToeplitzError> {
    path_category_guard(sys)?;
    let matched = |g: &Generator| sys.src(g.alpha) == sys.src(g.beta);
    let mut out = ToeplitzElement::zero();
    for (a, ca) in x.iter() {
        if !matched(&a) {
            continue; // a mismatched pair denotes the zero operator
        }
        for (b, cb) in y.iter() {
            if !matched(&b) {
                continue;
            }
            if let Some(g) = multiply_generators(sys, a, b)? {
                out.add_term(g, &(ca * cb));
            }
        }
    }
    Ok(out)
}

/// The involution: `T[α,β] ↦ T[β,α]` with conjugated coefficients.
pub fn adjoint(x: &ToeplitzElement) -> ToeplitzElement {
    let mut out = ToeplitzElement::zero();
    for (g, s) in x.iter() {
        out.add_term(
            Generator {
                alpha: g.beta,
                beta: g.alpha,
            },
            &s.conj(),
        );
    }
    out
}

/// The gauge spectral projection: keeps the terms of gauge degree `k`.
pub fn spectral_project(sys: &GradedSystem, x: &ToeplitzElement, k: i64) -> ToeplitzElement {
    let mut out = ToeplitzElement::zero();
    for (g, s) in x.iter() {
        if g.gauge_degree(sys) == k {
            out.add_term(g, s);
        }
    }
    out
}

/// The gauge degrees present in an element, ascending.
pub fn gauge_support(sys: &GradedSystem, x: &ToeplitzElement) -> Vec<i64> {
    let mut ds: Vec<i64> = x.iter().map(|(g, _)| g.gauge_degree(sys)).collect();
    ds.sort_unstable();
    ds.dedup();
    ds
}

/// A sparse matrix over the truncated Fock basis (rows and columns are
/// arrow ids of degree `<= trunc`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FockMatrix {
    trunc: u32,
    entries: BTreeMap<(ArrowId, ArrowId), Scalar>,
}

impl FockMatrix {
    pub fn zero(trunc: u32) -> Self {
        FockMatrix {
            trunc,
            entries: BTreeMap::new(),
        }
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add_entry(&mut self, row: ArrowId, col: ArrowId, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        let entry = self.entries.entry((row, col)).or_insert_with(Scalar::zero);
        *entry += s;
        if entry.is_zero() {
            self.entries.remove(&(row, col));
        }
    }

    pub fn entry(&self, row: ArrowId, col: ArrowId) -> Scalar {
        self.entries
            .get(&(row, col))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((ArrowId, ArrowId), &Scalar)> + '_ {
        self.entries.iter().map(|(k, s)| (*k, s))
    }

    pub fn matmul(&self, other: &FockMatrix) -> FockMatrix {
        let mut by_row: BTreeMap<ArrowId, Vec<(ArrowId, &Scalar)>> = BTreeMap::new();
        for ((r, c), s) in other.iter() {
            by_row.entry(r).or_default().push((c, s));
        }
        let mut out = FockMatrix::zero(self.trunc.min(other.trunc));
        for ((r, mid), s) in self.iter() {
            if let Some(cols) = by_row.get(&mid) {
                for (c, t) in cols {
                    out.add_entry(r, *c, &(s * *t));
                }
            }
        }
        out
    }

    pub fn conj_transpose(&self) -> FockMatrix {
        let mut out = FockMatrix::zero(self.trunc);
        for ((r, c), s) in self.iter() {
            out.add_entry(c, r, &s.conj());
        }
        out
    }

    pub fn sub(&self, other: &FockMatrix) -> FockMatrix {
        let mut out = self.clone();
        for ((r, c), s) in other.iter() {
            out.add_entry(r, c, &(-s.clone()));
        }
        out
    }

    /// Restriction to rows and columns of degree `<= n`.
    pub fn compress(&self, sys: &GradedSystem, n: u32) -> FockMatrix {
        let mut out = FockMatrix::zero(n);
        for ((r, c), s) in self.iter() {
            if sys.degree(r) <= n && sys.degree(c) <= n {
                out.add_entry(r, c, s);
            }
        }
        out
    }
}

/// Evaluates an element on the Fock module truncated at `trunc`:
/// `T[α,β]` contributes `δ_{β·z} ↦ δ_{α·z}` for every `z` with
/// `rng(z) = src(β)` and both composites of degree `<= trunc`.
pub fn evaluate_on_fock(
    sys: &GradedSystem,
    x: &ToeplitzElement,
    trunc: u32,
) -> Result<FockMatrix, ToeplitzError> {
    if trunc > sys.cap() {
        return Err(ToeplitzError::CapExceeded {
            degree: trunc,
            cap: sys.cap(),
        });
    }
    let mut out = FockMatrix::zero(trunc);
    for (g, s) in x.iter() {
        if sys.src(g.alpha) != sys.src(g.beta) {
            continue;
        }
        let (da, db) = (sys.degree(g.alpha), sys.degree(g.beta));
        if da > trunc || db > trunc {
            continue;
        }
        let kmax = (trunc - da).min(trunc - db);
        let src = sys.src(g.beta);
        let id = sys.identity_of(src);
        let mut zs = vec![id];
        zs.extend_from_slice(sys.positive_with_rng(src));
        for z in zs {
            if sys.degree(z) > kmax {
                continue;
            }
            let (Some(col), Some(row)) = (sys.compose(g.beta, z), sys.compose(g.alpha, z)) else {
                continue;
            };
            out.add_entry(row, col, s);
        }
    }
    Ok(out)
}

/// A square block over the degree-`j` arrows, supported on pairs with equal
/// source: an element of the compact operators on the degree-`j`
/// correspondence.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CompactBlock {
    degree: u32,
    entries: BTreeMap<(ArrowId, ArrowId), Scalar>,
}

impl CompactBlock {
    pub fn zero(degree: u32) -> Self {
        CompactBlock {
            degree,
            entries: BTreeMap::new(),
        }
    }

    /// The rank-one `|δ_a⟩⟨δ_b|`; zero when the sources differ.
    pub fn rank_one(sys: &GradedSystem, a: ArrowId, b: ArrowId) -> Self {
        let mut out = CompactBlock::zero(sys.degree(a));
        if sys.src(a) == sys.src(b) && sys.degree(a) == sys.degree(b) {
            out.add_entry(a, b, &Scalar::one());
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add_entry(&mut self, row: ArrowId, col: ArrowId, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        let entry = self.entries.entry((row, col)).or_insert_with(Scalar::zero);
        *entry += s;
        if entry.is_zero() {
            self.entries.remove(&(row, col));
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ((ArrowId, ArrowId), &Scalar)> + '_ {
        self.entries.iter().map(|(k, s)| (*k, s))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = CompactBlock::zero(self.degree);
        for ((r, c), v) in self.iter() {
            out.add_entry(r, c, &(s * v));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((r, c), v) in other.iter() {
            out.add_entry(r, c, v);
        }
        out
    }
}

/// The compression `ϑ_j^k` of left multiplication:
/// `ϑ_j^k(|δ_a⟩⟨δ_b|) δ_p = δ_{a·z}` when `p = b·z`, zero otherwise.
/// `ϑ_0^k` is the left action of the coefficient algebra on `E_k`.
pub fn theta_compress(
    sys: &GradedSystem,
    x: &CompactBlock,
    k: u32,
) -> Result<CompactBlock, ToeplitzError> {
    let j = x.degree();
    if j > k {
        return Err(ToeplitzError::DegreeOrder { j, k });
    }
    if k > sys.cap() {
        return Err(ToeplitzError::CapExceeded {
            degree: k,
            cap: sys.cap(),
        });
    }
    let mut out = CompactBlock::zero(k);
    for ((a, b), s) in x.iter() {
        if sys.src(a) != sys.src(b) {
            continue;
        }
        let rest = k - j;
        let src = sys.src(b);
        let id = sys.identity_of(src);
        let mut zs = vec![id];
        zs.extend_from_slice(sys.positive_with_rng(src));
        for z in zs {
            if sys.degree(z) != rest {
                continue;
            }
            let (Some(p), Some(out_arrow)) = (sys.compose(b, z), sys.compose(a, z)) else {
                continue;
            };
            out.add_entry(out_arrow, p, s);
        }
    }
    Ok(out)
}

/// An element of the gauge fixed-point algebra in block form: one compact
/// block per degree `0..=N`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct FixedPointElement {
    blocks: BTreeMap<u32, CompactBlock>,
}

impl FixedPointElement {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_block(&mut self, block: CompactBlock) {
        if block.is_zero() {
            self.blocks.remove(&block.degree());
        } else {
            self.blocks.insert(block.degree(), block);
        }
    }

    pub fn add_block(&mut self, block: CompactBlock) {
        let d = block.degree();
        let merged = match self.blocks.remove(&d) {
            Some(prev) => prev.add(&block),
            None => block,
        };
        self.set_block(merged);
    }

    pub fn block(&self, degree: u32) -> Option<&CompactBlock> {
        self.blocks.get(&degree)
    }

    pub fn blocks(&self) -> impl Iterator<Item = &CompactBlock> + '_ {
        self.blocks.values()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    /// `N`: the largest degree carrying a block (0 for the zero element).
    pub fn top_degree(&self) -> u32 {
        self.blocks.keys().next_back().copied().unwrap_or(0)
    }

    /// The same element as a combination of generators `T[e,f]`.
    pub fn to_toeplitz(&self) -> ToeplitzElement {
        let mut out = ToeplitzElement::zero();
        for block in self.blocks.values() {
            for ((a, b), s) in block.iter() {
                out.add_term(Generator { alpha: a, beta: b }, s);
            }
        }
        out
    }
}
