//! The truncated Fock module and its creation operators.
//!
//! The Fock module of a graded system is the direct sum of all degree
//! correspondences; here it is truncated at a degree `N <= cap`. Creation
//! operators are degree-homogeneous block maps, and every identity checked
//! in this module is degree-homogeneous too, so a check involving only
//! degrees `<= N` is exact regardless of the truncation.
//!
//! [`check_weak_representation`] verifies the two defining identities of a
//! weak representation on all basis vectors. [`check_representation_condition`]
//! verifies the covariance identity
//! `S_n(x)* S_m(y) = S_{m-n}(S_n(x)* y)` for `0 < n < m`, which holds
//! exactly when the system is a path category; the commutative-square
//! system is the canonical counterexample.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::elements::Element;
use crate::graded_graph::{validate, ArrowId, GradedSystem, ValidationReport};
use crate::scalar::Scalar;

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum FockError {
    #[error("truncation {trunc} exceeds the cap {cap}")]
    CapExceeded { trunc: u32, cap: u32 },
    #[error("system fails validation ({} violations)", .0.violations.len())]
    InvalidSystem(Box<ValidationReport>),
}

/// The ordered basis of the Fock module truncated at degree `trunc`:
/// all arrows of degree `<= trunc` in canonical `(degree, name)` order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedFock {
    trunc: u32,
    basis: Vec<ArrowId>,
}

impl TruncatedFock {
    pub fn new(sys: &GradedSystem, trunc: u32) -> Result<Self, FockError> {
        if trunc > sys.cap() {
            return Err(FockError::CapExceeded {
                trunc,
                cap: sys.cap(),
            });
        }
        Ok(TruncatedFock {
            trunc,
            basis: sys.arrows_up_to(trunc).collect(),
        })
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn basis(&self) -> &[ArrowId] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// A degree-homogeneous operator on the truncated Fock module: it shifts
/// degree by `shift`, and its block at source degree `k` is a sparse matrix
/// from `E_k` to `E_{k+shift}` (rows and columns indexed by arrow ids).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BlockMap {
    trunc: u32,
    shift: i64,
    /// block per source degree; entries keyed `(row, col)`
    blocks: BTreeMap<u32, BTreeMap<(ArrowId, ArrowId), Scalar>>,
}

impl BlockMap {
    pub fn zero(trunc: u32, shift: i64) -> Self {
        BlockMap {
            trunc,
            shift,
            blocks: BTreeMap::new(),
        }
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(BTreeMap::is_empty)
    }

    fn add_entry(&mut self, k: u32, row: ArrowId, col: ArrowId, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        let block = self.blocks.entry(k).or_default();
        let entry = block.entry((row, col)).or_insert_with(Scalar::zero);
        *entry += s;
        if entry.is_zero() {
            block.remove(&(row, col));
        }
    }

    pub fn block(&self, k: u32) -> Option<&BTreeMap<(ArrowId, ArrowId), Scalar>> {
        self.blocks.get(&k)
    }

    pub fn blocks(&self) -> impl Iterator<Item = (u32, &BTreeMap<(ArrowId, ArrowId), Scalar>)> {
        self.blocks.iter().map(|(k, b)| (*k, b))
    }

    /// Applies the map to the basis vector `δ_col` of degree `k`.
    pub fn apply_basis(&self, sys: &GradedSystem, col: ArrowId) -> Element {
        let k = sys.degree(col);
        let out_deg = (k as i64 + self.shift).max(0) as u32;
        let mut out = Element::zero(out_deg);
        if let Some(block) = self.blocks.get(&k) {
            for ((row, c), s) in block {
                if *c == col {
                    out.add_term(*row, s);
                }
            }
        }
        out
    }

    /// The adjoint: shift negates, blocks conjugate-transpose.
    pub fn adjoint(&self) -> BlockMap {
        let mut out = BlockMap::zero(self.trunc, -self.shift);
        for (k, block) in &self.blocks {
            let out_k = (*k as i64 + self.shift) as u32;
            for ((row, col), s) in block {
                out.add_entry(out_k, *col, *row, &s.conj());
            }
        }
        out
    }

    /// Operator composition `self ∘ other`; shifts add.
    pub fn compose(&self, other: &BlockMap) -> BlockMap {
        let mut out = BlockMap::zero(self.trunc.min(other.trunc), self.shift + other.shift);
        for (k, oblock) in &other.blocks {
            let mid = *k as i64 + other.shift;
            if mid < 0 {
                continue;
            }
            let Some(sblock) = self.blocks.get(&(mid as u32)) else {
                continue;
            };
            for ((orow, ocol), os) in oblock {
                for ((srow, scol), ss) in sblock {
                    if scol == orow {
                        out.add_entry(*k, *srow, *ocol, &(ss * os));
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &BlockMap) -> BlockMap {
        let mut out = self.clone();
        debug_assert_eq!(self.shift, other.shift);
        for (k, block) in &other.blocks {
            for ((row, col), s) in block {
                out.add_entry(*k, *row, *col, &(-s.clone()));
            }
        }
        out
    }
}

/// The creation operator `S_n(x)` of a degree-`n` element, truncated so that
/// source degrees run over `k <= trunc - n`: the block at `k` sends `δ_y` to
/// `Σ_e x(e)·δ_{e·y}` over composable `e`.
///
/// Its [`BlockMap::adjoint`] is the annihilation operator, sending `δ_t` to
/// `Σ conj(x(e))·δ_z` over factorizations `t = e·z`.
pub fn creation_operator(
    sys: &GradedSystem,
    trunc: u32,
    x: &Element,
) -> Result<BlockMap, FockError> {
    let n = x.degree();
    if trunc > sys.cap() {
        return Err(FockError::CapExceeded {
            trunc,
            cap: sys.cap(),
        });
    }
    if n > trunc {
        return Err(FockError::CapExceeded {
            trunc: n,
            cap: trunc,
        });
    }
    let mut out = BlockMap::zero(trunc, n as i64);
    for (e, c) in x.iter() {
        for k in 0..=(trunc - n) {
            for y in sys.arrows_of_degree(k) {
                if sys.rng(y) == sys.src(e) {
                    let composed = sys.compose(e, y);
                    if let Some(z) = composed {
                        out.add_entry(k, z, y, c);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// A failed instance of one of the two weak-representation identities.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum WeakRepWitness {
    /// `S(x)S(y)δ_z != S(x·y)δ_z`
    Multiplicativity {
        x: ArrowId,
        y: ArrowId,
        z: ArrowId,
        lhs: Option<ArrowId>,
        rhs: Option<ArrowId>,
    },
    /// `S(x)*S(y)δ_z != S_0(⟨x|y⟩)δ_z`
    InnerProduct { x: ArrowId, y: ArrowId, z: ArrowId },
}

/// Report of [`check_weak_representation`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeakRepReport {
    pub trunc: u32,
    pub witness: Option<WeakRepWitness>,
}

impl WeakRepReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Verifies, degreewise up to `trunc`, that the truncated creation operators
/// satisfy the weak-representation identities
/// `S_n(x)S_m(y) = S_{n+m}(x·y)` and `S_n(x)*S_n(y) = S_0(⟨x|y⟩)` on all
/// basis vectors. Passes on every validated system.
pub fn check_weak_representation(
    sys: &GradedSystem,
    trunc: u32,
) -> Result<WeakRepReport, FockError> {
    if trunc > sys.cap() {
        return Err(FockError::CapExceeded {
            trunc,
            cap: sys.cap(),
        });
    }
    let report = validate(sys);
    if !report.passed() {
        return Err(FockError::InvalidSystem(Box::new(report)));
    }

    // Identity (1) on basis vectors is exactly associativity together with
    // definedness bookkeeping: S(x)S(y)δ_z = x·(y·z) versus (x·y)·z. Pairs
    // with mismatched endpoints make both sides vanish, so it suffices to
    // scan composable pairs (x, y) and all z with total degree <= trunc.
    for x in sys.all_arrows() {
        if sys.is_identity(x) {
            continue;
        }
        for &y in sys.positive_with_rng(sys.src(x)) {
            let Some(u) = sys.compose(x, y) else { continue };
            if sys.degree(u) > trunc {
                continue;
            }
            // z of degree 0 is the unit law; start from the identity at
            // src(y) and then every positive arrow into src(y).
            let id = sys.identity_of(sys.src(y));
            let mut candidates = vec![id];
            candidates.extend_from_slice(sys.positive_with_rng(sys.src(y)));
            for z in candidates {
                if sys.degree(u) + sys.degree(z) > trunc {
                    continue;
                }
                let lhs = sys.compose(y, z).and_then(|yz| sys.compose(x, yz));
                let rhs = sys.compose(u, z);
                if lhs != rhs {
                    return Ok(WeakRepReport {
                        trunc,
                        witness: Some(WeakRepWitness::Multiplicativity { x, y, z, lhs, rhs }),
                    });
                }
            }
        }
    }

    // Identity (2): S_n(x)*S_n(y)δ_z = [x = y]·[src(y) = rng(z)]·δ_z. The
    // left side expands over factorizations y·z = x·t; with totality and
    // per-degree injectivity the only factorization at degree n through x
    // is x = y, t = z. Scan every composable (y, z) and every degree-n
    // prefix of the composite.
    for y in sys.all_arrows() {
        if sys.is_identity(y) {
            continue;
        }
        let n = sys.degree(y);
        let id = sys.identity_of(sys.src(y));
        let mut candidates = vec![id];
        candidates.extend_from_slice(sys.positive_with_rng(sys.src(y)));
        for z in candidates {
            if n + sys.degree(z) > trunc {
                continue;
            }
            let Some(w) = sys.compose(y, z) else { continue };
            // prefixes of w at degree n
            if sys.degree(w) == n {
                // degenerate split: x = w, t = identity
                if w != y {
                    return Ok(WeakRepReport {
                        trunc,
                        witness: Some(WeakRepWitness::InnerProduct { x: w, y, z }),
                    });
                }
            }
            for &(xx, _t) in sys.positive_splits(w) {
                if sys.degree(xx) == n && xx != y {
                    return Ok(WeakRepReport {
                        trunc,
                        witness: Some(WeakRepWitness::InnerProduct { x: xx, y, z }),
                    });
                }
            }
        }
    }

    Ok(WeakRepReport {
        trunc,
        witness: None,
    })
}

/// A failing instance of the covariance identity: at
/// `(n, x, m, y)` applied to the degree-`k` basis vector `δ_z`,
/// `S_n(x)* S_m(y) δ_z = lhs` but `S_{m-n}(S_n(x)* y) δ_z = rhs`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RepConditionWitness {
    pub n: u32,
    pub x: ArrowId,
    pub m: u32,
    pub y: ArrowId,
    pub k: u32,
    pub z: ArrowId,
    pub lhs: Element,
    pub rhs: Element,
}

/// Verdict of [`check_representation_condition`]. The scan covers every
/// basis instance with all participating degrees `<= trunc` (in particular
/// `m + k <= trunc`, so both sides are computed exactly); `verified_up_to`
/// records that range.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RepConditionVerdict {
    pub holds: bool,
    pub verified_up_to: u32,
    pub witness: Option<RepConditionWitness>,
}

struct WitnessKey(u32, ArrowId, u32, ArrowId, u32, ArrowId);

impl WitnessKey {
    fn key(&self) -> (u32, ArrowId, u32, ArrowId, u32, ArrowId) {
        (self.0, self.1, self.2, self.3, self.4, self.5)
    }
}

/// Checks the covariance identity `S_n(x)* S_m(y) = S_{m-n}(S_n(x)* y)` for
/// all basis `x ∈ E_n`, `y ∈ E_m` with `0 < n < m`, applied to every basis
/// vector `δ_z` with `deg(z) + m <= trunc`.
///
/// Together with the path-category check this decides whether the system is
/// a partial product system. The witness is minimal in the lexicographic
/// order on `(n, x, m, y, k, z)`.
pub fn check_representation_condition(
    sys: &GradedSystem,
    trunc: u32,
) -> Result<RepConditionVerdict, FockError> {
    if trunc > sys.cap() {
        return Err(FockError::CapExceeded {
            trunc,
            cap: sys.cap(),
        });
    }
    let report = validate(sys);
    if !report.passed() {
        return Err(FockError::InvalidSystem(Box::new(report)));
    }

    let mut best: Option<(WitnessKey, RepConditionWitness)> = None;
    let mut consider = |key: WitnessKey, wit: RepConditionWitness| {
        let replace = match &best {
            None => true,
            Some((k, _)) => key.key() < k.key(),
        };
        if replace {
            best = Some((key, wit));
        }
    };

    // Both sides vanish unless w = y·z is defined, and then they are read
    // off factorizations of w and y. Two sparse passes cover every non-zero
    // instance of either side.
    //
    // Pass A: for each composable (y, z) with w = y·z and each factorization
    // w = x·t at degree n < m, the left side is δ_t; the right side is
    // δ_{ε·z} for y = x·ε and vanishes when y does not pass through x.
    for y in sys.all_arrows() {
        let m = sys.degree(y);
        if m < 2 {
            continue;
        }
        let id = sys.identity_of(sys.src(y));
        let mut zs = vec![id];
        zs.extend_from_slice(sys.positive_with_rng(sys.src(y)));
        for z in zs {
            let k = sys.degree(z);
            if m + k > trunc {
                continue;
            }
            let Some(w) = sys.compose(y, z) else { continue };
            for &(x, t) in sys.positive_splits(w) {
                let n = sys.degree(x);
                if n >= m {
                    continue;
                }
                let lhs = Element::basis(sys, t);
                let rhs = match sys.factor_by_prefix(y, x) {
                    Some(eps) => match sys.compose(eps, z) {
                        Some(ez) => Element::basis(sys, ez),
                        None => Element::zero(m - n + k),
                    },
                    None => Element::zero(m - n + k),
                };
                if lhs != rhs {
                    consider(
                        WitnessKey(n, x, m, y, k, z),
                        RepConditionWitness {
                            n,
                            x,
                            m,
                            y,
                            k,
                            z,
                            lhs,
                            rhs,
                        },
                    );
                }
            }
        }
    }

    // Pass B: for each factorization y = x·ε and each z composable with ε,
    // the right side is δ_{ε·z}; the left side is read off w = y·z.
    for y in sys.all_arrows() {
        let m = sys.degree(y);
        if m < 2 {
            continue;
        }
        for &(x, eps) in sys.positive_splits(y) {
            let n = sys.degree(x);
            if n >= m {
                continue;
            }
            let id = sys.identity_of(sys.src(eps));
            let mut zs = vec![id];
            zs.extend_from_slice(sys.positive_with_rng(sys.src(eps)));
            for z in zs {
                let k = sys.degree(z);
                if m + k > trunc {
                    continue;
                }
                let Some(ez) = sys.compose(eps, z) else {
                    continue;
                };
                let rhs = Element::basis(sys, ez);
                let Some(w) = sys.compose(y, z) else { continue };
                let lhs = match sys.factor_by_prefix(w, x) {
                    Some(t) => Element::basis(sys, t),
                    None => Element::zero(m - n + k),
                };
                if lhs != rhs {
                    consider(
                        WitnessKey(n, x, m, y, k, z),
                        RepConditionWitness {
                            n,
                            x,
                            m,
                            y,
                            k,
                            z,
                            lhs,
                            rhs,
                        },
                    );
                }
            }
        }
    }

    Ok(match best {
        None => RepConditionVerdict {
            holds: true,
            verified_up_to: trunc,
            witness: None,
        },
        Some((_, wit)) => RepConditionVerdict {
            holds: false,
            verified_up_to: trunc,
            witness: Some(wit),
        },
    })
}
