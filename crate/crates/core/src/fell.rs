//! Extending a graph system of Hilbert bimodules to a Fell bundle over the
//! integers.
//!
//! A path-category system extends to a Fell bundle exactly when every
//! positive-degree fiber is a Hilbert bimodule and two inclusion families
//! hold: every arrow sharing a range with a lower-degree arrow must factor
//! through it on the left, and dually for sources. [`check_extendable`]
//! decides this degreewise; both conditions are degree-homogeneous, so a
//! failure witness survives any cap increase.
//!
//! [`build_fell`] realizes the extension concretely: negative fibers are
//! formal adjoints of the positive ones and every product is computed
//! through unique factorization, including the mixed-sign cases via
//! `B_n·B_{-ℓ} = B_n·⟨B_ℓ|B_ℓ⟩·B_ℓ*`. [`verify_fell_axioms`] then checks
//! the bundle axioms exhaustively within the degree bound.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::elements::{hilbert_bimodule_check, BimoduleVerdict, IdealMask, Side};
use crate::graded_graph::{ArrowId, GradedSystem};
use crate::scalar::Scalar;

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum FellError {
    #[error("operation requires a validated path-category system")]
    NotPathCategory,
    #[error("system does not extend to a Fell bundle")]
    NotExtendable(Box<ExtendObstruction>),
    #[error("degree bound {bound} exceeds the cap {cap}")]
    CapExceeded { bound: u32, cap: u32 },
}

/// Why a system fails to extend.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ExtendObstruction {
    /// Two distinct degree-`degree` arrows share a range (`side` = Left) or
    /// a source (`side` = Right), so that fiber is not a Hilbert bimodule.
    NotHilbertBimodule {
        degree: u32,
        first: ArrowId,
        second: ArrowId,
        side: Side,
    },
    /// The inclusion at `(n, m)` fails: `arrow ∈ E_m` shares its range
    /// (Left) or source (Right) with `through ∈ E_n` but does not factor
    /// through it.
    InclusionFails {
        n: u32,
        m: u32,
        side: Side,
        arrow: ArrowId,
        through: ArrowId,
    },
}

/// Verdict of [`check_extendable`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExtendVerdict {
    pub extendable: bool,
    pub witness: Option<ExtendObstruction>,
}

/// Decides whether the system is the restriction of a Fell bundle over the
/// integers: every positive fiber must be a Hilbert bimodule, and for all
/// `1 <= n <= m <= cap` every `t ∈ E_m` with `rng(t) = rng(e)` for
/// `e ∈ E_n` must factor as `t = e·z`, and dually every `t` with
/// `src(t) = src(e)` as `t = w·e`.
pub fn check_extendable(sys: &GradedSystem) -> Result<ExtendVerdict, FellError> {
    if !sys.is_path_category() {
        return Err(FellError::NotPathCategory);
    }
    for n in 1..=sys.cap() {
        match hilbert_bimodule_check(sys, n).expect("degree is within the cap") {
            BimoduleVerdict::Bimodule { .. } => (),
            BimoduleVerdict::NotBimodule {
                first,
                second,
                side,
            } => {
                return Ok(ExtendVerdict {
                    extendable: false,
                    witness: Some(ExtendObstruction::NotHilbertBimodule {
                        degree: n,
                        first,
                        second,
                        side,
                    }),
                });
            }
        }
    }
    for n in 1..=sys.cap() {
        for m in n..=sys.cap() {
            for side in [Side::Left, Side::Right] {
                for t in sys.arrows_of_degree(m) {
                    for e in sys.arrows_of_degree(n) {
                        let (matched, factors) = match side {
                            Side::Left => (
                                sys.rng(t) == sys.rng(e),
                                sys.factor_by_prefix(t, e).is_some(),
                            ),
                            Side::Right => (
                                sys.src(t) == sys.src(e),
                                sys.factor_by_suffix(t, e).is_some(),
                            ),
                        };
                        if matched && !factors {
                            return Ok(ExtendVerdict {
                                extendable: false,
                                witness: Some(ExtendObstruction::InclusionFails {
                                    n,
                                    m,
                                    side,
                                    arrow: t,
                                    through: e,
                                }),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(ExtendVerdict {
        extendable: true,
        witness: None,
    })
}

/// A basis element of a Fell-bundle fiber: an arrow, or the formal adjoint
/// of a positive-degree arrow. Adjoints of identities normalize to the
/// identities themselves, so `B_0` is the coefficient algebra.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum FellGen {
    Fwd(ArrowId),
    Adj(ArrowId),
}

impl FellGen {
    pub fn adjoint_of(sys: &GradedSystem, a: ArrowId) -> FellGen {
        if sys.is_identity(a) {
            FellGen::Fwd(a)
        } else {
            FellGen::Adj(a)
        }
    }

    pub fn star(&self, sys: &GradedSystem) -> FellGen {
        match *self {
            FellGen::Fwd(a) => FellGen::adjoint_of(sys, a),
            FellGen::Adj(a) => FellGen::Fwd(a),
        }
    }

    pub fn degree(&self, sys: &GradedSystem) -> i64 {
        match *self {
            FellGen::Fwd(a) => sys.degree(a) as i64,
            FellGen::Adj(a) => -(sys.degree(a) as i64),
        }
    }

    pub fn render(&self, sys: &GradedSystem) -> String {
        match *self {
            FellGen::Fwd(a) => sys.arrow_name(a).to_string(),
            FellGen::Adj(a) => format!("{}*", sys.arrow_name(a)),
        }
    }
}

/// A concrete Fell bundle over the integers, truncated at `degree_bound`:
/// formal fiber bases and the complete scalar-weighted product table for
/// pairs whose result degree stays within the bound.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FellBundle {
    degree_bound: u32,
    fibers: BTreeMap<i64, Vec<FellGen>>,
    mult: BTreeMap<(FellGen, FellGen), (Scalar, FellGen)>,
}

impl FellBundle {
    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn fiber(&self, n: i64) -> &[FellGen] {
        self.fibers.get(&n).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn fibers(&self) -> impl Iterator<Item = (i64, &[FellGen])> + '_ {
        self.fibers.iter().map(|(n, f)| (*n, f.as_slice()))
    }

    pub fn basis(&self) -> impl Iterator<Item = FellGen> + '_ {
        self.fibers.values().flatten().copied()
    }

    /// The product of two basis elements: `None` is zero.
    pub fn product(&self, x: FellGen, y: FellGen) -> Option<(Scalar, FellGen)> {
        self.mult.get(&(x, y)).cloned()
    }
}

/// Products of fiber basis elements, all reduced to unique factorization.
fn raw_product(sys: &GradedSystem, x: FellGen, y: FellGen) -> Option<FellGen> {
    match (x, y) {
        (FellGen::Fwd(e), FellGen::Fwd(f)) => sys.compose(e, f).map(FellGen::Fwd),
        (FellGen::Adj(e), FellGen::Adj(f)) => {
            // e*·f* = (f·e)*
            sys.compose(f, e).map(|w| FellGen::adjoint_of(sys, w))
        }
        (FellGen::Adj(e), FellGen::Fwd(t)) => {
            if sys.degree(e) <= sys.degree(t) {
                // e*·t = z when t = e·z
                sys.factor_by_prefix(t, e).map(FellGen::Fwd)
            } else {
                // e*·t = (t*·e)* = z* when e = t·z
                sys.factor_by_prefix(e, t)
                    .map(|z| FellGen::adjoint_of(sys, z))
            }
        }
        (FellGen::Fwd(t), FellGen::Adj(e)) => {
            if sys.degree(t) >= sys.degree(e) {
                // t·e* = w when t = w·e
                sys.factor_by_suffix(t, e).map(FellGen::Fwd)
            } else {
                // t·e* = (e·t*)* = w* when e = w·t
                sys.factor_by_suffix(e, t)
                    .map(|w| FellGen::adjoint_of(sys, w))
            }
        }
    }
}

/// Builds the truncated Fell bundle of an extendable system: fibers at
/// degrees `-D..=D` and the complete product table for in-range pairs.
pub fn build_fell(sys: &GradedSystem, bound: u32) -> Result<FellBundle, FellError> {
    if bound > sys.cap() {
        return Err(FellError::CapExceeded {
            bound,
            cap: sys.cap(),
        });
    }
    let verdict = check_extendable(sys)?;
    if let Some(obstruction) = verdict.witness {
        return Err(FellError::NotExtendable(Box::new(obstruction)));
    }

    let mut fibers: BTreeMap<i64, Vec<FellGen>> = BTreeMap::new();
    for n in 0..=bound {
        let fwd: Vec<FellGen> = sys.arrows_of_degree(n).map(FellGen::Fwd).collect();
        if n == 0 {
            fibers.insert(0, fwd);
        } else {
            let adj: Vec<FellGen> = sys.arrows_of_degree(n).map(FellGen::Adj).collect();
            fibers.insert(n as i64, fwd);
            fibers.insert(-(n as i64), adj);
        }
    }

    let basis: Vec<FellGen> = fibers.values().flatten().copied().collect();
    let mut mult = BTreeMap::new();
    for &x in &basis {
        for &y in &basis {
            let total = x.degree(sys) + y.degree(sys);
            if total.unsigned_abs() > bound as u64 {
                continue;
            }
            if let Some(p) = raw_product(sys, x, y) {
                mult.insert((x, y), (Scalar::one(), p));
            }
        }
    }

    Ok(FellBundle {
        degree_bound: bound,
        fibers,
        mult,
    })
}

/// A failed bundle axiom, with the witnesses involved.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FellAxiomFailure {
    /// `(x·y)·z != x·(y·z)` with all intermediates within the bound.
    Associativity { x: FellGen, y: FellGen, z: FellGen },
    /// `(x·y)* != y*·x*`.
    Involution { x: FellGen, y: FellGen },
    /// `x*·x` is not a non-negative multiple of an identity.
    Positivity { x: FellGen },
    /// A product of two forward fibers disagrees with the system's
    /// composition.
    Restriction { x: ArrowId, y: ArrowId },
    /// Degrees do not add across a product entry.
    Grading { x: FellGen, y: FellGen },
}

/// Report of [`verify_fell_axioms`]: the first failure found, or all-pass.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FellAxiomReport {
    pub checked_triples: usize,
    pub failure: Option<FellAxiomFailure>,
}

impl FellAxiomReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Exhaustively verifies the bundle axioms within the degree bound:
/// grading of the table, associativity on all in-range triples,
/// `(x·y)* = y*·x*`, positivity of `x*·x`, and agreement of the
/// non-negative part with the system's own composition.
pub fn verify_fell_axioms(sys: &GradedSystem, bundle: &FellBundle) -> FellAxiomReport {
    let bound = bundle.degree_bound() as i64;
    let basis: Vec<FellGen> = bundle.basis().collect();
    let mut checked_triples = 0usize;

    for (&(x, y), (_, p)) in &bundle.mult {
        if p.degree(sys) != x.degree(sys) + y.degree(sys) {
            return FellAxiomReport {
                checked_triples,
                failure: Some(FellAxiomFailure::Grading { x, y }),
            };
        }
    }

    // Restriction to the non-negative part reproduces the system.
    for x in sys.all_arrows() {
        for y in sys.all_arrows() {
            let total = sys.degree(x) + sys.degree(y);
            if total > bundle.degree_bound() {
                continue;
            }
            let from_bundle = bundle
                .product(FellGen::Fwd(x), FellGen::Fwd(y))
                .map(|(_, p)| p);
            let from_sys = sys.compose(x, y).map(FellGen::Fwd);
            if from_bundle != from_sys {
                return FellAxiomReport {
                    checked_triples,
                    failure: Some(FellAxiomFailure::Restriction { x, y }),
                };
            }
        }
    }

    for &x in &basis {
        // x*·x lands in B_0 on the identity of the appropriate vertex.
        let star = x.star(sys);
        let prod = bundle.product(star, x);
        match prod {
            Some((s, FellGen::Fwd(a))) if sys.is_identity(a) && s.is_nonneg_real() => (),
            _ => {
                return FellAxiomReport {
                    checked_triples,
                    failure: Some(FellAxiomFailure::Positivity { x }),
                };
            }
        }
    }

    for &x in &basis {
        for &y in &basis {
            let total = x.degree(sys) + y.degree(sys);
            if total.abs() > bound {
                continue;
            }
            // involution: (x·y)* = y*·x*
            let lhs = bundle.product(x, y).map(|(_, p)| p.star(sys));
            let rhs = bundle.product(y.star(sys), x.star(sys)).map(|(_, p)| p);
            if lhs != rhs {
                return FellAxiomReport {
                    checked_triples,
                    failure: Some(FellAxiomFailure::Involution { x, y }),
                };
            }
            for &z in &basis {
                // associativity where every intermediate stays in range
                let dyz = y.degree(sys) + z.degree(sys);
                let dall = total + z.degree(sys);
                if dyz.abs() > bound || dall.abs() > bound {
                    continue;
                }
                checked_triples += 1;
                let left = bundle
                    .product(x, y)
                    .and_then(|(_, xy)| bundle.product(xy, z).map(|(_, p)| p));
                let right = bundle
                    .product(y, z)
                    .and_then(|(_, yz)| bundle.product(x, yz).map(|(_, p)| p));
                if left != right {
                    return FellAxiomReport {
                        checked_triples,
                        failure: Some(FellAxiomFailure::Associativity { x, y, z }),
                    };
                }
            }
        }
    }

    FellAxiomReport {
        checked_triples,
        failure: None,
    }
}

/// The covariance ideal of the section algebra: the union over `n >= 1` of
/// the supports of the left inner products `⟨⟨B_n|B_n⟩⟩`, i.e. the ranges
/// of the positive fibers. Equals the Katsura ideal whenever the bound
/// reaches every range vertex.
pub fn fell_covariance_ideal(sys: &GradedSystem, bundle: &FellBundle) -> IdealMask {
    let mut mask = IdealMask::empty();
    for (n, fiber) in bundle.fibers() {
        if n < 1 {
            continue;
        }
        for g in fiber {
            if let FellGen::Fwd(a) = g {
                mask.insert(sys.rng(*a));
            }
        }
    }
    mask
}
