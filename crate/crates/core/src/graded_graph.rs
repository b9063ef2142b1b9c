//! Graded graphs with partial composition.
//!
//! A [`GradedSystem`] is a finite vertex set together with degree-graded arrow
//! sets `E_1, ..., E_cap`, range/source maps, and a partial, degree-additive
//! composition table. Degree 0 is always the set of vertex identities. Systems
//! come in two flavours:
//!
//! * **Free** systems are path categories generated by degree-labelled edges,
//!   truncated at a degree cap. Arrows are composable generator words and
//!   composition is concatenation.
//! * **Table** systems carry explicit arrow lists and explicit multiplication
//!   entries, which may be arbitrarily broken; [`validate`] reports every
//!   violated axiom with a concrete witness.
//!
//! [`check_path_category`] decides whether a validated system has unique
//! factorization into irreducible arrows (within the cap), which is exactly
//! the property separating well-behaved systems from ones whose Fock
//! covariance identity fails (see the `fock` module).

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

/// Index of a vertex in a [`GradedSystem`]; vertices are sorted by name.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexId(pub u32);

/// Index of an arrow in a [`GradedSystem`].
///
/// Arrow ids are assigned in canonical order, sorted by `(degree, name)`,
/// so the id order is the basis order used everywhere in this crate.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ArrowId(pub u32);

/// A single graded arrow. Degree-0 arrows are exactly the vertex identities
/// and carry their vertex's name.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Arrow {
    pub name: String,
    pub degree: u32,
    pub src: VertexId,
    pub rng: VertexId,
}

/// How the system was built.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Free,
    Table,
}

/// A generator for [`build_free`]: `(name, degree >= 1, src, rng)`.
#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
    pub src: String,
    pub rng: String,
}

/// An explicit arrow declaration for [`build_table`].
#[derive(Clone, Debug)]
pub struct ArrowDecl {
    pub name: String,
    pub degree: u32,
    pub src: String,
    pub rng: String,
}

/// An explicit multiplication entry `x · y = z` for [`build_table`].
#[derive(Clone, Debug)]
pub struct MulEntry {
    pub left: String,
    pub right: String,
    pub result: String,
}

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum BuildError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("arrow `{name}` has degree {degree} but the cap is {cap}")]
    CapTooSmall { name: String, degree: u32, cap: u32 },
    #[error("arrow `{0}` declared with degree 0; identities are implicit")]
    ZeroDegreeArrow(String),
    #[error("name `{0}` contains `·`, which is reserved for composite words")]
    ReservedName(String),
    #[error("malformed multiplication entry {left} · {right} = {result}: {reason}")]
    MalformedEntry {
        left: String,
        right: String,
        result: String,
        reason: String,
    },
    #[error("system would have more than {limit} arrows")]
    TooManyArrows { limit: usize },
}

/// Hard limit on generated arrows, to keep free builds finite in practice.
pub const ARROW_LIMIT: usize = 200_000;

/// One violated axiom, with a concrete witness.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    /// `x · y = z` but `rng(z) != rng(x)` or `src(z) != src(y)`.
    EndpointMismatch { x: ArrowId, y: ArrowId, z: ArrowId },
    /// Two distinct pairs at the same degree pair compose to the same arrow.
    NotInjective {
        first: (ArrowId, ArrowId),
        second: (ArrowId, ArrowId),
        result: ArrowId,
    },
    /// `src(x) = rng(y)` and the degrees fit under the cap, but no composite
    /// is defined. The multiplication of a weak system is total on
    /// endpoint-composable pairs, so this breaks the isometry of `mu_{n,m}`.
    MissingComposite { x: ArrowId, y: ArrowId },
    /// `(x · y) · z != x · (y · z)` within the cap.
    NotAssociative {
        x: ArrowId,
        y: ArrowId,
        z: ArrowId,
        left: Option<ArrowId>,
        right: Option<ArrowId>,
    },
    /// An identity arrow fails to act as a unit.
    UnitLaw { x: ArrowId },
}

/// Outcome of [`validate`]: all violations found, in deterministic order.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub checked_cap: u32,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Two distinct factorizations of one arrow into irreducibles.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DoubleFactorization {
    pub arrow: ArrowId,
    pub first: Vec<ArrowId>,
    pub second: Vec<ArrowId>,
}

/// Verdict of [`check_path_category`]. Bijectivity of the irreducible-word
/// functor is only checkable within the cap, so the verdict records it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PathCategoryVerdict {
    pub is_path_category: bool,
    pub irreducibles: Vec<ArrowId>,
    pub witness: Option<DoubleFactorization>,
    pub cap: u32,
}

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum GraphError {
    #[error("system fails validation ({} violations)", .0.violations.len())]
    InvalidSystem(Box<ValidationReport>),
    #[error("system is not a path category")]
    NotPathCategory,
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
}

/// A finite graded graph with partial composition, immutable after
/// construction.
#[derive(Debug)]
pub struct GradedSystem {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    cap: u32,
    mode: Mode,
    vertex_ids: HashMap<String, VertexId>,
    arrow_ids: HashMap<String, ArrowId>,
    table: HashMap<(ArrowId, ArrowId), ArrowId>,
    /// All positive-degree factorizations `w = x · y`, keyed by `w`, each
    /// list sorted by `(x, y)`.
    splits: HashMap<ArrowId, Vec<(ArrowId, ArrowId)>>,
    /// `degree_start[d]..degree_start[d + 1]` is the id range of `E_d`.
    degree_start: Vec<u32>,
    /// Positive-degree arrows grouped by source / range vertex, sorted.
    by_src: Vec<Vec<ArrowId>>,
    by_rng: Vec<Vec<ArrowId>>,
    path_cache: OnceLock<Result<PathCategoryVerdict, GraphError>>,
}

impl Clone for GradedSystem {
    fn clone(&self) -> Self {
        GradedSystem {
            vertices: self.vertices.clone(),
            arrows: self.arrows.clone(),
            cap: self.cap,
            mode: self.mode,
            vertex_ids: self.vertex_ids.clone(),
            arrow_ids: self.arrow_ids.clone(),
            table: self.table.clone(),
            splits: self.splits.clone(),
            degree_start: self.degree_start.clone(),
            by_src: self.by_src.clone(),
            by_rng: self.by_rng.clone(),
            path_cache: OnceLock::new(),
        }
    }
}

impl GradedSystem {
    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0 as usize]
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertex_ids.get(name).copied()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len() as u32).map(VertexId)
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrow(&self, id: ArrowId) -> &Arrow {
        &self.arrows[id.0 as usize]
    }

    pub fn arrow_name(&self, id: ArrowId) -> &str {
        &self.arrows[id.0 as usize].name
    }

    pub fn arrow_id(&self, name: &str) -> Option<ArrowId> {
        self.arrow_ids.get(name).copied()
    }

    pub fn degree(&self, id: ArrowId) -> u32 {
        self.arrows[id.0 as usize].degree
    }

    pub fn src(&self, id: ArrowId) -> VertexId {
        self.arrows[id.0 as usize].src
    }

    pub fn rng(&self, id: ArrowId) -> VertexId {
        self.arrows[id.0 as usize].rng
    }

    /// The identity arrow of `v`. Identities occupy ids `0..|V|` in vertex
    /// order.
    pub fn identity_of(&self, v: VertexId) -> ArrowId {
        ArrowId(v.0)
    }

    pub fn is_identity(&self, id: ArrowId) -> bool {
        self.degree(id) == 0
    }

    /// Ids of all arrows of degree `d`, in canonical (name) order.
    pub fn arrows_of_degree(&self, d: u32) -> impl Iterator<Item = ArrowId> + '_ {
        let (lo, hi) = self.degree_range(d);
        (lo..hi).map(ArrowId)
    }

    fn degree_range(&self, d: u32) -> (u32, u32) {
        if d as usize + 1 >= self.degree_start.len() {
            if d as usize >= self.degree_start.len() {
                return (0, 0);
            }
            return (self.degree_start[d as usize], self.arrows.len() as u32);
        }
        (
            self.degree_start[d as usize],
            self.degree_start[d as usize + 1],
        )
    }

    /// Ids of all arrows of degree `<= n`, the truncated Fock basis order.
    pub fn arrows_up_to(&self, n: u32) -> impl Iterator<Item = ArrowId> + '_ {
        let hi = self.degree_range(n.min(self.cap)).1;
        (0..hi).map(ArrowId)
    }

    pub fn all_arrows(&self) -> impl Iterator<Item = ArrowId> + '_ {
        (0..self.arrows.len() as u32).map(ArrowId)
    }

    /// Positive-degree arrows with the given source.
    pub fn positive_with_src(&self, v: VertexId) -> &[ArrowId] {
        &self.by_src[v.0 as usize]
    }

    /// Positive-degree arrows with the given range.
    pub fn positive_with_rng(&self, v: VertexId) -> &[ArrowId] {
        &self.by_rng[v.0 as usize]
    }

    /// Evaluates the partial composition `x · y`.
    ///
    /// Defined when `src(x) = rng(y)`, the composite stays within the cap,
    /// and (in table mode) the table carries an entry. Identity arrows
    /// compose canonically.
    pub fn compose(&self, x: ArrowId, y: ArrowId) -> Option<ArrowId> {
        let ax = self.arrow(x);
        let ay = self.arrow(y);
        if ax.src != ay.rng {
            return None;
        }
        if ax.degree == 0 {
            return Some(y);
        }
        if ay.degree == 0 {
            return Some(x);
        }
        if ax.degree + ay.degree > self.cap {
            return None;
        }
        self.table.get(&(x, y)).copied()
    }

    /// All factorizations `w = x · y` with both factors of positive degree,
    /// sorted by `(x, y)`.
    pub fn positive_splits(&self, w: ArrowId) -> &[(ArrowId, ArrowId)] {
        self.splits.get(&w).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The unique `t` with `w = x · t`, if one exists. Uniqueness holds on
    /// any system whose composition is injective per degree pair.
    pub fn factor_by_prefix(&self, w: ArrowId, x: ArrowId) -> Option<ArrowId> {
        if self.is_identity(x) {
            return (self.rng(w) == self.src(x)).then_some(w);
        }
        if self.degree(x) == self.degree(w) {
            return (x == w).then(|| self.identity_of(self.src(w)));
        }
        self.positive_splits(w)
            .iter()
            .find(|(a, _)| *a == x)
            .map(|&(_, t)| t)
    }

    /// The unique `t` with `w = t · y`, if one exists.
    pub fn factor_by_suffix(&self, w: ArrowId, y: ArrowId) -> Option<ArrowId> {
        if self.is_identity(y) {
            return (self.src(w) == self.rng(y)).then_some(w);
        }
        if self.degree(y) == self.degree(w) {
            return (y == w).then(|| self.identity_of(self.rng(w)));
        }
        self.positive_splits(w)
            .iter()
            .find(|(_, b)| *b == y)
            .map(|&(t, _)| t)
    }

    /// Memoized path-category verdict; operations whose precondition is the
    /// path-category property call through this.
    pub fn path_verdict(&self) -> &Result<PathCategoryVerdict, GraphError> {
        self.path_cache
            .get_or_init(|| check_path_category_uncached(self))
    }

    pub fn is_path_category(&self) -> bool {
        matches!(self.path_verdict(), Ok(v) if v.is_path_category)
    }
}

struct RawSystem {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    cap: u32,
    mode: Mode,
    entries: Vec<(u32, u32, u32)>, // indices into `arrows`
}

/// Shared tail of both builders: canonical sort, id assignment, indexes.
fn assemble(raw: RawSystem) -> GradedSystem {
    let RawSystem {
        vertices,
        mut arrows,
        cap,
        mode,
        entries,
    } = raw;
    // Remember each arrow's pre-sort position so entries can be remapped.
    let mut order: Vec<usize> = (0..arrows.len()).collect();
    order.sort_by(|&a, &b| {
        (arrows[a].degree, &arrows[a].name).cmp(&(arrows[b].degree, &arrows[b].name))
    });
    let mut new_index = vec![0u32; arrows.len()];
    for (new, &old) in order.iter().enumerate() {
        new_index[old] = new as u32;
    }
    let mut sorted = Vec::with_capacity(arrows.len());
    for &old in &order {
        sorted.push(arrows[old].clone());
    }
    arrows = sorted;

    let vertex_ids = vertices
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), VertexId(i as u32)))
        .collect();
    let arrow_ids = arrows
        .iter()
        .enumerate()
        .map(|(i, a)| (a.name.clone(), ArrowId(i as u32)))
        .collect();

    let mut degree_start = vec![0u32; cap as usize + 2];
    for a in &arrows {
        degree_start[a.degree as usize + 1] += 1;
    }
    for d in 0..cap as usize + 1 {
        degree_start[d + 1] += degree_start[d];
    }

    let mut table = HashMap::new();
    let mut splits: HashMap<ArrowId, Vec<(ArrowId, ArrowId)>> = HashMap::new();
    for (x, y, z) in entries {
        let (x, y, z) = (
            ArrowId(new_index[x as usize]),
            ArrowId(new_index[y as usize]),
            ArrowId(new_index[z as usize]),
        );
        table.insert((x, y), z);
        splits.entry(z).or_default().push((x, y));
    }
    for list in splits.values_mut() {
        list.sort();
    }

    let mut by_src = vec![Vec::new(); vertices.len()];
    let mut by_rng = vec![Vec::new(); vertices.len()];
    for (i, a) in arrows.iter().enumerate() {
        if a.degree > 0 {
            by_src[a.src.0 as usize].push(ArrowId(i as u32));
            by_rng[a.rng.0 as usize].push(ArrowId(i as u32));
        }
    }

    GradedSystem {
        vertices,
        arrows,
        cap,
        mode,
        vertex_ids,
        arrow_ids,
        table,
        splits,
        degree_start,
        by_src,
        by_rng,
        path_cache: OnceLock::new(),
    }
}

fn sorted_vertices(vertices: &[String]) -> Result<Vec<String>, BuildError> {
    let mut vs: Vec<String> = vertices.to_vec();
    vs.sort();
    for w in vs.windows(2) {
        if w[0] == w[1] {
            return Err(BuildError::DuplicateName(w[0].clone()));
        }
    }
    Ok(vs)
}

/// Builds the degree-truncated path category on the given generators.
///
/// Arrows of degree `n` are all composable generator words of total degree
/// `n <= cap`, named by their word joined with `·`; composition is word
/// concatenation.
pub fn build_free(
    generators: &[Generator],
    vertices: &[String],
    cap: u32,
) -> Result<GradedSystem, BuildError> {
    let vertices = sorted_vertices(vertices)?;
    let vid: HashMap<&str, VertexId> = vertices
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), VertexId(i as u32)))
        .collect();

    // `·` is how word names are synthesized below; a declared name carrying
    // it could collide with a composite.
    for n in vertices
        .iter()
        .map(String::as_str)
        .chain(generators.iter().map(|g| g.name.as_str()))
    {
        if n.contains('·') {
            return Err(BuildError::ReservedName(n.to_string()));
        }
    }
    let mut names: Vec<&str> = vertices.iter().map(String::as_str).collect();
    for g in generators {
        if g.degree == 0 {
            return Err(BuildError::ZeroDegreeArrow(g.name.clone()));
        }
        if g.degree > cap {
            return Err(BuildError::CapTooSmall {
                name: g.name.clone(),
                degree: g.degree,
                cap,
            });
        }
        names.push(&g.name);
    }
    names.sort_unstable();
    for w in names.windows(2) {
        if w[0] == w[1] {
            return Err(BuildError::DuplicateName(w[0].to_string()));
        }
    }

    let mut gens: Vec<(String, u32, VertexId, VertexId)> = Vec::new();
    for g in generators {
        let src = *vid
            .get(g.src.as_str())
            .ok_or_else(|| BuildError::UnknownVertex(g.src.clone()))?;
        let rng = *vid
            .get(g.rng.as_str())
            .ok_or_else(|| BuildError::UnknownVertex(g.rng.clone()))?;
        gens.push((g.name.clone(), g.degree, src, rng));
    }
    gens.sort();

    // Words are stored as generator-index sequences; word[0] is the
    // outermost (last applied) generator, so src(word) = src(last),
    // rng(word) = rng(first).
    struct Word {
        gens: Vec<usize>,
        src: VertexId,
        rng: VertexId,
    }
    let mut arrows: Vec<Arrow> = vertices
        .iter()
        .enumerate()
        .map(|(i, n)| Arrow {
            name: n.clone(),
            degree: 0,
            src: VertexId(i as u32),
            rng: VertexId(i as u32),
        })
        .collect();
    let mut words: Vec<Vec<Word>> = vec![Vec::new()]; // by degree; degree 0 unused
    let mut word_index: HashMap<Vec<usize>, u32> = HashMap::new();
    for d in 1..=cap {
        let mut layer = Vec::new();
        for (gi, g) in gens.iter().enumerate() {
            if g.1 == d {
                layer.push(Word {
                    gens: vec![gi],
                    src: g.2,
                    rng: g.3,
                });
            } else if g.1 < d {
                let rest = d - g.1;
                for w in &words[rest as usize] {
                    if w.rng == g.2 {
                        let mut seq = vec![gi];
                        seq.extend(&w.gens);
                        layer.push(Word {
                            gens: seq,
                            src: w.src,
                            rng: g.3,
                        });
                    }
                }
            }
        }
        // Layer order is provisional; `assemble` re-sorts all arrows into
        // the canonical (degree, name) order and remaps the table.
        for w in &layer {
            let name = w
                .gens
                .iter()
                .map(|&gi| gens[gi].0.as_str())
                .collect::<Vec<_>>()
                .join("·");
            if arrows.len() >= ARROW_LIMIT {
                return Err(BuildError::TooManyArrows { limit: ARROW_LIMIT });
            }
            word_index.insert(w.gens.clone(), arrows.len() as u32);
            arrows.push(Arrow {
                name,
                degree: d,
                src: w.src,
                rng: w.rng,
            });
        }
        words.push(layer);
    }

    // Composition entries: every proper split of every word.
    let mut entries = Vec::new();
    for layer in words.iter().skip(1) {
        for w in layer {
            if w.gens.len() < 2 {
                continue;
            }
            let z = word_index[&w.gens];
            for cut in 1..w.gens.len() {
                let x = word_index[&w.gens[..cut].to_vec()];
                let y = word_index[&w.gens[cut..].to_vec()];
                entries.push((x, y, z));
            }
        }
    }

    Ok(assemble(RawSystem {
        vertices,
        arrows,
        cap,
        mode: Mode::Free,
        entries,
    }))
}

/// Builds a table-mode system carrying exactly the listed data.
///
/// Only per-entry well-formedness is enforced here (declared names, matched
/// endpoints, additive degrees). Whether the data satisfies the axioms of a
/// weak system is [`validate`]'s job, not the builder's.
pub fn build_table(
    vertices: &[String],
    arrow_decls: &[ArrowDecl],
    entries: &[MulEntry],
    cap: u32,
) -> Result<GradedSystem, BuildError> {
    let vertices = sorted_vertices(vertices)?;
    let vid: HashMap<&str, VertexId> = vertices
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), VertexId(i as u32)))
        .collect();

    let mut arrows: Vec<Arrow> = vertices
        .iter()
        .enumerate()
        .map(|(i, n)| Arrow {
            name: n.clone(),
            degree: 0,
            src: VertexId(i as u32),
            rng: VertexId(i as u32),
        })
        .collect();
    let mut seen: HashMap<&str, usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    for a in arrow_decls {
        if a.degree == 0 {
            return Err(BuildError::ZeroDegreeArrow(a.name.clone()));
        }
        if a.degree > cap {
            return Err(BuildError::CapTooSmall {
                name: a.name.clone(),
                degree: a.degree,
                cap,
            });
        }
        if seen.insert(&a.name, arrows.len()).is_some() {
            return Err(BuildError::DuplicateName(a.name.clone()));
        }
        let src = *vid
            .get(a.src.as_str())
            .ok_or_else(|| BuildError::UnknownVertex(a.src.clone()))?;
        let rng = *vid
            .get(a.rng.as_str())
            .ok_or_else(|| BuildError::UnknownVertex(a.rng.clone()))?;
        arrows.push(Arrow {
            name: a.name.clone(),
            degree: a.degree,
            src,
            rng,
        });
    }

    let mut table_entries = Vec::new();
    let mut entry_keys: HashMap<(u32, u32), (String, String, String)> = HashMap::new();
    for e in entries {
        let malformed = |reason: &str| BuildError::MalformedEntry {
            left: e.left.clone(),
            right: e.right.clone(),
            result: e.result.clone(),
            reason: reason.to_string(),
        };
        let look = |name: &str| -> Result<u32, BuildError> {
            seen.get(name)
                .map(|&i| i as u32)
                .ok_or_else(|| BuildError::UnknownArrow(name.to_string()))
        };
        let (x, y, z) = (look(&e.left)?, look(&e.right)?, look(&e.result)?);
        let (ax, ay, az) = (
            arrows[x as usize].clone(),
            arrows[y as usize].clone(),
            arrows[z as usize].clone(),
        );
        if ax.src != ay.rng {
            return Err(malformed("src of left factor differs from rng of right"));
        }
        if ax.degree + ay.degree != az.degree {
            return Err(malformed("degrees do not add up"));
        }
        if ax.degree == 0 || ay.degree == 0 {
            // Identity composition is canonical; only the canonical entry is
            // accepted, and it is not stored.
            let canonical = if ax.degree == 0 { y == z } else { x == z };
            if !canonical {
                return Err(malformed("identity entry contradicts the unit law"));
            }
            continue;
        }
        if let Some(prev) =
            entry_keys.insert((x, y), (e.left.clone(), e.right.clone(), e.result.clone()))
        {
            let _ = prev;
            return Err(malformed("duplicate entry for this pair"));
        }
        table_entries.push((x, y, z));
    }

    Ok(assemble(RawSystem {
        vertices,
        arrows,
        cap,
        mode: Mode::Table,
        entries: table_entries,
    }))
}

/// Checks every finitely checkable axiom of a weak system on the carried
/// data: totality and injectivity of each `mu_{n,m}` within the cap,
/// endpoint compatibility of composites, associativity, and unit laws.
///
/// Pure and idempotent; violations are report content, not errors.
pub fn validate(sys: &GradedSystem) -> ValidationReport {
    let mut violations = Vec::new();

    // Endpoint compatibility and totality, scanning endpoint-composable
    // positive pairs in canonical order.
    for x in sys.all_arrows() {
        if sys.is_identity(x) {
            continue;
        }
        for &y in sys.positive_with_rng(sys.src(x)) {
            if sys.degree(x) + sys.degree(y) > sys.cap {
                continue;
            }
            match sys.table.get(&(x, y)) {
                None => violations.push(Violation::MissingComposite { x, y }),
                Some(&z) => {
                    if sys.rng(z) != sys.rng(x) || sys.src(z) != sys.src(y) {
                        violations.push(Violation::EndpointMismatch { x, y, z });
                    }
                }
            }
        }
    }

    // Injectivity of each mu_{n,m}: group table images by (deg x, deg y, z).
    {
        let mut seen: HashMap<(u32, u32, ArrowId), (ArrowId, ArrowId)> = HashMap::new();
        let mut keys: Vec<(ArrowId, ArrowId)> = sys.table.keys().copied().collect();
        keys.sort();
        for (x, y) in keys {
            let z = sys.table[&(x, y)];
            let k = (sys.degree(x), sys.degree(y), z);
            if let Some(&first) = seen.get(&k) {
                violations.push(Violation::NotInjective {
                    first,
                    second: (x, y),
                    result: z,
                });
            } else {
                seen.insert(k, (x, y));
            }
        }
    }

    // Associativity within the cap, iterating table entries then extensions.
    {
        let mut keys: Vec<(ArrowId, ArrowId)> = sys.table.keys().copied().collect();
        keys.sort();
        for (x, y) in keys {
            let u = sys.table[&(x, y)];
            for &z in sys.positive_with_rng(sys.src(y)) {
                if sys.degree(u) + sys.degree(z) > sys.cap {
                    continue;
                }
                let left = sys.compose(u, z);
                let right = sys.compose(y, z).and_then(|yz| sys.compose(x, yz));
                if left != right {
                    violations.push(Violation::NotAssociative {
                        x,
                        y,
                        z,
                        left,
                        right,
                    });
                }
            }
        }
    }

    // Unit laws hold by construction (identity composition is canonical and
    // builders reject contradicting entries); verified anyway.
    for x in sys.all_arrows() {
        let lid = sys.identity_of(sys.rng(x));
        let rid = sys.identity_of(sys.src(x));
        if sys.compose(lid, x) != Some(x) || sys.compose(x, rid) != Some(x) {
            violations.push(Violation::UnitLaw { x });
        }
    }

    ValidationReport {
        violations,
        checked_cap: sys.cap,
    }
}

/// Decides whether the system has unique factorization into irreducibles
/// within the cap, i.e. whether it is the (truncated) path category of the
/// directed graph of its irreducible arrows.
pub fn check_path_category(sys: &GradedSystem) -> Result<PathCategoryVerdict, GraphError> {
    sys.path_verdict().clone()
}

fn check_path_category_uncached(sys: &GradedSystem) -> Result<PathCategoryVerdict, GraphError> {
    let report = validate(sys);
    if !report.passed() {
        return Err(GraphError::InvalidSystem(Box::new(report)));
    }

    // Irreducible = positive degree, not the value of any positive pair.
    let irreducibles: Vec<ArrowId> = sys
        .all_arrows()
        .filter(|&a| !sys.is_identity(a) && sys.positive_splits(a).is_empty())
        .collect();

    // Walk composable irreducible words by ascending degree, in lexicographic
    // word order, and record the arrow each word evaluates to. The first
    // value collision is the canonical witness. Every positive arrow is the
    // value of some word (non-irreducibles split and recursion terminates on
    // degrees), so bijectivity reduces to injectivity here.
    let mut word_of: HashMap<ArrowId, Vec<ArrowId>> = HashMap::new();
    let mut by_degree: Vec<Vec<ArrowId>> = vec![Vec::new(); sys.cap as usize + 1];
    // Seed: identity words at degree 0 are implicit; layer d holds values.
    for d in 1..=sys.cap {
        let mut layer: Vec<(Vec<ArrowId>, ArrowId)> = Vec::new();
        for &g in &irreducibles {
            let dg = sys.degree(g);
            if dg == d {
                layer.push((vec![g], g));
            } else if dg < d {
                let rest = d - dg;
                for &val in &by_degree[rest as usize] {
                    if sys.rng(val) == sys.src(g) {
                        let composed = sys
                            .compose(g, val)
                            .expect("totality was validated, composite must exist");
                        let mut word = vec![g];
                        word.extend(&word_of[&val]);
                        layer.push((word, composed));
                    }
                }
            }
        }
        layer.sort();
        for (word, value) in layer {
            if let Some(prev) = word_of.get(&value) {
                if *prev != word {
                    return Ok(PathCategoryVerdict {
                        is_path_category: false,
                        irreducibles,
                        witness: Some(DoubleFactorization {
                            arrow: value,
                            first: prev.clone(),
                            second: word,
                        }),
                        cap: sys.cap,
                    });
                }
            } else {
                word_of.insert(value, word);
                by_degree[d as usize].push(value);
            }
        }
    }

    debug_assert!(sys
        .all_arrows()
        .filter(|&a| !sys.is_identity(a))
        .all(|a| word_of.contains_key(&a)));

    Ok(PathCategoryVerdict {
        is_path_category: true,
        irreducibles,
        witness: None,
        cap: sys.cap,
    })
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EndpointMismatch { x, y, z } => {
                write!(f, "endpoint mismatch at #{}·#{} = #{}", x.0, y.0, z.0)
            }
            Violation::NotInjective {
                first,
                second,
                result,
            } => write!(
                f,
                "injectivity fails: (#{},#{}) and (#{},#{}) both give #{}",
                first.0 .0, first.1 .0, second.0 .0, second.1 .0, result.0
            ),
            Violation::MissingComposite { x, y } => {
                write!(f, "missing composite for #{}·#{}", x.0, y.0)
            }
            Violation::NotAssociative { x, y, z, .. } => {
                write!(f, "associativity fails at (#{},#{},#{})", x.0, y.0, z.0)
            }
            Violation::UnitLaw { x } => write!(f, "unit law fails at #{}", x.0),
        }
    }
}
