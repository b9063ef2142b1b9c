//! Seeded random inputs for exercising the verifiers.
//!
//! Free systems drawn here stay within desk scale (vertex, generator,
//! degree and cap bounds, plus a hard arrow budget enforced by shrinking
//! the cap before building). Cycle systems are disjoint unions of
//! degree-labelled cycles; their backward walks are deterministic, which
//! makes every one of them extendable; they are the corpus for the
//! Fell-bundle properties.

use rand::rngs::StdRng;
use rand::Rng;

use crate::elements::Element;
use crate::graded_graph::{build_free, Generator, GradedSystem};
use crate::scalar::Scalar;
use crate::toeplitz::{CompactBlock, FixedPointElement, Generator as TGen, ToeplitzElement};

/// Bounds for [`random_free_system`].
#[derive(Clone, Copy, Debug)]
pub struct CorpusConfig {
    pub max_vertices: usize,
    pub max_generators: usize,
    pub max_degree: u32,
    pub max_cap: u32,
    /// Budget on the total arrow count; the cap shrinks until it fits.
    pub arrow_budget: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            max_vertices: 6,
            max_generators: 8,
            max_degree: 3,
            max_cap: 8,
            arrow_budget: 1_500,
        }
    }
}

/// Number of arrows a free build would produce, without building it.
fn free_arrow_count(gens: &[(u32, usize, usize)], n_vertices: usize, cap: u32) -> u64 {
    // counts[d][v] = composable words of degree d with range v
    let mut counts = vec![vec![0u64; n_vertices]; cap as usize + 1];
    counts[0].fill(1);
    let mut total = n_vertices as u64;
    for d in 1..=cap as usize {
        for &(dg, src, rng) in gens {
            if (dg as usize) <= d {
                let add = counts[d - dg as usize][src];
                counts[d][rng] = counts[d][rng].saturating_add(add);
            }
        }
        total = counts[d]
            .iter()
            .fold(total, |acc, &c| acc.saturating_add(c));
    }
    total
}

/// A random free system within the config bounds.
pub fn random_free_system(rng: &mut StdRng, config: &CorpusConfig) -> GradedSystem {
    let n_vertices = rng.gen_range(1..=config.max_vertices);
    let vertices: Vec<String> = (0..n_vertices).map(|i| format!("v{i}")).collect();
    let n_gens = rng.gen_range(1..=config.max_generators);
    let gens: Vec<(u32, usize, usize)> = (0..n_gens)
        .map(|_| {
            (
                rng.gen_range(1..=config.max_degree),
                rng.gen_range(0..n_vertices),
                rng.gen_range(0..n_vertices),
            )
        })
        .collect();
    let max_degree = gens.iter().map(|g| g.0).max().unwrap_or(1);
    let mut cap = rng.gen_range(max_degree.max(2)..=config.max_cap.max(max_degree.max(2)));
    while cap > max_degree && free_arrow_count(&gens, n_vertices, cap) > config.arrow_budget {
        cap -= 1;
    }
    let generators: Vec<Generator> = gens
        .iter()
        .enumerate()
        .map(|(i, &(degree, src, rng_v))| Generator {
            name: format!("g{i}"),
            degree,
            src: vertices[src].clone(),
            rng: vertices[rng_v].clone(),
        })
        .collect();
    build_free(&generators, &vertices, cap).expect("corpus parameters are always buildable")
}

/// A random disjoint union of degree-labelled cycles; always extendable.
pub fn random_cycle_system(rng: &mut StdRng, config: &CorpusConfig) -> GradedSystem {
    let n_vertices = rng.gen_range(1..=config.max_vertices);
    let vertices: Vec<String> = (0..n_vertices).map(|i| format!("v{i}")).collect();
    // partition the vertices into cycles
    let mut order: Vec<usize> = (0..n_vertices).collect();
    for i in (1..order.len()).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let mut generators = Vec::new();
    let mut start = 0;
    while start < n_vertices {
        let len = rng.gen_range(1..=(n_vertices - start));
        for k in 0..len {
            let u = order[start + k];
            let w = order[start + (k + 1) % len];
            generators.push(Generator {
                name: format!("g{}", generators.len()),
                degree: rng.gen_range(1..=config.max_degree),
                src: vertices[u].clone(),
                rng: vertices[w].clone(),
            });
        }
        start += len;
    }
    let max_degree = generators.iter().map(|g| g.degree).max().unwrap_or(1);
    let cap = rng.gen_range(max_degree.max(2)..=config.max_cap.max(max_degree.max(2)));
    build_free(&generators, &vertices, cap).expect("cycle systems are always buildable")
}

/// A small random Gaussian rational, occasionally with denominator 2 or an
/// imaginary part.
pub fn random_scalar(rng: &mut StdRng) -> Scalar {
    let num = rng.gen_range(-3i64..=3);
    let den = if rng.gen_bool(0.3) { 2 } else { 1 };
    let im = if rng.gen_bool(0.4) {
        rng.gen_range(-2i64..=2)
    } else {
        0
    };
    Scalar::from_parts(num, den, im, 1)
}

fn random_nonzero_scalar(rng: &mut StdRng) -> Scalar {
    loop {
        let s = random_scalar(rng);
        if !s.is_zero() {
            return s;
        }
    }
}

/// A random element of one degree drawn from the system's arrows.
pub fn random_element(rng: &mut StdRng, sys: &GradedSystem, degree: u32) -> Element {
    let arrows: Vec<_> = sys.arrows_of_degree(degree).collect();
    let mut out = Element::zero(degree);
    if arrows.is_empty() {
        return out;
    }
    let terms = rng.gen_range(1..=arrows.len().min(3));
    for _ in 0..terms {
        let a = arrows[rng.gen_range(0..arrows.len())];
        out.add_term(a, &random_nonzero_scalar(rng));
    }
    out
}

/// A random source-matched generator pair `T[α,β]`, if the system has one
/// within the degree bound.
pub fn random_generator(rng: &mut StdRng, sys: &GradedSystem, max_degree: u32) -> Option<TGen> {
    let candidates: Vec<_> = sys.arrows_up_to(max_degree.min(sys.cap())).collect();
    if candidates.is_empty() {
        return None;
    }
    for _ in 0..64 {
        let alpha = candidates[rng.gen_range(0..candidates.len())];
        let beta = candidates[rng.gen_range(0..candidates.len())];
        if sys.src(alpha) == sys.src(beta) {
            return Some(TGen { alpha, beta });
        }
    }
    None
}

/// A random normal-form element with a few generator terms.
pub fn random_toeplitz(
    rng: &mut StdRng,
    sys: &GradedSystem,
    max_degree: u32,
    max_terms: usize,
) -> ToeplitzElement {
    let mut out = ToeplitzElement::zero();
    let terms = rng.gen_range(1..=max_terms.max(1));
    for _ in 0..terms {
        if let Some(g) = random_generator(rng, sys, max_degree) {
            out.add_term(g, &random_nonzero_scalar(rng));
        }
    }
    out
}

/// A random fixed-point element with blocks up to `top_degree`.
pub fn random_fixed_point(
    rng: &mut StdRng,
    sys: &GradedSystem,
    top_degree: u32,
) -> FixedPointElement {
    let mut out = FixedPointElement::new();
    for d in 0..=top_degree.min(sys.cap()) {
        if rng.gen_bool(0.5) {
            continue;
        }
        let arrows: Vec<_> = sys.arrows_of_degree(d).collect();
        if arrows.is_empty() {
            continue;
        }
        let mut block = CompactBlock::zero(d);
        for _ in 0..rng.gen_range(1..=2) {
            let a = arrows[rng.gen_range(0..arrows.len())];
            let b = arrows[rng.gen_range(0..arrows.len())];
            if sys.src(a) == sys.src(b) {
                block.add_entry(a, b, &random_nonzero_scalar(rng));
            }
        }
        if !block.is_zero() {
            out.add_block(block);
        }
    }
    out
}
