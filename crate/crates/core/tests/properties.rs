//! Randomized invariant checks over the seeded corpora. Everything here is
//! an exact identity; the randomness only picks the instances.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use pps_core::corpus::{
    random_cycle_system, random_element, random_free_system, random_scalar, CorpusConfig,
};
use pps_core::elements::{
    check_isometry, hilbert_bimodule_check, inner_product, left_inner_product, module_action,
    BimoduleVerdict, IdealMask, Side, VertexFunction,
};
use pps_core::fell::{build_fell, check_extendable, fell_covariance_ideal, verify_fell_axioms};
use pps_core::fock::{check_representation_condition, creation_operator};
use pps_core::graded_graph::{check_path_category, validate};
use pps_core::ideals::{
    enumerate_invariant, is_invariant, katsura_ideal, quotient, restrict_hereditary,
};
use pps_core::Element;

fn free_corpus(seed: u64, count: usize) -> Vec<pps_core::GradedSystem> {
    let mut rng = StdRng::seed_from_u64(seed);
    let config = CorpusConfig {
        arrow_budget: 400,
        ..CorpusConfig::default()
    };
    (0..count)
        .map(|_| random_free_system(&mut rng, &config))
        .collect()
}

fn cycle_corpus(seed: u64, count: usize) -> Vec<pps_core::GradedSystem> {
    let mut rng = StdRng::seed_from_u64(seed);
    let config = CorpusConfig {
        max_cap: 6,
        ..CorpusConfig::default()
    };
    (0..count)
        .map(|_| random_cycle_system(&mut rng, &config))
        .collect()
}

#[test]
fn inner_product_positive_definite() {
    let mut rng = StdRng::seed_from_u64(101);
    for sys in free_corpus(11, 20) {
        for _ in 0..5 {
            let d = rng.gen_range(0..=sys.cap());
            let x = random_element(&mut rng, &sys, d);
            let ip = inner_product(&sys, &x, &x).unwrap();
            assert!(ip.is_nonneg_real(), "⟨x|x⟩ must be non-negative");
            assert_eq!(ip.is_zero(), x.is_zero(), "⟨x|x⟩ = 0 iff x = 0");
        }
    }
}

#[test]
fn right_action_twists_inner_product() {
    // ⟨x·a | y⟩ = conj(a)·⟨x|y⟩ pointwise, for basis elements and masks.
    let mut rng = StdRng::seed_from_u64(102);
    for sys in free_corpus(12, 12) {
        for _ in 0..6 {
            let d = rng.gen_range(0..=sys.cap());
            let arrows: Vec<_> = sys.arrows_of_degree(d).collect();
            if arrows.is_empty() {
                continue;
            }
            let x = Element::basis(&sys, arrows[rng.gen_range(0..arrows.len())]);
            let y = Element::basis(&sys, arrows[rng.gen_range(0..arrows.len())]);
            let mut a = VertexFunction::zero();
            for v in sys.vertex_ids() {
                if rng.gen_bool(0.5) {
                    a.set(v, random_scalar(&mut rng));
                }
            }
            let lhs = inner_product(&sys, &module_action(&sys, &a, &x, Side::Right), &y).unwrap();
            let rhs = a
                .conj()
                .pointwise_mul(&inner_product(&sys, &x, &y).unwrap());
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn multiplication_is_isometric_on_validated_systems() {
    for sys in free_corpus(13, 25) {
        assert!(validate(&sys).passed());
        for n in 0..=sys.cap() {
            for m in 0..=(sys.cap() - n) {
                let verdict = check_isometry(&sys, n, m).unwrap();
                assert!(verdict.isometric, "witness: {:?}", verdict.witness);
            }
        }
    }
}

#[test]
fn representation_condition_holds_on_random_free_systems() {
    for sys in free_corpus(14, 25) {
        for trunc in [sys.cap() / 2, sys.cap()] {
            assert!(check_representation_condition(&sys, trunc).unwrap().holds);
        }
    }
}

#[test]
fn free_irreducibles_are_exactly_the_generators() {
    for sys in free_corpus(24, 20) {
        let verdict = check_path_category(&sys).unwrap();
        assert!(verdict.is_path_category);
        // generators are the single-letter words; longer words carry `·`
        for &a in &verdict.irreducibles {
            assert!(!sys.arrow_name(a).contains('·'));
        }
        let generator_count = sys
            .all_arrows()
            .filter(|&a| !sys.is_identity(a) && !sys.arrow_name(a).contains('·'))
            .count();
        assert_eq!(verdict.irreducibles.len(), generator_count);
    }
}

#[test]
fn creation_operators_shift_degrees_and_compose() {
    let mut rng = StdRng::seed_from_u64(105);
    for sys in free_corpus(15, 10) {
        let trunc = sys.cap();
        for _ in 0..4 {
            let dn = rng.gen_range(0..=trunc / 2);
            let dm = rng.gen_range(0..=(trunc - dn).min(trunc / 2));
            let x = random_element(&mut rng, &sys, dn);
            let y = random_element(&mut rng, &sys, dm);
            let sx = creation_operator(&sys, trunc, &x).unwrap();
            let sy = creation_operator(&sys, trunc, &y).unwrap();
            let composed = sx.compose(&sy);
            assert_eq!(composed.shift(), (dn + dm) as i64);
            // degree-homogeneity of every block
            for (k, block) in composed.blocks() {
                for (r, c) in block.keys() {
                    assert_eq!(sys.degree(*c), k);
                    assert_eq!(sys.degree(*r) as i64, k as i64 + composed.shift());
                }
            }
        }
    }
}

#[test]
fn invariant_masks_form_a_lattice() {
    for sys in free_corpus(16, 10) {
        if sys.vertex_count() > 6 {
            continue;
        }
        let masks = enumerate_invariant(&sys).unwrap();
        for a in &masks {
            for b in &masks {
                assert!(is_invariant(&sys, &a.intersection(b)));
                assert!(is_invariant(&sys, &a.union(b)));
            }
        }
    }
}

#[test]
fn quotients_by_invariant_masks_revalidate() {
    for sys in free_corpus(17, 12) {
        let masks = enumerate_invariant(&sys).unwrap();
        for w in masks {
            let q = quotient(&sys, &w).unwrap();
            assert!(validate(&q).passed());
            assert!(check_path_category(&q).unwrap().is_path_category);
            assert!(check_representation_condition(&q, q.cap()).unwrap().holds);
        }
    }
}

#[test]
fn hereditary_restrictions_stay_partial_product_systems() {
    // restriction needs no invariance: any vertex subset works, and the
    // restricted system keeps unique factorization and the Fock identity
    let mut rng = StdRng::seed_from_u64(25);
    for sys in free_corpus(26, 12) {
        for _ in 0..4 {
            let members: Vec<_> = sys.vertex_ids().filter(|_| rng.gen_bool(0.6)).collect();
            let u = IdealMask::from_ids(members);
            let res = restrict_hereditary(&sys, &u);
            assert!(validate(&res).passed());
            assert!(check_path_category(&res).unwrap().is_path_category);
            assert!(
                check_representation_condition(&res, res.cap())
                    .unwrap()
                    .holds
            );
        }
    }
}

#[test]
fn glued_squares_refute_the_covariance_identity() {
    // The square family: one degree-D arrow e with two factorizations
    // e = a·b = c·d where the ordered degree splits differ. Every member
    // is a valid weak system, none is a path category, and the covariance
    // identity fails on each; the free (unglued) version satisfies both.
    // Taken together with the free corpus this exercises the equivalence
    // "path category <=> Fock covariance" in both directions.
    use pps_core::graded_graph::{build_free, build_table, ArrowDecl, Generator, MulEntry};

    let mut rng = StdRng::seed_from_u64(31);
    let vs: Vec<String> = ["v0", "v1", "v2", "v3"].map(String::from).to_vec();
    let mut tested = 0;
    while tested < 40 {
        let da = rng.gen_range(1..=4u32);
        let db = rng.gen_range(1..=4u32);
        let total = da + db;
        let dc = rng.gen_range(1..total.min(5));
        let dd = total - dc;
        if (da, db) == (dc, dd) {
            continue; // equal splits would break per-pair injectivity
        }
        let decls = [
            ("a", da, "v1", "v3"),
            ("b", db, "v0", "v1"),
            ("c", dc, "v2", "v3"),
            ("d", dd, "v0", "v2"),
        ];
        let arrows: Vec<ArrowDecl> = decls
            .iter()
            .map(|&(n, deg, s, r)| ArrowDecl {
                name: n.into(),
                degree: deg,
                src: s.into(),
                rng: r.into(),
            })
            .chain(std::iter::once(ArrowDecl {
                name: "e".into(),
                degree: total,
                src: "v0".into(),
                rng: "v3".into(),
            }))
            .collect();
        let muls = vec![
            MulEntry {
                left: "a".into(),
                right: "b".into(),
                result: "e".into(),
            },
            MulEntry {
                left: "c".into(),
                right: "d".into(),
                result: "e".into(),
            },
        ];
        let glued = build_table(&vs, &arrows, &muls, total).unwrap();
        assert!(validate(&glued).passed());
        assert!(!check_path_category(&glued).unwrap().is_path_category);
        let verdict = check_representation_condition(&glued, total).unwrap();
        assert!(
            !verdict.holds,
            "glued square ({da},{db})/({dc},{dd}) must fail"
        );
        let w = verdict.witness.unwrap();
        // the witness element really separates the two sides on the nose
        assert_ne!(w.lhs, w.rhs);

        let free_gens: Vec<Generator> = decls
            .iter()
            .map(|&(n, deg, s, r)| Generator {
                name: n.into(),
                degree: deg,
                src: s.into(),
                rng: r.into(),
            })
            .collect();
        let free = build_free(&free_gens, &vs, total).unwrap();
        assert!(check_path_category(&free).unwrap().is_path_category);
        assert!(check_representation_condition(&free, total).unwrap().holds);
        tested += 1;
    }
}

#[test]
fn systems_are_shareable_across_threads() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<pps_core::GradedSystem>();
    assert_send_sync::<pps_core::Element>();
    assert_send_sync::<pps_core::toeplitz::ToeplitzElement>();

    let sys = std::sync::Arc::new(free_corpus(27, 1).pop().unwrap());
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let sys = std::sync::Arc::clone(&sys);
            std::thread::spawn(move || {
                check_representation_condition(&sys, sys.cap())
                    .unwrap()
                    .holds
            })
        })
        .collect();
    for h in handles {
        assert!(h.join().unwrap());
    }
}

#[test]
fn bimodule_left_inner_products_are_compatible() {
    // Cycle systems have Hilbert-bimodule fibers at every degree; the left
    // inner product must satisfy ⟨⟨x|y⟩⟩·z = x·⟨y|z⟩ on basis triples.
    for sys in cycle_corpus(18, 12) {
        for n in 1..=sys.cap() {
            let verdict = hilbert_bimodule_check(&sys, n).unwrap();
            assert!(matches!(verdict, BimoduleVerdict::Bimodule { .. }));
            let ids: Vec<_> = sys.arrows_of_degree(n).collect();
            for &x in &ids {
                for &y in &ids {
                    for &z in &ids {
                        let (ex, ey, ez) = (
                            Element::basis(&sys, x),
                            Element::basis(&sys, y),
                            Element::basis(&sys, z),
                        );
                        let lhs = module_action(
                            &sys,
                            &left_inner_product(&sys, &ex, &ey).unwrap(),
                            &ez,
                            Side::Left,
                        );
                        let rhs = module_action(
                            &sys,
                            &inner_product(&sys, &ey, &ez).unwrap(),
                            &ex,
                            Side::Right,
                        );
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }
}

#[test]
fn katsura_ideal_matches_left_inner_supports() {
    // When every positive fiber is a Hilbert bimodule, the Katsura ideal is
    // the union of the supports of the left inner products ⟨⟨E_n|E_n⟩⟩.
    for sys in cycle_corpus(19, 12) {
        let mut union = IdealMask::empty();
        for n in 1..=sys.cap() {
            match hilbert_bimodule_check(&sys, n).unwrap() {
                BimoduleVerdict::Bimodule { left_inner } => {
                    for (_, vf) in left_inner {
                        for v in vf.support() {
                            union.insert(v);
                        }
                    }
                }
                BimoduleVerdict::NotBimodule { .. } => unreachable!("cycles are bimodules"),
            }
        }
        assert_eq!(union, katsura_ideal(&sys));
    }
}

#[test]
fn extendable_corpus_builds_verified_bundles() {
    for sys in cycle_corpus(20, 8) {
        let verdict = check_extendable(&sys).unwrap();
        assert!(verdict.extendable, "witness: {:?}", verdict.witness);
        // keep the bound small so the exhaustive triple check stays cheap
        let bound = sys.cap().min(3);
        let bundle = build_fell(&sys, bound).unwrap();
        let report = verify_fell_axioms(&sys, &bundle);
        assert!(report.passed(), "failure: {:?}", report.failure);
        if bound == sys.cap() {
            assert_eq!(fell_covariance_ideal(&sys, &bundle), katsura_ideal(&sys));
        }
    }
}

#[test]
fn covariance_equals_katsura_at_full_bound() {
    for sys in cycle_corpus(21, 8) {
        let bundle = build_fell(&sys, sys.cap()).unwrap();
        assert_eq!(fell_covariance_ideal(&sys, &bundle), katsura_ideal(&sys));
    }
}

#[test]
fn scalar_scaling_is_sesquilinear_in_inner_products() {
    let mut rng = StdRng::seed_from_u64(22);
    for sys in free_corpus(23, 8) {
        let d = sys.cap().min(2);
        let x = random_element(&mut rng, &sys, d);
        let y = random_element(&mut rng, &sys, d);
        let s = random_scalar(&mut rng);
        let lhs = inner_product(&sys, &x.scale(&s), &y).unwrap();
        let rhs = inner_product(&sys, &x, &y).unwrap().scale(&s.conj());
        assert_eq!(lhs, rhs);
        let lhs2 = inner_product(&sys, &x, &y.scale(&s)).unwrap();
        let rhs2 = inner_product(&sys, &x, &y).unwrap().scale(&s);
        assert_eq!(lhs2, rhs2);
    }
}
