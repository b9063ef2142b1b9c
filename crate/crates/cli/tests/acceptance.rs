//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Run with `cargo test -p pps-cli --test acceptance -- --nocapture` to see
//! the per-criterion lines. Everything here is exact (zero tolerance) and
//! the randomized criteria use a fixed-seed corpus so runs are reproducible.

use std::collections::BTreeMap;
use std::process::Command;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use pps_cli::specfile::parse_spec;
use pps_core::corpus::{
    random_fixed_point, random_free_system, random_generator, random_scalar, random_toeplitz,
    CorpusConfig,
};
use pps_core::elements::IdealMask;
use pps_core::fell::{
    build_fell, check_extendable, fell_covariance_ideal, verify_fell_axioms, ExtendObstruction,
};
use pps_core::fock::{check_representation_condition, check_weak_representation};
use pps_core::graded_graph::{check_path_category, validate, GradedSystem};
use pps_core::ideals::{
    ck_relations, enumerate_invariant, jmax_global, katsura_ideal, quotient, GaugeIdealSpec,
    GlobalVerdict,
};
use pps_core::scalar::Scalar;
use pps_core::toeplitz::{
    adjoint, evaluate_on_fock, gauge_support, make_generator, multiply, spectral_project,
    Generator, ToeplitzElement,
};

const CORPUS_SEED: u64 = 0x5EED_CAFE;
const CORPUS_SIZE: usize = 200;

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn load_fixture(name: &str) -> GradedSystem {
    let text = std::fs::read_to_string(fixture(name)).expect("fixture readable");
    parse_spec(&text)
        .expect("fixture parses")
        .build()
        .expect("fixture builds")
}

/// Runs the CLI binary with `--machine` and parses the key-value output.
fn run_machine(args: &[&str]) -> (i32, BTreeMap<String, String>) {
    let output = Command::new(env!("CARGO_BIN_EXE_pps"))
        .args(args)
        .arg("--machine")
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(output.stdout).expect("utf-8 output");
    let mut map = BTreeMap::new();
    for line in stdout.lines() {
        if let Some((k, v)) = line.split_once('=') {
            map.insert(k.to_string(), v.to_string());
        }
    }
    (output.status.code().unwrap_or(-1), map)
}

/// The fixed random corpus shared by the randomized criteria.
fn corpus() -> Vec<GradedSystem> {
    let mut rng = StdRng::seed_from_u64(CORPUS_SEED);
    let config = CorpusConfig::default();
    (0..CORPUS_SIZE)
        .map(|_| random_free_system(&mut rng, &config))
        .collect()
}

/// Criterion 1: the commutative-square counterexample, via the CLI.
/// `repcheck --trunc 4` refutes the covariance identity with the witness
/// (x=a, y=c, basis=d), LHS = δ_b, RHS = 0; `pathcat` reports the double
/// factorization e = a·b = c·d. Exit code 1 in both cases.
#[test]
fn criterion_01_commutative_square_counterexample() {
    let square = fixture("commutative_square.pps");
    let (code, kv) = run_machine(&["repcheck", "--trunc", "4", &square]);
    assert_eq!(code, 1);
    assert_eq!(kv["status"], "refuted");
    assert_eq!(kv["witness.n"], "1");
    assert_eq!(kv["witness.x"], "a");
    assert_eq!(kv["witness.m"], "2");
    assert_eq!(kv["witness.y"], "c");
    assert_eq!(kv["witness.k"], "2");
    assert_eq!(kv["witness.basis"], "d");
    assert_eq!(kv["witness.lhs"], "(1)·δ_b");
    assert_eq!(kv["witness.rhs"], "0");

    let (code, kv) = run_machine(&["pathcat", &square]);
    assert_eq!(code, 1);
    assert_eq!(kv["witness.arrow"], "e");
    assert_eq!(kv["witness.first"], "a·b");
    assert_eq!(kv["witness.second"], "c·d");
    println!("criterion 1 PASS: square counterexample refuted with the exact witness");
}

/// Criterion 2: on 200 random free systems (≤6 vertices, ≤8 generators,
/// degrees ≤3, cap ≤8) validation, the path-category check, the weak
/// representation identities and the covariance identity all pass.
#[test]
fn criterion_02_path_category_soundness() {
    let systems = corpus();
    assert_eq!(systems.len(), CORPUS_SIZE);
    for sys in &systems {
        assert!(validate(sys).passed());
        let verdict = check_path_category(sys).expect("validated");
        assert!(verdict.is_path_category);
        assert!(check_weak_representation(sys, sys.cap())
            .expect("validated")
            .passed());
        assert!(
            check_representation_condition(sys, sys.cap())
                .expect("validated")
                .holds
        );
    }
    println!(
        "criterion 2 PASS: {} random free systems validate and satisfy both Fock identities",
        systems.len()
    );
}

/// A source-matched generator pair whose products stay within the cap.
fn bounded_pair(rng: &mut StdRng, sys: &GradedSystem) -> Option<(Generator, Generator)> {
    for _ in 0..128 {
        let x = random_generator(rng, sys, sys.cap())?;
        let y = random_generator(rng, sys, sys.cap())?;
        let alpha_ok = sys.degree(x.alpha) + sys.degree(y.alpha) <= sys.cap();
        let beta_ok = sys.degree(x.beta) + sys.degree(y.beta) <= sys.cap();
        if alpha_ok && beta_ok {
            return Some((x, y));
        }
    }
    None
}

/// Criterion 3: 1000 random generator-pair products agree with the
/// Fock-matrix oracle, and adjoints evaluate to conjugate transposes.
/// Products are compared on the compression window `cap − maxdeg`, where
/// the truncated product captures every contribution exactly.
#[test]
fn criterion_03_toeplitz_oracle_equivalence() {
    let systems = corpus();
    let mut rng = StdRng::seed_from_u64(CORPUS_SEED ^ 3);
    let mut checked = 0usize;
    let mut sys_iter = systems.iter().cycle();
    while checked < 1000 {
        let sys = sys_iter.next().unwrap();
        let Some((gx, gy)) = bounded_pair(&mut rng, sys) else {
            continue;
        };
        let x = make_generator(sys, gx.alpha, gx.beta)
            .element
            .scale(&random_scalar(&mut rng));
        let y = make_generator(sys, gy.alpha, gy.beta)
            .element
            .scale(&random_scalar(&mut rng));
        let product = multiply(sys, &x, &y).expect("degrees were bounded");
        let maxdeg = x.max_path_degree(sys).max(y.max_path_degree(sys));
        let window = sys.cap() - maxdeg;
        let mx = evaluate_on_fock(sys, &x, sys.cap()).unwrap();
        let my = evaluate_on_fock(sys, &y, sys.cap()).unwrap();
        let oracle = mx.matmul(&my).compress(sys, window);
        let direct = evaluate_on_fock(sys, &product, window).unwrap();
        assert_eq!(oracle, direct, "product oracle mismatch");

        let adj = adjoint(&x);
        let madj = evaluate_on_fock(sys, &adj, sys.cap()).unwrap();
        assert_eq!(madj, mx.conj_transpose(), "adjoint oracle mismatch");
        checked += 1;
    }
    println!("criterion 3 PASS: 1000 generator products match the Fock-matrix oracle exactly");
}

/// Exact rank of a family of sparse rational matrices (flattened to sparse
/// row vectors), by Gaussian elimination over the Gaussian rationals.
fn exact_rank(rows: Vec<BTreeMap<(u32, u32), Scalar>>) -> usize {
    let mut pivots: BTreeMap<(u32, u32), BTreeMap<(u32, u32), Scalar>> = BTreeMap::new();
    let mut rank = 0usize;
    for mut row in rows {
        while let Some((&lead, _)) = row.iter().next() {
            match pivots.get(&lead) {
                None => {
                    let lead_val = row[&lead].clone();
                    let inv = lead_val.inv().expect("leading entry is non-zero");
                    let normalized: BTreeMap<(u32, u32), Scalar> =
                        row.iter().map(|(k, v)| (*k, v * &inv)).collect();
                    pivots.insert(lead, normalized);
                    rank += 1;
                    break;
                }
                Some(pivot) => {
                    let factor = row[&lead].clone();
                    for (k, v) in pivot.iter() {
                        let delta = &factor * v;
                        let entry = row.entry(*k).or_insert_with(Scalar::zero);
                        *entry -= &delta;
                        if entry.is_zero() {
                            row.remove(k);
                        }
                    }
                }
            }
        }
    }
    rank
}

/// Criterion 4: on each corpus system, the full set of generators with
/// both path degrees ≤ D evaluates at truncation D to a linearly
/// independent family, verified by exact rational rank.
#[test]
fn criterion_04_generator_linear_independence() {
    let systems = corpus();
    for sys in &systems {
        // largest D whose full generator family stays reviewably small
        let mut d = sys.cap();
        let family_size = |d: u32| -> usize {
            let arrows: Vec<_> = sys.arrows_up_to(d).collect();
            let mut count = 0usize;
            for &a in &arrows {
                for &b in &arrows {
                    if sys.src(a) == sys.src(b) {
                        count += 1;
                    }
                }
            }
            count
        };
        while d > 1 && family_size(d) > 400 {
            d -= 1;
        }
        let arrows: Vec<_> = sys.arrows_up_to(d).collect();
        let mut rows = Vec::new();
        for &a in &arrows {
            for &b in &arrows {
                if sys.src(a) != sys.src(b) {
                    continue;
                }
                let g = make_generator(sys, a, b).element;
                let m = evaluate_on_fock(sys, &g, d).unwrap();
                let row: BTreeMap<(u32, u32), Scalar> = m
                    .iter()
                    .map(|((r, c), s)| ((c.0, r.0), s.clone()))
                    .collect();
                assert!(
                    !row.is_empty(),
                    "a generator evaluated to zero at its own degree"
                );
                rows.push(row);
            }
        }
        let expected = rows.len();
        assert_eq!(exact_rank(rows), expected, "generators are dependent");
    }
    println!(
        "criterion 4 PASS: full generator families have full rational rank on every corpus system"
    );
}

/// Criterion 5: spectral projections are idempotent, mutually orthogonal
/// and sum to the identity on 500 random elements; multiplication adds
/// gauge degrees.
#[test]
fn criterion_05_grading_laws() {
    let systems = corpus();
    let mut rng = StdRng::seed_from_u64(CORPUS_SEED ^ 5);
    let mut checked = 0usize;
    let mut sys_iter = systems.iter().cycle();
    while checked < 500 {
        let sys = sys_iter.next().unwrap();
        let x = random_toeplitz(&mut rng, sys, sys.cap(), 4);
        if x.is_zero() {
            continue;
        }
        let support = gauge_support(sys, &x);
        let mut sum = ToeplitzElement::zero();
        for &k in &support {
            let pk = spectral_project(sys, &x, k);
            // idempotent
            assert_eq!(spectral_project(sys, &pk, k), pk);
            // orthogonal to every other projection
            for &j in &support {
                if j != k {
                    assert!(spectral_project(sys, &pk, j).is_zero());
                }
            }
            sum = sum.add(&pk);
        }
        // completeness: the projections reassemble the element
        assert_eq!(sum, x);

        // multiplication adds gauge degrees on homogeneous parts
        if let (Some(&j), Some(gy)) = (support.first(), random_generator(&mut rng, sys, 2)) {
            let xj = spectral_project(sys, &x, j);
            let y = make_generator(sys, gy.alpha, gy.beta).element;
            let k = gauge_support(sys, &y).first().copied().unwrap();
            if let Ok(prod) = multiply(sys, &xj, &y) {
                for d in gauge_support(sys, &prod) {
                    assert_eq!(d, j + k, "gauge degrees must add");
                }
            }
        }
        checked += 1;
    }
    println!("criterion 5 PASS: spectral projections are idempotent, orthogonal and complete on 500 elements");
}

/// Criterion 6: the invariant-ideal lattice of the free square is exactly
/// the six frozen masks, agreeing with brute force over all 16 subsets,
/// and every quotient revalidates.
#[test]
fn criterion_06_invariant_ideal_lattice() {
    let sys = load_fixture("square_free.pps");
    let got = enumerate_invariant(&sys).unwrap();
    let mask = |names: &[&str]| IdealMask::from_names(&sys, names).unwrap();
    let mut expected = vec![
        IdealMask::empty(),
        mask(&["v0"]),
        mask(&["v0", "v1"]),
        mask(&["v0", "v2"]),
        mask(&["v0", "v1", "v2"]),
        mask(&["v0", "v1", "v2", "v3"]),
    ];
    expected.sort();
    assert_eq!(got, expected);

    // independent brute force over all 16 subsets
    let vertex_ids: Vec<_> = sys.vertex_ids().collect();
    let mut brute = Vec::new();
    for bits in 0u32..16 {
        let members: Vec<_> = vertex_ids
            .iter()
            .enumerate()
            .filter(|(i, _)| bits & (1 << i) != 0)
            .map(|(_, v)| *v)
            .collect();
        let invariant = sys
            .all_arrows()
            .all(|a| !members.contains(&sys.rng(a)) || members.contains(&sys.src(a)));
        if invariant {
            brute.push(IdealMask::from_ids(members));
        }
    }
    brute.sort();
    assert_eq!(got, brute);

    for w in &got {
        let q = quotient(&sys, w).unwrap();
        assert!(validate(&q).passed());
        assert!(check_representation_condition(&q, q.cap()).unwrap().holds);
    }
    println!("criterion 6 PASS: square lattice = 6 invariant masks, all quotients revalidate");
}

/// Criterion 7: Katsura identification. The free square's Katsura ideal is
/// {v1,v2,v3} and all three Cuntz–Krieger kernel elements verify at
/// horizon 8; the single loop verifies at horizon 10.
#[test]
fn criterion_07_katsura_identification() {
    let sys = load_fixture("square_free.pps");
    let kat = katsura_ideal(&sys);
    assert_eq!(
        kat,
        IdealMask::from_names(&sys, &["v1", "v2", "v3"]).unwrap()
    );
    let report = ck_relations(&sys, 8).unwrap();
    assert_eq!(report.verdicts.len(), 3);
    assert!(report.all_verified());

    let loop_sys = load_fixture("single_loop.pps");
    let report = ck_relations(&loop_sys, 10).unwrap();
    assert!(report.all_verified());
    assert_eq!(katsura_ideal(&loop_sys).render(&loop_sys), "{v}");
    println!("criterion 7 PASS: CK relations verified (square at horizon 8, loop at horizon 10)");
}

/// Criterion 8: kernel-lemma bidirectionality. With I = J = ∅, a random
/// fixed-point element is Verified(L) exactly when its Fock matrix at
/// truncation L vanishes.
#[test]
fn criterion_08_kernel_lemma_bidirectional() {
    let systems = corpus();
    let mut rng = StdRng::seed_from_u64(CORPUS_SEED ^ 8);
    let mut checked = 0usize;
    let mut sys_iter = systems.iter().cycle();
    while checked < 100 {
        let sys = sys_iter.next().unwrap();
        let spec = GaugeIdealSpec::new(sys, IdealMask::empty(), IdealMask::empty()).unwrap();
        let top = rng.gen_range(0..=sys.cap().min(3));
        let x = random_fixed_point(&mut rng, sys, top);
        let horizon = rng.gen_range(x.top_degree()..=sys.cap());
        let verdict = pps_core::ideals::kernel_membership(sys, &x, &spec, horizon).unwrap();
        let matrix = evaluate_on_fock(sys, &x.to_toeplitz(), horizon).unwrap();
        assert_eq!(
            verdict.verified(),
            matrix.is_zero(),
            "kernel lemma and Fock vanishing disagree"
        );
        checked += 1;
    }
    // the zero element is Verified at any horizon with the zero matrix
    let sys = &systems[0];
    let spec = GaugeIdealSpec::new(sys, IdealMask::empty(), IdealMask::empty()).unwrap();
    let zero = pps_core::toeplitz::FixedPointElement::new();
    assert!(
        pps_core::ideals::kernel_membership(sys, &zero, &spec, sys.cap())
            .unwrap()
            .verified()
    );
    println!("criterion 8 PASS: Verified(L) ⟺ zero Fock matrix at L on 100 random elements");
}

/// Criterion 9: Fell extendability. The stacked-bimodule fixture is not
/// extendable with witness (1,2); the single loop is extendable, its
/// degree-4 bundle passes all axioms, and the section-algebra covariance
/// ideal equals the Katsura ideal {v}.
#[test]
fn criterion_09_fell_extendability() {
    let cc = load_fixture("cc_bimodule.pps");
    let verdict = check_extendable(&cc).unwrap();
    assert!(!verdict.extendable);
    let Some(ExtendObstruction::InclusionFails { n, m, .. }) = verdict.witness else {
        panic!("expected an inclusion obstruction");
    };
    assert_eq!((n, m), (1, 2));

    let loop_sys = load_fixture("single_loop.pps");
    assert!(check_extendable(&loop_sys).unwrap().extendable);
    let bundle = build_fell(&loop_sys, 4).unwrap();
    let axioms = verify_fell_axioms(&loop_sys, &bundle);
    assert!(axioms.passed(), "axiom failure: {:?}", axioms.failure);
    let cov = fell_covariance_ideal(&loop_sys, &bundle);
    let kat = katsura_ideal(&loop_sys);
    assert_eq!(cov, kat);
    assert_eq!(cov.render(&loop_sys), "{v}");
    println!(
        "criterion 9 PASS: cc fixture refuted at (1,2); loop bundle verified with matching ideals"
    );
}

/// Criterion 10: J_max for global systems. The single loop is global with
/// J_max = {v}; the free square is not global, witnessed by c ∉ im μ_{1,1}.
#[test]
fn criterion_10_jmax_global() {
    let loop_sys = load_fixture("single_loop.pps");
    let GlobalVerdict::Global { jmax } = jmax_global(&loop_sys) else {
        panic!("single loop must be global");
    };
    assert_eq!(jmax.render(&loop_sys), "{v}");

    let square = load_fixture("square_free.pps");
    let GlobalVerdict::NotGlobal { witness, .. } = jmax_global(&square) else {
        panic!("free square must not be global");
    };
    assert_eq!(square.arrow_name(witness), "c");

    // same verdicts through the CLI report
    let (code, kv) = run_machine(&["ideals", &fixture("single_loop.pps")]);
    assert_eq!(code, 0);
    assert_eq!(kv["global"], "true");
    assert_eq!(kv["jmax"], "{v}");
    let (code, kv) = run_machine(&["ideals", &fixture("square_free.pps")]);
    assert_eq!(code, 0);
    assert_eq!(kv["global"], "false");
    assert_eq!(kv["jmax.witness"], "c");
    println!("criterion 10 PASS: loop global with J_max = {{v}}; square NotGlobal witnessed by c");
}
