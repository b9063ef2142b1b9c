//! Command implementations: each subcommand delegates to one library
//! operation and renders its outcome, witnesses first.

use std::fmt::Write as _;

use pps_core::elements::Side;
use pps_core::fell::{
    build_fell, check_extendable, fell_covariance_ideal, verify_fell_axioms, ExtendObstruction,
    FellError,
};
use pps_core::fock::{
    check_representation_condition, check_weak_representation, creation_operator, FockError,
    TruncatedFock,
};
use pps_core::graded_graph::{check_path_category, validate, GraphError, Violation};
use pps_core::ideals::{
    ck_relations, enumerate_invariant, jmax_global, katsura_ideal, quotient, GlobalVerdict,
    IdealError, MembershipVerdict,
};
use pps_core::toeplitz::{
    evaluate_on_fock, make_generator, multiply, ToeplitzElement, ToeplitzError,
};
use pps_core::{Element, GradedSystem};

use crate::report::Report;
use crate::specfile::SpecFile;

/// An input error: the requested check could not be run at all (exit 2).
#[derive(Clone, Debug)]
pub struct CommandError(pub String);

impl std::fmt::Display for CommandError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for CommandError {}

fn input_err(msg: impl Into<String>) -> CommandError {
    CommandError(msg.into())
}

fn violation_text(sys: &GradedSystem, v: &Violation) -> String {
    let n = |a: &pps_core::ArrowId| sys.arrow_name(*a).to_string();
    match v {
        Violation::EndpointMismatch { x, y, z } => format!(
            "endpoint mismatch: {}·{} = {} but endpoints disagree",
            n(x),
            n(y),
            n(z)
        ),
        Violation::NotInjective {
            first,
            second,
            result,
        } => format!(
            "injectivity fails at degrees ({},{}): ({},{}) and ({},{}) both compose to {}",
            sys.degree(first.0),
            sys.degree(first.1),
            n(&first.0),
            n(&first.1),
            n(&second.0),
            n(&second.1),
            n(result)
        ),
        Violation::MissingComposite { x, y } => format!(
            "missing composite: {}·{} is endpoint-composable but undefined",
            n(x),
            n(y)
        ),
        Violation::NotAssociative { x, y, z, .. } => {
            format!("associativity fails at ({}, {}, {})", n(x), n(y), n(z))
        }
        Violation::UnitLaw { x } => format!("unit law fails at {}", n(x)),
    }
}

fn header(report: &mut Report, spec: &SpecFile) {
    report.kv("system", &spec.name);
    report.kv("cap", spec.cap.to_string());
}

pub fn cmd_validate(spec: &SpecFile, sys: &GradedSystem) -> Report {
    let mut report = Report::new("validate");
    header(&mut report, spec);
    report.say(format!(
        "validate on system \"{}\" (cap {})",
        spec.name, spec.cap
    ));
    let result = validate(sys);
    report.kv("violations", result.violations.len().to_string());
    if result.passed() {
        report.say("all axioms hold: totality, injectivity, endpoints, associativity, units");
    } else {
        report.refute();
        for (i, v) in result.violations.iter().enumerate() {
            let text = violation_text(sys, v);
            report.kv(format!("violation.{i}"), &text);
            report.say(format!("  violation: {text}"));
        }
    }
    report
}

pub fn cmd_pathcat(spec: &SpecFile, sys: &GradedSystem) -> Result<Report, CommandError> {
    let mut report = Report::new("pathcat");
    header(&mut report, spec);
    report.say(format!(
        "pathcat on system \"{}\" (cap {})",
        spec.name, spec.cap
    ));
    let verdict = check_path_category(sys).map_err(|e| match e {
        GraphError::InvalidSystem(r) => input_err(format!(
            "system fails validation ({} violations); run `validate`",
            r.violations.len()
        )),
        other => input_err(other.to_string()),
    })?;
    report.kv("path_category", verdict.is_path_category.to_string());
    report.kv("checked_cap", verdict.cap.to_string());
    for (i, a) in verdict.irreducibles.iter().enumerate() {
        report.kv(
            format!("irreducible.{i}"),
            format!("{} deg={}", sys.arrow_name(*a), sys.degree(*a)),
        );
    }
    let irr: Vec<String> = verdict
        .irreducibles
        .iter()
        .map(|&a| format!("{} (deg {})", sys.arrow_name(a), sys.degree(a)))
        .collect();
    report.say(format!("irreducibles: {}", irr.join(", ")));
    match verdict.witness {
        None => {
            report.say(format!(
                "unique factorization holds for all degrees <= {}",
                verdict.cap
            ));
        }
        Some(w) => {
            report.refute();
            let word = |ids: &[pps_core::ArrowId]| {
                ids.iter()
                    .map(|&i| sys.arrow_name(i))
                    .collect::<Vec<_>>()
                    .join("·")
            };
            report.kv("witness.arrow", sys.arrow_name(w.arrow));
            report.kv("witness.first", word(&w.first));
            report.kv("witness.second", word(&w.second));
            report.say(format!(
                "double factorization: {} = {} = {}",
                sys.arrow_name(w.arrow),
                word(&w.first),
                word(&w.second)
            ));
        }
    }
    Ok(report)
}

fn element_text(sys: &GradedSystem, e: &Element) -> String {
    e.render(sys)
}

pub fn cmd_repcheck(
    spec: &SpecFile,
    sys: &GradedSystem,
    trunc: u32,
) -> Result<Report, CommandError> {
    let mut report = Report::new("repcheck");
    header(&mut report, spec);
    report.kv("trunc", trunc.to_string());
    report.say(format!(
        "repcheck on system \"{}\" (trunc {trunc})",
        spec.name
    ));
    let map_err = |e: FockError| match e {
        FockError::InvalidSystem(r) => input_err(format!(
            "system fails validation ({} violations); run `validate`",
            r.violations.len()
        )),
        other => input_err(other.to_string()),
    };
    let weak = check_weak_representation(sys, trunc).map_err(map_err)?;
    report.kv(
        "weak_representation",
        if weak.passed() { "pass" } else { "fail" },
    );
    if let Some(witness) = &weak.witness {
        report.refute();
        report.kv("weak_witness", format!("{witness:?}"));
        report.say(format!("weak-representation identity fails: {witness:?}"));
    }
    let verdict = check_representation_condition(sys, trunc).map_err(map_err)?;
    report.kv("representation_condition", verdict.holds.to_string());
    report.kv("verified_up_to", verdict.verified_up_to.to_string());
    match verdict.witness {
        None => {
            report.say(format!(
                "weak-representation identities and the covariance identity hold up to degree {trunc}"
            ));
        }
        Some(w) => {
            report.refute();
            report.kv("witness.n", w.n.to_string());
            report.kv("witness.x", sys.arrow_name(w.x));
            report.kv("witness.m", w.m.to_string());
            report.kv("witness.y", sys.arrow_name(w.y));
            report.kv("witness.k", w.k.to_string());
            report.kv("witness.basis", sys.arrow_name(w.z));
            report.kv("witness.lhs", element_text(sys, &w.lhs));
            report.kv("witness.rhs", element_text(sys, &w.rhs));
            report.say(format!(
                "covariance identity REFUTED at n={} x={} (deg {}), m={} y={} (deg {}), basis {} (deg {}):",
                w.n,
                sys.arrow_name(w.x),
                w.n,
                w.m,
                sys.arrow_name(w.y),
                w.m,
                sys.arrow_name(w.z),
                w.k
            ));
            report.say(format!(
                "  S_{}({})* S_{}({}) δ_{} = {}",
                w.n,
                sys.arrow_name(w.x),
                w.m,
                sys.arrow_name(w.y),
                sys.arrow_name(w.z),
                element_text(sys, &w.lhs)
            ));
            report.say(format!(
                "  S_{}(S_{}({})* {}) δ_{} = {}",
                w.m - w.n,
                w.n,
                sys.arrow_name(w.x),
                sys.arrow_name(w.y),
                sys.arrow_name(w.z),
                element_text(sys, &w.rhs)
            ));
        }
    }
    Ok(report)
}

pub fn cmd_fock(
    spec: &SpecFile,
    sys: &GradedSystem,
    trunc: u32,
    element: &str,
) -> Result<Report, CommandError> {
    let arrow = sys
        .arrow_id(element)
        .ok_or_else(|| input_err(format!("unknown arrow `{element}`")))?;
    let mut report = Report::new("fock");
    header(&mut report, spec);
    report.kv("trunc", trunc.to_string());
    report.kv("element", element);
    report.say(format!(
        "creation operator S_{}(δ_{element}) on the Fock module truncated at {trunc}",
        sys.degree(arrow)
    ));
    let fock = TruncatedFock::new(sys, trunc).map_err(|e| input_err(e.to_string()))?;
    let basis: Vec<&str> = fock.basis().iter().map(|&a| sys.arrow_name(a)).collect();
    report.kv("basis", basis.join(","));
    report.say(format!("  basis ({}): {}", fock.dim(), basis.join(", ")));
    let op = creation_operator(sys, trunc, &Element::basis(sys, arrow))
        .map_err(|e| input_err(e.to_string()))?;
    report.kv("shift", op.shift().to_string());
    let mut count = 0usize;
    for (_, block) in op.blocks() {
        for ((row, col), s) in block {
            report.kv(
                format!("entry.{count}"),
                format!(
                    "{} <- {} ({})",
                    sys.arrow_name(*row),
                    sys.arrow_name(*col),
                    s
                ),
            );
            report.say(format!(
                "  δ_{} ↦ ({})·δ_{}",
                sys.arrow_name(*col),
                s,
                sys.arrow_name(*row)
            ));
            count += 1;
        }
    }
    report.kv("entries", count.to_string());
    if count == 0 {
        report.say("  (zero operator at this truncation)");
    }
    Ok(report)
}

fn parse_generator_spec(
    sys: &GradedSystem,
    text: &str,
) -> Result<(ToeplitzElement, String), CommandError> {
    let parts: Vec<&str> = text.split('|').collect();
    if parts.len() != 2 {
        return Err(input_err(format!(
            "generator must be written `<alpha>|<beta>`, got `{text}`"
        )));
    }
    let alpha = sys
        .arrow_id(parts[0])
        .ok_or_else(|| input_err(format!("unknown arrow `{}`", parts[0])))?;
    let beta = sys
        .arrow_id(parts[1])
        .ok_or_else(|| input_err(format!("unknown arrow `{}`", parts[1])))?;
    let built = make_generator(sys, alpha, beta);
    let label = format!("T[{},{}]", parts[0], parts[1]);
    if built.source_mismatch {
        Err(input_err(format!(
            "{label} has mismatched sources and denotes the zero operator"
        )))
    } else {
        Ok((built.element, label))
    }
}

pub fn cmd_mult(
    spec: &SpecFile,
    sys: &GradedSystem,
    lhs: &str,
    rhs: &str,
    trunc: u32,
) -> Result<Report, CommandError> {
    let (x, xlabel) = parse_generator_spec(sys, lhs)?;
    let (y, ylabel) = parse_generator_spec(sys, rhs)?;
    let mut report = Report::new("mult");
    header(&mut report, spec);
    report.kv("lhs", lhs);
    report.kv("rhs", rhs);
    report.kv("trunc", trunc.to_string());
    report.say(format!(
        "product {xlabel} · {ylabel} (oracle trunc {trunc})"
    ));
    let product = multiply(sys, &x, &y).map_err(|e| match e {
        ToeplitzError::NotPathCategory => input_err(
            "normal-form multiplication requires a path-category system; only `fock` evaluation is available here",
        ),
        other => input_err(other.to_string()),
    })?;
    report.kv("product", product.render(sys));
    report.say(format!("  normal form: {}", product.render(sys)));

    // Independent matrix oracle: evaluate both factors at the full cap,
    // multiply, and compare against the product inside the window where the
    // truncated product is exact.
    let maxdeg = x.max_path_degree(sys).max(y.max_path_degree(sys));
    let window = trunc.min(sys.cap().saturating_sub(maxdeg));
    let mx = evaluate_on_fock(sys, &x, sys.cap()).map_err(|e| input_err(e.to_string()))?;
    let my = evaluate_on_fock(sys, &y, sys.cap()).map_err(|e| input_err(e.to_string()))?;
    let oracle = mx.matmul(&my).compress(sys, window);
    let direct = evaluate_on_fock(sys, &product, window).map_err(|e| input_err(e.to_string()))?;
    report.kv("oracle_window", window.to_string());
    if oracle == direct {
        report.kv("oracle", "agree");
        report.say(format!(
            "  Fock-matrix oracle agrees on degrees <= {window}"
        ));
    } else {
        report.refute();
        report.kv("oracle", "disagree");
        report.say("  Fock-matrix oracle DISAGREES with the normal form");
    }
    Ok(report)
}

pub fn cmd_ideals(spec: &SpecFile, sys: &GradedSystem) -> Result<Report, CommandError> {
    let mut report = Report::new("ideals");
    header(&mut report, spec);
    report.say(format!(
        "invariant ideals of system \"{}\" (cap {})",
        spec.name, spec.cap
    ));
    let masks = enumerate_invariant(sys).map_err(|e| input_err(e.to_string()))?;
    report.kv("invariant.count", masks.len().to_string());
    for (i, m) in masks.iter().enumerate() {
        report.kv(format!("invariant.{i}"), m.render(sys));
        // every invariant mask yields a quotient system that revalidates
        let q = quotient(sys, m).map_err(|e| input_err(e.to_string()))?;
        let ok = validate(&q).passed();
        report.say(format!(
            "  {} -> quotient has {} arrows, revalidates: {}",
            m.render(sys),
            q.arrow_count(),
            ok
        ));
        if !ok {
            report.refute();
            report.kv(format!("invariant.{i}.quotient"), "invalid".to_string());
        }
    }
    match jmax_global(sys) {
        GlobalVerdict::Global { jmax } => {
            report.kv("global", "true");
            report.kv("jmax", jmax.render(sys));
            report.say(format!(
                "global product system within cap; J_max = {}",
                jmax.render(sys)
            ));
        }
        GlobalVerdict::NotGlobal { witness, split } => {
            report.kv("global", "false");
            report.kv("jmax.witness", sys.arrow_name(witness));
            report.kv("jmax.split", format!("({},{})", split.0, split.1));
            report.say(format!(
                "not a global product system: {} (deg {}) is not in the image of mu_({},{})",
                sys.arrow_name(witness),
                sys.degree(witness),
                split.0,
                split.1
            ));
        }
    }
    Ok(report)
}

fn membership_text(sys: &GradedSystem, v: &MembershipVerdict) -> String {
    match v {
        MembershipVerdict::Verified { horizon } => format!("verified({horizon})"),
        MembershipVerdict::Refuted {
            degree,
            path,
            escaped,
        } => format!(
            "refuted(degree={}, path={}, escaped={})",
            degree,
            sys.arrow_name(*path),
            sys.arrow_name(*escaped)
        ),
    }
}

fn ideal_err(e: IdealError) -> CommandError {
    input_err(e.to_string())
}

pub fn cmd_katsura(
    spec: &SpecFile,
    sys: &GradedSystem,
    horizon: u32,
) -> Result<Report, CommandError> {
    let mut report = Report::new("katsura");
    header(&mut report, spec);
    report.kv("horizon", horizon.to_string());
    let mask = katsura_ideal(sys);
    let kernel = mask.complement(sys);
    report.kv("katsura", mask.render(sys));
    report.kv("k_ideal", kernel.render(sys));
    report.say(format!(
        "K = {} (vertices receiving nothing), K-perp = {}",
        kernel.render(sys),
        mask.render(sys)
    ));
    let ck = ck_relations(sys, horizon).map_err(ideal_err)?;
    for (v, verdict) in &ck.verdicts {
        let text = membership_text(sys, verdict);
        report.kv(format!("ck.{}", sys.vertex_name(*v)), &text);
        report.say(format!(
            "  CK relation at {}: {}",
            sys.vertex_name(*v),
            text
        ));
        if !verdict.verified() {
            report.refute();
        }
    }
    if ck.verdicts.is_empty() {
        report.say("  no regular vertices; nothing to verify");
    } else if ck.all_verified() {
        report.say(format!(
            "all Cuntz–Krieger kernel elements verified up to degree {horizon}"
        ));
    }
    Ok(report)
}

pub fn cmd_ck(spec: &SpecFile, sys: &GradedSystem, horizon: u32) -> Result<Report, CommandError> {
    let mut report = Report::new("ck");
    header(&mut report, spec);
    report.kv("horizon", horizon.to_string());
    report.say(format!(
        "Cuntz–Krieger relations on \"{}\" at horizon {horizon}",
        spec.name
    ));
    let ck = ck_relations(sys, horizon).map_err(ideal_err)?;
    report.kv("vertices", ck.verdicts.len().to_string());
    for (v, verdict) in &ck.verdicts {
        let text = membership_text(sys, verdict);
        report.kv(format!("ck.{}", sys.vertex_name(*v)), &text);
        report.say(format!("  {}: {}", sys.vertex_name(*v), text));
        if !verdict.verified() {
            report.refute();
        }
    }
    Ok(report)
}

fn side_text(side: Side) -> &'static str {
    match side {
        Side::Left => "left",
        Side::Right => "right",
    }
}

pub fn cmd_fell(spec: &SpecFile, sys: &GradedSystem, degree: u32) -> Result<Report, CommandError> {
    let mut report = Report::new("fell");
    header(&mut report, spec);
    report.kv("degree", degree.to_string());
    report.say(format!(
        "Fell-bundle extension of \"{}\" (bound {degree})",
        spec.name
    ));
    let verdict = check_extendable(sys).map_err(|e| match e {
        FellError::NotPathCategory => {
            input_err("extendability requires a validated path-category system")
        }
        other => input_err(other.to_string()),
    })?;
    report.kv("extendable", verdict.extendable.to_string());
    if let Some(obstruction) = verdict.witness {
        report.refute();
        match obstruction {
            ExtendObstruction::NotHilbertBimodule {
                degree,
                first,
                second,
                side,
            } => {
                report.kv("witness.kind", "bimodule");
                report.kv("witness.degree", degree.to_string());
                report.kv("witness.first", sys.arrow_name(first));
                report.kv("witness.second", sys.arrow_name(second));
                report.kv("witness.side", side_text(side));
                report.say(format!(
                    "  E_{degree} is not a Hilbert bimodule: {} and {} share a {}",
                    sys.arrow_name(first),
                    sys.arrow_name(second),
                    match side {
                        Side::Left => "range",
                        Side::Right => "source",
                    }
                ));
            }
            ExtendObstruction::InclusionFails {
                n,
                m,
                side,
                arrow,
                through,
            } => {
                report.kv("witness.kind", "inclusion");
                report.kv("witness.n", n.to_string());
                report.kv("witness.m", m.to_string());
                report.kv("witness.side", side_text(side));
                report.kv("witness.arrow", sys.arrow_name(arrow));
                report.kv("witness.through", sys.arrow_name(through));
                report.say(format!(
                    "  {} inclusion fails at (n,m)=({n},{m}): {} does not factor through {}",
                    side_text(side),
                    sys.arrow_name(arrow),
                    sys.arrow_name(through)
                ));
            }
        }
        return Ok(report);
    }

    let bundle = build_fell(sys, degree).map_err(|e| input_err(e.to_string()))?;
    let mut fiber_text = String::new();
    for (n, fiber) in bundle.fibers() {
        let names: Vec<String> = fiber.iter().map(|g| g.render(sys)).collect();
        let _ = write!(fiber_text, "B_{n}={{{}}} ", names.join(","));
        report.kv(format!("fiber.{n}"), format!("{{{}}}", names.join(",")));
    }
    report.say(format!("  fibers: {}", fiber_text.trim_end()));
    let axioms = verify_fell_axioms(sys, &bundle);
    report.kv(
        "axioms",
        if axioms.passed() { "pass" } else { "fail" }.to_string(),
    );
    report.kv("checked_triples", axioms.checked_triples.to_string());
    if let Some(failure) = &axioms.failure {
        report.refute();
        report.kv("axiom_failure", format!("{failure:?}"));
        report.say(format!("  axiom failure: {failure:?}"));
        return Ok(report);
    }
    report.say(format!(
        "  bundle axioms verified on {} triples",
        axioms.checked_triples
    ));
    let cov = fell_covariance_ideal(sys, &bundle);
    let kat = katsura_ideal(sys);
    report.kv("covariance", cov.render(sys));
    report.kv("katsura", kat.render(sys));
    let matches = cov == kat;
    report.kv("covariance_matches_katsura", matches.to_string());
    report.say(format!(
        "  section-algebra covariance ideal {} katsura ideal {}",
        cov.render(sys),
        kat.render(sys)
    ));
    if !matches {
        report.refute();
    }
    Ok(report)
}
