use std::fs;
use std::path::{Path, PathBuf};

use hypar_core::analysis::{cross_section as section, fit_and_deviate, max_constructible, ntheta_study, AnalysisError, NThetaReport};
use hypar_core::embedcheck::lemmas::{degree4_sign_audit, four_triangle_obstruction, Degree4Report, FourTriangleOutcome};
use hypar_core::embedcheck::{check_embedding, max_rings, DigitsPolicy, EmbeddingReport, FrontierCause, MaxRings, Verdict3};
use hypar_core::export::{cross_section_svg, deviation_csv, deviation_svg, fold_json, obj_mesh, state_from_json, Header};
use hypar_core::foldctor::{construct, is_digit_step, Numerics};
use hypar_core::{ConstructError, FoldState, TriangulationKind, VERSION};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::exit;
use crate::{AuditArgs, FoldArgs, Instance, LimitsArgs, Precision, PrecisionArgs, SectionArgs};

fn construct_code(e: &ConstructError) -> u8 {
    match e {
        ConstructError::InvalidArgument(_) => exit::USAGE,
        ConstructError::CertainlyInfeasible { .. } => exit::INFEASIBLE,
        _ => exit::PRECISION_EXHAUSTED,
    }
}

fn usage(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    exit::USAGE
}

fn write(path: &Path, text: &str) -> Result<(), u8> {
    fs::write(path, text).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", path.display());
        exit::USAGE
    })
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, u8> {
    if jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(usage)
}

/// Digit schedule for one command: a fixed value or a doubling range.
fn digit_steps(p: &Precision) -> Result<Vec<u32>, u8> {
    if let Some(d) = p.digits {
        return Ok(vec![d]);
    }
    if !is_digit_step(p.digits_start) || !is_digit_step(p.digits_max) || p.digits_start > p.digits_max {
        return Err(usage(format!("digit bounds {}..{} must be 16·2^k and ascending", p.digits_start, p.digits_max)));
    }
    Ok(std::iter::successors(Some(p.digits_start), |d| Some(d * 2)).take_while(|d| *d <= p.digits_max).collect())
}

/// Constructs with escalation; `accept` may reject a state as numerically
/// undecided, which also moves on to the next precision.
fn build(
    n: u32,
    theta: &BigRational,
    kind: TriangulationKind,
    p: &Precision,
    mut accept: impl FnMut(&FoldState) -> bool,
) -> Result<FoldState, u8> {
    let steps = digit_steps(p)?;
    let mut last = None;
    for d in steps {
        match construct(n, theta, kind, d) {
            Ok(s) if accept(&s) => return Ok(s),
            Ok(s) => last = Some(format!("undecided at {} digits", s.digits)),
            Err(e) if !e.is_numerical() => {
                eprintln!("error: {e}");
                return Err(construct_code(&e));
            }
            Err(e) => last = Some(e.to_string()),
        }
    }
    eprintln!("error: precision exhausted: {}", last.unwrap_or_default());
    Err(exit::PRECISION_EXHAUSTED)
}

fn instance_ok(i: &Instance) -> Result<(), u8> {
    if i.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    Ok(())
}

#[derive(Serialize)]
struct EmbeddingDocument<'a> {
    header: Header,
    report: &'a EmbeddingReport,
}

pub fn fold(a: FoldArgs) -> u8 {
    match fold_inner(a) {
        Ok(c) | Err(c) => c,
    }
}

fn fold_inner(a: FoldArgs) -> Result<u8, u8> {
    let i = &a.instance;
    instance_ok(i)?;
    let mut report = None;
    let state = build(i.n, &i.theta, i.kind, &i.precision, |s| {
        if !a.check_embedding {
            return true;
        }
        let r = check_embedding(s);
        let decided = !matches!(r.verdict, Verdict3::Indeterminate(_));
        report = Some(r);
        decided
    })?;
    println!("constructed n={} theta={} kind={} digits={}", state.rings(), state.theta_deg, state.kind(), state.digits);
    println!("max interval width {}", state.max_width());
    let violations = &state.diagnostics.mv_violations;
    if !violations.is_empty() {
        println!("mountain-valley violations: {}", violations.len());
    }
    if let Some(p) = &a.out {
        write(p, &fold_json(&state))?;
    }
    if let Some(p) = &a.mesh {
        write(p, &obj_mesh(&state))?;
    }
    if let Some(p) = &a.dump_pattern {
        write(p, &json(&state.pattern.to_document()))?;
    }
    let Some(r) = report.filter(|_| a.check_embedding) else {
        return Ok(exit::OK);
    };
    if let Some(p) = &a.report {
        write(p, &json(&EmbeddingDocument { header: Header::of(&state), report: &r }))?;
    }
    println!("embedding: {} pairs checked in {} ms", r.stats.pairs, r.wall_time_ms);
    Ok(match &r.verdict {
        Verdict3::CertainlyEmbedded => {
            println!("verdict: certainly embedded");
            exit::OK
        }
        Verdict3::CertainlyIntersecting(p) => {
            println!("verdict: certainly self-intersecting ({p})");
            exit::SELF_INTERSECTION
        }
        Verdict3::Indeterminate(p) => {
            println!("verdict: indeterminate ({p})");
            exit::PRECISION_EXHAUSTED
        }
    })
}

#[derive(Serialize)]
struct LimitsRow {
    theta_deg: String,
    on_grid: bool,
    result: Result<MaxRings, String>,
    digits: Option<u32>,
}

#[derive(Serialize)]
struct LimitsDocument {
    kind: TriangulationKind,
    n_cap: u32,
    digits_start: u32,
    digits_max: u32,
    library_version: &'static str,
    rows: Vec<LimitsRow>,
    ntheta: NThetaReport,
}

/// The even-degree grid 2°, 4°, …, 178°.
fn on_grid(t: &BigRational) -> bool {
    t.is_integer() && {
        let v = t.to_integer();
        v >= 2.into() && v <= 178.into() && (&v % 2u32) == 0.into()
    }
}

fn cause_text(r: &Result<MaxRings, String>) -> String {
    match r {
        Ok(MaxRings::Exact { cause: FrontierCause::SelfIntersection(p), .. }) => format!("self-intersection {p}"),
        Ok(MaxRings::Exact { cause: FrontierCause::MvViolation { crease, .. }, .. }) => format!("sign flip at {crease}"),
        Ok(MaxRings::Exact { cause: FrontierCause::Infeasible(m), .. }) => format!("infeasible: {m}"),
        Ok(MaxRings::AtCap { .. }) => "reached cap".into(),
        Ok(MaxRings::Unknown { reason, .. }) => format!("unknown: {reason}"),
        Err(e) => format!("error: {e}"),
    }
}

pub fn limits_table(a: LimitsArgs) -> u8 {
    if a.theta.is_empty() {
        return usage("at least one --theta is required");
    }
    if a.n_cap == 0 {
        return usage("--n-cap must be at least 1");
    }
    let policy = DigitsPolicy { start: a.digits_start, max: a.digits_max };
    if !is_digit_step(policy.start) || !is_digit_step(policy.max) || policy.start > policy.max {
        return usage("digit bounds must be 16·2^k and ascending");
    }
    let pool = match pool(a.jobs) {
        Ok(p) => p,
        Err(c) => return c,
    };
    let rows: Vec<LimitsRow> = pool.install(|| {
        a.theta
            .par_iter()
            .map(|t| {
                let r = max_rings(t, a.kind, a.n_cap, policy);
                LimitsRow {
                    theta_deg: t.to_string(),
                    on_grid: on_grid(t),
                    digits: r.as_ref().ok().map(|r| r.digits),
                    result: r.map(|r| r.result).map_err(|e| e.to_string()),
                }
            })
            .collect()
    });
    let exact: Vec<(BigRational, u32)> = a
        .theta
        .iter()
        .zip(&rows)
        .filter_map(|(t, r)| r.result.as_ref().ok().and_then(|m| m.exact()).map(|n| (t.clone(), n)))
        .collect();
    let ntheta = ntheta_study(&exact);
    println!("{:>8} {:>6} {:>7}  frontier", "theta", "n", "digits");
    for r in &rows {
        let n = match &r.result {
            Ok(MaxRings::Exact { n, .. }) => n.to_string(),
            Ok(MaxRings::AtCap { n }) => format!(">={n}"),
            Ok(MaxRings::Unknown { at_least, .. }) => format!(">={at_least}?"),
            Err(_) => "-".into(),
        };
        let flag = if r.on_grid { "" } else { " (off-grid)" };
        let digits = r.digits.map(|d| d.to_string()).unwrap_or_else(|| "-".into());
        println!("{:>8} {:>6} {:>7}  {}{flag}", r.theta_deg, n, digits, cause_text(&r.result));
    }
    if !ntheta.rows.is_empty() {
        println!("n·theta for theta <= 40: min {:.1}, max {:.1}, mean {:.1}", ntheta.min, ntheta.max, ntheta.mean);
    }
    let doc = LimitsDocument {
        kind: a.kind,
        n_cap: a.n_cap,
        digits_start: policy.start,
        digits_max: policy.max,
        library_version: VERSION,
        rows,
        ntheta,
    };
    if let Some(p) = &a.out {
        if let Err(c) = write(p, &json(&doc)) {
            return c;
        }
    }
    exit::OK
}

#[derive(Serialize)]
struct PrecisionDocument {
    kind: TriangulationKind,
    theta_deg: String,
    n_cap: u32,
    library_version: &'static str,
    curve: hypar_core::analysis::PrecisionCurve,
}

pub fn precision_table(a: PrecisionArgs) -> u8 {
    if a.digits.is_empty() || a.digits.windows(2).any(|w| w[0] >= w[1]) {
        return usage("--digits must be a non-empty ascending list");
    }
    if let Some(d) = a.digits.iter().find(|d| **d < 2) {
        return usage(format!("{d} digits is too few"));
    }
    let pool = match pool(a.jobs) {
        Ok(p) => p,
        Err(c) => return c,
    };
    let ns: Vec<u32> =
        pool.install(|| a.digits.par_iter().map(|&d| max_constructible(&a.theta, a.kind, d, a.n_cap, Numerics::default())).collect());
    let curve = hypar_core::analysis::curve_from_points(a.digits.iter().copied().zip(ns).collect(), a.n_cap);
    let cells = |f: &dyn Fn(&hypar_core::analysis::PrecisionPoint) -> String| {
        curve.points.iter().map(|p| format!("{:>6}", f(p))).collect::<Vec<_>>().join(" ")
    };
    println!("{:<22} {}", "digits", cells(&|p| p.digits.to_string()));
    let label = format!("n for theta={} {}", a.theta, a.kind);
    println!("{label:<22} {}", cells(&|p| if p.capped { format!(">={}", p.n) } else { p.n.to_string() }));
    match curve.loglog_slope {
        Some(s) => println!("log-log slope {s:.3}"),
        None => println!("log-log slope undefined (fewer than two uncapped points)"),
    }
    let doc = PrecisionDocument { kind: a.kind, theta_deg: a.theta.to_string(), n_cap: a.n_cap, library_version: VERSION, curve };
    if let Some(p) = &a.out {
        if let Err(c) = write(p, &json(&doc)) {
            return c;
        }
    }
    exit::OK
}

#[derive(Serialize)]
struct AuditDocument {
    header: Header,
    lemma_grid_points: usize,
    lemma_uncertified: Vec<String>,
    degree4: Degree4Report,
    isometry_violations: Vec<String>,
    mv_violations: Vec<String>,
    stored_sign_mismatches: Vec<String>,
    passed: bool,
}

pub fn audit(a: AuditArgs) -> u8 {
    match audit_inner(a) {
        Ok(c) | Err(c) => c,
    }
}

fn load(path: &PathBuf) -> Result<FoldState, u8> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    state_from_json(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        exit::AUDIT_FAILURE
    })
}

fn audit_inner(a: AuditArgs) -> Result<u8, u8> {
    let state = match &a.input {
        Some(p) => load(p)?,
        None => {
            let (n, theta) = (a.n.expect("required by clap"), a.theta.clone().expect("required by clap"));
            if n == 0 {
                return Err(usage("--n must be at least 1"));
            }
            build(n, &theta, a.kind.unwrap_or(TriangulationKind::Asymmetric), &a.precision, |_| true)?
        }
    };
    let grid: Vec<BigRational> = (0..90).map(|i| BigRational::from_integer((2 * i + 1).into())).collect();
    let lemma = four_triangle_obstruction(&grid, a.lemma_digits);
    let lemma_uncertified: Vec<String> =
        lemma.cases.iter().filter(|(_, o)| *o == FourTriangleOutcome::Uncertified).map(|(p, _)| p.clone()).collect();
    let degree4 = degree4_sign_audit(&state);
    let label = |i: usize| {
        let (x, y) = state.pattern.creases[i].endpoints;
        format!("{x}-{y}")
    };
    let isometry_violations: Vec<String> = state.isometry_violations().into_iter().map(label).collect();
    let mv_violations: Vec<String> = state
        .diagnostics
        .mv_violations
        .iter()
        .map(|v| format!("{} expected {:+} realized {:+}", label(v.crease), v.expected, v.realized))
        .collect();
    let stored_sign_mismatches: Vec<String> = (0..state.pattern.creases.len())
        .filter(|&i| match (state.signs[i], state.crease_sign(i)) {
            (Some(s), Some(v)) => v.strict() != Some(s),
            (None, Some(v)) => v.strict().is_some(),
            (Some(_), None) => true,
            (None, None) => false,
        })
        .map(label)
        .collect();
    let passed = lemma_uncertified.is_empty()
        && degree4.passed()
        && isometry_violations.is_empty()
        && mv_violations.is_empty()
        && stored_sign_mismatches.is_empty();

    println!("state n={} theta={} kind={} digits={}", state.rings(), state.theta_deg, state.kind(), state.digits);
    println!("four-triangle lemma: {}/{} grid angles certified", grid.len() - lemma_uncertified.len(), grid.len());
    if degree4.checked() == 0 {
        println!("degree-4 sign audit: vacuous (no interior degree-4 vertex with certain signs)");
    } else {
        println!("degree-4 sign audit: {} vertices, {} failures", degree4.checked(), degree4.failures().len());
    }
    for (v, f) in degree4.failures() {
        println!("  {v}: {f:?}");
    }
    println!("isometry violations: {}", isometry_violations.len());
    println!("mountain-valley violations: {}", mv_violations.len());
    for m in mv_violations.iter().take(8) {
        println!("  {m}");
    }
    println!("stored signs inconsistent with positions: {}", stored_sign_mismatches.len());
    println!("audit {}", if passed { "passed" } else { "FAILED" });

    if let Some(p) = &a.out {
        let doc = AuditDocument {
            header: Header::of(&state),
            lemma_grid_points: grid.len(),
            lemma_uncertified,
            degree4,
            isometry_violations,
            mv_violations,
            stored_sign_mismatches,
            passed,
        };
        write(p, &json(&doc))?;
    }
    Ok(if passed { exit::OK } else { exit::AUDIT_FAILURE })
}

pub fn cross_section(a: SectionArgs) -> u8 {
    match section_inner(a) {
        Ok(c) | Err(c) => c,
    }
}

fn section_inner(a: SectionArgs) -> Result<u8, u8> {
    if a.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let state = build(a.n, &a.theta, a.kind, &a.precision, |_| true)?;
    let cs = section(&state).map_err(|e| {
        eprintln!("error: {e}");
        exit::PRECISION_EXHAUSTED
    })?;
    let report = match fit_and_deviate(&cs) {
        Ok(r) => r,
        Err(e @ AnalysisError::InsufficientPoints { .. }) => return Err(usage(e)),
        Err(e) => {
            eprintln!("error: {e}");
            return Err(exit::PRECISION_EXHAUSTED);
        }
    };
    let mut header = Header::of(&state).lines();
    header.push("frame: origin at central diagonal midpoint, z along the summed central face normals, u = horizontal radius".into());
    for f in &report.fits {
        println!("{} fit through k={:?}: z = {:.6} u^2 + {:.6} u + {:.6}", f.parity.name(), f.through, f.a, f.b, f.c);
    }
    println!("max |fit - actual| = {:.6} (diagonal crease length {:.6})", report.max_abs_deviation(), 2f64.sqrt());
    println!("u increasing within each parity class: {}", cs.u_increasing_per_class());
    if let Some(p) = &a.csv {
        write(p, &deviation_csv(&report, &header))?;
    }
    if let Some(prefix) = &a.svg {
        let title = format!("theta={} n={} {}", state.theta_deg, state.rings(), state.kind());
        let with = |suffix: &str| {
            let mut s = prefix.clone().into_os_string();
            s.push(suffix);
            PathBuf::from(s)
        };
        write(&with("-section.svg"), &cross_section_svg(&report, &format!("cross-section, {title}")))?;
        write(&with("-abs.svg"), &deviation_svg(&report, false, &format!("fit minus actual, {title}")))?;
        write(&with("-rel.svg"), &deviation_svg(&report, true, &format!("fit over actual, {title}")))?;
    }
    Ok(exit::OK)
}
