//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach the terminal.
//! A criterion listed in `KNOWN_DEVIATIONS` prints FAIL for the affected
//! component but does not fail the process; every other FAIL does.

mod support;

use std::time::Instant;

use hypar_core::analysis::{cross_section, fit_and_deviate, ntheta_study, precision_curve};
use hypar_core::embedcheck::{check_embedding, degree4_sign_audit, four_triangle_obstruction, max_rings, DigitsPolicy, MaxRings, Verdict3};
use hypar_core::embedcheck::lemmas::FourTriangleOutcome;
use hypar_core::foldctor::{construct, construct_auto, DEFAULT_DIGITS_MAX};
use hypar_core::ivalnum::BigNum;
use hypar_core::{FoldState, TriangulationKind};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use support::*;

const ASYM: TriangulationKind = TriangulationKind::Asymmetric;
const ALT: TriangulationKind = TriangulationKind::AlternatingAsymmetric;

/// Components that are reported but tolerated.
const KNOWN_DEVIATIONS: &[(u32, &str)] = &[
    (2, "per-precision ±3 band; the growth trend is still required"),
    (8, "product band; every n must still equal the reference frontier"),
];

/// Reference largest-n values for θ = 2°, 4°, …, 40°.
const REFERENCE_SMALL_ANGLE_FRONTIER: [u32; 20] = [133, 67, 45, 33, 27, 23, 19, 17, 15, 13, 13, 11, 11, 9, 9, 9, 9, 7, 7, 7];

type Criterion<'a> = (u32, &'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
    /// Failing component that is a recorded deviation.
    tolerated: Option<String>,
}

fn pass(detail: String) -> Outcome {
    Outcome { pass: true, detail, tolerated: None }
}

fn fail(detail: String) -> Outcome {
    Outcome { pass: false, detail, tolerated: None }
}

fn deg(d: i64) -> BigRational {
    BigRational::from_integer(d.into())
}

fn frontier(theta: i64) -> MaxRings {
    max_rings(&deg(theta), ASYM, 400, DigitsPolicy::default())
        .map(|r| r.result)
        .unwrap_or_else(|e| MaxRings::Unknown { at_least: 0, reason: e.to_string() })
}

fn frontier_table() -> Outcome {
    let expected = [(8, 33), (30, 9), (48, 5), (74, 3), (178, 3)];
    let got: Vec<MaxRings> = expected.par_iter().map(|&(t, _)| frontier(t)).collect();
    let mut ok = true;
    let mut cells = Vec::new();
    for ((t, want), r) in expected.iter().zip(&got) {
        match r {
            MaxRings::Exact { n, .. } => {
                ok &= n == want;
                cells.push(format!("{t}°→{n} (want {want})"));
            }
            MaxRings::Unknown { at_least, reason } => {
                ok = false;
                cells.push(format!("{t}°→≥{at_least} indeterminate: {reason}"));
            }
            MaxRings::AtCap { n } => {
                ok = false;
                cells.push(format!("{t}°→≥{n} at cap"));
            }
        }
    }
    Outcome { pass: ok, detail: cells.join(", "), tolerated: None }
}

fn precision_growth() -> Outcome {
    let digits = [16, 32, 64, 128];
    let reference = [3u32, 6, 12, 22];
    let curve = precision_curve(&deg(1), ASYM, &digits, 100);
    let ns: Vec<u32> = curve.points.iter().map(|p| p.n).collect();
    let band: Vec<bool> = ns.iter().zip(reference).map(|(&n, p)| n.abs_diff(p) <= 3).collect();
    let monotone = ns.windows(2).all(|w| w[0] < w[1]) && curve.points.iter().all(|p| !p.capped);
    let slope = curve.loglog_slope.unwrap_or(f64::NAN);
    let trend = monotone && (0.8..=1.2).contains(&slope);
    let detail = format!("n = {ns:?} vs {reference:?}, within ±3: {band:?}; log-log slope {slope:.3}, monotone {monotone}");
    let outside: Vec<String> =
        digits.iter().zip(&band).filter(|(_, ok)| !**ok).map(|(d, _)| format!("{d} digits")).collect();
    Outcome {
        pass: trend,
        tolerated: (!outside.is_empty()).then(|| format!("±3 band missed at {}", outside.join(", "))),
        detail,
    }
}

fn embedded_at_scale(theta: i64) -> Result<u32, String> {
    let (mut state, mut digits) =
        construct_auto(100, &deg(theta), ALT, 16, DEFAULT_DIGITS_MAX).map_err(|e| e.to_string())?;
    loop {
        match check_embedding(&state).verdict {
            Verdict3::CertainlyEmbedded => return Ok(digits),
            Verdict3::CertainlyIntersecting(p) => return Err(format!("intersecting {p}")),
            Verdict3::Indeterminate(p) if digits >= DEFAULT_DIGITS_MAX => return Err(format!("indeterminate {p}")),
            Verdict3::Indeterminate(_) => {
                digits *= 2;
                state = construct(100, &deg(theta), ALT, digits).map_err(|e| e.to_string())?;
            }
        }
    }
}

fn existence() -> Outcome {
    let res: Vec<(i64, Result<u32, String>)> = [2, 30, 178].par_iter().map(|&t| (t, embedded_at_scale(t))).collect();
    let ok = res.iter().all(|(_, r)| r.is_ok());
    let cells: Vec<String> = res
        .iter()
        .map(|(t, r)| match r {
            Ok(d) => format!("{t}°: embedded at {d} digits"),
            Err(e) => format!("{t}°: {e}"),
        })
        .collect();
    Outcome { pass: ok, detail: cells.join(", "), tolerated: None }
}

fn small_grid() -> Vec<(TriangulationKind, u32, i64)> {
    let mut grid = Vec::new();
    for kind in [ASYM, ALT] {
        for n in [1, 3, 5, 8] {
            for theta in [2, 30, 74, 178] {
                grid.push((kind, n, theta));
            }
        }
    }
    grid
}

fn grid_states() -> Result<Vec<FoldState>, String> {
    small_grid()
        .par_iter()
        .map(|&(kind, n, t)| {
            construct_auto(n, &deg(t), kind, 16, DEFAULT_DIGITS_MAX)
                .map(|(s, _)| s)
                .map_err(|e| format!("{kind:?} n={n} θ={t}: {e}"))
        })
        .collect()
}

fn isometry(states: &[FoldState]) -> Outcome {
    let mut creases = 0;
    let mut bad = Vec::new();
    for s in states {
        for c in &s.pattern.creases {
            creases += 1;
            let d = s.pos(c.endpoints.0).dist_sq(s.pos(c.endpoints.1));
            let (a, b) = c.endpoints;
            let exact = (a.planar_coords().0 - b.planar_coords().0).pow(2) + (a.planar_coords().1 - b.planar_coords().1).pow(2);
            if !d.contains(&BigNum::from_i64(exact)) {
                bad.push(format!("{a}-{b}"));
            }
        }
    }
    let detail = format!("{} instances, {creases} creases, {} violations", states.len(), bad.len());
    if states.len() >= 20 && bad.is_empty() {
        pass(detail)
    } else {
        fail(format!("{detail} {bad:?}"))
    }
}

fn trilateration() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e11);
    let mut errors = Vec::new();
    for _ in 0..1000 {
        let inst = SphereInstance::random(&mut rng);
        let prec = rng.gen_range(20..60);
        if let Err(e) = check_trilateration(&inst, prec) {
            errors.push(e);
        }
    }
    let detail = format!("1000 instances, Frame and Gram, {} violations", errors.len());
    if errors.is_empty() {
        pass(detail)
    } else {
        fail(format!("{detail}; first: {}", errors[0]))
    }
}

fn interval_properties() -> Outcome {
    const CASES: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a7e);
    let mut errors: Vec<String> = Vec::new();
    let mut runs = 0;
    for op in OPS {
        for _ in 0..CASES {
            let (a, b) = (RawInterval::random(&mut rng), RawInterval::random(&mut rng));
            let t = q(rng.gen_range(0..=1000), 1000);
            let p = rng.gen_range(4..40);
            let extra = rng.gen_range(1..40);
            errors.extend(check_containment(op, &a, &b, p, &t).err());
            errors.extend(check_precision_nesting(op, &a, &b, p, p + extra).err());
            runs += 2;
        }
    }
    for _ in 0..CASES {
        let a = RawInterval::random(&mut rng);
        errors.extend(check_sqrt_square(&a, rng.gen_range(4..60)).err());
        errors.extend(check_pythagoras(rng.gen_range(0..=180_000), 1000, rng.gen_range(16..80)).err());
        runs += 2;
    }
    let detail = format!("{runs} checks over {} operations, {CASES} cases each, {} violations", OPS.len() + 2, errors.len());
    if errors.is_empty() {
        pass(detail)
    } else {
        fail(format!("{detail}; first: {}", errors[0]))
    }
}

fn lemmas(states: &[FoldState]) -> Outcome {
    let grid: Vec<BigRational> = (0..90).map(|i| deg(2 * i + 1)).collect();
    let four = four_triangle_obstruction(&grid, 60);
    let audits: Vec<_> = states.iter().map(degree4_sign_audit).collect();
    let checked: usize = audits.iter().map(|a| a.checked()).sum();
    let failures: usize = audits.iter().map(|a| a.failures().len()).sum();
    let detail = format!(
        "four-triangle: {}/{} angles certified; degree-4 audit: {checked} vertices over {} instances, {failures} failures",
        four.cases.iter().filter(|(_, o)| matches!(o, FourTriangleOutcome::Parallel)).count(),
        grid.len(),
        states.len(),
    );
    if four.all_certified() && four.cases.len() == 90 && failures == 0 && checked > 0 {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn ntheta() -> Outcome {
    let thetas: Vec<i64> = (1..=20).map(|i| 2 * i).collect();
    let res: Vec<(i64, MaxRings)> = thetas.par_iter().map(|&t| (t, frontier(t))).collect();
    let mismatched: Vec<String> = res
        .iter()
        .zip(REFERENCE_SMALL_ANGLE_FRONTIER)
        .filter(|((_, r), want)| r.exact() != Some(*want))
        .map(|((t, r), want)| format!("{t}°: {r:?}, reference {want}"))
        .collect();
    let limits: Vec<(BigRational, u32)> = res.iter().filter_map(|(t, r)| r.exact().map(|n| (deg(*t), n))).collect();
    let report = ntheta_study(&limits);
    let outside: Vec<String> = report
        .rows
        .iter()
        .filter(|r| !(260.0..=285.0).contains(&r.product_deg))
        .map(|r| format!("{}°·{}={}°", r.theta_deg, r.n, r.product_deg))
        .collect();
    let detail = format!(
        "{} angles, n·θ in [{:.0}°, {:.0}°], mean {:.1}°, {} of 20 n equal to the reference frontier",
        report.rows.len(),
        report.min,
        report.max,
        report.mean,
        20 - mismatched.len()
    );
    Outcome {
        pass: mismatched.is_empty(),
        detail: if mismatched.is_empty() { detail } else { format!("{detail}; mismatched {mismatched:?}") },
        tolerated: (!outside.is_empty()).then(|| format!("outside [260°, 285°]: {}", outside.join(", "))),
    }
}

fn section() -> Outcome {
    let run = || -> Result<(f64, f64, u32), String> {
        let (state, digits) = construct_auto(100, &deg(30), ALT, 16, DEFAULT_DIGITS_MAX).map_err(|e| e.to_string())?;
        let cs = cross_section(&state).map_err(|e| e.to_string())?;
        let fit = fit_and_deviate(&cs).map_err(|e| e.to_string())?;
        Ok((fit.max_defining_residual(), fit.max_abs_deviation(), digits))
    };
    match run() {
        Ok((resid, dev, digits)) => {
            let detail = format!("{digits} digits, defining-point residual {resid:.1e}, max |deviation| {dev:.4} < √2");
            if resid <= 1e-9 && dev < 2f64.sqrt() {
                pass(detail)
            } else {
                fail(detail)
            }
        }
        Err(e) => fail(e),
    }
}

fn main() {
    let start = Instant::now();
    let states = grid_states();
    let criteria: Vec<Criterion> = vec![
        (1, "frontier table", Box::new(frontier_table)),
        (2, "precision growth", Box::new(precision_growth)),
        (3, "existence at n=100", Box::new(existence)),
        (
            4,
            "isometry containment",
            Box::new(|| match &states {
                Ok(s) => isometry(s),
                Err(e) => fail(e.clone()),
            }),
        ),
        (5, "trilateration oracle", Box::new(trilateration)),
        (6, "interval properties", Box::new(interval_properties)),
        (
            7,
            "obstruction lemmas",
            Box::new(|| match &states {
                Ok(s) => lemmas(s),
                Err(e) => fail(e.clone()),
            }),
        ),
        (8, "n·θ study", Box::new(ntheta)),
        (9, "cross-section fit", Box::new(section)),
    ];
    let mut hard_failures = 0;
    for (id, name, f) in &criteria {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        let status = if o.pass && o.tolerated.is_none() { "PASS" } else { "FAIL" };
        println!("criterion {id} {status} [{name}] {} ({secs:.1} s)", o.detail);
        if let Some(t) = &o.tolerated {
            match KNOWN_DEVIATIONS.iter().find(|(k, _)| k == id) {
                Some((_, why)) => println!("    known deviation ({why}): {t}"),
                None => {
                    println!("    unexpected: {t}");
                    hard_failures += 1;
                }
            }
        }
        if !o.pass {
            hard_failures += 1;
        }
    }
    println!("acceptance: {hard_failures} unexpected failures in {:.1} s", start.elapsed().as_secs_f64());
    if hard_failures > 0 {
        std::process::exit(1);
    }
}
