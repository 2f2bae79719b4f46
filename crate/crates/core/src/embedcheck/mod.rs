//! Self-intersection certification and the finite obstruction lemmas.
//!
//! A folded state is an embedding when pattern-disjoint faces are disjoint
//! and faces sharing a vertex or an edge meet only there. Each face pair is
//! decided by a cascade: `f64` bounding boxes, then the predicates of
//! [`tritri`] in directed `f64` intervals, then in decimal intervals at a
//! reduced and finally at the full construction precision.

pub mod lemmas;
pub mod tritri;

use std::time::Instant;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::foldctor::{place_central_with, ConstructError, FoldState, Numerics, DEFAULT_DIGITS_MAX, DEFAULT_DIGITS_START};
use crate::geom3::IPoint3;
use crate::ivalnum::Interval;
use crate::pattern::{CreasePattern, Face, TriangulationKind};

pub use lemmas::{degree4_sign_audit, four_triangle_obstruction, Degree4Report, FourTriangleReport};
pub use tritri::PairVerdict;
use tritri::{fi_point, iv_point, tri_tri, Fi, V3};

/// Precision of the intermediate decimal pass.
const CHECK_DIGITS: u32 = 40;

/// A pair of faces by their vertex labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacePair {
    pub first: [String; 3],
    pub second: [String; 3],
}

impl FacePair {
    fn new(a: &Face, b: &Face) -> Self {
        FacePair { first: a.map(|v| v.to_string()), second: b.map(|v| v.to_string()) }
    }
}

impl std::fmt::Display for FacePair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) x ({})", self.first.join(" "), self.second.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict3 {
    CertainlyEmbedded,
    CertainlyIntersecting(FacePair),
    Indeterminate(FacePair),
}

/// Counters of one embedding check.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairStats {
    pub pairs: usize,
    pub disjoint_pairs: usize,
    pub vertex_pairs: usize,
    pub edge_pairs: usize,
    pub culled_by_boxes: usize,
    pub decided_in_f64: usize,
    pub decided_in_decimal: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub verdict: Verdict3,
    pub rings: u32,
    pub digits: u32,
    pub stats: PairStats,
    pub indeterminate: Vec<FacePair>,
    pub wall_time_ms: u128,
}

fn shared_vertices(a: &Face, b: &Face) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, v) in a.iter().enumerate() {
        if let Some(j) = b.iter().position(|w| w == v) {
            out.push((i, j));
        }
    }
    out
}

struct Prepared<'a> {
    state: &'a FoldState,
    fast: Vec<V3<Fi>>,
    reduced: Vec<V3<Interval>>,
    boxes: Vec<([f64; 3], [f64; 3])>,
}

impl<'a> Prepared<'a> {
    fn new(state: &'a FoldState) -> Self {
        let fast: Vec<V3<Fi>> = state.positions.iter().map(fi_point).collect();
        let reduced = state
            .positions
            .iter()
            .map(|p| iv_point(&p.with_prec(CHECK_DIGITS.min(state.digits))))
            .collect();
        let boxes = state
            .pattern
            .faces
            .iter()
            .map(|f| {
                let mut lo = [f64::INFINITY; 3];
                let mut hi = [f64::NEG_INFINITY; 3];
                for v in f {
                    for (c, x) in fast[v.index()].iter().enumerate() {
                        lo[c] = lo[c].min(x.lo);
                        hi[c] = hi[c].max(x.hi);
                    }
                }
                (lo, hi)
            })
            .collect();
        Prepared { state, fast, reduced, boxes }
    }

    fn tri<T: Clone>(pts: &[V3<T>], f: &Face) -> [V3<T>; 3] {
        [pts[f[0].index()].clone(), pts[f[1].index()].clone(), pts[f[2].index()].clone()]
    }

    /// Verdict for faces `i < j`, plus which stage decided it.
    fn pair(&self, i: usize, j: usize) -> (PairVerdict, Stage) {
        let faces = &self.state.pattern.faces;
        let (a, b) = (&faces[i], &faces[j]);
        let shared = shared_vertices(a, b);
        if shared.is_empty() {
            let (la, ha) = self.boxes[i];
            let (lb, hb) = self.boxes[j];
            if (0..3).any(|c| ha[c] < lb[c] || hb[c] < la[c]) {
                return (PairVerdict::Disjoint, Stage::Boxes);
            }
        }
        let v = tri_tri(&Self::tri(&self.fast, a), &Self::tri(&self.fast, b), &shared);
        if v != PairVerdict::Indeterminate {
            return (v, Stage::Fast);
        }
        let v = tri_tri(&Self::tri(&self.reduced, a), &Self::tri(&self.reduced, b), &shared);
        if v != PairVerdict::Indeterminate || self.state.digits <= CHECK_DIGITS {
            return (v, Stage::Decimal);
        }
        let full: Vec<V3<Interval>> = [a, b].iter().flat_map(|f| f.iter().map(|v| iv_point(self.state.pos(*v)))).collect();
        let ta = [full[0].clone(), full[1].clone(), full[2].clone()];
        let tb = [full[3].clone(), full[4].clone(), full[5].clone()];
        (tri_tri(&ta, &tb, &shared), Stage::Decimal)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stage {
    Boxes,
    Fast,
    Decimal,
}

/// Certifies one face pair of a folded state.
pub fn tri_tri_verdict(t1: &[IPoint3; 3], t2: &[IPoint3; 3], shared: &[(usize, usize)]) -> PairVerdict {
    let f1 = [fi_point(&t1[0]), fi_point(&t1[1]), fi_point(&t1[2])];
    let f2 = [fi_point(&t2[0]), fi_point(&t2[1]), fi_point(&t2[2])];
    match tri_tri(&f1, &f2, shared) {
        PairVerdict::Indeterminate => {
            let i1 = [iv_point(&t1[0]), iv_point(&t1[1]), iv_point(&t1[2])];
            let i2 = [iv_point(&t2[0]), iv_point(&t2[1]), iv_point(&t2[2])];
            tri_tri(&i1, &i2, shared)
        }
        v => v,
    }
}

/// Checks all face pairs that involve a face with index `>= first_new`.
pub fn check_embedding_from(state: &FoldState, first_new: usize) -> EmbeddingReport {
    let start = Instant::now();
    let prep = Prepared::new(state);
    let faces = &state.pattern.faces;
    let results: Vec<(usize, usize, PairVerdict, Stage, usize)> = (first_new..faces.len())
        .into_par_iter()
        .flat_map_iter(|j| {
            let prep = &prep;
            (0..j).map(move |i| {
                let (v, s) = prep.pair(i, j);
                (i, j, v, s, shared_vertices(&faces[i], &faces[j]).len())
            })
        })
        .collect();
    let mut stats = PairStats { pairs: results.len(), ..Default::default() };
    let mut hit = None;
    let mut indeterminate = Vec::new();
    for &(i, j, v, s, sh) in &results {
        match sh {
            0 => stats.disjoint_pairs += 1,
            1 => stats.vertex_pairs += 1,
            _ => stats.edge_pairs += 1,
        }
        match s {
            Stage::Boxes => stats.culled_by_boxes += 1,
            Stage::Fast => stats.decided_in_f64 += 1,
            Stage::Decimal => stats.decided_in_decimal += 1,
        }
        match v {
            PairVerdict::Intersecting if hit.is_none() => hit = Some(FacePair::new(&faces[i], &faces[j])),
            PairVerdict::Indeterminate => indeterminate.push(FacePair::new(&faces[i], &faces[j])),
            _ => {}
        }
    }
    let verdict = match (hit, indeterminate.first()) {
        (Some(p), _) => Verdict3::CertainlyIntersecting(p),
        (None, Some(p)) => Verdict3::Indeterminate(p.clone()),
        (None, None) => Verdict3::CertainlyEmbedded,
    };
    EmbeddingReport {
        verdict,
        rings: state.rings(),
        digits: state.digits,
        stats,
        indeterminate,
        wall_time_ms: start.elapsed().as_millis(),
    }
}

/// All-pairs embedding check.
pub fn check_embedding(state: &FoldState) -> EmbeddingReport {
    check_embedding_from(state, 0)
}

/// Number of face pairs for `n` rings.
pub fn pair_count(n: u32) -> usize {
    let f = CreasePattern::face_count_through(n);
    f * (f - 1) / 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitsPolicy {
    pub start: u32,
    pub max: u32,
}

impl Default for DigitsPolicy {
    fn default() -> Self {
        DigitsPolicy { start: DEFAULT_DIGITS_START, max: DEFAULT_DIGITS_MAX }
    }
}

/// Why the frontier sits where it does.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrontierCause {
    /// Ring `n + 1` certainly self-intersects.
    SelfIntersection(FacePair),
    /// Ring `n + 1` certainly cannot be constructed.
    Infeasible(String),
    /// Adding ring `n + 1` certainly folds an assigned crease the wrong way.
    MvViolation { crease: String, expected: i32, realized: i32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaxRings {
    /// `n` is certified embedded and `n + 1` certainly fails.
    Exact { n: u32, cause: FrontierCause },
    /// Every ring up to the cap is certified embedded.
    AtCap { n: u32 },
    /// Rings up to `at_least` are certified; the next one could not be decided.
    Unknown { at_least: u32, reason: String },
}

impl MaxRings {
    /// Certified lower bound on the number of rings.
    pub fn lower_bound(&self) -> u32 {
        match self {
            MaxRings::Exact { n, .. } | MaxRings::AtCap { n } => *n,
            MaxRings::Unknown { at_least, .. } => *at_least,
        }
    }

    pub fn exact(&self) -> Option<u32> {
        match self {
            MaxRings::Exact { n, .. } => Some(*n),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrontierReport {
    pub result: MaxRings,
    /// Highest precision used.
    pub digits: u32,
}

/// Largest `n <= n_cap` with a proper folding: it exists, realizes every
/// assigned mountain-valley sign and is certified embedded.
///
/// Rings are added one at a time and only the pairs involving new faces are
/// checked. A numerical failure restarts the construction at twice the
/// digits; the already certified rings stay certified.
pub fn max_rings(theta_deg: &BigRational, kind: TriangulationKind, n_cap: u32, policy: DigitsPolicy) -> Result<FrontierReport, ConstructError> {
    max_rings_with(theta_deg, kind, n_cap, policy, Numerics::default())
}

pub fn max_rings_with(
    theta_deg: &BigRational,
    kind: TriangulationKind,
    n_cap: u32,
    policy: DigitsPolicy,
    numerics: Numerics,
) -> Result<FrontierReport, ConstructError> {
    if n_cap == 0 {
        return Err(ConstructError::InvalidArgument("n_cap must be at least 1".into()));
    }
    let mut digits = policy.start;
    let mut state = place_central_with(theta_deg, kind, digits, numerics)?;
    let mut certified = 1;
    let done = |result, digits| Ok(FrontierReport { result, digits });
    loop {
        if certified >= n_cap {
            return done(MaxRings::AtCap { n: certified }, digits);
        }
        let k = certified + 1;
        let failure = 'attempt: {
            while state.rings() < k {
                match state.ring_step() {
                    Ok(()) => {}
                    Err(e) if !e.is_numerical() => {
                        let cause = FrontierCause::Infeasible(e.to_string());
                        return done(MaxRings::Exact { n: certified, cause }, digits);
                    }
                    Err(e) => break 'attempt Some(e.to_string()),
                }
            }
            let mv = state.diagnostics.mv_violations.first().map(|v| {
                let (a, b) = state.pattern.creases[v.crease].endpoints;
                FrontierCause::MvViolation { crease: format!("{a}-{b}"), expected: v.expected, realized: v.realized }
            });
            let rep = check_embedding_from(&state, CreasePattern::face_count_through(k - 1));
            match (rep.verdict, mv) {
                (Verdict3::CertainlyIntersecting(p), _) => {
                    let cause = FrontierCause::SelfIntersection(p);
                    return done(MaxRings::Exact { n: certified, cause }, digits);
                }
                (_, Some(cause)) => return done(MaxRings::Exact { n: certified, cause }, digits),
                (Verdict3::CertainlyEmbedded, None) => None,
                (Verdict3::Indeterminate(p), None) => Some(format!("undecided face pair {p} at {digits} digits")),
            }
        };
        let Some(failure) = failure else {
            certified = k;
            continue;
        };
        if digits >= policy.max {
            return done(MaxRings::Unknown { at_least: certified, reason: failure }, digits);
        }
        digits = (digits * 2).min(policy.max);
        state = place_central_with(theta_deg, kind, digits, numerics)?;
    }
}
