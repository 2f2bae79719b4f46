//! Inside-out construction of the folded state.
//!
//! The central square is placed from the fold angle θ of its diagonal. Each
//! further ring is solved in two phases following the pattern schedule: the
//! two target corners from three previous-ring neighbours, then the other two
//! from one previous-ring neighbour and the two fresh targets. Of the two
//! mirror candidates returned by [`trisphere`], the one whose main-diagonal
//! crease into the new corner carries the assigned mountain-valley sign is
//! kept. The wings of that crease are sphere centres, so the mirror flips its
//! sign exactly and at most one candidate can match.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom3::{dihedral_sign, fold_angle, trisphere_with, GeomError, IPoint3, Trilateration};
use crate::ivalnum::{sincos_deg, Interval, SignVerdict};
use crate::pattern::{Corner, CornerId, CreaseKind, CreasePattern, MvSign, TriangulationKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// No real intersection exists: no proper folding with this θ, pattern and branch schedule.
    #[error("no folding exists: spheres for {vertex} certainly do not intersect")]
    CertainlyInfeasible { vertex: CornerId },
    #[error("radicand for {vertex} straddles zero at {digits} digits")]
    IndeterminateRadicand { vertex: CornerId, digits: u32 },
    #[error("cannot choose a mirror candidate for {vertex} at {digits} digits")]
    BranchAmbiguous { vertex: CornerId, digits: u32 },
    #[error("sphere centres for {vertex} are not certainly independent at {digits} digits")]
    DegenerateCenters { vertex: CornerId, digits: u32 },
    #[error("fold sign of crease {crease} is not certain at {digits} digits")]
    IndeterminateFold { crease: String, ring: u32, digits: u32 },
    #[error("no success up to {digits} digits (last failure: {last})")]
    PrecisionExhausted { digits: u32, last: Box<ConstructError> },
}

impl ConstructError {
    /// Whether more digits could change the outcome.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, ConstructError::InvalidArgument(_) | ConstructError::CertainlyInfeasible { .. })
    }

    /// Ring at which the construction stopped, if known.
    pub fn ring(&self) -> Option<u32> {
        match self {
            ConstructError::InvalidArgument(_) => None,
            ConstructError::CertainlyInfeasible { vertex }
            | ConstructError::IndeterminateRadicand { vertex, .. }
            | ConstructError::BranchAmbiguous { vertex, .. }
            | ConstructError::DegenerateCenters { vertex, .. } => Some(vertex.ring),
            ConstructError::IndeterminateFold { ring, .. } => Some(*ring),
            ConstructError::PrecisionExhausted { last, .. } => last.ring(),
        }
    }
}

/// An assigned crease whose realized fold sign disagrees with the pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MvViolation {
    pub crease: usize,
    pub kind: CreaseKind,
    pub expected: i32,
    pub realized: i32,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub mv_violations: Vec<MvViolation>,
}

/// Order in which the three placed neighbours of a new corner enter the
/// trilateration as `c1, c2, c3`. Interval widths depend on it noticeably.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CenterOrder {
    /// Neighbours in the order their creases appear in the pattern.
    #[default]
    PatternOrder,
    /// The previous-ring end of the main diagonal first, the rest in pattern order.
    HingeFirst,
}

/// Numerical arrangement of the construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Numerics {
    pub method: Trilateration,
    pub order: CenterOrder,
}

/// The folded state of the first `pattern.n` rings.
#[derive(Clone, Debug)]
pub struct FoldState {
    pub pattern: CreasePattern,
    pub theta_deg: BigRational,
    pub digits: u32,
    pub numerics: Numerics,
    /// Indexed by [`CornerId::index`].
    pub positions: Vec<IPoint3>,
    /// Certified fold sign of every interior crease, indexed like `pattern.creases`.
    pub signs: Vec<Option<i32>>,
    pub diagnostics: Diagnostics,
}

/// Parses an angle in degrees: an integer, a decimal or a fraction `p/q`.
pub fn parse_angle(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| format!("bad angle {s:?}"))?;
        let q: BigInt = q.trim().parse().map_err(|_| format!("bad angle {s:?}"))?;
        if q.is_zero() {
            return Err(format!("bad angle {s:?}"));
        }
        return Ok(BigRational::new(p, q));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) {
        return Err(format!("bad angle {s:?}"));
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = digits.parse().map_err(|_| format!("bad angle {s:?}"))?;
    Ok(BigRational::new(num, BigInt::from(10).pow(frac.len() as u32)))
}

fn check_theta(theta: &BigRational) -> Result<(), ConstructError> {
    if !theta.is_positive() || *theta >= BigRational::from_integer(180.into()) {
        return Err(ConstructError::InvalidArgument(format!("θ = {theta}° must lie strictly between 0° and 180°")));
    }
    Ok(())
}

fn check_digits(digits: u32) -> Result<(), ConstructError> {
    if digits < 4 {
        return Err(ConstructError::InvalidArgument(format!("{digits} digits is too few")));
    }
    Ok(())
}

/// Places ring 1: the triangle `LL, LR, UR` in the plane `z = 0` and `UL`
/// rotated about the central diagonal so that it folds as a mountain by θ.
pub fn place_central(theta_deg: &BigRational, kind: TriangulationKind, digits: u32) -> Result<FoldState, ConstructError> {
    place_central_with(theta_deg, kind, digits, Numerics::default())
}

pub fn place_central_with(
    theta_deg: &BigRational,
    kind: TriangulationKind,
    digits: u32,
    numerics: Numerics,
) -> Result<FoldState, ConstructError> {
    check_theta(theta_deg)?;
    check_digits(digits)?;
    let (s, c) = sincos_deg(theta_deg, digits);
    let sqrt2 = Interval::from_i64(2, digits).sqrt().expect("positive");
    let ul = IPoint3::new(c.neg(), c.clone(), (&sqrt2 * &s).neg());
    let positions = vec![
        IPoint3::from_i64(-1, -1, 0, digits),
        IPoint3::from_i64(1, -1, 0, digits),
        IPoint3::from_i64(1, 1, 0, digits),
        ul,
    ];
    let pattern = CreasePattern::build(1, kind);
    let signs = vec![None; pattern.creases.len()];
    let mut state = FoldState {
        pattern,
        theta_deg: theta_deg.clone(),
        digits,
        numerics,
        positions,
        signs,
        diagnostics: Diagnostics::default(),
    };
    state.record_signs()?;
    Ok(state)
}

impl FoldState {
    pub fn rings(&self) -> u32 {
        self.pattern.n
    }

    pub fn kind(&self) -> TriangulationKind {
        self.pattern.kind
    }

    pub fn pos(&self, v: CornerId) -> &IPoint3 {
        &self.positions[v.index()]
    }

    /// Solves ring `rings() + 1`.
    pub fn ring_step(&mut self) -> Result<(), ConstructError> {
        let k = self.rings() + 1;
        let pattern = CreasePattern::build(k, self.kind());
        let (targets, others) = self.kind().schedule(k);
        self.positions.extend((0..4).map(|_| IPoint3::from_i64(0, 0, 0, self.digits)));
        let mut placed = vec![false; 4];
        for phase in [targets, others] {
            for c in phase {
                let v = CornerId::new(k, c);
                match self.solve_corner(&pattern, v, &placed) {
                    Ok(p) => self.positions[v.index()] = p,
                    Err(e) => {
                        self.positions.truncate(4 * (k as usize - 1));
                        return Err(e);
                    }
                }
                placed[c as usize] = true;
            }
        }
        self.pattern = pattern;
        self.signs.resize(self.pattern.creases.len(), None);
        let recorded = self.record_signs();
        if recorded.is_err() {
            *self = self.truncated(k - 1);
        }
        recorded
    }

    fn solve_corner(&self, pattern: &CreasePattern, v: CornerId, placed: &[bool]) -> Result<IPoint3, ConstructError> {
        let digits = self.digits;
        let mut known: Vec<CornerId> = pattern
            .neighbours(v)
            .into_iter()
            .filter(|w| w.ring < v.ring || placed[w.corner as usize])
            .collect();
        assert_eq!(known.len(), 3, "schedule must give {v} three placed neighbours");
        let inner = CornerId::new(v.ring - 1, v.corner);
        if self.numerics.order == CenterOrder::HingeFirst {
            let at = known.iter().position(|&w| w == inner).expect("main diagonal neighbour");
            known[..=at].rotate_right(1);
        }
        let r = |w: CornerId| {
            let len = pattern.creases[pattern.crease_between(v, w).unwrap()].len_sq();
            Interval::from_i64(len, digits)
        };
        let pair = trisphere_with(
            self.numerics.method,
            self.pos(known[0]),
            &r(known[0]),
            self.pos(known[1]),
            &r(known[1]),
            self.pos(known[2]),
            &r(known[2]),
        )
        .map_err(|e| match e {
            GeomError::CertainlyInfeasible => ConstructError::CertainlyInfeasible { vertex: v },
            GeomError::IndeterminateRadicand => ConstructError::IndeterminateRadicand { vertex: v, digits },
            _ => ConstructError::DegenerateCenters { vertex: v, digits },
        })?;

        // governing crease: the main diagonal into v
        let ci = pattern.crease_between(inner, v).expect("main diagonal");
        let crease = &pattern.creases[ci];
        let want = crease.mv.value().expect("main diagonals are assigned");
        let (right, left) = pattern.wings(ci).expect("main diagonals are interior");
        let (a, b) = crease.endpoints;
        let matches = |cand: &IPoint3| -> Result<bool, ConstructError> {
            let at = |w: CornerId| if w == v { cand } else { self.pos(w) };
            let s = dihedral_sign(at(a), at(b), at(right), at(left))
                .map_err(|_| ConstructError::BranchAmbiguous { vertex: v, digits })?;
            Ok(s.certain() == Some(want))
        };
        match (matches(&pair.plus)?, matches(&pair.minus)?) {
            (true, false) => Ok(pair.plus),
            (false, true) => Ok(pair.minus),
            _ => Err(ConstructError::BranchAmbiguous { vertex: v, digits }),
        }
    }

    /// Certifies the sign of every interior crease not yet signed and records
    /// disagreements with the assignment.
    fn record_signs(&mut self) -> Result<(), ConstructError> {
        for i in 0..self.pattern.creases.len() {
            if self.signs[i].is_some() {
                continue;
            }
            let Some(verdict) = self.crease_sign(i) else { continue };
            let crease = &self.pattern.creases[i];
            let Some(s) = verdict.strict() else {
                return Err(ConstructError::IndeterminateFold {
                    crease: crease_label(crease.endpoints.0, crease.endpoints.1),
                    ring: self.rings(),
                    digits: self.digits,
                });
            };
            self.signs[i] = Some(s);
            if let Some(want) = crease.mv.value() {
                if want != s {
                    self.diagnostics.mv_violations.push(MvViolation { crease: i, kind: crease.kind, expected: want, realized: s });
                }
            }
        }
        Ok(())
    }

    /// Sign verdict of an interior crease (`None` for boundary creases).
    pub fn crease_sign(&self, crease: usize) -> Option<SignVerdict> {
        let (right, left) = self.pattern.wings(crease)?;
        let (a, b) = self.pattern.creases[crease].endpoints;
        Some(dihedral_sign(self.pos(a), self.pos(b), self.pos(right), self.pos(left)).unwrap_or(SignVerdict::Indeterminate))
    }

    /// Signed fold-angle enclosures (degrees) of all interior creases.
    pub fn fold_angles(&self) -> Result<Vec<Option<Interval>>, GeomError> {
        (0..self.pattern.creases.len())
            .map(|i| {
                let Some((right, left)) = self.pattern.wings(i) else { return Ok(None) };
                let (a, b) = self.pattern.creases[i].endpoints;
                fold_angle(self.pos(a), self.pos(b), self.pos(right), self.pos(left)).map(Some)
            })
            .collect()
    }

    /// Emergent signs of the triangulation diagonals, in crease order.
    pub fn emergent_signs(&self) -> Vec<(usize, i32)> {
        self.pattern
            .creases
            .iter()
            .enumerate()
            .filter(|(_, c)| c.mv == MvSign::Unassigned)
            .filter_map(|(i, _)| self.signs[i].map(|s| (i, s)))
            .collect()
    }

    /// Creases whose exact squared length is not contained in the realized
    /// squared distance of their endpoints.
    pub fn isometry_violations(&self) -> Vec<usize> {
        self.pattern
            .creases
            .iter()
            .enumerate()
            .filter(|(_, c)| {
                let d = self.pos(c.endpoints.0).dist_sq(self.pos(c.endpoints.1));
                !d.contains(&crate::ivalnum::BigNum::from_i64(c.len_sq()))
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// The state restricted to its first `rings` rings.
    pub fn truncated(&self, rings: u32) -> FoldState {
        assert!(rings >= 1 && rings <= self.rings());
        let pattern = CreasePattern::build(rings, self.kind());
        let m = pattern.creases.len();
        let mut signs = self.signs[..m].to_vec();
        // outer square edges become boundary creases again
        for (i, s) in signs.iter_mut().enumerate() {
            if !pattern.is_interior_crease(i) {
                *s = None;
            }
        }
        let mv_violations = self
            .diagnostics
            .mv_violations
            .iter()
            .filter(|v| v.crease < m && signs[v.crease].is_some())
            .cloned()
            .collect();
        FoldState {
            pattern,
            theta_deg: self.theta_deg.clone(),
            digits: self.digits,
            numerics: self.numerics,
            positions: self.positions[..4 * rings as usize].to_vec(),
            signs,
            diagnostics: Diagnostics { mv_violations },
        }
    }

    /// Largest interval width over all coordinates.
    pub fn max_width(&self) -> crate::ivalnum::BigNum {
        self.positions
            .iter()
            .map(|p| p.max_width())
            .max()
            .unwrap_or_else(crate::ivalnum::BigNum::zero)
    }
}

fn crease_label(a: CornerId, b: CornerId) -> String {
    format!("{a}-{b}")
}

/// Builds the folded state of `n` rings at a fixed precision.
pub fn construct(n: u32, theta_deg: &BigRational, kind: TriangulationKind, digits: u32) -> Result<FoldState, ConstructError> {
    construct_with(n, theta_deg, kind, digits, Numerics::default())
}

pub fn construct_with(
    n: u32,
    theta_deg: &BigRational,
    kind: TriangulationKind,
    digits: u32,
    numerics: Numerics,
) -> Result<FoldState, ConstructError> {
    if n == 0 {
        return Err(ConstructError::InvalidArgument("n must be at least 1".into()));
    }
    let mut state = place_central_with(theta_deg, kind, digits, numerics)?;
    while state.rings() < n {
        state.ring_step()?;
    }
    Ok(state)
}

pub const DEFAULT_DIGITS_START: u32 = 16;
pub const DEFAULT_DIGITS_MAX: u32 = 4096;

/// Whether `d` is 16 times a power of two.
pub fn is_digit_step(d: u32) -> bool {
    d >= 16 && d.is_multiple_of(16) && (d / 16).is_power_of_two()
}

/// Retries [`construct`] with doubled precision after numerical failures.
/// Returns the state and the first precision that succeeded.
pub fn construct_auto(
    n: u32,
    theta_deg: &BigRational,
    kind: TriangulationKind,
    digits_start: u32,
    digits_max: u32,
) -> Result<(FoldState, u32), ConstructError> {
    if !is_digit_step(digits_start) || !is_digit_step(digits_max) || digits_start > digits_max {
        return Err(ConstructError::InvalidArgument(format!(
            "digit bounds {digits_start}..{digits_max} must be 16·2^k and ascending"
        )));
    }
    let mut digits = digits_start;
    loop {
        match construct(n, theta_deg, kind, digits) {
            Ok(s) => return Ok((s, digits)),
            Err(e) if !e.is_numerical() => return Err(e),
            Err(e) if digits >= digits_max => {
                return Err(ConstructError::PrecisionExhausted { digits, last: Box::new(e) })
            }
            Err(_) => digits *= 2,
        }
    }
}

/// Corner of the same ring under the half-turn `(x, y) → (-x, -y)` of the pattern.
pub fn half_turn(v: CornerId) -> CornerId {
    let c = match v.corner {
        Corner::LL => Corner::UR,
        Corner::UR => Corner::LL,
        Corner::LR => Corner::UL,
        Corner::UL => Corner::LR,
    };
    CornerId::new(v.ring, c)
}

/// Vertex pairs whose realized squared distance is not consistent with the
/// half-turn symmetry of the pattern (diagnostic only).
pub fn symmetry_defects(state: &FoldState) -> Vec<(CornerId, CornerId)> {
    let verts: Vec<CornerId> = state.pattern.vertices().collect();
    let mut out = Vec::new();
    for (i, &a) in verts.iter().enumerate() {
        for &b in &verts[i + 1..] {
            let d = state.pos(a).dist_sq(state.pos(b));
            let e = state.pos(half_turn(a)).dist_sq(state.pos(half_turn(b)));
            if !d.overlaps(&e) {
                out.push((a, b));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ivalnum::BigNum;

    fn deg(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn angle_parsing() {
        assert_eq!(parse_angle("30").unwrap(), deg(30));
        assert_eq!(parse_angle("179.5").unwrap(), BigRational::new(359.into(), 2.into()));
        assert_eq!(parse_angle("1/3").unwrap(), BigRational::new(1.into(), 3.into()));
        assert!(parse_angle("abc").is_err());
        assert!(parse_angle("1/0").is_err());
    }

    #[test]
    fn central_square() {
        let s = place_central(&deg(30), TriangulationKind::Asymmetric, 40).unwrap();
        let angles = s.fold_angles().unwrap();
        let central = angles[0].as_ref().unwrap();
        assert!(central.contains(&BigNum::from_i64(30)));
        assert_eq!(s.signs[0], Some(1));
        assert!(s.isometry_violations().is_empty());
    }

    #[test]
    fn quarter_turn_oracle() {
        // rotating (-1, 1, 0) about the axis (1, 1, 0)/√2 by -90° gives (0, 0, -√2)
        let s = place_central(&deg(90), TriangulationKind::Asymmetric, 50).unwrap();
        let ul = s.pos(CornerId::new(1, Corner::UL));
        let r2: BigNum = "1.4142135623730950488016887242096980785696718753769".parse().unwrap();
        assert!(ul.x.contains(&BigNum::zero()));
        assert!(ul.y.contains(&BigNum::zero()));
        assert!(ul.z.width() < "1e-45".parse().unwrap());
        assert!((&ul.z + &Interval::point(r2, 50)).width() < "1e-45".parse().unwrap());
    }

    #[test]
    fn invalid_arguments() {
        let k = TriangulationKind::Asymmetric;
        assert!(matches!(construct(0, &deg(30), k, 32), Err(ConstructError::InvalidArgument(_))));
        assert!(matches!(construct(2, &deg(0), k, 32), Err(ConstructError::InvalidArgument(_))));
        assert!(matches!(construct(2, &deg(180), k, 32), Err(ConstructError::InvalidArgument(_))));
        assert!(matches!(construct_auto(2, &deg(30), k, 24, 64), Err(ConstructError::InvalidArgument(_))));
    }

    #[test]
    fn n1_trivially_succeeds() {
        for t in [1, 45, 90, 179] {
            assert_eq!(construct(1, &deg(t), TriangulationKind::Asymmetric, 16).unwrap().rings(), 1);
        }
    }

    #[test]
    fn ring_two_isometry() {
        let s = construct(2, &deg(30), TriangulationKind::AlternatingAsymmetric, 64).unwrap();
        assert!(s.isometry_violations().is_empty());
        assert!(s.diagnostics.mv_violations.is_empty());
    }

    #[test]
    fn low_precision_fails_numerically() {
        let e = construct(4, &deg(1), TriangulationKind::Asymmetric, 16).unwrap_err();
        assert!(e.is_numerical(), "{e}");
        assert!(construct(3, &deg(1), TriangulationKind::Asymmetric, 16).is_ok());
    }

    #[test]
    fn auto_escalation() {
        let (_, d) = construct_auto(3, &deg(1), TriangulationKind::Asymmetric, 16, 4096).unwrap();
        assert_eq!(d, 16);
        let (s, d) = construct_auto(12, &deg(1), TriangulationKind::Asymmetric, 16, 4096).unwrap();
        assert!(d <= 64, "needed {d} digits");
        assert_eq!(s.rings(), 12);
    }

    #[test]
    fn higher_precision_overlaps() {
        let lo = construct(5, &deg(20), TriangulationKind::AlternatingAsymmetric, 64).unwrap();
        let hi = construct(5, &deg(20), TriangulationKind::AlternatingAsymmetric, 128).unwrap();
        for (a, b) in lo.positions.iter().zip(&hi.positions) {
            assert!(a.overlaps(b));
        }
        let again = construct(5, &deg(20), TriangulationKind::AlternatingAsymmetric, 64).unwrap();
        assert_eq!(lo.positions, again.positions);
    }

    #[test]
    fn half_turn_symmetry() {
        for kind in [TriangulationKind::Asymmetric, TriangulationKind::AlternatingAsymmetric] {
            let s = construct(4, &deg(40), kind, 80).unwrap();
            assert!(symmetry_defects(&s).is_empty());
        }
    }

    #[test]
    fn truncation_is_a_prefix() {
        let s = construct(5, &deg(30), TriangulationKind::AlternatingAsymmetric, 64).unwrap();
        let t = s.truncated(3);
        let u = construct(3, &deg(30), TriangulationKind::AlternatingAsymmetric, 64).unwrap();
        assert_eq!(t.positions, u.positions);
        assert_eq!(t.signs, u.signs);
    }

    #[test]
    fn alternating_assignment_is_realized() {
        let s = construct(8, &deg(30), TriangulationKind::AlternatingAsymmetric, 128).unwrap();
        assert!(s.diagnostics.mv_violations.is_empty());
        assert!(s.isometry_violations().is_empty());
        assert!(s.signs.iter().enumerate().all(|(i, x)| x.is_some() == s.pattern.is_interior_crease(i)));
    }
}
