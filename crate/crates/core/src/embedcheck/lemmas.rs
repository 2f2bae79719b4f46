//! Numerical checks of two finite rigidity lemmas.
//!
//! Four right triangles around a vertex: after folding the second crease by
//! φ, keeping every pair of consecutive crease directions at 90° forces the
//! fourth direction onto the line of the second, so the third crease stays
//! flat. Degree-4 vertices of a rigid folding: exactly one crease sign
//! differs from the others, and that crease is not flanked by two sectors
//! summing to 180° or more.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::foldctor::FoldState;
use crate::geom3::IPoint3;
use crate::ivalnum::{sincos_deg, Interval, SignVerdict};
use crate::pattern::CornerId;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FourTriangleOutcome {
    /// `v2 × v4` is certainly the zero vector.
    Parallel,
    /// φ = 0: nothing is folded and the fourth direction is not determined.
    Flat,
    /// The cross product could not be certified zero.
    Uncertified,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FourTriangleReport {
    pub digits: u32,
    pub cases: Vec<(String, FourTriangleOutcome)>,
}

impl FourTriangleReport {
    pub fn all_certified(&self) -> bool {
        self.cases.iter().all(|(_, o)| *o != FourTriangleOutcome::Uncertified)
    }
}

/// Direction vectors `v1..v4` for a fold of the second crease by φ degrees.
pub fn four_triangle_directions(phi: &BigRational, digits: u32) -> Option<[IPoint3; 4]> {
    let (s, c) = sincos_deg(phi, digits);
    let v1 = IPoint3::from_i64(1, 0, 0, digits);
    let v2 = IPoint3::from_i64(0, 1, 0, digits);
    let v3 = IPoint3::new(c.neg(), Interval::zero(digits), s);
    let w = v1.cross(&v3);
    let len = w.norm_sq().sqrt().ok()?;
    if len.sign() != SignVerdict::CertainlyPositive {
        return None;
    }
    let inv = Interval::from_i64(1, digits).div(&len).ok()?;
    Some([v1, v2, v3, w.scale(&inv)])
}

/// Certifies `v2 ∥ v4` for every angle of the grid (degrees in `[0, 180)`).
pub fn four_triangle_obstruction(grid: &[BigRational], digits: u32) -> FourTriangleReport {
    let cases = grid
        .iter()
        .map(|phi| {
            let outcome = if phi == &BigRational::from_integer(0.into()) {
                FourTriangleOutcome::Flat
            } else {
                match four_triangle_directions(phi, digits) {
                    None => FourTriangleOutcome::Uncertified,
                    Some([_, v2, _, v4]) => {
                        let x = v2.cross(&v4);
                        if x.coords().iter().all(|c| c.sign() == SignVerdict::CertainlyZero) {
                            FourTriangleOutcome::Parallel
                        } else {
                            FourTriangleOutcome::Uncertified
                        }
                    }
                }
            };
            (phi.to_string(), outcome)
        })
        .collect();
    FourTriangleReport { digits, cases }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexAudit {
    Pass,
    /// Not all incident signs are certain (e.g. an unfolded state).
    Skipped,
    /// Mountains and valleys are not split three to one.
    WrongSplit { mountains: usize, valleys: usize },
    /// The odd crease sits between sectors summing to at least 180°.
    OddCreaseOnWideSide { crease: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Degree4Report {
    pub vertices: Vec<(String, VertexAudit)>,
}

impl Degree4Report {
    pub fn passed(&self) -> bool {
        self.vertices.iter().all(|(_, a)| matches!(a, VertexAudit::Pass | VertexAudit::Skipped))
    }

    pub fn failures(&self) -> Vec<&(String, VertexAudit)> {
        self.vertices.iter().filter(|(_, a)| !matches!(a, VertexAudit::Pass | VertexAudit::Skipped)).collect()
    }

    pub fn checked(&self) -> usize {
        self.vertices.iter().filter(|(_, a)| *a != VertexAudit::Skipped).count()
    }
}

fn planar_dir(v: CornerId, w: CornerId) -> (i64, i64) {
    let (vx, vy) = v.planar_coords();
    let (wx, wy) = w.planar_coords();
    (wx - vx, wy - vy)
}

fn half_plane(d: (i64, i64)) -> u8 {
    if d.1 > 0 || (d.1 == 0 && d.0 > 0) {
        0
    } else {
        1
    }
}

/// Audits every interior degree-4 vertex against the sign rule above, using
/// the certified crease signs of the state and exact planar sector geometry.
pub fn degree4_sign_audit(state: &FoldState) -> Degree4Report {
    degree4_sign_audit_with(state, &state.signs)
}

/// As [`degree4_sign_audit`], with an explicit sign table (indexed like the creases).
pub fn degree4_sign_audit_with(state: &FoldState, signs: &[Option<i32>]) -> Degree4Report {
    let p = &state.pattern;
    let mut vertices = Vec::new();
    for v in p.vertices().filter(|v| p.is_interior_vertex(*v)) {
        let incident = p.incident(v);
        if incident.len() != 4 {
            continue;
        }
        // creases sorted counter-clockwise by exact planar direction
        let mut around: Vec<(usize, (i64, i64))> = incident
            .iter()
            .map(|&i| {
                let (a, b) = p.creases[i].endpoints;
                (i, planar_dir(v, if a == v { b } else { a }))
            })
            .collect();
        around.sort_by(|x, y| {
            let (hx, hy) = (half_plane(x.1), half_plane(y.1));
            hx.cmp(&hy).then_with(|| 0.cmp(&(x.1 .0 * y.1 .1 - x.1 .1 * y.1 .0)))
        });
        let s: Vec<Option<i32>> = around.iter().map(|(i, _)| signs[*i]).collect();
        let audit = if s.iter().any(|x| x.is_none()) {
            VertexAudit::Skipped
        } else {
            let s: Vec<i32> = s.into_iter().map(Option::unwrap).collect();
            let mountains = s.iter().filter(|&&x| x > 0).count();
            let valleys = 4 - mountains;
            if mountains != 1 && mountains != 3 {
                VertexAudit::WrongSplit { mountains, valleys }
            } else {
                let odd_sign = if mountains == 1 { 1 } else { -1 };
                let k = s.iter().position(|&x| x == odd_sign).unwrap();
                let prev = around[(k + 3) % 4].1;
                let next = around[(k + 1) % 4].1;
                // the two sectors at crease k sum to less than 180° iff prev → next turns left
                if prev.0 * next.1 - prev.1 * next.0 > 0 {
                    VertexAudit::Pass
                } else {
                    let (a, b) = p.creases[around[k].0].endpoints;
                    VertexAudit::OddCreaseOnWideSide { crease: format!("{a}-{b}") }
                }
            }
        };
        vertices.push((v.to_string(), audit));
    }
    Degree4Report { vertices }
}
