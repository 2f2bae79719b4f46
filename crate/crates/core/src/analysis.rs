//! Post-construction studies: diagonal cross-sections with per-parity
//! parabolic fits, the n·θ product over a frontier table, and the number of
//! rings reachable at a fixed precision.
//!
//! Cross-section coordinates: the origin is the midpoint of the central
//! diagonal and the vertical axis is the normalized sum of the two central
//! face normals. For a folded corner `P`, `z = (P − O)·N` and
//! `u = √(|P − O|² − z²)`.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::foldctor::{place_central_with, FoldState, Numerics};
use crate::geom3::IPoint3;
use crate::ivalnum::{BigNum, Interval, SignVerdict};
use crate::pattern::{Corner, CornerId, TriangulationKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(k: u32) -> Parity {
        if k.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// One cross-section vertex; `k = 0` is the central diagonal midpoint.
#[derive(Clone, Debug)]
pub struct SectionPoint {
    pub k: u32,
    pub u: Interval,
    pub z: Interval,
}

impl SectionPoint {
    pub fn parity(&self) -> Parity {
        Parity::of(self.k)
    }
}

#[derive(Clone, Debug)]
pub struct CrossSection {
    pub points: Vec<SectionPoint>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("parity class {class} needs 3 points beyond the centre, found {have}")]
    InsufficientPoints { class: &'static str, have: usize },
    #[error("central frame is degenerate at this precision")]
    DegenerateFrame,
}

fn frame(state: &FoldState) -> Result<(IPoint3, IPoint3), AnalysisError> {
    let id = |c| state.pos(CornerId::new(1, c));
    let (ll, lr, ur, ul) = (id(Corner::LL), id(Corner::LR), id(Corner::UR), id(Corner::UL));
    let origin = ll.add(ur).scale(&Interval::from_rational(&BigRational::new(1.into(), 2.into()), state.digits));
    let n1 = lr.sub(ll).cross(&ur.sub(ll));
    let n2 = ur.sub(ll).cross(&ul.sub(ll));
    let s = n1.add(&n2);
    let len = s.norm_sq().sqrt().map_err(|_| AnalysisError::DegenerateFrame)?;
    if len.sign() != SignVerdict::CertainlyPositive {
        return Err(AnalysisError::DegenerateFrame);
    }
    let inv = Interval::from_i64(1, state.digits).div(&len).map_err(|_| AnalysisError::DegenerateFrame)?;
    Ok((origin, s.scale(&inv)))
}

/// Section through the folded `UR(k)` corners, `k = 1..n`, plus the centre.
pub fn cross_section(state: &FoldState) -> Result<CrossSection, AnalysisError> {
    let (origin, normal) = frame(state)?;
    let zero = Interval::zero(state.digits);
    let mut points = vec![SectionPoint { k: 0, u: zero.clone(), z: zero.clone() }];
    for k in 1..=state.rings() {
        let d = state.pos(CornerId::new(k, Corner::UR)).sub(&origin);
        let z = d.dot(&normal);
        let r2 = d.norm_sq().sub(&z.square());
        // the radicand is positive for every corner off the axis; clamp its
        // rounding-induced negative part
        let r2 = if r2.lo().is_negative() {
            Interval::new(BigNum::zero(), BigNum::max(r2.hi(), &BigNum::zero()).clone(), state.digits)
                .map_err(|_| AnalysisError::DegenerateFrame)?
        } else {
            r2
        };
        let u = r2.sqrt().map_err(|_| AnalysisError::DegenerateFrame)?;
        points.push(SectionPoint { k, u, z });
    }
    Ok(CrossSection { points })
}

impl CrossSection {
    /// Whether `u` is certainly strictly increasing in `k` within each
    /// parity class. Across classes it is not: the odd and even corners
    /// trade places once the surface steepens.
    pub fn u_increasing_per_class(&self) -> bool {
        let first = self.points.get(1).is_none_or(|p| self.points[0].u.hi() < p.u.lo());
        first && self.points.windows(3).all(|w| w[0].u.hi() < w[2].u.lo())
    }

    /// Midpoint coordinates `(k, u, z)`.
    pub fn midpoints(&self) -> Vec<(u32, f64, f64)> {
        self.points.iter().map(|p| (p.k, p.u.mid_f64(), p.z.mid_f64())).collect()
    }
}

/// `z = a u² + b u + c` through three points of one parity class.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParabolaFit {
    pub parity: Parity,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub through: [u32; 3],
}

impl ParabolaFit {
    pub fn eval(&self, u: f64) -> f64 {
        (self.a * u + self.b) * u + self.c
    }

    fn through_points(parity: Parity, pts: [(u32, f64, f64); 3]) -> ParabolaFit {
        let [(k0, x0, y0), (k1, x1, y1), (k2, x2, y2)] = pts;
        // Newton divided differences
        let d01 = (y1 - y0) / (x1 - x0);
        let d12 = (y2 - y1) / (x2 - x1);
        let a = (d12 - d01) / (x2 - x0);
        let b = d01 - a * (x0 + x1);
        let c = y0 - (a * x0 + b) * x0;
        ParabolaFit { parity, a, b, c, through: [k0, k1, k2] }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeviationRow {
    pub k: u32,
    pub u: f64,
    pub z: f64,
    pub parity: Parity,
    pub fit: f64,
    /// fit − actual.
    pub abs_dev: f64,
    /// fit / actual; `None` where the actual height is zero.
    pub rel_dev: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitReport {
    pub fits: Vec<ParabolaFit>,
    pub rows: Vec<DeviationRow>,
}

impl FitReport {
    pub fn max_abs_deviation(&self) -> f64 {
        self.rows.iter().map(|r| r.abs_dev.abs()).fold(0.0, f64::max)
    }

    /// Largest |fit − actual| over the fits' own defining points.
    pub fn max_defining_residual(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| self.fits.iter().any(|f| f.parity == r.parity && f.through.contains(&r.k)))
            .map(|r| r.abs_dev.abs())
            .fold(0.0, f64::max)
    }
}

/// Fits each parity class through its three outermost corners and reports
/// deviations of every section point from its class fit.
pub fn fit_and_deviate(cs: &CrossSection) -> Result<FitReport, AnalysisError> {
    let mids = cs.midpoints();
    let mut fits = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let class: Vec<_> = mids.iter().copied().filter(|p| p.0 > 0 && Parity::of(p.0) == parity).collect();
        if class.len() < 3 {
            return Err(AnalysisError::InsufficientPoints { class: parity.name(), have: class.len() });
        }
        let last = &class[class.len() - 3..];
        fits.push(ParabolaFit::through_points(parity, [last[0], last[1], last[2]]));
    }
    let rows = mids
        .iter()
        .map(|&(k, u, z)| {
            let parity = Parity::of(k);
            let fit = fits.iter().find(|f| f.parity == parity).expect("both classes fitted").eval(u);
            DeviationRow { k, u, z, parity, fit, abs_dev: fit - z, rel_dev: (z != 0.0).then(|| fit / z) }
        })
        .collect();
    Ok(FitReport { fits, rows })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NThetaRow {
    pub theta_deg: f64,
    pub n: u32,
    pub product_deg: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NThetaReport {
    pub rows: Vec<NThetaRow>,
    /// Summary over rows with θ ≤ 40°.
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

pub const NTHETA_SMALL_ANGLE_DEG: i64 = 40;

/// Products `n_max · θ` for a frontier table.
pub fn ntheta_study(limits: &[(BigRational, u32)]) -> NThetaReport {
    let small = BigRational::from_integer(NTHETA_SMALL_ANGLE_DEG.into());
    let rows: Vec<NThetaRow> = limits
        .iter()
        .map(|(t, n)| NThetaRow {
            theta_deg: t.to_f64().unwrap_or(f64::NAN),
            n: *n,
            product_deg: (t * BigRational::from_integer((*n).into())).to_f64().unwrap_or(f64::NAN),
        })
        .collect();
    let sel: Vec<f64> = limits.iter().zip(&rows).filter(|((t, _), _)| *t <= small).map(|(_, r)| r.product_deg).collect();
    let (min, max, mean) = if sel.is_empty() {
        (f64::NAN, f64::NAN, f64::NAN)
    } else {
        (
            sel.iter().copied().fold(f64::INFINITY, f64::min),
            sel.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            sel.iter().sum::<f64>() / sel.len() as f64,
        )
    };
    NThetaReport { rows, min, max, mean }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrecisionPoint {
    pub digits: u32,
    pub n: u32,
    /// `n` reached the cap, so it is only a lower bound.
    pub capped: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrecisionCurve {
    pub points: Vec<PrecisionPoint>,
    /// Least-squares slope of `ln n` against `ln digits` over uncapped points.
    pub loglog_slope: Option<f64>,
}

/// Rings constructible at a fixed precision, up to `n_cap`.
pub fn max_constructible(theta_deg: &BigRational, kind: TriangulationKind, digits: u32, n_cap: u32, numerics: Numerics) -> u32 {
    let Ok(mut state) = place_central_with(theta_deg, kind, digits, numerics) else {
        return 0;
    };
    while state.rings() < n_cap && state.ring_step().is_ok() {}
    state.rings()
}

pub fn precision_curve(theta_deg: &BigRational, kind: TriangulationKind, digit_grid: &[u32], n_cap: u32) -> PrecisionCurve {
    precision_curve_with(theta_deg, kind, digit_grid, n_cap, Numerics::default())
}

pub fn precision_curve_with(
    theta_deg: &BigRational,
    kind: TriangulationKind,
    digit_grid: &[u32],
    n_cap: u32,
    numerics: Numerics,
) -> PrecisionCurve {
    let measured = digit_grid.iter().map(|&d| (d, max_constructible(theta_deg, kind, d, n_cap, numerics))).collect();
    curve_from_points(measured, n_cap)
}

/// Assembles a curve from `(digits, n)` measurements taken with cap `n_cap`.
pub fn curve_from_points(measured: Vec<(u32, u32)>, n_cap: u32) -> PrecisionCurve {
    let points: Vec<PrecisionPoint> =
        measured.into_iter().map(|(digits, n)| PrecisionPoint { digits, n, capped: n >= n_cap }).collect();
    let xy: Vec<(f64, f64)> =
        points.iter().filter(|p| !p.capped && p.n > 0).map(|p| ((p.digits as f64).ln(), (p.n as f64).ln())).collect();
    PrecisionCurve { loglog_slope: slope(&xy), points }
}

fn slope(xy: &[(f64, f64)]) -> Option<f64> {
    if xy.len() < 2 {
        return None;
    }
    let m = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / m;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
