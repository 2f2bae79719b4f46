//! Certified 3D geometry over intervals.
//!
//! Mountain/valley orientation convention used throughout the crate: for a
//! hinge `h1 → h2` whose right wing (in the flat pattern, seen from the top
//! side) is `wa` and left wing is `wb`, the fold is a mountain exactly when
//! `det[h2 - h1, wa - h1, wb - h1] > 0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ivalnum::{trig, Interval, IvalError, SignVerdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    /// The three sphere centres are collinear, or not certifiably otherwise.
    #[error("sphere centres are not certainly non-collinear")]
    CollinearCenters,
    /// The final radicand is certainly negative: the spheres have no common point.
    #[error("spheres certainly do not intersect")]
    CertainlyInfeasible,
    /// The final radicand straddles zero at this precision.
    #[error("radicand straddles zero; more digits are needed")]
    IndeterminateRadicand,
    #[error("hinge or wing configuration is degenerate at this precision")]
    DegenerateHinge,
    #[error(transparent)]
    Interval(#[from] IvalError),
}

/// A 3-vector of intervals: an enclosure of an exact point (or vector).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IPoint3 {
    pub x: Interval,
    pub y: Interval,
    pub z: Interval,
}

pub type IVec3 = IPoint3;

impl IPoint3 {
    pub fn new(x: Interval, y: Interval, z: Interval) -> Self {
        IPoint3 { x, y, z }
    }

    pub fn from_i64(x: i64, y: i64, z: i64, prec: u32) -> Self {
        IPoint3::new(Interval::from_i64(x, prec), Interval::from_i64(y, prec), Interval::from_i64(z, prec))
    }

    pub fn coords(&self) -> [&Interval; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn add(&self, o: &IPoint3) -> IPoint3 {
        IPoint3::new(&self.x + &o.x, &self.y + &o.y, &self.z + &o.z)
    }

    pub fn sub(&self, o: &IPoint3) -> IPoint3 {
        IPoint3::new(&self.x - &o.x, &self.y - &o.y, &self.z - &o.z)
    }

    pub fn scale(&self, s: &Interval) -> IPoint3 {
        IPoint3::new(&self.x * s, &self.y * s, &self.z * s)
    }

    pub fn neg(&self) -> IPoint3 {
        IPoint3::new(-&self.x, -&self.y, -&self.z)
    }

    pub fn dot(&self, o: &IPoint3) -> Interval {
        &(&self.x * &o.x) + &(&self.y * &o.y) + &self.z * &o.z
    }

    pub fn cross(&self, o: &IPoint3) -> IPoint3 {
        IPoint3::new(
            &self.y * &o.z - &self.z * &o.y,
            &self.z * &o.x - &self.x * &o.z,
            &self.x * &o.y - &self.y * &o.x,
        )
    }

    pub fn norm_sq(&self) -> Interval {
        self.x.square() + self.y.square() + self.z.square()
    }

    pub fn dist_sq(&self, o: &IPoint3) -> Interval {
        self.sub(o).norm_sq()
    }

    pub fn with_prec(&self, prec: u32) -> IPoint3 {
        IPoint3::new(self.x.with_prec(prec), self.y.with_prec(prec), self.z.with_prec(prec))
    }

    pub fn mid_f64(&self) -> [f64; 3] {
        [self.x.mid_f64(), self.y.mid_f64(), self.z.mid_f64()]
    }

    /// Componentwise directed `f64` bounds `(lower, upper)`.
    pub fn f64_box(&self) -> ([f64; 3], [f64; 3]) {
        let (xl, xh) = self.x.to_f64_bounds();
        let (yl, yh) = self.y.to_f64_bounds();
        let (zl, zh) = self.z.to_f64_bounds();
        ([xl, yl, zl], [xh, yh, zh])
    }

    pub fn hull(&self, o: &IPoint3) -> IPoint3 {
        IPoint3::new(self.x.hull(&o.x), self.y.hull(&o.y), self.z.hull(&o.z))
    }

    pub fn overlaps(&self, o: &IPoint3) -> bool {
        self.x.overlaps(&o.x) && self.y.overlaps(&o.y) && self.z.overlaps(&o.z)
    }

    /// Largest coordinate width.
    pub fn max_width(&self) -> crate::ivalnum::BigNum {
        let w = [self.x.width(), self.y.width(), self.z.width()];
        w.into_iter().max().unwrap()
    }
}

/// The two intersection points of three spheres, mirrored through the plane
/// of the centres; `plus` lies on the side of `(c2 - c1) × (c3 - c1)`.
#[derive(Clone, Debug)]
pub struct SpherePair {
    pub plus: IPoint3,
    pub minus: IPoint3,
}

/// Closed-form arrangement used to intersect three spheres.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Trilateration {
    /// Orthonormal frame `ex, ey, ez` built from the centre differences,
    /// with in-frame coordinates `x, y` and `z = ±√(r1² - x² - y²)`.
    #[default]
    Frame,
    /// Unnormalised frame `u, v, u × v` solved through its Gram system,
    /// taking a single square root.
    Gram,
}

/// Intersects three spheres given by centres and squared radii, using the
/// default [`Trilateration`] arrangement.
pub fn trisphere(
    c1: &IPoint3,
    r1sq: &Interval,
    c2: &IPoint3,
    r2sq: &Interval,
    c3: &IPoint3,
    r3sq: &Interval,
) -> Result<SpherePair, GeomError> {
    trisphere_with(Trilateration::default(), c1, r1sq, c2, r2sq, c3, r3sq)
}

pub fn trisphere_with(
    method: Trilateration,
    c1: &IPoint3,
    r1sq: &Interval,
    c2: &IPoint3,
    r2sq: &Interval,
    c3: &IPoint3,
    r3sq: &Interval,
) -> Result<SpherePair, GeomError> {
    let u = c2.sub(c1);
    let v = c3.sub(c1);
    let w = u.cross(&v);
    let gram = w.norm_sq();
    if gram.sign() != SignVerdict::CertainlyPositive {
        return Err(GeomError::CollinearCenters);
    }
    match method {
        Trilateration::Frame => frame_solve(c1, r1sq, r2sq, r3sq, &u, &v),
        Trilateration::Gram => gram_solve(c1, r1sq, r2sq, r3sq, &u, &v, &w, &gram),
    }
}

fn radicand_check(radicand: &Interval) -> Result<(), GeomError> {
    match radicand.sign() {
        SignVerdict::CertainlyNegative => Err(GeomError::CertainlyInfeasible),
        SignVerdict::CertainlyPositive => Ok(()),
        _ => Err(GeomError::IndeterminateRadicand),
    }
}

fn half(prec: u32) -> Interval {
    Interval::from_rational(&num_rational::BigRational::new(1.into(), 2.into()), prec)
}

fn frame_solve(
    c1: &IPoint3,
    r1sq: &Interval,
    r2sq: &Interval,
    r3sq: &Interval,
    u: &IVec3,
    v: &IVec3,
) -> Result<SpherePair, GeomError> {
    let d = u.norm_sq().sqrt()?;
    let ex = u.scale(&Interval::from_i64(1, d.prec()).div(&d)?);
    let i = ex.dot(v);
    let perp = v.sub(&ex.scale(&i));
    let perp_len = perp.norm_sq().sqrt()?;
    if perp_len.sign() != SignVerdict::CertainlyPositive {
        return Err(GeomError::CollinearCenters);
    }
    let ey = perp.scale(&Interval::from_i64(1, d.prec()).div(&perp_len)?);
    let ez = ex.cross(&ey);
    let j = ey.dot(v);
    let h = half(d.prec());
    let x = (r1sq - r2sq + &d.square()).div(&d)? * &h;
    let y = (r1sq - r3sq + &i.square() + &j.square()).div(&j)? * &h - &(&i * &x).div(&j)?;
    let radicand = r1sq - &x.square() - &y.square();
    radicand_check(&radicand)?;
    let z = radicand.sqrt()?;
    let base = c1.add(&ex.scale(&x)).add(&ey.scale(&y));
    let off = ez.scale(&z);
    Ok(SpherePair { plus: base.add(&off), minus: base.sub(&off) })
}

#[allow(clippy::too_many_arguments)]
fn gram_solve(
    c1: &IPoint3,
    r1sq: &Interval,
    r2sq: &Interval,
    r3sq: &Interval,
    u: &IVec3,
    v: &IVec3,
    w: &IVec3,
    gram: &Interval,
) -> Result<SpherePair, GeomError> {
    let uu = u.norm_sq();
    let vv = v.norm_sq();
    let uv = u.dot(v);
    let h = half(gram.prec());
    // p·u and p·v for p = point - c1
    let pu = (r1sq - r2sq + &uu) * &h;
    let pv = (r1sq - r3sq + &vv) * &h;
    let alpha = (&pu * &vv - &pv * &uv).div(gram)?;
    let beta = (&pv * &uu - &pu * &uv).div(gram)?;
    let radicand = r1sq - &(&alpha * &pu + &beta * &pv);
    radicand_check(&radicand)?;
    let gamma = radicand.div(gram)?.sqrt()?;
    let base = c1.add(&u.scale(&alpha)).add(&v.scale(&beta));
    let off = w.scale(&gamma);
    Ok(SpherePair { plus: base.add(&off), minus: base.sub(&off) })
}

/// Sign of `det[b - a, c - a, p - a]`.
pub fn side_of_plane(p: &IPoint3, a: &IPoint3, b: &IPoint3, c: &IPoint3) -> SignVerdict {
    orient(a, b, c, p).sign()
}

/// `det[b - a, c - a, d - a]` as an interval.
pub fn orient(a: &IPoint3, b: &IPoint3, c: &IPoint3, d: &IPoint3) -> Interval {
    b.sub(a).cross(&c.sub(a)).dot(&d.sub(a))
}

fn check_hinge(h1: &IPoint3, h2: &IPoint3, wa: &IPoint3, wb: &IPoint3) -> Result<IPoint3, GeomError> {
    let e = h2.sub(h1);
    if e.norm_sq().sign() != SignVerdict::CertainlyPositive {
        return Err(GeomError::DegenerateHinge);
    }
    for w in [wa, wb] {
        if e.cross(&w.sub(h1)).norm_sq().sign() != SignVerdict::CertainlyPositive {
            return Err(GeomError::DegenerateHinge);
        }
    }
    Ok(e)
}

/// Certified fold sign at hinge `h1 → h2` with right wing `wa`, left wing `wb`:
/// positive for a mountain, negative for a valley.
pub fn dihedral_sign(h1: &IPoint3, h2: &IPoint3, wa: &IPoint3, wb: &IPoint3) -> Result<SignVerdict, GeomError> {
    check_hinge(h1, h2, wa, wb)?;
    Ok(orient(h1, h2, wa, wb).sign())
}

/// Enclosure of the signed fold angle in degrees (mountain positive), i.e.
/// the angle between the two wing normals oriented by the paper's top side.
pub fn fold_angle(h1: &IPoint3, h2: &IPoint3, wa: &IPoint3, wb: &IPoint3) -> Result<Interval, GeomError> {
    let e = check_hinge(h1, h2, wa, wb)?;
    let n_left = e.cross(&wb.sub(h1));
    let n_right = wa.sub(h1).cross(&e);
    let cos_part = n_left.dot(&n_right);
    let sin_part = n_left.cross(&n_right).norm_sq().sqrt()?;
    let magnitude = trig::angle_deg(&sin_part, &cos_part);
    Ok(match orient(h1, h2, wa, wb).sign() {
        SignVerdict::CertainlyPositive => magnitude,
        SignVerdict::CertainlyNegative => magnitude.neg(),
        _ => magnitude.neg().hull(&magnitude),
    })
}
