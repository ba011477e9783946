//! Closed-form surfaces with exact jets.
//!
//! Spheres and ellipsoids use the chart
//! `(cos v cos u, -cos v sin u, sin v)` with `u` periodic and the poles
//! `v = +-pi/2` in the singular set; with this orientation of `u` the normal
//! `X_u x X_v` points inward.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Rotation3, Unit};

use crate::error::{GeomError, Result};
use crate::geometry::{Domain, Interval, ParametricSurface, SurfaceJet};
use crate::Vec3;

/// Rotation taking `+z` to `axis`.
pub fn rotation_to(axis: &Vec3) -> Result<Rotation3<f64>> {
    let norm = axis.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(GeomError::InvalidParameter(format!("axis must be a nonzero vector, got {axis:?}")));
    }
    let a = axis / norm;
    Ok(Rotation3::rotation_between(&Vec3::z(), &a)
        .unwrap_or_else(|| Rotation3::from_axis_angle(&Unit::new_unchecked(Vec3::x()), PI)))
}

fn unit(v: &Vec3, what: &str) -> Result<Vec3> {
    let n = v.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(GeomError::InvalidParameter(format!("{what} must be a nonzero vector")));
    }
    Ok(v / n)
}

/// Rigid placement `center + rotation * X(u, v)` of a jet.
fn place(jet: SurfaceJet, rotation: &Rotation3<f64>, center: &Vec3) -> SurfaceJet {
    SurfaceJet {
        p: center + rotation * jet.p,
        xu: rotation * jet.xu,
        xv: rotation * jet.xv,
        xuu: rotation * jet.xuu,
        xuv: rotation * jet.xuv,
        xvv: rotation * jet.xvv,
        ..jet
    }
}

fn from_jet<J>(label: String, domain: Domain, jet: J) -> ParametricSurface
where
    J: Fn(f64, f64) -> SurfaceJet + Send + Sync + Clone + 'static,
{
    let position = jet.clone();
    ParametricSurface::new(label, domain, move |u, v| position(u, v).p).with_exact_jet(jet)
}

/// Affine chart of the plane `<x, normal> = offset`. The chart normal equals
/// `normal`; the default domain is `[-1, 1]^2` around `offset * normal`.
pub fn make_plane(normal: &Vec3, offset: f64) -> Result<ParametricSurface> {
    let n = unit(normal, "plane normal")?;
    let rotation = rotation_to(&n)?;
    let (e1, e2) = (rotation * Vec3::x(), rotation * Vec3::y());
    let origin = n * offset;
    let domain = Domain::new(Interval::new(-1.0, 1.0), Interval::new(-1.0, 1.0));
    Ok(from_jet(format!("plane(offset={offset})"), domain, move |u, v| SurfaceJet {
        u,
        v,
        p: origin + e1 * u + e2 * v,
        xu: e1,
        xv: e2,
        xuu: Vec3::zeros(),
        xuv: Vec3::zeros(),
        xvv: Vec3::zeros(),
    }))
}

fn sphere_chart(u: f64, v: f64, axes: Vec3) -> SurfaceJet {
    let (su, cu) = u.sin_cos();
    let (sv, cv) = v.sin_cos();
    let s = |x: Vec3| x.component_mul(&axes);
    SurfaceJet {
        u,
        v,
        p: s(Vec3::new(cv * cu, -cv * su, sv)),
        xu: s(Vec3::new(-cv * su, -cv * cu, 0.0)),
        xv: s(Vec3::new(-sv * cu, sv * su, cv)),
        xuu: s(Vec3::new(-cv * cu, cv * su, 0.0)),
        xuv: s(Vec3::new(sv * su, sv * cu, 0.0)),
        xvv: s(Vec3::new(-cv * cu, cv * su, -sv)),
    }
}

fn sphere_domain() -> Domain {
    Domain::new(Interval::turn(), Interval::new(-FRAC_PI_2, FRAC_PI_2))
}

fn at_pole(v: f64) -> bool {
    v.cos().abs() < 1e-9
}

fn positive(x: f64, what: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(GeomError::InvalidParameter(format!("{what} must be positive, got {x}")))
    }
}

/// Sphere `|p| = r` with inward normal.
pub fn make_sphere_centered(r: f64) -> Result<ParametricSurface> {
    positive(r, "sphere radius")?;
    let axes = Vec3::repeat(r);
    Ok(from_jet(format!("sphere_centered(r={r})"), sphere_domain(), move |u, v| {
        sphere_chart(u, v, axes)
    })
    .with_singular_set(|_, v| at_pole(v)))
}

/// Sphere of radius `r` centred at `r * direction`, so it passes through the
/// origin. The origin sits at the pole `v = -pi/2`, which is masked.
pub fn make_sphere_through_origin(r: f64, direction: &Vec3) -> Result<ParametricSurface> {
    positive(r, "sphere radius")?;
    let d = unit(direction, "sphere direction")?;
    let rotation = rotation_to(&d)?;
    let center = d * r;
    let axes = Vec3::repeat(r);
    Ok(from_jet(format!("sphere_origin(r={r})"), sphere_domain(), move |u, v| {
        place(sphere_chart(u, v, axes), &rotation, &center)
    })
    .with_singular_set(|_, v| at_pole(v)))
}

/// Axis-aligned ellipsoid with the given semi-axes, translated to `center`.
/// Not stationary for any exponent; used as a control surface.
pub fn make_ellipsoid(semi_axes: &Vec3, center: &Vec3) -> Result<ParametricSurface> {
    for (i, a) in semi_axes.iter().enumerate() {
        positive(*a, &format!("semi-axis {i}"))?;
    }
    let axes = *semi_axes;
    let c = *center;
    Ok(from_jet("ellipsoid".to_string(), sphere_domain(), move |u, v| {
        let mut jet = sphere_chart(u, v, axes);
        jet.p += c;
        jet
    })
    .with_singular_set(|_, v| at_pole(v)))
}

/// Catenoid `(c cosh(v/c) cos u, c cosh(v/c) sin u, v)` rotated so its axis is
/// `axis` and translated so the neck centre is `center`. Default domain
/// `u` periodic, `v in [-2c, 2c]`.
pub fn make_catenoid(neck_radius: f64, center: &Vec3, axis: &Vec3) -> Result<ParametricSurface> {
    positive(neck_radius, "neck radius")?;
    let rotation = rotation_to(axis)?;
    let center = *center;
    let c = neck_radius;
    let domain = Domain::new(Interval::turn(), Interval::new(-2.0 * c, 2.0 * c));
    Ok(from_jet(format!("catenoid(c={c})"), domain, move |u, v| {
        let (su, cu) = u.sin_cos();
        let (ch, sh) = ((v / c).cosh(), (v / c).sinh());
        let jet = SurfaceJet {
            u,
            v,
            p: Vec3::new(c * ch * cu, c * ch * su, v),
            xu: Vec3::new(-c * ch * su, c * ch * cu, 0.0),
            xv: Vec3::new(sh * cu, sh * su, 1.0),
            xuu: Vec3::new(-c * ch * cu, -c * ch * su, 0.0),
            xuv: Vec3::new(-sh * su, sh * cu, 0.0),
            xvv: Vec3::new(ch * cu / c, ch * su / c, 0.0),
        };
        place(jet, &rotation, &center)
    }))
}

/// Helicoid `(v cos u, v sin u, pitch u)` on `[-pi, pi] x [-1, 1]`.
pub fn make_helicoid(pitch: f64) -> Result<ParametricSurface> {
    if pitch == 0.0 || !pitch.is_finite() {
        return Err(GeomError::InvalidParameter(format!("helicoid pitch must be nonzero, got {pitch}")));
    }
    let domain = Domain::new(Interval::new(-PI, PI), Interval::new(-1.0, 1.0));
    Ok(from_jet(format!("helicoid(pitch={pitch})"), domain, move |u, v| {
        let (su, cu) = u.sin_cos();
        SurfaceJet {
            u,
            v,
            p: Vec3::new(v * cu, v * su, pitch * u),
            xu: Vec3::new(-v * su, v * cu, pitch),
            xv: Vec3::new(cu, su, 0.0),
            xuu: Vec3::new(-v * cu, -v * su, 0.0),
            xuv: Vec3::new(-su, cu, 0.0),
            xvv: Vec3::zeros(),
        }
    }))
}
