//! Inversion `Phi(p) = p / |p|^2` in the unit sphere and its action on
//! alpha-stationary surfaces.
//!
//! Under `Phi` the normal, principal curvatures and support function of a
//! surface transform as
//!
//! ```text
//! nu~      = nu - 2 h p / |p|^2
//! kappa~_i = |p|^2 kappa_i + 2 h
//! H~       = |p|^2 H + 4 h
//! h~       = <nu~, Phi(p)> = -h / |p|^2
//! ```
//!
//! Plugging these into the residual with the dual exponent
//! `alpha~ = -(alpha + 4)` gives
//!
//! ```text
//! R~ = |p|^2 H + 4 h + (alpha + 4) h~ / |p~|^2
//!    = |p|^2 H + 4 h - (alpha + 4) h
//!    = |p|^2 R_alpha
//! ```
//!
//! so alpha-stationary surfaces go to `-(alpha+4)`-stationary ones, and for
//! any surface the residuals are related by the factor `|p|^2`.
//! [`verify_duality`] measures this law on a grid.
//!
//! `Phi` reverses orientation: the normal of the parametrised image
//! `Phi o X` is `-nu~`. Only `|R|` is compared, so either choice works.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::geometry::{
    evaluate_jet, pointwise_geometry, stationarity_residual_clipped, ParametricSurface, PointGeometry,
    SurfaceJet, DEFAULT_EPS_ORIGIN, DEFAULT_RELATIVE_STEP,
};
use crate::Vec3;

pub fn invert_point(p: &Vec3) -> Result<Vec3> {
    invert_point_clipped(p, DEFAULT_EPS_ORIGIN)
}

pub fn invert_point_clipped(p: &Vec3, eps_origin: f64) -> Result<Vec3> {
    let r2 = p.norm_squared();
    if r2.sqrt() <= eps_origin {
        return Err(GeomError::OriginContact { distance: r2.sqrt() });
    }
    Ok(p / r2)
}

/// The exponent paired with `alpha` by the inversion.
pub fn dual_alpha(alpha: f64) -> f64 {
    -4.0 - alpha
}

/// Chain rule for `Phi` applied to a jet.
///
/// With `s = 1/|p|^2` and `q = s p`:
/// `s_a = -2 s^2 <p, p_a>`,
/// `s_ab = -2 s^2 (<p_a, p_b> + <p, p_ab>) + 8 s^3 <p, p_a><p, p_b>`,
/// `q_ab = s p_ab + s_a p_b + s_b p_a + s_ab p`.
pub fn invert_jet(jet: &SurfaceJet) -> Result<SurfaceJet> {
    let p = jet.p;
    let r2 = p.norm_squared();
    if r2.sqrt() <= DEFAULT_EPS_ORIGIN {
        return Err(GeomError::OriginContact { distance: r2.sqrt() });
    }
    let s = 1.0 / r2;
    let pu = p.dot(&jet.xu);
    let pv = p.dot(&jet.xv);
    let su = -2.0 * s * s * pu;
    let sv = -2.0 * s * s * pv;
    let second = |pa_pb: f64, p_pab: f64, pa: f64, pb: f64| -2.0 * s * s * (pa_pb + p_pab) + 8.0 * s * s * s * pa * pb;
    let suu = second(jet.xu.dot(&jet.xu), p.dot(&jet.xuu), pu, pu);
    let suv = second(jet.xu.dot(&jet.xv), p.dot(&jet.xuv), pu, pv);
    let svv = second(jet.xv.dot(&jet.xv), p.dot(&jet.xvv), pv, pv);
    Ok(SurfaceJet {
        u: jet.u,
        v: jet.v,
        p: p * s,
        xu: jet.xu * s + p * su,
        xv: jet.xv * s + p * sv,
        xuu: jet.xuu * s + jet.xu * (2.0 * su) + p * suu,
        xuv: jet.xuv * s + jet.xu * sv + jet.xv * su + p * suv,
        xvv: jet.xvv * s + jet.xv * (2.0 * sv) + p * svv,
    })
}

/// `Phi` composed with `source`, on the same domain.
///
/// The image inherits the source's singular set plus every parameter point
/// whose source position lies within `eps_origin` of the origin. When the
/// source carries exact jets the image jets come from [`invert_jet`];
/// otherwise they are finite differences of the composition.
pub fn invert_surface(source: &ParametricSurface) -> ParametricSurface {
    invert_surface_clipped(source, DEFAULT_EPS_ORIGIN)
}

pub fn invert_surface_clipped(source: &ParametricSurface, eps_origin: f64) -> ParametricSurface {
    let position = source.position_fn();
    let singular = source.singular_fn();
    let label = format!("inverted {}", source.label());

    let pos = position.clone();
    let mut image = ParametricSurface::new(label, *source.domain(), move |u, v| {
        let p = pos(u, v);
        p / p.norm_squared()
    });

    let pos = position.clone();
    image = image.with_singular_set(move |u, v| {
        singular.as_ref().is_some_and(|s| s(u, v)) || pos(u, v).norm() <= eps_origin
    });

    if source.has_exact_jet() {
        let src = source.clone();
        image = image.with_exact_jet(move |u, v| {
            let jet = src.exact_jet(u, v).expect("source has an exact jet");
            // Callers filter origin contact through the singular set.
            invert_jet(&jet).unwrap_or(SurfaceJet {
                p: Vec3::repeat(f64::INFINITY),
                ..jet
            })
        });
    }
    image
}

/// Geometry at `Phi(p)` predicted from the geometry at `p`.
pub fn pushforward_geometry(geom: &PointGeometry) -> Result<PointGeometry> {
    let r2 = geom.r2;
    if r2 < DEFAULT_EPS_ORIGIN * DEFAULT_EPS_ORIGIN {
        return Err(GeomError::OriginContact { distance: r2.sqrt() });
    }
    let h = geom.support;
    let p = geom.point;
    let image = p / r2;
    let normal = geom.normal - p * (2.0 * h / r2);
    // Phi is conformal with factor 1/|p|^2 and keeps principal directions, so
    // in the source parametrization I~ = I / |p|^4 and
    // II~ = II / |p|^2 + 2 h I / |p|^4.
    let r4 = r2 * r2;
    Ok(PointGeometry {
        point: image,
        normal,
        e: geom.e / r4,
        f: geom.f / r4,
        g: geom.g / r4,
        l: geom.l / r2 + 2.0 * h * geom.e / r4,
        m: geom.m / r2 + 2.0 * h * geom.f / r4,
        n: geom.n / r2 + 2.0 * h * geom.g / r4,
        mean_curvature: r2 * geom.mean_curvature + 4.0 * h,
        kappa1: r2 * geom.kappa1 + 2.0 * h,
        kappa2: r2 * geom.kappa2 + 2.0 * h,
        support: normal.dot(&image),
        r2: 1.0 / r2,
    })
}

pub fn conjugated_translation(p: &Vec3, v: &Vec3) -> Result<Vec3> {
    let r2 = p.norm_squared();
    if r2.sqrt() <= DEFAULT_EPS_ORIGIN {
        return Err(GeomError::OriginContact { distance: r2.sqrt() });
    }
    let denominator = 1.0 + r2 * v.norm_squared() + 2.0 * p.dot(v);
    if denominator.abs() <= 1e-12 {
        return Err(GeomError::PoleContact { denominator });
    }
    Ok((p + v * r2) / denominator)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub surface: String,
    pub alpha: f64,
    pub dual_alpha: f64,
    pub grid: (usize, usize),
    pub max_abs_residual_source: f64,
    pub max_abs_residual_image: f64,
    pub max_law_defect: f64,
    /// Largest `|p|^2` over the evaluated points.
    pub max_r2: f64,
    pub skipped_points: usize,
    pub tolerance: f64,
    pub passed: bool,
}

/// Samples of one grid point used by [`verify_duality`].
#[derive(Debug, Clone, Copy)]
struct DualSample {
    source: f64,
    image: f64,
    defect: f64,
    r2: f64,
}

/// Verifies the inversion duality on an `n_u x n_v` grid.
///
/// Points are skipped when the source or image jet cannot be evaluated, or
/// when the image lies inside the ball of radius `origin_ball` (the image of
/// points of the source at distance greater than `1 / origin_ball`).
///
/// The report passes when the source being stationary to `tol` implies an
/// image residual within `tol * max |p|^2`.
pub fn verify_duality(
    surface: &ParametricSurface,
    alpha: f64,
    grid: (usize, usize),
    tol: f64,
    origin_ball: f64,
) -> Result<DualityReport> {
    let (nu, nv) = grid;
    if nu < 8 || nv < 8 {
        return Err(GeomError::InvalidParameter(format!(
            "duality grid must be at least 8x8, got {nu}x{nv}"
        )));
    }
    let image = invert_surface(surface);
    let dual = dual_alpha(alpha);
    let domain = *surface.domain();

    let samples: Vec<Option<DualSample>> = (0..nu * nv)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / nv, k % nv);
            let (u, v) = (domain.u.node(i, nu), domain.v.node(j, nv));
            let geom = pointwise_geometry(&evaluate_jet(surface, u, v, DEFAULT_RELATIVE_STEP).ok()?).ok()?;
            let source = stationarity_residual_clipped(&geom, alpha, DEFAULT_EPS_ORIGIN).ok()?;
            let image_jet = evaluate_jet(&image, u, v, DEFAULT_RELATIVE_STEP).ok()?;
            if image_jet.p.norm() < origin_ball {
                return None;
            }
            let image_geom = pointwise_geometry(&image_jet).ok()?;
            let image_res = stationarity_residual_clipped(&image_geom, dual, DEFAULT_EPS_ORIGIN).ok()?;
            Some(DualSample {
                source: source.abs(),
                image: image_res.abs(),
                defect: (image_res.abs() - geom.r2 * source.abs()).abs(),
                r2: geom.r2,
            })
        })
        .collect();

    let mut report = DualityReport {
        surface: surface.label().to_string(),
        alpha,
        dual_alpha: dual,
        grid,
        max_abs_residual_source: 0.0,
        max_abs_residual_image: 0.0,
        max_law_defect: 0.0,
        max_r2: 0.0,
        skipped_points: 0,
        tolerance: tol,
        passed: false,
    };
    for sample in &samples {
        match sample {
            Some(s) => {
                report.max_abs_residual_source = report.max_abs_residual_source.max(s.source);
                report.max_abs_residual_image = report.max_abs_residual_image.max(s.image);
                report.max_law_defect = report.max_law_defect.max(s.defect);
                report.max_r2 = report.max_r2.max(s.r2);
            }
            None => report.skipped_points += 1,
        }
    }
    let source_stationary = report.max_abs_residual_source <= tol;
    report.passed = !source_stationary || report.max_abs_residual_image <= tol * report.max_r2;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_plane, make_sphere_centered};

    #[test]
    fn inversion_is_an_involution() {
        let p = Vec3::new(0.3, -1.7, 2.2);
        let back = invert_point(&invert_point(&p).unwrap()).unwrap();
        assert!((back - p).norm() < 1e-13 * p.norm());
        assert!(matches!(invert_point(&Vec3::zeros()), Err(GeomError::OriginContact { .. })));
    }

    #[test]
    fn dual_exponents() {
        assert_eq!(dual_alpha(-2.0), -2.0);
        assert_eq!(dual_alpha(0.0), -4.0);
        assert_eq!(dual_alpha(dual_alpha(1.5)), 1.5);
    }

    #[test]
    fn plane_goes_to_sphere_through_origin() {
        let delta = 0.5;
        let image = invert_surface(&make_plane(&Vec3::z(), delta).unwrap());
        let (geom, r) = crate::geometry::residual_at(&image, 0.3, -0.2, -4.0).unwrap();
        // Phi(plane z = delta) is the sphere of radius 1/(2 delta).
        assert!((geom.mean_curvature.abs() - 4.0 * delta).abs() < 1e-12);
        assert!(r.abs() < 1e-12);
    }

    #[test]
    fn pushforward_matches_inverted_jets() {
        let sphere = make_sphere_centered(2.0).unwrap();
        let jet = sphere.exact_jet(0.4, 0.3).unwrap();
        let pushed = pushforward_geometry(&pointwise_geometry(&jet).unwrap()).unwrap();
        let direct = pointwise_geometry(&invert_jet(&jet).unwrap()).unwrap();
        assert!((pushed.normal.norm() - 1.0).abs() < 1e-14);
        // Phi reverses orientation, so the parametrised normal is -nu~.
        assert!((pushed.normal + direct.normal).norm() < 1e-12);
        assert!((pushed.mean_curvature + direct.mean_curvature).abs() < 1e-12);
        assert!((pushed.support + direct.support).abs() < 1e-12);
        // The image is the sphere of radius 1/2 with outward nu~.
        assert!((pushed.mean_curvature + 4.0).abs() < 1e-12);
    }

    #[test]
    fn unit_sphere_is_fixed_pointwise() {
        let sphere = make_sphere_centered(1.0).unwrap();
        let image = invert_surface(&sphere);
        let g = pointwise_geometry(&image.exact_jet(1.0, 0.5).unwrap()).unwrap();
        assert!((g.mean_curvature - 2.0).abs() < 1e-12);
        assert!((g.normal + g.point).norm() < 1e-12);
        assert!((g.point - sphere.position(1.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn conjugated_translation_values() {
        let q = conjugated_translation(&Vec3::x(), &Vec3::x()).unwrap();
        assert!((q - Vec3::new(0.5, 0.0, 0.0)).norm() < 1e-15);
        let p = Vec3::new(0.2, 0.1, -0.4);
        assert_eq!(conjugated_translation(&p, &Vec3::zeros()).unwrap(), p);
        // p = -v / |v|^2 maps to infinity.
        let v = Vec3::new(0.0, 2.0, 0.0);
        assert!(matches!(
            conjugated_translation(&(-v / 4.0), &v),
            Err(GeomError::PoleContact { .. })
        ));
    }

    #[test]
    fn duality_report_on_sphere_through_origin() {
        let s = crate::catalog::make_sphere_through_origin(1.0, &Vec3::z()).unwrap();
        let report = verify_duality(&s, -4.0, (16, 16), 1e-9, 1e-3).unwrap();
        assert!(report.passed);
        assert!(report.max_abs_residual_image < 1e-9, "{report:?}");
        assert!(report.skipped_points > 0);
        assert!(verify_duality(&s, -4.0, (4, 16), 1e-9, 1e-3).is_err());
    }
}
