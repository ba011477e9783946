use proptest::prelude::*;
use statsurf::catalog::{make_catenoid, make_ellipsoid, make_helicoid};
use statsurf::inversion::{conjugated_translation, invert_jet, pushforward_geometry};
use statsurf::{dual_alpha, invert_point, pointwise_geometry, stationarity_residual, ParametricSurface, Vec3};

fn vec3(range: f64) -> impl Strategy<Value = Vec3> {
    (-range..range, -range..range, -range..range).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn surfaces() -> Vec<ParametricSurface> {
    vec![
        make_catenoid(1.0, &Vec3::new(0.3, -0.2, 0.5), &Vec3::new(1.0, 1.0, 0.0)).unwrap(),
        make_helicoid(0.7).unwrap(),
        make_ellipsoid(&Vec3::new(1.0, 1.5, 0.7), &Vec3::new(0.4, 0.0, -0.3)).unwrap(),
    ]
}

proptest! {
    #[test]
    fn inversion_is_an_involution(p in vec3(5.0)) {
        prop_assume!(p.norm() > 1e-3);
        let back = invert_point(&invert_point(&p).unwrap()).unwrap();
        prop_assert!((back - p).norm() <= 1e-13 * p.norm().max(1.0));
    }

    #[test]
    fn residual_law_holds_pointwise(which in 0usize..3, a in 0.05f64..0.95, b in 0.05f64..0.95, alpha in -6.0f64..2.0) {
        let s = &surfaces()[which];
        let d = s.domain();
        let (u, v) = (d.u.min + a * d.u.extent(), d.v.min + b * d.v.extent());
        let jet = s.exact_jet(u, v).unwrap();
        prop_assume!(jet.p.norm() > 1e-2);
        let geom = pointwise_geometry(&jet).unwrap();
        let r = stationarity_residual(&geom, alpha).unwrap();
        let image = pointwise_geometry(&invert_jet(&jet).unwrap()).unwrap();
        let r_image = stationarity_residual(&image, dual_alpha(alpha)).unwrap();
        let scale = geom.r2 * (geom.mean_curvature.abs() + alpha.abs() * geom.support.abs() / geom.r2 + 1.0);
        prop_assert!((r_image.abs() - geom.r2 * r.abs()).abs() <= 1e-10 * scale);
        // Same law with the pushed-forward orientation, signed this time.
        let pushed = pushforward_geometry(&geom).unwrap();
        let r_pushed = stationarity_residual(&pushed, dual_alpha(alpha)).unwrap();
        prop_assert!((r_pushed - geom.r2 * r).abs() <= 1e-10 * scale);
    }

    #[test]
    fn flipping_the_normal_negates_the_residual(which in 0usize..3, a in 0.05f64..0.95, b in 0.05f64..0.95, alpha in -6.0f64..2.0) {
        let s = &surfaces()[which];
        let d = s.domain();
        let jet = s.exact_jet(d.u.min + a * d.u.extent(), d.v.min + b * d.v.extent()).unwrap();
        let geom = pointwise_geometry(&jet).unwrap();
        let r = stationarity_residual(&geom, alpha).unwrap();
        let r_flipped = stationarity_residual(&geom.flipped(), alpha).unwrap();
        prop_assert!((r + r_flipped).abs() <= 1e-14 * (1.0 + r.abs()));
        // Swapping u and v flips the normal too.
        let swapped = pointwise_geometry(&jet.swapped()).unwrap();
        prop_assert!((swapped.normal + geom.normal).norm() < 1e-12);
    }

    #[test]
    fn conjugated_translations_compose(v in vec3(2.0), w in vec3(2.0), p in vec3(3.0)) {
        prop_assume!(p.norm() > 1e-3);
        let step = conjugated_translation(&p, &v);
        prop_assume!(step.is_ok());
        let q = step.unwrap();
        let both = conjugated_translation(&p, &(v + w));
        let twice = conjugated_translation(&q, &w);
        prop_assume!(both.is_ok() && twice.is_ok());
        let (both, twice) = (both.unwrap(), twice.unwrap());
        prop_assume!(both.norm() < 1e3 && q.norm() > 1e-3);
        prop_assert!((both - twice).norm() <= 1e-9 * (1.0 + both.norm()));
    }
}
