use statsurf_web::demo::{catenoid_section, mobius_strip, residual_field};

#[test]
fn centered_section_is_mirror_symmetric() {
    let s = catenoid_section(0.0, 3.0, 128).unwrap();
    assert!(s.asymmetry < 1e-3, "{}", s.asymmetry);
    assert!(!s.starts.is_empty());
    assert_eq!(s.starts[0], 0);
    assert!(s.xz.iter().all(|x| x.is_finite()));
    // The image of the neck circle meets y = 0 at x = +-1.
    let on_neck = s.xz.chunks(2).any(|p| (p[0].abs() - 1.0).abs() < 1e-2 && p[1].abs() < 1e-2);
    assert!(on_neck);
}

#[test]
fn offset_section_is_not() {
    let s = catenoid_section(0.4, 3.0, 128).unwrap();
    assert!(s.asymmetry > 1e-2, "{}", s.asymmetry);
}

#[test]
fn section_rejects_bad_input() {
    assert!(catenoid_section(0.0, -1.0, 64).is_err());
    assert!(catenoid_section(f64::NAN, 1.0, 64).is_err());
    assert!(catenoid_section(0.0, 1.0, 2).is_err());
}

#[test]
fn residual_of_stationary_and_non_stationary_spheres() {
    let r = residual_field(r#"{"kind": "sphere_origin", "r": 1}"#, -4.0, 32, 32).unwrap();
    assert_eq!(r.log_residual.len(), 32 * 32);
    assert!(r.max_abs < 1e-10);
    let r = residual_field(r#"{"kind": "sphere_centered", "r": 2}"#, 0.0, 32, 32).unwrap();
    // H = 2/r everywhere, h / |p|^2 does not enter at alpha = 0.
    assert!((r.min_abs - 1.0).abs() < 1e-12 && (r.max_abs - 1.0).abs() < 1e-12);
    assert!(r.log_residual.iter().filter(|x| x.is_finite()).all(|x| x.abs() < 1e-12));
}

#[test]
fn inverted_catenoid_residual_masks_the_origin() {
    let spec = r#"{"kind": "catenoid", "inverted": true,
        "domain": {"u": {"min": 0, "max": 6.283185307179586, "periodic": true}, "v": {"min": -9, "max": 9}}}"#;
    let r = residual_field(spec, -4.0, 64, 64).unwrap();
    assert!(r.masked > 0);
    assert_eq!(r.log_residual.iter().filter(|x| x.is_nan()).count(), r.masked);
    assert!(r.max_abs < 1e-6);
}

#[test]
fn residual_rejects_bad_specs() {
    assert!(residual_field("{", 0.0, 16, 16).is_err());
    assert!(residual_field(r#"{"kind": "torus"}"#, 0.0, 16, 16).is_err());
    assert!(residual_field(r#"{"kind": "plane"}"#, f64::INFINITY, 16, 16).is_err());
    assert!(residual_field(r#"{"kind": "plane"}"#, 0.0, 1000, 16).is_err());
}

#[test]
fn mobius_strips_are_one_sided() {
    for stationary in [false, true] {
        let s = mobius_strip(stationary, 128, 9).unwrap();
        assert_eq!(s.holonomy, -1);
        assert_eq!(s.positions.len(), 128 * 9 * 3);
        assert_eq!(s.normals.len(), s.positions.len());
        assert_eq!(s.triangles.len() % 3, 0);
        assert!(s.triangles.iter().all(|&k| (k as usize) < 128 * 9));
        assert!(s.max_abs_residual < 1e-4, "{}", s.max_abs_residual);
    }
}

#[test]
fn every_surface_offered_by_the_page_builds() {
    let page = include_str!("../index.html");
    let specs: Vec<&str> = page
        .split("<option value='")
        .skip(1)
        .map(|rest| &rest[..rest.find('\'').unwrap()])
        .collect();
    assert_eq!(specs.len(), 7);
    for spec in specs {
        for alpha in [-8.0, -4.0, 0.0, 4.0] {
            let r = residual_field(spec, alpha, 96, 96).unwrap_or_else(|e| panic!("{spec}: {e}"));
            assert!(r.max_abs.is_finite(), "{spec}");
        }
    }
}
