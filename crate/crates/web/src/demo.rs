//! Plain-Rust side of the demo. Everything here runs natively; the
//! `wasm_bindgen` wrappers in the crate root only convert errors.

use std::f64::consts::TAU;

use statsurf::bjorling::{mobius_preset, orientation_holonomy, schwarz_solve, solve_stationary_bjorling};
use statsurf::catalog::make_catenoid;
use statsurf::config::SurfaceSpec;
use statsurf::mesh::{cross_section, sample_grid_masked, Plane, SurfaceMesh};
use statsurf::{invert_surface, Domain, GeomError, Interval, Result, Vec3};

const ORIGIN_BALL: f64 = 1e-3;
const MAX_GRID: usize = 400;

fn check_grid(n_u: usize, n_v: usize) -> Result<()> {
    if n_u < 4 || n_v < 4 || n_u > MAX_GRID || n_v > MAX_GRID {
        return Err(GeomError::InvalidParameter(format!(
            "grid must be between 4 and {MAX_GRID} per side, got {n_u}x{n_v}"
        )));
    }
    Ok(())
}

/// The `y = 0` section of an inverted catenoid.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    /// `(x, z)` pairs of all polylines, concatenated.
    pub xz: Vec<f64>,
    /// Index into `xz` (in points) where each polyline starts.
    pub starts: Vec<u32>,
    /// Asymmetry under `x -> -x`.
    pub asymmetry: f64,
}

/// Inverts the unit-neck catenoid with axis parallel to `e3` through
/// `(offset, 0, 0)` and cuts the image with the plane `y = 0`.
pub fn catenoid_section(offset: f64, height: f64, resolution: usize) -> Result<Section> {
    if !(height > 0.0 && height.is_finite() && offset.is_finite()) {
        return Err(GeomError::InvalidParameter(format!(
            "need a finite offset and a positive height, got {offset}, {height}"
        )));
    }
    check_grid(resolution, resolution)?;
    let catenoid = make_catenoid(1.0, &Vec3::new(offset, 0.0, 0.0), &Vec3::z())?
        .with_domain(Domain::new(Interval::periodic(0.0, TAU), Interval::new(-height, height)));
    let mesh = sample_grid_masked(&invert_surface(&catenoid), (resolution, resolution / 2 + 1), -4.0, ORIGIN_BALL)?;
    let section = cross_section(&mesh, &Plane::new(Vec3::y(), 0.0)?, 1e-9)?;
    let asymmetry = section.reflection_asymmetry(&Plane::new(Vec3::x(), 0.0)?);
    let mut xz = Vec::new();
    let mut starts = Vec::new();
    for line in &section.polylines {
        starts.push((xz.len() / 2) as u32);
        for p in line {
            xz.extend([p.x, p.z]);
        }
    }
    Ok(Section { xz, starts, asymmetry })
}

/// Residual of a surface on its parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualField {
    pub n_u: usize,
    pub n_v: usize,
    /// `log10 |R|`, row-major in `(u, v)`; `NaN` where masked.
    pub log_residual: Vec<f64>,
    pub max_abs: f64,
    pub min_abs: f64,
    pub masked: usize,
}

/// `spec` is a JSON surface description, e.g.
/// `{"kind": "sphere_origin", "r": 1, "inverted": true}`.
pub fn residual_field(spec: &str, alpha: f64, n_u: usize, n_v: usize) -> Result<ResidualField> {
    check_grid(n_u, n_v)?;
    if !alpha.is_finite() {
        return Err(GeomError::InvalidParameter(format!("alpha must be finite, got {alpha}")));
    }
    let surface = SurfaceSpec::from_json(spec)?.build()?;
    let mesh = sample_grid_masked(&surface, (n_u, n_v), alpha, ORIGIN_BALL)?;
    let log_residual = mesh
        .residual
        .iter()
        .zip(&mesh.valid)
        .map(|(r, &ok)| if ok { r.abs().max(1e-300).log10() } else { f64::NAN })
        .collect();
    Ok(ResidualField {
        n_u,
        n_v,
        log_residual,
        max_abs: mesh.max_abs_residual(),
        min_abs: mesh.min_abs_residual(),
        masked: mesh.masked_count(),
    })
}

/// Triangulated Björling strip.
#[derive(Debug, Clone, PartialEq)]
pub struct Strip {
    /// `xyz` triples.
    pub positions: Vec<f32>,
    /// `xyz` triples; zero at masked vertices.
    pub normals: Vec<f32>,
    pub triangles: Vec<u32>,
    pub holonomy: i32,
    pub max_abs_residual: f64,
}

fn triangulate(mesh: &SurfaceMesh) -> (Vec<f32>, Vec<f32>, Vec<u32>) {
    let flat = |vs: &[Vec3]| -> Vec<f32> {
        vs.iter()
            .zip(&mesh.valid)
            .flat_map(|(p, &ok)| if ok { [p.x as f32, p.y as f32, p.z as f32] } else { [0.0; 3] })
            .collect()
    };
    let triangles = mesh
        .cells()
        .into_iter()
        .flat_map(|[a, b, c, d]| [a, b, c, a, c, d].map(|k| k as u32))
        .collect();
    (flat(&mesh.vertices), flat(&mesh.normals), triangles)
}

/// The Möbius strip as a minimal surface, or its `-4`-stationary version.
pub fn mobius_strip(stationary: bool, n_s: usize, n_t: usize) -> Result<Strip> {
    check_grid(n_s, n_t)?;
    let data = mobius_preset();
    let (surface, alpha) = if stationary {
        (solve_stationary_bjorling(&data, (n_s, n_t))?.surface, -4.0)
    } else {
        (schwarz_solve(&data, (n_s, n_t))?.surface, 0.0)
    };
    let holonomy = orientation_holonomy(&surface, 0.0)?;
    let mesh = sample_grid_masked(&surface, (n_s, n_t), alpha, ORIGIN_BALL)?;
    let (positions, normals, triangles) = triangulate(&mesh);
    Ok(Strip {
        positions,
        normals,
        triangles,
        holonomy,
        max_abs_residual: mesh.max_abs_residual(),
    })
}
