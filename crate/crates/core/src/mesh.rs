//! Grid sampling, OBJ export, residual reports and planar cross-sections.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::geometry::{
    evaluate_jet, pointwise_geometry, stationarity_residual, ParametricSurface, DEFAULT_EPS_ORIGIN,
    DEFAULT_RELATIVE_STEP,
};
use crate::Vec3;

/// A sampled surface on an `n_u x n_v` grid, stored row-major (`i * n_v + j`).
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub n_u: usize,
    pub n_v: usize,
    pub periodic_u: bool,
    pub periodic_v: bool,
    pub alpha: f64,
    pub params: Vec<(f64, f64)>,
    pub vertices: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub valid: Vec<bool>,
    pub mean_curvature: Vec<f64>,
    pub support: Vec<f64>,
    pub residual: Vec<f64>,
}

impl SurfaceMesh {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_v + j
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }

    pub fn masked_count(&self) -> usize {
        self.valid.len() - self.valid_count()
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.valid_values(&self.residual).map(f64::abs).fold(0.0, f64::max)
    }

    /// Smallest `|R_alpha|` over the valid vertices, `inf` for an empty mesh.
    pub fn min_abs_residual(&self) -> f64 {
        self.valid_values(&self.residual).map(f64::abs).fold(f64::INFINITY, f64::min)
    }

    fn valid_values<'a>(&'a self, channel: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
        channel.iter().zip(&self.valid).filter(|(_, ok)| **ok).map(|(x, _)| *x)
    }

    /// Grid cells `(i, j)` whose four corners are valid; periodic axes wrap.
    pub fn cells(&self) -> Vec<[usize; 4]> {
        let cu = if self.periodic_u { self.n_u } else { self.n_u - 1 };
        let cv = if self.periodic_v { self.n_v } else { self.n_v - 1 };
        let mut out = Vec::new();
        for i in 0..cu {
            let i1 = (i + 1) % self.n_u;
            for j in 0..cv {
                let j1 = (j + 1) % self.n_v;
                let quad = [self.index(i, j), self.index(i1, j), self.index(i1, j1), self.index(i, j1)];
                if quad.iter().all(|&k| self.valid[k]) {
                    out.push(quad);
                }
            }
        }
        out
    }
}

/// Samples `surface` on the grid, masking singular points, origin contact and
/// points inside the ball of radius `origin_ball`.
pub fn sample_grid_masked(
    surface: &ParametricSurface,
    resolution: (usize, usize),
    alpha: f64,
    origin_ball: f64,
) -> Result<SurfaceMesh> {
    let (n_u, n_v) = resolution;
    if n_u < 2 || n_v < 2 {
        return Err(GeomError::InvalidParameter(format!(
            "mesh resolution must be at least 2x2, got {n_u}x{n_v}"
        )));
    }
    let domain = *surface.domain();
    let ball = origin_ball.max(DEFAULT_EPS_ORIGIN);
    let rows: Vec<_> = (0..n_u * n_v)
        .into_par_iter()
        .map(|k| {
            let (u, v) = (domain.u.node(k / n_v, n_u), domain.v.node(k % n_v, n_v));
            let sample = evaluate_jet(surface, u, v, DEFAULT_RELATIVE_STEP).and_then(|jet| {
                if jet.p.norm() < ball {
                    return Err(GeomError::OriginContact { distance: jet.p.norm() });
                }
                let geom = pointwise_geometry(&jet)?;
                let r = stationarity_residual(&geom, alpha)?;
                Ok((geom, r))
            });
            let position = surface.position(u, v);
            match sample {
                Ok((geom, r)) => ((u, v), geom.point, geom.normal, true, geom.mean_curvature, geom.support, r),
                Err(_) => ((u, v), position, Vec3::zeros(), false, f64::NAN, f64::NAN, f64::NAN),
            }
        })
        .collect();

    let mut mesh = SurfaceMesh {
        n_u,
        n_v,
        periodic_u: domain.u.periodic,
        periodic_v: domain.v.periodic,
        alpha,
        params: Vec::with_capacity(rows.len()),
        vertices: Vec::with_capacity(rows.len()),
        normals: Vec::with_capacity(rows.len()),
        valid: Vec::with_capacity(rows.len()),
        mean_curvature: Vec::with_capacity(rows.len()),
        support: Vec::with_capacity(rows.len()),
        residual: Vec::with_capacity(rows.len()),
    };
    for (param, p, n, ok, h_mean, h, r) in rows {
        mesh.params.push(param);
        mesh.vertices.push(p);
        mesh.normals.push(n);
        mesh.valid.push(ok);
        mesh.mean_curvature.push(h_mean);
        mesh.support.push(h);
        mesh.residual.push(r);
    }
    if mesh.valid_count() == 0 {
        return Err(GeomError::EmptyMesh);
    }
    Ok(mesh)
}

pub fn sample_grid(surface: &ParametricSurface, resolution: (usize, usize), alpha: f64) -> Result<SurfaceMesh> {
    sample_grid_masked(surface, resolution, alpha, DEFAULT_EPS_ORIGIN)
}

/// `x` with 9 significant digits.
fn obj_number(x: f64) -> String {
    let x = if x.is_finite() { x } else { 0.0 };
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.8e}")
}

/// OBJ text: one `v` and `vn` per vertex (row-major), one quad `f` per valid
/// cell. Masked vertices keep their slot; non-finite coordinates are written
/// as 0.
pub fn obj_string(mesh: &SurfaceMesh) -> Result<String> {
    if mesh.valid_count() == 0 {
        return Err(GeomError::EmptyMesh);
    }
    let mut out = String::new();
    writeln!(out, "# {} x {} grid, {} masked", mesh.n_u, mesh.n_v, mesh.masked_count()).unwrap();
    for p in &mesh.vertices {
        writeln!(out, "v {} {} {}", obj_number(p.x), obj_number(p.y), obj_number(p.z)).unwrap();
    }
    for n in &mesh.normals {
        writeln!(out, "vn {} {} {}", obj_number(n.x), obj_number(n.y), obj_number(n.z)).unwrap();
    }
    for quad in mesh.cells() {
        let [a, b, c, d] = quad.map(|k| k + 1);
        writeln!(out, "f {a}//{a} {b}//{b} {c}//{c} {d}//{d}").unwrap();
    }
    Ok(out)
}

pub fn export_obj(mesh: &SurfaceMesh, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, obj_string(mesh)?)?;
    Ok(())
}

/// Positions and face index lists of an OBJ file (1-based indices are
/// converted to 0-based).
pub fn read_obj(path: impl AsRef<Path>) -> Result<(Vec<Vec3>, Vec<Vec<usize>>)> {
    let file = fs::File::open(path)?;
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for line in io::BufReader::new(file).lines() {
        let line = line?;
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let xyz: Vec<f64> = parts
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
                if xyz.len() < 3 {
                    return Err(io::Error::new(io::ErrorKind::InvalidData, "short vertex record").into());
                }
                vertices.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
            }
            Some("f") => {
                let face = parts
                    .map(|t| t.split('/').next().unwrap_or("").parse::<usize>().map(|k| k - 1))
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
                faces.push(face);
            }
            _ => {}
        }
    }
    Ok((vertices, faces))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub alpha: f64,
    #[serde(rename = "max_abs_R")]
    pub max_abs_r: f64,
    #[serde(rename = "mean_abs_R")]
    pub mean_abs_r: f64,
    pub valid_points: usize,
    pub masked_points: usize,
}

pub fn residual_summary(mesh: &SurfaceMesh) -> ResidualSummary {
    let valid = mesh.valid_count();
    let total: f64 = mesh.valid_values(&mesh.residual).map(f64::abs).sum();
    ResidualSummary {
        alpha: mesh.alpha,
        max_abs_r: mesh.max_abs_residual(),
        mean_abs_r: if valid > 0 { total / valid as f64 } else { 0.0 },
        valid_points: valid,
        masked_points: mesh.masked_count(),
    }
}

/// CSV with header `u,v,x,y,z,H,h,R_alpha`, one row per valid vertex, numbers
/// with 17 significant digits.
pub fn residual_csv(mesh: &SurfaceMesh) -> String {
    let mut out = String::from("u,v,x,y,z,H,h,R_alpha\n");
    for k in 0..mesh.vertices.len() {
        if !mesh.valid[k] {
            continue;
        }
        let (u, v) = mesh.params[k];
        let p = mesh.vertices[k];
        let row = [u, v, p.x, p.y, p.z, mesh.mean_curvature[k], mesh.support[k], mesh.residual[k]];
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Writes the CSV to `csv_path` and, when given, the JSON summary to
/// `json_path`. The summary is returned either way.
pub fn residual_report(
    mesh: &SurfaceMesh,
    csv_path: impl AsRef<Path>,
    json_path: Option<&Path>,
) -> Result<ResidualSummary> {
    let summary = residual_summary(mesh);
    fs::write(csv_path, residual_csv(mesh))?;
    if let Some(path) = json_path {
        fs::write(path, serde_json::to_string_pretty(&summary)? + "\n")?;
    }
    Ok(summary)
}

/// Plane `<x, normal> = offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    pub normal: Vec3,
    pub offset: f64,
}

impl Plane {
    pub fn new(normal: Vec3, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if !(n > 0.0) {
            return Err(GeomError::InvalidParameter("plane normal must be nonzero".into()));
        }
        Ok(Plane {
            normal: normal / n,
            offset: offset / n,
        })
    }

    pub fn signed_distance(&self, p: &Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    pub plane: Plane,
    pub polylines: Vec<Vec<Vec3>>,
    pub tolerance: f64,
}

impl CrossSection {
    pub fn point_count(&self) -> usize {
        self.polylines.iter().map(Vec::len).sum()
    }

    /// Largest distance from a section point, reflected in `mirror`, to the
    /// section itself. Zero for a section symmetric about the mirror plane.
    pub fn reflection_asymmetry(&self, mirror: &Plane) -> f64 {
        let segments: Vec<(Vec3, Vec3)> = self
            .polylines
            .iter()
            .flat_map(|line| line.windows(2).map(|w| (w[0], w[1])))
            .collect();
        let mut worst = 0.0f64;
        for p in self.polylines.iter().flatten() {
            let q = p - mirror.normal * (2.0 * mirror.signed_distance(p));
            let d = segments
                .iter()
                .map(|(a, b)| point_segment_distance(&q, a, b))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
        worst
    }
}

fn point_segment_distance(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 { ((p - a).dot(&ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p - (a + ab * t)).norm()
}

/// Grid edge between two vertex indices, stored with the smaller index first.
type EdgeKey = (usize, usize);

fn edge_key(a: usize, b: usize) -> EdgeKey {
    (a.min(b), a.max(b))
}

/// Intersection of the mesh with `plane` by marching over the valid cells.
///
/// Plane crossings are placed on grid edges by linear interpolation of the
/// signed distance and joined cell by cell; segments sharing an edge are
/// chained into polylines, closed loops repeat their first point at the end.
pub fn cross_section(mesh: &SurfaceMesh, plane: &Plane, tol: f64) -> Result<CrossSection> {
    if !(tol > 0.0) {
        return Err(GeomError::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let dist: Vec<f64> = mesh.vertices.iter().map(|p| plane.signed_distance(p)).collect();
    let side = |k: usize| dist[k] >= 0.0;

    let mut crossings: HashMap<EdgeKey, Vec3> = HashMap::new();
    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for quad in mesh.cells() {
        let mut hits = Vec::with_capacity(4);
        for e in 0..4 {
            let (a, b) = (quad[e], quad[(e + 1) % 4]);
            if side(a) != side(b) {
                let key = edge_key(a, b);
                crossings.entry(key).or_insert_with(|| {
                    let t = dist[a] / (dist[a] - dist[b]);
                    mesh.vertices[a] + (mesh.vertices[b] - mesh.vertices[a]) * t
                });
                hits.push(key);
            }
        }
        match hits.len() {
            2 => segments.push((hits[0], hits[1])),
            // Saddle cell: pair crossings by the sign of the centre value.
            4 => {
                let centre: f64 = quad.iter().map(|&k| dist[k]).sum::<f64>() / 4.0;
                if (centre >= 0.0) == side(quad[0]) {
                    segments.push((hits[0], hits[1]));
                    segments.push((hits[2], hits[3]));
                } else {
                    segments.push((hits[3], hits[0]));
                    segments.push((hits[1], hits[2]));
                }
            }
            _ => {}
        }
    }
    if segments.is_empty() {
        return Err(GeomError::EmptySection);
    }

    let mut adjacency: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (s, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(*a).or_default().push(s);
        adjacency.entry(*b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();
    // Start open chains at their ends so each comes out in one piece.
    let mut order: Vec<usize> = (0..segments.len()).collect();
    order.sort_by_key(|&s| {
        let (a, b) = segments[s];
        let open = adjacency[&a].len() == 1 || adjacency[&b].len() == 1;
        (!open, s)
    });
    for start in order {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = segments[start];
        let (first, mut current) = if adjacency[&b].len() == 1 { (b, a) } else { (a, b) };
        let mut chain = vec![first, current];
        loop {
            let next = adjacency[&current].iter().copied().find(|&s| !used[s]);
            let Some(s) = next else { break };
            used[s] = true;
            let (x, y) = segments[s];
            current = if x == current { y } else { x };
            chain.push(current);
        }
        polylines.push(chain.iter().map(|k| crossings[k]).collect::<Vec<_>>());
    }
    // Deterministic output order.
    polylines.sort_by_key(|line| std::cmp::Reverse(line.len()));

    let section = CrossSection {
        plane: *plane,
        polylines,
        tolerance: tol,
    };
    debug_assert!(section
        .polylines
        .iter()
        .flatten()
        .all(|p| plane.signed_distance(p).abs() <= tol.max(1e-9)));
    Ok(section)
}

/// Polylines as CSV rows `polyline,index,x,y,z`.
pub fn section_csv(section: &CrossSection) -> String {
    let mut out = String::from("polyline,index,x,y,z\n");
    for (l, line) in section.polylines.iter().enumerate() {
        for (i, p) in line.iter().enumerate() {
            writeln!(out, "{l},{i},{:.16e},{:.16e},{:.16e}", p.x, p.y, p.z).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_plane, make_sphere_centered};

    #[test]
    fn sphere_poles_are_masked() {
        let s = make_sphere_centered(1.0).unwrap();
        let mesh = sample_grid(&s, (32, 32), -2.0).unwrap();
        for i in 0..32 {
            assert!(!mesh.valid[mesh.index(i, 0)]);
            assert!(!mesh.valid[mesh.index(i, 31)]);
            for j in 1..31 {
                assert!(mesh.valid[mesh.index(i, j)]);
            }
        }
        assert_eq!(mesh.masked_count(), 64);
        assert!(mesh.max_abs_residual() < 1e-12);
    }

    #[test]
    fn two_by_two_plane_patch() {
        let s = make_plane(&Vec3::z(), 1.0).unwrap();
        let mesh = sample_grid(&s, (2, 2), 0.0).unwrap();
        let obj = obj_string(&mesh).unwrap();
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 4);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 1);
    }

    #[test]
    fn masked_column_drops_faces_but_not_vertices() {
        let s = make_plane(&Vec3::z(), 1.0).unwrap().with_singular_set(|u, _| u.abs() < 0.1);
        let mesh = sample_grid(&s, (5, 4), 0.0).unwrap();
        let obj = obj_string(&mesh).unwrap();
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 20);
        // 4 x 3 cells, the two rows of cells touching u = 0 are gone.
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 6);
    }

    #[test]
    fn empty_mesh_and_empty_section() {
        let s = make_plane(&Vec3::z(), 1.0).unwrap().with_singular_set(|_, _| true);
        assert!(matches!(sample_grid(&s, (4, 4), 0.0), Err(GeomError::EmptyMesh)));
        let s = make_plane(&Vec3::z(), 1.0).unwrap();
        let mesh = sample_grid(&s, (4, 4), 0.0).unwrap();
        let plane = Plane::new(Vec3::z(), 5.0).unwrap();
        assert!(matches!(cross_section(&mesh, &plane, 1e-9), Err(GeomError::EmptySection)));
    }

    #[test]
    fn equator_of_unit_sphere() {
        let s = make_sphere_centered(1.0).unwrap();
        let mesh = sample_grid(&s, (64, 64), 0.0).unwrap();
        let section = cross_section(&mesh, &Plane::new(Vec3::z(), 0.0).unwrap(), 1e-9).unwrap();
        assert_eq!(section.polylines.len(), 1);
        let line = &section.polylines[0];
        assert_eq!(line.first(), line.last());
        let worst = line.iter().map(|p| (p.norm() - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-3, "radial deviation {worst}");
        assert!(line.iter().all(|p| p.z.abs() < 1e-12));
    }

    #[test]
    fn csv_has_fixed_header_and_valid_rows() {
        let s = make_sphere_centered(1.0).unwrap();
        let mesh = sample_grid(&s, (8, 8), -2.0).unwrap();
        let csv = residual_csv(&mesh);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("u,v,x,y,z,H,h,R_alpha"));
        assert_eq!(lines.count(), mesh.valid_count());
        let summary = residual_summary(&mesh);
        assert_eq!(summary.valid_points + summary.masked_points, 64);
    }
}
