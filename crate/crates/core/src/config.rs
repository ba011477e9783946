//! Declarative surface descriptions, loadable from JSON.
//!
//! ```json
//! { "kind": "catenoid", "c": 1.0, "center": [0, 0, 0], "axis": [0, 0, 1], "inverted": true }
//! ```

use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bjorling::{circle_data, mobius_preset, schwarz_solve, solve_stationary_bjorling, BjorlingData};
use crate::catalog;
use crate::error::{GeomError, Result};
use crate::fourier::{fit_fourier, CVec3, FourierCurve};
use crate::geometry::{Domain, ParametricSurface};
use crate::inversion::invert_surface;
use crate::weierstrass::{weierstrass_surface, Chart, LaurentPolynomial, WeierstrassData};
use crate::Vec3;

fn e3() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

fn one() -> f64 {
    1.0
}

fn v3(a: &[f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

/// A named surface plus its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceKind {
    Plane {
        #[serde(default = "e3")]
        normal: [f64; 3],
        #[serde(default)]
        offset: f64,
    },
    SphereCentered {
        #[serde(default = "one")]
        r: f64,
    },
    SphereOrigin {
        #[serde(default = "one")]
        r: f64,
        #[serde(default = "e3")]
        direction: [f64; 3],
    },
    Catenoid {
        #[serde(default = "one")]
        c: f64,
        #[serde(default)]
        center: [f64; 3],
        #[serde(default = "e3")]
        axis: [f64; 3],
    },
    Helicoid {
        #[serde(default = "one")]
        pitch: f64,
    },
    Ellipsoid {
        semi_axes: [f64; 3],
        #[serde(default)]
        center: [f64; 3],
    },
    Weierstrass {
        g: LaurentPolynomial,
        f: LaurentPolynomial,
        #[serde(default)]
        chart: Chart,
        /// Rectangle in the parameter plane `w`; kept apart from the optional
        /// top-level `domain`, which restricts the built surface afterwards.
        #[serde(rename = "w_domain")]
        domain: Domain,
        #[serde(default)]
        base: (f64, f64),
        #[serde(default = "default_weierstrass_resolution")]
        resolution: (usize, usize),
    },
    Bjorling {
        data: BjorlingSpec,
        /// Solve for the -4-stationary surface instead of the minimal one.
        #[serde(default)]
        stationary: bool,
        #[serde(default = "default_bjorling_grid")]
        grid: (usize, usize),
    },
}

fn default_weierstrass_resolution() -> (usize, usize) {
    (64, 64)
}

fn default_bjorling_grid() -> (usize, usize) {
    (128, 17)
}

/// Surface kind plus optional domain override and inversion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    #[serde(flatten)]
    pub kind: SurfaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
    #[serde(default)]
    pub inverted: bool,
}

impl From<SurfaceKind> for SurfaceSpec {
    fn from(kind: SurfaceKind) -> Self {
        SurfaceSpec {
            kind,
            domain: None,
            inverted: false,
        }
    }
}

impl SurfaceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn build(&self) -> Result<ParametricSurface> {
        let mut surface = self.kind.build()?;
        if let Some(domain) = self.domain {
            surface = surface.with_domain(domain);
        }
        if self.inverted {
            surface = invert_surface(&surface);
        }
        Ok(surface)
    }
}

impl SurfaceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SurfaceKind::Plane { .. } => "plane",
            SurfaceKind::SphereCentered { .. } => "sphere_centered",
            SurfaceKind::SphereOrigin { .. } => "sphere_origin",
            SurfaceKind::Catenoid { .. } => "catenoid",
            SurfaceKind::Helicoid { .. } => "helicoid",
            SurfaceKind::Ellipsoid { .. } => "ellipsoid",
            SurfaceKind::Weierstrass { .. } => "weierstrass",
            SurfaceKind::Bjorling { .. } => "bjorling",
        }
    }

    pub fn build(&self) -> Result<ParametricSurface> {
        match self {
            SurfaceKind::Plane { normal, offset } => catalog::make_plane(&v3(normal), *offset),
            SurfaceKind::SphereCentered { r } => catalog::make_sphere_centered(*r),
            SurfaceKind::SphereOrigin { r, direction } => catalog::make_sphere_through_origin(*r, &v3(direction)),
            SurfaceKind::Catenoid { c, center, axis } => catalog::make_catenoid(*c, &v3(center), &v3(axis)),
            SurfaceKind::Helicoid { pitch } => catalog::make_helicoid(*pitch),
            SurfaceKind::Ellipsoid { semi_axes, center } => catalog::make_ellipsoid(&v3(semi_axes), &v3(center)),
            SurfaceKind::Weierstrass {
                g,
                f,
                chart,
                domain,
                base,
                resolution,
            } => {
                let data = WeierstrassData {
                    g: g.clone(),
                    f: f.clone(),
                    chart: *chart,
                    domain: *domain,
                    base: *base,
                };
                weierstrass_surface(&data, *resolution)
            }
            SurfaceKind::Bjorling { data, stationary, grid } => {
                let data = data.build()?;
                if *stationary {
                    Ok(solve_stationary_bjorling(&data, *grid)?.surface)
                } else {
                    Ok(schwarz_solve(&data, *grid)?.surface)
                }
            }
        }
    }
}

/// Complex vector mode `[[re, im]; 3]`.
pub type ModeSpec = [[f64; 2]; 3];

/// Björling data from a preset, explicit Fourier modes or uniform samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum BjorlingSpec {
    /// `mobius`, `catenoid` (unit circle, inward normal) or `disc` (unit
    /// circle, normal `e3`).
    Preset {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        strip_halfwidth: Option<f64>,
    },
    /// Modes `k = -N..=N` for curve and field over `period`. An optional
    /// linear drift is added to the curve.
    Coefficients {
        period: f64,
        curve: Vec<ModeSpec>,
        field: Vec<ModeSpec>,
        #[serde(default)]
        drift: [f64; 3],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        strip_halfwidth: Option<f64>,
    },
    /// Uniform samples `s_j = j * period / M` of curve and field, fitted at
    /// `order`.
    Samples {
        period: f64,
        curve: Vec<[f64; 3]>,
        field: Vec<[f64; 3]>,
        order: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        strip_halfwidth: Option<f64>,
    },
}

pub const BJORLING_PRESETS: [&str; 3] = ["mobius", "catenoid", "disc"];

pub fn bjorling_preset(name: &str) -> Result<BjorlingData> {
    match name {
        "mobius" => Ok(mobius_preset()),
        "catenoid" => circle_data(1.0, 0.0, |p| -p),
        "disc" => circle_data(1.0, 0.0, |_| Vec3::z()),
        _ => Err(GeomError::InvalidParameter(format!(
            "unknown Bjorling preset '{name}' (known: {})",
            BJORLING_PRESETS.join(", ")
        ))),
    }
}

fn modes_from_spec(period: f64, modes: &[ModeSpec]) -> Result<FourierCurve> {
    let modes = modes
        .iter()
        .map(|m| CVec3::new(Complex64::new(m[0][0], m[0][1]), Complex64::new(m[1][0], m[1][1]), Complex64::new(m[2][0], m[2][1])))
        .collect();
    let curve = FourierCurve::from_modes(period, modes)?;
    let order = curve.order();
    Ok(curve.padded(2 * order + 2))
}

fn fit_samples(period: f64, points: &[[f64; 3]], order: usize) -> Result<FourierCurve> {
    let m = points.len();
    let samples: Vec<(f64, Vec3)> = points
        .iter()
        .enumerate()
        .map(|(j, p)| (period * j as f64 / m as f64, v3(p)))
        .collect();
    fit_fourier(&samples, period, order)
}

impl BjorlingSpec {
    pub fn build(&self) -> Result<BjorlingData> {
        let (data, tau) = match self {
            BjorlingSpec::Preset { name, strip_halfwidth } => (bjorling_preset(name)?, *strip_halfwidth),
            BjorlingSpec::Coefficients {
                period,
                curve,
                field,
                drift,
                strip_halfwidth,
            } => {
                let curve = modes_from_spec(*period, curve)?.with_drift(v3(drift));
                (BjorlingData::new(curve, modes_from_spec(*period, field)?)?, *strip_halfwidth)
            }
            BjorlingSpec::Samples {
                period,
                curve,
                field,
                order,
                strip_halfwidth,
            } => {
                let curve = fit_samples(*period, curve, *order)?;
                (BjorlingData::new(curve, fit_samples(*period, field, *order)?)?, *strip_halfwidth)
            }
        };
        Ok(match tau {
            Some(t) => data.with_strip_halfwidth(t),
            None => data,
        })
    }
}

/// Samples of the unit circle and its inward normal, handy for examples.
pub fn catenoid_samples(m: usize) -> BjorlingSpec {
    let curve: Vec<[f64; 3]> = (0..m)
        .map(|j| {
            let s = TAU * j as f64 / m as f64;
            [s.cos(), s.sin(), 0.0]
        })
        .collect();
    let field = curve.iter().map(|p| [-p[0], -p[1], 0.0]).collect();
    BjorlingSpec::Samples {
        period: TAU,
        curve,
        field,
        order: m / 4,
        strip_halfwidth: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_catalog_kinds_with_defaults() {
        let spec = SurfaceSpec::from_json(r#"{"kind": "catenoid"}"#).unwrap();
        assert_eq!(
            spec.kind,
            SurfaceKind::Catenoid {
                c: 1.0,
                center: [0.0; 3],
                axis: [0.0, 0.0, 1.0]
            }
        );
        assert!(!spec.inverted);
        let spec = SurfaceSpec::from_json(r#"{"kind": "sphere_origin", "r": 2, "inverted": true}"#).unwrap();
        assert!(spec.inverted);
        assert!(spec.build().unwrap().label().contains("inverted"));
    }

    #[test]
    fn domain_override() {
        let spec = SurfaceSpec::from_json(
            r#"{"kind": "catenoid", "domain": {"u": {"min": 0, "max": 6.283185307179586, "periodic": true}, "v": {"min": -8, "max": 8}}}"#,
        )
        .unwrap();
        let s = spec.build().unwrap();
        assert_eq!(s.domain().v.max, 8.0);
        assert!(s.domain().u.periodic);
    }

    #[test]
    fn unknown_kind_and_preset_are_errors() {
        assert!(SurfaceSpec::from_json(r#"{"kind": "torus"}"#).is_err());
        assert!(bjorling_preset("riemann").is_err());
    }

    #[test]
    fn json_round_trip() {
        let spec: SurfaceSpec = SurfaceKind::Bjorling {
            data: BjorlingSpec::Preset {
                name: "mobius".into(),
                strip_halfwidth: None,
            },
            stationary: true,
            grid: (64, 9),
        }
        .into();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(SurfaceSpec::from_json(&text).unwrap(), spec);
    }

    #[test]
    fn sampled_and_preset_data_agree() {
        let fitted = catenoid_samples(64).build().unwrap();
        let preset = bjorling_preset("catenoid").unwrap();
        for j in 0..16 {
            let s = j as f64 * 0.4;
            assert!((fitted.curve.eval(s) - preset.curve.eval(s)).norm() < 1e-13);
            assert!((fitted.field.eval(s) - preset.field.eval(s)).norm() < 1e-13);
        }
    }
}
