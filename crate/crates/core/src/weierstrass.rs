//! Minimal surfaces from Weierstrass data `(g, f)`:
//! `X(z) = Re \int_{z0}^{z} (f(1-g^2)/2, i f(1+g^2)/2, f g) dw`.
//!
//! The data are Laurent polynomials in `z`. The parameter plane is
//! `w = u + i v`, mapped to `z` by a [`Chart`]; the integral is taken along the
//! straight segment from the base point to `w` with composite Gauss-Legendre
//! quadrature, so the computed position is holomorphic in `w` for any panel
//! count and the quadrature error shows up as a mean-curvature defect.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::energy::GaussLegendre;
use crate::error::{GeomError, Result};
use crate::geometry::{evaluate_jet, pointwise_geometry, Domain, ParametricSurface, DEFAULT_RELATIVE_STEP};
use crate::Vec3;

const GAUSS_ORDER: usize = 4;
pub const DEFAULT_MINIMALITY_TOL: f64 = 1e-5;

/// `sum_k coefficients[k] z^(min_power + k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentPolynomial {
    pub min_power: i32,
    /// `(re, im)` pairs.
    pub coefficients: Vec<(f64, f64)>,
}

impl LaurentPolynomial {
    pub fn monomial(power: i32, coefficient: f64) -> Self {
        LaurentPolynomial {
            min_power: power,
            coefficients: vec![(coefficient, 0.0)],
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, &(re, im))| Complex64::new(re, im) * z.powi(self.min_power + k as i32))
            .sum()
    }

    fn has_pole_at_zero(&self) -> bool {
        self.coefficients
            .iter()
            .enumerate()
            .any(|(k, &(re, im))| self.min_power + (k as i32) < 0 && (re != 0.0 || im != 0.0))
    }
}

/// Map from the parameter plane `w` to the data plane `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    /// `z = w`.
    #[default]
    Identity,
    /// `z = exp(w)`; rectangles in `w` cover annuli.
    Exp,
}

impl Chart {
    fn map(&self, w: Complex64) -> (Complex64, Complex64) {
        match self {
            Chart::Identity => (w, Complex64::new(1.0, 0.0)),
            Chart::Exp => {
                let z = w.exp();
                (z, z)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct WeierstrassData {
    pub g: LaurentPolynomial,
    pub f: LaurentPolynomial,
    pub chart: Chart,
    pub domain: Domain,
    /// Base point `(u0, v0)` of the integration in the parameter plane.
    pub base: (f64, f64),
}

impl WeierstrassData {
    /// `(f(1-g^2)/2, i f(1+g^2)/2, f g) dz/dw` at parameter `w`.
    fn integrand(&self, w: Complex64) -> Result<[Complex64; 3]> {
        let (z, dz) = self.chart.map(w);
        if z.norm() < 1e-12 && (self.f.has_pole_at_zero() || self.g.has_pole_at_zero()) {
            return Err(GeomError::PoleOnPath { re: z.re, im: z.im });
        }
        let g = self.g.eval(z);
        let f = self.f.eval(z) * dz;
        let i = Complex64::i();
        let g2 = g * g;
        let out = [f * (1.0 - g2) * 0.5, i * f * (1.0 + g2) * 0.5, f * g];
        if out.iter().any(|c| !c.is_finite()) {
            return Err(GeomError::PoleOnPath { re: z.re, im: z.im });
        }
        Ok(out)
    }
}

/// Position integrator shared by the surface callbacks.
struct Integrator {
    data: WeierstrassData,
    panels: usize,
    rule: GaussLegendre,
}

impl Integrator {
    fn position(&self, u: f64, v: f64) -> Result<Vec3> {
        let w0 = Complex64::new(self.data.base.0, self.data.base.1);
        let dw = Complex64::new(u, v) - w0;
        let mut sum = [Complex64::new(0.0, 0.0); 3];
        let width = 1.0 / self.panels as f64;
        for panel in 0..self.panels {
            let a = panel as f64 * width;
            for (t, weight) in self.rule.on(a, a + width) {
                let phi = self.data.integrand(w0 + dw * t)?;
                for (s, c) in sum.iter_mut().zip(phi) {
                    *s += c * weight;
                }
            }
        }
        Ok(Vec3::new((sum[0] * dw).re, (sum[1] * dw).re, (sum[2] * dw).re))
    }
}

/// Panel count used for a given resolution.
pub fn panels_for(resolution: (usize, usize)) -> usize {
    (resolution.0.max(resolution.1) / 8).max(1)
}

/// Builds the surface and returns it with the largest `|H|` seen on the
/// interior `n x m` grid (numeric jets).
pub fn weierstrass_build(data: &WeierstrassData, resolution: (usize, usize)) -> Result<(ParametricSurface, f64)> {
    let (n, m) = resolution;
    if n < 3 || m < 3 {
        return Err(GeomError::InvalidParameter(format!(
            "Weierstrass resolution must be at least 3x3, got {n}x{m}"
        )));
    }
    let integrator = std::sync::Arc::new(Integrator {
        data: data.clone(),
        panels: panels_for(resolution),
        rule: GaussLegendre::new(GAUSS_ORDER),
    });
    // Scan the grid for poles before handing out positions.
    let d = data.domain;
    for i in 0..n {
        for j in 0..m {
            integrator.position(d.u.node(i, n), d.v.node(j, m))?;
        }
    }

    let it = integrator.clone();
    let surface = ParametricSurface::new("weierstrass", d, move |u, v| {
        it.position(u, v).unwrap_or(Vec3::repeat(f64::NAN))
    });

    let mut max_abs_h = 0.0f64;
    for i in 1..n - 1 {
        for j in 1..m - 1 {
            let jet = evaluate_jet(&surface, d.u.node(i, n), d.v.node(j, m), DEFAULT_RELATIVE_STEP)?;
            if let Ok(g) = pointwise_geometry(&jet) {
                max_abs_h = max_abs_h.max(g.mean_curvature.abs());
            }
        }
    }
    Ok((surface, max_abs_h))
}

/// Weierstrass surface with the minimality self-check `max |H| < 1e-5`.
pub fn weierstrass_surface(data: &WeierstrassData, resolution: (usize, usize)) -> Result<ParametricSurface> {
    let (surface, max_abs_h) = weierstrass_build(data, resolution)?;
    if !(max_abs_h < DEFAULT_MINIMALITY_TOL) {
        return Err(GeomError::NonMinimalResult {
            max_abs_h,
            tolerance: DEFAULT_MINIMALITY_TOL,
        });
    }
    Ok(surface)
}

/// `g = z`, `f = 1/z^2` on the chart `z = exp(w)`: a unit-neck catenoid.
pub fn catenoid_data(height: f64) -> WeierstrassData {
    use crate::geometry::Interval;
    WeierstrassData {
        g: LaurentPolynomial::monomial(1, 1.0),
        f: LaurentPolynomial::monomial(-2, 1.0),
        chart: Chart::Exp,
        domain: Domain::new(Interval::new(-height, height), Interval::periodic(-std::f64::consts::PI, std::f64::consts::PI)),
        base: (0.0, 0.0),
    }
}

/// `g = z`, `f = 1`: Enneper's surface over `[-r, r]^2`.
pub fn enneper_data(r: f64) -> WeierstrassData {
    use crate::geometry::Interval;
    WeierstrassData {
        g: LaurentPolynomial::monomial(1, 1.0),
        f: LaurentPolynomial::monomial(0, 1.0),
        chart: Chart::Identity,
        domain: Domain::new(Interval::new(-r, r), Interval::new(-r, r)),
        base: (0.0, 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laurent_evaluation() {
        let p = LaurentPolynomial {
            min_power: -1,
            coefficients: vec![(1.0, 0.0), (0.0, 0.0), (0.0, 2.0)],
        };
        let z = Complex64::new(0.5, 0.5);
        let expected = 1.0 / z + Complex64::new(0.0, 2.0) * z;
        assert!((p.eval(z) - expected).norm() < 1e-14);
        assert!(p.has_pole_at_zero());
    }

    #[test]
    fn pole_on_the_path_is_reported() {
        let mut data = enneper_data(1.0);
        data.f = LaurentPolynomial::monomial(-2, 1.0);
        assert!(matches!(
            weierstrass_build(&data, (9, 9)),
            Err(GeomError::PoleOnPath { .. })
        ));
    }

    #[test]
    fn enneper_matches_closed_form() {
        // Re(w - w^3/3, i(w + w^3/3), w^2) / 2
        let (s, _) = weierstrass_build(&enneper_data(1.0), (32, 32)).unwrap();
        for &(u, v) in &[(0.3, -0.4), (0.9, 0.7), (-1.0, 0.2)] {
            let w = Complex64::new(u, v);
            let w3 = w * w * w;
            let i = Complex64::i();
            let exact = Vec3::new((w - w3 / 3.0).re, (i * (w + w3 / 3.0)).re, (w * w).re) * 0.5;
            assert!((s.position(u, v) - exact).norm() < 1e-12);
        }
    }
}
