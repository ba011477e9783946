//! The weighted area `E_alpha = \int |p|^alpha dA` and a finite-difference
//! check of its first variation.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{GeomError, Result};
use crate::geometry::{evaluate_jet, Domain, ParametricSurface, DEFAULT_EPS_ORIGIN, DEFAULT_RELATIVE_STEP};
use crate::Vec3;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor-product Gauss-Legendre rule over a subdivided domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnergyQuadrature {
    pub order: usize,
    pub cells_u: usize,
    pub cells_v: usize,
}

impl EnergyQuadrature {
    pub fn new(order: usize, cells_u: usize, cells_v: usize) -> Result<Self> {
        if order < 2 || cells_u < 1 || cells_v < 1 {
            return Err(GeomError::InvalidParameter(format!(
                "quadrature needs order >= 2 and at least one cell per axis, got {order}, {cells_u}x{cells_v}"
            )));
        }
        Ok(EnergyQuadrature {
            order,
            cells_u,
            cells_v,
        })
    }

    /// All `(u, v, weight)` nodes, row-major over cells.
    pub fn nodes(&self, domain: &Domain) -> Vec<(f64, f64, f64)> {
        let rule = GaussLegendre::new(self.order);
        let du = domain.u.extent() / self.cells_u as f64;
        let dv = domain.v.extent() / self.cells_v as f64;
        let mut out = Vec::with_capacity(self.cells_u * self.cells_v * self.order * self.order);
        for i in 0..self.cells_u {
            let u0 = domain.u.min + du * i as f64;
            for j in 0..self.cells_v {
                let v0 = domain.v.min + dv * j as f64;
                for (u, wu) in rule.on(u0, u0 + du) {
                    for (v, wv) in rule.on(v0, v0 + dv) {
                        out.push((u, v, wu * wv));
                    }
                }
            }
        }
        out
    }
}

/// Integrates `|p|^alpha |X_u x X_v|` given a first-order frame supplier.
fn integrate_weighted_area<F>(domain: &Domain, alpha: f64, quad: &EnergyQuadrature, frame: F) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<(Vec3, Vec3, Vec3)> + Sync,
{
    let terms = quad
        .nodes(domain)
        .into_par_iter()
        .map(|(u, v, w)| {
            let (p, xu, xv) = frame(u, v)?;
            let r = p.norm();
            if r < DEFAULT_EPS_ORIGIN {
                return Err(GeomError::OriginContact { distance: r });
            }
            Ok(w * r.powf(alpha) * xu.cross(&xv).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(terms.iter().sum())
}

pub fn energy(surface: &ParametricSurface, alpha: f64, quad: &EnergyQuadrature) -> Result<f64> {
    integrate_weighted_area(surface.domain(), alpha, quad, |u, v| {
        let jet = evaluate_jet(surface, u, v, DEFAULT_RELATIVE_STEP)?;
        Ok((jet.p, jet.xu, jet.xv))
    })
}

/// Smooth scalar field on the parameter domain, with its gradient.
pub trait ScalarField: Sync {
    fn value(&self, u: f64, v: f64) -> f64;
    fn gradient(&self, u: f64, v: f64) -> (f64, f64);
}

/// `exp(1 - 1/(1 - rho^2))` inside the ellipse `rho < 1`, zero outside.
/// It peaks at 1 in the centre and is flat to all orders on the rim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: (f64, f64),
    pub radii: (f64, f64),
}

impl Bump {
    pub fn new(center: (f64, f64), radii: (f64, f64)) -> Self {
        Bump { center, radii }
    }

    fn rho2(&self, u: f64, v: f64) -> (f64, f64, f64) {
        let a = (u - self.center.0) / self.radii.0;
        let b = (v - self.center.1) / self.radii.1;
        (a * a + b * b, a, b)
    }
}

impl ScalarField for Bump {
    fn value(&self, u: f64, v: f64) -> f64 {
        let (rho2, _, _) = self.rho2(u, v);
        if rho2 >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - rho2)).exp()
        }
    }

    fn gradient(&self, u: f64, v: f64) -> (f64, f64) {
        let (rho2, a, b) = self.rho2(u, v);
        if rho2 >= 1.0 {
            return (0.0, 0.0);
        }
        let s = 1.0 - rho2;
        let dvalue_drho2 = -(1.0 - 1.0 / s).exp() / (s * s);
        (
            dvalue_drho2 * 2.0 * a / self.radii.0,
            dvalue_drho2 * 2.0 * b / self.radii.1,
        )
    }
}

/// Energy of the normal variation `X + t * bump * nu` at a single `t`.
pub fn varied_energy(
    surface: &ParametricSurface,
    alpha: f64,
    bump: &dyn ScalarField,
    t: f64,
    quad: &EnergyQuadrature,
) -> Result<f64> {
    integrate_weighted_area(surface.domain(), alpha, quad, |u, v| {
        let jet = evaluate_jet(surface, u, v, DEFAULT_RELATIVE_STEP)?;
        let b = bump.value(u, v);
        let (bu, bv) = bump.gradient(u, v);
        if b == 0.0 && bu == 0.0 && bv == 0.0 {
            return Ok((jet.p, jet.xu, jet.xv));
        }
        let cross = jet.xu.cross(&jet.xv);
        let len = cross.norm();
        let nu = cross / len;
        // d(nu) = projection of d(X_u x X_v) orthogonal to nu, over |X_u x X_v|.
        let du_cross = jet.xuu.cross(&jet.xv) + jet.xu.cross(&jet.xuv);
        let dv_cross = jet.xuv.cross(&jet.xv) + jet.xu.cross(&jet.xvv);
        let nu_u = (du_cross - nu * nu.dot(&du_cross)) / len;
        let nu_v = (dv_cross - nu * nu.dot(&dv_cross)) / len;
        Ok((
            jet.p + nu * (t * b),
            jet.xu + (nu * bu + nu_u * b) * t,
            jet.xv + (nu * bv + nu_v * b) * t,
        ))
    })
}

/// Centred difference `(E(t) - E(-t)) / 2t` of the energy along the normal
/// variation with profile `bump`.
pub fn first_variation_check(
    surface: &ParametricSurface,
    alpha: f64,
    bump: &dyn ScalarField,
    t_step: f64,
    quad: &EnergyQuadrature,
) -> Result<f64> {
    if !(t_step > 0.0) {
        return Err(GeomError::InvalidParameter(format!("t_step must be positive, got {t_step}")));
    }
    let plus = varied_energy(surface, alpha, bump, t_step, quad)?;
    let minus = varied_energy(surface, alpha, bump, -t_step, quad)?;
    Ok((plus - minus) / (2.0 * t_step))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for order in 2..=12 {
            let rule = GaussLegendre::new(order);
            let total: f64 = rule.weights.iter().sum();
            assert_relative_eq!(total, 2.0, epsilon = 1e-14);
            for degree in 0..(2 * order) {
                let q: f64 = rule.on(-1.0, 1.0).map(|(x, w)| w * x.powi(degree as i32)).sum();
                let exact = if degree % 2 == 1 { 0.0 } else { 2.0 / (degree as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "order {order} degree {degree}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn quadrature_rejects_bad_rules() {
        assert!(EnergyQuadrature::new(1, 4, 4).is_err());
        assert!(EnergyQuadrature::new(4, 0, 4).is_err());
        assert!(EnergyQuadrature::new(2, 1, 1).is_ok());
    }

    #[test]
    fn bump_gradient_matches_finite_differences() {
        let bump = Bump::new((0.3, -0.1), (0.5, 0.8));
        let h = 1e-6;
        for &(u, v) in &[(0.3, -0.1), (0.5, 0.2), (0.1, -0.5), (0.7, 0.6)] {
            let (gu, gv) = bump.gradient(u, v);
            let fu = (bump.value(u + h, v) - bump.value(u - h, v)) / (2.0 * h);
            let fv = (bump.value(u, v + h) - bump.value(u, v - h)) / (2.0 * h);
            assert!((gu - fu).abs() < 1e-7 && (gv - fv).abs() < 1e-7);
        }
        assert_eq!(bump.value(2.0, 2.0), 0.0);
        assert_eq!(bump.value(0.3, -0.1), 1.0);
    }
}
