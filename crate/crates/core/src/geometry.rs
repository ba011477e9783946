//! Parametric surfaces, second-order jets and pointwise differential geometry.
//!
//! Conventions used everywhere in the crate:
//!
//! - the unit normal is `normalize(X_u x X_v)`;
//! - the mean curvature `H` is the *sum* of the principal curvatures, so a
//!   sphere of radius `r` whose normal points inward has `H = 2 / r`;
//! - the support function is `h = <nu, p>`.
//!
//! The stationarity residual of a point is `R_alpha = H - alpha * h / |p|^2`.
//! A surface is alpha-stationary when it vanishes identically. Flipping the
//! normal negates `H` and `h` together, so only `|R_alpha|` is independent of
//! orientation.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::Vec3;

/// Points closer than this to the origin are treated as origin contact.
pub const DEFAULT_EPS_ORIGIN: f64 = 1e-8;

/// Default finite-difference step, relative to the extent of each axis.
pub const DEFAULT_RELATIVE_STEP: f64 = 1e-4;

/// One parameter axis of a rectangular domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub min: f64,
    pub max: f64,
    #[serde(default)]
    pub periodic: bool,
}

impl Interval {
    pub fn new(min: f64, max: f64) -> Self {
        Interval {
            min,
            max,
            periodic: false,
        }
    }

    pub fn periodic(min: f64, max: f64) -> Self {
        Interval {
            min,
            max,
            periodic: true,
        }
    }

    /// Full turn `[0, 2pi)`, periodic.
    pub fn turn() -> Self {
        Interval::periodic(0.0, TAU)
    }

    pub fn extent(&self) -> f64 {
        self.max - self.min
    }

    /// Maps `x` into the interval. Periodic axes wrap; closed axes accept a
    /// relative slack of `1e-12` at the ends.
    fn resolve(&self, x: f64) -> Option<f64> {
        if self.periodic {
            let t = (x - self.min).rem_euclid(self.extent());
            Some(self.min + t)
        } else {
            let slack = 1e-12 * self.extent().abs().max(1.0);
            (x >= self.min - slack && x <= self.max + slack).then_some(x)
        }
    }

    /// Node `i` of an `n`-node sampling. Periodic axes leave out the endpoint
    /// that duplicates the start.
    pub fn node(&self, i: usize, n: usize) -> f64 {
        if self.periodic {
            self.min + self.extent() * i as f64 / n as f64
        } else if n == 1 {
            0.5 * (self.min + self.max)
        } else {
            self.min + self.extent() * i as f64 / (n - 1) as f64
        }
    }
}

/// Rectangular parameter domain `[u_min, u_max] x [v_min, v_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub u: Interval,
    pub v: Interval,
}

impl Domain {
    pub fn new(u: Interval, v: Interval) -> Self {
        Domain { u, v }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        self.u.resolve(u).is_some() && self.v.resolve(v).is_some()
    }
}

/// Position and first and second partial derivatives at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceJet {
    pub u: f64,
    pub v: f64,
    pub p: Vec3,
    pub xu: Vec3,
    pub xv: Vec3,
    pub xuu: Vec3,
    pub xuv: Vec3,
    pub xvv: Vec3,
}

impl SurfaceJet {
    /// The same point with the parameters exchanged. The normal of the
    /// swapped jet is the negative of the original one.
    pub fn swapped(&self) -> SurfaceJet {
        SurfaceJet {
            u: self.v,
            v: self.u,
            p: self.p,
            xu: self.xv,
            xv: self.xu,
            xuu: self.xvv,
            xuv: self.xuv,
            xvv: self.xuu,
        }
    }

    pub fn max_abs_diff(&self, other: &SurfaceJet) -> f64 {
        [
            self.p - other.p,
            self.xu - other.xu,
            self.xv - other.xv,
            self.xuu - other.xuu,
            self.xuv - other.xuv,
            self.xvv - other.xvv,
        ]
        .iter()
        .map(|d| d.amax())
        .fold(0.0, f64::max)
    }
}

pub type PositionFn = dyn Fn(f64, f64) -> Vec3 + Send + Sync;
pub type JetFn = dyn Fn(f64, f64) -> SurfaceJet + Send + Sync;
pub type SingularFn = dyn Fn(f64, f64) -> bool + Send + Sync;

/// A smooth map from a rectangular parameter domain into 3-space.
///
/// Surfaces are immutable and cheap to clone; all callbacks are shared.
#[derive(Clone)]
pub struct ParametricSurface {
    label: String,
    domain: Domain,
    position: Arc<PositionFn>,
    exact_jet: Option<Arc<JetFn>>,
    singular: Option<Arc<SingularFn>>,
}

impl fmt::Debug for ParametricSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricSurface")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("exact_jet", &self.exact_jet.is_some())
            .field("singular_set", &self.singular.is_some())
            .finish()
    }
}

impl ParametricSurface {
    pub fn new<F>(label: impl Into<String>, domain: Domain, position: F) -> Self
    where
        F: Fn(f64, f64) -> Vec3 + Send + Sync + 'static,
    {
        ParametricSurface {
            label: label.into(),
            domain,
            position: Arc::new(position),
            exact_jet: None,
            singular: None,
        }
    }

    /// Attaches an exact derivative supplier. Its `p` must agree with the
    /// position callback.
    pub fn with_exact_jet<F>(mut self, jet: F) -> Self
    where
        F: Fn(f64, f64) -> SurfaceJet + Send + Sync + 'static,
    {
        self.exact_jet = Some(Arc::new(jet));
        self
    }

    pub fn with_singular_set<F>(mut self, singular: F) -> Self
    where
        F: Fn(f64, f64) -> bool + Send + Sync + 'static,
    {
        self.singular = Some(Arc::new(singular));
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Drops the exact jet so every derivative goes through finite differences.
    pub fn without_exact_jet(mut self) -> Self {
        self.exact_jet = None;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn has_exact_jet(&self) -> bool {
        self.exact_jet.is_some()
    }

    pub fn position(&self, u: f64, v: f64) -> Vec3 {
        (self.position)(u, v)
    }

    pub fn exact_jet(&self, u: f64, v: f64) -> Option<SurfaceJet> {
        self.exact_jet.as_ref().map(|jet| jet(u, v))
    }

    pub fn is_singular(&self, u: f64, v: f64) -> bool {
        self.singular.as_ref().is_some_and(|s| s(u, v))
    }

    pub(crate) fn position_fn(&self) -> Arc<PositionFn> {
        Arc::clone(&self.position)
    }

    pub(crate) fn singular_fn(&self) -> Option<Arc<SingularFn>> {
        self.singular.clone()
    }
}

/// Jet of `surface` at `(u, v)`.
///
/// Uses the exact supplier when present. Otherwise second-order central
/// differences with per-axis step `step * extent`; the stencil is allowed to
/// leave a closed domain since positions are defined beyond it.
pub fn evaluate_jet(surface: &ParametricSurface, u: f64, v: f64, step: f64) -> Result<SurfaceJet> {
    if !(step > 0.0) {
        return Err(GeomError::InvalidParameter(format!("step must be positive, got {step}")));
    }
    let domain = surface.domain();
    let (u, v) = match (domain.u.resolve(u), domain.v.resolve(v)) {
        (Some(u), Some(v)) => (u, v),
        _ => return Err(GeomError::DomainError { u, v }),
    };
    if surface.is_singular(u, v) {
        return Err(GeomError::SingularPoint { u, v });
    }
    if let Some(jet) = surface.exact_jet(u, v) {
        return Ok(jet);
    }
    Ok(finite_difference_jet(surface, u, v, step))
}

fn finite_difference_jet(surface: &ParametricSurface, u: f64, v: f64, step: f64) -> SurfaceJet {
    let hu = step * surface.domain().u.extent().abs();
    let hv = step * surface.domain().v.extent().abs();
    let x = |a: f64, b: f64| surface.position(u + a, v + b);

    let p = x(0.0, 0.0);
    let (pu, mu) = (x(hu, 0.0), x(-hu, 0.0));
    let (pv, mv) = (x(0.0, hv), x(0.0, -hv));
    let (pp, pm) = (x(hu, hv), x(hu, -hv));
    let (mp, mm) = (x(-hu, hv), x(-hu, -hv));

    SurfaceJet {
        u,
        v,
        p,
        xu: (pu - mu) / (2.0 * hu),
        xv: (pv - mv) / (2.0 * hv),
        xuu: (pu - 2.0 * p + mu) / (hu * hu),
        xvv: (pv - 2.0 * p + mv) / (hv * hv),
        xuv: (pp - pm - mp + mm) / (4.0 * hu * hv),
    }
}

/// Pointwise geometry of a surface.
///
/// `(e, f, g)` are the first fundamental form coefficients `E, F, G` and
/// `(l, m, n)` the second fundamental form coefficients with respect to
/// `normal`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointGeometry {
    pub point: Vec3,
    pub normal: Vec3,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
    pub mean_curvature: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub support: f64,
    pub r2: f64,
}

impl PointGeometry {
    pub fn gauss_curvature(&self) -> f64 {
        (self.l * self.n - self.m * self.m) / (self.e * self.g - self.f * self.f)
    }

    /// Same point with the opposite orientation.
    pub fn flipped(&self) -> PointGeometry {
        PointGeometry {
            normal: -self.normal,
            l: -self.l,
            m: -self.m,
            n: -self.n,
            mean_curvature: -self.mean_curvature,
            kappa1: -self.kappa2,
            kappa2: -self.kappa1,
            support: -self.support,
            ..*self
        }
    }
}

pub fn pointwise_geometry(jet: &SurfaceJet) -> Result<PointGeometry> {
    let cross = jet.xu.cross(&jet.xv);
    let cross_norm = cross.norm();
    let scale = jet.xu.norm().max(jet.xv.norm());
    if !(cross_norm > 1e-12 * scale * scale) {
        return Err(GeomError::DegenerateImmersion { cross_norm });
    }
    let normal = cross / cross_norm;

    let e = jet.xu.dot(&jet.xu);
    let f = jet.xu.dot(&jet.xv);
    let g = jet.xv.dot(&jet.xv);
    let l = jet.xuu.dot(&normal);
    let m = jet.xuv.dot(&normal);
    let n = jet.xvv.dot(&normal);

    let det = e * g - f * f;
    let mean_curvature = (l * g - 2.0 * m * f + n * e) / det;
    let gauss = (l * n - m * m) / det;
    let half = 0.5 * mean_curvature;
    // Umbilics can produce a slightly negative discriminant.
    let root = (half * half - gauss).max(0.0).sqrt();

    Ok(PointGeometry {
        point: jet.p,
        normal,
        e,
        f,
        g,
        l,
        m,
        n,
        mean_curvature,
        kappa1: half + root,
        kappa2: half - root,
        support: normal.dot(&jet.p),
        r2: jet.p.norm_squared(),
    })
}

/// `R_alpha = H - alpha h / |p|^2` with the default origin clip radius.
pub fn stationarity_residual(geom: &PointGeometry, alpha: f64) -> Result<f64> {
    stationarity_residual_clipped(geom, alpha, DEFAULT_EPS_ORIGIN)
}

pub fn stationarity_residual_clipped(geom: &PointGeometry, alpha: f64, eps_origin: f64) -> Result<f64> {
    if geom.r2 < eps_origin * eps_origin {
        return Err(GeomError::OriginContact {
            distance: geom.r2.sqrt(),
        });
    }
    Ok(geom.mean_curvature - alpha * geom.support / geom.r2)
}

/// Jet, geometry and residual in one call, used by grid sweeps.
pub fn residual_at(surface: &ParametricSurface, u: f64, v: f64, alpha: f64) -> Result<(PointGeometry, f64)> {
    let jet = evaluate_jet(surface, u, v, DEFAULT_RELATIVE_STEP)?;
    let geom = pointwise_geometry(&jet)?;
    let r = stationarity_residual(&geom, alpha)?;
    Ok((geom, r))
}
