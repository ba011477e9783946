//! Bjorling problems for minimal and -4-stationary surfaces.
//!
//! Given an analytic curve `alpha(s)` and a unit analytic field `V(s)` with
//! `<alpha'(s), V(s)> = 0`, the minimal solution is Schwarz's
//!
//! ```text
//! X(s, t) = Re( alpha(z) - i \int_{s0}^{z} V(w) x alpha'(w) dw ),  z = s + it,
//! ```
//!
//! evaluated on the holomorphic extension of the Fourier data. Along `t = 0`
//! the normal `X_s x X_t` equals `alpha' x (V x alpha') / |alpha'|^2 = V`.
//!
//! For the -4-stationary problem the data are first moved by the inversion,
//! `alpha~ = Phi(alpha)`, `V~ = V - 2 <alpha, V> alpha / |alpha|^2`; the minimal
//! solution for `(alpha~, V~)` is then inverted back.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{GeomError, Result};
use crate::fourier::{fit_adaptive, CVec3, FourierCurve, ModeSeries, SeriesIntegral, DEFAULT_TAIL_TOL};
use crate::geometry::{
    evaluate_jet, pointwise_geometry, stationarity_residual, Domain, Interval, ParametricSurface, SurfaceJet,
    DEFAULT_EPS_ORIGIN, DEFAULT_RELATIVE_STEP,
};
use crate::inversion::invert_surface;
use crate::Vec3;

/// Largest Fourier order used when refitting transformed data.
pub const MAX_REFIT_ORDER: usize = 512;
/// Certified growth of the outermost modes allowed on the strip.
pub const STRIP_TAIL_TOL: f64 = 1e-8;
pub const DATA_TOL: f64 = 1e-8;
pub const MINIMALITY_TOL: f64 = 1e-5;
pub const STATIONARITY_TOL: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct BjorlingData {
    pub curve: FourierCurve,
    pub field: FourierCurve,
    /// Requested strip half-width; `None` uses `0.25 * period / 2pi`.
    pub strip_halfwidth: Option<f64>,
    /// Parameter range of the solution along `s`; `None` uses one period
    /// (periodic) for closed curves.
    pub s_range: Option<(f64, f64)>,
}

impl BjorlingData {
    pub fn new(curve: FourierCurve, field: FourierCurve) -> Result<Self> {
        let data = BjorlingData {
            curve,
            field,
            strip_halfwidth: None,
            s_range: None,
        };
        data.validate()?;
        Ok(data)
    }

    pub fn with_strip_halfwidth(mut self, tau: f64) -> Self {
        self.strip_halfwidth = Some(tau);
        self
    }

    pub fn with_s_range(mut self, start: f64, end: f64) -> Self {
        self.s_range = Some((start, end));
        self
    }

    pub fn period(&self) -> f64 {
        self.curve.period()
    }

    fn is_closed(&self) -> bool {
        self.curve.drift().norm() == 0.0
    }

    /// Parameter interval along the curve.
    pub fn s_interval(&self) -> Interval {
        match self.s_range {
            Some((a, b)) => Interval::new(a, b),
            None if self.is_closed() => Interval::periodic(0.0, self.period()),
            None => Interval::new(0.0, self.period()),
        }
    }

    /// Checks that the field has unit length and is orthogonal to the
    /// tangent, at `8N + 64` samples over the parameter interval.
    pub fn validate(&self) -> Result<()> {
        if (self.curve.period() - self.field.period()).abs() > 1e-12 * self.curve.period() {
            return Err(GeomError::InvalidParameter("curve and field periods differ".into()));
        }
        if self.field.drift().norm() != 0.0 {
            return Err(GeomError::InvalidParameter("the normal field cannot drift".into()));
        }
        let (unit, ortho) = self.data_defects();
        if unit > DATA_TOL {
            return Err(GeomError::InvalidBjorlingData {
                what: "unit length of V",
                defect: unit,
            });
        }
        if ortho > DATA_TOL {
            return Err(GeomError::InvalidBjorlingData {
                what: "orthogonality of V and alpha'",
                defect: ortho,
            });
        }
        Ok(())
    }

    fn check_samples(&self) -> Vec<f64> {
        let interval = self.s_interval();
        let count = 8 * self.curve.order().max(self.field.order()) + 64;
        (0..count)
            .map(|j| interval.min + interval.extent() * j as f64 / count as f64)
            .collect()
    }

    /// `(max ||V| - 1|, max |<alpha', V>| / |alpha'|)` over the check samples.
    pub fn data_defects(&self) -> (f64, f64) {
        let mut unit = 0.0f64;
        let mut ortho = 0.0f64;
        for s in self.check_samples() {
            let v = self.field.eval(s);
            let tangent = self.curve.derivative_at(s, 1);
            unit = unit.max((v.norm() - 1.0).abs());
            ortho = ortho.max(tangent.dot(&v).abs() / tangent.norm().max(1e-300));
        }
        (unit, ortho)
    }

    pub fn min_distance_to_origin(&self) -> f64 {
        self.check_samples()
            .into_iter()
            .map(|s| self.curve.eval(s).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Result of [`schwarz_solve`].
#[derive(Debug, Clone)]
pub struct BjorlingSurface {
    pub surface: ParametricSurface,
    /// `+1` for `Re(alpha - i I)`, `-1` for `Re(alpha + i I)`.
    pub sign: f64,
    /// Strip half-width actually used.
    pub strip_halfwidth: f64,
    pub max_abs_h: f64,
    pub boundary_defect: f64,
    pub normal_defect: f64,
}

/// Holomorphic `F(z)` with `X = Re F`, and its first two derivatives.
struct SchwarzMap {
    curve: FourierCurve,
    integrand: ModeSeries,
    integrand_derivative: ModeSeries,
    integral: SeriesIntegral,
    sign: f64,
}

impl SchwarzMap {
    fn new(data: &BjorlingData, s0: f64) -> Self {
        let tangent = data.curve.derivative_series();
        let integrand = data.field.series().cross(&tangent);
        let integral = SeriesIntegral::new(&integrand, Complex64::new(s0, 0.0));
        SchwarzMap {
            curve: data.curve.clone(),
            integrand_derivative: integrand.derivative(),
            integrand,
            integral,
            sign: 1.0,
        }
    }

    fn minus_i_sign(&self) -> Complex64 {
        Complex64::new(0.0, -self.sign)
    }

    fn jet(&self, s: f64, t: f64) -> SurfaceJet {
        let z = Complex64::new(s, t);
        let k = self.minus_i_sign();
        let f0: CVec3 = self.curve.extension(z) + self.integral.eval(z) * k;
        let f1: CVec3 = self.curve.extension_derivative(z, 1) + self.integrand.eval(z) * k;
        let f2: CVec3 = self.curve.extension_derivative(z, 2) + self.integrand_derivative.eval(z) * k;
        let re = |c: &CVec3| c.map(|x| x.re);
        let im = |c: &CVec3| c.map(|x| x.im);
        // X = Re F, d/dt = i d/dz.
        SurfaceJet {
            u: s,
            v: t,
            p: re(&f0),
            xu: re(&f1),
            xv: -im(&f1),
            xuu: re(&f2),
            xuv: -im(&f2),
            xvv: -re(&f2),
        }
    }
}

/// Largest `tau <= requested` at which the outermost modes of both curves
/// grow by less than [`STRIP_TAIL_TOL`].
pub fn certified_strip(data: &BjorlingData) -> Result<f64> {
    let mut tau = data.strip_halfwidth.unwrap_or(0.25 * data.period() / TAU);
    if !(tau > 0.0) {
        return Err(GeomError::InvalidParameter(format!("strip half-width must be positive, got {tau}")));
    }
    for _ in 0..60 {
        let tail = data.curve.tail_bound(tau).max(data.field.tail_bound(tau));
        if tail < STRIP_TAIL_TOL {
            return Ok(tau);
        }
        tau *= 0.5;
    }
    Err(GeomError::ExtensionDivergence {
        tail: data.curve.tail_bound(tau).max(data.field.tail_bound(tau)),
        tolerance: STRIP_TAIL_TOL,
    })
}

/// Grid of `(s, t)` check points; interior excludes the `t` edges and, on a
/// closed `s` interval, the `s` edges.
fn interior_grid(domain: &Domain, grid: (usize, usize)) -> Vec<(f64, f64)> {
    let (ns, nt) = grid;
    let s_range = if domain.u.periodic { 0..ns } else { 1..ns.saturating_sub(1) };
    let mut out = Vec::new();
    for i in s_range {
        for j in 1..nt.saturating_sub(1) {
            out.push((domain.u.node(i, ns), domain.v.node(j, nt)));
        }
    }
    out
}

fn check_grid(grid: (usize, usize)) -> Result<()> {
    if grid.0 < 3 || grid.1 < 3 {
        return Err(GeomError::InvalidParameter(format!(
            "Bjorling check grid must be at least 3x3, got {}x{}",
            grid.0, grid.1
        )));
    }
    Ok(())
}

/// Minimal surface through `data.curve` with normal `data.field` along it.
///
/// The surface is defined on `s_interval x [-tau, tau]` with exact jets. The
/// sign of the integral term is chosen so that the normal along `t = 0` is
/// `+V`; the boundary, normal and `max |H|` defects on the `grid` are checked
/// and reported.
pub fn schwarz_solve(data: &BjorlingData, grid: (usize, usize)) -> Result<BjorlingSurface> {
    check_grid(grid)?;
    data.validate()?;
    let tau = certified_strip(data)?;
    let s_interval = data.s_interval();
    let domain = Domain::new(s_interval, Interval::new(-tau, tau));

    let mut map = SchwarzMap::new(data, s_interval.min);
    let probe = pointwise_geometry(&map.jet(s_interval.min + 0.1 * s_interval.extent(), 0.0))?;
    if probe.normal.dot(&data.field.eval(s_interval.min + 0.1 * s_interval.extent())) < 0.0 {
        map.sign = -1.0;
    }
    let sign = map.sign;
    let map = Arc::new(map);

    let m = map.clone();
    let surface = ParametricSurface::new("bjorling", domain, move |s, t| m.jet(s, t).p)
        .with_exact_jet({
            let m = map.clone();
            move |s, t| m.jet(s, t)
        });

    let mut boundary_defect = 0.0f64;
    let mut normal_defect = 0.0f64;
    for i in 0..grid.0 {
        let s = s_interval.node(i, grid.0);
        let jet = map.jet(s, 0.0);
        boundary_defect = boundary_defect.max((jet.p - data.curve.eval(s)).norm());
        let geom = pointwise_geometry(&jet)?;
        normal_defect = normal_defect.max((geom.normal - data.field.eval(s)).norm());
    }
    if boundary_defect > 1e-8 {
        return Err(GeomError::Postcondition {
            what: "X(s, 0) = alpha(s)",
            defect: boundary_defect,
            tolerance: 1e-8,
        });
    }
    if normal_defect > 1e-6 {
        return Err(GeomError::Postcondition {
            what: "normal along the curve equals V",
            defect: normal_defect,
            tolerance: 1e-6,
        });
    }

    let mut max_abs_h = 0.0f64;
    for (s, t) in interior_grid(&domain, grid) {
        let geom = pointwise_geometry(&map.jet(s, t))?;
        max_abs_h = max_abs_h.max(geom.mean_curvature.abs());
    }
    if !(max_abs_h < MINIMALITY_TOL) {
        return Err(GeomError::NonMinimalResult {
            max_abs_h,
            tolerance: MINIMALITY_TOL,
        });
    }

    Ok(BjorlingSurface {
        surface,
        sign,
        strip_halfwidth: tau,
        max_abs_h,
        boundary_defect,
        normal_defect,
    })
}

/// Moves Bjorling data by the inversion:
/// `alpha~ = alpha / |alpha|^2`, `V~ = V - 2 <alpha, V> alpha / |alpha|^2`,
/// both refitted with adaptive order up to [`MAX_REFIT_ORDER`].
pub fn transform_data(data: &BjorlingData) -> Result<BjorlingData> {
    if !data.is_closed() {
        return Err(GeomError::InvalidParameter(
            "only closed (drift-free) curves can be refitted after inversion".into(),
        ));
    }
    let distance = data.min_distance_to_origin();
    if distance <= DEFAULT_EPS_ORIGIN {
        return Err(GeomError::OriginContact { distance });
    }
    let period = data.period();
    let start = data.curve.order().max(data.field.order()).max(4);
    let curve = data.curve.clone();
    let alpha = move |s: f64| {
        let a = curve.eval(s);
        a / a.norm_squared()
    };
    let (curve, field) = (data.curve.clone(), data.field.clone());
    let reflected = move |s: f64| {
        let a = curve.eval(s);
        let v = field.eval(s);
        v - a * (2.0 * a.dot(&v) / a.norm_squared())
    };
    let new_curve = fit_adaptive(alpha, period, start, MAX_REFIT_ORDER, DEFAULT_TAIL_TOL)?;
    let new_field = fit_adaptive(reflected, period, start, MAX_REFIT_ORDER, DEFAULT_TAIL_TOL)?;
    let out = BjorlingData {
        curve: new_curve,
        field: new_field,
        strip_halfwidth: data.strip_halfwidth,
        s_range: data.s_range,
    };
    out.validate()?;
    Ok(out)
}

/// Result of [`solve_stationary_bjorling`].
#[derive(Debug, Clone)]
pub struct StationaryBjorlingSurface {
    pub surface: ParametricSurface,
    /// The minimal solution of the transformed problem.
    pub minimal: BjorlingSurface,
    pub transformed: BjorlingData,
    pub max_abs_residual: f64,
    pub boundary_defect: f64,
    /// `min(|nu - V|, |nu + V|)` maximised over the curve.
    pub normal_defect: f64,
    /// Sign `s` such that the computed normal along the curve is `s V`.
    pub normal_sign: f64,
    pub masked_points: usize,
}

/// -4-stationary surface containing `data.curve` with normal `+-V` along it.
pub fn solve_stationary_bjorling(data: &BjorlingData, grid: (usize, usize)) -> Result<StationaryBjorlingSurface> {
    check_grid(grid)?;
    data.validate()?;
    let transformed = transform_data(data)?;
    let minimal = schwarz_solve(&transformed, grid)?;
    let surface = invert_surface(&minimal.surface).with_label("stationary bjorling");
    let domain = *surface.domain();

    let mut boundary_defect = 0.0f64;
    let mut plus = 0.0f64;
    let mut minus = 0.0f64;
    for i in 0..grid.0 {
        let s = domain.u.node(i, grid.0);
        let jet = evaluate_jet(&surface, s, 0.0, DEFAULT_RELATIVE_STEP)?;
        boundary_defect = boundary_defect.max((jet.p - data.curve.eval(s)).norm());
        let normal = pointwise_geometry(&jet)?.normal;
        let v = data.field.eval(s);
        plus = plus.max((normal - v).norm());
        minus = minus.max((normal + v).norm());
    }
    let (normal_sign, normal_defect) = if plus <= minus { (1.0, plus) } else { (-1.0, minus) };
    if boundary_defect > 1e-7 {
        return Err(GeomError::Postcondition {
            what: "X(s, 0) = alpha(s)",
            defect: boundary_defect,
            tolerance: 1e-7,
        });
    }
    if normal_defect > 1e-5 {
        return Err(GeomError::Postcondition {
            what: "normal along the curve equals +-V",
            defect: normal_defect,
            tolerance: 1e-5,
        });
    }

    let mut max_abs_residual = 0.0f64;
    let mut masked_points = 0;
    for (s, t) in interior_grid(&domain, grid) {
        let residual = evaluate_jet(&surface, s, t, DEFAULT_RELATIVE_STEP)
            .and_then(|jet| pointwise_geometry(&jet))
            .and_then(|geom| stationarity_residual(&geom, -4.0));
        match residual {
            Ok(r) => max_abs_residual = max_abs_residual.max(r.abs()),
            Err(_) => masked_points += 1,
        }
    }
    if !(max_abs_residual < STATIONARITY_TOL) {
        return Err(GeomError::Postcondition {
            what: "max |R_-4| on the interior grid",
            defect: max_abs_residual,
            tolerance: STATIONARITY_TOL,
        });
    }

    Ok(StationaryBjorlingSurface {
        surface,
        minimal,
        transformed,
        max_abs_residual,
        boundary_defect,
        normal_defect,
        normal_sign,
        masked_points,
    })
}

/// `alpha(s) = (cos s, sin s, 0)`, `V(s) = cos(s/2) alpha(s) + sin(s/2) e3`,
/// represented over the doubled period `4 pi` (modes `k = 2 omega`).
pub fn mobius_preset() -> BjorlingData {
    let c = Complex64::new;
    let zero = c(0.0, 0.0);
    let order = 6;
    let mut curve = vec![CVec3::repeat(zero); 2 * order + 1];
    let mut field = curve.clone();
    let at = |k: i64| (k + order as i64) as usize;
    // cos s = (e^{is} + e^{-is}) / 2, sin s = (e^{is} - e^{-is}) / 2i; s is mode 2.
    curve[at(2)] = CVec3::new(c(0.5, 0.0), c(0.0, -0.5), zero);
    curve[at(-2)] = CVec3::new(c(0.5, 0.0), c(0.0, 0.5), zero);
    // cos(s/2) cos s = (cos(3s/2) + cos(s/2)) / 2,
    // cos(s/2) sin s = (sin(3s/2) + sin(s/2)) / 2.
    for k in [1i64, 3] {
        let sg = k.signum() as f64;
        field[at(k)] = CVec3::new(c(0.25, 0.0), c(0.0, -0.25 * sg), zero);
        field[at(-k)] = CVec3::new(c(0.25, 0.0), c(0.0, 0.25 * sg), zero);
    }
    field[at(1)].z = c(0.0, -0.5);
    field[at(-1)].z = c(0.0, 0.5);
    let period = 2.0 * TAU;
    BjorlingData {
        curve: FourierCurve::from_modes(period, curve).expect("symmetric modes"),
        field: FourierCurve::from_modes(period, field).expect("symmetric modes"),
        strip_halfwidth: None,
        s_range: None,
    }
}

/// Circle `(r cos s, r sin s, height)` with the field `field(alpha(s))`,
/// sampled and fitted over `[0, 2pi)`.
pub fn circle_data<F>(radius: f64, height: f64, field: F) -> Result<BjorlingData>
where
    F: Fn(&Vec3) -> Vec3,
{
    let modes_for = |f: &dyn Fn(f64) -> Vec3| {
        let samples = crate::fourier::sample_periodic(f, 0.0, TAU, 64);
        crate::fourier::fit_fourier(&samples, TAU, 16)
    };
    let alpha = move |s: f64| Vec3::new(radius * s.cos(), radius * s.sin(), height);
    let curve = modes_for(&alpha)?;
    let field_fn = |s: f64| field(&alpha(s));
    let field = modes_for(&field_fn)?;
    BjorlingData::new(curve, field)
}

/// Normal holonomy around the loop `s -> (s, loop_t)`, `s` from the start of
/// the domain over one `2 pi`. Returns `+1` when the transported normal comes
/// back to itself and `-1` when it comes back reversed.
pub fn orientation_holonomy(surface: &ParametricSurface, loop_t: f64) -> Result<i32> {
    orientation_holonomy_with(surface, loop_t, TAU, 720)
}

pub fn orientation_holonomy_with(
    surface: &ParametricSurface,
    loop_t: f64,
    loop_length: f64,
    samples: usize,
) -> Result<i32> {
    let s0 = surface.domain().u.min;
    // Positions along the loop; the domain may be shorter than the loop for
    // surfaces that close up only after the doubled parameter range, so the
    // closed-form position is used past the end of the domain.
    let normal_at = |s: f64| -> Result<(Vec3, Vec3)> {
        let jet = match surface.exact_jet(s, loop_t) {
            Some(jet) => jet,
            None => evaluate_jet(surface, s, loop_t, DEFAULT_RELATIVE_STEP)?,
        };
        Ok((jet.p, pointwise_geometry(&jet)?.normal))
    };
    let (start_point, start_normal) = normal_at(s0)?;
    let (end_point, _) = normal_at(s0 + loop_length)?;
    let scale = start_point.norm().max(1.0);
    let gap = (end_point - start_point).norm();
    if gap > 1e-8 * scale {
        return Err(GeomError::OpenLoop { gap });
    }

    let mut transported = start_normal;
    for j in 1..=samples {
        let s = s0 + loop_length * j as f64 / samples as f64;
        let (_, n) = normal_at(s)?;
        let overlap = transported.dot(&n);
        if overlap.abs() < 0.5 {
            return Err(GeomError::AmbiguousTransport { index: j, overlap });
        }
        transported = if overlap < 0.0 { -n } else { n };
    }
    Ok(if transported.dot(&start_normal) > 0.0 { 1 } else { -1 })
}

/// Helper shared by harmonicity checks: `X_ss + X_tt` from a jet.
pub fn laplacian(jet: &SurfaceJet) -> Vec3 {
    jet.xuu + jet.xvv
}
