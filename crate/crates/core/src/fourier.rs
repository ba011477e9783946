//! Truncated Fourier series in `C^3` and their holomorphic extension to a
//! horizontal strip.

use nalgebra::Vector3;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{GeomError, Result};
use crate::Vec3;

pub type CVec3 = Vector3<Complex64>;

pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

fn czero() -> CVec3 {
    CVec3::repeat(Complex64::new(0.0, 0.0))
}

pub(crate) fn complexify(v: &Vec3) -> CVec3 {
    v.map(|x| Complex64::new(x, 0.0))
}

/// `sum_{k=min_k}^{min_k+len-1} c_k exp(i omega_k z)` with
/// `omega_k = 2 pi k / period`. No symmetry is assumed.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSeries {
    pub period: f64,
    pub min_k: i64,
    pub coeffs: Vec<CVec3>,
}

impl ModeSeries {
    pub fn omega(&self, k: i64) -> f64 {
        std::f64::consts::TAU * k as f64 / self.period
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, &CVec3)> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, c)| (self.min_k + i as i64, c))
    }

    /// `d^order/dz^order` of the series at complex `z`.
    pub fn eval_derivative(&self, z: Complex64, order: u32) -> CVec3 {
        let i = Complex64::i();
        let mut out = czero();
        for (k, c) in self.modes() {
            let w = self.omega(k);
            let factor = (i * w).powu(order) * (i * w * z).exp();
            out += c * factor;
        }
        out
    }

    pub fn eval(&self, z: Complex64) -> CVec3 {
        self.eval_derivative(z, 0)
    }

    pub fn derivative(&self) -> ModeSeries {
        let i = Complex64::i();
        ModeSeries {
            period: self.period,
            min_k: self.min_k,
            coeffs: self.modes().map(|(k, c)| c * (i * self.omega(k))).collect(),
        }
    }

    /// Adds a constant vector (the `k = 0` mode).
    pub fn plus_constant(mut self, c: &CVec3) -> ModeSeries {
        if self.coeffs.is_empty() {
            self.min_k = 0;
            self.coeffs.push(*c);
            return self;
        }
        if self.min_k > 0 {
            let pad = self.min_k as usize;
            let mut coeffs = vec![czero(); pad];
            coeffs.append(&mut self.coeffs);
            self.coeffs = coeffs;
            self.min_k = 0;
        }
        let top = self.min_k + self.coeffs.len() as i64 - 1;
        if top < 0 {
            self.coeffs.resize(self.coeffs.len() + (-top) as usize, czero());
        }
        let idx = (-self.min_k) as usize;
        self.coeffs[idx] += c;
        self
    }

    /// Modewise cross product `self(z) x other(z)`.
    pub fn cross(&self, other: &ModeSeries) -> ModeSeries {
        assert!(
            (self.period - other.period).abs() <= 1e-12 * self.period.abs(),
            "cross product of series with different periods"
        );
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return ModeSeries {
                period: self.period,
                min_k: 0,
                coeffs: Vec::new(),
            };
        }
        let min_k = self.min_k + other.min_k;
        let len = self.coeffs.len() + other.coeffs.len() - 1;
        let mut coeffs = vec![czero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.iter().all(|x| x.norm_sqr() == 0.0) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a.cross(b);
            }
        }
        ModeSeries {
            period: self.period,
            min_k,
            coeffs,
        }
    }
}

/// `\int_{z0}^{z} S(w) dw` of a [`ModeSeries`]: every non-constant mode
/// integrates to a mode, the constant mode to a linear term.
#[derive(Debug, Clone)]
pub struct SeriesIntegral {
    series: ModeSeries,
    linear: CVec3,
    offset: CVec3,
}

impl SeriesIntegral {
    pub fn new(integrand: &ModeSeries, z0: Complex64) -> Self {
        let i = Complex64::i();
        let mut linear = czero();
        let coeffs = integrand
            .modes()
            .map(|(k, c)| {
                if k == 0 {
                    linear = *c;
                    czero()
                } else {
                    c / (i * integrand.omega(k))
                }
            })
            .collect();
        let series = ModeSeries {
            period: integrand.period,
            min_k: integrand.min_k,
            coeffs,
        };
        let offset = -(series.eval(z0) + linear * z0);
        SeriesIntegral { series, linear, offset }
    }

    pub fn eval(&self, z: Complex64) -> CVec3 {
        self.series.eval(z) + self.linear * z + self.offset
    }
}

/// Real analytic curve `drift * s + sum_{|k| <= N} c_k exp(i omega_k s)`,
/// `omega_k = 2 pi k / period`, with `c_{-k} = conj(c_k)`.
///
/// The drift term lets straight lines and helices be represented; closed
/// curves have zero drift.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCurve {
    period: f64,
    order: usize,
    series: ModeSeries,
    drift: Vec3,
}

impl FourierCurve {
    /// Builds a curve from modes `c_{-N}, ..., c_N`, symmetrising them so the
    /// curve is exactly real on the real axis. Fails when the input is not
    /// real-valued to `1e-12`.
    pub fn from_modes(period: f64, modes: Vec<CVec3>) -> Result<Self> {
        if !(period > 0.0) || modes.len().is_multiple_of(2) {
            return Err(GeomError::InvalidParameter(format!(
                "need a positive period and 2N+1 modes, got period {period} and {} modes",
                modes.len()
            )));
        }
        let order = modes.len() / 2;
        let mut sym = modes.clone();
        for k in 0..=order {
            let (a, b) = (modes[order + k], modes[order - k].map(|x| x.conj()));
            let scale = a.iter().chain(b.iter()).map(|x| x.norm()).fold(1.0, f64::max);
            if (a - b).iter().any(|x| x.norm() > 1e-12 * scale) {
                return Err(GeomError::InvalidParameter(format!(
                    "modes are not conjugate-symmetric at k = {k}"
                )));
            }
            let mean = (a + b) * Complex64::new(0.5, 0.0);
            sym[order + k] = mean;
            sym[order - k] = mean.map(|x| x.conj());
        }
        Ok(FourierCurve {
            period,
            order,
            series: ModeSeries {
                period,
                min_k: -(order as i64),
                coeffs: sym,
            },
            drift: Vec3::zeros(),
        })
    }

    pub fn constant(period: f64, value: &Vec3) -> Self {
        FourierCurve::from_modes(period, vec![complexify(value)]).expect("a single real mode is symmetric")
    }

    /// Same curve with zero modes appended up to `order`. Exactly
    /// band-limited data needs this so the outermost modes, which the strip
    /// certification looks at, are the vanishing ones.
    pub fn padded(self, order: usize) -> Self {
        if order <= self.order {
            return self;
        }
        let extra = order - self.order;
        let mut coeffs = vec![czero(); extra];
        coeffs.extend(self.series.coeffs);
        coeffs.extend(vec![czero(); extra]);
        FourierCurve {
            order,
            series: ModeSeries {
                period: self.period,
                min_k: -(order as i64),
                coeffs,
            },
            ..self
        }
    }

    pub fn with_drift(mut self, drift: Vec3) -> Self {
        self.drift = drift;
        self
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn drift(&self) -> &Vec3 {
        &self.drift
    }

    pub fn series(&self) -> &ModeSeries {
        &self.series
    }

    pub fn mode(&self, k: i64) -> CVec3 {
        let idx = k + self.order as i64;
        if idx < 0 || idx as usize >= self.series.coeffs.len() {
            czero()
        } else {
            self.series.coeffs[idx as usize]
        }
    }

    /// `|c_N| + |c_{-N}|`.
    pub fn tail_magnitude(&self) -> f64 {
        let n = self.order as i64;
        if n == 0 {
            return 0.0;
        }
        self.mode(n).norm() + self.mode(-n).norm()
    }

    /// Growth of the outermost modes at `|Im z| = tau`.
    pub fn tail_bound(&self, tau: f64) -> f64 {
        self.tail_magnitude() * (self.series.omega(self.order as i64) * tau.abs()).exp()
    }

    /// `sum |c_k| exp(|omega_k| tau)`, an upper bound for `|curve(z)|` on the
    /// strip (drift excluded).
    pub fn growth_bound(&self, tau: f64) -> f64 {
        self.series
            .modes()
            .map(|(k, c)| c.norm() * (self.series.omega(k).abs() * tau.abs()).exp())
            .sum()
    }

    pub fn eval(&self, s: f64) -> Vec3 {
        self.derivative_at(s, 0)
    }

    /// Real derivative of the given order on the real axis.
    pub fn derivative_at(&self, s: f64, order: u32) -> Vec3 {
        self.extension_derivative(Complex64::new(s, 0.0), order).map(|x| x.re)
    }

    pub fn extension(&self, z: Complex64) -> CVec3 {
        self.extension_derivative(z, 0)
    }

    pub fn extension_derivative(&self, z: Complex64, order: u32) -> CVec3 {
        let mut out = self.series.eval_derivative(z, order);
        match order {
            0 => out += complexify(&self.drift) * z,
            1 => out += complexify(&self.drift),
            _ => {}
        }
        out
    }

    /// Extension at `z` after certifying the outermost-mode growth.
    pub fn evaluate_extension(&self, z: Complex64, tol: f64) -> Result<CVec3> {
        let tail = self.tail_bound(z.im);
        if tail > tol {
            return Err(GeomError::ExtensionDivergence { tail, tolerance: tol });
        }
        Ok(self.extension(z))
    }

    /// Series of the complex derivative (the drift becomes the `k = 0` mode).
    pub fn derivative_series(&self) -> ModeSeries {
        self.series.derivative().plus_constant(&complexify(&self.drift))
    }

    pub fn max_abs_diff(&self, other: &FourierCurve) -> f64 {
        let n = self.order.max(other.order) as i64;
        let mut d = (self.drift - other.drift).amax();
        for k in -n..=n {
            d = d.max((self.mode(k) - other.mode(k)).iter().map(|x| x.norm()).fold(0.0, f64::max));
        }
        d
    }
}

/// Discrete Fourier fit of `2N+1` or more equispaced samples over one period.
pub fn fit_fourier(samples: &[(f64, Vec3)], period: f64, order: usize) -> Result<FourierCurve> {
    let m = samples.len();
    let required = 2 * order + 1;
    if m < required {
        return Err(GeomError::InsufficientSamples { required, got: m });
    }
    if !(period > 0.0) {
        return Err(GeomError::InvalidParameter(format!("period must be positive, got {period}")));
    }
    let s0 = samples[0].0;
    let spacing = period / m as f64;
    if samples
        .iter()
        .enumerate()
        .any(|(j, (s, _))| (s - (s0 + spacing * j as f64)).abs() > 1e-9 * period)
    {
        return Err(GeomError::NonUniformSamples);
    }

    let fft = FftPlanner::<f64>::new().plan_fft_forward(m);
    let spectra: Vec<Vec<Complex64>> = (0..3)
        .map(|axis| {
            let mut buf: Vec<Complex64> = samples.iter().map(|(_, x)| Complex64::new(x[axis], 0.0)).collect();
            fft.process(&mut buf);
            buf
        })
        .collect();

    let n = order as i64;
    let omega = std::f64::consts::TAU / period;
    let modes = (-n..=n)
        .map(|k| {
            let idx = k.rem_euclid(m as i64) as usize;
            let phase = Complex64::new(0.0, -omega * k as f64 * s0).exp() / m as f64;
            CVec3::new(spectra[0][idx] * phase, spectra[1][idx] * phase, spectra[2][idx] * phase)
        })
        .collect();
    FourierCurve::from_modes(period, modes)
}

/// Samples `f` at `m` equispaced points of `[start, start + period)`.
pub fn sample_periodic<F: Fn(f64) -> Vec3>(f: F, start: f64, period: f64, m: usize) -> Vec<(f64, Vec3)> {
    (0..m)
        .map(|j| {
            let s = start + period * j as f64 / m as f64;
            (s, f(s))
        })
        .collect()
}

/// Fits `f` with doubling orders starting at `start_order` until the tail is
/// below `tol`, up to `max_order`.
pub fn fit_adaptive<F: Fn(f64) -> Vec3>(
    f: F,
    period: f64,
    start_order: usize,
    max_order: usize,
    tol: f64,
) -> Result<FourierCurve> {
    let mut order = start_order.max(1);
    loop {
        let samples = sample_periodic(&f, 0.0, period, 4 * order);
        let curve = fit_fourier(&samples, period, order)?;
        let tail = curve.tail_magnitude();
        if tail < tol {
            return Ok(curve);
        }
        if order >= max_order {
            return Err(GeomError::RefitTailError { tail, modes: order });
        }
        order = (2 * order).min(max_order);
    }
}
