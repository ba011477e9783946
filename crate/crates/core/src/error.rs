use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeomError>;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("parameter point ({u}, {v}) is in the singular set")]
    SingularPoint { u: f64, v: f64 },
    #[error("parameter point ({u}, {v}) lies outside the domain")]
    DomainError { u: f64, v: f64 },
    #[error("degenerate immersion: |X_u x X_v| = {cross_norm:e}")]
    DegenerateImmersion { cross_norm: f64 },
    #[error("point at distance {distance:e} from the origin is inside the clip radius")]
    OriginContact { distance: f64 },
    #[error("conjugated translation hits the pole (denominator {denominator:e})")]
    PoleContact { denominator: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("integration path meets a pole of the Weierstrass data near {re} + {im}i")]
    PoleOnPath { re: f64, im: f64 },
    #[error("construction is not minimal: max |H| = {max_abs_h:e} exceeds {tolerance:e}")]
    NonMinimalResult { max_abs_h: f64, tolerance: f64 },
    #[error("need at least {required} samples, got {got}")]
    InsufficientSamples { required: usize, got: usize },
    #[error("samples are not equispaced over one period")]
    NonUniformSamples,
    #[error("holomorphic extension diverges: tail bound {tail:e} exceeds {tolerance:e}")]
    ExtensionDivergence { tail: f64, tolerance: f64 },
    #[error("refit tail {tail:e} still above tolerance with {modes} modes")]
    RefitTailError { tail: f64, modes: usize },
    #[error("Bjorling data violates {what}: defect {defect:e}")]
    InvalidBjorlingData { what: &'static str, defect: f64 },
    #[error("normal transport is ambiguous at sample {index} (|<n_i, n_i+1>| = {overlap:.3})")]
    AmbiguousTransport { index: usize, overlap: f64 },
    #[error("loop does not close (gap {gap:e})")]
    OpenLoop { gap: f64 },
    #[error("postcondition failed: {what} (defect {defect:e}, tolerance {tolerance:e})")]
    Postcondition {
        what: &'static str,
        defect: f64,
        tolerance: f64,
    },
    #[error("mesh has no valid vertices")]
    EmptyMesh,
    #[error("plane does not cross the mesh")]
    EmptySection,
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
