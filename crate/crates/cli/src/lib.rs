//! Runs of the `statsurf` command: configuration, the pipeline behind each
//! subcommand, and the artifacts it produces.
//!
//! [`run`] does all the work in memory and returns an [`Outcome`]; nothing is
//! written until [`Outcome::write_artifacts`] is called, so a failing run
//! leaves no partial files behind.

pub mod args;
pub mod suites;

use std::fmt;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use statsurf::bjorling::{orientation_holonomy, schwarz_solve, solve_stationary_bjorling};
use statsurf::config::{BjorlingSpec, SurfaceKind, SurfaceSpec};
use statsurf::inversion::{invert_jet, verify_duality, DualityReport};
use statsurf::mesh::{
    cross_section, obj_string, residual_csv, residual_summary, sample_grid_masked, section_csv, Plane,
    ResidualSummary,
};
use statsurf::{dual_alpha, invert_surface, pointwise_geometry, stationarity_residual, GeomError, Vec3};

pub use suites::Suite;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "STATSURF_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Generate,
    Invert,
    Bjorling,
    Verify,
    Report,
    Section,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Generate => "generate",
            Command::Invert => "invert",
            Command::Bjorling => "bjorling",
            Command::Verify => "verify",
            Command::Report => "report",
            Command::Section => "section",
        }
    }
}

fn default_resolution() -> (usize, usize) {
    (64, 64)
}

fn default_residual_tol() -> f64 {
    1e-10
}

fn default_law_tol() -> f64 {
    1e-6
}

fn default_origin_ball() -> f64 {
    1e-3
}

fn default_section_tol() -> f64 {
    1e-9
}

fn default_plane_normal() -> [f64; 3] {
    [0.0, 1.0, 0.0]
}

fn default_bjorling_grid() -> (usize, usize) {
    (256, 33)
}

/// Everything a run needs. Each key has a command-line flag of the same name
/// (with dashes); flags override values read from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub surface: Option<SurfaceSpec>,
    /// Björling data for the `bjorling` command.
    #[serde(default)]
    pub bjorling: Option<BjorlingSpec>,
    /// Solve the -4-stationary Björling problem instead of the minimal one.
    #[serde(default)]
    pub stationary: bool,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "default_resolution")]
    pub resolution: (usize, usize),
    #[serde(default = "default_bjorling_grid")]
    pub bjorling_grid: (usize, usize),
    #[serde(default = "default_residual_tol")]
    pub residual_tol: f64,
    #[serde(default = "default_law_tol")]
    pub law_tol: f64,
    #[serde(default = "default_origin_ball")]
    pub origin_ball: f64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub emit_obj: Option<PathBuf>,
    #[serde(default)]
    pub emit_csv: Option<PathBuf>,
    #[serde(default)]
    pub emit_json: Option<PathBuf>,
    #[serde(default = "default_plane_normal")]
    pub plane_normal: [f64; 3],
    #[serde(default)]
    pub plane_offset: f64,
    #[serde(default = "default_section_tol")]
    pub section_tol: f64,
    /// Mirror plane normal (through the origin) for the section asymmetry.
    #[serde(default)]
    pub mirror_normal: Option<[f64; 3]>,
    #[serde(default)]
    pub check_holonomy: bool,
    /// Named acceptance suite run by `verify` instead of a single surface.
    #[serde(default)]
    pub suite: Option<Suite>,
    #[serde(default)]
    pub seed: u64,
    /// Extra random parameter points for the duality law in `verify`.
    #[serde(default)]
    pub sweep: usize,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            surface: None,
            bjorling: None,
            stationary: false,
            alpha: 0.0,
            resolution: default_resolution(),
            bjorling_grid: default_bjorling_grid(),
            residual_tol: default_residual_tol(),
            law_tol: default_law_tol(),
            origin_ball: default_origin_ball(),
            out_dir: None,
            emit_obj: None,
            emit_csv: None,
            emit_json: None,
            plane_normal: default_plane_normal(),
            plane_offset: 0.0,
            section_tol: default_section_tol(),
            mirror_normal: None,
            check_holonomy: false,
            suite: None,
            seed: 0,
            sweep: 0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid run config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks the invariants that do not need any geometry.
    pub fn validate(&self) -> Result<(), CliError> {
        let (n, m) = self.resolution;
        if n < 2 || m < 2 {
            return Err(CliError::Config(format!("resolution must be at least 2x2, got {n}x{m}")));
        }
        let needs_surface = matches!(
            self.command,
            Command::Generate | Command::Invert | Command::Report | Command::Section
        ) || (self.command == Command::Verify && self.suite.is_none());
        if needs_surface && self.surface.is_none() {
            return Err(CliError::Config(format!("`{}` needs a surface", self.command.name())));
        }
        if self.command == Command::Bjorling && self.bjorling.is_none() && !matches!(
            self.surface.as_ref().map(|s| &s.kind),
            Some(SurfaceKind::Bjorling { .. })
        ) {
            return Err(CliError::Config("`bjorling` needs a preset or Björling data".into()));
        }
        for (name, value) in [
            ("residual_tol", self.residual_tol),
            ("law_tol", self.law_tol),
            ("section_tol", self.section_tol),
        ] {
            if value.is_nan() || value <= 0.0 {
                return Err(CliError::Config(format!("{name} must be positive, got {value}")));
            }
        }
        Ok(())
    }

    /// Output directory: the configured one, else the environment variable.
    pub fn output_dir(&self) -> Option<PathBuf> {
        self.out_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
    }

    fn output_path(&self, explicit: &Option<PathBuf>, default_name: &str, always: bool) -> Option<PathBuf> {
        if let Some(path) = explicit {
            return Some(match (path.is_relative(), self.output_dir()) {
                (true, Some(dir)) => dir.join(path),
                _ => path.clone(),
            });
        }
        match self.output_dir() {
            Some(dir) => Some(dir.join(default_name)),
            None if always => Some(PathBuf::from(default_name)),
            None => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Geometry(GeomError::InvalidParameter(_) | GeomError::Json(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    Failed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Failed => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub path: PathBuf,
    pub contents: String,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    /// Lines for standard output.
    pub lines: Vec<String>,
    pub artifacts: Vec<Artifact>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            status: Status::Success,
            lines: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    fn emit(&mut self, path: Option<PathBuf>, contents: String) {
        if let Some(path) = path {
            self.say(format!("wrote {}", path.display()));
            self.artifacts.push(Artifact { path, contents });
        }
    }

    pub fn write_artifacts(&self) -> Result<(), CliError> {
        for artifact in &self.artifacts {
            if let Some(parent) = artifact.path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|source| CliError::Write {
                    path: parent.to_path_buf(),
                    source,
                })?;
            }
            std::fs::write(&artifact.path, &artifact.contents).map_err(|source| CliError::Write {
                path: artifact.path.clone(),
                source,
            })?;
        }
        Ok(())
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

fn v3(a: &[f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn surface_spec(config: &RunConfig) -> Result<&SurfaceSpec, CliError> {
    config
        .surface
        .as_ref()
        .ok_or_else(|| CliError::Config(format!("`{}` needs a surface", config.command.name())))
}

fn json(value: &impl Serialize) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value).map_err(GeomError::from)? + "\n")
}

/// Executes one run. Artifacts are returned, not written.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    config.validate()?;
    match config.command {
        Command::Generate => generate(config, false),
        Command::Invert => generate(config, true),
        Command::Bjorling => bjorling(config),
        Command::Verify => match config.suite {
            Some(suite) => suites::run_suite(suite, config),
            None => verify(config),
        },
        Command::Report => report(config),
        Command::Section => section(config),
    }
}

fn generate(config: &RunConfig, invert: bool) -> Result<Outcome, CliError> {
    let spec = surface_spec(config)?;
    let mut surface = spec.build()?;
    let mut alpha = config.alpha;
    if invert {
        surface = invert_surface(&surface);
        alpha = dual_alpha(alpha);
    }
    let mesh = sample_grid_masked(&surface, config.resolution, alpha, config.origin_ball)?;
    let summary = residual_summary(&mesh);
    let mut out = Outcome::new();
    out.say(format!(
        "{}: {} ({}x{}), alpha {alpha}, max |R| {:.3e}, masked {}",
        config.command.name(),
        surface.label(),
        mesh.n_u,
        mesh.n_v,
        summary.max_abs_r,
        summary.masked_points
    ));
    let name = format!("{}.obj", config.command.name());
    out.emit(config.output_path(&config.emit_obj, &name, true), obj_string(&mesh)?);
    if config.emit_json.is_some() {
        out.emit(config.output_path(&config.emit_json, "summary.json", false), json(&summary)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BjorlingSummary {
    pub stationary: bool,
    pub strip_halfwidth: f64,
    pub boundary_defect: f64,
    pub normal_defect: f64,
    /// `max |H|` for the minimal problem, `max |R_-4|` for the stationary one.
    pub max_abs_residual: f64,
    pub holonomy: Option<i32>,
}

fn bjorling(config: &RunConfig) -> Result<Outcome, CliError> {
    let (spec, stationary, grid) = match (&config.bjorling, config.surface.as_ref().map(|s| &s.kind)) {
        (Some(spec), _) => (spec.clone(), config.stationary, config.bjorling_grid),
        (None, Some(SurfaceKind::Bjorling { data, stationary, grid })) => {
            (data.clone(), *stationary || config.stationary, *grid)
        }
        _ => return Err(CliError::Config("`bjorling` needs a preset or Björling data".into())),
    };
    let data = spec.build()?;
    let (surface, summary) = if stationary {
        let sol = solve_stationary_bjorling(&data, grid)?;
        let summary = BjorlingSummary {
            stationary,
            strip_halfwidth: sol.minimal.strip_halfwidth,
            boundary_defect: sol.boundary_defect,
            normal_defect: sol.normal_defect,
            max_abs_residual: sol.max_abs_residual,
            holonomy: None,
        };
        (sol.surface, summary)
    } else {
        let sol = schwarz_solve(&data, grid)?;
        let summary = BjorlingSummary {
            stationary,
            strip_halfwidth: sol.strip_halfwidth,
            boundary_defect: sol.boundary_defect,
            normal_defect: sol.normal_defect,
            max_abs_residual: sol.max_abs_h,
            holonomy: None,
        };
        (sol.surface, summary)
    };
    let mut summary = summary;
    let mut out = Outcome::new();
    out.say(format!(
        "bjorling: {} solution, strip |t| <= {:.4}, boundary {:.2e}, normal {:.2e}, max |{}| {:.2e}",
        if stationary { "-4-stationary" } else { "minimal" },
        summary.strip_halfwidth,
        summary.boundary_defect,
        summary.normal_defect,
        if stationary { "R_-4" } else { "H" },
        summary.max_abs_residual,
    ));
    if config.check_holonomy {
        let holonomy = orientation_holonomy(&surface, 0.0)?;
        summary.holonomy = Some(holonomy);
        out.say(format!("holonomy {holonomy}"));
    }
    let alpha = if stationary { -4.0 } else { 0.0 };
    let mesh = sample_grid_masked(&surface, config.resolution, alpha, config.origin_ball)?;
    out.emit(config.output_path(&config.emit_obj, "bjorling.obj", true), obj_string(&mesh)?);
    if config.emit_json.is_some() {
        out.emit(config.output_path(&config.emit_json, "bjorling.json", false), json(&summary)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub residual_tol: f64,
    pub law_tol: f64,
    pub summary: ResidualSummary,
    pub duality: DualityReport,
    pub seed: u64,
    pub sweep_points: usize,
    pub sweep_max_law_defect: f64,
}

/// Largest law defect at `count` random parameter points drawn from `seed`.
fn law_sweep(spec: &SurfaceSpec, alpha: f64, count: usize, seed: u64) -> Result<f64, CliError> {
    let surface = spec.build()?;
    let domain = *surface.domain();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let u = domain.u.min + rng.random::<f64>() * domain.u.extent();
        let v = domain.v.min + rng.random::<f64>() * domain.v.extent();
        let Ok(jet) = statsurf::evaluate_jet(&surface, u, v, statsurf::geometry::DEFAULT_RELATIVE_STEP) else {
            continue;
        };
        let (Ok(geom), Ok(image)) = (pointwise_geometry(&jet), invert_jet(&jet).and_then(|j| pointwise_geometry(&j)))
        else {
            continue;
        };
        let (Ok(r), Ok(r_image)) = (stationarity_residual(&geom, alpha), stationarity_residual(&image, dual_alpha(alpha)))
        else {
            continue;
        };
        worst = worst.max((r_image.abs() - geom.r2 * r.abs()).abs());
    }
    Ok(worst)
}

fn verify(config: &RunConfig) -> Result<Outcome, CliError> {
    let spec = surface_spec(config)?;
    let surface = spec.build()?;
    let mesh = sample_grid_masked(&surface, config.resolution, config.alpha, config.origin_ball)?;
    let summary = residual_summary(&mesh);
    let (nu, nv) = config.resolution;
    let duality = verify_duality(&surface, config.alpha, (nu.max(8), nv.max(8)), config.residual_tol, config.origin_ball)?;
    let sweep_max_law_defect = if config.sweep > 0 {
        law_sweep(spec, config.alpha, config.sweep, config.seed)?
    } else {
        0.0
    };
    let passed = summary.max_abs_r <= config.residual_tol
        && duality.passed
        && duality.max_law_defect <= config.law_tol
        && sweep_max_law_defect <= config.law_tol;
    let report = VerifyReport {
        passed,
        residual_tol: config.residual_tol,
        law_tol: config.law_tol,
        summary,
        duality,
        seed: config.seed,
        sweep_points: config.sweep,
        sweep_max_law_defect,
    };
    let mut out = Outcome::new();
    out.say(format!(
        "{} {} alpha {}: max |R| {:.3e}, max |R~| {:.3e}, max law defect {:.3e}",
        if passed { "PASS" } else { "FAIL" },
        surface.label(),
        config.alpha,
        report.summary.max_abs_r,
        report.duality.max_abs_residual_image,
        report.duality.max_law_defect,
    ));
    out.emit(config.output_path(&config.emit_json, "verify.json", false), json(&report)?);
    if config.emit_csv.is_some() {
        out.emit(config.output_path(&config.emit_csv, "residuals.csv", false), residual_csv(&mesh));
    }
    out.status = if passed { Status::Success } else { Status::Failed };
    Ok(out)
}

fn report(config: &RunConfig) -> Result<Outcome, CliError> {
    let spec = surface_spec(config)?;
    let surface = spec.build()?;
    let mesh = sample_grid_masked(&surface, config.resolution, config.alpha, config.origin_ball)?;
    let summary = residual_summary(&mesh);
    let mut out = Outcome::new();
    out.say(format!(
        "report: {} alpha {}: max |R| {:.3e}, mean |R| {:.3e}, valid {}, masked {}",
        surface.label(),
        summary.alpha,
        summary.max_abs_r,
        summary.mean_abs_r,
        summary.valid_points,
        summary.masked_points
    ));
    out.emit(config.output_path(&config.emit_csv, "residuals.csv", true), residual_csv(&mesh));
    out.emit(config.output_path(&config.emit_json, "summary.json", true), json(&summary)?);
    Ok(out)
}

fn section(config: &RunConfig) -> Result<Outcome, CliError> {
    let spec = surface_spec(config)?;
    let surface = spec.build()?;
    let mesh = sample_grid_masked(&surface, config.resolution, config.alpha, config.origin_ball)?;
    let plane = Plane::new(v3(&config.plane_normal), config.plane_offset)?;
    let section = cross_section(&mesh, &plane, config.section_tol)?;
    let mut out = Outcome::new();
    out.say(format!(
        "section: {}: {} polyline(s), {} points",
        surface.label(),
        section.polylines.len(),
        section.point_count()
    ));
    if let Some(normal) = &config.mirror_normal {
        let mirror = Plane::new(v3(normal), 0.0)?;
        out.say(format!("asymmetry {:.3e}", section.reflection_asymmetry(&mirror)));
    }
    out.emit(config.output_path(&config.emit_csv, "section.csv", true), section_csv(&section));
    if config.emit_json.is_some() {
        out.emit(config.output_path(&config.emit_json, "section.json", false), json(&section)?);
    }
    Ok(out)
}
