//! Command-line flags. Each flag mirrors a [`RunConfig`] key; flags given on
//! the command line override the values of a `--config` file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use statsurf::config::{BjorlingSpec, SurfaceKind, SurfaceSpec};
use statsurf::{Domain, Interval};

use crate::{CliError, Command, RunConfig, Suite};

#[derive(Debug, Parser)]
#[command(name = "statsurf", version, about = "Alpha-stationary surfaces: residuals, inversion, Björling strips, meshes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Sample a surface and write it as OBJ.
    Generate(Flags),
    /// Invert a surface in the unit sphere and write the image as OBJ.
    Invert(Flags),
    /// Solve a Björling problem and write the strip as OBJ.
    Bjorling(Flags),
    /// Check stationarity and the inversion duality, or run a named suite.
    Verify(Flags),
    /// Write the residual CSV and its JSON summary.
    Report(Flags),
    /// Cut the sampled surface with a plane and write the polylines.
    Section(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum SurfaceName {
    Plane,
    SphereCentered,
    SphereOrigin,
    Catenoid,
    Helicoid,
    Ellipsoid,
}

fn parse_vec3(text: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got '{text}'"));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part.parse().map_err(|e| format!("'{part}': {e}"))?;
    }
    Ok(out)
}

fn parse_pair<T: std::str::FromStr>(text: &str, sep: &[char]) -> Result<(T, T), String>
where
    T::Err: std::fmt::Display,
{
    let mut parts = text.splitn(2, sep);
    let (Some(a), Some(b)) = (parts.next(), parts.next()) else {
        return Err(format!("expected two values, got '{text}'"));
    };
    let a = a.trim().parse().map_err(|e| format!("'{a}': {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("'{b}': {e}"))?;
    Ok((a, b))
}

fn parse_resolution(text: &str) -> Result<(usize, usize), String> {
    parse_pair(text, &['x', 'X', ','])
}

fn parse_range(text: &str) -> Result<(f64, f64), String> {
    parse_pair(text, &[','])
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON run config; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads for sampling and quadrature.
    #[arg(long)]
    pub threads: Option<usize>,

    #[arg(long, value_enum)]
    pub surface: Option<SurfaceName>,
    /// Sphere radius.
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// Catenoid neck radius.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub pitch: Option<f64>,
    /// Plane normal `x,y,z`.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub normal: Option<[f64; 3]>,
    /// Plane offset along the normal.
    #[arg(long, allow_hyphen_values = true)]
    pub offset: Option<f64>,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub center: Option<[f64; 3]>,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub axis: Option<[f64; 3]>,
    /// Direction of the centre of a sphere through the origin.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub direction: Option<[f64; 3]>,
    #[arg(long, value_parser = parse_vec3)]
    pub semi_axes: Option<[f64; 3]>,
    /// Parameter range `min,max` of the first axis (keeps its periodicity).
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub u_range: Option<(f64, f64)>,
    /// Parameter range `min,max` of the second axis.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub v_range: Option<(f64, f64)>,
    /// Use the image of the surface under inversion.
    #[arg(long)]
    pub inverted: bool,

    /// Björling preset: mobius, catenoid or disc.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub strip_halfwidth: Option<f64>,
    #[arg(long)]
    pub stationary: bool,
    #[arg(long, value_parser = parse_resolution)]
    pub bjorling_grid: Option<(usize, usize)>,
    #[arg(long)]
    pub check_holonomy: bool,

    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Grid `NxM`.
    #[arg(long, value_parser = parse_resolution)]
    pub resolution: Option<(usize, usize)>,
    #[arg(long)]
    pub residual_tol: Option<f64>,
    #[arg(long)]
    pub law_tol: Option<f64>,
    #[arg(long)]
    pub origin_ball: Option<f64>,

    /// Output directory; defaults to $STATSURF_OUT_DIR.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub emit_obj: Option<PathBuf>,
    #[arg(long)]
    pub emit_csv: Option<PathBuf>,
    #[arg(long)]
    pub emit_json: Option<PathBuf>,

    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub plane_normal: Option<[f64; 3]>,
    #[arg(long, allow_hyphen_values = true)]
    pub plane_offset: Option<f64>,
    #[arg(long)]
    pub section_tol: Option<f64>,
    /// Report the section's asymmetry under reflection in this plane.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub mirror_normal: Option<[f64; 3]>,

    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub sweep: Option<usize>,
}

fn default_kind(name: SurfaceName) -> SurfaceKind {
    let e3 = [0.0, 0.0, 1.0];
    match name {
        SurfaceName::Plane => SurfaceKind::Plane { normal: e3, offset: 0.0 },
        SurfaceName::SphereCentered => SurfaceKind::SphereCentered { r: 1.0 },
        SurfaceName::SphereOrigin => SurfaceKind::SphereOrigin { r: 1.0, direction: e3 },
        SurfaceName::Catenoid => SurfaceKind::Catenoid {
            c: 1.0,
            center: [0.0; 3],
            axis: e3,
        },
        SurfaceName::Helicoid => SurfaceKind::Helicoid { pitch: 1.0 },
        SurfaceName::Ellipsoid => SurfaceKind::Ellipsoid {
            semi_axes: [1.0, 1.0, 1.0],
            center: [0.0; 3],
        },
    }
}

fn set<T: Copy>(slot: &mut T, value: Option<T>, used: &mut Vec<&'static str>, name: &'static str) {
    if let Some(v) = value {
        *slot = v;
        used.push(name);
    }
}

impl Flags {
    /// Applies the surface parameter flags to `kind`; a flag that the kind
    /// does not have is a config error.
    fn apply_params(&self, kind: &mut SurfaceKind) -> Result<(), CliError> {
        let mut used = Vec::new();
        match kind {
            SurfaceKind::Plane { normal, offset } => {
                set(normal, self.normal, &mut used, "normal");
                set(offset, self.offset, &mut used, "offset");
            }
            SurfaceKind::SphereCentered { r } => set(r, self.r, &mut used, "r"),
            SurfaceKind::SphereOrigin { r, direction } => {
                set(r, self.r, &mut used, "r");
                set(direction, self.direction, &mut used, "direction");
            }
            SurfaceKind::Catenoid { c, center, axis } => {
                set(c, self.c, &mut used, "c");
                set(center, self.center, &mut used, "center");
                set(axis, self.axis, &mut used, "axis");
            }
            SurfaceKind::Helicoid { pitch } => set(pitch, self.pitch, &mut used, "pitch"),
            SurfaceKind::Ellipsoid { semi_axes, center } => {
                set(semi_axes, self.semi_axes, &mut used, "semi-axes");
                set(center, self.center, &mut used, "center");
            }
            SurfaceKind::Weierstrass { .. } | SurfaceKind::Bjorling { .. } => {}
        }
        let given = [
            ("r", self.r.is_some()),
            ("c", self.c.is_some()),
            ("pitch", self.pitch.is_some()),
            ("normal", self.normal.is_some()),
            ("offset", self.offset.is_some()),
            ("center", self.center.is_some()),
            ("axis", self.axis.is_some()),
            ("direction", self.direction.is_some()),
            ("semi-axes", self.semi_axes.is_some()),
        ];
        for (name, present) in given {
            if present && !used.contains(&name) {
                return Err(CliError::Config(format!("--{name} does not apply to {}", kind.name())));
            }
        }
        Ok(())
    }

    fn has_surface_params(&self) -> bool {
        self.r.is_some()
            || self.c.is_some()
            || self.pitch.is_some()
            || self.normal.is_some()
            || self.offset.is_some()
            || self.center.is_some()
            || self.axis.is_some()
            || self.direction.is_some()
            || self.semi_axes.is_some()
            || self.u_range.is_some()
            || self.v_range.is_some()
            || self.inverted
    }

    fn apply_surface(&self, config: &mut RunConfig) -> Result<(), CliError> {
        let mut spec = match (self.surface, config.surface.take()) {
            (Some(name), Some(existing)) if existing.kind.name() == default_kind(name).name() => existing,
            (Some(name), _) => SurfaceSpec::from(default_kind(name)),
            (None, Some(existing)) => existing,
            (None, None) if self.has_surface_params() => {
                return Err(CliError::Config("surface parameters given without --surface".into()));
            }
            (None, None) => return Ok(()),
        };
        self.apply_params(&mut spec.kind)?;
        if self.u_range.is_some() || self.v_range.is_some() {
            let base = match spec.domain {
                Some(d) => d,
                None => *spec.kind.build()?.domain(),
            };
            let axis = |old: Interval, range: Option<(f64, f64)>| match range {
                Some((min, max)) => Interval { min, max, periodic: old.periodic },
                None => old,
            };
            spec.domain = Some(Domain::new(axis(base.u, self.u_range), axis(base.v, self.v_range)));
        }
        spec.inverted |= self.inverted;
        config.surface = Some(spec);
        Ok(())
    }

    pub fn into_config(self, command: Command) -> Result<(RunConfig, Option<usize>), CliError> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::new(command),
        };
        config.command = command;
        self.apply_surface(&mut config)?;

        if let Some(name) = &self.preset {
            config.bjorling = Some(BjorlingSpec::Preset {
                name: name.clone(),
                strip_halfwidth: self.strip_halfwidth,
            });
        } else if let Some(tau) = self.strip_halfwidth {
            match config.bjorling.as_mut() {
                Some(
                    BjorlingSpec::Preset { strip_halfwidth, .. }
                    | BjorlingSpec::Coefficients { strip_halfwidth, .. }
                    | BjorlingSpec::Samples { strip_halfwidth, .. },
                ) => *strip_halfwidth = Some(tau),
                None => return Err(CliError::Config("--strip-halfwidth needs Björling data".into())),
            }
        }
        config.stationary |= self.stationary;
        config.check_holonomy |= self.check_holonomy;
        macro_rules! over {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field.clone() {
                    config.$field = v;
                }
            )*};
        }
        over!(alpha, resolution, bjorling_grid, residual_tol, law_tol, origin_ball, plane_normal, plane_offset, section_tol, seed, sweep);
        macro_rules! over_opt {
            ($($field:ident),*) => {$(
                if self.$field.is_some() {
                    config.$field = self.$field.clone();
                }
            )*};
        }
        over_opt!(out_dir, emit_obj, emit_csv, emit_json, mirror_normal, suite);
        config.validate()?;
        Ok((config, self.threads))
    }
}

impl Cli {
    pub fn into_config(self) -> Result<(RunConfig, Option<usize>), CliError> {
        let (command, flags) = match self.command {
            CommandArgs::Generate(f) => (Command::Generate, f),
            CommandArgs::Invert(f) => (Command::Invert, f),
            CommandArgs::Bjorling(f) => (Command::Bjorling, f),
            CommandArgs::Verify(f) => (Command::Verify, f),
            CommandArgs::Report(f) => (Command::Report, f),
            CommandArgs::Section(f) => (Command::Section, f),
        };
        flags.into_config(command)
    }
}
