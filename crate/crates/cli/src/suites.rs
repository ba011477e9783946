//! Named acceptance suites, each runnable as `statsurf verify --suite <name>`.
//!
//! Every suite prints one `PASS`/`FAIL` line per check and fails the run if
//! any check fails.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use statsurf::bjorling::{circle_data, mobius_preset, orientation_holonomy, schwarz_solve, solve_stationary_bjorling};
use statsurf::catalog::{make_catenoid, make_ellipsoid, make_helicoid, make_plane, make_sphere_centered, make_sphere_through_origin};
use statsurf::config::SurfaceKind;
use statsurf::energy::{energy, first_variation_check, Bump, EnergyQuadrature};
use statsurf::geometry::DEFAULT_RELATIVE_STEP;
use statsurf::inversion::{conjugated_translation, verify_duality};
use statsurf::mesh::{cross_section, sample_grid_masked, Plane};
use statsurf::{evaluate_jet, invert_point, invert_surface, Domain, Interval, ParametricSurface, Vec3};

use crate::{run, CliError, Command, Outcome, RunConfig, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    StationarySpheres,
    Duality,
    InvertedCatenoid,
    ConjugatedTranslation,
    PlaneSphere,
    BjorlingCatenoid,
    Mobius,
    Sections,
    Energy,
    Determinism,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::StationarySpheres,
        Suite::Duality,
        Suite::InvertedCatenoid,
        Suite::ConjugatedTranslation,
        Suite::PlaneSphere,
        Suite::BjorlingCatenoid,
        Suite::Mobius,
        Suite::Sections,
        Suite::Energy,
        Suite::Determinism,
    ];
}

struct Checks {
    out: Outcome,
}

impl Checks {
    fn new() -> Self {
        Checks { out: Outcome::new() }
    }

    fn check(&mut self, ok: bool, what: impl AsRef<str>) {
        self.out
            .say(format!("{} {}", if ok { "PASS" } else { "FAIL" }, what.as_ref()));
        if !ok {
            self.out.status = Status::Failed;
        }
    }

    fn finish(self) -> Outcome {
        self.out
    }
}

pub fn run_suite(suite: Suite, config: &RunConfig) -> Result<Outcome, CliError> {
    let mut c = Checks::new();
    match suite {
        Suite::StationarySpheres => stationary_spheres(&mut c)?,
        Suite::Duality => duality(&mut c)?,
        Suite::InvertedCatenoid => inverted_catenoid(&mut c)?,
        Suite::ConjugatedTranslation => translations(&mut c, config.seed)?,
        Suite::PlaneSphere => plane_sphere(&mut c)?,
        Suite::BjorlingCatenoid => bjorling_catenoid(&mut c)?,
        Suite::Mobius => mobius(&mut c)?,
        Suite::Sections => sections(&mut c)?,
        Suite::Energy => energies(&mut c)?,
        Suite::Determinism => determinism(&mut c, config)?,
    }
    Ok(c.finish())
}

fn residual_range(surface: &ParametricSurface, alpha: f64) -> Result<(f64, f64), CliError> {
    let mesh = sample_grid_masked(surface, (64, 64), alpha, 1e-8)?;
    Ok((mesh.min_abs_residual(), mesh.max_abs_residual()))
}

fn stationary_spheres(c: &mut Checks) -> Result<(), CliError> {
    let plane = make_plane(&Vec3::new(0.3, -0.5, 0.8), 0.0)?;
    for alpha in [-6.0, -4.0, -2.0, 0.0, 2.0] {
        let (_, max) = residual_range(&plane, alpha)?;
        c.check(max < 1e-10, format!("plane through 0, alpha {alpha}: max |R| {max:.2e}"));
    }
    let centered = make_sphere_centered(1.0)?;
    let (_, max) = residual_range(&centered, -2.0)?;
    c.check(max < 1e-10, format!("centered sphere, alpha -2: max |R| {max:.2e}"));
    for alpha in [0.0, -4.0] {
        let (min, _) = residual_range(&centered, alpha)?;
        c.check(min > 1e-3, format!("centered sphere, alpha {alpha}: min |R| {min:.3}"));
    }
    let through = make_sphere_through_origin(1.0, &Vec3::z())?;
    let (_, max) = residual_range(&through, -4.0)?;
    c.check(max < 1e-10, format!("sphere through 0, alpha -4: max |R| {max:.2e}"));
    let (min, _) = residual_range(&through, -2.0)?;
    c.check(min > 1e-3, format!("sphere through 0, alpha -2: min |R| {min:.3}"));
    Ok(())
}

/// Surfaces used for the duality law.
pub fn duality_surfaces() -> Result<Vec<ParametricSurface>, CliError> {
    Ok(vec![
        make_plane(&Vec3::z(), 0.5)?,
        make_catenoid(1.0, &Vec3::zeros(), &Vec3::z())?,
        make_catenoid(0.8, &Vec3::new(0.3, -0.4, 0.7), &Vec3::new(1.0, 1.0, 1.0))?,
        make_helicoid(1.0)?,
        make_ellipsoid(&Vec3::new(1.0, 1.5, 0.7), &Vec3::new(0.4, 0.0, -0.3))?,
    ])
}

fn duality(c: &mut Checks) -> Result<(), CliError> {
    for surface in duality_surfaces()? {
        for alpha in [0.0, -1.0, -2.0, -3.0] {
            let exact = verify_duality(&surface, alpha, (64, 64), 1e-10, 1e-3)?;
            let numeric = verify_duality(&surface.clone().without_exact_jet(), alpha, (64, 64), 1e-10, 1e-3)?;
            c.check(
                exact.max_law_defect < 1e-6 && numeric.max_law_defect < 1e-4,
                format!(
                    "{} alpha {alpha}: law defect {:.2e} exact, {:.2e} numeric",
                    surface.label(),
                    exact.max_law_defect,
                    numeric.max_law_defect
                ),
            );
        }
    }
    Ok(())
}

/// Catenoid with neck on the unit circle, long enough that its inversion
/// reaches into the `1e-3` ball around the origin.
pub fn long_catenoid(center: Vec3, height: f64) -> Result<ParametricSurface, CliError> {
    Ok(make_catenoid(1.0, &center, &Vec3::z())?.with_domain(Domain::new(Interval::turn(), Interval::new(-height, height))))
}

fn inverted_catenoid(c: &mut Checks) -> Result<(), CliError> {
    let surface = invert_surface(&long_catenoid(Vec3::zeros(), 8.0)?);
    let mesh = sample_grid_masked(&surface, (64, 64), -4.0, 1e-3)?;
    let max = mesh.max_abs_residual();
    c.check(
        max < 1e-6 && mesh.masked_count() > 0,
        format!("inverted catenoid, alpha -4: max |R| {max:.2e}, {} points masked", mesh.masked_count()),
    );
    Ok(())
}

fn translations(c: &mut Checks, seed: u64) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut count = 0;
    while count < 1000 {
        let p = Vec3::from_fn(|_, _| rng.random_range(-2.0..2.0));
        let v = Vec3::from_fn(|_, _| rng.random_range(-2.0..2.0));
        if p.norm() < 1e-2 {
            continue;
        }
        let Ok(closed) = conjugated_translation(&p, &v) else {
            continue;
        };
        let composed = invert_point(&(invert_point(&p)? + v))?;
        worst = worst.max((closed - composed).norm() / closed.norm().max(1.0));
        count += 1;
    }
    c.check(worst < 1e-12, format!("1000 conjugated translations (seed {seed}): max relative gap {worst:.2e}"));
    Ok(())
}

/// Least-squares sphere through `points`: `|x|^2 = 2 <c, x> + (R^2 - |c|^2)`.
pub fn fit_sphere(points: &[Vec3]) -> (Vec3, f64, f64) {
    let a = DMatrix::from_fn(points.len(), 4, |i, j| if j < 3 { 2.0 * points[i][j] } else { 1.0 });
    let b = DVector::from_iterator(points.len(), points.iter().map(|p| p.norm_squared()));
    let x = a.svd(true, true).solve(&b, 1e-15).expect("svd solve");
    let center = Vec3::new(x[0], x[1], x[2]);
    let radius = (x[3] + center.norm_squared()).sqrt();
    let residual = points
        .iter()
        .map(|p| ((p - center).norm() - radius).abs())
        .fold(0.0, f64::max);
    (center, radius, residual)
}

fn plane_sphere(c: &mut Checks) -> Result<(), CliError> {
    for delta in [0.25, 0.5, 2.0] {
        let mut points = Vec::new();
        for i in 0..33 {
            for j in 0..33 {
                let (x, y) = (-4.0 + 0.25 * i as f64, -4.0 + 0.25 * j as f64);
                points.push(invert_point(&Vec3::new(x, y, delta))?);
            }
        }
        let (center, radius, residual) = fit_sphere(&points);
        let expected = 1.0 / (2.0 * delta);
        let gap = (center - Vec3::new(0.0, 0.0, expected)).norm().max((radius - expected).abs());
        c.check(
            residual < 1e-10 && gap < 1e-10,
            format!("plane z = {delta}: fit residual {residual:.2e}, center/radius gap {gap:.2e}"),
        );
    }
    Ok(())
}

fn bjorling_catenoid(c: &mut Checks) -> Result<(), CliError> {
    let data = circle_data(1.0, 0.0, |p| -p)?;
    let grid = (256, 33);
    let sol = schwarz_solve(&data, grid)?;
    let domain = *sol.surface.domain();
    let numeric = sol.surface.clone().without_exact_jet();
    let mut profile = 0.0f64;
    let mut harmonic = 0.0f64;
    for i in 0..grid.0 {
        for j in 1..grid.1 - 1 {
            let (s, t) = (domain.u.node(i, grid.0), domain.v.node(j, grid.1));
            let p = sol.surface.position(s, t);
            let rho = (p.x * p.x + p.y * p.y).sqrt();
            profile = profile.max((rho - p.z.cosh()).abs());
            let jet = evaluate_jet(&numeric, s, t, DEFAULT_RELATIVE_STEP)?;
            harmonic = harmonic.max((jet.xuu + jet.xvv).norm());
        }
    }
    c.check(profile < 1e-4, format!("catenoid profile deviation {profile:.2e}"));
    c.check(sol.boundary_defect < 1e-7, format!("X(s, 0) = alpha: {:.2e}", sol.boundary_defect));
    c.check(sol.normal_defect < 1e-5, format!("normal = V: {:.2e}", sol.normal_defect));
    c.check(sol.max_abs_h < 1e-5, format!("max |H| {:.2e}", sol.max_abs_h));
    c.check(harmonic < 1e-6, format!("harmonicity defect {harmonic:.2e}"));
    Ok(())
}

fn mobius(c: &mut Checks) -> Result<(), CliError> {
    let data = mobius_preset();
    let minimal = schwarz_solve(&data, (256, 33))?;
    let h_min = orientation_holonomy(&minimal.surface, 0.0)?;
    c.check(h_min == -1, format!("minimal Möbius strip holonomy {h_min}"));
    let sol = solve_stationary_bjorling(&data, (256, 33))?;
    let mesh = sample_grid_masked(&sol.surface, (256, 33), -4.0, 1e-3)?;
    let max = mesh.max_abs_residual();
    c.check(max < 1e-4, format!("-4-stationary Möbius strip: max |R| {max:.2e}"));
    c.check(sol.boundary_defect < 1e-7, format!("contains alpha: {:.2e}", sol.boundary_defect));
    let h_st = orientation_holonomy(&sol.surface, 0.0)?;
    c.check(h_st == -1, format!("-4-stationary Möbius strip holonomy {h_st}"));
    Ok(())
}

/// Largest reflection asymmetry (in `x -> -x`) of the `y = 0` section of an
/// inverted catenoid with the given neck centre.
pub fn section_asymmetry(center: Vec3) -> Result<f64, CliError> {
    let surface = invert_surface(&long_catenoid(center, 3.0)?);
    let mesh = sample_grid_masked(&surface, (128, 65), -4.0, 1e-3)?;
    let section = cross_section(&mesh, &Plane::new(Vec3::y(), 0.0)?, 1e-9)?;
    Ok(section.reflection_asymmetry(&Plane::new(Vec3::x(), 0.0)?))
}

fn sections(c: &mut Checks) -> Result<(), CliError> {
    let centered = section_asymmetry(Vec3::zeros())?;
    c.check(centered < 1e-3, format!("axis through 0: asymmetry {centered:.2e}"));
    let offset = section_asymmetry(Vec3::new(-0.5, 0.0, 0.0))?;
    c.check(offset > 1e-2, format!("axis through (-1/2, 0, 0): asymmetry {offset:.2e}"));
    Ok(())
}

fn energies(c: &mut Checks) -> Result<(), CliError> {
    let quad = EnergyQuadrature::new(10, 8, 8)?;
    let four_pi = 4.0 * PI;
    let e0 = energy(&make_sphere_centered(1.0)?, 0.0, &quad)?;
    c.check((e0 - four_pi).abs() < 1e-6, format!("E_0(unit sphere) - 4 pi = {:.2e}", e0 - four_pi));
    for r in [0.5, 1.0, 2.0] {
        let e = energy(&make_sphere_centered(r)?, -2.0, &quad)?;
        c.check((e - four_pi).abs() < 1e-6, format!("E_-2(sphere r = {r}) - 4 pi = {:.2e}", e - four_pi));
    }
    let sphere = make_sphere_centered(1.0)?;
    let bump = Bump::new((1.0, 0.3), (0.8, 0.6));
    let e = energy(&sphere, -2.0, &quad)?;
    let d = first_variation_check(&sphere, -2.0, &bump, 1e-3, &quad)?;
    c.check(d.abs() < 1e-5 * e, format!("sphere, alpha -2: dE {d:.2e}"));
    let d = first_variation_check(&sphere, 0.0, &bump, 1e-3, &quad)?;
    c.check(d.abs() > 1e-3, format!("sphere, alpha 0: dE {d:.2e}"));
    let catenoid = make_catenoid(1.0, &Vec3::zeros(), &Vec3::z())?;
    let bump = Bump::new((2.0, 0.2), (1.0, 0.8));
    let e = energy(&catenoid, 0.0, &quad)?;
    let d = first_variation_check(&catenoid, 0.0, &bump, 1e-3, &quad)?;
    c.check(d.abs() < 1e-5 * e, format!("catenoid, alpha 0: dE {d:.2e}"));
    Ok(())
}

fn determinism(c: &mut Checks, config: &RunConfig) -> Result<(), CliError> {
    let mut cfg = RunConfig::new(Command::Verify);
    cfg.surface = Some(
        SurfaceKind::SphereOrigin {
            r: 1.0,
            direction: [0.0, 0.0, 1.0],
        }
        .into(),
    );
    cfg.alpha = -4.0;
    cfg.seed = config.seed;
    cfg.sweep = 64;
    cfg.out_dir = Some(config.output_dir().unwrap_or_else(|| ".".into()));
    cfg.emit_json = Some("verify.json".into());
    cfg.emit_csv = Some("residuals.csv".into());
    let first = run(&cfg)?;
    let second = run(&cfg)?;
    let same = first.artifacts == second.artifacts && first.artifacts.len() == 2;
    c.check(same, format!("two verify runs, {} artifacts byte-identical", first.artifacts.len()));
    Ok(())
}
