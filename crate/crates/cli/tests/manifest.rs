//! The invocations listed in the README, with their exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn statsurf(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_statsurf"))
        .args(args)
        .env("STATSURF_OUT_DIR", out)
        .current_dir(workspace_root())
        .output()
        .expect("run statsurf")
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn expect(args: &[&str], code: i32) -> String {
    let dir = tempfile::tempdir().unwrap();
    let out = statsurf(args, dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    assert_eq!(
        out.status.code(),
        Some(code),
        "statsurf {}\nstdout:\n{stdout}\nstderr:\n{}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    stdout
}

#[test]
fn every_suite_passes() {
    for suite in [
        "stationary-spheres",
        "duality",
        "inverted-catenoid",
        "conjugated-translation",
        "plane-sphere",
        "bjorling-catenoid",
        "mobius",
        "sections",
        "energy",
        "determinism",
    ] {
        let stdout = expect(&["verify", "--suite", suite], 0);
        assert!(stdout.lines().any(|l| l.starts_with("PASS")), "{suite}: {stdout}");
        assert!(!stdout.lines().any(|l| l.starts_with("FAIL")), "{suite}: {stdout}");
    }
}

#[test]
fn stationary_sphere_verifies_and_catenoid_does_not() {
    let stdout = expect(&["verify", "--surface", "sphere_origin", "--r", "1", "--alpha", "-4"], 0);
    assert!(stdout.starts_with("PASS"));
    let stdout = expect(&["verify", "--surface", "catenoid", "--alpha", "-2"], 1);
    assert!(stdout.starts_with("FAIL"));
}

#[test]
fn mobius_strip_writes_obj_and_reports_holonomy() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("mobius.obj");
    let out = statsurf(
        &["bjorling", "--preset", "mobius", "--emit-obj", obj.to_str().unwrap(), "--check-holonomy"],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("holonomy -1"));
    let text = std::fs::read_to_string(&obj).unwrap();
    assert!(text.lines().filter(|l| l.starts_with("v ")).count() > 1000);
    assert!(text.lines().any(|l| l.starts_with("f ")));
}

#[test]
fn stationary_mobius_from_flags() {
    let stdout = expect(&["bjorling", "--preset", "mobius", "--stationary", "--check-holonomy"], 0);
    assert!(stdout.contains("holonomy -1"));
}

#[test]
fn generate_invert_report_section() {
    expect(&["generate", "--surface", "helicoid", "--pitch", "0.5", "--emit-obj", "helicoid.obj"], 0);
    let stdout = expect(&["invert", "--surface", "catenoid", "--v-range=-8,8", "--emit-obj", "inv.obj"], 0);
    assert!(stdout.contains("alpha -4"), "{stdout}");
    expect(&["report", "--surface", "ellipsoid", "--semi-axes", "1,2,3", "--alpha", "0"], 0);
    let stdout = expect(
        &["section", "--surface", "catenoid", "--inverted", "--alpha", "-4", "--mirror-normal", "1,0,0"],
        0,
    );
    assert!(stdout.contains("asymmetry"), "{stdout}");
}

#[test]
fn example_configs_run() {
    expect(&["report", "--config", "configs/enneper.json"], 0);
    expect(&["generate", "--config", "configs/weierstrass_catenoid_inverted.json"], 0);
    expect(&["bjorling", "--config", "configs/helicoid_bjorling.json"], 0);
    let stdout = expect(&["bjorling", "--config", "configs/mobius_stationary.json"], 0);
    assert!(stdout.contains("holonomy -1"));
}

#[test]
fn configuration_errors_exit_with_two() {
    expect(&["verify", "--surface", "catenoid", "--r", "1"], 2);
    expect(&["verify", "--surface", "sphere_centered", "--r", "-1"], 2);
    expect(&["generate", "--config", "no/such/file.json"], 2);
}

#[test]
fn relative_outputs_follow_the_environment_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_statsurf"))
        .args(["generate", "--surface", "helicoid", "--emit-obj", "h.obj"])
        .env("STATSURF_OUT_DIR", dir.path())
        .current_dir(dir.path().parent().unwrap())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("h.obj").is_file());
}

/// `statsurf ...` lines from the README's example block and property table,
/// with the exit code noted in a trailing `# exit n` comment (0 otherwise).
fn readme_invocations() -> Vec<(Vec<String>, i32)> {
    let readme = std::fs::read_to_string(workspace_root().join("README.md")).unwrap();
    let mut out = Vec::new();
    for line in readme.lines() {
        let command = if let Some(rest) = line.strip_prefix("statsurf ") {
            rest
        } else if let Some(start) = line.find("`statsurf verify --suite") {
            let rest = &line[start + "`statsurf ".len()..];
            &rest[..rest.find('`').unwrap()]
        } else {
            continue;
        };
        let (args, comment) = command.split_once('#').unwrap_or((command, ""));
        let code = comment.trim().strip_prefix("exit ").map_or(0, |c| c.trim().parse().unwrap());
        out.push((args.split_whitespace().map(str::to_owned).collect(), code));
    }
    out
}

#[test]
fn readme_invocations_exit_as_documented() {
    let invocations = readme_invocations();
    assert!(invocations.len() >= 18, "{}", invocations.len());
    for (args, code) in invocations {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        if args[0] == "<generate|invert|bjorling|verify|report|section>" {
            continue;
        }
        expect(&args, code);
    }
}
