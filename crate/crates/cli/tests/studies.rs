mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use num_complex::Complex64;

use esr_cli::{emit_field_map, run_study, StudyKind, StudySpec};
use esr_core::field::FieldSample;
use esr_core::geom::Vec3;

use common::{edited, scene_path};

fn esrsim(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_esrsim"))
        .args(args)
        .output()
        .unwrap()
}

fn stderr_json(out: &std::process::Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.lines().last().unwrap_or(""))
        .unwrap_or_else(|_| panic!("not JSON: {text}"))
}

fn data_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(str::to_string)
        .collect()
}

#[test]
fn field_map_has_a_header_and_one_row_per_sample() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.csv");
    let b = [
        Complex64::new(1e-6, -2e-7),
        Complex64::new(0.0, 0.0),
        Complex64::new(3e-9, 0.0),
    ];
    let samples = [
        FieldSample::magnetic(Vec3::new(0.0, 1e-7, 5e-9), b),
        FieldSample::electric(Vec3::new(1e-7, 1e-7, 5e-9), b),
    ];
    emit_field_map(&samples, &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| l.split(',').count() == 15));
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(&first[..5], &[0.0, 1e-7, 5e-9, 1e-6, -2e-7]);
}

#[test]
fn empty_field_map_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.csv");
    assert!(emit_field_map(&[], &path).is_err());
    assert!(!path.exists());
}

#[test]
fn sweep_writes_one_touchstone_row_per_frequency() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = StudySpec::new(StudyKind::Sweep, scene_path("minimal_cps.json"), dir.path());
    spec.frequencies = Some(esr_core::netline::linear_frequencies(1e8, 1e10, 101));
    run_study(&spec).unwrap();
    let text = fs::read_to_string(dir.path().join("sweep.s1p")).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('!')).collect();
    assert_eq!(body[0], "# Hz S RI R 50");
    assert_eq!(body.len(), 102);
    for row in &body[1..] {
        let v: Vec<f64> = row.split_whitespace().map(|t| t.parse().unwrap()).collect();
        assert_eq!(v.len(), 3);
        assert!(v[1].hypot(v[2]) <= 1.0);
    }
    assert_eq!(data_rows(&dir.path().join("resistance.csv")).len(), 101);
}

#[test]
fn configuration_study_has_one_row_per_kind() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = StudySpec::new(
        StudyKind::CompareConfig,
        scene_path("minimal_cps.json"),
        dir.path(),
    );
    spec.terminal_current = Some(1e-3);
    run_study(&spec).unwrap();
    let rows = data_rows(&dir.path().join("compare_config.csv"));
    let labels: Vec<&str> = rows.iter().map(|r| r.split(',').next().unwrap()).collect();
    assert_eq!(labels, ["CPS", "CPW", "CPW_TO_CPS"]);
}

#[test]
fn zero_power_gives_zero_fields() {
    let dir = tempfile::tempdir().unwrap();
    let scene = scene_path("minimal_cps.json");
    let out = esrsim(&[
        "solve",
        "--scene",
        scene.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--pin=-inf",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in ["fields.csv", "field_map_cut.csv"] {
        let rows = data_rows(&dir.path().join(name));
        assert!(!rows.is_empty());
        for row in rows {
            assert!(
                row.split(',')
                    .skip(3)
                    .all(|v| v.parse::<f64>().unwrap() == 0.0),
                "{name}: {row}"
            );
        }
    }
}

#[test]
fn validate_reports_the_scene_contents() {
    let out = esrsim(&[
        "validate",
        "--scene",
        scene_path("minimal_cps.json").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["conductors"], 3);
    assert_eq!(v["ports"], 1);
}

#[test]
fn bad_input_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("unitless.json");
    fs::write(
        &path,
        edited(|v| v["line"]["length"] = serde_json::json!(5)),
    )
    .unwrap();
    let out = esrsim(&["validate", "--scene", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "unknown_unit");

    let out = esrsim(&["solve", "--scene", "x.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "usage");
}

#[test]
fn solver_rejection_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eps.json");
    fs::write(
        &path,
        edited(|v| v["settings"]["eps_eff"] = serde_json::json!(0.5)),
    )
    .unwrap();
    let out = esrsim(&[
        "solve",
        "--scene",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stderr_json(&out)["error"], "solver");
}

#[test]
fn unwritable_output_exits_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let scene = scene_path("minimal_cps.json");
    let out = esrsim(&[
        "sweep",
        "--scene",
        scene.to_str().unwrap(),
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stderr_json(&out)["error"], "io");

    let out = esrsim(&[
        "validate",
        "--scene",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
}
