use std::path::{Path, PathBuf};
use std::process::Command;

use lightfront::output::{read_grid, GridRow, OutputFormat};
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_lightfront");

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lightfront-e2e-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into(), String::from_utf8_lossy(&out.stderr).into())
}

fn run_config(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> (i32, String, String) {
    let mut args = vec![cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn grid(path: &Path, format: OutputFormat) -> Vec<GridRow> {
    read_grid(std::fs::File::open(path).unwrap(), format).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

/// Writes `edit` applied to a sample config into `dir`.
fn edited(name: &str, dir: &Path, edit: impl FnOnce(&mut Value)) -> PathBuf {
    let mut doc = json(&configs().join(name));
    edit(&mut doc);
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_vec_pretty(&doc).unwrap()).unwrap();
    path
}

#[test]
fn lone_charge_moves_in_a_straight_line() {
    let dir = scratch("line");
    let (code, _, err) = run_config("simulate", &configs().join("straight_line.json"), &dir, &[]);
    assert_eq!(code, 0, "{err}");
    let mut reader = csv::Reader::from_path(dir.join("trajectory_0.csv")).unwrap();
    let mut rows = 0;
    for rec in reader.records() {
        let r: Vec<f64> = rec.unwrap().iter().map(|s| s.parse().unwrap()).collect();
        let (t, qx, px) = (r[0], r[1], r[4]);
        assert!((qx - 0.5 * t).abs() < 1e-12, "q = {qx} at t = {t}");
        assert!((px - 0.5 / 0.75f64.sqrt()).abs() < 1e-12);
        assert!(r[2] == 0.0 && r[3] == 0.0);
        rows += 1;
    }
    assert_eq!(rows, 201);
    let events = json(&dir.join("events.json"));
    assert_eq!(events["halted"], false);
    let manifest = json(&dir.join("manifest.json"));
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn csv_and_json_grids_agree() {
    let dir = scratch("formats");
    let config = configs().join("kicked_charge_field.json");
    assert_eq!(run_config("evaluate-field", &config, &dir.join("csv"), &[]).0, 0);
    assert_eq!(run_config("evaluate-field", &config, &dir.join("json"), &["--format", "json"]).0, 0);
    let a = grid(&dir.join("csv/field.csv"), OutputFormat::Csv);
    let b = grid(&dir.join("json/field.jsonl"), OutputFormat::Json);
    assert_eq!(a.len(), 21 * 21);
    assert_eq!(a, b);
}

#[test]
fn point_on_an_uncancelled_front_exits_two() {
    let dir = scratch("front");
    let on_front = |policy: &'static str| {
        move |doc: &mut Value| {
            doc["field"]["grid"] = serde_json::json!({ "points": [[0.0, 1.0, 0.0], [0.0, 0.5, 0.0]] });
            doc["field"]["on_front"] = policy.into();
        }
    };
    let config = edited("kicked_charge_field.json", &dir, on_front("error"));
    let (code, _, _) = run_config("evaluate-field", &config, &dir.join("error"), &[]);
    assert_eq!(code, 2);
    let events = json(&dir.join("error/events.json"));
    assert_eq!(events[0]["kind"], "singular_front");

    let config = edited("kicked_charge_field.json", &dir, on_front("report"));
    let (code, _, err) = run_config("evaluate-field", &config, &dir.join("report"), &[]);
    assert_eq!(code, 0, "{err}");
    let rows = grid(&dir.join("report/field.csv"), OutputFormat::Csv);
    assert!(rows[0].shell_count > 0);
    assert_eq!(rows[1].region, "inside");
}

#[test]
fn si_document_reproduces_coulomb() {
    let dir = scratch("si");
    let (code, _, err) = run_config("evaluate-field", &configs().join("coulomb_si.json"), &dir, &[]);
    assert_eq!(code, 0, "{err}");
    let k = 1.0 / (4.0 * std::f64::consts::PI * 8.8541878128e-12);
    for row in grid(&dir.join("field.csv"), OutputFormat::Csv) {
        let r = (row.x * row.x + row.y * row.y + row.z * row.z).sqrt();
        let e = (row.ex * row.ex + row.ey * row.ey + row.ez * row.ez).sqrt();
        let oracle = k * 1.602176634e-19 / (r * r);
        assert!((e / oracle - 1.0).abs() < 1e-9, "{e} vs {oracle}");
    }
}

#[test]
fn frozen_initial_field_fails_the_check() {
    let dir = scratch("check");
    let (code, stdout, _) = run_config("check", &configs().join("frozen_aux_check.json"), &dir, &[]);
    assert_eq!(code, 3);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["compatible"], false);
    assert_eq!(json(&dir.join("check.json")), report);

    let config = edited("frozen_aux_check.json", &dir, |doc| doc["charges"][0]["initial_field"]["aux"] = "history".into());
    let (code, stdout, _) = run_config("check", &config, &dir.join("ok"), &[]);
    assert_eq!(code, 0, "{stdout}");
}

#[test]
fn scenarios_are_deterministic_and_replayable() {
    let dir = scratch("replay");
    let (code, _, _) = run(&["scenario", "retarded-line", "--out", dir.join("a").to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(run(&["scenario", "retarded-line", "--out", dir.join("b").to_str().unwrap()]).0, 2);
    let (code, _, _) = run_config("simulate", &dir.join("a/config.json"), &dir.join("c"), &[]);
    assert_eq!(code, 2);
    for file in ["trajectory_0.csv", "trajectory_1.csv", "forces.csv", "events.json", "report.json"] {
        let a = std::fs::read(dir.join("a").join(file)).unwrap();
        assert_eq!(a, std::fs::read(dir.join("b").join(file)).unwrap(), "{file}");
        assert_eq!(a, std::fs::read(dir.join("c").join(file)).unwrap(), "{file}");
    }
    let events = json(&dir.join("a/events.json"));
    assert_eq!(events["events"][0]["kind"], "front_crossing");
}

#[test]
fn free_plane_wave_propagates() {
    let dir = scratch("free");
    let (code, _, err) = run_config("propagate-free", &configs().join("plane_wave.json"), &dir, &[]);
    assert_eq!(code, 0, "{err}");
    let k = [1.0, 2.0, 2.0];
    let pol = [2.0 / 5f64.sqrt(), -1.0 / 5f64.sqrt(), 0.0];
    for row in grid(&dir.join("free.csv"), OutputFormat::Csv) {
        let c = (k[0] * row.x + k[1] * row.y + k[2] * row.z - 3.0 * row.t + 0.3).cos();
        let diff = [row.ex - pol[0] * c, row.ey - pol[1] * c, row.ez - pol[2] * c];
        assert!(diff.iter().all(|d| d.abs() < 1e-4), "{diff:?} at {row:?}");
    }
}

#[test]
fn configuration_errors_exit_one() {
    let dir = scratch("errors");
    assert_eq!(run(&["simulate", "--config", dir.join("absent.json").to_str().unwrap()]).0, 1);
    let config = edited("straight_line.json", &dir, |doc| doc["charges"][0]["spin"] = 1.into());
    let (code, _, err) = run_config("simulate", &config, &dir.join("out"), &[]);
    assert_eq!(code, 1);
    assert!(err.contains("spin"), "{err}");
    assert_eq!(run(&["scenario", "no-such-scenario", "--out", dir.join("s").to_str().unwrap()]).0, 1);
}
