use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ncosc::harness::{self, parse_values, sweep_rows, ExperimentConfig};
use ncosc::Error;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn ncosc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncosc")).args(args).output().expect("binary runs")
}

fn minimal() -> ExperimentConfig {
    ExperimentConfig::load(&configs().join("minimal.toml")).unwrap()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn shipped_configs_load_and_round_trip() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap(), cfg);
    }
}

#[test]
fn commutative_ground_state_saturates_heisenberg() {
    let data = harness::compute(&minimal()).unwrap();
    for r in &data.analyses[0].records {
        assert!((r.prod_xpx - 0.5).abs() < 1e-12, "{}", r.prod_xpx);
    }
    assert!(data.ep_rows.iter().all(|r| (r[1] - 1.0).abs() < 1e-12));
}

#[test]
fn run_writes_csvs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncosc(&["run", configs().join("exponential.toml").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(dir.path());
    assert_eq!(m["status"], "ok");
    assert_eq!(m["ep"]["method"], "chiellini_exponential");
    assert!(m["ep"]["max_residual"].as_f64().unwrap() < m["ep"]["residual_tolerance"].as_f64().unwrap());
    for f in m["files"].as_array().unwrap() {
        assert!(dir.path().join(f.as_str().unwrap()).exists());
    }
    let csv = std::fs::read_to_string(dir.path().join("analysis_2_squeezed_opt_xpx.csv")).unwrap();
    assert!(csv.lines().next().unwrap().ends_with(",beta"));
    assert_eq!(csv.lines().count(), 82);
    assert!(!csv.contains('\r'));
}

#[test]
fn numeric_run_stays_under_residual_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncosc(&["ep-solve", configs().join("sinusoidal.toml").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ep = &manifest(dir.path())["ep"];
    assert_eq!(ep["method"], "numeric");
    assert!(ep["max_residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn past_cutoff_is_a_validation_error() {
    let text = std::fs::read_to_string(configs().join("exponential.toml")).unwrap().replace("stop = 0.8", "stop = 1.5");
    let err = ExperimentConfig::from_toml_str(&text).unwrap_err();
    assert!(err.to_string().contains("t_c"), "{err}");
    assert_eq!(err.exit_code(), 1);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("past.toml");
    std::fs::write(&path, text).unwrap();
    let out = ncosc(&["run", path.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t_c"));
}

#[test]
fn unknown_field_names_its_line() {
    let text = std::fs::read_to_string(configs().join("minimal.toml")).unwrap().replace("points = 11", "points = 11\nponits = 3");
    let err = ExperimentConfig::from_toml_str(&text).unwrap_err();
    let Error::Config { path, msg } = &err else { panic!("{err:?}") };
    let line = text.lines().position(|l| l.starts_with("ponits")).unwrap() + 1;
    assert!(path.contains(&format!("line {line}")), "{path}");
    assert!(msg.contains("ponits"), "{msg}");
}

#[test]
fn squeezed_needs_exactly_one_of_beta_or_optimize() {
    let text = std::fs::read_to_string(configs().join("minimal.toml")).unwrap() + "\n[[analysis]]\nkind = \"squeezed\"\n";
    assert!(matches!(ExperimentConfig::from_toml_str(&text), Err(Error::Config { .. })));
}

#[test]
fn ep_failure_leaves_a_failed_manifest() {
    let mut cfg = ExperimentConfig::load(&configs().join("sinusoidal.toml")).unwrap();
    cfg.ep.ics = Some((1e-9, 0.0));
    let dir = tempfile::tempdir().unwrap();
    let err = harness::run(&cfg, dir.path()).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let m = manifest(dir.path());
    assert_eq!(m["status"], "failed");
    assert!(m["error"].as_str().unwrap().contains("collapsed"));
    assert!(m["ep"].is_null());
}

#[test]
fn sweep_parallel_matches_sequential() {
    let cfg = ExperimentConfig::load(&configs().join("sinusoidal.toml")).unwrap();
    let cfg = ExperimentConfig { t_grid: harness::TimeGrid { points: 21, ..cfg.t_grid }, ..cfg };
    let values = parse_values("0.25,0.5,0.75,1.0").unwrap();
    let par = sweep_rows(&cfg, "analysis.2.s", &values, true).unwrap();
    let seq = sweep_rows(&cfg, "analysis.2.s", &values, false).unwrap();
    assert_eq!(par.len(), 4 * 21);
    assert!(par.iter().all(|r| r.status == "ok"));
    assert_eq!(par, seq);
}

#[test]
fn sweep_keeps_going_past_failures() {
    // stop = 2 lies past the cutoff; the other values still run
    let cfg = ExperimentConfig::load(&configs().join("exponential.toml")).unwrap();
    let rows = sweep_rows(&cfg, "t_grid.stop", &[0.5, 2.0, 0.7], true).unwrap();
    let failed: Vec<_> = rows.iter().filter(|r| r.status != "ok").collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0].value, 2.0);
    assert!(failed[0].status.contains("t_c"));
}

#[test]
fn sweep_rejects_bad_input() {
    let cfg = minimal();
    assert!(parse_values(" ").is_err());
    assert!(sweep_rows(&cfg, "t_grid.points", &[], true).is_err());
    assert!(sweep_rows(&cfg, "t_grid.nope.x", &[1.0], true).is_err());
    assert!(sweep_rows(&cfg, "t_grid.points", &[2.5], true).is_err());

    let out = ncosc(&["sweep", configs().join("minimal.toml").to_str().unwrap(), "--param", "t_grid.stop", "--values", ""]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_cli_writes_wide_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncosc(&[
        "sweep",
        configs().join("minimal.toml").to_str().unwrap(),
        "--param",
        "t_grid.points",
        "--values",
        "2..4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("value,t,status,a0_"));
    assert_eq!(lines.count(), 2 + 3 + 4);
}

#[test]
fn figure_rejects_unknown_id() {
    let out = ncosc(&["figure", "fig9", "--out", tempfile::tempdir().unwrap().path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn check_subcommand_passes() {
    let out = ncosc(&["check"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 9);
}
