use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gaugefin(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gaugefin"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr)
        .unwrap_or_else(|_| panic!("{}", String::from_utf8_lossy(&out.stderr)))
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn price_default_matches_closed_form() {
    let r = report(&gaugefin(&["price", "--canonical"], &[]));
    let body = &r["report"];
    assert!(body["relative_error"].as_f64().unwrap().abs() < 1e-3);
    assert!((body["closed_form"].as_f64().unwrap() - 7.9656).abs() < 1e-3);
    let prov = &r["provenance"];
    assert!(prov["config_hash"].as_str().unwrap().len() == 64);
    assert!(prov.get("timestamp").is_none());
}

#[test]
fn timestamps_only_outside_canonical_mode() {
    let r = report(&gaugefin(&["price"], &[]));
    assert!(r["provenance"]["timestamp"].as_u64().is_some());
}

#[test]
fn canonical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.toml",
        "[simulate]\nn_assets = 8\nn_paths = 300\nseed = 9\n\n[riskfree]\nsizes = [1, 2, 4, 8]\n",
    );
    let a = gaugefin(&["simulate", "-c", &cfg, "--canonical"], &[]);
    let b = gaugefin(&["simulate", "-c", &cfg, "--canonical"], &[]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.toml",
        "[simulate]\nn_assets = 64\nn_paths = 500\nsteps = 4\n\n[riskfree]\nsizes = [4, 8, 16, 32, 64]\n",
    );
    let one = gaugefin(
        &["riskfree", "-c", &cfg, "--canonical"],
        &[("GAUGEFIN_THREADS", "1")],
    );
    let eight = gaugefin(
        &["riskfree", "-c", &cfg, "--canonical"],
        &[("GAUGEFIN_THREADS", "8")],
    );
    assert!(
        one.status.success(),
        "{}",
        String::from_utf8_lossy(&one.stderr)
    );
    assert_eq!(one.stdout, eight.stdout);
    let bad = gaugefin(&["price"], &[("GAUGEFIN_THREADS", "zero")]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn gauge_on_constant_prices_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("date,a,b,c\n");
    for d in 1..=20 {
        csv.push_str(&format!("2020-01-{d:02},3.5,1.25,80\n"));
    }
    let panel = write(dir.path(), "flat.csv", &csv);
    let r = report(&gaugefin(&["gauge", "--panel", &panel, "--canonical"], &[]));
    let a = r["report"]["a"].as_array().unwrap();
    assert_eq!(a.len(), 19);
    assert!(a.iter().all(|v| v.as_f64().unwrap() == 0.0));
}

#[test]
fn bad_panel_reports_coordinates_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let panel = write(
        dir.path(),
        "bad.csv",
        "date,a\n2020-01-01,1\n2020-01-02,-2\n",
    );
    let out = gaugefin(&["gauge", "--panel", &panel], &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = error_of(&out);
    assert_eq!(err["error"]["kind"], "input");
    assert!(err["error"]["message"]
        .as_str()
        .unwrap()
        .contains("row 2, column 2"));
}

#[test]
fn usage_and_config_errors_exit_1() {
    assert_eq!(gaugefin(&["frobnicate"], &[]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[pde]\nno_such_key = 1\n");
    let out = gaugefin(&["price", "-c", &cfg], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_of(&out)["error"]["exit_code"], 1);
}

#[test]
fn computation_errors_exit_2() {
    // an unnormalized panel fails inside the discount pipeline
    let dir = tempfile::tempdir().unwrap();
    let panel = write(
        dir.path(),
        "raw.csv",
        "date,a,usd#cash\n2020-01-01,5,1\n2020-01-08,6,1\n2020-01-15,7,1\n",
    );
    let out = gaugefin(&["discount", "--panel", &panel], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_of(&out)["error"]["message"]
        .as_str()
        .unwrap()
        .contains("inception"));
}

#[test]
fn every_subcommand_runs_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let exported = dir.path().join("sim.csv");
    let exported = exported.to_string_lossy();
    for args in [
        vec!["simulate", "--export-panel", &exported],
        vec!["gauge"],
        vec!["riskfree"],
        vec!["price"],
        vec!["discount"],
        vec!["sensitivity"],
    ] {
        let out_path = dir.path().join(format!("{}.json", args[0]));
        let out_str = out_path.to_string_lossy().into_owned();
        let mut full = args.clone();
        full.extend(["-o", &out_str]);
        let out = gaugefin(&full, &[]);
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let file = gaugefin::io::ReportFile::read(&out_path).unwrap();
        assert_eq!(file.command, args[0]);
        assert_eq!(
            file.to_json().unwrap(),
            std::fs::read_to_string(&out_path).unwrap()
        );
    }
    let r = report(&gaugefin(
        &["gauge", "--panel", &exported, "--canonical"],
        &[],
    ));
    assert!(r["report"]["round_trip_max_abs_a"].as_f64().unwrap() < 1e-12);
}
