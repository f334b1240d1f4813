use std::path::Path;
use std::process::{Command, Output};

use nnavg::csv_io::read_panel_file;
use nnavg_core::cv::EvalReport;
use nnavg_core::pipeline::{ForecastRecord, Method};

fn nnavg(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nnavg")).args(args).arg("--out").arg(out).output().unwrap()
}

fn small_config(dir: &Path) -> String {
    let path = dir.join("small.toml");
    std::fs::write(
        &path,
        "t0 = 21\nt_train = 74\nmc_trials = 50\n[synth]\nn_series = 10\nseed = 5\n",
    )
    .unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn smoke_run_writes_every_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let out = tmp.path().join("out");
    let o = nnavg(&["run", "--config", &cfg, "--grid", "1,3", "--methods", "all"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "cv_report.json",
        "cv_scores.csv",
        "eval_report.json",
        "forecast_records.json",
        "forecasts.csv",
        "percentiles.csv",
        "models.json",
        "diagnostics.csv",
        "theory.json",
    ] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let records: Vec<ForecastRecord> =
        serde_json::from_slice(&std::fs::read(out.join("forecast_records.json")).unwrap()).unwrap();
    assert!(!records.is_empty());
    for r in records.iter().filter_map(|r| r.weights.as_ref()) {
        assert!((r.sum() - 1.0).abs() <= 1e-12);
    }
    let header = std::fs::read_to_string(out.join("forecasts.csv")).unwrap();
    assert!(header.starts_with("id,time,method,k,forecast,actual,q\n"));
    let diag = std::fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert!(diag.starts_with("id,time,stat,value\n") && diag.contains(",ari,"));
}

#[test]
fn ets_only_run_has_only_baseline_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let out = tmp.path().join("out");
    let o = nnavg(&["run", "--config", &cfg, "--methods", "ETS", "--no-diagnostics"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let eval: EvalReport = serde_json::from_slice(&std::fs::read(out.join("eval_report.json")).unwrap()).unwrap();
    assert!(!eval.entries.is_empty());
    assert!(eval.entries.iter().all(|e| e.method == Method::Ets && e.k.is_none()));
    let records: Vec<ForecastRecord> =
        serde_json::from_slice(&std::fs::read(out.join("forecast_records.json")).unwrap()).unwrap();
    assert!(records.iter().all(|r| r.method == Method::Ets && r.n_neighbors == 0));
    assert!(!out.join("diagnostics.csv").exists());
}

#[test]
fn synth_output_feeds_a_cv_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let data = tmp.path().join("data");
    assert!(nnavg(&["synth", "--config", &cfg], &data).status.success());
    let panel = read_panel_file(&data.join("panel.csv")).unwrap();
    assert_eq!(panel.len(), 10);
    assert!(data.join("ground_truth.json").is_file());

    let input = data.join("panel.csv");
    let out = tmp.path().join("cv");
    let o = nnavg(&["cv", "--input", input.to_str().unwrap(), "--grid", "1,3", "--methods", "ETS,S-AVG"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let scores = std::fs::read_to_string(out.join("cv_scores.csv")).unwrap();
    assert!(scores.starts_with("id,method,k,fold,score\n"));
    assert!(scores.lines().any(|l| l.contains(",S-AVG,3,")));
}

#[test]
fn forecast_and_diagnose_subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let out = tmp.path().join("f");
    let o = nnavg(&["forecast", "--config", &cfg, "--grid", "2", "--methods", "ETS,P-AVG"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("forecasts.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.contains(",ETS,") || l.contains(",P-AVG,2,")));

    let out = tmp.path().join("d");
    let o = nnavg(&["diagnose", "--config", &cfg], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("theory.json").is_file() && out.join("diagnostics.csv").is_file());
}

#[test]
fn dtw_dump_marks_the_path() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("p.csv");
    std::fs::write(&input, "id,time,value\nq,1,0\nq,2,1\nr,1,0\nr,2,1\nr,3,1\n").unwrap();
    let out = tmp.path().join("g.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_nnavg"))
        .args(["dtw", "--input", input.to_str().unwrap(), "--query", "q", "--reference", "r", "--pattern", "symmetric"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "i,j,g,onpath");
    assert_eq!(rows.len(), 1 + 2 * 3);
    assert!(rows.contains(&"1,1,0,1") && rows.contains(&"2,3,0,1"));
}

#[test]
fn errors_exit_non_zero_with_a_message() {
    let tmp = tempfile::tempdir().unwrap();
    let o = nnavg(&["run", "--t0", "80", "--ttrain", "74"], tmp.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("t0"));

    let bad = tmp.path().join("bad.csv");
    std::fs::write(&bad, "id,time,value\na,1,1\na,3,2\n").unwrap();
    let o = nnavg(&["run", "--input", bad.to_str().unwrap()], tmp.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    let o = nnavg(&["run", "--methods", "X-AVG"], tmp.path());
    assert!(!o.status.success());
}
