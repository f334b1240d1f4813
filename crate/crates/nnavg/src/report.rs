//! Output files of the experiment stages.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nnavg_core::cv::{running_scaled_errors, training_window, CvReport, EvalReport, ForecastTable};
use nnavg_core::diagnostics::evolution::{mean_ari_by_time, EvolutionPoint};
use nnavg_core::dtw::DtwResult;
use nnavg_core::pipeline::ForecastRecord;
use nnavg_core::series::Panel;
use serde::Serialize;

use crate::error::IoError;
use crate::experiment::{Diagnostics, RunOutput};

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, IoError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let f = File::create(&path).map_err(|e| IoError::Open { path, source: e })?;
    Ok(BufWriter::new(f))
}

pub fn write_json<T: Serialize + ?Sized>(dir: &Path, name: &str, value: &T) -> Result<(), IoError> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// `id,method,k,fold,score`.
pub fn write_cv_scores(dir: &Path, cv: &CvReport) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(create(dir, "cv_scores.csv")?);
    w.write_record(["id", "method", "k", "fold", "score"])?;
    for e in &cv.entries {
        for (tf, score) in &e.folds {
            w.write_record([e.id.clone(), e.method.to_string(), opt(e.k), tf.to_string(), score.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `id,time,method,k,forecast,actual,q` for every evaluated time with the
/// selected `k`: training times use running scaling, test times the fixed
/// training scale.
pub fn write_forecasts(dir: &Path, panel: &Panel, table: &ForecastTable, cv: &CvReport, eval: &EvalReport) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(create(dir, "forecasts.csv")?);
    w.write_record(["id", "time", "method", "k", "forecast", "actual", "q"])?;
    for sel in &cv.selections {
        let y = panel.get(&sel.id).ok_or_else(|| IoError::Invalid(format!("unknown id {}", sel.id)))?;
        let (train, _) = running_scaled_errors(y, table, sel.method, sel.k, training_window(y, cv.folds))?;
        let test = eval.entries.iter().find(|e| e.id == sel.id && e.method == sel.method).map(|e| e.q.as_slice()).unwrap_or(&[]);
        for (u, q) in train.iter().chain(test) {
            let f = table.get(&sel.id, sel.method, sel.k, *u).expect("scored forecasts exist");
            w.write_record([
                sel.id.clone(),
                u.to_string(),
                sel.method.to_string(),
                opt(sel.k),
                f.to_string(),
                opt(y.at(*u)),
                q.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Every forecast record with its actual value; `q` is left empty.
pub fn write_raw_forecasts(dir: &Path, panel: &Panel, records: &[ForecastRecord]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(create(dir, "forecasts.csv")?);
    w.write_record(["id", "time", "method", "k", "forecast", "actual", "q"])?;
    for r in records {
        let actual = panel.get(&r.id).and_then(|s| s.at(r.time));
        w.write_record([r.id.clone(), r.time.to_string(), r.method.to_string(), opt(r.k), r.forecast.to_string(), opt(actual), String::new()])?;
    }
    w.flush()?;
    Ok(())
}

/// `method,rank,id,ratio,percentile,fraction_below_one`.
pub fn write_percentiles(dir: &Path, eval: &EvalReport) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(create(dir, "percentiles.csv")?);
    w.write_record(["method", "rank", "id", "ratio", "percentile", "fraction_below_one"])?;
    for row in &eval.percentiles {
        let n = row.ratios.len();
        for (i, (id, ratio)) in row.ratios.iter().enumerate() {
            let pct = (i + 1) as f64 / n as f64;
            w.write_record([
                row.method.to_string(),
                (i + 1).to_string(),
                id.clone(),
                ratio.to_string(),
                pct.to_string(),
                row.fraction_below_one.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `id,time,stat,value`; the row id `*` carries the mean index over queries.
pub fn write_diagnostics(dir: &Path, evolution: &[EvolutionPoint]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(create(dir, "diagnostics.csv")?);
    w.write_record(["id", "time", "stat", "value"])?;
    for p in evolution {
        let stats = [
            ("n_neighbors", Some(p.n_neighbors as f64)),
            ("dtw_min", p.dtw_min),
            ("dtw_median", p.dtw_median),
            ("dtw_max", p.dtw_max),
            ("ari", p.ari),
        ];
        for (name, v) in stats {
            if let Some(v) = v {
                w.write_record([p.id.clone(), p.time.to_string(), name.to_string(), v.to_string()])?;
            }
        }
    }
    for (t, a) in mean_ari_by_time(evolution) {
        w.write_record(["*".to_string(), t.to_string(), "mean_ari".to_string(), a.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_diagnostics_stage(dir: &Path, d: &Diagnostics) -> Result<(), IoError> {
    write_diagnostics(dir, &d.evolution)?;
    write_json(dir, "theory.json", &d.theory)
}

pub fn write_cv_stage(dir: &Path, cv: &CvReport) -> Result<(), IoError> {
    write_json(dir, "cv_report.json", cv)?;
    write_cv_scores(dir, cv)
}

/// Every file of a full run.
pub fn write_run(dir: &Path, panel: &Panel, out: &RunOutput) -> Result<(), IoError> {
    write_cv_stage(dir, &out.cv)?;
    write_json(dir, "eval_report.json", &out.eval)?;
    write_json(dir, "forecast_records.json", &out.records)?;
    write_json(dir, "models.json", &out.models)?;
    write_forecasts(dir, panel, &out.table, &out.cv, &out.eval)?;
    write_percentiles(dir, &out.eval)?;
    if let Some(d) = &out.diagnostics {
        write_diagnostics_stage(dir, d)?;
    }
    Ok(())
}

/// `i,j,g,onpath` with 1-based indices; infeasible cells are written as `NA`.
pub fn write_dtw_dump<W: Write>(r: &DtwResult, writer: W) -> Result<(), IoError> {
    let g = r.warping_matrix.as_ref().ok_or_else(|| IoError::Invalid("warping matrix was not kept".into()))?;
    let on: std::collections::BTreeSet<(usize, usize)> = r.path.pairs.iter().copied().collect();
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["i", "j", "g", "onpath"])?;
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            let v = g.get(i, j);
            let v = if v.is_finite() { v.to_string() } else { "NA".to_string() };
            w.write_record([(i + 1).to_string(), (j + 1).to_string(), v, u8::from(on.contains(&(i, j))).to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
