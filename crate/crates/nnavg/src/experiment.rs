//! Experiment stages: forecasting over as-of times, cross-validation,
//! test evaluation and diagnostics. Work is spread over the current rayon
//! pool; results are collected in a fixed order so outputs are reproducible.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use nnavg_core::cv::{evaluate, tscv, CvReport, EvalReport, FoldSpec, ForecastTable};
use nnavg_core::diagnostics::evolution::{query_evolution, EvolutionPoint};
use nnavg_core::diagnostics::theory::{
    mc_combination, mc_lipschitz, mean_forecast_ratio, AnnParams, CombinationReport, CombinationSetup, McFraction,
};
use nnavg_core::ets::EtsModel;
use nnavg_core::pipeline::{AsOfState, ForecastRecord, ModelBank, PipelineConfig};
use nnavg_core::series::{Panel, Time};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::IoError;

/// Truncates the panel at `asof` and selects a model for every series.
pub fn build_state(panel: &Panel, asof: Time) -> AsOfState {
    let truncated = panel.truncated(asof);
    let fits: Vec<_> = truncated
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|s| (s.id().to_string(), ModelBank::fit(s)))
        .collect();
    AsOfState::from_parts(truncated, asof, ModelBank::from_results(fits))
}

/// Forecast records for targets `asof + 1` over the given as-of times,
/// ordered by as-of time, then id, then method and `k`.
pub fn forecast_records(
    panel: &Panel,
    cfg: &PipelineConfig,
    asofs: RangeInclusive<Time>,
) -> Result<Vec<ForecastRecord>, IoError> {
    cfg.validate()?;
    let asofs: Vec<Time> = asofs.collect();
    let states: Vec<AsOfState> = asofs.par_iter().map(|&a| build_state(panel, a)).collect();
    let tasks: Vec<(&AsOfState, String)> =
        states.iter().flat_map(|s| s.queries().map(move |y| (s, y.id().to_string()))).collect();
    let chunks: Vec<Vec<ForecastRecord>> = tasks
        .par_iter()
        .map(|(state, id)| {
            state.forecast_query(id, cfg).map_err(|source| IoError::Stage {
                module: "averaging",
                id: id.clone(),
                time: state.asof + 1,
                source,
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// As-of times needed to score targets from `t0` up to `last_target`.
pub fn asof_range(panel: &Panel, t0: Time, last_target: Time) -> RangeInclusive<Time> {
    let first_start = panel.iter().map(|s| s.start()).min().unwrap_or(1);
    (t0 - 1).max(first_start)..=last_target - 1
}

#[derive(Debug, Clone)]
pub struct CvStage {
    pub records: Vec<ForecastRecord>,
    pub table: ForecastTable,
    pub cv: CvReport,
}

fn fold_spec(cfg: &ExperimentConfig) -> Result<FoldSpec, IoError> {
    Ok(FoldSpec::new(cfg.t0, cfg.t_train)?)
}

/// Forecasts up to `last_target` and cross-validates on the training period.
pub fn cross_validate(cfg: &ExperimentConfig, panel: &Panel, last_target: Time) -> Result<CvStage, IoError> {
    cfg.validate_for(panel)?;
    let pcfg = cfg.pipeline();
    let records = forecast_records(panel, &pcfg, asof_range(panel, cfg.t0, last_target))?;
    let table = ForecastTable::from_records(&records);
    let cv = tscv(panel, &table, &pcfg.methods, &pcfg.grid, fold_spec(cfg)?)
        .map_err(|source| IoError::Stage { module: "evaluation", id: String::new(), time: cfg.t_train, source })?;
    Ok(CvStage { records, table, cv })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub lipschitz: Vec<(AnnParams, AnnParams, McFraction)>,
    /// Largest mean-forecast ratio over sampled tuples with `n > 5`.
    pub mean_forecast_max_ratio: f64,
    pub mean_forecast_tuples: usize,
    pub combination: CombinationReport,
}

/// Monte-Carlo and closed-form checks for ANN processes.
pub fn theory_checks(trials: usize, seed: u64) -> Result<TheoryReport, IoError> {
    let p = |a, s, n| AnnParams::new(a, s, n);
    let pairs = [(p(0.5, 1.0, 20)?, p(0.3, 2.0, 20)?), (p(1.0, 1.0, 20)?, p(1.0, 1.0, 20)?), (p(0.1, 3.0, 20)?, p(0.9, 0.5, 20)?)];
    let lipschitz = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (x, y))| Ok((*x, *y, mc_lipschitz(x, y, trials, seed.wrapping_add(i as u64))?)))
        .collect::<Result<Vec<_>, nnavg_core::Error>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut max_ratio: f64 = 0.0;
    let tuples = 1000;
    for _ in 0..tuples {
        let n = rng.random_range(6..=60);
        let x = p(rng.random_range(0.0..=1.0), rng.random_range(0.1..5.0), n)?;
        let y = p(rng.random_range(0.0..=1.0), rng.random_range(0.1..5.0), n)?;
        max_ratio = max_ratio.max(mean_forecast_ratio(&x, &y)?);
    }
    let setup = CombinationSetup { x: p(0.1, 1.0, 20)?, y: p(0.1, 0.1, 20)?, w: 0.5, mse_alpha_x: 4.0, mse_alpha_y: 0.01 };
    let combination = mc_combination(&setup, trials.max(2), seed.wrapping_add(101))?;
    Ok(TheoryReport { lipschitz, mean_forecast_max_ratio: max_ratio, mean_forecast_tuples: tuples, combination })
}

#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub evolution: Vec<EvolutionPoint>,
    pub theory: TheoryReport,
}

pub fn diagnose(cfg: &ExperimentConfig, panel: &Panel) -> Result<Diagnostics, IoError> {
    cfg.validate_for(panel)?;
    let ids: Vec<&str> = panel.ids().collect();
    let per_id: Vec<Vec<EvolutionPoint>> = ids
        .par_iter()
        .map(|id| {
            query_evolution(panel, id, cfg.diag_k, cfg.t0..=cfg.t_train, cfg.t_train).map_err(|source| IoError::Stage {
                module: "diagnostics",
                id: id.to_string(),
                time: cfg.t_train,
                source,
            })
        })
        .collect::<Result<_, _>>()?;
    let theory = theory_checks(cfg.mc_trials, cfg.synth_config().seed)?;
    Ok(Diagnostics { evolution: per_id.into_iter().flatten().collect(), theory })
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<ForecastRecord>,
    pub table: ForecastTable,
    pub cv: CvReport,
    pub eval: EvalReport,
    /// Models selected at the last training time.
    pub models: BTreeMap<String, EtsModel>,
    pub diagnostics: Option<Diagnostics>,
}

/// The whole experiment: forecasts, cross-validation, test evaluation and
/// (optionally) diagnostics.
pub fn run(cfg: &ExperimentConfig, panel: &Panel, with_diagnostics: bool) -> Result<RunOutput, IoError> {
    let stage = cross_validate(cfg, panel, panel.horizon())?;
    let methods = cfg.pipeline().methods;
    let eval = evaluate(panel, &stage.table, &stage.cv, &methods)
        .map_err(|source| IoError::Stage { module: "evaluation", id: String::new(), time: cfg.t_train, source })?;
    let models = build_state(panel, cfg.t_train).bank.models;
    let diagnostics = if with_diagnostics { Some(diagnose(cfg, panel)?) } else { None };
    Ok(RunOutput { records: stage.records, table: stage.table, cv: stage.cv, eval, models, diagnostics })
}

/// Runs `f` on a pool with `jobs` threads (0 for the default).
pub fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, IoError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| IoError::Invalid(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
