use std::collections::BTreeMap;

use nnavg::config::ExperimentConfig;
use nnavg::experiment::{asof_range, forecast_records, run};
use nnavg_core::pipeline::Method;
use nnavg_core::series::{Panel, TimeSeries};
use nnavg_core::synth::SynthConfig;

fn small() -> (ExperimentConfig, Panel) {
    let cfg = ExperimentConfig {
        synth: SynthConfig { n_series: 8, seed: 9, ..Default::default() },
        grid: vec![1, 3],
        mc_trials: 10,
        ..Default::default()
    };
    let panel = cfg.load_panel().unwrap();
    (cfg, panel)
}

/// Replaces every value after `asof` with noise far from the data.
fn scrambled_future(panel: &Panel, asof: i64) -> Panel {
    Panel::new(panel.iter().map(|s| {
        let v: Vec<f64> = s
            .values()
            .iter()
            .enumerate()
            .map(|(i, &x)| if s.start() + i as i64 > asof { 1e6 * (i as f64).sin() } else { x })
            .collect();
        TimeSeries::new(s.id(), s.start(), v).unwrap()
    }))
    .unwrap()
}

#[test]
fn future_values_do_not_move_forecasts() {
    let (cfg, panel) = small();
    let pcfg = cfg.pipeline();
    for asof in [25, 50, 77] {
        let a = forecast_records(&panel, &pcfg, asof..=asof).unwrap();
        let b = forecast_records(&scrambled_future(&panel, asof), &pcfg, asof..=asof).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}

#[test]
fn every_requested_pair_appears_once_per_time() {
    let (cfg, panel) = small();
    let records = forecast_records(&panel, &cfg.pipeline(), asof_range(&panel, cfg.t0, panel.horizon())).unwrap();
    let mut seen: BTreeMap<(String, i64, String, Option<usize>), usize> = BTreeMap::new();
    for r in &records {
        *seen.entry((r.id.clone(), r.time, r.method.to_string(), r.k)).or_default() += 1;
    }
    assert!(seen.values().all(|&c| c == 1));
    let per_target: BTreeMap<(String, i64), usize> = seen.keys().fold(BTreeMap::new(), |mut m, (id, t, _, _)| {
        *m.entry((id.clone(), *t)).or_default() += 1;
        m
    });
    let expected = 2 + 9 * cfg.grid.len();
    assert!(per_target.values().all(|&c| c == expected));
}

#[test]
fn selections_come_from_the_grid() {
    let (cfg, panel) = small();
    let out = run(&cfg, &panel, false).unwrap();
    for s in &out.cv.selections {
        match s.method {
            Method::Ets | Method::PlmPool => assert_eq!(s.k, None),
            _ => assert!(s.k.is_some_and(|k| cfg.grid.contains(&k))),
        }
    }
    for row in &out.eval.set_level {
        assert!(row.test_rmsse.is_finite() && row.train_rmsse.is_finite());
    }
}
