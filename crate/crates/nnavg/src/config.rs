//! Experiment configuration: a TOML file with command-line overrides.

use std::path::{Path, PathBuf};

use nnavg_core::barycenter::AdbaConfig;
use nnavg_core::pipeline::{Method, PipelineConfig};
use nnavg_core::series::{Panel, Time};
use nnavg_core::synth::{generate_panel, SynthConfig};
use serde::{Deserialize, Serialize};

use crate::csv_io::read_panel_file;
use crate::error::IoError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Panel CSV; when absent a synthetic panel is generated.
    pub input: Option<PathBuf>,
    pub synth: SynthConfig,
    /// End of the initial cross-validation window.
    pub t0: Time,
    /// Last training time.
    pub t_train: Time,
    pub grid: Vec<usize>,
    pub methods: Vec<Method>,
    pub out: PathBuf,
    /// Overrides `synth.seed` when set.
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    pub adba: AdbaConfig,
    /// Neighbourhood size for the evolution diagnostics.
    pub diag_k: usize,
    /// Monte-Carlo trials for the theory checks.
    pub mc_trials: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            input: None,
            synth: SynthConfig::default(),
            t0: 21,
            t_train: 74,
            grid: vec![1, 3, 5, 10, 20],
            methods: Method::all(),
            out: PathBuf::from("out"),
            seed: None,
            jobs: 0,
            adba: AdbaConfig::default(),
            diag_k: 5,
            mc_trials: 10_000,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, IoError> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path).map_err(|e| IoError::Open { path: path.to_path_buf(), source: e })?;
        Self::from_toml(&text)
    }

    pub fn pipeline(&self) -> PipelineConfig {
        let mut grid = self.grid.clone();
        grid.sort_unstable();
        grid.dedup();
        PipelineConfig { methods: self.methods.clone(), grid, adba: self.adba }
    }

    pub fn synth_config(&self) -> SynthConfig {
        let mut s = self.synth.clone();
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        s
    }

    /// Loads the CSV input or generates the synthetic panel.
    pub fn load_panel(&self) -> Result<Panel, IoError> {
        match &self.input {
            Some(p) => read_panel_file(p),
            None => Ok(generate_panel(&self.synth_config())?.0),
        }
    }

    /// Checks that do not need the panel.
    pub fn validate(&self) -> Result<(), IoError> {
        self.pipeline().validate()?;
        if self.t0 < 1 || self.t0 >= self.t_train {
            return Err(IoError::Invalid(format!("need 1 <= t0 < t_train, got t0={} t_train={}", self.t0, self.t_train)));
        }
        if self.diag_k == 0 {
            return Err(IoError::Invalid("diag_k must be positive".into()));
        }
        Ok(())
    }

    /// Checks against the loaded panel.
    pub fn validate_for(&self, panel: &Panel) -> Result<(), IoError> {
        self.validate()?;
        if self.t_train > panel.horizon() {
            return Err(IoError::Invalid(format!(
                "t_train={} exceeds the panel horizon {}",
                self.t_train,
                panel.horizon()
            )));
        }
        Ok(())
    }
}

/// Parses a comma-separated list such as `1,3,5`.
pub fn parse_grid(s: &str) -> Result<Vec<usize>, IoError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<usize>().map_err(|e| IoError::Invalid(format!("bad grid value `{p}`: {e}"))))
        .collect()
}

/// Parses a comma-separated method list; `all` expands to every method.
pub fn parse_methods(s: &str) -> Result<Vec<Method>, IoError> {
    let mut out = Vec::new();
    for p in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if p.eq_ignore_ascii_case("all") {
            out.extend(Method::all());
        } else {
            out.push(p.parse()?);
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    out.retain(|m| seen.insert(*m));
    Ok(out)
}
