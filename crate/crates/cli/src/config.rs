//! Experiment configuration: a TOML file with three sections.
//!
//! ```toml
//! [experiment]
//! id = "chain5"
//! sites = 5
//! u = [0.0, 1.0, 2.0, 4.0]
//! sectors = [2, 3]
//! weights = "paper-default"      # or an explicit list of L values
//! delta = 0.005
//! trotter_steps = 4
//! basis = "momentum"             # momentum | bloch | site
//! corner_mode = "fixed-theta"    # fixed-theta | reoptimize
//! seed = 0
//!
//! [optimizer]
//! tolerance = 1e-5
//! max_iterations = 200000
//! initial_step = 0.1
//! restarts = 2
//! adaptive = false
//!
//! [output]
//! dir = "results"
//! timings = false
//! ```
//!
//! Every key is optional; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use wfield_core::model::OrbitalBasis;
use wfield_core::optim::OptimizerConfig;
use wfield_core::spectroscopy::CornerMode;
use wfield_core::WeightVector;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightsSpec {
    Named(String),
    Explicit(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisName {
    Momentum,
    Bloch,
    Site,
}

impl From<BasisName> for OrbitalBasis {
    fn from(b: BasisName) -> Self {
        match b {
            BasisName::Momentum => OrbitalBasis::Momentum,
            BasisName::Bloch => OrbitalBasis::Bloch,
            BasisName::Site => OrbitalBasis::Site,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CornerName {
    FixedTheta,
    Reoptimize,
}

impl From<CornerName> for CornerMode {
    fn from(c: CornerName) -> Self {
        match c {
            CornerName::FixedTheta => CornerMode::FixedTheta,
            CornerName::Reoptimize => CornerMode::Reoptimize,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub id: String,
    pub sites: usize,
    pub u: Vec<f64>,
    pub sectors: Vec<usize>,
    pub weights: WeightsSpec,
    pub delta: f64,
    pub trotter_steps: usize,
    pub basis: BasisName,
    pub corner_mode: CornerName,
    pub seed: u64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            id: "chain5".into(),
            sites: 5,
            u: vec![0.0, 1.0, 2.0, 4.0],
            sectors: vec![2, 3],
            weights: WeightsSpec::Named("paper-default".into()),
            delta: 0.005,
            trotter_steps: 4,
            basis: BasisName::Momentum,
            corner_mode: CornerName::FixedTheta,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSection {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub initial_step: f64,
    pub restarts: usize,
    pub adaptive: bool,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        let d = OptimizerConfig::default();
        Self {
            tolerance: d.tolerance,
            max_iterations: d.max_iterations,
            initial_step: d.initial_step,
            restarts: d.restarts,
            adaptive: d.adaptive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Fill the `wallclock_ms` column. Off by default so that repeated runs
    /// produce identical files.
    pub timings: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("results"),
            timings: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub optimizer: OptimizerSection,
    pub output: OutputSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, origin: &Path) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, path)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let e = &self.experiment;
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(2..=8).contains(&e.sites) {
            return bad(format!("experiment.sites = {} is outside 2..=8", e.sites));
        }
        if let Some(n) = e.sectors.iter().find(|&&n| n > e.sites) {
            return bad(format!("experiment.sectors contains {n} > sites = {}", e.sites));
        }
        if !(e.delta > 0.0) {
            return bad(format!("experiment.delta = {} must be positive", e.delta));
        }
        if e.trotter_steps == 0 {
            return bad("experiment.trotter_steps must be at least 1".into());
        }
        if let Some(u) = e.u.iter().find(|u| !u.is_finite()) {
            return bad(format!("experiment.u contains {u}"));
        }
        let w = self.weights()?;
        if let Err(err) = w.shifted(e.delta) {
            return bad(format!("weights shifted by delta: {err}"));
        }
        self.optimizer_config()
            .validate()
            .or_else(|err| bad(format!("optimizer: {err}")))?;
        Ok(())
    }

    pub fn weights(&self) -> Result<WeightVector, ConfigError> {
        let e = &self.experiment;
        match &e.weights {
            WeightsSpec::Named(name) if name == "paper-default" => Ok(WeightVector::decreasing(e.sites)),
            WeightsSpec::Named(name) => Err(ConfigError::Invalid(format!(
                "experiment.weights = \"{name}\"; expected \"paper-default\" or a list"
            ))),
            WeightsSpec::Explicit(ws) if ws.len() != e.sites => Err(ConfigError::Invalid(format!(
                "experiment.weights has {} entries for {} sites",
                ws.len(),
                e.sites
            ))),
            WeightsSpec::Explicit(ws) => {
                WeightVector::new(ws.clone()).map_err(|err| ConfigError::Invalid(format!("experiment.weights: {err}")))
            }
        }
    }

    pub fn optimizer_config(&self) -> OptimizerConfig {
        let o = &self.optimizer;
        OptimizerConfig {
            tolerance: o.tolerance,
            max_iterations: o.max_iterations,
            initial_step: o.initial_step,
            seed: self.experiment.seed,
            restarts: o.restarts,
            adaptive: o.adaptive,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
        ExperimentConfig::from_toml(text, Path::new("test.toml"))
    }

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = parse("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.weights().unwrap().values(), &[0.5, 0.4, 0.3, 0.2, 0.1]);
    }

    #[test]
    fn explicit_weights() {
        let cfg = parse("[experiment]\nsites = 3\nweights = [0.4, 0.3, 0.2]\nsectors = [1]\n").unwrap();
        assert_eq!(cfg.weights().unwrap().values(), &[0.4, 0.3, 0.2]);
    }

    #[test]
    fn unknown_key_reports_location() {
        let err = parse("[experiment]\nsites = 5\nsitez = 4\n").unwrap_err().to_string();
        assert!(err.contains("sitez"), "{err}");
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn semantic_checks() {
        assert!(parse("[experiment]\nsectors = [6]\n").is_err());
        assert!(parse("[experiment]\ndelta = 0.0\n").is_err());
        assert!(parse("[experiment]\nweights = \"uniform\"\n").is_err());
        assert!(parse("[experiment]\nweights = [0.5, 0.4]\n").is_err());
        assert!(parse("[optimizer]\ntolerance = -1.0\n").is_err());
        assert!(parse("[experiment]\nbasis = \"plane\"\n").is_err());
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = ExperimentConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(parse(&text).unwrap(), cfg);
    }
}
