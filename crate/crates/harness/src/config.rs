//! Experiment configuration, echoed verbatim into JSON output.

use std::collections::BTreeMap;
use std::path::PathBuf;

use combilab_core::anticoncentration::BoundParams;
use combilab_core::sphere::PartitionParams;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::parse::check_grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Sample,
    Svmin,
    Singularity,
    Tail,
    Distance,
    Clcd,
    Smallball,
    Verify,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Sample => "sample",
            Experiment::Svmin => "svmin",
            Experiment::Singularity => "singularity",
            Experiment::Tail => "tail",
            Experiment::Distance => "distance",
            Experiment::Clcd => "clcd",
            Experiment::Smallball => "smallball",
            Experiment::Verify => "verify",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Montecarlo,
    Exhaustive,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub delta: f64,
    pub rho: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub horizon: f64,
    /// Absolute constants `C`, `c1`, `c2`, `C_E`.
    pub constants: BTreeMap<String, f64>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            delta: 0.5,
            rho: 0.5,
            alpha: 1.0,
            gamma: 0.02,
            horizon: 1e4,
            constants: BoundParams::default()
                .iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        }
    }
}

impl Params {
    pub fn partition(&self) -> Result<PartitionParams> {
        Ok(PartitionParams::new(self.delta, self.rho)?)
    }

    pub fn bound_params(&self) -> Result<BoundParams> {
        let mut p = BoundParams::empty();
        for (k, &v) in &self.constants {
            p.set(k, v)?;
        }
        p.set("alpha", self.alpha)?;
        p.set("gamma", self.gamma)?;
        p.set("horizon", self.horizon)?;
        Ok(p)
    }
}

/// Default epsilon grid: `0, 0.05, ..., 1`.
pub fn default_eps_grid() -> Vec<f64> {
    (0..=20).map(|k| k as f64 * 0.05).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub trials: u64,
    pub seed: u64,
    pub eps_grid: Vec<f64>,
    pub params: Params,
    /// Worker threads; 0 uses every available core.
    pub threads: usize,
    pub mode: Mode,
    pub v: Option<Vec<f64>>,
    pub a: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl ExperimentConfig {
    /// `d = n/2`, `m = n`, default grid and parameters.
    pub fn new(experiment: Experiment, n: usize, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            experiment,
            n,
            d: n / 2,
            m: n,
            trials,
            seed,
            eps_grid: default_eps_grid(),
            params: Params::default(),
            threads: 0,
            mode: Mode::default(),
            v: None,
            a: None,
            out: None,
            format: Format::default(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(HarnessError::usage(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if self.d > self.n {
            return Err(HarnessError::usage(format!(
                "d={} exceeds n={}",
                self.d, self.n
            )));
        }
        if self.m == 0 || self.m > self.n {
            return Err(HarnessError::usage(format!(
                "m must satisfy 1 <= m <= n, got {}",
                self.m
            )));
        }
        if self.trials == 0 {
            return Err(HarnessError::usage("trials must be at least 1"));
        }
        check_grid(&self.eps_grid)?;
        self.params.partition()?;
        self.params.bound_params()?;
        for (name, v) in [("v", &self.v), ("a", &self.a)] {
            if let Some(v) = v {
                if v.len() != self.n {
                    return Err(HarnessError::usage(format!(
                        "--{name} has {} entries but n={}",
                        v.len(),
                        self.n
                    )));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(HarnessError::usage(format!("--{name} must be finite")));
                }
            }
        }
        Ok(())
    }
}
