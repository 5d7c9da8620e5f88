//! Single-matrix sampling, smallest singular values and CLCD queries.

use combilab_core::clcd::{
    clcd_plain, clcd_tensor, difference_vector, tensor_difference, ClcdQuery,
};
use combilab_core::combi::sample_row_regular;
use combilab_core::spectral::{smallest_singular_value, DenseMatrix, SpectralOptions};
use combilab_core::substream;

use super::run_trials;
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::output::{RunOutput, SummaryRow, TrialRecord};
use crate::stats::{mean_and_se, Z95};

/// One `m x n` matrix from substream 0; record `i` is row `i`, with its
/// bits in the flag column.
pub fn run_sample(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let q = sample_row_regular(cfg.m, cfg.n, cfg.d, &mut substream(cfg.seed, 0))?;
    let mut out = RunOutput::new(cfg.clone());
    out.records = q
        .rows()
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let bits: String = row
                .bits()
                .iter()
                .map(|&b| if b == 1 { '1' } else { '0' })
                .collect();
            TrialRecord::new(i as u64)
                .value("weight", row.d() as f64)
                .flag(&bits)
        })
        .collect();
    Ok(out)
}

/// `s_n` and `sqrt(n) s_n` per trial; summary is the mean of `sqrt(n) s_n`
/// with a normal 95% interval.
pub fn run_svmin(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let (n, d) = (cfg.n, cfg.d);
    let opts = SpectralOptions::default();
    let values = run_trials(cfg.threads, cfg.trials, |i| {
        let q = sample_row_regular(n, n, d, &mut substream(cfg.seed, i))?;
        Ok(smallest_singular_value(&DenseMatrix::from(&q), &opts)?)
    })?;
    let rootn = (n as f64).sqrt();
    let mut out = RunOutput::new(cfg.clone());
    out.records = values
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            TrialRecord::new(i as u64)
                .value("svmin", s)
                .value("svmin_scaled", s * rootn)
        })
        .collect();
    let scaled: Vec<f64> = values.iter().map(|s| s * rootn).collect();
    let (mean, se) = mean_and_se(&scaled);
    out.summary.push(SummaryRow {
        experiment: "svmin_scaled_mean".into(),
        n,
        eps: 0.0,
        estimate: mean,
        ci_low: mean - Z95 * se,
        ci_high: mean + Z95 * se,
        trials: cfg.trials,
    });
    Ok(out)
}

/// CLCD of `--v` (plain, cap `alpha`, slope `gamma`) or, with `--a`, of the
/// pair `(a, v)` (tensor, cap `L = alpha`, slope `u = gamma`).
pub fn run_clcd(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let v = cfg
        .v
        .as_ref()
        .ok_or_else(|| HarnessError::usage("clcd needs --v"))?;
    let p = &cfg.params;
    let q = ClcdQuery::new(p.alpha, p.gamma)?.with_horizon(p.horizon)?;
    let (r, norm) = match &cfg.a {
        Some(a) => (clcd_tensor(a, v, &q)?, tensor_difference(a, v)?.norm()),
        None => (clcd_plain(v, &q)?, difference_vector(v)?.norm()),
    };
    let mut rec = TrialRecord::new(0)
        .value("clcd", r.value_or_horizon())
        .value("certified_gap", r.certified_gap)
        .value("target_norm", norm)
        .flag(if r.is_finite() {
            "finite"
        } else {
            "infinite_within_horizon"
        });
    if r.empty_target {
        rec = rec.flag("empty_target");
    }
    let mut out = RunOutput::new(cfg.clone());
    if let Some(w) = &r.witness {
        for (k, &x) in w.iter().enumerate() {
            out.derived.insert(format!("witness[{k:06}]"), x as f64);
        }
    }
    out.records.push(rec);
    Ok(out)
}
