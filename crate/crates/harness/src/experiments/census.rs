//! Singularity census, exhaustive or Monte Carlo.

use combilab_core::combi::{
    binomial, enumerate_fixed_weight, sample_row_regular, FixedWeightVector, RowRegularMatrix,
};
use combilab_core::spectral::is_singular_exact;
use combilab_core::{substream, Error};

use super::run_trials;
use crate::config::{ExperimentConfig, Mode};
use crate::error::Result;
use crate::output::{Check, RunOutput, SummaryRow, TrialRecord};

/// Largest number of matrices an exhaustive run may visit.
pub const EXHAUSTIVE_CAP: u128 = 100_000_000;

/// Singular count and total for `n = 2`, `d = 1`.
pub const P2_SINGULAR: (u64, u64) = (2, 4);
/// Singular count and total for `n = 4`, `d = 2`: `p_4 = 7/9`.
pub const P4_SINGULAR: (u64, u64) = (1008, 1296);

/// `C(n, d)^n`, saturating.
pub fn matrix_count(n: usize, d: usize) -> u128 {
    let rows = binomial(n as u64, d as u64);
    (0..n)
        .try_fold(1u128, |acc, _| acc.checked_mul(rows))
        .unwrap_or(u128::MAX)
}

/// Every weight-`d` row, after checking the `n x n` census fits the cap.
pub fn exhaustive_rows(n: usize, d: usize) -> Result<(Vec<FixedWeightVector>, u64)> {
    let total = matrix_count(n, d);
    if total > EXHAUSTIVE_CAP {
        return Err(Error::ResourceCap {
            what: format!("exhaustive census at n={n}, d={d}"),
            needed: total,
            cap: EXHAUSTIVE_CAP,
        }
        .into());
    }
    Ok((enumerate_fixed_weight(n, d, EXHAUSTIVE_CAP)?, total as u64))
}

/// Matrix number `index` in mixed radix over `rows`, first row most significant.
pub fn matrix_at(rows: &[FixedWeightVector], n: usize, mut index: u64) -> Result<RowRegularMatrix> {
    let k = rows.len() as u64;
    let mut picked = vec![0usize; n];
    for slot in picked.iter_mut().rev() {
        *slot = (index % k) as usize;
        index /= k;
    }
    Ok(RowRegularMatrix::from_rows(
        picked.into_iter().map(|i| rows[i].clone()).collect(),
    )?)
}

/// Exact `p_n` (exhaustive) or a Monte Carlo frequency, by exact integer rank.
pub fn run_singularity_census(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let (n, d) = (cfg.n, cfg.d);
    let mut out = RunOutput::new(cfg.clone());
    let flags: Vec<bool> = match cfg.mode {
        Mode::Exhaustive => {
            let (rows, total) = exhaustive_rows(n, d)?;
            run_trials(cfg.threads, total, |i| {
                Ok(is_singular_exact(&matrix_at(&rows, n, i)?)?)
            })?
        }
        Mode::Montecarlo => run_trials(cfg.threads, cfg.trials, |i| {
            let q = sample_row_regular(n, n, d, &mut substream(cfg.seed, i))?;
            Ok(is_singular_exact(&q)?)
        })?,
    };
    let total = flags.len() as u64;
    let singular = flags.iter().filter(|&&s| s).count() as u64;
    out.records = flags
        .iter()
        .enumerate()
        .map(|(i, &s)| TrialRecord::new(i as u64).value("singular", if s { 1.0 } else { 0.0 }))
        .collect();
    let p = singular as f64 / total as f64;
    let trivial = 1.0 / binomial(n as u64, d as u64) as f64;
    out.derived.insert("singular_count".into(), singular as f64);
    out.derived.insert("matrix_count".into(), total as f64);
    out.derived.insert("trivial_lower_bound".into(), trivial);
    match cfg.mode {
        Mode::Exhaustive => {
            out.summary
                .push(SummaryRow::exact("singularity", n, 0.0, p, total));
            out.checks.push(Check::new(
                "trivial_lower_bound",
                p >= trivial,
                format!("p = {singular}/{total} vs 1/C(n,d) = {trivial:.6}"),
            ));
        }
        Mode::Montecarlo => {
            out.summary.push(SummaryRow::frequency(
                "singularity",
                n,
                0.0,
                singular,
                total,
            ));
            let sigma = (trivial * (1.0 - trivial) / total as f64).sqrt();
            out.checks.push(Check::new(
                "trivial_lower_bound",
                p >= trivial - 3.0 * sigma,
                format!(
                    "p = {p:.6} vs 1/C(n,d) - 3 sigma = {:.6}",
                    trivial - 3.0 * sigma
                ),
            ));
        }
    }
    Ok(out)
}
