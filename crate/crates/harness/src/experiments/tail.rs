//! Lower tail of the smallest singular value.

use combilab_core::combi::{sample_row_regular, RowRegularMatrix};
use combilab_core::spectral::{
    is_singular_exact, smallest_singular_value, DenseMatrix, SpectralOptions,
};
use combilab_core::substream;

use super::census::{exhaustive_rows, matrix_at};
use super::run_trials;
use crate::config::{ExperimentConfig, Mode};
use crate::error::Result;
use crate::output::{Check, RunOutput, SummaryRow, TrialRecord};
use crate::stats::slope;

/// Epsilon range of the least-squares slope.
pub const SLOPE_RANGE: (f64, f64) = (0.1, 0.8);

struct Trial {
    svmin: f64,
    clamped: f64,
    singular_float: bool,
    singular_exact: bool,
}

fn measure(q: &RowRegularMatrix, opts: &SpectralOptions) -> Result<Trial> {
    let a = DenseMatrix::from(q);
    let svmin = smallest_singular_value(&a, opts)?;
    let singular_float = svmin < opts.singular_threshold(&a);
    let singular_exact = is_singular_exact(q)?;
    // exact rank decides which draws count as s_n = 0; the threshold is only cross-checked
    let clamped = if singular_exact { 0.0 } else { svmin };
    Ok(Trial {
        svmin,
        clamped,
        singular_float,
        singular_exact,
    })
}

/// Per trial: `s_n` of a fresh square matrix, with floating-point and exact
/// singularity flags. Summary: `P{s_n <= eps / sqrt(n)}` per epsilon, where
/// draws of exact rank below `n` count as zero; the threshold flag is cross-checked.
pub fn run_tail_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let (n, d) = (cfg.n, cfg.d);
    let opts = SpectralOptions::default();
    let trials: Vec<Trial> = match cfg.mode {
        Mode::Exhaustive => {
            let (rows, total) = exhaustive_rows(n, d)?;
            run_trials(cfg.threads, total, |i| {
                measure(&matrix_at(&rows, n, i)?, &opts)
            })?
        }
        Mode::Montecarlo => run_trials(cfg.threads, cfg.trials, |i| {
            measure(
                &sample_row_regular(n, n, d, &mut substream(cfg.seed, i))?,
                &opts,
            )
        })?,
    };
    let mut out = RunOutput::new(cfg.clone());
    out.records = trials
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut r = TrialRecord::new(i as u64).value("svmin", t.svmin);
            if t.singular_float {
                r = r.flag("singular_float");
            }
            if t.singular_exact {
                r = r.flag("singular_exact");
            }
            r
        })
        .collect();
    let total = trials.len() as u64;
    let rootn = (n as f64).sqrt();
    let mut probs = Vec::with_capacity(cfg.eps_grid.len());
    for &eps in &cfg.eps_grid {
        let hits = trials.iter().filter(|t| t.clamped <= eps / rootn).count() as u64;
        out.summary.push(match cfg.mode {
            Mode::Exhaustive => {
                SummaryRow::exact("tail", n, eps, hits as f64 / total as f64, total)
            }
            Mode::Montecarlo => SummaryRow::frequency("tail", n, eps, hits, total),
        });
        probs.push(hits as f64 / total as f64);
    }
    let float_singular = trials.iter().filter(|t| t.singular_float).count();
    let exact_singular = trials.iter().filter(|t| t.singular_exact).count();
    out.derived
        .insert("singular_float_count".into(), float_singular as f64);
    out.derived
        .insert("singular_exact_count".into(), exact_singular as f64);
    let (xs, ys): (Vec<f64>, Vec<f64>) = cfg
        .eps_grid
        .iter()
        .zip(&probs)
        .filter(|(&e, _)| e >= SLOPE_RANGE.0 - 1e-12 && e <= SLOPE_RANGE.1 + 1e-12)
        .map(|(&e, &p)| (e, p))
        .unzip();
    if let Some(s) = slope(&xs, &ys) {
        out.derived.insert("slope".into(), s);
    }
    out.checks.push(Check::new(
        "float_matches_exact_singularity",
        float_singular == exact_singular,
        format!("{float_singular} by threshold, {exact_singular} by exact rank"),
    ));
    out.checks.push(Check::new(
        "tail_nondecreasing",
        probs.windows(2).all(|w| w[0] <= w[1]),
        "P{s_n <= eps/sqrt(n)} along the grid",
    ));
    Ok(out)
}
