//! Experiments. Trial `i` always draws from substream `i` of the master seed,
//! and results are collected in trial order, so output does not depend on the
//! thread count.

mod basic;
mod census;
mod distance;
mod smallball;
mod suite;
mod tail;
mod verify;

pub use basic::{run_clcd, run_sample, run_svmin};
pub use census::{
    exhaustive_rows, matrix_at, matrix_count, run_singularity_census, EXHAUSTIVE_CAP, P2_SINGULAR,
    P4_SINGULAR,
};
pub use distance::run_distance_experiment;
pub use smallball::{run_smallball_validation, SMALLBALL_EXACT_MAX_N, VECTOR_STREAM};
pub use suite::run_inequality_suite;
pub use tail::{run_tail_experiment, SLOPE_RANGE};
pub use verify::run_verify;

use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::output::RunOutput;

/// Runs `f(0), ..., f(trials - 1)` on `threads` workers (0 = all cores),
/// returning results in index order.
pub fn run_trials<T, F>(threads: usize, trials: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::usage(format!("thread pool: {e}")))?;
    pool.install(|| (0..trials).into_par_iter().map(&f).collect())
}

/// Dispatches on `cfg.experiment`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Sample => run_sample(cfg),
        Experiment::Svmin => run_svmin(cfg),
        Experiment::Singularity => run_singularity_census(cfg),
        Experiment::Tail => run_tail_experiment(cfg),
        Experiment::Distance => run_distance_experiment(cfg),
        Experiment::Clcd => run_clcd(cfg),
        Experiment::Smallball => run_smallball_validation(cfg),
        Experiment::Verify => run_verify(cfg),
    }
}
