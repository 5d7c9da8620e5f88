//! Small-ball probabilities of `W_v` against the three-term bound.

use combilab_core::anticoncentration::{
    exact_law_w, levy_exact, smallball_bound, AtomicDistribution, SmallBallInput,
};
use combilab_core::combi::{binomial, sample_fixed_weight, DEFAULT_ENUMERATION_CAP};
use combilab_core::sphere::random_non_almost_constant;
use combilab_core::substream;

use super::run_trials;
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::{Check, RunOutput, SummaryRow, TrialRecord};

/// Largest `n` for which the exact law is also computed.
pub const SMALLBALL_EXACT_MAX_N: usize = 24;
/// Substream used to generate `v` when none is supplied; trial streams count up from 0.
pub const VECTOR_STREAM: u64 = u64::MAX;
/// Agreement required between empirical and exact concentration.
pub const EXACT_AGREEMENT: f64 = 0.02;

/// The vector under test: `cfg.v`, or a random unit vector that is not
/// almost-constant for `(delta, rho)`.
pub fn smallball_vector(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    match &cfg.v {
        Some(v) => Ok(v.clone()),
        None => Ok(random_non_almost_constant(
            cfg.n,
            &cfg.params.partition()?,
            &mut substream(cfg.seed, VECTOR_STREAM),
        )?),
    }
}

/// Samples `W_v`, estimates `L(W_v, eps)` on the grid, evaluates the bound with
/// `C = 1`, and reports per epsilon the smallest `C` for which
/// `L <= C eps + C / CLCD + C exp(-2 alpha^2 / n)` holds.
pub fn run_smallball_validation(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let (n, d) = (cfg.n, cfg.d);
    let v = smallball_vector(cfg)?;
    let samples = run_trials(cfg.threads, cfg.trials, |i| {
        Ok(sample_fixed_weight(n, d, &mut substream(cfg.seed, i))?.dot(&v))
    })?;
    let mut out = RunOutput::new(cfg.clone());
    out.records = samples
        .iter()
        .enumerate()
        .map(|(i, &w)| TrialRecord::new(i as u64).value("W", w))
        .collect();

    let total = cfg.trials;
    let empirical = AtomicDistribution::empirical(&samples)?;
    let exact = if n <= SMALLBALL_EXACT_MAX_N {
        Some(exact_law_w(&v, d, DEFAULT_ENUMERATION_CAP)?)
    } else {
        None
    };
    let supports = binomial(n as u64, d as u64) as u64;
    let mut unit = cfg.params.bound_params()?;
    unit.set("C", 1.0)?;
    let configured = cfg.params.bound_params()?;

    let mut c_min = 0.0f64;
    let mut worst_gap = 0.0f64;
    let mut report = None;
    for &eps in &cfg.eps_grid {
        let l = levy_exact(&empirical, eps)?;
        out.summary.push(SummaryRow::frequency(
            "smallball",
            n,
            eps,
            (l * total as f64).round() as u64,
            total,
        ));
        if let Some(law) = &exact {
            let le = levy_exact(law, eps)?;
            worst_gap = worst_gap.max((le - l).abs());
            out.summary
                .push(SummaryRow::exact("smallball_exact", n, eps, le, supports));
        }
        let base = smallball_bound(&SmallBallInput::Plain { v: &v }, eps, &unit)?;
        let bound = smallball_bound(&SmallBallInput::Plain { v: &v }, eps, &configured)?;
        out.summary.push(SummaryRow::exact(
            "smallball_bound",
            n,
            eps,
            bound.bound,
            total,
        ));
        let c = l / base.bound;
        out.summary
            .push(SummaryRow::exact("smallball_cmin", n, eps, c, total));
        c_min = c_min.max(c);
        report = Some(base);
    }
    let report = report.expect("grid is nonempty");
    out.derived.insert("c_min".into(), c_min);
    out.derived
        .insert("clcd".into(), report.clcd.value_or_horizon());
    out.derived.insert(
        "clcd_upper_bound_flag".into(),
        if report.upper_bound_on_bound {
            1.0
        } else {
            0.0
        },
    );
    out.derived.insert("b_max".into(), report.b_max);
    for (i, x) in v.iter().enumerate() {
        out.derived.insert(format!("v[{i:03}]"), *x);
    }
    out.checks.push(Check::new(
        "c_min_finite",
        c_min.is_finite(),
        format!("smallest C = {c_min:.6}"),
    ));
    if exact.is_some() {
        out.derived.insert("max_abs_diff_exact".into(), worst_gap);
        out.checks.push(Check::new(
            "empirical_matches_exact",
            worst_gap <= EXACT_AGREEMENT,
            format!("max |L_emp - L_exact| = {worst_gap:.4}"),
        ));
    }
    Ok(out)
}
