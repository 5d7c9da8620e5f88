//! Distance from the last row to the span of the others.

use combilab_core::anticoncentration::{levy_exact, AtomicDistribution};
use combilab_core::combi::sample_row_regular;
use combilab_core::spectral::{
    is_singular_exact, row_span_distance, smallest_singular_value, DenseMatrix, SpectralOptions,
};
use combilab_core::substream;

use super::run_trials;
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::{Check, RunOutput, SummaryRow, TrialRecord};

/// Tolerance of the identity `|<R_n, v>| = dist(R_n, H_n)`.
pub const PROJECTION_TOL: f64 = 1e-9;

struct Trial {
    distance: f64,
    projection: Option<f64>,
    degenerate: bool,
    singular_exact: bool,
    svmin: f64,
}

/// Per trial: `dist(R_n, H_n)`, `|<R_n, v>|` for the unit normal `v` of
/// `H_n` when the first `n - 1` rows are independent, and `s_n`.
///
/// Summary rows: `distance` is the empirical `L(dist, eps)`; `distance_tail`
/// is `P{dist <= eps}`; `invertibility_lhs` is `P{s_n <= eps rho / sqrt(n)}`
/// and `invertibility_rhs` is `P{dist <= eps} / delta` (informational).
pub fn run_distance_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let (n, d) = (cfg.n, cfg.d);
    let opts = SpectralOptions::default();
    let trials: Vec<Trial> = run_trials(cfg.threads, cfg.trials, |i| {
        let q = sample_row_regular(n, n, d, &mut substream(cfg.seed, i))?;
        let a = DenseMatrix::from(&q);
        let r = row_span_distance(&a)?;
        let last: Vec<f64> = a.row(n - 1).to_vec();
        let projection = r
            .normal
            .as_ref()
            .map(|v| last.iter().zip(v).map(|(x, y)| x * y).sum::<f64>().abs());
        Ok(Trial {
            distance: r.distance,
            projection,
            degenerate: r.normal.is_none(),
            singular_exact: is_singular_exact(&q)?,
            svmin: smallest_singular_value(&a, &opts)?,
        })
    })?;
    let mut out = RunOutput::new(cfg.clone());
    out.records = trials
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut r = TrialRecord::new(i as u64)
                .value("distance", t.distance)
                .value("svmin", t.svmin);
            if let Some(p) = t.projection {
                r = r.value("normal_projection", p);
            }
            if t.degenerate {
                r = r.flag("degenerate");
            }
            if t.singular_exact {
                r = r.flag("singular_exact");
            }
            r
        })
        .collect();

    let total = trials.len() as u64;
    let distances: Vec<f64> = trials.iter().map(|t| t.distance).collect();
    let law = AtomicDistribution::empirical(&distances)?;
    let rootn = (n as f64).sqrt();
    let (delta, rho) = (cfg.params.delta, cfg.params.rho);
    let mut levy = Vec::new();
    for &eps in &cfg.eps_grid {
        let l = levy_exact(&law, eps)?;
        levy.push(l);
        out.summary.push(SummaryRow::frequency(
            "distance",
            n,
            eps,
            (l * total as f64).round() as u64,
            total,
        ));
    }
    for &eps in &cfg.eps_grid {
        let hits = distances.iter().filter(|&&x| x <= eps).count() as u64;
        out.summary
            .push(SummaryRow::frequency("distance_tail", n, eps, hits, total));
        let mut rhs = SummaryRow::frequency("invertibility_rhs", n, eps, hits, total);
        rhs.estimate /= delta;
        rhs.ci_low /= delta;
        rhs.ci_high /= delta;
        out.summary.push(rhs);
        let lhs = trials
            .iter()
            .filter(|t| t.svmin <= eps * rho / rootn)
            .count() as u64;
        out.summary.push(SummaryRow::frequency(
            "invertibility_lhs",
            n,
            eps,
            lhs,
            total,
        ));
    }

    // the constant is L(dist, 0), the largest atom; zero mass is reported separately
    let zero = law.mass_at(0.0) + 0.0;
    let floor = levy_exact(&law, 0.0)?;
    let fitted = cfg
        .eps_grid
        .iter()
        .zip(&levy)
        .filter(|(&e, _)| e > 0.0)
        .map(|(&e, &l)| (l - floor) / e)
        .fold(0.0f64, f64::max);
    out.derived.insert("fitted_C".into(), fitted);
    out.derived.insert("fitted_constant".into(), floor);
    out.derived.insert("zero_mass".into(), zero);

    let zero_count = trials.iter().filter(|t| t.distance == 0.0).count();
    let degenerate = trials.iter().filter(|t| t.degenerate).count();
    let dependent = trials
        .iter()
        .filter(|t| t.distance == 0.0 || t.degenerate)
        .count();
    let singular = trials.iter().filter(|t| t.singular_exact).count();
    out.derived
        .insert("zero_distance_count".into(), zero_count as f64);
    out.derived
        .insert("degenerate_count".into(), degenerate as f64);
    out.derived
        .insert("singular_exact_count".into(), singular as f64);
    let worst = trials
        .iter()
        .filter_map(|t| t.projection.map(|p| (p - t.distance).abs()))
        .fold(0.0f64, f64::max);
    out.derived.insert("max_projection_error".into(), worst);

    out.checks.push(Check::new(
        "normal_projection_identity",
        worst <= PROJECTION_TOL,
        format!(
            "max ||<R_n, v>| - dist| = {worst:.3e} over {} non-degenerate trials",
            trials.len() - degenerate
        ),
    ));
    out.checks.push(Check::new(
        "zero_distance_iff_singular",
        dependent == singular,
        format!("{dependent} zero-or-degenerate, {singular} singular"),
    ));
    out.checks.push(Check::new(
        "levy_nondecreasing",
        levy.windows(2).all(|w| w[0] <= w[1]),
        "L(dist, eps) along the grid",
    ));
    out.checks.push(Check::new(
        "fitted_curve_dominates",
        cfg.eps_grid
            .iter()
            .zip(&levy)
            .all(|(&e, &l)| l <= floor + fitted * e + 1e-12),
        format!("L(dist, eps) <= {floor:.4} + {fitted:.4} eps"),
    ));
    Ok(out)
}
