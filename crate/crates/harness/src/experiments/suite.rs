//! Monte Carlo checks of the concentration, restricted-norm and
//! single-vector inequalities. Each part uses its own block of substreams
//! (`part << 40 | trial`), so parts are independent.

use combilab_core::anticoncentration::{
    evaluate_bound, expected_square_w, BoundKind, BoundParams,
};
use combilab_core::combi::sample_row_regular;
use combilab_core::spectral::{restricted_operator_norm, DenseMatrix, SpectralOptions};
use combilab_core::substream;
use rand_distr::{Distribution, StandardNormal};

use super::run_trials;
use super::smallball::VECTOR_STREAM;
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::output::{Check, RunOutput, SummaryRow};
use crate::stats::mean_and_se;

/// Dimensions of the single-vector and row anti-concentration checks.
pub const SUITE_DIMENSIONS: [usize; 3] = [16, 32, 64];

fn stream(part: u64, trial: u64) -> u64 {
    part << 40 | trial
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn random_unit(n: usize, seed: u64, index: u64) -> Vec<f64> {
    let mut rng = substream(seed, index);
    let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let r = norm(&v);
    v.into_iter().map(|x| x / r).collect()
}

/// Largest `c` with `freq(t) <= 2 exp(-c g(t))` at every `t` where the
/// frequency is positive; `inf` when no frequency is positive.
fn fitted_constant(points: &[(f64, f64)]) -> f64 {
    points
        .iter()
        .filter(|(p, g)| *p > 0.0 && *g > 0.0)
        .map(|(p, g)| (2.0 / p).ln() / g)
        .fold(f64::INFINITY, f64::min)
}

pub fn run_inequality_suite(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mut out = RunOutput::new(cfg.clone());
    concentration(cfg, &mut out)?;
    restricted_norm(cfg, &mut out)?;
    single_vector(cfg, &mut out)?;
    row_anticoncentration(cfg, &mut out)?;
    Ok(out)
}

/// `| |Mv|^2 - E|Mv|^2 | >= t` against `2 exp(-c1 min(t^2/((r^2+1)^2 n), t/(r^2+1)))`.
fn concentration(cfg: &ExperimentConfig, out: &mut RunOutput) -> Result<()> {
    let (n, m, d) = (cfg.n, cfg.m, cfg.d);
    if 2 * d != n {
        return Err(HarnessError::usage(
            "the concentration check needs n even and d = n/2",
        ));
    }
    let v = match &cfg.v {
        Some(v) => {
            let r = norm(v);
            if r == 0.0 {
                return Err(HarnessError::usage("--v must be nonzero"));
            }
            v.iter().map(|x| x / r).collect()
        }
        None => random_unit(n, cfg.seed, VECTOR_STREAM),
    };
    let r = v.iter().sum::<f64>().abs();
    let expected = m as f64 * expected_square_w(&v, d)?;
    let xs = run_trials(cfg.threads, cfg.trials, |i| {
        let q = sample_row_regular(m, n, d, &mut substream(cfg.seed, stream(1, i)))?;
        Ok(q.mul_vec(&v).iter().map(|y| y * y).sum::<f64>())
    })?;
    let (mean, se) = mean_and_se(&xs);
    out.derived.insert("concentration_mean".into(), mean);
    out.derived
        .insert("concentration_expected".into(), expected);
    out.checks.push(Check::new(
        "second_moment",
        (mean - expected).abs() <= 3.0 * se.max(1e-12),
        format!("mean |Mv|^2 = {mean:.5} +- {se:.5}, exact {expected:.5}"),
    ));

    let s = r * r + 1.0;
    let mut tails = Vec::new();
    let total = cfg.trials;
    for k in 1..=20 {
        let t = k as f64 * (n as f64).sqrt() / 4.0;
        let hits = xs.iter().filter(|&&x| (x - expected).abs() >= t).count() as u64;
        out.summary.push(SummaryRow::frequency(
            "suite_concentration",
            n,
            t,
            hits,
            total,
        ));
        tails.push((t, hits as f64 / total as f64));
    }
    let points: Vec<(f64, f64)> = tails
        .iter()
        .map(|&(t, p)| (p, (t * t / (s * s * n as f64)).min(t / s)))
        .collect();
    let c1 = fitted_constant(&points);
    out.derived.insert("c1_fitted".into(), c1);
    let mut holds = true;
    for &(t, p) in &tails {
        let params = BoundParams::empty()
            .with("c1", c1)?
            .with("t", t)?
            .with("r", r)?
            .with("n", n as f64)?;
        holds &=
            p <= evaluate_bound(BoundKind::MatrixConcentration, &params)? * (1.0 + 1e-12);
    }
    out.checks.push(Check::new(
        "concentration_bound",
        holds,
        format!("largest passing c1 = {c1:.5}"),
    ));

    // for the flat vector |Mv|^2 = m d^2 / n for every M
    let flat = vec![1.0 / (n as f64).sqrt(); n];
    let want = m as f64 * (d * d) as f64 / n as f64;
    let spread = (0..20u64)
        .map(|i| {
            let q = sample_row_regular(m, n, d, &mut substream(cfg.seed, stream(2, i)))?;
            Ok((q.mul_vec(&flat).iter().map(|y| y * y).sum::<f64>() - want).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0f64, f64::max);
    out.checks.push(Check::new(
        "flat_vector_deterministic",
        spread < 1e-9,
        format!("max deviation {spread:.2e}"),
    ));
    Ok(())
}

/// `P{ ||M|_H|| >= t sqrt(n) }` against `2 exp(-c3 t^2 n)`.
fn restricted_norm(cfg: &ExperimentConfig, out: &mut RunOutput) -> Result<()> {
    let (n, m, d) = (cfg.n, cfg.m, cfg.d);
    let opts = SpectralOptions::default();
    let norms = run_trials(cfg.threads, cfg.trials, |i| {
        let q = sample_row_regular(m, n, d, &mut substream(cfg.seed, stream(3, i)))?;
        Ok(restricted_operator_norm(&DenseMatrix::from(&q), &opts)?)
    })?;
    let rootn = (n as f64).sqrt();
    let mut tails = Vec::new();
    for k in 1..=30 {
        let t = k as f64 * 0.05;
        let hits = norms.iter().filter(|&&x| x >= t * rootn).count() as u64;
        out.summary.push(SummaryRow::frequency(
            "suite_restricted_norm",
            n,
            t,
            hits,
            cfg.trials,
        ));
        tails.push((t, hits as f64 / cfg.trials as f64));
    }
    let points: Vec<(f64, f64)> = tails.iter().map(|&(t, p)| (p, t * t * n as f64)).collect();
    let c3 = fitted_constant(&points);
    out.derived.insert("c3_fitted".into(), c3);
    let mut holds = true;
    for &(t, p) in &tails {
        let params = BoundParams::empty()
            .with("c3", c3)?
            .with("t", t)?
            .with("n", n as f64)?;
        holds &= p <= evaluate_bound(BoundKind::RestrictedNorm, &params)? * (1.0 + 1e-12);
    }
    out.checks.push(Check::new(
        "restricted_norm_bound",
        holds,
        format!("largest passing c3 = {c3:.5}"),
    ));
    Ok(())
}

/// `P{ |M e_1| <= sqrt(n)/5 }` for square `M` at each suite dimension.
fn single_vector(cfg: &ExperimentConfig, out: &mut RunOutput) -> Result<()> {
    let mut freqs = Vec::new();
    let mut points = Vec::new();
    for &n in &SUITE_DIMENSIONS {
        let threshold = (n as f64).sqrt() / 5.0;
        let hits = run_trials(cfg.threads, cfg.trials, |i| {
            let q = sample_row_regular(n, n, n / 2, &mut substream(cfg.seed, stream(4, i)))?;
            let ones = q.rows().iter().filter(|r| r.bits()[0] == 1).count() as f64;
            Ok(ones.sqrt() <= threshold)
        })?
        .into_iter()
        .filter(|&h| h)
        .count() as u64;
        out.summary.push(SummaryRow::frequency(
            "suite_single_vector",
            n,
            0.2,
            hits,
            cfg.trials,
        ));
        let f = hits as f64 / cfg.trials as f64;
        freqs.push(f);
        points.push((f, n as f64));
    }
    let c4 = fitted_constant(&points);
    out.derived.insert("c4_fitted".into(), c4);
    out.checks.push(Check::new(
        "single_vector_trend",
        freqs.windows(2).all(|w| w[0] >= w[1]) && freqs[freqs.len() - 1] == 0.0,
        format!("frequencies {freqs:?} at n = {SUITE_DIMENSIONS:?}"),
    ));
    Ok(())
}

/// `P{ |x^T Q_n| <= sqrt(n)/90 }` for a fixed random unit `x`, against `exp(-n/3000)`.
fn row_anticoncentration(cfg: &ExperimentConfig, out: &mut RunOutput) -> Result<()> {
    let mut ok = true;
    let mut freqs = Vec::new();
    for &n in &SUITE_DIMENSIONS {
        let x = random_unit(n, cfg.seed, VECTOR_STREAM - n as u64);
        let threshold = (n as f64).sqrt() / 90.0;
        let hits = run_trials(cfg.threads, cfg.trials, |i| {
            let q = sample_row_regular(n, n, n / 2, &mut substream(cfg.seed, stream(5, i)))?;
            let y = q.left_mul_vec(&x);
            Ok(norm(&y) <= threshold)
        })?
        .into_iter()
        .filter(|&h| h)
        .count() as u64;
        out.summary.push(SummaryRow::frequency(
            "suite_row_anticoncentration",
            n,
            1.0 / 90.0,
            hits,
            cfg.trials,
        ));
        let bound = evaluate_bound(
            BoundKind::RowAntiConcentration,
            &BoundParams::empty().with("n", n as f64)?,
        )?;
        let f = hits as f64 / cfg.trials as f64;
        ok &= f <= bound;
        freqs.push(f);
    }
    out.checks.push(Check::new(
        "row_anticoncentration_bound",
        ok,
        format!("frequencies {freqs:?} at n = {SUITE_DIMENSIONS:?}"),
    ));
    Ok(())
}
