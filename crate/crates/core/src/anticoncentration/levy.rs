//! Lévy concentration `L(xi, eps) = sup_x P{|xi - x| < eps}`.
//!
//! An open interval of length `2 eps` can cover atoms `x_i <= ... <= x_j`
//! exactly when `x_j - x_i < 2 eps`, so both estimators sweep a window over
//! sorted support points with that strict test.

use super::law::{AtomicDistribution, SampleSet};
use crate::error::{Error, Result};

/// Exact concentration of an atomic law. At `eps = 0` this is the largest
/// atom, the concentration probability.
pub fn levy_exact(dist: &AtomicDistribution, eps: f64) -> Result<f64> {
    if !(eps >= 0.0) {
        return Err(Error::domain(format!("eps must be nonnegative, got {eps}")));
    }
    if eps == 0.0 {
        return Ok(dist.max_atom());
    }
    let xs = dist.values();
    let mut prefix = Vec::with_capacity(xs.len() + 1);
    prefix.push(0.0);
    for p in dist.probabilities() {
        prefix.push(prefix.last().unwrap() + p);
    }
    let width = 2.0 * eps;
    let mut best: f64 = 0.0;
    let mut j = 0;
    for i in 0..xs.len() {
        j = j.max(i);
        while j < xs.len() && xs[j] - xs[i] < width {
            j += 1;
        }
        best = best.max(prefix[j] - prefix[i]);
    }
    Ok(best.min(1.0))
}

/// Largest fraction of samples inside one window of length `2 eps` anchored
/// at a sample point.
pub fn levy_empirical(samples: &SampleSet, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::domain(format!(
            "empirical concentration needs eps > 0, got {eps}"
        )));
    }
    let mut xs = samples.values().to_vec();
    xs.sort_by(f64::total_cmp);
    Ok(max_window_count(&xs, 2.0 * eps) as f64 / xs.len() as f64)
}

/// Evaluates [`levy_empirical`] on an ascending grid with a single sort.
pub fn levy_empirical_grid(samples: &SampleSet, eps_grid: &[f64]) -> Result<Vec<f64>> {
    if eps_grid.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::domain("empirical concentration needs eps > 0"));
    }
    let mut xs = samples.values().to_vec();
    xs.sort_by(f64::total_cmp);
    Ok(eps_grid
        .iter()
        .map(|&e| max_window_count(&xs, 2.0 * e) as f64 / xs.len() as f64)
        .collect())
}

fn max_window_count(sorted: &[f64], width: f64) -> usize {
    let mut best = 0;
    let mut j = 0;
    for i in 0..sorted.len() {
        j = j.max(i);
        while j < sorted.len() && sorted[j] - sorted[i] < width {
            j += 1;
        }
        best = best.max(j - i);
    }
    best
}
