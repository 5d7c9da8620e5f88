//! Characteristic functions `phi(theta) = E exp(2 pi i theta xi)`.

use super::law::AtomicDistribution;
use crate::error::{Error, Result};

/// Largest dimension accepted by [`roos_bound`].
pub const ROOS_MAX_N: usize = 64;

/// Fractional part centred on zero, so trigonometric calls see small arguments.
fn centred_frac(z: f64) -> f64 {
    z - z.round()
}

/// `|phi(theta)|` for an atomic law.
pub fn exact_chf(dist: &AtomicDistribution, theta: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (x, p) in dist.atoms() {
        let angle = std::f64::consts::TAU * centred_frac(theta * x);
        re += p * angle.cos();
        im += p * angle.sin();
    }
    re.hypot(im).min(1.0)
}

fn pair_differences(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(x[i] - x[j]);
        }
    }
    out
}

/// Upper bound on `|phi(theta)|` for `W_{a,v}`:
///
/// `[ C(n,2)^-2 * sum_{{s,t},{p,q}} cos^2(pi theta (a_s - a_t)(v_p - v_q)) ]^((n-1)/4)`.
///
/// The double sum runs sequentially with compensated accumulation, so the
/// result does not depend on the caller's thread count.
pub fn roos_bound(a: &[f64], v: &[f64], theta: f64) -> Result<f64> {
    let n = a.len();
    if v.len() != n {
        return Err(Error::domain("a and v must have equal length"));
    }
    if n < 2 {
        return Err(Error::domain("the bound needs n >= 2"));
    }
    if n > ROOS_MAX_N {
        return Err(Error::ResourceCap {
            what: "Roos double sum dimension".into(),
            needed: n as u128,
            cap: ROOS_MAX_N as u128,
        });
    }
    let da = pair_differences(a);
    let dv = pair_differences(v);
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &x in &da {
        for &y in &dv {
            // cos^2(pi z) = (1 + cos(2 pi z)) / 2 keeps exact zeros at half-integers
            let c2 = 0.5 * (1.0 + (std::f64::consts::TAU * centred_frac(theta * x * y)).cos());
            let term = c2 - comp;
            let t = sum + term;
            comp = (t - sum) - term;
            sum = t;
        }
    }
    let pairs = da.len() as f64;
    let mean = (sum / (pairs * pairs)).clamp(0.0, 1.0);
    Ok(mean.powf((n as f64 - 1.0) / 4.0))
}
