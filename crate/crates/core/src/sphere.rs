//! Almost-constant, separated and compressible unit vectors, and the rounding net.

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::RngSubstream;

/// Tolerance on `|v| = 1` for inputs documented as unit vectors.
pub const UNIT_TOL: f64 = 1e-9;

/// `delta, rho` in the open unit interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartitionParams {
    delta: f64,
    rho: f64,
}

impl PartitionParams {
    pub fn new(delta: f64, rho: f64) -> Result<Self> {
        for (name, x) in [("delta", delta), ("rho", rho)] {
            if !(x > 0.0 && x < 1.0) {
                return Err(Error::domain(format!("{name} must lie in (0,1), got {x}")));
            }
        }
        Ok(PartitionParams { delta, rho })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_unit(v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::domain("vector must be nonempty"));
    }
    let r = norm(v);
    if !((r - 1.0).abs() <= UNIT_TOL) {
        return Err(Error::domain(format!(
            "expected a unit vector, norm is {r}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlmostConstant {
    pub is_almost_constant: bool,
    /// Midpoint of the fullest window, reported when the test succeeds.
    pub lambda: Option<f64>,
    /// Coordinates in the fullest window.
    pub covered: usize,
    pub required: usize,
}

/// Whether at least `ceil((1 - delta) n)` coordinates lie within `rho/sqrt(n)` of a common value.
pub fn is_almost_constant(v: &[f64], p: &PartitionParams) -> Result<AlmostConstant> {
    check_unit(v)?;
    let n = v.len();
    let required = ((1.0 - p.delta) * n as f64 - 1e-9).ceil().max(0.0) as usize;
    let width = 2.0 * p.rho / (n as f64).sqrt();
    let mut xs = v.to_vec();
    xs.sort_by(f64::total_cmp);
    let (mut best, mut mid) = (0usize, 0.0);
    let mut j = 0;
    for i in 0..n {
        j = j.max(i);
        while j + 1 < n && xs[j + 1] - xs[i] <= width {
            j += 1;
        }
        // windows are visited in increasing order of their left end, so a
        // strict improvement keeps the smallest midpoint among ties
        if j - i + 1 > best {
            best = j - i + 1;
            mid = 0.5 * (xs[i] + xs[j]);
        }
    }
    let ok = best >= required;
    Ok(AlmostConstant {
        is_almost_constant: ok,
        lambda: ok.then_some(mid),
        covered: best,
        required,
    })
}

/// Two index sets, 0-based and ascending; `first` contains the smallest index used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatedSets {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

fn min_set_size(n: usize, delta: f64) -> usize {
    ((delta * n as f64 / 8.0) - 1e-9).ceil().max(1.0) as usize
}

/// Checks `|s1|, |s2| >= delta n / 8`, disjointness, and
/// `rho/sqrt(2n) <= |v_i - v_j| <= 6/sqrt(delta n)` for all `i in s1, j in s2`.
pub fn check_separated(v: &[f64], p: &PartitionParams, s: &SeparatedSets) -> bool {
    let n = v.len() as f64;
    let k = min_set_size(v.len(), p.delta);
    let (lo, hi) = (p.rho / (2.0 * n).sqrt(), 6.0 / (p.delta * n).sqrt());
    if s.first.len() < k || s.second.len() < k {
        return false;
    }
    if s.first.iter().chain(&s.second).any(|&i| i >= v.len())
        || s.first.iter().any(|i| s.second.contains(i))
    {
        return false;
    }
    s.first.iter().all(|&i| {
        s.second.iter().all(|&j| {
            let d = (v[i] - v[j]).abs();
            lo <= d && d <= hi
        })
    })
}

/// Finds two index sets whose values are uniformly separated.
///
/// Only coordinates with `|v_k| <= 3/sqrt(delta n)` are used, so every
/// difference is at most `6/sqrt(delta n)`. These are sorted and split at the
/// widest gap of at least `rho/sqrt(2n)` leaving at least `delta n / 8` indices
/// on each side; if no single gap qualifies, the lowest and highest
/// `ceil(delta n / 8)` values are tried. `None` when neither works.
pub fn find_separated_sets(v: &[f64], p: &PartitionParams) -> Result<Option<SeparatedSets>> {
    check_unit(v)?;
    let n = v.len();
    let bound = 3.0 / (p.delta * n as f64).sqrt();
    let sep = p.rho / (2.0 * n as f64).sqrt();
    let k = min_set_size(n, p.delta);
    let mut idx: Vec<usize> = (0..n).filter(|&i| v[i].abs() <= bound).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));
    if idx.len() < 2 * k {
        return Ok(None);
    }
    let mut split: Option<(usize, f64)> = None;
    for s in k..=idx.len() - k {
        let gap = v[idx[s]] - v[idx[s - 1]];
        if gap >= sep && split.is_none_or(|(_, g)| gap > g) {
            split = Some((s, gap));
        }
    }
    let (low, high) = match split {
        Some((s, _)) => (idx[..s].to_vec(), idx[s..].to_vec()),
        None => (idx[..k].to_vec(), idx[idx.len() - k..].to_vec()),
    };
    let candidate = order_sets(low, high);
    Ok(check_separated(v, p, &candidate).then_some(candidate))
}

fn order_sets(mut a: Vec<usize>, mut b: Vec<usize>) -> SeparatedSets {
    a.sort_unstable();
    b.sort_unstable();
    if a[0] < b[0] {
        SeparatedSets {
            first: a,
            second: b,
        }
    } else {
        SeparatedSets {
            first: b,
            second: a,
        }
    }
}

/// Distance from a unit vector to the unit vectors supported on at most
/// `floor(delta n)` coordinates: `sqrt(2 - 2t)`, `t` the norm of the largest
/// `floor(delta n)` magnitudes.
pub fn compressibility_distance(x: &[f64], delta: f64) -> Result<f64> {
    check_unit(x)?;
    if !(delta >= 0.0) {
        return Err(Error::domain(format!(
            "delta must be nonnegative, got {delta}"
        )));
    }
    let n = x.len();
    let k = ((delta * n as f64 + 1e-9).floor() as usize).min(n);
    if k == 0 {
        return Ok(std::f64::consts::SQRT_2);
    }
    let mut sq: Vec<f64> = x.iter().map(|a| a * a).collect();
    sq.sort_by(|a, b| b.total_cmp(a));
    let t = sq[..k].iter().sum::<f64>().sqrt().min(1.0);
    Ok((2.0 - 2.0 * t).max(0.0).sqrt())
}

/// Rounds `v` near a net point `x` to `w = x + y`, where `y` has
/// `floor(k)` leading entries `beta s / sqrt(n)`, `k = |<v - x, 1>| sqrt(n) / beta`
/// and `s` the sign of `<v - x, 1>`. Requires `|v - x| <= beta`; guarantees
/// `|v - w| <= 2 beta` and `|<v - w, 1>| <= beta / sqrt(n)`.
pub fn round_to_net(v: &[f64], x: &[f64], beta: f64) -> Result<Vec<f64>> {
    if v.len() != x.len() || v.is_empty() {
        return Err(Error::domain("v and x must be nonempty with equal length"));
    }
    if !(beta > 0.0) {
        return Err(Error::domain(format!("beta must be positive, got {beta}")));
    }
    let n = v.len();
    let diff: Vec<f64> = v.iter().zip(x).map(|(a, b)| a - b).collect();
    let dist = norm(&diff);
    if !(dist <= beta) {
        return Err(Error::domain(format!(
            "|v - x| = {dist} exceeds beta = {beta}"
        )));
    }
    let rootn = (n as f64).sqrt();
    let sum: f64 = diff.iter().sum();
    let k = (sum.abs() * rootn / beta).floor().min(n as f64) as usize;
    let step = beta * sum.signum() / rootn;
    let mut w = x.to_vec();
    for wi in &mut w[..k] {
        *wi += step;
    }
    let resid: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a - b).collect();
    let slack = 1e-12 * (1.0 + beta);
    let (r_norm, r_sum) = (norm(&resid), resid.iter().sum::<f64>().abs());
    if r_norm > 2.0 * beta + slack || r_sum > beta / rootn + slack {
        return Err(Error::domain(format!(
            "rounding guarantees failed: |v - w| = {r_norm}, |<v - w, 1>| = {r_sum}"
        )));
    }
    Ok(w)
}

/// Maximum Gaussian draws tried by [`random_non_almost_constant`].
pub const MAX_REJECTION_ATTEMPTS: usize = 10_000;

/// A uniformly random unit vector conditioned on not being almost-constant
/// (rejection sampling from normalised Gaussians).
pub fn random_non_almost_constant(
    n: usize,
    p: &PartitionParams,
    rng: &mut RngSubstream,
) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::domain("dimension must be at least 2"));
    }
    for _ in 0..MAX_REJECTION_ATTEMPTS {
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let r = norm(&v);
        if r == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= r);
        if !is_almost_constant(&v, p)?.is_almost_constant {
            return Ok(v);
        }
    }
    Err(Error::ResourceCap {
        what: "rejection sampling of non-almost-constant vectors".into(),
        needed: MAX_REJECTION_ATTEMPTS as u128 + 1,
        cap: MAX_REJECTION_ATTEMPTS as u128,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use approx::assert_abs_diff_eq;

    fn pp(d: f64, r: f64) -> PartitionParams {
        PartitionParams::new(d, r).unwrap()
    }

    fn e1(n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        v
    }

    #[test]
    fn almost_constant_examples() {
        let n = 9;
        let flat = vec![1.0 / 3.0; n];
        let r = is_almost_constant(&flat, &pp(0.1, 0.1)).unwrap();
        assert!(r.is_almost_constant);
        assert_abs_diff_eq!(r.lambda.unwrap(), 1.0 / 3.0, epsilon = 1e-15);

        let r = is_almost_constant(&e1(100), &pp(0.05, 0.1)).unwrap();
        assert!(r.is_almost_constant);
        assert_eq!(r.lambda, Some(0.0));
        assert_eq!(r.covered, 99);

        let r = is_almost_constant(&[0.5, 0.5, -0.5, -0.5], &pp(0.1, 0.1)).unwrap();
        assert!(!r.is_almost_constant);
        assert_eq!(r.lambda, None);
        assert!(is_almost_constant(&[1.0, 1.0], &pp(0.1, 0.1)).is_err());
    }

    #[test]
    fn lambda_ties_take_smallest_midpoint() {
        // two clusters of equal size; delta permits either
        let v = [-0.5, -0.5, 0.5, 0.5];
        let r = is_almost_constant(&v, &pp(0.5, 0.1)).unwrap();
        assert_eq!(r.lambda, Some(-0.5));
    }

    #[test]
    fn separated_sets_examples() {
        let v = [0.5, 0.5, -0.5, -0.5];
        let s = find_separated_sets(&v, &pp(0.5, 0.5)).unwrap().unwrap();
        assert_eq!(s.first, vec![0, 1]);
        assert_eq!(s.second, vec![2, 3]);
        assert!(find_separated_sets(&[0.5; 4], &pp(0.5, 0.5))
            .unwrap()
            .is_none());
    }

    #[test]
    fn generated_vectors_separate() {
        let p = pp(0.5, 0.5);
        for i in 0..100 {
            let v = random_non_almost_constant(32, &p, &mut substream(11, i)).unwrap();
            let s = find_separated_sets(&v, &p)
                .unwrap()
                .expect("separated sets");
            assert!(check_separated(&v, &p, &s));
        }
    }

    #[test]
    fn compressibility_examples() {
        assert_eq!(compressibility_distance(&e1(10), 0.1).unwrap(), 0.0);
        let flat = vec![0.1; 100];
        assert_abs_diff_eq!(
            compressibility_distance(&flat, 0.01).unwrap(),
            (2.0f64 - 0.2).sqrt(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            compressibility_distance(&flat, 1.0).unwrap(),
            0.0,
            epsilon = 1e-7
        );
        assert_eq!(
            compressibility_distance(&flat, 0.001).unwrap(),
            std::f64::consts::SQRT_2
        );
    }

    #[test]
    fn rounding_examples() {
        let x = [0.3, -0.1, 0.2, 0.4];
        assert_eq!(round_to_net(&x, &x, 0.5).unwrap(), x.to_vec());
        let v = [0.4, 0.0, 0.2, 0.4];
        let w = round_to_net(&v, &x, 0.5).unwrap();
        assert_eq!(w, x.to_vec());
        let s: f64 = v.iter().zip(&w).map(|(a, b)| a - b).sum();
        assert_abs_diff_eq!(s, 0.2, epsilon = 1e-15);
        assert!(round_to_net(&v, &x, 0.1).is_err());
    }
}
