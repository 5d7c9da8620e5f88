//! Difference vectors and the combinatorial least common denominator.
//!
//! For a target vector `t` the search computes
//!
//! ```text
//! inf { theta > 0 : dist(theta t, Z^N) < min(slope * theta * |t|, cap) }
//! ```
//!
//! with `t = D(v)` (plain variant, slope `gamma`, cap `alpha`) or
//! `t = D(a) ⊗ D(v)` (tensor variant, slope `u`, cap `L`).
//!
//! `theta -> dist(theta t, Z^N)` is `|t|`-Lipschitz and the right-hand side
//! is `slope |t|`-Lipschitz, so the margin between them moves by at most
//! `(1 + slope) |t|` per unit of `theta`. The scan steps by
//! `margin / ((1 + slope) |t|)`, which cannot skip a crossing, and falls back
//! to a fixed floor step only where the margin is nearly zero. The first
//! admissible point is then pinned by bisection.

use crate::error::{Error, Result};

/// Largest `n` for which `D(a) ⊗ D(v)` (length `C(n,2)^2`) is materialised.
pub const TENSOR_MAX_N: usize = 40;

/// `D(v)`: entries `v_i - v_j` for `i < j`, pairs in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceVector {
    n: usize,
    entries: Vec<f64>,
}

impl DifferenceVector {
    pub fn source_dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        euclid(&self.entries)
    }

    /// Entry for the pair `(i, j)`, `i < j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < j && j < self.n, "pair ({i},{j}) out of range");
        // pairs before row i: i*n - i*(i+1)/2
        self.entries[i * self.n - i * (i + 1) / 2 + (j - i - 1)]
    }
}

pub fn difference_vector(v: &[f64]) -> Result<DifferenceVector> {
    let n = v.len();
    if n < 2 {
        return Err(Error::domain("difference vector needs n >= 2"));
    }
    let mut entries = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            entries.push(v[i] - v[j]);
        }
    }
    Ok(DifferenceVector { n, entries })
}

/// `D(a) ⊗ D(v)`: entries `(a_i - a_j)(v_k - v_l)` ordered by `((i,j),(k,l))`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorDifference {
    n: usize,
    entries: Vec<f64>,
    norm: f64,
}

impl TensorDifference {
    pub fn source_dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `|D(a)| * |D(v)|`, equal to the Euclidean norm of the entries.
    pub fn norm(&self) -> f64 {
        self.norm
    }
}

pub fn tensor_difference(a: &[f64], v: &[f64]) -> Result<TensorDifference> {
    if a.len() != v.len() {
        return Err(Error::domain("a and v must have equal length"));
    }
    let n = a.len();
    if n > TENSOR_MAX_N {
        return Err(Error::ResourceCap {
            what: format!("tensor difference for n={n}"),
            needed: (n as u128 * (n as u128 - 1) / 2).pow(2),
            cap: (TENSOR_MAX_N as u128 * (TENSOR_MAX_N as u128 - 1) / 2).pow(2),
        });
    }
    let da = difference_vector(a)?;
    let dv = difference_vector(v)?;
    let mut entries = Vec::with_capacity(da.entries.len() * dv.entries.len());
    for &x in &da.entries {
        entries.extend(dv.entries.iter().map(|&y| x * y));
    }
    Ok(TensorDifference {
        n,
        entries,
        norm: da.norm() * dv.norm(),
    })
}

fn euclid(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Euclidean distance from `w` to the integer lattice; half-integers round to even.
pub fn lattice_distance(w: &[f64]) -> f64 {
    scaled_lattice_distance(w, 1.0)
}

fn scaled_lattice_distance(w: &[f64], theta: f64) -> f64 {
    w.iter()
        .map(|&x| {
            let y = theta * x;
            let r = y - y.round_ties_even();
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

/// Parameters of one CLCD search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClcdQuery {
    /// `alpha` (plain) or `L` (tensor).
    pub cap: f64,
    /// `gamma` (plain) or `u` (tensor), in `(0, 1)`.
    pub slope: f64,
    /// Largest `theta` examined.
    pub horizon: f64,
    pub bracket_tol: f64,
    /// Strict `<` is tested as `< rhs + slack`.
    pub slack: f64,
}

impl ClcdQuery {
    pub const DEFAULT_HORIZON: f64 = 1e6;
    pub const DEFAULT_BRACKET_TOL: f64 = 1e-9;
    pub const DEFAULT_SLACK: f64 = 1e-12;

    pub fn new(cap: f64, slope: f64) -> Result<Self> {
        let q = ClcdQuery {
            cap,
            slope,
            horizon: Self::DEFAULT_HORIZON,
            bracket_tol: Self::DEFAULT_BRACKET_TOL,
            slack: Self::DEFAULT_SLACK,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn with_horizon(mut self, horizon: f64) -> Result<Self> {
        self.horizon = horizon;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.slope > 0.0 && self.slope < 1.0) {
            return Err(Error::domain(format!(
                "slope must lie in (0,1), got {}",
                self.slope
            )));
        }
        if !(self.cap > 0.0) {
            return Err(Error::domain(format!(
                "cap must be positive, got {}",
                self.cap
            )));
        }
        if !(self.horizon > 0.0) || !(self.bracket_tol > 0.0) || !(self.slack >= 0.0) {
            return Err(Error::domain(
                "horizon and bracket tolerance must be positive, slack nonnegative",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClcdStatus {
    Finite,
    InfiniteWithinHorizon,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClcdResult {
    pub status: ClcdStatus,
    /// The infimum, up to the bracket tolerance, when finite.
    pub value: Option<f64>,
    /// Nearest lattice point to `value * target`.
    pub witness: Option<Vec<i64>>,
    /// No admissible `theta` lies below `value - certified_gap`.
    pub certified_gap: f64,
    /// Scan steps that used the floor step instead of a Lipschitz-certified one.
    pub uncertified_steps: usize,
    pub horizon: f64,
    pub slack: f64,
    /// The target was zero, so the admissible set is empty outright.
    pub empty_target: bool,
}

impl ClcdResult {
    pub fn is_finite(&self) -> bool {
        self.status == ClcdStatus::Finite
    }

    /// The value when finite; otherwise `+inf` for an empty admissible set or
    /// the horizon, a lower bound on the true value.
    pub fn value_or_horizon(&self) -> f64 {
        match (self.value, self.empty_target) {
            (Some(v), _) => v,
            (None, true) => f64::INFINITY,
            (None, false) => self.horizon,
        }
    }

    fn infinite(q: &ClcdQuery, empty_target: bool, uncertified_steps: usize) -> Self {
        ClcdResult {
            status: ClcdStatus::InfiniteWithinHorizon,
            value: None,
            witness: None,
            certified_gap: q.bracket_tol,
            uncertified_steps,
            horizon: q.horizon,
            slack: q.slack,
            empty_target,
        }
    }
}

/// `dist(theta t, Z^N) - min(slope theta |t|, cap)`.
fn margin(target: &[f64], norm: f64, theta: f64, q: &ClcdQuery) -> f64 {
    scaled_lattice_distance(target, theta) - (q.slope * theta * norm).min(q.cap)
}

/// Certified search for the CLCD infimum of `target`.
pub fn clcd_search(target: &[f64], q: &ClcdQuery) -> Result<ClcdResult> {
    q.validate()?;
    if target.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("target must be finite"));
    }
    let norm = euclid(target);
    let sup = target.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if norm == 0.0 {
        return Ok(ClcdResult::infinite(q, true, 0));
    }
    let lip = (1.0 + q.slope) * norm;
    let admissible = |m: f64| m < q.slack;

    // below 1/(2 max|t_k|) every coordinate rounds to zero, so the distance
    // is theta |t| > slope theta |t| and nothing is admissible
    let mut theta = 0.5 / sup;
    let mut m = margin(target, norm, theta, q);
    let mut uncertified = 0usize;
    if admissible(m) {
        return Ok(finish(target, theta, q, uncertified));
    }
    while theta <= q.horizon {
        let mut step = m / lip;
        if step < q.bracket_tol {
            step = q.bracket_tol;
            uncertified += 1;
        }
        let next = theta + step;
        let m_next = margin(target, norm, next, q);
        if admissible(m_next) {
            let (mut lo, mut hi) = (theta, next);
            while hi - lo > q.bracket_tol {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if admissible(margin(target, norm, mid, q)) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            if hi > q.horizon {
                break;
            }
            return Ok(finish(target, hi, q, uncertified));
        }
        theta = next;
        m = m_next;
    }
    Ok(ClcdResult::infinite(q, false, uncertified))
}

fn finish(target: &[f64], theta: f64, q: &ClcdQuery, uncertified_steps: usize) -> ClcdResult {
    let witness = target
        .iter()
        .map(|&x| (theta * x).round_ties_even() as i64)
        .collect();
    ClcdResult {
        status: ClcdStatus::Finite,
        value: Some(theta),
        witness: Some(witness),
        certified_gap: q.bracket_tol,
        uncertified_steps,
        horizon: q.horizon,
        slack: q.slack,
        empty_target: false,
    }
}

/// Plain CLCD of `v`: the search on `D(v)`.
pub fn clcd_plain(v: &[f64], q: &ClcdQuery) -> Result<ClcdResult> {
    clcd_search(difference_vector(v)?.entries(), q)
}

/// Tensor CLCD of the pair `(a, v)`: the search on `D(a) ⊗ D(v)`.
pub fn clcd_tensor(a: &[f64], v: &[f64], q: &ClcdQuery) -> Result<ClcdResult> {
    clcd_search(tensor_difference(a, v)?.entries(), q)
}

/// Certified lower bound for `CLCD_{alpha/2, gamma/2}(w)` when `w` is a
/// small perturbation of `v`:
/// `min { CLCD_{alpha,gamma}(v), alpha / (4 sqrt(n) |v - w|) }`.
///
/// Requires `|v - w| < gamma |D(v)| / (5 sqrt(n))`. An infinite-within-horizon
/// CLCD of `v` contributes the horizon, which keeps the bound valid.
pub fn stability_floor(v: &[f64], w: &[f64], q: &ClcdQuery) -> Result<f64> {
    if v.len() != w.len() {
        return Err(Error::domain("v and w must have equal length"));
    }
    let n = v.len() as f64;
    let dv = difference_vector(v)?;
    let gap = euclid(&v.iter().zip(w).map(|(a, b)| a - b).collect::<Vec<_>>());
    let limit = q.slope * dv.norm() / (5.0 * n.sqrt());
    if !(gap < limit) {
        return Err(Error::domain(format!(
            "perturbation {gap} violates |v - w| < {limit}"
        )));
    }
    let clcd = clcd_search(dv.entries(), q)?.value_or_horizon();
    let perturbation = if gap == 0.0 {
        f64::INFINITY
    } else {
        q.cap / (4.0 * n.sqrt() * gap)
    };
    Ok(clcd.min(perturbation))
}
