//! Singular values, exact singularity, restricted operator norm and the
//! distance from a row to the span of the others.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::Zero;
use rand_distr::{Distribution, StandardNormal};

use crate::combi::RowRegularMatrix;
use crate::error::{Error, Result};
use crate::rng::substream;

/// Dense real matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    m: usize,
    n: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(m: usize, n: usize, entries: Vec<f64>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::domain("matrix dimensions must be positive"));
        }
        if entries.len() != m * n {
            return Err(Error::domain(format!(
                "expected {} entries, got {}",
                m * n,
                entries.len()
            )));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("matrix entries must be finite"));
        }
        Ok(DenseMatrix { m, n, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::domain("ragged rows"));
        }
        Self::new(rows.len(), n, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        DenseMatrix { m: n, n, entries }
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.n {
            for i in 0..self.m {
                entries.push(self.get(i, j));
            }
        }
        DenseMatrix {
            m: self.n,
            n: self.m,
            entries,
        }
    }

    /// Hilbert-Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.m).map(|i| dot(self.row(i), v)).collect()
    }

    fn to_na(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.m, self.n, &self.entries)
    }
}

impl From<&RowRegularMatrix> for DenseMatrix {
    fn from(q: &RowRegularMatrix) -> Self {
        DenseMatrix {
            m: q.m(),
            n: q.n(),
            entries: q.to_f64_entries(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralOptions {
    /// Relative tolerance for iterative methods.
    pub rel_tol: f64,
    pub max_iterations: usize,
    /// A matrix counts as numerically singular when its smallest singular
    /// value is below `singular_rel_threshold * ||A||_HS`.
    pub singular_rel_threshold: f64,
    /// Largest column count handled by a full SVD; bigger matrices use
    /// inverse iteration.
    pub svd_max_dim: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            rel_tol: 1e-10,
            max_iterations: 10_000,
            singular_rel_threshold: 1e-8,
            svd_max_dim: 256,
        }
    }
}

impl SpectralOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || self.max_iterations == 0 {
            return Err(Error::domain(
                "tolerance must be positive and iterations at least 1",
            ));
        }
        Ok(())
    }

    pub fn singular_threshold(&self, a: &DenseMatrix) -> f64 {
        self.singular_rel_threshold * a.hs_norm()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn singular_values(a: &DMatrix<f64>, opts: &SpectralOptions) -> Result<DVector<f64>> {
    a.clone()
        .try_svd(false, false, f64::EPSILON, opts.max_iterations)
        .map(|svd| svd.singular_values)
        .ok_or(Error::NonConvergence {
            iterations: opts.max_iterations,
            lower: 0.0,
            upper: a.norm(),
        })
}

/// `s_n(A) = min_{|v| = 1} |A v|` for an `m x n` matrix; zero when `m < n`.
pub fn smallest_singular_value(a: &DenseMatrix, opts: &SpectralOptions) -> Result<f64> {
    opts.validate()?;
    if a.m < a.n {
        return Ok(0.0);
    }
    if a.n <= opts.svd_max_dim {
        let sv = singular_values(&a.to_na(), opts)?;
        return Ok(sv.iter().cloned().fold(f64::INFINITY, f64::min));
    }
    smallest_singular_value_inverse_iteration(a, opts)
}

/// Inverse iteration on `A^T A = R^T R`, with `R` from a QR factorisation.
pub fn smallest_singular_value_inverse_iteration(
    a: &DenseMatrix,
    opts: &SpectralOptions,
) -> Result<f64> {
    opts.validate()?;
    if a.m < a.n {
        return Ok(0.0);
    }
    let r = a.to_na().qr().r();
    let scale = r.diagonal().amax();
    if scale == 0.0
        || r.diagonal()
            .iter()
            .any(|&x| x.abs() <= f64::EPSILON * scale)
    {
        return Ok(0.0);
    }
    let mut rng = substream(0x005e_ed5e_ed5e_ed5e, a.n as u64);
    let mut x = DVector::from_fn(a.n, |_, _| StandardNormal.sample(&mut rng));
    x /= x.norm();
    let mut last = f64::INFINITY;
    for _ in 0..opts.max_iterations {
        let y = match r.tr_solve_upper_triangular(&x) {
            Some(y) => y,
            None => return Ok(0.0),
        };
        let z = match r.solve_upper_triangular(&y) {
            Some(z) => z,
            None => return Ok(0.0),
        };
        let lambda = z.norm();
        if !lambda.is_finite() {
            return Ok(0.0);
        }
        x = z / lambda;
        if (lambda - last).abs() <= opts.rel_tol * lambda {
            return Ok((&r * &x).norm());
        }
        last = lambda;
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iterations,
        lower: 0.0,
        upper: (&r * &x).norm(),
    })
}

/// Whether `s_n(A)` falls below the configured floating-point threshold.
pub fn is_numerically_singular(a: &DenseMatrix, opts: &SpectralOptions) -> Result<bool> {
    Ok(smallest_singular_value(a, opts)? < opts.singular_threshold(a))
}

const MERSENNE_61: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MERSENNE_61 as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base);
        }
        base = mulmod(base, base);
        exp >>= 1;
    }
    acc
}

/// Determinant modulo the prime `2^61 - 1`.
fn det_mod_prime(rows: &[Vec<i64>]) -> u64 {
    let p = MERSENNE_61;
    let n = rows.len();
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
        .collect();
    let mut det = 1u64;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| a[i][k] != 0) else {
            return 0;
        };
        if piv != k {
            a.swap(piv, k);
            det = (p - det) % p;
        }
        det = mulmod(det, a[k][k]);
        let inv = powmod(a[k][k], p - 2);
        for i in k + 1..n {
            if a[i][k] == 0 {
                continue;
            }
            let f = mulmod(a[i][k], inv);
            let (top, bottom) = a.split_at_mut(i);
            for (x, &y) in bottom[0][k..].iter_mut().zip(&top[k][k..]) {
                *x = (*x + p - mulmod(f, y)) % p;
            }
        }
    }
    det
}

/// Rank of an integer matrix by Bareiss fraction-free elimination.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for col in 0..n {
        if rank == m {
            break;
        }
        let Some(piv) = (rank..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(piv, rank);
        for i in rank + 1..m {
            for j in col + 1..n {
                let v = &a[i][j] * &a[rank][col] - &a[i][col] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Exact singularity of a square integer matrix. A nonzero determinant modulo
/// a 61-bit prime certifies invertibility; otherwise exact Bareiss
/// elimination over the integers decides.
pub fn is_singular_exact_integer(rows: &[Vec<i64>]) -> Result<bool> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::domain(
            "exact singularity needs a non-empty square matrix",
        ));
    }
    if det_mod_prime(rows) != 0 {
        return Ok(false);
    }
    Ok(integer_rank(rows) < n)
}

pub fn is_singular_exact(a: &RowRegularMatrix) -> Result<bool> {
    is_singular_exact_integer(&a.to_integer_rows())
}

/// `sup { |A v| : |v| = 1, sum(v) = 0 }`, the operator norm of `A` on the
/// mean-zero hyperplane.
pub fn restricted_operator_norm(a: &DenseMatrix, opts: &SpectralOptions) -> Result<f64> {
    opts.validate()?;
    if a.n == 1 {
        return Ok(0.0);
    }
    // A P_H: subtract each row's mean
    let centered = DMatrix::from_fn(a.m, a.n, |i, j| {
        let row = a.row(i);
        row[j] - row.iter().sum::<f64>() / a.n as f64
    });
    let sv = singular_values(&centered, opts)?;
    Ok(sv.iter().cloned().fold(0.0, f64::max))
}

/// Operator norm (largest singular value).
pub fn operator_norm(a: &DenseMatrix, opts: &SpectralOptions) -> Result<f64> {
    let sv = singular_values(&a.to_na(), opts)?;
    Ok(sv.iter().cloned().fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RowSpanDistance {
    pub distance: f64,
    /// Unit normal to the span of the first `n - 1` rows, present only when
    /// that span has full dimension `n - 1`.
    pub normal: Option<Vec<f64>>,
    /// Dimension of the span of the first `n - 1` rows.
    pub span_dim: usize,
}

/// Relative size under which a Gram-Schmidt residual counts as zero.
const SPAN_REL_TOL: f64 = 1e-10;

/// Distance from the last row of a square matrix to the span of the other
/// rows, plus the unit normal of that span when it is a hyperplane.
pub fn row_span_distance(a: &DenseMatrix) -> Result<RowSpanDistance> {
    if a.m != a.n {
        return Err(Error::domain("row_span_distance needs a square matrix"));
    }
    let n = a.n;
    // modified Gram-Schmidt with one reorthogonalisation pass
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let row = a.row(i);
        let r = residual(row, &basis);
        let rn = norm(&r);
        if rn > SPAN_REL_TOL * norm(row).max(1.0) {
            basis.push(r.iter().map(|x| x / rn).collect());
        }
    }
    let last = a.row(n - 1);
    let mut distance = norm(&residual(last, &basis));
    if distance <= SPAN_REL_TOL * norm(last).max(1.0) {
        distance = 0.0;
    }
    let span_dim = basis.len();
    let normal = if span_dim == n - 1 {
        Some(hyperplane_normal(a)?)
    } else {
        None
    };
    Ok(RowSpanDistance {
        distance,
        normal,
        span_dim,
    })
}

fn residual(x: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut r = x.to_vec();
    for _ in 0..2 {
        for q in basis {
            let c = dot(&r, q);
            r.iter_mut().zip(q).for_each(|(ri, qi)| *ri -= c * qi);
        }
    }
    r
}

/// Right singular vector of the smallest singular value of the first `n - 1`
/// rows padded with a zero row.
fn hyperplane_normal(a: &DenseMatrix) -> Result<Vec<f64>> {
    let n = a.n;
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let padded = DMatrix::from_fn(n, n, |i, j| if i + 1 < n { a.get(i, j) } else { 0.0 });
    let svd = padded
        .try_svd(false, true, f64::EPSILON, 10_000)
        .ok_or(Error::NonConvergence {
            iterations: 10_000,
            lower: 0.0,
            upper: 0.0,
        })?;
    let v_t = svd.v_t.expect("requested V");
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &s)| {
            if s < svd.singular_values[best] {
                i
            } else {
                best
            }
        });
    let v: Vec<f64> = v_t.row(k).iter().cloned().collect();
    let len = norm(&v);
    Ok(v.into_iter().map(|x| x / len).collect())
}
