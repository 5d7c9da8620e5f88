//! Fixed-weight 0/1 vectors and row-regular matrices: sampling and exhaustive
//! enumeration.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::RngSubstream;

/// Default cap on the number of items an exhaustive enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// A 0/1 vector of length `n` with exactly `d` ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FixedWeightVector {
    bits: Vec<u8>,
    weight: usize,
}

impl FixedWeightVector {
    /// Builds the vector whose ones sit at `support` (any order, no repeats).
    pub fn from_support(n: usize, support: &[usize]) -> Result<Self> {
        let mut bits = vec![0u8; n];
        for &i in support {
            if i >= n {
                return Err(Error::domain(format!(
                    "support index {i} out of range for n={n}"
                )));
            }
            if bits[i] == 1 {
                return Err(Error::domain(format!("support index {i} repeated")));
            }
            bits[i] = 1;
        }
        Ok(FixedWeightVector {
            bits,
            weight: support.len(),
        })
    }

    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::domain("bits must be 0 or 1"));
        }
        let weight = bits.iter().filter(|&&b| b == 1).count();
        Ok(FixedWeightVector { bits, weight })
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn d(&self) -> usize {
        self.weight
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn support(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| i)
            .collect()
    }

    /// Inner product with a real vector of the same length.
    pub fn dot(&self, v: &[f64]) -> f64 {
        self.bits
            .iter()
            .zip(v)
            .filter(|(&b, _)| b == 1)
            .map(|(_, x)| x)
            .sum()
    }
}

/// An `m x n` matrix whose rows all have weight `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowRegularMatrix {
    n: usize,
    d: usize,
    rows: Vec<FixedWeightVector>,
}

impl RowRegularMatrix {
    pub fn from_rows(rows: Vec<FixedWeightVector>) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::domain("matrix needs at least one row"))?;
        let (n, d) = (first.n(), first.d());
        if rows.iter().any(|r| r.n() != n || r.d() != d) {
            return Err(Error::domain("rows must share length and weight"));
        }
        Ok(RowRegularMatrix { n, d, rows })
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rows(&self) -> &[FixedWeightVector] {
        &self.rows
    }

    /// Entries as row-major `i64`s.
    pub fn to_integer_rows(&self) -> Vec<Vec<i64>> {
        self.rows
            .iter()
            .map(|r| r.bits().iter().map(|&b| b as i64).collect())
            .collect()
    }

    /// Row-major `f64` entries.
    pub fn to_f64_entries(&self) -> Vec<f64> {
        self.rows
            .iter()
            .flat_map(|r| r.bits().iter().map(|&b| b as f64))
            .collect()
    }

    /// `M v` for a real vector `v` of length `n`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.dot(v)).collect()
    }

    /// `x^T M` for a real vector `x` of length `m`.
    pub fn left_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (row, &xi) in self.rows.iter().zip(x) {
            for (o, &b) in out.iter_mut().zip(row.bits()) {
                if b == 1 {
                    *o += xi;
                }
            }
        }
        out
    }
}

fn check_weight(n: usize, d: usize) -> Result<()> {
    if d > n {
        return Err(Error::domain(format!(
            "weight d={d} exceeds dimension n={n}"
        )));
    }
    Ok(())
}

/// Draws a uniformly random weight-`d` vector of length `n` by a partial
/// Fisher-Yates shuffle of the index array.
pub fn sample_fixed_weight(
    n: usize,
    d: usize,
    rng: &mut RngSubstream,
) -> Result<FixedWeightVector> {
    check_weight(n, d)?;
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..d {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    FixedWeightVector::from_support(n, &idx[..d])
}

/// Draws `m` independent rows from [`sample_fixed_weight`].
pub fn sample_row_regular(
    m: usize,
    n: usize,
    d: usize,
    rng: &mut RngSubstream,
) -> Result<RowRegularMatrix> {
    if m == 0 || m > n {
        return Err(Error::domain(format!(
            "row count m={m} must satisfy 1 <= m <= n={n}"
        )));
    }
    check_weight(n, d)?;
    let rows = (0..m)
        .map(|_| sample_fixed_weight(n, d, rng))
        .collect::<Result<Vec<_>>>()?;
    RowRegularMatrix::from_rows(rows)
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc = C(n, i); after removing gcd(acc, i + 1) the rest of i + 1 divides n - i
        let g = gcd(acc, (i + 1) as u128);
        let den = (i + 1) as u128 / g;
        match (acc / g).checked_mul((n - i) as u128 / den) {
            Some(v) => acc = v,
            None => return u128::MAX,
        }
    }
    acc
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Calls `visit` once per weight-`d` support of `[0, n)`.
///
/// Supports arrive in increasing order of the bit string read as a binary
/// numeral with coordinate 0 most significant; this is the colexicographic
/// order of the supports counted from the right end, driven by a
/// constant-memory successor rule. The slice handed to `visit` lists the
/// support coordinates in decreasing order.
pub fn for_each_support<F>(n: usize, d: usize, cap: u128, mut visit: F) -> Result<()>
where
    F: FnMut(&[usize]),
{
    check_weight(n, d)?;
    let count = binomial(n as u64, d as u64);
    if count > cap {
        return Err(Error::ResourceCap {
            what: format!("C({n},{d})"),
            needed: count,
            cap,
        });
    }
    // pos[i] counts from the right end: coordinate = n - 1 - pos[i]
    let mut pos: Vec<usize> = (0..d).collect();
    let mut coords: Vec<usize> = pos.iter().map(|&p| n - 1 - p).collect();
    loop {
        visit(&coords);
        let mut i = 0;
        while i < d {
            let limit = if i + 1 < d { pos[i + 1] } else { n };
            if pos[i] + 1 < limit {
                break;
            }
            i += 1;
        }
        if i == d {
            return Ok(());
        }
        pos[i] += 1;
        coords[i] = n - 1 - pos[i];
        for j in 0..i {
            pos[j] = j;
            coords[j] = n - 1 - j;
        }
    }
}

/// Lists every weight-`d` vector of length `n` exactly once, in the order
/// described at [`for_each_support`].
pub fn enumerate_fixed_weight(n: usize, d: usize, cap: u128) -> Result<Vec<FixedWeightVector>> {
    let mut out = Vec::new();
    for_each_support(n, d, cap, |s| {
        out.push(FixedWeightVector::from_support(n, s).expect("enumerated supports are valid"));
    })?;
    Ok(out)
}
