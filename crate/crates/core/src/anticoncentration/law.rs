use std::ops::Range;

use crate::combi::for_each_support;
use crate::error::{Error, Result};

/// Atoms closer than this are merged when a law is built.
pub const ATOM_MERGE_TOL: f64 = 1e-12;

/// Largest `n` for which the permutation law is enumerated (`n!` terms).
pub const MAX_PERMUTATION_N: usize = 10;

/// A finitely supported law on the real line: strictly increasing atoms with
/// positive probabilities summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicDistribution {
    values: Vec<f64>,
    probs: Vec<f64>,
}

impl AtomicDistribution {
    /// Builds a law from `(value, probability)` pairs in any order. Atoms
    /// within [`ATOM_MERGE_TOL`] of a cluster's smallest value are merged and
    /// zero-probability atoms dropped.
    pub fn from_probabilities(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms
            .iter()
            .any(|(x, p)| !x.is_finite() || !p.is_finite() || *p < 0.0)
        {
            return Err(Error::domain(
                "atoms need finite values and nonnegative probabilities",
            ));
        }
        atoms.retain(|&(_, p)| p > 0.0);
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut values: Vec<f64> = Vec::new();
        let mut probs: Vec<f64> = Vec::new();
        let mut anchor = f64::NEG_INFINITY;
        for (x, p) in atoms {
            if x - anchor <= ATOM_MERGE_TOL {
                *probs.last_mut().expect("anchor set") += p;
            } else {
                anchor = x;
                values.push(x);
                probs.push(p);
            }
        }
        let total: f64 = probs.iter().sum();
        if values.is_empty() || (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(AtomicDistribution { values, probs })
    }

    /// Builds the law putting mass proportional to each count. Merged atoms
    /// add their integer counts before dividing, so probabilities are exact
    /// ratios.
    pub fn from_counts(mut atoms: Vec<(f64, u64)>) -> Result<Self> {
        if atoms.iter().any(|(x, _)| !x.is_finite()) {
            return Err(Error::domain("atom values must be finite"));
        }
        atoms.retain(|&(_, c)| c > 0);
        if atoms.is_empty() {
            return Err(Error::domain("a law needs at least one atom"));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, u64)> = Vec::new();
        for (x, c) in atoms {
            match merged.last_mut() {
                Some((anchor, acc)) if x - *anchor <= ATOM_MERGE_TOL => *acc += c,
                _ => merged.push((x, c)),
            }
        }
        let total: u64 = merged.iter().map(|(_, c)| c).sum();
        let (values, probs) = merged
            .into_iter()
            .map(|(x, c)| (x, c as f64 / total as f64))
            .unzip();
        Ok(AtomicDistribution { values, probs })
    }

    /// The law of a sample, each value weighted equally.
    pub fn empirical(samples: &[f64]) -> Result<Self> {
        Self::from_counts(samples.iter().map(|&x| (x, 1)).collect())
    }

    pub fn point_mass(x: f64) -> Self {
        AtomicDistribution {
            values: vec![x],
            probs: vec![1.0],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().cloned().zip(self.probs.iter().cloned())
    }

    /// Probability of the atom at `x` (within the merge tolerance), zero otherwise.
    pub fn mass_at(&self, x: f64) -> f64 {
        self.atoms()
            .filter(|(y, _)| (y - x).abs() <= ATOM_MERGE_TOL)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn moment(&self, k: i32) -> f64 {
        self.atoms().map(|(x, p)| p * x.powi(k)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn max_atom(&self) -> f64 {
        self.probs.iter().cloned().fold(0.0, f64::max)
    }
}

/// Exact law of `W_v = sum_i eta_i v_i` with `eta` uniform over the weight-`d`
/// 0/1 vectors, by enumerating all `C(n, d)` supports.
pub fn exact_law_w(v: &[f64], d: usize, cap: u128) -> Result<AtomicDistribution> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("v must be finite"));
    }
    let mut sums = Vec::new();
    for_each_support(v.len(), d, cap, |s| {
        sums.push(s.iter().map(|&i| v[i]).sum::<f64>())
    })?;
    AtomicDistribution::from_counts(sums.into_iter().map(|x| (x, 1)).collect())
}

/// Exact law of `W_{a,v} = sum_i a_i v_{sigma(i)}` over uniform permutations
/// `sigma`, for `n <= 10`.
pub fn exact_law_w_perm(a: &[f64], v: &[f64]) -> Result<AtomicDistribution> {
    let n = a.len();
    if v.len() != n {
        return Err(Error::domain("a and v must have equal length"));
    }
    if n == 0 {
        return Err(Error::domain("vectors must be non-empty"));
    }
    if n > MAX_PERMUTATION_N {
        let needed = (1..=n as u128).product();
        return Err(Error::ResourceCap {
            what: format!("{n}! permutations"),
            needed,
            cap: 3_628_800,
        });
    }
    // Heap's algorithm, iterative form
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let eval = |p: &[usize]| a.iter().zip(p).map(|(ai, &j)| ai * v[j]).sum::<f64>();
    let mut sums = vec![eval(&perm)];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sums.push(eval(&perm));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    AtomicDistribution::from_counts(sums.into_iter().map(|x| (x, 1)).collect())
}

/// `E[W_v^2]` for `d = n/2`:
/// `(n-2) r^2 / (4(n-1)) + |v|^2 n / (4(n-1))` with `r = |sum v_i|`.
pub fn expected_square_w(v: &[f64], d: usize) -> Result<f64> {
    let n = v.len();
    if n < 2 || !n.is_multiple_of(2) || 2 * d != n {
        return Err(Error::domain(format!(
            "second-moment formula needs even n and d = n/2 (n={n}, d={d})"
        )));
    }
    let nf = n as f64;
    let r: f64 = v.iter().sum();
    let norm_sq: f64 = v.iter().map(|x| x * x).sum();
    Ok((nf - 2.0) * r * r / (4.0 * (nf - 1.0)) + norm_sq * nf / (4.0 * (nf - 1.0)))
}

/// Monte Carlo draws together with the substreams that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
    provenance: Option<(u64, Range<u64>)>,
}

impl SampleSet {
    pub fn new(values: Vec<f64>, seed: u64, streams: Range<u64>) -> Result<Self> {
        Self::validate(&values)?;
        Ok(SampleSet {
            values,
            provenance: Some((seed, streams)),
        })
    }

    /// Samples of unrecorded origin.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::validate(&values)?;
        Ok(SampleSet {
            values,
            provenance: None,
        })
    }

    fn validate(values: &[f64]) -> Result<()> {
        if values.is_empty() {
            return Err(Error::domain("sample set is empty"));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("samples must be finite"));
        }
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> Option<&(u64, Range<u64>)> {
        self.provenance.as_ref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<SampleSet> {
        let values: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        Self::validate(&values)?;
        Ok(SampleSet {
            values,
            provenance: self.provenance.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combi::DEFAULT_ENUMERATION_CAP;
    use approx::assert_abs_diff_eq;

    fn atoms(d: &AtomicDistribution) -> Vec<(f64, f64)> {
        d.atoms().collect()
    }

    #[test]
    fn law_w_small_examples() {
        let cap = DEFAULT_ENUMERATION_CAP;
        assert_eq!(
            atoms(&exact_law_w(&[1.0, 0.0], 1, cap).unwrap()),
            vec![(0.0, 0.5), (1.0, 0.5)]
        );
        let law = exact_law_w(&[1.0, 1.0, 0.0, 0.0], 2, cap).unwrap();
        assert_eq!(law.values(), &[0.0, 1.0, 2.0]);
        assert_abs_diff_eq!(law.probabilities()[0], 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(law.probabilities()[1], 4.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(law.probabilities()[2], 1.0 / 6.0, epsilon = 1e-15);
        assert_eq!(
            atoms(&exact_law_w(&[0.0; 6], 3, cap).unwrap()),
            vec![(0.0, 1.0)]
        );
    }

    #[test]
    fn law_w_perm_examples() {
        assert_eq!(
            atoms(&exact_law_w_perm(&[1.0, 0.0], &[1.0, 0.0]).unwrap()),
            vec![(0.0, 0.5), (1.0, 0.5)]
        );
        let c = exact_law_w_perm(&[2.0; 4], &[1.0, -3.0, 0.5, 4.0]).unwrap();
        assert_eq!(atoms(&c), vec![(5.0, 1.0)]);
        let law = exact_law_w_perm(&[1.0, 2.0, 3.0], &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(law.values(), &[1.0, 2.0, 3.0]);
        for p in law.probabilities() {
            assert_eq!(*p, 1.0 / 3.0);
        }
    }

    #[test]
    fn permutation_cap() {
        assert!(matches!(
            exact_law_w_perm(&[0.0; 11], &[0.0; 11]),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn second_moment_examples() {
        assert_abs_diff_eq!(
            expected_square_w(&[1.0, 0.0, 0.0, 0.0], 2).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        let s = 0.5f64.sqrt();
        assert_abs_diff_eq!(
            expected_square_w(&[s, -s, 0.0, 0.0], 2).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-15
        );
        assert_eq!(expected_square_w(&[0.0; 4], 2).unwrap(), 0.0);
        assert!(expected_square_w(&[1.0, 0.0, 0.0, 0.0], 1).is_err());
        assert!(expected_square_w(&[1.0, 0.0, 0.0], 1).is_err());
    }

    #[test]
    fn merge_tolerance_collapses_rounding_noise() {
        let law =
            AtomicDistribution::from_counts(vec![(0.3, 1), (0.1 + 0.2, 1), (1.0, 2)]).unwrap();
        assert_eq!(law.len(), 2);
        assert_eq!(law.probabilities(), &[0.5, 0.5]);
    }

    #[test]
    fn invalid_laws_rejected() {
        assert!(AtomicDistribution::from_probabilities(vec![(0.0, 0.5)]).is_err());
        assert!(AtomicDistribution::from_probabilities(vec![(f64::NAN, 1.0)]).is_err());
        assert!(AtomicDistribution::from_counts(vec![]).is_err());
        assert!(SampleSet::from_values(vec![]).is_err());
        assert!(SampleSet::from_values(vec![f64::INFINITY]).is_err());
    }
}
