//! Property-based invariants.

use combilab_core::anticoncentration::{exact_law_w, levy_exact, AtomicDistribution};
use combilab_core::clcd::{
    clcd_search, difference_vector, lattice_distance, tensor_difference, ClcdQuery,
};
use combilab_core::combi::{sample_fixed_weight, DEFAULT_ENUMERATION_CAP};
use combilab_core::sphere::{
    compressibility_distance, is_almost_constant, round_to_net, PartitionParams,
};
use combilab_core::substream;
use proptest::prelude::*;

fn unit(v: Vec<f64>) -> Option<Vec<f64>> {
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (r > 1e-3).then(|| v.into_iter().map(|x| x / r).collect())
}

fn law() -> impl Strategy<Value = AtomicDistribution> {
    prop::collection::vec((-20i32..20, 1u64..10), 1..8).prop_map(|atoms| {
        AtomicDistribution::from_counts(
            atoms
                .into_iter()
                .map(|(x, c)| (x as f64 / 4.0, c))
                .collect(),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fixed_weight_samples_have_weight(n in 1usize..64, frac in 0.0f64..=1.0, seed: u64, idx: u64) {
        let d = (frac * n as f64).floor() as usize;
        let v = sample_fixed_weight(n, d, &mut substream(seed, idx)).unwrap();
        prop_assert_eq!(v.n(), n);
        prop_assert_eq!(v.bits().iter().filter(|&&b| b == 1).count(), d);
    }

    #[test]
    fn levy_is_monotone_and_bounded(dist in law(), e1 in 0.0f64..3.0, e2 in 0.0f64..3.0) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let (a, b) = (levy_exact(&dist, lo).unwrap(), levy_exact(&dist, hi).unwrap());
        prop_assert!(a <= b + 1e-15);
        prop_assert!(b <= 1.0 + 1e-12);
        prop_assert_eq!(levy_exact(&dist, 0.0).unwrap(), dist.max_atom());
    }

    #[test]
    fn exact_law_is_a_probability(v in prop::collection::vec(-3.0f64..3.0, 1..10), frac in 0.0f64..=1.0) {
        let d = (frac * v.len() as f64).round() as usize;
        let law = exact_law_w(&v, d, DEFAULT_ENUMERATION_CAP).unwrap();
        let total: f64 = law.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(law.values().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn lattice_distance_is_bounded(w in prop::collection::vec(-50.0f64..50.0, 1..20)) {
        let d = lattice_distance(&w);
        prop_assert!(d <= 0.5 * (w.len() as f64).sqrt() + 1e-12);
        let shifted: Vec<f64> = w.iter().map(|x| x + 3.0).collect();
        prop_assert!((lattice_distance(&shifted) - d).abs() < 1e-9);
    }

    #[test]
    fn tensor_norm_identity(a in prop::collection::vec(-2.0f64..2.0, 2..8), seed: u64) {
        let n = a.len();
        let mut rng = substream(seed, 0);
        let v: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(&mut rng, -2.0..2.0)).collect();
        let t = tensor_difference(&a, &v).unwrap();
        let direct = t.entries().iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((direct - t.norm()).abs() <= 1e-12 * (1.0 + direct));
        prop_assert_eq!(t.entries().len(), (n * (n - 1) / 2).pow(2));
    }

    #[test]
    fn clcd_witness_satisfies_inequality(v in prop::collection::vec(-1.0f64..1.0, 2..8), gamma in 0.05f64..0.9, alpha in 0.05f64..5.0) {
        let q = ClcdQuery::new(alpha, gamma).unwrap().with_horizon(1e3).unwrap();
        let t = difference_vector(&v).unwrap();
        let r = clcd_search(t.entries(), &q).unwrap();
        if let (Some(theta), Some(p)) = (r.value, &r.witness) {
            let d: f64 = t.entries().iter().zip(p).map(|(x, &k)| (theta * x - k as f64).powi(2)).sum::<f64>().sqrt();
            prop_assert!(d < (gamma * theta * t.norm()).min(alpha) + r.slack);
            prop_assert!((d - lattice_distance(&t.entries().iter().map(|x| theta * x).collect::<Vec<_>>())).abs() < 1e-12);
        }
    }

    #[test]
    fn clcd_scales_inversely(v in prop::collection::vec(-1.0f64..1.0, 2..7), c in 0.25f64..4.0) {
        let t = difference_vector(&v).unwrap();
        prop_assume!(t.norm() > 1e-2);
        let q = ClcdQuery::new(1e9, 0.3).unwrap().with_horizon(1e3).unwrap();
        let base = clcd_search(t.entries(), &q).unwrap();
        let scaled: Vec<f64> = t.entries().iter().map(|x| x / c).collect();
        let q2 = q.with_horizon(1e3 * c).unwrap();
        let r = clcd_search(&scaled, &q2).unwrap();
        match (base.value, r.value) {
            (Some(a), Some(b)) => prop_assert!((b - c * a).abs() <= 1e-7 * (1.0 + c * a), "{} vs {}", b, c * a),
            (None, None) => {}
            (a, b) => prop_assert!(false, "finite mismatch {:?} {:?}", a, b),
        }
    }

    #[test]
    fn tensor_clcd_specialises(v in prop::collection::vec(-1.0f64..1.0, 1..4), gamma in 0.1f64..0.9, alpha in 0.1f64..2.0) {
        // n = 2 * len, a has n/2 leading ones
        let n = 2 * v.len();
        let v: Vec<f64> = v.iter().chain(v.iter().map(|x| x * 0.37).collect::<Vec<_>>().iter()).cloned().collect();
        let a: Vec<f64> = (0..n).map(|i| if i < n / 2 { 1.0 } else { 0.0 }).collect();
        let plain = clcd_search(difference_vector(&v).unwrap().entries(), &ClcdQuery::new(alpha, gamma).unwrap().with_horizon(1e3).unwrap()).unwrap();
        let tq = ClcdQuery::new(alpha * n as f64 / 2.0, gamma).unwrap().with_horizon(1e3).unwrap();
        let tensor = clcd_search(tensor_difference(&a, &v).unwrap().entries(), &tq).unwrap();
        match (plain.value, tensor.value) {
            (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-6, "{} vs {}", x, y),
            (None, None) => {}
            (x, y) => prop_assert!(false, "finite mismatch {:?} {:?}", x, y),
        }
    }

    #[test]
    fn almost_constant_is_monotone(raw in prop::collection::vec(-1.0f64..1.0, 2..40), d1 in 0.01f64..0.99, r1 in 0.01f64..0.99, dd in 0.0f64..1.0, dr in 0.0f64..1.0) {
        let Some(v) = unit(raw) else { return Ok(()) };
        let d2 = d1 + (0.99 - d1) * dd;
        let r2 = r1 + (0.99 - r1) * dr;
        let small = is_almost_constant(&v, &PartitionParams::new(d1, r1).unwrap()).unwrap();
        let large = is_almost_constant(&v, &PartitionParams::new(d2, r2).unwrap()).unwrap();
        prop_assert!(!small.is_almost_constant || large.is_almost_constant);
    }

    #[test]
    fn compressibility_is_nonincreasing(raw in prop::collection::vec(-1.0f64..1.0, 1..40), d1 in 0.0f64..1.0, d2 in 0.0f64..1.0) {
        let Some(x) = unit(raw) else { return Ok(()) };
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(compressibility_distance(&x, hi).unwrap() <= compressibility_distance(&x, lo).unwrap() + 1e-12);
    }

    #[test]
    fn rounding_guarantees(x in prop::collection::vec(-1.0f64..1.0, 1..30), dir in prop::collection::vec(-1.0f64..1.0, 30), beta in 0.01f64..2.0, frac in 0.0f64..=1.0) {
        let n = x.len();
        let dir = &dir[..n];
        let r = dir.iter().map(|a| a * a).sum::<f64>().sqrt();
        prop_assume!(r > 1e-6);
        let v: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a + frac * beta * d / r).collect();
        let w = round_to_net(&v, &x, beta).unwrap();
        let diff: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a - b).collect();
        prop_assert!(diff.iter().map(|d| d * d).sum::<f64>().sqrt() <= 2.0 * beta + 1e-12);
        prop_assert!(diff.iter().sum::<f64>().abs() <= beta / (n as f64).sqrt() + 1e-12);
    }
}
