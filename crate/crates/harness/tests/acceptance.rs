//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints one PASS / FAIL line; exits nonzero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use combilab::experiments::{
    run_distance_experiment, run_singularity_census, run_smallball_validation, run_tail_experiment,
    P2_SINGULAR, P4_SINGULAR,
};
use combilab::{Experiment, ExperimentConfig, Mode};
use combilab_core::anticoncentration::{
    calibrate_esseen_constant, esseen_bound, esseen_calibration_corpus, evaluate_bound,
    exact_chf, exact_law_w, exact_law_w_perm, levy_exact, pawlowski_bound, roos_bound, BoundKind,
    BoundParams, CALIBRATED_ESSEEN_CONSTANT, ESSEEN_CALIBRATION_LAWS, ESSEEN_CALIBRATION_SEED,
};
use combilab_core::clcd::{
    clcd_plain, clcd_search, difference_vector, lattice_distance, stability_floor, ClcdQuery,
};
use combilab_core::combi::DEFAULT_ENUMERATION_CAP;
use combilab_core::sphere::{random_non_almost_constant, round_to_net, PartitionParams};
use combilab_core::substream;
use rand::Rng;
use rand_distr::StandardNormal;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, start: Instant) -> Result<String, String> {
    let took = start.elapsed();
    let s = format!("{:.1}s (limit {}s)", took.as_secs_f64(), limit.as_secs());
    if took <= limit {
        Ok(s)
    } else {
        Err(s)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn unit_vec(n: usize, seed: u64, i: u64) -> Vec<f64> {
    let mut rng = substream(seed, i);
    let v: Vec<f64> = (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / r).collect()
}

fn c1_census() -> Outcome {
    let census = |n: usize| -> Result<(u64, u64), String> {
        let mut c = ExperimentConfig::new(Experiment::Singularity, n, 1, 0);
        c.mode = Mode::Exhaustive;
        let out = run_singularity_census(&c).map_err(err)?;
        Ok((
            out.derived["singular_count"] as u64,
            out.derived["matrix_count"] as u64,
        ))
    };
    let p2 = census(2)?;
    let start = Instant::now();
    let first = census(4)?;
    let time = within(Duration::from_secs(10), start);
    let second = census(4)?;
    let ok = p2 == P2_SINGULAR && first == P4_SINGULAR && second == first && time.is_ok();
    let time = time.unwrap_or_else(|e| e);
    ensure(
        ok,
        format!(
            "p2 = {}/{}, p4 = {}/{} (twice: {:?}), n=4 census {time}",
            p2.0, p2.1, first.0, first.1, second
        ),
    )
}

fn c2_moments() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in [4usize, 6, 8, 10, 12] {
        for i in 0..100u64 {
            let mut rng = substream(0xacc2, (n as u64) << 32 | i);
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let law = exact_law_w(&v, n / 2, DEFAULT_ENUMERATION_CAP).map_err(err)?;
            let (r, sq) = (v.iter().sum::<f64>(), v.iter().map(|x| x * x).sum::<f64>());
            let nf = n as f64;
            let formula = (nf - 2.0) * r * r / (4.0 * (nf - 1.0)) + sq * nf / (4.0 * (nf - 1.0));
            worst = worst.max((law.moment(2) - formula).abs());
        }
    }
    let time = within(Duration::from_secs(30), start);
    let detail = format!(
        "max error {worst:.2e} over 500 vectors, {}",
        time.clone().unwrap_or_else(|e| e)
    );
    ensure(worst <= 1e-10 && time.is_ok(), detail)
}

fn c3_roos() -> Outcome {
    let start = Instant::now();
    let mut rng = substream(0xacc3, 0);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..200 {
        let n = rng.random_range(2..=7);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let theta = rng.random_range(-2.0..2.0);
        let law = exact_law_w_perm(&a, &v).map_err(err)?;
        worst = worst.max(exact_chf(&law, theta) - roos_bound(&a, &v, theta).map_err(err)?);
    }
    let time = within(Duration::from_secs(60), start);
    let detail = format!(
        "max(|phi| - bound) = {worst:.3e} on 200 cases, {}",
        time.clone().unwrap_or_else(|e| e)
    );
    ensure(worst <= 1e-12 && time.is_ok(), detail)
}

fn c4_esseen() -> Outcome {
    let laws = esseen_calibration_corpus(ESSEEN_CALIBRATION_SEED, ESSEEN_CALIBRATION_LAWS);
    let grid: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
    let c_e = calibrate_esseen_constant(&laws, &grid).map_err(err)?;
    let params = BoundParams::default().with("C_E", c_e).map_err(err)?;
    let mut violations = 0;
    for law in &laws {
        for &eps in &grid {
            let lhs = levy_exact(law, eps).map_err(err)?;
            let rhs = esseen_bound(|t| exact_chf(law, t), eps, &params).map_err(err)?;
            violations += usize::from(lhs > rhs * (1.0 + 1e-12));
        }
    }
    let ok = violations == 0 && c_e <= 4.0 && (c_e - CALIBRATED_ESSEEN_CONSTANT).abs() <= 1e-9;
    ensure(ok, format!("calibrated C_E = {c_e:.9} (recorded {CALIBRATED_ESSEEN_CONSTANT}), {violations} violations on {} laws x 10 eps", laws.len()))
}

/// First `theta = k * step < stop` with `dist(theta t, Z^N) < min(slope theta |t|, cap) + slack`.
fn reference_scan(t: &[f64], q: &ClcdQuery, step: f64, stop: f64) -> Option<f64> {
    let norm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut buf = vec![0.0; t.len()];
    let mut k = 1u64;
    loop {
        let theta = k as f64 * step;
        if theta >= stop {
            return None;
        }
        buf.iter_mut().zip(t).for_each(|(b, x)| *b = theta * x);
        if lattice_distance(&buf) < (q.slope * theta * norm).min(q.cap) + q.slack {
            return Some(theta);
        }
        k += 1;
    }
}

fn c5_clcd_ground_truth() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (alpha, want) in [(10.0, 2.0 / 3.0), (0.2, 0.8)] {
        let q = ClcdQuery::new(alpha, 0.5).map_err(err)?;
        let r = clcd_plain(&[1.0, 0.0], &q).map_err(err)?;
        let value = r.value.unwrap_or(f64::NAN);
        let t = difference_vector(&[1.0, 0.0]).map_err(err)?;
        let early = reference_scan(t.entries(), &q, 1e-6, value - r.certified_gap);
        ok &= (value - want).abs() <= 1e-6 && early.is_none();
        parts.push(format!("alpha={alpha}: {value:.9} (scan below: {early:?})"));
    }
    ensure(ok, parts.join("; "))
}

fn c6_clcd_bounds() -> Outcome {
    let start = Instant::now();
    let horizon = 1e4;
    let mut rng = substream(0xacc6, 0);
    let mut stability_violations = 0;
    for i in 0..100 {
        let n = rng.random_range(2..=8);
        let v = unit_vec(n, 0xacc6, i + 1);
        let (alpha, gamma) = (rng.random_range(0.2..3.0), rng.random_range(0.1..0.9));
        let q = ClcdQuery::new(alpha, gamma)
            .map_err(err)?
            .with_horizon(horizon)
            .map_err(err)?;
        let limit = gamma * difference_vector(&v).map_err(err)?.norm() / (5.0 * (n as f64).sqrt());
        let dir = unit_vec(n, 0xacc7, i);
        let scale = limit * rng.random_range(0.0..0.99);
        let w: Vec<f64> = v.iter().zip(&dir).map(|(a, d)| a + scale * d).collect();
        let floor = stability_floor(&v, &w, &q).map_err(err)?;
        let half = ClcdQuery::new(alpha / 2.0, gamma / 2.0)
            .map_err(err)?
            .with_horizon(horizon)
            .map_err(err)?;
        let direct =
            clcd_search(difference_vector(&w).map_err(err)?.entries(), &half).map_err(err)?;
        stability_violations += usize::from(floor > direct.value_or_horizon() + q.bracket_tol);
    }
    let p = PartitionParams::new(0.5, 0.5).map_err(err)?;
    let gamma = 0.02;
    assert!(gamma < p.delta() * p.rho() / 12.0);
    let mut large_violations = 0;
    let mut smallest_ratio = f64::INFINITY;
    for n in [16usize, 32] {
        let floor = (p.delta() * n as f64).sqrt() / 7.0;
        for i in 0..100 {
            let v = random_non_almost_constant(n, &p, &mut substream(0xacc8, n as u64 * 1000 + i))
                .map_err(err)?;
            let q = ClcdQuery::new(1.0, gamma)
                .map_err(err)?
                .with_horizon(horizon)
                .map_err(err)?;
            let r = clcd_plain(&v, &q).map_err(err)?;
            smallest_ratio = smallest_ratio.min(r.value_or_horizon() / floor);
            large_violations += usize::from(r.value_or_horizon() < floor);
        }
    }
    let time = within(Duration::from_secs(300), start);
    let detail = format!(
        "stability: {stability_violations}/100 violations; large CLCD: {large_violations}/200 violations, min CLCD/floor = {smallest_ratio:.3}; {}",
        time.clone().unwrap_or_else(|e| e)
    );
    ensure(
        stability_violations == 0 && large_violations == 0 && time.is_ok(),
        detail,
    )
}

fn c7_smallball() -> Outcome {
    let start = Instant::now();
    let mut cs = Vec::new();
    for seed in 0..20u64 {
        let mut cfg = ExperimentConfig::new(Experiment::Smallball, 20, 100_000, 0xacc7_0000 + seed);
        cfg.eps_grid = (1..=20).map(|k| k as f64 * 0.05).collect();
        let out = run_smallball_validation(&cfg).map_err(err)?;
        cs.push(out.derived["c_min"]);
    }
    let (lo, hi) = cs
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &c| (l.min(c), h.max(c)));
    let time = within(Duration::from_secs(600), start);
    let ok = cs.iter().all(|c| c.is_finite()) && hi <= 5.0 * lo && time.is_ok();
    ensure(
        ok,
        format!(
            "smallest C over 20 vectors in [{lo:.4}, {hi:.4}], ratio {:.3}; {}",
            hi / lo,
            time.unwrap_or_else(|e| e)
        ),
    )
}

fn c8_tail() -> Outcome {
    let start = Instant::now();
    let mut slopes = Vec::new();
    let mut ok = true;
    let mut notes = Vec::new();
    for seed in [1u64, 2, 3] {
        let cfg = ExperimentConfig::new(Experiment::Tail, 64, 10_000, seed);
        let out = run_tail_experiment(&cfg).map_err(err)?;
        let tail = out.summary_for("tail");
        let at_zero = tail.iter().find(|r| r.eps == 0.0).map(|r| r.estimate);
        let nondecreasing = tail.windows(2).all(|w| w[0].estimate <= w[1].estimate);
        let slope = out.derived.get("slope").copied().unwrap_or(f64::NAN);
        ok &= nondecreasing && at_zero == Some(0.0) && slope > 0.0;
        notes.push(format!(
            "seed {seed}: P(eps=0) = {at_zero:?}, slope {slope:.4}, monotone {nondecreasing}"
        ));
        slopes.push(slope);
    }
    let mean = slopes.iter().sum::<f64>() / 3.0;
    let stable = slopes.iter().all(|s| (s - mean).abs() <= 0.3 * mean);
    let time = within(Duration::from_secs(900), start);
    ok &= stable && time.is_ok();
    ensure(
        ok,
        format!(
            "{}; slopes within 30% of mean {mean:.4}: {stable}; {}",
            notes.join("; "),
            time.unwrap_or_else(|e| e)
        ),
    )
}

fn c9_distance() -> Outcome {
    let cfg = ExperimentConfig::new(Experiment::Distance, 32, 10_000, 9);
    let out = run_distance_experiment(&cfg).map_err(err)?;
    let check = |name: &str| {
        out.checks
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.passed)
            .unwrap_or(false)
    };
    let ok = check("normal_projection_identity") && check("fitted_curve_dominates");
    ensure(
        ok,
        format!(
            "max | |<R_n,v>| - dist | = {:.2e}, L(dist, eps) <= {:.4} + {:.4} eps (fitted C), zero mass {}, degenerate trials {}",
            out.derived["max_projection_error"],
            out.derived["fitted_constant"],
            out.derived["fitted_C"],
            out.derived["zero_mass"],
            out.derived["degenerate_count"]
        ),
    )
}

fn c10_rounding() -> Outcome {
    let mut violations = 0;
    for i in 0..10_000u64 {
        let mut rng = substream(0xacca, i);
        let n = rng.random_range(1..=64);
        let beta = rng.random_range(0.001..2.0);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let dir = unit_vec(n, 0xaccb, i);
        let scale = rng.random_range(0.0..=1.0) * beta;
        let v: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + scale * d).collect();
        let w = round_to_net(&v, &x, beta).map_err(err)?;
        let diff: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a - b).collect();
        let norm = diff.iter().map(|d| d * d).sum::<f64>().sqrt();
        let sum = diff.iter().sum::<f64>().abs();
        let ok = norm <= 2.0 * beta * (1.0 + 1e-12)
            && sum <= beta / (n as f64).sqrt() * (1.0 + 1e-12) + 1e-15;
        violations += usize::from(!ok);
    }
    ensure(
        violations == 0,
        format!("{violations} violations in 10000 cases"),
    )
}

fn multisets(n: usize, lo: i32, hi: i32) -> Vec<Vec<f64>> {
    fn rec(n: usize, start: i32, hi: i32, cur: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for x in start..=hi {
            cur.push(x as f64);
            rec(n, x, hi, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, lo, hi, &mut Vec::new(), &mut out);
    out
}

fn c11_auxiliary() -> Outcome {
    // Paley-Zygmund: (m2, m4, lambda, closed-form value, true P{|X| > lambda})
    let cases = [
        (1.0, 1.0, 0.5, 0.5625, 1.0),
        (2.0, 8.0, 1.0, 0.125, 0.5),
        (2.5, 20.5, 1.0, 2.25 / 20.5, 0.25),
    ];
    let mut pz_ok = true;
    for (m2, m4, lambda, want, truth) in cases {
        let p = BoundParams::default()
            .with("m2", m2)
            .map_err(err)?
            .with("m4", m4)
            .map_err(err)?
            .with("lambda", lambda)
            .map_err(err)?;
        let got = evaluate_bound(BoundKind::PaleyZygmund, &p).map_err(err)?;
        pz_ok &= (got - want).abs() <= 1e-15 && got <= truth;
    }

    let mut rng = substream(0xaccc, 0);
    let mut hyper_violations = 0;
    for _ in 0..50 {
        let n = rng.random_range(1..=16usize);
        let p: Vec<f64> = (0..n)
            .map(|_| rng.random_range(1.0 / 3.0..=2.0 / 3.0))
            .collect();
        let c: Vec<f64> = (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b = p.iter().fold(1.0f64, |m, &q| m.min(q).min(1.0 - q));
        let (mut m2, mut m4) = (0.0, 0.0);
        for mask in 0u32..1 << n {
            let mut prob = 1.0;
            let mut f = c[n];
            for i in 0..n {
                if mask >> i & 1 == 1 {
                    prob *= p[i];
                    f += c[i];
                } else {
                    prob *= 1.0 - p[i];
                }
            }
            m2 += prob * f * f;
            m4 += prob * f.powi(4);
        }
        let params = BoundParams::default()
            .with("q", 4.0)
            .and_then(|x| x.with("b", b))
            .and_then(|x| x.with("d", 1.0))
            .and_then(|x| x.with("m2", m2))
            .map_err(err)?;
        let bound = evaluate_bound(BoundKind::Hypercontractive, &params).map_err(err)?;
        hyper_violations += usize::from(m4.powf(0.25) > bound * (1.0 + 1e-12));
    }

    let attained = levy_exact(
        &exact_law_w_perm(&[1.0, 2.0, 3.0], &[0.0, 0.0, 1.0]).map_err(err)?,
        0.0,
    )
    .map_err(err)?;
    let attain_ok = (attained - pawlowski_bound(3).map_err(err)?).abs() < 1e-15;
    let mut exceeded = 0;
    let mut corpus = 0;
    for n in 2..=6usize {
        let bound = pawlowski_bound(n).map_err(err)?;
        let vs: Vec<Vec<f64>> = multisets(n, 0, 3)
            .into_iter()
            .filter(|v| v.iter().any(|&x| x != v[0]))
            .collect();
        for hi in [3, n as i32 + 1] {
            for a in multisets(n, 0, hi)
                .into_iter()
                .filter(|a| a.windows(2).all(|w| w[0] < w[1]))
            {
                for v in &vs {
                    let rho =
                        levy_exact(&exact_law_w_perm(&a, v).map_err(err)?, 0.0).map_err(err)?;
                    exceeded += usize::from(rho > bound + 1e-12);
                    corpus += 1;
                }
            }
        }
    }
    ensure(
        pz_ok && hyper_violations == 0 && attain_ok && exceeded == 0,
        format!(
            "Paley-Zygmund exact on 3 laws: {pz_ok}; hypercontractive violations {hyper_violations}/50; n=3 construction rho = {attained}; exceeded {exceeded}/{corpus}"
        ),
    )
}

fn c12_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let mut bytes = Vec::new();
    for threads in ["1", "8"] {
        let path = dir.path().join(format!("tail_{threads}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_combilab"))
            .args([
                "tail",
                "--n",
                "32",
                "--trials",
                "1000",
                "--seed",
                "7",
                "--threads",
                threads,
                "--out",
            ])
            .arg(&path)
            .output()
            .map_err(err)?;
        if !status.status.success() {
            return Err(format!(
                "exit {:?}: {}",
                status.status.code(),
                String::from_utf8_lossy(&status.stderr)
            ));
        }
        let mut all = std::fs::read(&path).map_err(err)?;
        all.extend(
            std::fs::read(dir.path().join(format!("tail_{threads}.summary.csv"))).map_err(err)?,
        );
        bytes.push(all);
    }
    ensure(
        bytes[0] == bytes[1] && !bytes[0].is_empty(),
        format!(
            "{} bytes, identical at 1 and 8 threads: {}",
            bytes[0].len(),
            bytes[0] == bytes[1]
        ),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("exact census", c1_census),
        ("moment formula", c2_moments),
        ("Roos domination", c3_roos),
        ("Esseen domination", c4_esseen),
        ("CLCD ground truth", c5_clcd_ground_truth),
        ("CLCD lower bounds", c6_clcd_bounds),
        ("small-ball shape", c7_smallball),
        ("tail properties", c8_tail),
        ("distance identity", c9_distance),
        ("rounding guarantee", c10_rounding),
        ("auxiliary inequalities", c11_auxiliary),
        ("determinism", c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {:>2} {name}: {d} [{secs:.1}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d} [{secs:.1}s]", i + 1)
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
