//! Property suite behind `combilab verify`: oracle checks plus the
//! inequality suite at the configured trial count.

use combilab_core::anticoncentration::{
    calibrate_esseen_constant, esseen_calibration_corpus, exact_chf, exact_law_w, exact_law_w_perm,
    expected_square_w, levy_exact, pawlowski_bound, roos_bound, CALIBRATED_ESSEEN_CONSTANT,
    ESSEEN_CALIBRATION_LAWS, ESSEEN_CALIBRATION_SEED,
};
use combilab_core::clcd::{clcd_search, ClcdQuery};
use combilab_core::combi::DEFAULT_ENUMERATION_CAP;
use combilab_core::sphere::round_to_net;
use combilab_core::substream;
use rand::Rng;

use super::census::{run_singularity_census, P2_SINGULAR, P4_SINGULAR};
use super::suite::run_inequality_suite;
use crate::config::{Experiment, ExperimentConfig, Mode};
use crate::error::Result;
use crate::output::{Check, RunOutput};

/// Largest Esséen constant accepted from calibration.
pub const ESSEEN_CONSTANT_CEILING: f64 = 4.0;

pub fn run_verify(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mut checks = vec![census(cfg, 2, P2_SINGULAR)?, census(cfg, 4, P4_SINGULAR)?];
    checks.push(moments(cfg.seed)?);
    checks.push(roos(cfg.seed)?);
    checks.push(esseen()?);
    checks.push(clcd_ground_truth()?);
    checks.push(rounding(cfg.seed)?);
    checks.push(pawlowski()?);

    let mut suite_cfg = cfg.clone();
    suite_cfg.experiment = Experiment::Verify;
    let mut out = run_inequality_suite(&suite_cfg)?;
    checks.append(&mut out.checks);
    out.checks = checks;
    Ok(out)
}

fn census(cfg: &ExperimentConfig, n: usize, (singular, total): (u64, u64)) -> Result<Check> {
    let mut c = ExperimentConfig::new(Experiment::Singularity, n, 1, cfg.seed);
    c.mode = Mode::Exhaustive;
    c.threads = cfg.threads;
    let out = run_singularity_census(&c)?;
    let (s, t) = (
        out.derived["singular_count"] as u64,
        out.derived["matrix_count"] as u64,
    );
    Ok(Check::new(
        &format!("census_n{n}"),
        (s, t) == (singular, total),
        format!("{s}/{t} singular"),
    ))
}

fn moments(seed: u64) -> Result<Check> {
    let mut worst = 0.0f64;
    for n in [4usize, 6, 8, 10, 12] {
        for i in 0..20u64 {
            let mut rng = substream(seed, (n as u64) << 32 | i);
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let law = exact_law_w(&v, n / 2, DEFAULT_ENUMERATION_CAP)?;
            worst = worst.max((law.moment(2) - expected_square_w(&v, n / 2)?).abs());
        }
    }
    Ok(Check::new(
        "second_moment_formula",
        worst <= 1e-10,
        format!("max error {worst:.2e}"),
    ))
}

fn roos(seed: u64) -> Result<Check> {
    let mut rng = substream(seed, 0x2005);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let n = rng.random_range(2..=7);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let theta = rng.random_range(-2.0..2.0);
        let law = exact_law_w_perm(&a, &v)?;
        worst = worst.max(exact_chf(&law, theta) - roos_bound(&a, &v, theta)?);
    }
    Ok(Check::new(
        "roos_domination",
        worst <= 1e-12,
        format!("max |phi| - bound = {worst:.3e}"),
    ))
}

fn esseen() -> Result<Check> {
    let laws = esseen_calibration_corpus(ESSEEN_CALIBRATION_SEED, ESSEEN_CALIBRATION_LAWS);
    let grid: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
    let c = calibrate_esseen_constant(&laws, &grid)?;
    Ok(Check::new(
        "esseen_calibration",
        (c - CALIBRATED_ESSEEN_CONSTANT).abs() <= 1e-9 && c <= ESSEEN_CONSTANT_CEILING,
        format!("C_E = {c:.9}"),
    ))
}

fn clcd_ground_truth() -> Result<Check> {
    let a = clcd_search(&[1.0], &ClcdQuery::new(10.0, 0.5)?)?
        .value
        .unwrap_or(f64::NAN);
    let b = clcd_search(&[1.0], &ClcdQuery::new(0.2, 0.5)?)?
        .value
        .unwrap_or(f64::NAN);
    Ok(Check::new(
        "clcd_ground_truth",
        (a - 2.0 / 3.0).abs() <= 1e-6 && (b - 0.8).abs() <= 1e-6,
        format!("{a:.9}, {b:.9}"),
    ))
}

fn rounding(seed: u64) -> Result<Check> {
    let mut violations = 0;
    for i in 0..1000u64 {
        let mut rng = substream(seed, 0x5200_0000 + i);
        let n = rng.random_range(1..=40);
        let beta = rng.random_range(0.01..2.0);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let dir: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = dir.iter().map(|d| d * d).sum::<f64>().sqrt().max(1e-300);
        let scale = rng.random_range(0.0..1.0) * beta / r;
        let v: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + scale * d).collect();
        let w = round_to_net(&v, &x, beta)?;
        let diff: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a - b).collect();
        let ok = diff.iter().map(|d| d * d).sum::<f64>().sqrt() <= 2.0 * beta + 1e-12
            && diff.iter().sum::<f64>().abs() <= beta / (n as f64).sqrt() + 1e-12;
        violations += usize::from(!ok);
    }
    Ok(Check::new(
        "rounding_guarantee",
        violations == 0,
        format!("{violations} violations in 1000 cases"),
    ))
}

fn pawlowski() -> Result<Check> {
    let rho = levy_exact(&exact_law_w_perm(&[1.0, 2.0, 3.0], &[0.0, 0.0, 1.0])?, 0.0)?;
    let bound = pawlowski_bound(3)?;
    Ok(Check::new(
        "pawlowski_attained",
        (rho - bound).abs() < 1e-15,
        format!("rho = {rho}, bound = {bound}"),
    ))
}
