//! Parsers for command-line values: epsilon grids and real vectors.

use crate::error::{HarnessError, Result};

/// Largest number of points an epsilon grid may expand to.
pub const MAX_GRID_POINTS: usize = 1_000_000;

/// Parses `a:b:step` (inclusive of `b` up to rounding) or a comma list.
/// The result is finite, nonnegative and strictly ascending.
pub fn parse_eps_grid(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    let grid = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(HarnessError::usage(format!(
                "grid `{s}` must have the form a:b:step"
            )));
        }
        let [a, b, step] = [
            parse_real(parts[0])?,
            parse_real(parts[1])?,
            parse_real(parts[2])?,
        ];
        if !(step > 0.0) {
            return Err(HarnessError::usage(format!(
                "grid step must be positive, got {step}"
            )));
        }
        if b < a {
            return Err(HarnessError::usage(format!(
                "grid end {b} is below its start {a}"
            )));
        }
        let count = ((b - a) / step + 1e-9).floor();
        if !(count < MAX_GRID_POINTS as f64) {
            return Err(HarnessError::usage(format!(
                "grid `{s}` has too many points"
            )));
        }
        (0..=count as usize).map(|k| a + k as f64 * step).collect()
    } else {
        parse_vector(s)?
    };
    check_grid(&grid)?;
    Ok(grid)
}

pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(HarnessError::usage("grid is empty"));
    }
    if grid.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(HarnessError::usage(
            "grid values must be finite and nonnegative",
        ));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(HarnessError::usage("grid must be strictly ascending"));
    }
    Ok(())
}

/// Parses a comma-separated list of finite reals.
pub fn parse_vector(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if s.is_empty() {
        return Err(HarnessError::usage("empty vector"));
    }
    s.split(',').map(parse_real).collect()
}

fn parse_real(s: &str) -> Result<f64> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| HarnessError::usage(format!("`{s}` is not a number")))?;
    if !x.is_finite() {
        return Err(HarnessError::usage(format!("`{s}` is not finite")));
    }
    Ok(x)
}
