#![no_main]

use combilab::parse::parse_eps_grid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(grid) = parse_eps_grid(s) {
            assert!(!grid.is_empty());
            assert!(grid.iter().all(|e| e.is_finite() && *e >= 0.0));
            assert!(grid.windows(2).all(|w| w[0] < w[1]));
        }
    }
});
