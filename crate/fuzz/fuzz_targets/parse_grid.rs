#![no_main]

use cavity_grover::config::{parse_grid, MAX_GRID_POINTS};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(grid) = parse_grid(text) {
        assert!(grid.len() <= MAX_GRID_POINTS);
    }
});
