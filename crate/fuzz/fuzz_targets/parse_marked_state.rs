#![no_main]

use cavity_grover::grover::MarkedState;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(tau) = text.parse::<MarkedState>() {
        assert_eq!(tau.to_string(), text.trim());
    }
});
