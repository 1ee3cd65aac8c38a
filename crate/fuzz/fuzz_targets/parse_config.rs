#![no_main]

use cavity_grover::config::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(config) = ExperimentConfig::parse(text) {
        let again = ExperimentConfig::parse(&config.serialize()).expect("serialized config parses");
        assert_eq!(config, again);
    }
});
