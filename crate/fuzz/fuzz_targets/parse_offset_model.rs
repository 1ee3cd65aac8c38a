#![no_main]

use cavity_grover::imperfections::OffsetModel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(model) = text.parse::<OffsetModel>() {
        let again: OffsetModel = model.to_string().parse().expect("display form parses");
        assert_eq!(model, again);
    }
});
