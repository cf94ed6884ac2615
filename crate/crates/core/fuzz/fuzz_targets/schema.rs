#![no_main]
use hetmotif::tabular::Schema;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(schema) = text.parse::<Schema>() {
            assert!(!schema.entities.is_empty());
        }
    }
});
