#![no_main]
use hetmotif::tabular::{read_transactions, write_transactions, Schema};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let schema = Schema::default();
    let Ok(parsed) = read_transactions(data, &schema) else {
        return;
    };
    let mut out = Vec::new();
    write_transactions(&parsed, &mut out, b',').unwrap();
    let again = read_transactions(out.as_slice(), &schema).unwrap();
    assert_eq!(parsed, again);
});
