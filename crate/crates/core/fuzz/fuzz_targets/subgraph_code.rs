#![no_main]
use hetmotif::census::{canonical_class, SubgraphClass};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(code) = text.parse::<SubgraphClass>() {
        // Only canonical codes parse, so decoding and re-canonicalizing is the identity.
        assert_eq!(canonical_class(&code.decode()).unwrap(), code);
        assert_eq!(code.to_hex().parse::<SubgraphClass>().unwrap(), code);
    }
});
