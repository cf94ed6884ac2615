#![no_main]
use hetmotif::census::read_census_dump;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = read_census_dump(data);
});
