#![no_main]
use hetmotif::synth::PlantedPattern;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = text.parse::<PlantedPattern>() {
        assert_eq!(p.to_string().parse::<PlantedPattern>().unwrap(), p);
    }
});
