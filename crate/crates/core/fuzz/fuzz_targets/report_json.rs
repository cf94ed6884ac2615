#![no_main]
use hetmotif::significance::{read_report_json, write_report_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(report) = read_report_json(data) else {
        return;
    };
    let mut out = Vec::new();
    write_report_json(&report, &mut out).unwrap();
    assert_eq!(read_report_json(out.as_slice()).unwrap(), report);
});
