#![no_main]

use bloch_kit::report::Report;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(report) = serde_json::from_slice::<Report>(data) {
        let _ = serde_json::to_string(&report).unwrap();
    }
});
