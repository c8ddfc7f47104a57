#![no_main]

use libfuzzer_sys::fuzz_target;
use rbm_green::model::parse_model;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(m) = parse_model(s) {
            let _ = m.quadrant().to_cone();
        }
    }
});
