#![no_main]

use libfuzzer_sys::fuzz_target;
use rbm_green::model::parse_cone;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(c) = parse_cone(s) {
            let _ = c.to_quadrant().validate();
        }
    }
});
