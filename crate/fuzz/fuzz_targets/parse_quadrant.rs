#![no_main]

use libfuzzer_sys::fuzz_target;
use rbm_green::model::{parse_quadrant, to_json};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(p) = parse_quadrant(s) {
            // Accepted models survive a round trip and map to a wedge.
            let back = parse_quadrant(&to_json(&p)).expect("re-parse of serialized model");
            assert_eq!(p, back);
            let _ = p.to_cone();
        }
    }
});
