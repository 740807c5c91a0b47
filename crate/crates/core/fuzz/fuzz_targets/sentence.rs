#![no_main]

use bilex::bundled;
use libfuzzer_sys::fuzz_target;

// Parses arbitrary text with the bundled English grammar; the number of
// trees decoded is capped since ambiguity can be exponential.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let parser = bundled::english();
    if let Ok(parses) = parser.parse_sentence(text) {
        for d in parses.take(8) {
            assert!(d.get_bag().is_ground());
        }
    }
});
