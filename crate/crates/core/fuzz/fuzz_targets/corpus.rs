#![no_main]

use bilex::pipeline::parse_corpus;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(pairs) = parse_corpus(text) {
            assert!(pairs.windows(2).all(|w| w[0].line < w[1].line));
        }
    }
});
