#![no_main]

use bilex::bilingual::BilingualFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(file) = BilingualFile::parse(text) {
        let printed = file.serialize();
        let again = BilingualFile::parse(&printed).expect("serialized file parses");
        assert_eq!(again.serialize(), printed);
    }
});
