#![no_main]

use libfuzzer_sys::fuzz_target;
use spancat::cli::parse;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = parse(text) {
        // whatever parses must survive its own canonical form
        let canonical = doc.serialize();
        let again = parse(&canonical).expect("canonical text parses");
        assert_eq!(again.serialize(), canonical);
    }
});
