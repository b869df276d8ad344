#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(t) = resring::parse::parse_term(text) {
            let again = resring::parse::parse_term(&t.to_string()).expect("printed terms parse");
            assert_eq!(again, t);
        }
    }
});
