#![no_main]

use libfuzzer_sys::fuzz_target;
use resring::parse_query;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(q) = parse_query(text) {
        assert_eq!(parse_query(&q.to_string()).expect("printed queries parse"), q);
    }
});
