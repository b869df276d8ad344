#![no_main]

use libfuzzer_sys::fuzz_target;
use resring::{eval_circuit, parse_circuit};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse_circuit(text) {
        let again = parse_circuit(&c.to_string()).expect("printed circuits parse");
        assert_eq!(eval_circuit(&again), eval_circuit(&c));
    }
});
