#![no_main]

use libfuzzer_sys::fuzz_target;
use resring::parse::parse_wiring;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(w) = parse_wiring(text) else { return };
    assert_eq!(parse_wiring(&w.to_string()).expect("printed wirings parse"), w);
    // Unary wirings also go through the stack decision.
    if w.len() <= 4 && w.height() <= 3 {
        if let Ok(sw) = resring::StackWiring::from_wiring(&w) {
            let _ = resring::stack_nilpotent(&sw);
        }
    }
});
