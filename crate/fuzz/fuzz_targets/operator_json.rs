#![no_main]

use gensym_core::io::{operator_to_json, parse_operator};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(op) = parse_operator(data) {
        let back = parse_operator(operator_to_json(&op).as_bytes()).expect("re-parse");
        assert_eq!(back.matrix(), op.matrix());
    }
});
