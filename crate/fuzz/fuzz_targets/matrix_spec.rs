#![no_main]

use gaborlab::specs::parse_matrix_spec;
use gaborlab::symplectic::decompose;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = parse_matrix_spec(text) {
        let _ = decompose(&s);
    }
});
