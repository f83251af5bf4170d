#![no_main]

use gaborlab::specs::parse_lattice_spec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = parse_lattice_spec(text) {
        if let Ok(lat) = spec.lattice() {
            assert!(lat.delta.is_finite() && lat.delta > 0.0);
        }
    }
});
