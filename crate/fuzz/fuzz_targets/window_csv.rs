#![no_main]

use gaborlab::windows::{from_points, parse_window_csv, TimeGrid};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(points) = parse_window_csv(text) {
        let _ = from_points(&points, TimeGrid::new(256, 0.0625).unwrap());
    }
});
