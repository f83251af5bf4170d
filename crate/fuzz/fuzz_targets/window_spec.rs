#![no_main]

use gaborlab::specs::{load_window, parse_window_spec, WindowSource};
use gaborlab::windows::TimeGrid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    // Sampling is only attempted for analytic specs; file specs would touch the disk.
    if let Ok(WindowSource::Analytic(_)) = parse_window_spec(text) {
        let _ = load_window(text, TimeGrid::new(256, 0.0625).unwrap());
    }
});
