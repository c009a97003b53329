#![no_main]

use libfuzzer_sys::fuzz_target;
use nfl_lines::cli::parse_year_range;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(range) = parse_year_range(text) {
        assert!(range.start() <= range.end());
    }
});
