#![no_main]

use libfuzzer_sys::fuzz_target;
use nfl_lines::dataset::parse_divisions;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(map) = parse_divisions(text) {
        assert_eq!(parse_divisions(&map.to_csv()).expect("written map parses"), map);
    }
});
