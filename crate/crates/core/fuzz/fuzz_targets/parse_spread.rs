#![no_main]

use libfuzzer_sys::fuzz_target;
use nfl_lines::dataset::Spread;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spread) = text.parse::<Spread>() {
        assert_eq!(spread.to_string().parse::<Spread>(), Ok(spread));
    }
});
