#![no_main]

use libfuzzer_sys::fuzz_target;
use nfl_lines::dataset::{parse_games, write_games};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(games) = parse_games(text) {
        let again = parse_games(&write_games(&games)).expect("written games parse");
        assert_eq!(again, games);
    }
});
