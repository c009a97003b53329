#![allow(dead_code)]

use std::path::PathBuf;

use chrono::NaiveDate;
use nfl_lines::dataset::{parse_divisions, Dataset, DivisionMap, GameRecord, Spread, TeamId};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn divisions() -> DivisionMap {
    parse_divisions(&read_fixture("divisions.csv")).unwrap()
}

/// Every bundled games fixture, unfiltered.
pub fn datasets() -> Vec<(&'static str, Dataset)> {
    ["games.csv", "hand.csv"]
        .into_iter()
        .map(|name| {
            (
                name,
                Dataset::from_csv(&read_fixture(name), &read_fixture("divisions.csv"), name).unwrap(),
            )
        })
        .collect()
}

pub fn dataset(name: &str) -> Dataset {
    Dataset::from_csv(&read_fixture(name), &read_fixture("divisions.csv"), name).unwrap()
}

pub fn team(code: &str) -> TeamId {
    TeamId::new(code).unwrap()
}

pub fn game(home: &str, away: &str, home_score: u16, away_score: u16, open: f64, close: f64) -> GameRecord {
    GameRecord {
        season: 2007,
        week: 1,
        date: NaiveDate::from_ymd_opt(2007, 9, 9).unwrap(),
        home: team(home),
        away: team(away),
        home_score,
        away_score,
        line_open: Spread::from_points(open),
        line_close: Spread::from_points(close),
    }
}

/// `n` regular-season games between fixture teams with random scores and lines.
pub fn random_dataset<R: rand::Rng>(rng: &mut R, n: usize) -> Dataset {
    let map = divisions();
    let teams: Vec<TeamId> = map.teams().cloned().collect();
    let games = (0..n)
        .map(|i| {
            let h = i % teams.len();
            let a = (h + 1 + (i / teams.len()) % (teams.len() - 1)) % teams.len();
            let close = rng.random_range(-30..=30);
            GameRecord {
                season: 2002 + (i / 512) as u16,
                week: 1 + ((i / teams.len()) % 16) as u8,
                date: NaiveDate::from_ymd_opt(2002, 9, 8).unwrap(),
                home: teams[h].clone(),
                away: teams[a].clone(),
                home_score: rng.random_range(0..45),
                away_score: rng.random_range(0..45),
                line_open: Spread::from_half_points(close + rng.random_range(-3..=3)),
                line_close: Spread::from_half_points(close),
            }
        })
        .collect();
    Dataset::new(games, map, "random").unwrap()
}
