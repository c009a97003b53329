//! Writes a synthetic games CSV for the 32-team division file given as the
//! first argument, to stdout.
//!
//! Each season is 16 round-robin weeks (circle method) of 16 games. Team
//! strengths, closing lines, scores, and opening-line moves are drawn from a
//! fixed seed so the output is reproducible:
//!
//! ```text
//! cargo run --example synth_seasons -- tests/fixtures/divisions.csv > tests/fixtures/games.csv
//! ```

use chrono::{Duration, NaiveDate};
use nfl_lines::dataset::{parse_divisions, write_games, GameRecord, Spread, TeamId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const SEASONS: [(u16, (i32, u32, u32)); 3] = [(2005, (2005, 9, 11)), (2006, (2006, 9, 10)), (2007, (2007, 9, 9))];
const HOME_EDGE: f64 = 2.6;
const LINE_ERROR_SD: f64 = 13.588;

fn movement<R: Rng>(rng: &mut R) -> i32 {
    let u: f64 = rng.random();
    let half_points = match u {
        u if u < 0.45 => 0,
        u if u < 0.63 => 1,
        u if u < 0.83 => 2,
        u if u < 0.90 => 3,
        u if u < 0.95 => 4,
        _ => rng.random_range(5..=7),
    };
    if rng.random::<bool>() {
        half_points
    } else {
        -half_points
    }
}

fn closing_line<R: Rng>(rng: &mut R, expected_margin: f64) -> Spread {
    let noisy = expected_margin + Normal::new(0.0, 1.0).unwrap().sample(rng);
    let mut half_points = (noisy * 2.0).round() as i32;
    // Books shade toward the common margins 3 and 7.
    for key in [6, 14] {
        if (half_points.abs() - key).abs() == 1 && rng.random_bool(0.5) {
            half_points = key * half_points.signum();
        }
    }
    Spread::from_half_points(half_points)
}

fn score<R: Rng>(rng: &mut R, margin: i32) -> (u16, u16) {
    let total = Normal::new(42.0_f64, 10.0)
        .unwrap()
        .sample(rng)
        .round()
        .max(f64::from(margin.abs())) as i32;
    let mut home = (total + margin + 1).div_euclid(2);
    let mut away = home - margin;
    if away < 0 {
        home -= away;
        away = 0;
    }
    if home < 0 {
        away -= home;
        home = 0;
    }
    (home as u16, away as u16)
}

fn main() {
    let path = std::env::args().nth(1).expect("usage: synth_seasons <divisions.csv>");
    let divisions = parse_divisions(&std::fs::read_to_string(path).expect("read divisions")).expect("valid divisions");
    let teams: Vec<TeamId> = divisions.teams().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2_560);
    let strength = Normal::new(0.0, 5.5).unwrap();
    let margin_noise = Normal::new(0.0, LINE_ERROR_SD).unwrap();

    let mut games = Vec::new();
    for (season, (y, m, d)) in SEASONS {
        let opening_sunday = NaiveDate::from_ymd_opt(y, m, d).unwrap();
        let ratings: Vec<f64> = teams.iter().map(|_| strength.sample(&mut rng)).collect();
        let mut order: Vec<usize> = (0..teams.len()).collect();
        order.shuffle(&mut rng);
        let n = order.len();
        for week in 1..=16u8 {
            let round = usize::from(week - 1);
            // Circle method: slot 0 fixed, the rest rotate.
            let slot = |i: usize| {
                if i == 0 {
                    order[0]
                } else {
                    order[1 + (i - 1 + round) % (n - 1)]
                }
            };
            for i in 0..n / 2 {
                let (a, b) = (slot(i), slot(n - 1 - i));
                let (home, away) = if (round + i) % 2 == 0 { (a, b) } else { (b, a) };
                let expected = ratings[home] - ratings[away] + HOME_EDGE;
                let line_close = closing_line(&mut rng, expected);
                let line_open = Spread::from_half_points(line_close.half_points() - movement(&mut rng));
                let margin = (expected + margin_noise.sample(&mut rng)).round() as i32;
                let (home_score, away_score) = score(&mut rng, margin);
                games.push(GameRecord {
                    season,
                    week,
                    date: opening_sunday + Duration::weeks(i64::from(week) - 1),
                    home: teams[home].clone(),
                    away: teams[away].clone(),
                    home_score,
                    away_score,
                    line_open,
                    line_close,
                });
            }
        }
        // A short postseason so regular-season filtering has something to drop.
        for (week, offset) in [(18u8, 19i64), (19, 20), (20, 21), (21, 23)] {
            let home = rng.random_range(0..n);
            let away = (home + rng.random_range(1..n)) % n;
            let expected = ratings[home] - ratings[away] + if week == 21 { 0.0 } else { HOME_EDGE };
            let line_close = closing_line(&mut rng, expected);
            let margin = (expected + margin_noise.sample(&mut rng)).round() as i32;
            let (home_score, away_score) = score(&mut rng, margin);
            games.push(GameRecord {
                season,
                week,
                date: opening_sunday + Duration::weeks(offset - 1),
                home: teams[home].clone(),
                away: teams[away].clone(),
                home_score,
                away_score,
                line_open: line_close,
                line_close,
            });
        }
    }
    print!("{}", write_games(&games));
}
