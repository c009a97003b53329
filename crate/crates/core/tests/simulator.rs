mod common;

use std::collections::BTreeMap;

use common::{dataset, divisions, team};
use nfl_lines::dataset::{Conference, Division, TeamId};
use nfl_lines::model::{poisson_binomial, WinModel};
use nfl_lines::simulator::{
    build_schedule, predict_division_winners, score_predictions, simulate, simulate_with, GameResult, ScheduleEntry,
    SeasonSchedule, SimError, SimulationOptions, SimulationResult,
};
use proptest::prelude::*;

fn entry(game_index: usize, home: &str, away: &str, p: f64, result: Option<GameResult>) -> ScheduleEntry {
    ScheduleEntry {
        game_index,
        home: team(home),
        away: team(away),
        home_win_prob: p,
        result,
    }
}

/// Round-robin among four teams with the given home probabilities.
fn small_schedule(probs: &[f64]) -> SeasonSchedule {
    let pairs = [
        ("NE", "BUF"),
        ("MIA", "NYJ"),
        ("BUF", "MIA"),
        ("NYJ", "NE"),
        ("NE", "MIA"),
        ("BUF", "NYJ"),
    ];
    let entries = probs
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let (h, a) = pairs[i % pairs.len()];
            entry(i, h, a, p, None)
        })
        .collect();
    SeasonSchedule::from_entries(2007, entries).unwrap()
}

fn synthetic_2007() -> SeasonSchedule {
    build_schedule(&dataset("games.csv"), 2007, &WinModel::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn every_replication_awards_one_win_per_game(
        probs in prop::collection::vec(0.0f64..=1.0, 1..24),
        seed in any::<u64>(),
    ) {
        let schedule = small_schedule(&probs);
        let mut options = SimulationOptions::new(50, seed);
        options.retain_samples = true;
        let r = simulate_with(&schedule, &options).unwrap();
        for sample in r.win_samples.as_ref().unwrap() {
            prop_assert_eq!(sample.iter().map(|&w| usize::from(w)).sum::<usize>(), probs.len());
        }
        let total: f64 = r.mean_wins.values().sum();
        prop_assert!((total - probs.len() as f64).abs() < 1e-9);
    }

    #[test]
    fn raising_a_probability_never_costs_the_home_team(
        probs in prop::collection::vec(0.0f64..=1.0, 6..18),
        pick in 0usize..6,
        bump in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let base = small_schedule(&probs);
        let mut raised = base.clone();
        let e = &mut raised.entries[pick];
        e.home_win_prob = (e.home_win_prob + bump).min(1.0);
        let home = e.home.clone();
        let a = simulate(&base, 200, seed).unwrap();
        let b = simulate(&raised, 200, seed).unwrap();
        prop_assert!(b.mean_wins[&home] >= a.mean_wins[&home]);
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let schedule = synthetic_2007();
    let mut runs = Vec::new();
    for threads in [Some(1), Some(3), Some(8), None] {
        let mut options = SimulationOptions::new(500, 99);
        options.threads = threads;
        options.retain_samples = true;
        runs.push(simulate_with(&schedule, &options).unwrap());
    }
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(simulate(&schedule, 500, 99).unwrap().mean_wins, runs[0].mean_wins);
    assert_ne!(simulate(&schedule, 500, 100).unwrap().mean_wins, runs[0].mean_wins);
}

#[test]
fn mean_wins_track_expected_wins() {
    let schedule = synthetic_2007();
    let reps = 2000;
    let r = simulate(&schedule, reps, 5).unwrap();
    for t in schedule.teams() {
        let probs = schedule.team_probabilities(&t);
        assert_eq!(probs.len(), 16);
        let exact = poisson_binomial(&probs).unwrap();
        let bound = 4.0 * (exact.variance() / reps as f64).sqrt();
        assert!((r.mean_wins[&t] - exact.mean()).abs() <= bound, "{t}");
        assert_eq!(r.predicted_wins[&t], (r.mean_wins[&t] + 0.5).floor() as u32);
    }
}

#[test]
fn schedules_are_validated() {
    assert!(matches!(
        SeasonSchedule::from_entries(2007, vec![entry(0, "NE", "NYJ", 1.2, None)]),
        Err(SimError::InvalidProbability { index: 0, .. })
    ));
    assert!(matches!(
        SeasonSchedule::from_entries(2007, vec![entry(0, "NE", "NE", 0.5, None)]),
        Err(SimError::SelfMatch { .. })
    ));
    assert_eq!(simulate(&small_schedule(&[0.5]), 0, 1), Err(SimError::NoReplications));
    assert_eq!(
        build_schedule(&dataset("games.csv"), 1999, &WinModel::default()),
        Err(SimError::MissingSeason(1999))
    );
    assert!(small_schedule(&[0.5]).warnings.len() == 2);
    assert!(synthetic_2007().warnings.is_empty());
}

fn result_with(predicted: &[(&str, u32)]) -> SimulationResult {
    let predicted_wins: BTreeMap<TeamId, u32> = predicted.iter().map(|&(t, w)| (team(t), w)).collect();
    SimulationResult {
        replications: 1,
        seed: 0,
        teams: predicted_wins.keys().cloned().collect(),
        mean_wins: predicted_wins.iter().map(|(t, &w)| (t.clone(), f64::from(w))).collect(),
        predicted_wins,
        win_samples: None,
    }
}

fn afc_east_season(winner_home: bool) -> SeasonSchedule {
    let r = |home_wins: bool| {
        Some(if home_wins {
            GameResult::HomeWin
        } else {
            GameResult::AwayWin
        })
    };
    SeasonSchedule::from_entries(
        2007,
        vec![
            entry(0, "NE", "BUF", 0.5, r(winner_home)),
            entry(1, "MIA", "NYJ", 0.5, r(true)),
            entry(2, "NE", "MIA", 0.5, r(true)),
        ],
    )
    .unwrap()
}

#[test]
fn predicted_tie_is_decided_in_our_favor() {
    let schedule = afc_east_season(true);
    let result = result_with(&[("NE", 10), ("BUF", 10), ("MIA", 6), ("NYJ", 4)]);
    let preds = predict_division_winners(&result, &schedule, &divisions()).unwrap();
    assert_eq!(preds.len(), 1);
    let p = &preds[0];
    assert_eq!((p.conference, p.division), (Conference::Afc, Division::East));
    assert_eq!(p.tied_set, vec![team("BUF"), team("NE")]);
    assert_eq!(p.actual_winner, team("NE"));
    assert_eq!(p.predicted_winner, team("NE"));
    assert!(p.correct && !p.actual_tied);
    assert_eq!(score_predictions(&preds), (1, 1));
}

#[test]
fn actual_tie_falls_back_to_head_to_head() {
    let (home, away) = (Some(GameResult::HomeWin), Some(GameResult::AwayWin));
    // NE and BUF both win twice; NE won their meeting.
    let h2h = SeasonSchedule::from_entries(
        2007,
        vec![
            entry(0, "NE", "BUF", 0.5, home),
            entry(1, "BUF", "MIA", 0.5, home),
            entry(2, "BUF", "NYJ", 0.5, home),
            entry(3, "NE", "NYJ", 0.5, home),
        ],
    )
    .unwrap();
    let result = result_with(&[("NE", 7), ("BUF", 9), ("MIA", 8), ("NYJ", 3)]);
    let p = &predict_division_winners(&result, &h2h, &divisions()).unwrap()[0];
    assert!(p.actual_tied);
    assert_eq!(p.actual_winner, team("NE"));
    assert_eq!(p.predicted_winner, team("BUF"));
    assert!(!p.correct);

    // NE and MIA both win once and never meet: code order decides.
    let split = SeasonSchedule::from_entries(
        2007,
        vec![entry(0, "NE", "BUF", 0.5, home), entry(1, "NYJ", "MIA", 0.5, away)],
    )
    .unwrap();
    let p = &predict_division_winners(&result, &split, &divisions()).unwrap()[0];
    assert!(p.actual_tied);
    assert_eq!(p.actual_winner, team("MIA"));
    assert!(!p.correct);
}

#[test]
fn full_season_scores_eight_divisions() {
    let d = dataset("games.csv");
    let schedule = build_schedule(&d, 2007, &WinModel::default()).unwrap();
    let r = simulate(&schedule, 300, 1).unwrap();
    let preds = predict_division_winners(&r, &schedule, d.divisions()).unwrap();
    let (correct, total) = score_predictions(&preds);
    assert_eq!(total, 8);
    assert!(correct <= 8);
    for p in &preds {
        assert!(p.tied_set.contains(&p.predicted_winner));
        assert_eq!(p.correct, p.tied_set.contains(&p.actual_winner));
    }
    let mut wrong = preds.clone();
    for p in &mut wrong {
        p.correct = true;
    }
    assert_eq!(score_predictions(&wrong), (8, 8));
    wrong[3].correct = false;
    assert_eq!(score_predictions(&wrong), (7, 8));
}
