//! Seeded Monte Carlo season simulation and division-winner prediction.
//!
//! Each replication draws from its own ChaCha8 stream (stream id = replication
//! index) and consumes exactly one uniform per game in schedule order, so
//! results do not depend on how replications are spread over threads.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::dataset::{Conference, Dataset, Division, DivisionMap, GameFilter, TeamId};
use crate::model::WinModel;

/// Replications per season used for the published tables.
pub const DEFAULT_REPLICATIONS: usize = 1000;

/// Regular-season games per team in the 32-team, 16-game era.
pub const GAMES_PER_TEAM: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("season {0} has no regular-season games")]
    MissingSeason(u16),
    #[error("team {0} is not in the division map")]
    UnknownTeam(TeamId),
    #[error("replications must be at least 1")]
    NoReplications,
    #[error("game {index}: probability {value} is outside [0, 1]")]
    InvalidProbability { index: usize, value: f64 },
    #[error("game {index}: {home} cannot play itself")]
    SelfMatch { index: usize, home: TeamId },
    #[error("failed to build thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameResult {
    HomeWin,
    AwayWin,
    Tie,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleEntry {
    pub game_index: usize,
    pub home: TeamId,
    pub away: TeamId,
    pub home_win_prob: f64,
    /// Final result when the game has been played.
    pub result: Option<GameResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TeamRecord {
    pub wins: u32,
    pub losses: u32,
    pub ties: u32,
}

impl TeamRecord {
    /// Ties credit half a win each, floored.
    pub fn reported_wins(&self) -> u32 {
        self.wins + self.ties / 2
    }

    /// Twice the win credit; exact for comparisons.
    pub fn half_wins(&self) -> u32 {
        2 * self.wins + self.ties
    }

    fn record(&mut self, result: GameResult, is_home: bool) {
        match (result, is_home) {
            (GameResult::Tie, _) => self.ties += 1,
            (GameResult::HomeWin, true) | (GameResult::AwayWin, false) => self.wins += 1,
            _ => self.losses += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleWarning {
    IncompleteSchedule { team: TeamId, games: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeasonSchedule {
    pub season: u16,
    pub entries: Vec<ScheduleEntry>,
    pub actual: BTreeMap<TeamId, TeamRecord>,
    pub warnings: Vec<ScheduleWarning>,
}

impl SeasonSchedule {
    /// Builds a schedule from explicit entries, tallying records from any results present.
    pub fn from_entries(season: u16, entries: Vec<ScheduleEntry>) -> Result<Self, SimError> {
        let mut actual: BTreeMap<TeamId, TeamRecord> = BTreeMap::new();
        let mut games: BTreeMap<TeamId, usize> = BTreeMap::new();
        for (index, e) in entries.iter().enumerate() {
            if !(0.0..=1.0).contains(&e.home_win_prob) {
                return Err(SimError::InvalidProbability {
                    index,
                    value: e.home_win_prob,
                });
            }
            if e.home == e.away {
                return Err(SimError::SelfMatch {
                    index,
                    home: e.home.clone(),
                });
            }
            for (team, is_home) in [(&e.home, true), (&e.away, false)] {
                *games.entry(team.clone()).or_default() += 1;
                let rec = actual.entry(team.clone()).or_default();
                if let Some(result) = e.result {
                    rec.record(result, is_home);
                }
            }
        }
        let warnings = games
            .into_iter()
            .filter(|&(_, n)| n != GAMES_PER_TEAM)
            .map(|(team, games)| ScheduleWarning::IncompleteSchedule { team, games })
            .collect();
        Ok(SeasonSchedule {
            season,
            entries,
            actual,
            warnings,
        })
    }

    pub fn teams(&self) -> Vec<TeamId> {
        self.actual.keys().cloned().collect()
    }

    pub fn actual_wins(&self) -> BTreeMap<TeamId, u32> {
        self.actual
            .iter()
            .map(|(t, r)| (t.clone(), r.reported_wins()))
            .collect()
    }

    /// Win probabilities of `team` in each game it plays, in schedule order.
    pub fn team_probabilities(&self, team: &TeamId) -> Vec<f64> {
        self.entries
            .iter()
            .filter_map(|e| {
                if &e.home == team {
                    Some(e.home_win_prob)
                } else if &e.away == team {
                    Some(1.0 - e.home_win_prob)
                } else {
                    None
                }
            })
            .collect()
    }
}

/// Regular-season schedule for `season` with model win probabilities from the closing lines.
pub fn build_schedule(dataset: &Dataset, season: u16, model: &WinModel) -> Result<SeasonSchedule, SimError> {
    let games = dataset.filter(&GameFilter::regular_season().seasons(season..=season));
    if games.is_empty() {
        return Err(SimError::MissingSeason(season));
    }
    let entries = games
        .games()
        .iter()
        .enumerate()
        .map(|(game_index, g)| ScheduleEntry {
            game_index,
            home: g.home.clone(),
            away: g.away.clone(),
            home_win_prob: model.home_win_probability(g),
            result: Some(match g.home_margin().signum() {
                1 => GameResult::HomeWin,
                -1 => GameResult::AwayWin,
                _ => GameResult::Tie,
            }),
        })
        .collect();
    SeasonSchedule::from_entries(season, entries)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOptions {
    pub replications: usize,
    pub seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Keep every replication's win vector.
    pub retain_samples: bool,
}

impl SimulationOptions {
    pub fn new(replications: usize, seed: u64) -> Self {
        SimulationOptions {
            replications,
            seed,
            threads: None,
            retain_samples: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub replications: usize,
    pub seed: u64,
    /// Team order used by `win_samples`.
    pub teams: Vec<TeamId>,
    pub mean_wins: BTreeMap<TeamId, f64>,
    pub predicted_wins: BTreeMap<TeamId, u32>,
    /// Per replication, wins per team in `teams` order.
    pub win_samples: Option<Vec<Vec<u16>>>,
}

fn round_half_up(mean: f64) -> u32 {
    (mean + 0.5).floor() as u32
}

pub fn simulate(schedule: &SeasonSchedule, replications: usize, seed: u64) -> Result<SimulationResult, SimError> {
    simulate_with(schedule, &SimulationOptions::new(replications, seed))
}

struct IndexedGame {
    home: usize,
    away: usize,
    prob: f64,
}

fn replicate(games: &[IndexedGame], team_count: usize, seed: u64, replication: u64) -> Vec<u16> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    let mut wins = vec![0u16; team_count];
    for g in games {
        let u: f64 = rng.random();
        if u < g.prob {
            wins[g.home] += 1;
        } else {
            wins[g.away] += 1;
        }
    }
    wins
}

fn accumulate(mut acc: Vec<u64>, wins: &[u16]) -> Vec<u64> {
    for (a, &w) in acc.iter_mut().zip(wins) {
        *a += u64::from(w);
    }
    acc
}

pub fn simulate_with(schedule: &SeasonSchedule, options: &SimulationOptions) -> Result<SimulationResult, SimError> {
    if options.replications == 0 {
        return Err(SimError::NoReplications);
    }
    let teams = schedule.teams();
    let index: BTreeMap<&TeamId, usize> = teams.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let games: Vec<IndexedGame> = schedule
        .entries
        .iter()
        .map(|e| IndexedGame {
            home: index[&e.home],
            away: index[&e.away],
            prob: e.home_win_prob,
        })
        .collect();
    let n_teams = teams.len();
    let reps = options.replications as u64;
    let seed = options.seed;

    let run = || -> (Vec<u64>, Option<Vec<Vec<u16>>>) {
        if options.retain_samples {
            let samples: Vec<Vec<u16>> = (0..reps)
                .into_par_iter()
                .map(|r| replicate(&games, n_teams, seed, r))
                .collect();
            let totals = samples.iter().fold(vec![0u64; n_teams], |acc, s| accumulate(acc, s));
            (totals, Some(samples))
        } else {
            let totals = (0..reps)
                .into_par_iter()
                .fold(
                    || vec![0u64; n_teams],
                    |acc, r| accumulate(acc, &replicate(&games, n_teams, seed, r)),
                )
                .reduce(
                    || vec![0u64; n_teams],
                    |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
                );
            (totals, None)
        }
    };
    let (totals, win_samples) = match options.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| SimError::ThreadPool(e.to_string()))?
            .install(run),
        None => run(),
    };

    let mean_wins: BTreeMap<TeamId, f64> = teams
        .iter()
        .zip(&totals)
        .map(|(t, &total)| (t.clone(), total as f64 / options.replications as f64))
        .collect();
    let predicted_wins = mean_wins.iter().map(|(t, &m)| (t.clone(), round_half_up(m))).collect();
    Ok(SimulationResult {
        replications: options.replications,
        seed,
        teams,
        mean_wins,
        predicted_wins,
        win_samples,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivisionPrediction {
    pub conference: Conference,
    pub division: Division,
    pub predicted_winner: TeamId,
    pub actual_winner: TeamId,
    /// Teams sharing the highest predicted win total.
    pub tied_set: Vec<TeamId>,
    /// The actual winner needed a tie-break.
    pub actual_tied: bool,
    pub correct: bool,
}

/// Head-to-head half-wins of each team in `group` against the rest of `group`.
fn head_to_head(schedule: &SeasonSchedule, group: &[TeamId]) -> BTreeMap<TeamId, u32> {
    let members: BTreeSet<&TeamId> = group.iter().collect();
    let mut points: BTreeMap<TeamId, TeamRecord> = group.iter().map(|t| (t.clone(), TeamRecord::default())).collect();
    for e in &schedule.entries {
        if let Some(result) = e.result {
            if members.contains(&e.home) && members.contains(&e.away) {
                points.get_mut(&e.home).unwrap().record(result, true);
                points.get_mut(&e.away).unwrap().record(result, false);
            }
        }
    }
    points.into_iter().map(|(t, r)| (t, r.half_wins())).collect()
}

/// Top teams by `score`, in code order.
fn leaders(teams: &[TeamId], score: impl Fn(&TeamId) -> u32) -> Vec<TeamId> {
    let best = teams.iter().map(&score).max().unwrap_or(0);
    teams.iter().filter(|t| score(t) == best).cloned().collect()
}

/// Predicted versus actual winner for each division.
///
/// Predicted ties count as correct when the actual winner is among the tied
/// teams. Actual ties are broken by head-to-head record, then team code.
pub fn predict_division_winners(
    result: &SimulationResult,
    schedule: &SeasonSchedule,
    divisions: &DivisionMap,
) -> Result<Vec<DivisionPrediction>, SimError> {
    if let Some(team) = schedule.actual.keys().find(|t| !divisions.contains(t)) {
        return Err(SimError::UnknownTeam(team.clone()));
    }
    let mut out = Vec::new();
    for conference in Conference::ALL {
        for division in Division::ALL {
            let members = divisions.members(conference, division);
            if !members.iter().any(|t| schedule.actual.contains_key(t)) {
                continue;
            }
            let tied_set = leaders(&members, |t| result.predicted_wins.get(t).copied().unwrap_or(0));
            let record = |t: &TeamId| schedule.actual.get(t).copied().unwrap_or_default().half_wins();
            let top = leaders(&members, record);
            let actual_tied = top.len() > 1;
            let actual_winner = if actual_tied {
                let h2h = head_to_head(schedule, &top);
                leaders(&top, |t| h2h[t])[0].clone()
            } else {
                top[0].clone()
            };
            let (predicted_winner, correct) = if tied_set.contains(&actual_winner) {
                (actual_winner.clone(), true)
            } else {
                (tied_set[0].clone(), false)
            };
            out.push(DivisionPrediction {
                conference,
                division,
                predicted_winner,
                actual_winner,
                tied_set,
                actual_tied,
                correct,
            });
        }
    }
    Ok(out)
}

/// `(correct, total)` over division predictions.
pub fn score_predictions(predictions: &[DivisionPrediction]) -> (usize, usize) {
    (predictions.iter().filter(|p| p.correct).count(), predictions.len())
}

/// Per-team predicted and actual wins: `team,division,predicted_wins,actual_wins,outcome`.
///
/// Rows are grouped by division and ordered by predicted wins, then team code.
pub fn season_wins_csv(
    result: &SimulationResult,
    schedule: &SeasonSchedule,
    predictions: &[DivisionPrediction],
    divisions: &DivisionMap,
) -> String {
    let actual = schedule.actual_wins();
    let mut out = String::from("team,division,predicted_wins,actual_wins,outcome\n");
    for p in predictions {
        let mut members: Vec<TeamId> = divisions
            .members(p.conference, p.division)
            .into_iter()
            .filter(|t| actual.contains_key(t))
            .collect();
        let predicted = |t: &TeamId| result.predicted_wins.get(t).copied().unwrap_or(0);
        members.sort_by(|a, b| predicted(b).cmp(&predicted(a)).then(a.cmp(b)));
        for t in members {
            let outcome = if t == p.actual_winner { "Division Winner" } else { "" };
            out.push_str(&format!(
                "{t},{} {},{},{},{outcome}\n",
                p.conference,
                p.division,
                predicted(&t),
                actual[&t]
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(code: &str) -> TeamId {
        TeamId::new(code).unwrap()
    }

    fn entry(i: usize, home: &str, away: &str, p: f64, result: Option<GameResult>) -> ScheduleEntry {
        ScheduleEntry {
            game_index: i,
            home: t(home),
            away: t(away),
            home_win_prob: p,
            result,
        }
    }

    #[test]
    fn certain_home_wins() {
        let s = SeasonSchedule::from_entries(
            2011,
            vec![entry(0, "AA", "BB", 1.0, None), entry(1, "BB", "AA", 1.0, None)],
        )
        .unwrap();
        let r = simulate_with(
            &s,
            &SimulationOptions {
                retain_samples: true,
                ..SimulationOptions::new(50, 3)
            },
        )
        .unwrap();
        assert!(r.win_samples.unwrap().iter().all(|w| w == &vec![1, 1]));
        assert_eq!(r.mean_wins[&t("AA")], 1.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            SeasonSchedule::from_entries(2011, vec![entry(0, "AA", "BB", 1.5, None)]),
            Err(SimError::InvalidProbability { index: 0, .. })
        ));
        let s = SeasonSchedule::from_entries(2011, vec![entry(0, "AA", "BB", 0.5, None)]).unwrap();
        assert_eq!(simulate(&s, 0, 1), Err(SimError::NoReplications));
        assert_eq!(s.warnings.len(), 2);
    }

    #[test]
    fn ties_credit_half_wins() {
        let s = SeasonSchedule::from_entries(
            2008,
            vec![
                entry(0, "AA", "BB", 0.5, Some(GameResult::Tie)),
                entry(1, "AA", "CC", 0.5, Some(GameResult::HomeWin)),
            ],
        )
        .unwrap();
        assert_eq!(
            s.actual[&t("AA")],
            TeamRecord {
                wins: 1,
                losses: 0,
                ties: 1
            }
        );
        assert_eq!(s.actual_wins()[&t("AA")], 1);
        assert_eq!(s.actual_wins()[&t("BB")], 0);
    }

    #[test]
    fn rounding_is_half_up() {
        assert_eq!(round_half_up(10.5), 11);
        assert_eq!(round_half_up(10.499), 10);
        assert_eq!(round_half_up(0.0), 0);
    }
}
