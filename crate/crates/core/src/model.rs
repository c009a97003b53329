//! Gaussian line-error model: spreads to win probabilities, empirical
//! comparison, and exact season win distributions.

use thiserror::Error;

use crate::dataset::{favorite_of, Dataset, GameRecord, Spread};
use crate::stats::std_normal_cdf;

/// Standard deviation of line difference over 2002–2011 regular seasons.
pub const DEFAULT_SIGMA: f64 = 13.588;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("mu must be finite, got {0}")]
    InvalidMu(f64),
    #[error("tolerance must be non-negative, got {0}")]
    InvalidTolerance(f64),
    #[error("no games with a spread of {spread} ± {tolerance}")]
    NoGamesAtSpread { spread: f64, tolerance: f64 },
    #[error("probability {value} at index {index} is outside [0, 1]")]
    InvalidProbability { index: usize, value: f64 },
}

/// Maps a point spread to a win probability through `Φ((spread − mu) / sigma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WinModel {
    mu: f64,
    sigma: f64,
}

impl Default for WinModel {
    fn default() -> Self {
        WinModel {
            mu: 0.0,
            sigma: DEFAULT_SIGMA,
        }
    }
}

impl WinModel {
    pub fn new(mu: f64, sigma: f64) -> Result<Self, ModelError> {
        if !mu.is_finite() {
            return Err(ModelError::InvalidMu(mu));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(ModelError::InvalidSigma(sigma));
        }
        Ok(WinModel { mu, sigma })
    }

    pub fn with_sigma(sigma: f64) -> Result<Self, ModelError> {
        Self::new(0.0, sigma)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Cumulative probability of the line-error distribution at `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        std_normal_cdf((x - self.mu) / self.sigma)
    }

    /// Probability that a team giving `spread` points wins straight up.
    /// Negative spreads describe an underdog.
    pub fn win_probability(&self, spread: f64) -> f64 {
        self.cdf(spread)
    }

    /// Home team's win probability from the closing line; pick-ems are 0.5.
    pub fn home_win_probability(&self, game: &GameRecord) -> f64 {
        if game.line_close.is_pick() {
            0.5
        } else {
            self.win_probability(game.line_close.points())
        }
    }
}

/// Probability of winning every game, one signed spread per game.
pub fn parlay_probability(model: &WinModel, spreads: &[f64]) -> f64 {
    spreads.iter().map(|&s| model.win_probability(s)).product()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalRate {
    pub rate: f64,
    pub n: usize,
    /// Straight-up ties, each credited as half a win.
    pub ties: usize,
}

/// Straight-up favorite win rate over games whose closing spread magnitude is
/// within `tolerance` of `spread`.
pub fn empirical_win_rate(dataset: &Dataset, spread: f64, tolerance: f64) -> Result<EmpiricalRate, ModelError> {
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(ModelError::InvalidTolerance(tolerance));
    }
    let mut n = 0usize;
    let mut ties = 0usize;
    let mut half_wins = 0usize;
    for game in dataset.games() {
        if (game.line_close.abs().points() - spread).abs() > tolerance {
            continue;
        }
        n += 1;
        let favorite_margin = match favorite_of(game) {
            Some((fav, _, _)) if fav == game.home => game.home_margin(),
            Some(_) => -game.home_margin(),
            // Pick-em: the home team stands in for the favorite.
            None => game.home_margin(),
        };
        match favorite_margin.signum() {
            1 => half_wins += 2,
            0 => {
                ties += 1;
                half_wins += 1;
            }
            _ => {}
        }
    }
    if n == 0 {
        return Err(ModelError::NoGamesAtSpread { spread, tolerance });
    }
    Ok(EmpiricalRate {
        rate: half_wins as f64 / (2 * n) as f64,
        n,
        ties,
    })
}

/// Distribution over the number of wins in a schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct WinDistribution {
    probs: Vec<f64>,
}

impl WinDistribution {
    /// Number of games.
    pub fn n(&self) -> usize {
        self.probs.len() - 1
    }

    /// Probability of exactly `k` wins; zero beyond the schedule length.
    pub fn prob(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.probs
            .iter()
            .enumerate()
            .map(|(k, p)| (k as f64 - mean).powi(2) * p)
            .sum()
    }

    /// `k,probability` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,probability\n");
        for (k, p) in self.probs.iter().enumerate() {
            out.push_str(&format!("{k},{p:.12}\n"));
        }
        out
    }
}

fn check_probabilities(probs: &[f64]) -> Result<(), ModelError> {
    match probs.iter().position(|p| !(0.0..=1.0).contains(p)) {
        Some(index) => Err(ModelError::InvalidProbability {
            index,
            value: probs[index],
        }),
        None => Ok(()),
    }
}

/// Exact distribution of the number of successes among independent Bernoulli
/// trials with the given success probabilities.
pub fn poisson_binomial(probs: &[f64]) -> Result<WinDistribution, ModelError> {
    check_probabilities(probs)?;
    let mut dist = vec![0.0; probs.len() + 1];
    dist[0] = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        // After trial i, wins range over 0..=i+1; update from the top down in place.
        for k in (1..=i + 1).rev() {
            dist[k] = dist[k] * (1.0 - p) + dist[k - 1] * p;
        }
        dist[0] *= 1.0 - p;
    }
    Ok(WinDistribution { probs: dist })
}

pub fn expected_wins(probs: &[f64]) -> f64 {
    probs.iter().sum()
}

/// Win probabilities for `spread` values given in the favorite's frame.
pub fn spread_table(model: &WinModel, spreads: &[Spread]) -> Vec<(Spread, f64)> {
    spreads
        .iter()
        .map(|&s| (s, model.win_probability(s.points())))
        .collect()
}
