//! Analytics for historical NFL point spreads.
//!
//! * [`dataset`]: game and division records, CSV ingestion, filters.
//! * [`metrics`]: margin of victory, line difference, ATS outcomes, line movement, histograms.
//! * [`stats`]: normal CDF, moments, proportion z-tests, chi-squared goodness of fit.
//! * [`model`]: spread-to-win-probability model and exact win distributions.
//! * [`simulator`]: seeded season simulation and division-winner prediction.
//! * [`backtest`]: flat-stake ATS strategy backtests.
//! * [`cli`]: the `nfl-lines` command line.

pub mod backtest;
pub mod chart;
pub mod cli;
pub mod dataset;
pub mod metrics;
pub mod model;
pub mod simulator;
pub mod stats;

pub use dataset::{favorite_of, Dataset, DivisionMap, GameRecord, GameSide, Spread, TeamId};
pub use metrics::AtsOutcome;
pub use model::{WinDistribution, WinModel};
pub use simulator::{SeasonSchedule, SimulationResult};
