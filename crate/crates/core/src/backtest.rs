//! Flat-stake ATS strategy backtests with risk/win payout accounting.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::dataset::{Dataset, GameRecord, GameSide, Spread};
use crate::metrics::{ats_outcome_at, AtsOutcome};

/// Amount risked per bet at standard pricing.
pub const STANDARD_STAKE: f64 = 110.0;
/// Amount won per winning bet at standard pricing.
pub const STANDARD_PAYOUT: f64 = 100.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BacktestError {
    #[error("stake and payout must be positive and finite (stake {stake}, payout {payout})")]
    NonPositiveStake { stake: f64, payout: f64 },
    #[error("ledger has no decided bets")]
    NoDecidedBets,
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
}

/// Win proportion at which flat betting breaks even: `stake / (stake + win_payout)`.
pub fn break_even_ratio(win_payout: f64, stake: f64) -> Result<f64, BacktestError> {
    check_pricing(stake, win_payout)?;
    Ok(stake / (stake + win_payout))
}

fn check_pricing(stake: f64, payout: f64) -> Result<(), BacktestError> {
    let ok = |v: f64| v.is_finite() && v > 0.0;
    if ok(stake) && ok(payout) {
        Ok(())
    } else {
        Err(BacktestError::NonPositiveStake { stake, payout })
    }
}

/// Line a bet is selected and settled against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SettleLine {
    Opening,
    #[default]
    Closing,
}

impl SettleLine {
    pub fn of(self, game: &GameRecord) -> Spread {
        match self {
            SettleLine::Opening => game.line_open,
            SettleLine::Closing => game.line_close,
        }
    }
}

type Selector = Arc<dyn Fn(&GameRecord, Spread) -> Option<GameSide> + Send + Sync>;

/// Chooses which side, if any, to bet on a game given the settlement line.
#[derive(Clone)]
pub enum Strategy {
    HomeUnderdog,
    HomeFavorite,
    AllHome,
    AllFavorites,
    AllUnderdogs,
    Custom { name: String, selector: Selector },
}

impl fmt::Debug for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Strategy {
    pub const BUILT_IN: [Strategy; 5] = [
        Strategy::HomeUnderdog,
        Strategy::HomeFavorite,
        Strategy::AllHome,
        Strategy::AllFavorites,
        Strategy::AllUnderdogs,
    ];

    pub fn custom(
        name: impl Into<String>,
        selector: impl Fn(&GameRecord, Spread) -> Option<GameSide> + Send + Sync + 'static,
    ) -> Self {
        Strategy::Custom {
            name: name.into(),
            selector: Arc::new(selector),
        }
    }

    /// Keeps this strategy's bets only on games where `predicate` holds.
    pub fn when(
        self,
        name: impl Into<String>,
        predicate: impl Fn(&GameRecord) -> bool + Send + Sync + 'static,
    ) -> Self {
        Strategy::custom(
            name,
            move |g, line| if predicate(g) { self.select(g, line) } else { None },
        )
    }

    pub fn name(&self) -> &str {
        match self {
            Strategy::HomeUnderdog => "home-underdog",
            Strategy::HomeFavorite => "home-favorite",
            Strategy::AllHome => "all-home",
            Strategy::AllFavorites => "all-favorites",
            Strategy::AllUnderdogs => "all-underdogs",
            Strategy::Custom { name, .. } => name,
        }
    }

    pub fn select(&self, game: &GameRecord, line: Spread) -> Option<GameSide> {
        let sign = line.half_points().signum();
        match self {
            Strategy::HomeUnderdog => (sign < 0).then_some(GameSide::Home),
            Strategy::HomeFavorite => (sign > 0).then_some(GameSide::Home),
            Strategy::AllHome => Some(GameSide::Home),
            Strategy::AllFavorites => (sign != 0).then_some(GameSide::Favorite),
            Strategy::AllUnderdogs => (sign != 0).then_some(GameSide::Underdog),
            Strategy::Custom { selector, .. } => selector(game, line),
        }
    }
}

impl FromStr for Strategy {
    type Err = BacktestError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::BUILT_IN
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| BacktestError::UnknownStrategy(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bet {
    pub game: GameRecord,
    pub side: GameSide,
    pub line: Spread,
    pub outcome: AtsOutcome,
    /// Net result in stake units: `+payout`, `-stake`, or 0 on a push.
    pub cashflow: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LedgerTotals {
    pub wins: u64,
    pub losses: u64,
    pub pushes: u64,
    pub profit: f64,
}

impl LedgerTotals {
    pub fn bets(&self) -> u64 {
        self.wins + self.losses + self.pushes
    }

    /// Wins over decided bets; 0 when nothing was decided.
    pub fn win_ratio(&self) -> f64 {
        let decided = self.wins + self.losses;
        if decided == 0 {
            0.0
        } else {
            self.wins as f64 / decided as f64
        }
    }

    fn record(&mut self, outcome: AtsOutcome, stake: f64, payout: f64) {
        match outcome {
            AtsOutcome::Cover => self.wins += 1,
            AtsOutcome::NoCover => self.losses += 1,
            AtsOutcome::Push => self.pushes += 1,
        }
        self.profit = self.wins as f64 * payout - self.losses as f64 * stake;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyLedger {
    pub strategy: String,
    pub stake: f64,
    pub win_payout: f64,
    pub bets: Vec<Bet>,
    pub totals: LedgerTotals,
    pub per_season: BTreeMap<u16, LedgerTotals>,
}

impl StrategyLedger {
    pub fn wins(&self) -> u64 {
        self.totals.wins
    }

    pub fn losses(&self) -> u64 {
        self.totals.losses
    }

    pub fn pushes(&self) -> u64 {
        self.totals.pushes
    }

    pub fn win_ratio(&self) -> f64 {
        self.totals.win_ratio()
    }

    pub fn profit(&self) -> f64 {
        self.totals.profit
    }

    /// One row per bet.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("season,week,date,home,away,home_score,away_score,side,line,outcome,cashflow\n");
        for b in &self.bets {
            let g = &b.game;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{:?},{},{:?},{}\n",
                g.season,
                g.week,
                g.date.format("%Y-%m-%d"),
                g.home,
                g.away,
                g.home_score,
                g.away_score,
                b.side,
                b.line,
                b.outcome,
                b.cashflow
            ));
        }
        out
    }

    /// One row per season with its win ratio.
    pub fn yearly_csv(&self) -> String {
        let mut out = String::from("season,wins,losses,pushes,win_ratio,profit\n");
        for (season, t) in &self.per_season {
            out.push_str(&format!(
                "{season},{},{},{},{:.6},{}\n",
                t.wins,
                t.losses,
                t.pushes,
                t.win_ratio(),
                t.profit
            ));
        }
        out
    }
}

/// Backtest at the closing line.
pub fn run_strategy(
    dataset: &Dataset,
    strategy: &Strategy,
    stake: f64,
    win_payout: f64,
) -> Result<StrategyLedger, BacktestError> {
    run_strategy_at(dataset, strategy, stake, win_payout, SettleLine::Closing)
}

pub fn run_strategy_at(
    dataset: &Dataset,
    strategy: &Strategy,
    stake: f64,
    win_payout: f64,
    settle: SettleLine,
) -> Result<StrategyLedger, BacktestError> {
    check_pricing(stake, win_payout)?;
    let mut ledger = StrategyLedger {
        strategy: strategy.name().to_owned(),
        stake,
        win_payout,
        bets: Vec::new(),
        totals: LedgerTotals::default(),
        per_season: BTreeMap::new(),
    };
    for game in dataset.games() {
        let line = settle.of(game);
        let Some(side) = strategy.select(game, line) else {
            continue;
        };
        // Sides a selector returns on a pick-em must be Home or Away.
        let Ok(outcome) = ats_outcome_at(game, side, line) else {
            continue;
        };
        let cashflow = match outcome {
            AtsOutcome::Cover => win_payout,
            AtsOutcome::NoCover => -stake,
            AtsOutcome::Push => 0.0,
        };
        ledger.totals.record(outcome, stake, win_payout);
        ledger
            .per_season
            .entry(game.season)
            .or_default()
            .record(outcome, stake, win_payout);
        ledger.bets.push(Bet {
            game: game.clone(),
            side,
            line,
            outcome,
            cashflow,
        });
    }
    Ok(ledger)
}

/// Per-season cover proportion (pushes excluded); seasons without decided bets are absent.
pub fn yearly_cover_series(dataset: &Dataset, strategy: &Strategy) -> BTreeMap<u16, f64> {
    let ledger = run_strategy(dataset, strategy, STANDARD_STAKE, STANDARD_PAYOUT).expect("standard pricing is valid");
    ledger
        .per_season
        .iter()
        .filter(|(_, t)| t.wins + t.losses > 0)
        .map(|(&s, t)| (s, t.win_ratio()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakEvenComparison {
    /// Win ratio minus break-even ratio.
    pub margin: f64,
    pub profitable: bool,
}

pub fn compare_to_breakeven(
    ledger: &StrategyLedger,
    stake: f64,
    win_payout: f64,
) -> Result<BreakEvenComparison, BacktestError> {
    compare_totals(&ledger.totals, stake, win_payout)
}

pub fn compare_totals(
    totals: &LedgerTotals,
    stake: f64,
    win_payout: f64,
) -> Result<BreakEvenComparison, BacktestError> {
    let threshold = break_even_ratio(win_payout, stake)?;
    if totals.wins + totals.losses == 0 {
        return Err(BacktestError::NoDecidedBets);
    }
    let margin = totals.win_ratio() - threshold;
    Ok(BreakEvenComparison {
        margin,
        profitable: margin > 0.0,
    })
}
