//! Per-game and aggregate line-accuracy metrics.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::dataset::{favorite_at, Dataset, GameRecord, GameSide, Spread};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("side {0:?} is undefined on a pick-em game")]
    UnresolvableSide(GameSide),
    #[error("bin width must be positive and finite, got {0}")]
    InvalidBinWidth(f64),
    #[error("threshold must be positive, got {0}")]
    InvalidThreshold(f64),
}

/// Result of a bet against the spread.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtsOutcome {
    Cover,
    NoCover,
    Push,
}

impl AtsOutcome {
    pub fn mirror(self) -> AtsOutcome {
        match self {
            AtsOutcome::Cover => AtsOutcome::NoCover,
            AtsOutcome::NoCover => AtsOutcome::Cover,
            AtsOutcome::Push => AtsOutcome::Push,
        }
    }

    fn from_margin(margin: i32) -> AtsOutcome {
        match margin.signum() {
            1 => AtsOutcome::Cover,
            0 => AtsOutcome::Push,
            _ => AtsOutcome::NoCover,
        }
    }
}

/// Margin of victory: winner's score minus loser's score.
pub fn mov(game: &GameRecord) -> u32 {
    game.home_margin().unsigned_abs()
}

/// Line difference in half points against an arbitrary line.
pub(crate) fn line_difference_half_points(game: &GameRecord, line: Spread) -> i32 {
    let margin = 2 * game.home_margin();
    // Home is the favorite operand when favored or on a pick-em.
    if line.half_points() >= 0 {
        margin - line.half_points()
    } else {
        -margin + line.half_points()
    }
}

/// Favorite margin minus the closing spread magnitude. On a pick-em the home
/// team is the favorite operand.
pub fn line_difference(game: &GameRecord) -> f64 {
    f64::from(line_difference_half_points(game, game.line_close)) / 2.0
}

/// ATS outcome for `side` at the closing line.
pub fn ats_outcome(game: &GameRecord, side: GameSide) -> Result<AtsOutcome, MetricsError> {
    ats_outcome_at(game, side, game.line_close)
}

/// ATS outcome for `side` settled against `line` (home-positive).
pub fn ats_outcome_at(game: &GameRecord, side: GameSide, line: Spread) -> Result<AtsOutcome, MetricsError> {
    let favorite = AtsOutcome::from_margin(line_difference_half_points(game, line));
    let home = if line.is_pick() || line.half_points() > 0 {
        favorite
    } else {
        favorite.mirror()
    };
    match side {
        GameSide::Home => Ok(home),
        GameSide::Away => Ok(home.mirror()),
        GameSide::Favorite if !line.is_pick() => Ok(favorite),
        GameSide::Underdog if !line.is_pick() => Ok(favorite.mirror()),
        _ => Err(MetricsError::UnresolvableSide(side)),
    }
}

/// Closing minus opening line in the home-positive frame.
pub fn line_movement(game: &GameRecord) -> f64 {
    (game.line_close - game.line_open).points()
}

pub fn movement_magnitude(game: &GameRecord) -> f64 {
    line_movement(game).abs()
}

/// Partition of games by the favorite's straight-up and ATS result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FavoriteAtsSummary {
    pub covers: usize,
    pub wins_no_cover: usize,
    /// Favorite lost or tied straight up.
    pub losses: usize,
    pub pushes: usize,
    pub pick_ems: usize,
}

impl FavoriteAtsSummary {
    pub fn total(&self) -> usize {
        self.covers + self.wins_no_cover + self.losses + self.pushes + self.pick_ems
    }
}

pub fn favorite_ats_summary(dataset: &Dataset) -> FavoriteAtsSummary {
    let mut s = FavoriteAtsSummary::default();
    for game in dataset.games() {
        let Some((favorite, _, _)) = favorite_at(game, game.line_close) else {
            s.pick_ems += 1;
            continue;
        };
        let favorite_margin = if favorite == game.home {
            game.home_margin()
        } else {
            -game.home_margin()
        };
        let ld = line_difference_half_points(game, game.line_close);
        match ld.signum() {
            1 => s.covers += 1,
            0 => s.pushes += 1,
            _ if favorite_margin > 0 => s.wins_no_cover += 1,
            _ => s.losses += 1,
        }
    }
    s
}

/// Fraction of games the home team won straight up; ties count as half.
pub fn home_straight_up_rate(dataset: &Dataset) -> Option<f64> {
    if dataset.is_empty() {
        return None;
    }
    let half_wins: usize = dataset
        .games()
        .iter()
        .map(|g| match g.home_margin().signum() {
            1 => 2,
            0 => 1,
            _ => 0,
        })
        .sum();
    Some(half_wins as f64 / (2 * dataset.len()) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RecordCell {
    pub wins: u64,
    pub losses: u64,
}

impl RecordCell {
    /// `wins / (wins + losses)`, or 0 when nothing was decided.
    pub fn win_ratio(&self) -> f64 {
        let decided = self.wins + self.losses;
        if decided == 0 {
            0.0
        } else {
            self.wins as f64 / decided as f64
        }
    }

    fn add(self, other: RecordCell) -> RecordCell {
        RecordCell {
            wins: self.wins + other.wins,
            losses: self.losses + other.losses,
        }
    }

    fn record(&mut self, outcome: AtsOutcome) {
        match outcome {
            AtsOutcome::Cover => self.wins += 1,
            AtsOutcome::NoCover => self.losses += 1,
            AtsOutcome::Push => {}
        }
    }
}

/// Home results split by the home team's closing-line role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HomeRecordRow {
    pub favorites: RecordCell,
    pub underdogs: RecordCell,
    /// Straight-up results on zero spreads.
    pub pick_ems: RecordCell,
}

impl HomeRecordRow {
    pub fn all_home_games(&self) -> RecordCell {
        self.favorites.add(self.underdogs).add(self.pick_ems)
    }

    fn add(self, other: HomeRecordRow) -> HomeRecordRow {
        HomeRecordRow {
            favorites: self.favorites.add(other.favorites),
            underdogs: self.underdogs.add(other.underdogs),
            pick_ems: self.pick_ems.add(other.pick_ems),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HomeRecordTable {
    pub seasons: BTreeMap<u16, HomeRecordRow>,
    pub total: HomeRecordRow,
}

impl HomeRecordTable {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("season,fav_w,fav_l,fav_wr,dog_w,dog_l,dog_wr,pick_w,pick_l,pick_wr,all_w,all_l,all_wr\n");
        let rows = self
            .seasons
            .iter()
            .map(|(s, r)| (s.to_string(), r))
            .chain(std::iter::once(("total".to_owned(), &self.total)));
        for (label, row) in rows {
            out.push_str(&label);
            for cell in [row.favorites, row.underdogs, row.pick_ems, row.all_home_games()] {
                out.push_str(&format!(",{},{},{:.3}", cell.wins, cell.losses, cell.win_ratio()));
            }
            out.push('\n');
        }
        out
    }
}

pub fn home_record_table(dataset: &Dataset) -> HomeRecordTable {
    let mut table = HomeRecordTable::default();
    for game in dataset.games() {
        let row = table.seasons.entry(game.season).or_default();
        let outcome = ats_outcome(game, GameSide::Home).expect("home side always resolves");
        match game.line_close.half_points().signum() {
            1 => row.favorites.record(outcome),
            -1 => row.underdogs.record(outcome),
            _ => row.pick_ems.record(outcome),
        }
    }
    table.total = table
        .seasons
        .values()
        .fold(HomeRecordRow::default(), |acc, r| acc.add(*r));
    table
}

/// Fixed-width histogram; bin `i` covers `[origin + i·w, origin + (i+1)·w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_width: f64,
    pub origin: f64,
    pub bins: BTreeMap<i64, u64>,
    pub total: u64,
}

impl Histogram {
    pub fn bin_of(&self, value: f64) -> i64 {
        ((value - self.origin) / self.bin_width).floor() as i64
    }

    pub fn bin_center(&self, index: i64) -> f64 {
        self.origin + (index as f64 + 0.5) * self.bin_width
    }

    pub fn count(&self, index: i64) -> u64 {
        self.bins.get(&index).copied().unwrap_or(0)
    }

    /// The `k` most populated bins, largest count first, ties by lower index.
    pub fn modes(&self, k: usize) -> Vec<(i64, u64)> {
        let mut bins: Vec<(i64, u64)> = self.bins.iter().map(|(&i, &c)| (i, c)).collect();
        bins.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        bins.truncate(k);
        bins
    }

    /// `bin_center,count` rows in bin order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_center,count\n");
        for (&i, &c) in &self.bins {
            out.push_str(&format!("{},{c}\n", self.bin_center(i)));
        }
        out
    }
}

pub fn histogram(values: &[f64], bin_width: f64, origin: f64) -> Result<Histogram, MetricsError> {
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(MetricsError::InvalidBinWidth(bin_width));
    }
    let mut h = Histogram {
        bin_width,
        origin,
        bins: BTreeMap::new(),
        total: 0,
    };
    for &v in values {
        *h.bins.entry(h.bin_of(v)).or_insert(0) += 1;
        h.total += 1;
    }
    Ok(h)
}

pub fn closing_lines(dataset: &Dataset) -> Vec<f64> {
    dataset.games().iter().map(|g| g.line_close.points()).collect()
}

pub fn line_differences(dataset: &Dataset) -> Vec<f64> {
    dataset.games().iter().map(line_difference).collect()
}

pub fn line_movements(dataset: &Dataset) -> Vec<f64> {
    dataset.games().iter().map(line_movement).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeeklyMovement {
    pub by_week: BTreeMap<u8, f64>,
    /// Fraction over all games.
    pub overall: f64,
    /// Mean of the weekly fractions.
    pub mean: f64,
    /// Sample standard deviation of the weekly fractions; 0 with fewer than two weeks.
    pub std_dev: f64,
}

impl WeeklyMovement {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("week,fraction\n");
        for (w, f) in &self.by_week {
            out.push_str(&format!("{w},{f:.6}\n"));
        }
        out
    }
}

/// Per-week fraction of games with `|movement| >= threshold`.
pub fn movement_fraction_by_week(dataset: &Dataset, threshold: f64) -> Result<WeeklyMovement, MetricsError> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(MetricsError::InvalidThreshold(threshold));
    }
    let mut counts: BTreeMap<u8, (usize, usize)> = BTreeMap::new();
    for g in dataset.games() {
        let entry = counts.entry(g.week).or_default();
        entry.1 += 1;
        if movement_magnitude(g) >= threshold {
            entry.0 += 1;
        }
    }
    let by_week: BTreeMap<u8, f64> = counts
        .iter()
        .map(|(&w, &(moved, n))| (w, moved as f64 / n as f64))
        .collect();
    let moved: usize = counts.values().map(|c| c.0).sum();
    let overall = if dataset.is_empty() {
        0.0
    } else {
        moved as f64 / dataset.len() as f64
    };
    let fractions: Vec<f64> = by_week.values().copied().collect();
    let (mean, std_dev) = match crate::stats::moments(&fractions) {
        Ok(m) => (m.mean, m.std_dev),
        Err(_) => (fractions.first().copied().unwrap_or(0.0), 0.0),
    };
    Ok(WeeklyMovement {
        by_week,
        overall,
        mean,
        std_dev,
    })
}

/// For each threshold, the number of games with `|movement| <= threshold`.
pub fn movement_cumulative_counts(dataset: &Dataset, thresholds: &[f64]) -> Vec<(f64, usize)> {
    let mut magnitudes: Vec<f64> = dataset.games().iter().map(movement_magnitude).collect();
    magnitudes.sort_by(f64::total_cmp);
    thresholds
        .iter()
        .map(|&t| (t, magnitudes.partition_point(|&m| m <= t)))
        .collect()
}
