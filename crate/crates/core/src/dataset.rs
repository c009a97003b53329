//! Game and division records, CSV ingestion, and filtered views.
//!
//! Spreads use the home-positive convention: a positive closing line means
//! the home team is favored by that many points.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use chrono::NaiveDate;
use thiserror::Error;

/// Last regular-season week for the 32-team, 17-week era.
pub const LAST_REGULAR_WEEK: u8 = 17;

/// Column order of the games CSV.
pub const GAMES_HEADER: [&str; 9] = [
    "season",
    "week",
    "date",
    "home",
    "away",
    "home_score",
    "away_score",
    "line_open",
    "line_close",
];

/// Column order of the divisions CSV.
pub const DIVISIONS_HEADER: [&str; 3] = ["team", "conference", "division"];

const MAX_SPREAD_HALF_POINTS: i32 = 199;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DatasetError {
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("unexpected column `{0}`")]
    UnexpectedColumn(String),
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("line {line}: spread `{value}` is not a multiple of 0.5")]
    NonHalfPointSpread { line: u64, value: String },
    #[error("line {line}: duplicate game {season} week {week} {away}@{home}")]
    DuplicateGame {
        line: u64,
        season: u16,
        week: u8,
        home: TeamId,
        away: TeamId,
    },
    #[error("expected 32 teams, found {0}")]
    WrongTeamCount(usize),
    #[error("line {line}: unknown conference `{value}`")]
    UnknownConference { line: u64, value: String },
    #[error("line {line}: unknown division `{value}`")]
    UnknownDivision { line: u64, value: String },
    #[error("line {line}: team {team} listed twice")]
    DuplicateTeam { line: u64, team: TeamId },
    #[error("{conference} {division} has {count} teams, expected 4")]
    UnbalancedDivision {
        conference: Conference,
        division: Division,
        count: usize,
    },
    #[error("team {0} is not in the division map")]
    UnknownTeam(TeamId),
    #[error("duplicate game {season} week {week} {away}@{home}")]
    DuplicateRecord {
        season: u16,
        week: u8,
        home: TeamId,
        away: TeamId,
    },
}

/// Short uppercase team code such as `NE` or `NYJ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TeamId(String);

impl TeamId {
    pub fn new(code: &str) -> Option<Self> {
        let valid = (1..=5).contains(&code.len())
            && code.bytes().all(|b| b.is_ascii_uppercase() || b.is_ascii_digit())
            && code.bytes().next().is_some_and(|b| b.is_ascii_uppercase());
        valid.then(|| TeamId(code.to_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TeamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A point spread stored as an exact count of half points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Spread(i32);

/// Why a spread string was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpreadParseError {
    Malformed,
    NotHalfPoint,
}

impl Spread {
    pub const PICK: Spread = Spread(0);

    pub const fn from_half_points(half_points: i32) -> Self {
        Spread(half_points)
    }

    /// Rounds to the nearest half point.
    pub fn from_points(points: f64) -> Self {
        Spread((points * 2.0).round() as i32)
    }

    pub const fn half_points(self) -> i32 {
        self.0
    }

    pub fn points(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn abs(self) -> Self {
        Spread(self.0.abs())
    }

    pub const fn is_pick(self) -> bool {
        self.0 == 0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl std::ops::Neg for Spread {
    type Output = Spread;
    fn neg(self) -> Spread {
        Spread(-self.0)
    }
}

impl std::ops::Sub for Spread {
    type Output = Spread;
    fn sub(self, rhs: Spread) -> Spread {
        Spread(self.0 - rhs.0)
    }
}

impl fmt::Display for Spread {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let whole = self.0.abs() / 2;
        if self.0 % 2 == 0 {
            write!(f, "{sign}{whole}")
        } else {
            write!(f, "{sign}{whole}.5")
        }
    }
}

impl FromStr for Spread {
    type Err = SpreadParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let (whole, frac) = match body.split_once('.') {
            Some((w, f)) => (w, Some(f)),
            None => (body, None),
        };
        if whole.is_empty() || !whole.bytes().all(|b| b.is_ascii_digit()) || whole.len() > 3 {
            return Err(SpreadParseError::Malformed);
        }
        let mut half_points: i32 = whole.parse::<i32>().map_err(|_| SpreadParseError::Malformed)? * 2;
        if let Some(frac) = frac {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(SpreadParseError::Malformed);
            }
            let (first, rest) = frac.split_at(1);
            if !rest.bytes().all(|b| b == b'0') {
                return Err(SpreadParseError::NotHalfPoint);
            }
            match first {
                "0" => {}
                "5" => half_points += 1,
                _ => return Err(SpreadParseError::NotHalfPoint),
            }
        }
        if half_points > MAX_SPREAD_HALF_POINTS {
            return Err(SpreadParseError::Malformed);
        }
        Ok(Spread(if negative { -half_points } else { half_points }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Conference {
    Afc,
    Nfc,
}

impl Conference {
    pub const ALL: [Conference; 2] = [Conference::Afc, Conference::Nfc];
}

impl fmt::Display for Conference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conference::Afc => "AFC",
            Conference::Nfc => "NFC",
        })
    }
}

impl FromStr for Conference {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim().to_ascii_uppercase().as_str() {
            "AFC" => Ok(Conference::Afc),
            "NFC" => Ok(Conference::Nfc),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Division {
    East,
    North,
    South,
    West,
}

impl Division {
    pub const ALL: [Division; 4] = [Division::East, Division::North, Division::South, Division::West];
}

impl fmt::Display for Division {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Division::East => "East",
            Division::North => "North",
            Division::South => "South",
            Division::West => "West",
        })
    }
}

impl FromStr for Division {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim().to_ascii_lowercase().as_str() {
            "east" => Ok(Division::East),
            "north" => Ok(Division::North),
            "south" => Ok(Division::South),
            "west" => Ok(Division::West),
            _ => Err(()),
        }
    }
}

/// Validated team → (conference, division) assignment: 32 teams, 8 cells of 4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisionMap {
    entries: BTreeMap<TeamId, (Conference, Division)>,
}

impl DivisionMap {
    pub const TEAM_COUNT: usize = 32;
    pub const TEAMS_PER_DIVISION: usize = 4;

    pub fn new(entries: BTreeMap<TeamId, (Conference, Division)>) -> Result<Self, DatasetError> {
        if entries.len() != Self::TEAM_COUNT {
            return Err(DatasetError::WrongTeamCount(entries.len()));
        }
        for conference in Conference::ALL {
            for division in Division::ALL {
                let count = entries.values().filter(|&&cell| cell == (conference, division)).count();
                if count != Self::TEAMS_PER_DIVISION {
                    return Err(DatasetError::UnbalancedDivision {
                        conference,
                        division,
                        count,
                    });
                }
            }
        }
        Ok(DivisionMap { entries })
    }

    pub fn get(&self, team: &TeamId) -> Option<(Conference, Division)> {
        self.entries.get(team).copied()
    }

    pub fn contains(&self, team: &TeamId) -> bool {
        self.entries.contains_key(team)
    }

    pub fn teams(&self) -> impl Iterator<Item = &TeamId> {
        self.entries.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TeamId, (Conference, Division))> {
        self.entries.iter().map(|(t, &cell)| (t, cell))
    }

    /// Teams of one (conference, division) cell in code order.
    pub fn members(&self, conference: Conference, division: Division) -> Vec<TeamId> {
        self.entries
            .iter()
            .filter(|(_, &cell)| cell == (conference, division))
            .map(|(t, _)| t.clone())
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = DIVISIONS_HEADER.join(",");
        out.push('\n');
        for (team, (conference, division)) in &self.entries {
            out.push_str(&format!("{team},{conference},{division}\n"));
        }
        out
    }
}

/// One game with final score and opening/closing lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameRecord {
    pub season: u16,
    pub week: u8,
    pub date: NaiveDate,
    pub home: TeamId,
    pub away: TeamId,
    pub home_score: u16,
    pub away_score: u16,
    pub line_open: Spread,
    pub line_close: Spread,
}

impl GameRecord {
    pub fn is_regular_season(&self) -> bool {
        self.week <= LAST_REGULAR_WEEK
    }

    /// Home score minus away score.
    pub fn home_margin(&self) -> i32 {
        i32::from(self.home_score) - i32::from(self.away_score)
    }

    fn key(&self) -> (u16, u8, &TeamId, &TeamId) {
        (self.season, self.week, &self.home, &self.away)
    }
}

/// Which team a bet or query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameSide {
    Home,
    Away,
    Favorite,
    Underdog,
}

/// `(favorite, underdog, spread magnitude)` at the closing line, or `None` on a pick-em.
pub fn favorite_of(game: &GameRecord) -> Option<(TeamId, TeamId, Spread)> {
    favorite_at(game, game.line_close)
}

pub(crate) fn favorite_at(game: &GameRecord, line: Spread) -> Option<(TeamId, TeamId, Spread)> {
    match line.half_points().signum() {
        1 => Some((game.home.clone(), game.away.clone(), line)),
        -1 => Some((game.away.clone(), game.home.clone(), -line)),
        _ => None,
    }
}

fn strip_bom(text: &str) -> &str {
    text.strip_prefix('\u{feff}').unwrap_or(text)
}

fn column_indices(headers: &csv::StringRecord, wanted: &[&str]) -> Result<Vec<usize>, DatasetError> {
    for h in headers.iter() {
        if !wanted.contains(&h.trim()) {
            return Err(DatasetError::UnexpectedColumn(h.trim().to_owned()));
        }
    }
    wanted
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h.trim() == *name)
                .ok_or_else(|| DatasetError::MissingColumn((*name).to_owned()))
        })
        .collect()
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(strip_bom(text).as_bytes())
}

fn malformed(line: u64, reason: impl Into<String>) -> DatasetError {
    DatasetError::MalformedRow {
        line,
        reason: reason.into(),
    }
}

fn field(record: &csv::StringRecord, idx: usize, line: u64) -> Result<&str, DatasetError> {
    record
        .get(idx)
        .map(str::trim)
        .ok_or_else(|| malformed(line, "too few fields"))
}

fn parse_num<T: FromStr>(text: &str, name: &str, line: u64) -> Result<T, DatasetError> {
    text.parse()
        .map_err(|_| malformed(line, format!("invalid {name} `{text}`")))
}

fn parse_team(text: &str, name: &str, line: u64) -> Result<TeamId, DatasetError> {
    TeamId::new(text).ok_or_else(|| malformed(line, format!("invalid {name} team code `{text}`")))
}

fn parse_spread(text: &str, name: &str, line: u64) -> Result<Spread, DatasetError> {
    text.parse().map_err(|e| match e {
        SpreadParseError::NotHalfPoint => DatasetError::NonHalfPointSpread {
            line,
            value: text.to_owned(),
        },
        SpreadParseError::Malformed => malformed(line, format!("invalid {name} `{text}`")),
    })
}

/// Parses a games CSV. Errors carry the 1-based line number in the file.
pub fn parse_games(csv_text: &str) -> Result<Vec<GameRecord>, DatasetError> {
    let mut rdr = reader(csv_text);
    let headers = rdr.headers().map_err(|e| malformed(1, e.to_string()))?.clone();
    if headers.iter().all(|h| h.trim().is_empty()) {
        return Err(DatasetError::MissingColumn(GAMES_HEADER[0].to_owned()));
    }
    let idx = column_indices(&headers, &GAMES_HEADER)?;

    let mut games = Vec::new();
    let mut seen = HashSet::new();
    for result in rdr.records() {
        let record = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(malformed(
                line,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        let get = |i: usize| field(&record, idx[i], line);

        let season: u16 = parse_num(get(0)?, "season", line)?;
        let week: u8 = parse_num(get(1)?, "week", line)?;
        if week == 0 {
            return Err(malformed(line, "week must be at least 1"));
        }
        let date = NaiveDate::parse_from_str(get(2)?, "%Y-%m-%d")
            .map_err(|_| malformed(line, format!("invalid date `{}`", get(2).unwrap_or(""))))?;
        let home = parse_team(get(3)?, "home", line)?;
        let away = parse_team(get(4)?, "away", line)?;
        if home == away {
            return Err(malformed(line, format!("team {home} plays itself")));
        }
        let home_score: u16 = parse_num(get(5)?, "home_score", line)?;
        let away_score: u16 = parse_num(get(6)?, "away_score", line)?;
        let line_open = parse_spread(get(7)?, "line_open", line)?;
        let line_close = parse_spread(get(8)?, "line_close", line)?;

        let game = GameRecord {
            season,
            week,
            date,
            home,
            away,
            home_score,
            away_score,
            line_open,
            line_close,
        };
        if !seen.insert((season, week, game.home.clone(), game.away.clone())) {
            return Err(DatasetError::DuplicateGame {
                line,
                season,
                week,
                home: game.home,
                away: game.away,
            });
        }
        games.push(game);
    }
    Ok(games)
}

/// Writes games in the same CSV dialect `parse_games` reads.
pub fn write_games(games: &[GameRecord]) -> String {
    let mut out = GAMES_HEADER.join(",");
    out.push('\n');
    for g in games {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            g.season,
            g.week,
            g.date.format("%Y-%m-%d"),
            g.home,
            g.away,
            g.home_score,
            g.away_score,
            g.line_open,
            g.line_close
        ));
    }
    out
}

pub fn parse_divisions(csv_text: &str) -> Result<DivisionMap, DatasetError> {
    let mut rdr = reader(csv_text);
    let headers = rdr.headers().map_err(|e| malformed(1, e.to_string()))?.clone();
    if headers.iter().all(|h| h.trim().is_empty()) {
        return Err(DatasetError::MissingColumn(DIVISIONS_HEADER[0].to_owned()));
    }
    let idx = column_indices(&headers, &DIVISIONS_HEADER)?;

    let mut entries = BTreeMap::new();
    for result in rdr.records() {
        let record = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(malformed(
                line,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        let team = parse_team(field(&record, idx[0], line)?, "division", line)?;
        let conf_text = field(&record, idx[1], line)?;
        let conference: Conference = conf_text.parse().map_err(|_| DatasetError::UnknownConference {
            line,
            value: conf_text.to_owned(),
        })?;
        let div_text = field(&record, idx[2], line)?;
        let division: Division = div_text.parse().map_err(|_| DatasetError::UnknownDivision {
            line,
            value: div_text.to_owned(),
        })?;
        if entries.insert(team.clone(), (conference, division)).is_some() {
            return Err(DatasetError::DuplicateTeam { line, team });
        }
    }
    DivisionMap::new(entries)
}

/// Inclusive-range filter over seasons and weeks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GameFilter {
    pub seasons: Option<RangeInclusive<u16>>,
    pub weeks: Option<RangeInclusive<u8>>,
    pub regular_season_only: bool,
}

fn intersect<T: Ord + Copy>(a: &Option<RangeInclusive<T>>, b: &Option<RangeInclusive<T>>) -> Option<RangeInclusive<T>> {
    match (a, b) {
        (None, None) => None,
        (Some(r), None) | (None, Some(r)) => Some(r.clone()),
        (Some(x), Some(y)) => Some(*x.start().max(y.start())..=*x.end().min(y.end())),
    }
}

impl GameFilter {
    pub fn regular_season() -> Self {
        GameFilter {
            regular_season_only: true,
            ..Default::default()
        }
    }

    pub fn seasons(mut self, range: RangeInclusive<u16>) -> Self {
        self.seasons = Some(range);
        self
    }

    pub fn weeks(mut self, range: RangeInclusive<u8>) -> Self {
        self.weeks = Some(range);
        self
    }

    pub fn matches(&self, game: &GameRecord) -> bool {
        self.seasons.as_ref().is_none_or(|r| r.contains(&game.season))
            && self.weeks.as_ref().is_none_or(|r| r.contains(&game.week))
            && (!self.regular_season_only || game.is_regular_season())
    }

    /// Filter accepting exactly the games both filters accept.
    pub fn intersect(&self, other: &GameFilter) -> GameFilter {
        GameFilter {
            seasons: intersect(&self.seasons, &other.seasons),
            weeks: intersect(&self.weeks, &other.weeks),
            regular_season_only: self.regular_season_only || other.regular_season_only,
        }
    }
}

/// A validated, ordered collection of games plus the division map they resolve against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    games: Vec<GameRecord>,
    divisions: DivisionMap,
    provenance: String,
}

impl Dataset {
    pub fn new(
        games: Vec<GameRecord>,
        divisions: DivisionMap,
        provenance: impl Into<String>,
    ) -> Result<Self, DatasetError> {
        let mut seen = HashSet::new();
        for g in &games {
            for team in [&g.home, &g.away] {
                if !divisions.contains(team) {
                    return Err(DatasetError::UnknownTeam(team.clone()));
                }
            }
            if !seen.insert(g.key()) {
                return Err(DatasetError::DuplicateRecord {
                    season: g.season,
                    week: g.week,
                    home: g.home.clone(),
                    away: g.away.clone(),
                });
            }
        }
        Ok(Dataset {
            games,
            divisions,
            provenance: provenance.into(),
        })
    }

    /// Parses both CSV files and validates team references.
    pub fn from_csv(games_csv: &str, divisions_csv: &str, provenance: impl Into<String>) -> Result<Self, DatasetError> {
        let divisions = parse_divisions(divisions_csv)?;
        let games = parse_games(games_csv)?;
        Dataset::new(games, divisions, provenance)
    }

    pub fn games(&self) -> &[GameRecord] {
        &self.games
    }

    pub fn divisions(&self) -> &DivisionMap {
        &self.divisions
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.games.len()
    }

    pub fn is_empty(&self) -> bool {
        self.games.is_empty()
    }

    /// Distinct seasons in ascending order.
    pub fn seasons(&self) -> Vec<u16> {
        let mut seasons: Vec<u16> = self.games.iter().map(|g| g.season).collect();
        seasons.sort_unstable();
        seasons.dedup();
        seasons
    }

    pub fn filter(&self, filter: &GameFilter) -> Dataset {
        Dataset {
            games: self.games.iter().filter(|g| filter.matches(g)).cloned().collect(),
            divisions: self.divisions.clone(),
            provenance: self.provenance.clone(),
        }
    }
}
