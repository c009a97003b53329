//! Command-line front end.
//!
//! Exit codes: 0 success, 1 data or runtime error, 2 usage error.
//! Reports go to the output stream; diagnostics go to the error stream.

use std::fmt::Write as _;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::builder::TypedValueParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::backtest::{
    break_even_ratio, compare_to_breakeven, run_strategy, run_strategy_at, SettleLine, Strategy, STANDARD_PAYOUT,
    STANDARD_STAKE,
};
use crate::chart::histogram_svg;
use crate::dataset::{Dataset, DatasetError, GameFilter, Spread};
use crate::metrics::{
    closing_lines, favorite_ats_summary, histogram, home_record_table, home_straight_up_rate, line_differences,
    line_movements, movement_cumulative_counts, movement_fraction_by_week,
};
use crate::model::{empirical_win_rate, spread_table, WinModel, DEFAULT_SIGMA};
use crate::simulator::{
    build_schedule, predict_division_winners, score_predictions, season_wins_csv, simulate_with, ScheduleWarning,
    SimulationOptions, DEFAULT_REPLICATIONS,
};
use crate::stats::{chi_square_gof, moments, proportion_z, DEFAULT_GOF_BIN_WIDTH, DEFAULT_MIN_EXPECTED};

/// Directory holding `games.csv` and `divisions.csv` when paths are not given.
pub const DATA_DIR_ENV: &str = "NFL_LINES_DATA";

pub const DEFAULT_SEED: u64 = 20_021_011;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Data {
        path: PathBuf,
        #[source]
        source: DatasetError,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn runtime(err: impl std::fmt::Display) -> Self {
        CliError::Runtime(err.to_string())
    }
}

/// Parses `2002..2011`, `2002..=2011`, or a single year.
pub fn parse_year_range(text: &str) -> Result<RangeInclusive<u16>, String> {
    let text = text.trim();
    let parse = |s: &str| -> Result<u16, String> { s.trim().parse().map_err(|_| format!("invalid year `{s}`")) };
    let range = match text.split_once("..") {
        Some((a, b)) => parse(a)?..=parse(b.strip_prefix('=').unwrap_or(b))?,
        None => {
            let y = parse(text)?;
            y..=y
        }
    };
    if range.is_empty() {
        return Err(format!("empty range `{text}`"));
    }
    Ok(range)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HistMetric {
    ClosingLine,
    Ld,
    Movement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SettleArg {
    Closing,
    Opening,
}

#[derive(Debug, Parser)]
#[command(
    name = "nfl-lines",
    version,
    about = "NFL point-spread analytics, season simulation, and ATS backtesting"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Games CSV; defaults to $NFL_LINES_DATA/games.csv.
    #[arg(long, global = true)]
    pub games: Option<PathBuf>,
    /// Divisions CSV; defaults to $NFL_LINES_DATA/divisions.csv.
    #[arg(long, global = true)]
    pub divisions: Option<PathBuf>,
    #[arg(long, global = true, env = DATA_DIR_ENV, hide_env_values = true)]
    pub data_dir: Option<PathBuf>,
    /// Season range such as 2002..2011.
    #[arg(long, global = true, value_parser = parse_year_range)]
    pub seasons: Option<RangeInclusive<u16>>,
    /// Include postseason games (weeks after 17).
    #[arg(long, global = true)]
    pub include_postseason: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write csv/svg artifacts here instead of to stdout.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct SimArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_REPLICATIONS, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    pub replications: usize,
    /// Worker threads for replications; defaults to all cores.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    pub sigma: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate the input files.
    IngestCheck,
    /// Dataset counts, home records, favorite ATS partition, line-difference moments.
    Summary,
    /// Histogram of closing lines, line differences, or line movement.
    Hist {
        #[arg(long, value_enum)]
        metric: HistMetric,
        #[arg(long)]
        bin_width: Option<f64>,
    },
    /// Chi-squared goodness of fit of line differences against Normal(0, sigma).
    Gof {
        #[arg(long, default_value_t = DEFAULT_SIGMA)]
        sigma: f64,
        #[arg(long, default_value_t = DEFAULT_GOF_BIN_WIDTH)]
        bin_width: f64,
        #[arg(long, default_value_t = DEFAULT_MIN_EXPECTED)]
        min_expected: f64,
    },
    /// Simulate one season and predict division winners.
    Simulate {
        #[arg(long)]
        season: u16,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Division-winner accuracy for every season in range.
    PredictDivisions {
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Flat-stake ATS backtest of a betting strategy.
    Backtest {
        #[arg(long, default_value = "home-underdog")]
        strategy: String,
        #[arg(long, default_value_t = STANDARD_STAKE)]
        stake: f64,
        #[arg(long, default_value_t = STANDARD_PAYOUT)]
        payout: f64,
        #[arg(long, value_enum, default_value_t = SettleArg::Closing)]
        settle: SettleArg,
    },
    /// Line movement by week and cumulative movement counts.
    Movement {
        #[arg(long, default_value_t = 1.0)]
        threshold: f64,
    },
}

/// Resolved inputs shared by every command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub games_path: PathBuf,
    pub divisions_path: PathBuf,
    pub seasons: Option<RangeInclusive<u16>>,
    pub include_postseason: bool,
    pub format: Format,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    fn from_args(args: &GlobalArgs) -> Result<Self, CliError> {
        let resolve = |explicit: &Option<PathBuf>, file: &str| -> Result<PathBuf, CliError> {
            match (explicit, &args.data_dir) {
                (Some(p), _) => Ok(p.clone()),
                (None, Some(dir)) => Ok(dir.join(file)),
                (None, None) => Err(CliError::Runtime(format!(
                    "no {file}: pass --{} or set {DATA_DIR_ENV}",
                    file.trim_end_matches(".csv")
                ))),
            }
        };
        Ok(RunConfig {
            games_path: resolve(&args.games, "games.csv")?,
            divisions_path: resolve(&args.divisions, "divisions.csv")?,
            seasons: args.seasons.clone(),
            include_postseason: args.include_postseason,
            format: args.format,
            output_dir: args.output_dir.clone(),
        })
    }

    fn filter(&self) -> GameFilter {
        GameFilter {
            seasons: self.seasons.clone(),
            weeks: None,
            regular_season_only: !self.include_postseason,
        }
    }

    /// Loads, validates, and filters the dataset.
    pub fn load(&self) -> Result<Dataset, CliError> {
        let read = |path: &Path| {
            std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.to_owned(),
                source,
            })
        };
        let divisions_text = read(&self.divisions_path)?;
        let games_text = read(&self.games_path)?;
        let divisions = crate::dataset::parse_divisions(&divisions_text).map_err(|source| CliError::Data {
            path: self.divisions_path.clone(),
            source,
        })?;
        let data_err = |source| CliError::Data {
            path: self.games_path.clone(),
            source,
        };
        let games = crate::dataset::parse_games(&games_text).map_err(data_err)?;
        let dataset = Dataset::new(games, divisions, self.games_path.display().to_string()).map_err(data_err)?;
        Ok(dataset.filter(&self.filter()))
    }
}

/// A named file artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

/// What a command produced: a text report plus any csv/svg artifacts.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub report: String,
    pub artifacts: Vec<Artifact>,
}

fn paper_ref(out: &mut String, label: &str, value: &str) {
    let _ = writeln!(out, "  paper reference: {label} = {value}");
}

pub fn cmd_ingest_check(config: &RunConfig) -> Result<Output, CliError> {
    let dataset = config.load()?;
    let mut report = String::new();
    let _ = writeln!(
        report,
        "ok: {} games, {} teams",
        dataset.len(),
        dataset.divisions().teams().count()
    );
    for season in dataset.seasons() {
        let model = WinModel::default();
        if let Ok(schedule) = build_schedule(&dataset, season, &model) {
            for w in schedule.warnings {
                let ScheduleWarning::IncompleteSchedule { team, games } = w;
                let _ = writeln!(report, "warning: {season} {team} plays {games} regular-season games");
            }
        }
    }
    Ok(Output {
        report,
        artifacts: Vec::new(),
    })
}

pub fn cmd_summary(config: &RunConfig) -> Result<Output, CliError> {
    let dataset = config.load()?;
    let mut r = String::new();
    let _ = writeln!(r, "games: {}", dataset.len());
    paper_ref(&mut r, "regular-season games 2002-2011", "2560 (256 per season)");
    for season in dataset.seasons() {
        let n = dataset.games().iter().filter(|g| g.season == season).count();
        let _ = writeln!(r, "  {season}: {n}");
    }
    match home_straight_up_rate(&dataset) {
        Some(rate) => {
            let _ = writeln!(r, "home straight-up win rate: {rate:.3}");
        }
        None => {
            let _ = writeln!(r, "home straight-up win rate: n/a");
        }
    }
    paper_ref(&mut r, "home straight-up win rate", "0.57");

    let s = favorite_ats_summary(&dataset);
    let _ = writeln!(
        r,
        "favorite ATS: covers {} / won without covering {} / lost {} / pushes {} / pick-ems {}",
        s.covers, s.wins_no_cover, s.losses, s.pushes, s.pick_ems
    );
    paper_ref(&mut r, "favorite ATS partition", "1194 / 412 / 853 / 101");

    match moments(&line_differences(&dataset)) {
        Ok(m) => {
            let _ = writeln!(
                r,
                "line difference: mean {:.3}, std {:.3} (n = {})",
                m.mean, m.std_dev, m.n
            );
        }
        Err(_) => {
            let _ = writeln!(r, "line difference: n/a");
        }
    }
    paper_ref(&mut r, "line difference mean / std", "-0.009 / 13.588");

    let table = home_record_table(&dataset);
    let total = table.total;
    let _ = writeln!(r, "home ATS records (W-L, ratio):");
    let cells = [
        ("favorites", total.favorites),
        ("underdogs", total.underdogs),
        ("pick-ems", total.pick_ems),
        ("all", total.all_home_games()),
    ];
    for (label, cell) in cells {
        let z = |p0| {
            proportion_z(cell.wins, cell.losses, p0)
                .map(|z| format!("{:.3}", z.z))
                .unwrap_or("n/a".into())
        };
        let _ = writeln!(
            r,
            "  {label:<10} {}-{} {:.3}  z(0.5) {}  z(0.5238) {}",
            cell.wins,
            cell.losses,
            cell.win_ratio(),
            z(0.5),
            z(break_even_ratio(STANDARD_PAYOUT, STANDARD_STAKE).expect("standard pricing"))
        );
    }
    paper_ref(&mut r, "home ATS totals", "816-888 / 409-396 / 15-13 / 1240-1297");

    let model = WinModel::default();
    let _ = writeln!(r, "win probability by spread (model, actual):");
    let spreads: Vec<Spread> = [1.0, 3.0, 5.0, 7.0].into_iter().map(Spread::from_points).collect();
    for (spread, p) in spread_table(&model, &spreads) {
        let actual = empirical_win_rate(&dataset, spread.points(), 0.0)
            .map(|e| format!("{:.3} (n = {})", e.rate, e.n))
            .unwrap_or_else(|_| "n/a".into());
        let _ = writeln!(r, "  {spread:>3}: {p:.3}  {actual}");
    }
    paper_ref(
        &mut r,
        "model / actual at 1,3,5,7",
        "0.529/0.509 0.587/0.581 0.644/0.597 0.697/0.689",
    );

    Ok(Output {
        report: r,
        artifacts: vec![Artifact {
            file_name: "home_records.csv".into(),
            contents: table.to_csv(),
        }],
    })
}

pub fn cmd_hist(config: &RunConfig, metric: HistMetric, bin_width: Option<f64>) -> Result<Output, CliError> {
    let dataset = config.load()?;
    let (values, default_width, name, title) = match metric {
        HistMetric::ClosingLine => (closing_lines(&dataset), 0.5, "closing-line", "Closing line values"),
        HistMetric::Ld => (line_differences(&dataset), 1.0, "ld", "Line difference"),
        HistMetric::Movement => (line_movements(&dataset), 0.5, "movement", "Line movement (points)"),
    };
    let width = bin_width.unwrap_or(default_width);
    // Bins centered on multiples of the width.
    let hist = histogram(&values, width, -width / 2.0).map_err(CliError::runtime)?;

    let mut report = String::new();
    let _ = writeln!(report, "{name}: {} values, bin width {width}", hist.total);
    let modes: Vec<String> = hist
        .modes(3)
        .into_iter()
        .map(|(i, c)| format!("{} ({c})", hist.bin_center(i)))
        .collect();
    let _ = writeln!(report, "most common: {}", modes.join(", "));
    if metric == HistMetric::ClosingLine {
        paper_ref(&mut report, "most common closing lines", "3, -3, 7");
    }
    let artifact = match config.format {
        Format::Svg => Artifact {
            file_name: format!("hist_{name}.svg"),
            contents: histogram_svg(&hist, title),
        },
        _ => Artifact {
            file_name: format!("hist_{name}.csv"),
            contents: hist.to_csv(),
        },
    };
    Ok(Output {
        report,
        artifacts: vec![artifact],
    })
}

pub fn cmd_gof(config: &RunConfig, sigma: f64, bin_width: f64, min_expected: f64) -> Result<Output, CliError> {
    let dataset = config.load()?;
    let values = line_differences(&dataset);
    let gof = chi_square_gof(&values, sigma, bin_width, min_expected).map_err(CliError::runtime)?;
    let mut report = String::new();
    let _ = writeln!(report, "chi-squared vs Normal(0, {sigma}): n = {}", values.len());
    let _ = writeln!(
        report,
        "statistic {:.3}, df {}, critical(0.05) {:.3}, p-value {:.4}",
        gof.statistic, gof.degrees_of_freedom, gof.critical_value, gof.p_value
    );
    let _ = writeln!(
        report,
        "{}",
        if gof.reject_at_05 {
            "reject normality at 0.05"
        } else {
            "not statistically different from normal at 0.05"
        }
    );
    paper_ref(&mut report, "outcome", "not statistically different");
    let mut csv = String::from("lower,upper,observed,expected\n");
    for b in &gof.bins {
        let _ = writeln!(csv, "{},{},{},{:.6}", b.lower, b.upper, b.observed, b.expected);
    }
    Ok(Output {
        report,
        artifacts: vec![Artifact {
            file_name: "gof_bins.csv".into(),
            contents: csv,
        }],
    })
}

fn sim_options(sim: &SimArgs) -> SimulationOptions {
    SimulationOptions {
        replications: sim.replications,
        seed: sim.seed,
        threads: sim.threads,
        retain_samples: false,
    }
}

pub fn cmd_simulate(config: &RunConfig, season: u16, sim: &SimArgs) -> Result<Output, CliError> {
    let dataset = config.load()?;
    let model = WinModel::with_sigma(sim.sigma).map_err(CliError::runtime)?;
    let schedule = build_schedule(&dataset, season, &model).map_err(CliError::runtime)?;
    let result = simulate_with(&schedule, &sim_options(sim)).map_err(CliError::runtime)?;
    let predictions = predict_division_winners(&result, &schedule, dataset.divisions()).map_err(CliError::runtime)?;
    let (correct, total) = score_predictions(&predictions);
    let csv = season_wins_csv(&result, &schedule, &predictions, dataset.divisions());

    let mut report = String::new();
    let _ = writeln!(
        report,
        "season {season}: {} replications, seed {}",
        result.replications, result.seed
    );
    for line in csv.lines().skip(1) {
        let _ = writeln!(report, "  {}", line.replace(',', "  "));
    }
    let _ = writeln!(report, "division winners: {correct}/{total}");
    Ok(Output {
        report,
        artifacts: vec![Artifact {
            file_name: format!("simulate_{season}.csv"),
            contents: csv,
        }],
    })
}

pub fn cmd_predict_divisions(config: &RunConfig, sim: &SimArgs) -> Result<Output, CliError> {
    let dataset = config.load()?;
    let model = WinModel::with_sigma(sim.sigma).map_err(CliError::runtime)?;
    let mut report = String::new();
    let mut csv = String::from("season,correct,total\n");
    let (mut all_correct, mut all_total) = (0, 0);
    for season in dataset.seasons() {
        let schedule = build_schedule(&dataset, season, &model).map_err(CliError::runtime)?;
        let result = simulate_with(&schedule, &sim_options(sim)).map_err(CliError::runtime)?;
        let predictions =
            predict_division_winners(&result, &schedule, dataset.divisions()).map_err(CliError::runtime)?;
        let (correct, total) = score_predictions(&predictions);
        all_correct += correct;
        all_total += total;
        let _ = writeln!(report, "{season}: {correct}/{total}");
        let _ = writeln!(csv, "{season},{correct},{total}");
    }
    let _ = writeln!(report, "total: {all_correct}/{all_total}");
    paper_ref(&mut report, "2002-2011 total", "67/80");
    Ok(Output {
        report,
        artifacts: vec![Artifact {
            file_name: "division_predictions.csv".into(),
            contents: csv,
        }],
    })
}

pub fn cmd_backtest(
    config: &RunConfig,
    strategy_name: &str,
    stake: f64,
    payout: f64,
    settle: SettleArg,
) -> Result<Output, CliError> {
    let strategy: Strategy = strategy_name.parse().map_err(CliError::runtime)?;
    let dataset = config.load()?;
    let settle = match settle {
        SettleArg::Closing => SettleLine::Closing,
        SettleArg::Opening => SettleLine::Opening,
    };
    let ledger = run_strategy_at(&dataset, &strategy, stake, payout, settle).map_err(CliError::runtime)?;
    let threshold = break_even_ratio(payout, stake).map_err(CliError::runtime)?;

    let mut r = String::new();
    let _ = writeln!(
        r,
        "{}: {} bets, {}-{}-{} (W-L-P), win ratio {:.3}, profit {:.2}",
        ledger.strategy,
        ledger.totals.bets(),
        ledger.wins(),
        ledger.losses(),
        ledger.pushes(),
        ledger.win_ratio(),
        ledger.profit()
    );
    match compare_to_breakeven(&ledger, stake, payout) {
        Ok(c) => {
            let _ = writeln!(
                r,
                "break-even {threshold:.4}, margin {:+.4}, {}",
                c.margin,
                if c.profitable { "profitable" } else { "not profitable" }
            );
        }
        Err(_) => {
            let _ = writeln!(r, "break-even {threshold:.4}, no decided bets");
        }
    }
    for (season, t) in &ledger.per_season {
        let _ = writeln!(
            r,
            "  {season}: {}-{}-{} {:.3}",
            t.wins,
            t.losses,
            t.pushes,
            t.win_ratio()
        );
    }
    if matches!(strategy, Strategy::HomeUnderdog) {
        paper_ref(
            &mut r,
            "home underdogs 2002-2011",
            "409-396 (0.508); summary figure 0.535",
        );
    }

    let favorites = run_strategy(&dataset, &Strategy::AllFavorites, stake, payout).map_err(CliError::runtime)?;
    let underdogs = run_strategy(&dataset, &Strategy::AllUnderdogs, stake, payout).map_err(CliError::runtime)?;
    let mirror = favorites.wins() == underdogs.losses()
        && favorites.losses() == underdogs.wins()
        && favorites.pushes() == underdogs.pushes();
    let _ = writeln!(
        r,
        "mirror check (favorites {}-{}-{} vs underdogs {}-{}-{}): {}",
        favorites.wins(),
        favorites.losses(),
        favorites.pushes(),
        underdogs.wins(),
        underdogs.losses(),
        underdogs.pushes(),
        if mirror { "holds" } else { "FAILED" }
    );

    Ok(Output {
        report: r,
        artifacts: vec![
            Artifact {
                file_name: format!("backtest_{}.csv", ledger.strategy),
                contents: ledger.to_csv(),
            },
            Artifact {
                file_name: format!("backtest_{}_yearly.csv", ledger.strategy),
                contents: ledger.yearly_csv(),
            },
        ],
    })
}

pub fn cmd_movement(config: &RunConfig, threshold: f64) -> Result<Output, CliError> {
    let dataset = config.load()?;
    let weekly = movement_fraction_by_week(&dataset, threshold).map_err(CliError::runtime)?;
    let mut r = String::new();
    let _ = writeln!(
        r,
        "games with |movement| >= {threshold}: {:.3} overall; weekly mean {:.3}, std {:.3}",
        weekly.overall, weekly.mean, weekly.std_dev
    );
    for (week, f) in &weekly.by_week {
        let _ = writeln!(r, "  week {week:>2}: {f:.3}");
    }
    let mut csv = String::from("threshold,games_at_or_below\n");
    for (t, n) in movement_cumulative_counts(&dataset, &[0.0, 0.5, 1.0, 1.5, 2.0, 3.0, f64::INFINITY]) {
        let _ = writeln!(r, "|movement| <= {t}: {n} games");
        let _ = writeln!(csv, "{t},{n}");
    }
    paper_ref(&mut r, "|movement| <= 0.5 / <= 1", "1548 / over 2000 of 2560");
    Ok(Output {
        report: r,
        artifacts: vec![
            Artifact {
                file_name: format!("movement_by_week_{threshold}.csv"),
                contents: weekly.to_csv(),
            },
            Artifact {
                file_name: "movement_cumulative.csv".into(),
                contents: csv,
            },
        ],
    })
}

fn dispatch(cli: &Cli) -> Result<Output, CliError> {
    let config = RunConfig::from_args(&cli.global)?;
    match &cli.command {
        Command::IngestCheck => cmd_ingest_check(&config),
        Command::Summary => cmd_summary(&config),
        Command::Hist { metric, bin_width } => cmd_hist(&config, *metric, *bin_width),
        Command::Gof {
            sigma,
            bin_width,
            min_expected,
        } => cmd_gof(&config, *sigma, *bin_width, *min_expected),
        Command::Simulate { season, sim } => cmd_simulate(&config, *season, sim),
        Command::PredictDivisions { sim } => cmd_predict_divisions(&config, sim),
        Command::Backtest {
            strategy,
            stake,
            payout,
            settle,
        } => cmd_backtest(&config, strategy, *stake, *payout, *settle),
        Command::Movement { threshold } => cmd_movement(&config, *threshold),
    }
}

fn emit(
    output: &Output,
    config_format: Format,
    output_dir: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let io = |path: &Path| {
        let path = path.to_owned();
        move |source| CliError::Io { path, source }
    };
    match (config_format, output_dir) {
        (Format::Text, None) => out
            .write_all(output.report.as_bytes())
            .map_err(io(Path::new("<stdout>"))),
        (_, Some(dir)) => {
            std::fs::create_dir_all(dir).map_err(io(dir))?;
            for a in &output.artifacts {
                let path = dir.join(&a.file_name);
                std::fs::write(&path, &a.contents).map_err(io(&path))?;
            }
            out.write_all(output.report.as_bytes())
                .map_err(io(Path::new("<stdout>")))
        }
        (_, None) => {
            let ext = match config_format {
                Format::Svg => ".svg",
                _ => ".csv",
            };
            let primary = output
                .artifacts
                .iter()
                .find(|a| a.file_name.ends_with(ext))
                .ok_or_else(|| CliError::Runtime(format!("this command has no {} output", &ext[1..])))?;
            let primary = primary.contents.as_str();
            out.write_all(primary.as_bytes()).map_err(io(Path::new("<stdout>")))
        }
    }
}

/// Runs the command line in-process and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result =
        dispatch(&cli).and_then(|output| emit(&output, cli.global.format, cli.global.output_dir.as_deref(), out));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
