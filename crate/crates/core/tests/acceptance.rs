//! Acceptance suite: one PASS/FAIL/NOT RUN line per criterion.
//!
//! Set `NFL_LINES_FULL_DATA` to a directory holding the 2002–2011
//! `games.csv` and `divisions.csv` to run the full-data check.

mod common;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nfl_lines::backtest::{break_even_ratio, run_strategy, Strategy};
use nfl_lines::cli;
use nfl_lines::dataset::{Dataset, GameFilter, TeamId};
use nfl_lines::metrics::{favorite_ats_summary, home_record_table, line_differences, movement_cumulative_counts};
use nfl_lines::model::{parlay_probability, poisson_binomial, WinModel};
use nfl_lines::simulator::{
    build_schedule, predict_division_winners, score_predictions, simulate_with, ScheduleEntry, SeasonSchedule,
    SimulationOptions,
};
use nfl_lines::stats::{chi_square_gof, moments, proportion_z, DEFAULT_GOF_BIN_WIDTH, DEFAULT_MIN_EXPECTED};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

const FULL_DATA_ENV: &str = "NFL_LINES_FULL_DATA";
const SIGMA: f64 = 13.588;

enum Verdict {
    Pass(String),
    Fail(String),
    NotRun(String),
}

type Check = fn() -> Verdict;

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn win_table() -> Verdict {
    let model = WinModel::default();
    let mut worst: f64 = 0.0;
    let mut got = Vec::new();
    for (spread, want) in [(1.0, 0.529), (3.0, 0.587), (5.0, 0.644), (7.0, 0.697)] {
        let p = model.win_probability(spread);
        worst = worst.max((p - want).abs());
        got.push(format!("{p:.4}"));
    }
    verdict(worst <= 5e-4, format!("[{}], max error {worst:.2e}", got.join(", ")))
}

fn parlay() -> Verdict {
    let p = parlay_probability(&WinModel::default(), &[7.0, 4.0]);
    verdict((p - 0.429).abs() <= 1e-3, format!("{p:.5}"))
}

fn break_even() -> Verdict {
    match break_even_ratio(100.0, 110.0) {
        Ok(r) => verdict((r - 0.5238095).abs() <= 1e-6, format!("{r:.9}")),
        Err(e) => Verdict::Fail(e.to_string()),
    }
}

/// All 2^n outcome sequences summed by win count.
fn enumerate(probs: &[f64]) -> Vec<f64> {
    let mut dist = vec![0.0; probs.len() + 1];
    for mask in 0u32..(1 << probs.len()) {
        let p: f64 = probs
            .iter()
            .enumerate()
            .map(|(i, &q)| if mask >> i & 1 == 1 { q } else { 1.0 - q })
            .product();
        dist[mask.count_ones() as usize] += p;
    }
    dist
}

fn poisson_binomial_oracle() -> Verdict {
    let (mut worst_entry, mut worst_mean): (f64, f64) = (0.0, 0.0);
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=12);
        let probs: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let dist = match poisson_binomial(&probs) {
            Ok(d) => d,
            Err(e) => return Verdict::Fail(e.to_string()),
        };
        for (a, b) in dist.probs().iter().zip(enumerate(&probs)) {
            worst_entry = worst_entry.max((a - b).abs());
        }
        worst_mean = worst_mean.max((dist.mean() - probs.iter().sum::<f64>()).abs());
    }
    verdict(
        worst_entry <= 1e-12 && worst_mean <= 1e-9,
        format!("50 vectors, max entry error {worst_entry:.1e}, max mean error {worst_mean:.1e}"),
    )
}

fn team(code: &str) -> TeamId {
    TeamId::new(code).expect("valid code")
}

fn simulator_convergence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let opponents = [
        "BUF", "MIA", "NYJ", "BAL", "CIN", "CLE", "PIT", "HOU", "IND", "JAC", "TEN", "DEN", "KC", "OAK", "SD", "DAL",
    ];
    let probs: Vec<f64> = (0..16).map(|_| rng.random_range(0.05..0.95)).collect();
    let entries: Vec<ScheduleEntry> = opponents
        .iter()
        .zip(&probs)
        .enumerate()
        .map(|(i, (opp, &p))| {
            // Alternate home and away; the stored probability is always the home team's.
            let (home, away, home_win_prob) = if i % 2 == 0 {
                ("NE", *opp, p)
            } else {
                (*opp, "NE", 1.0 - p)
            };
            ScheduleEntry {
                game_index: i,
                home: team(home),
                away: team(away),
                home_win_prob,
                result: None,
            }
        })
        .collect();
    let schedule = match SeasonSchedule::from_entries(2007, entries) {
        Ok(s) => s,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let mut options = SimulationOptions::new(10_000, 2_002);
    options.retain_samples = true;
    let result = match simulate_with(&schedule, &options) {
        Ok(r) => r,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let exact = poisson_binomial(&probs).expect("valid probabilities").mean();
    let mean = result.mean_wins[&team("NE")];
    let conserved = result
        .win_samples
        .as_ref()
        .expect("samples retained")
        .iter()
        .all(|s| s.iter().map(|&w| usize::from(w)).sum::<usize>() == 16);
    verdict(
        (mean - exact).abs() <= 0.15 && conserved,
        format!(
            "mean {mean:.4} vs exact {exact:.4}, conservation {}",
            if conserved { "held" } else { "violated" }
        ),
    )
}

fn fixture(name: &str) -> PathBuf {
    common::fixture(name)
}

fn run_cli(args: &[String]) -> (i32, Vec<u8>, Vec<u8>) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(args, &mut out, &mut err);
    (code, out, err)
}

fn simulate_args(threads: usize) -> Vec<String> {
    [
        "nfl-lines",
        "--games",
        fixture("games.csv").to_str().unwrap(),
        "--divisions",
        fixture("divisions.csv").to_str().unwrap(),
        "--format",
        "csv",
        "simulate",
        "--season",
        "2007",
        "--seed",
        "20021011",
        "--replications",
        "1000",
        "--threads",
        &threads.to_string(),
    ]
    .map(str::to_owned)
    .to_vec()
}

fn determinism() -> Verdict {
    let cores = std::thread::available_parallelism().map_or(4, |n| n.get()).max(4);
    let runs: Vec<(i32, Vec<u8>, Vec<u8>)> = [1, 1, cores].into_iter().map(|t| run_cli(&simulate_args(t))).collect();
    if let Some((code, _, err)) = runs.iter().find(|r| r.0 != 0) {
        return Verdict::Fail(format!("exit {code}: {}", String::from_utf8_lossy(err)));
    }
    let same_seed = runs[0].1 == runs[1].1;
    let threads = runs[0].1 == runs[2].1;
    verdict(
        same_seed && threads && !runs[0].1.is_empty(),
        format!(
            "rerun identical: {same_seed}; 1 vs {cores} threads identical: {threads}; {} bytes",
            runs[0].1.len()
        ),
    )
}

fn sign_law() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let mut violations = 0;
    let mut partition_failures = 0;
    let mut profitable = 0;
    for _ in 0..1000 {
        let n = rng.random_range(1..300);
        let d = common::random_dataset(&mut rng, n);
        let stake = f64::from(rng.random_range(1..=500u32));
        let payout = f64::from(rng.random_range(1..=500u32));
        let strategy = &Strategy::BUILT_IN[rng.random_range(0..Strategy::BUILT_IN.len())];
        let ledger = match run_strategy(&d, strategy, stake, payout) {
            Ok(l) => l,
            Err(e) => return Verdict::Fail(e.to_string()),
        };
        let threshold = break_even_ratio(payout, stake).expect("positive pricing");
        if (ledger.profit() > 0.0) != (ledger.win_ratio() > threshold) {
            violations += 1;
        }
        if ledger.wins() + ledger.losses() + ledger.pushes() != ledger.bets.len() as u64 {
            partition_failures += 1;
        }
        profitable += usize::from(ledger.profit() > 0.0);
    }
    verdict(
        violations == 0 && partition_failures == 0,
        format!("1000 ledgers ({profitable} profitable), {violations} sign violations, {partition_failures} partition failures"),
    )
}

fn load(games: &Path, divisions: &Path) -> Result<Dataset, String> {
    let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()));
    Dataset::from_csv(&read(games)?, &read(divisions)?, games.display().to_string()).map_err(|e| e.to_string())
}

fn ats_partition() -> Verdict {
    let mut details = Vec::new();
    let mut ok = true;
    for name in ["games.csv", "hand.csv"] {
        let d = match load(&fixture(name), &fixture("divisions.csv")) {
            Ok(d) => d,
            Err(e) => return Verdict::Fail(e),
        };
        for (label, view) in [("all", d.clone()), ("regular", d.filter(&GameFilter::regular_season()))] {
            let s = favorite_ats_summary(&view);
            ok &= s.total() == view.len();
            details.push(format!(
                "{name}/{label} {}+{}+{}+{}+{}={}",
                s.covers,
                s.wins_no_cover,
                s.losses,
                s.pushes,
                s.pick_ems,
                view.len()
            ));
        }
    }
    verdict(ok, details.join("; "))
}

fn gof_calibration() -> Verdict {
    let normal = Normal::new(0.0, SIGMA).expect("valid normal");
    let uniform = Uniform::new(-40.0, 40.0).expect("valid uniform");
    let mut normal_rejects = 0;
    let mut uniform_rejects = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<f64> = (0..2560).map(|_| normal.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..2560).map(|_| uniform.sample(&mut rng)).collect();
        for (values, count) in [(&a, &mut normal_rejects), (&b, &mut uniform_rejects)] {
            match chi_square_gof(values, SIGMA, DEFAULT_GOF_BIN_WIDTH, DEFAULT_MIN_EXPECTED) {
                Ok(r) => *count += usize::from(r.reject_at_05),
                Err(e) => return Verdict::Fail(e.to_string()),
            }
        }
    }
    verdict(
        normal_rejects <= 10 && uniform_rejects >= 95,
        format!("normal rejected {normal_rejects}/100, uniform rejected {uniform_rejects}/100"),
    )
}

fn z_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1_704);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let wins: u64 = rng.random_range(0..2000);
        let losses: u64 = rng.random_range(1..2000);
        let p0: f64 = rng.random_range(0.05..0.95);
        // Count form: (W − n·p0) / sqrt(n·p0·(1 − p0)).
        let n = (wins + losses) as f64;
        let want = (wins as f64 - n * p0) / (n * p0 * (1.0 - p0)).sqrt();
        match proportion_z(wins, losses, p0) {
            Ok(r) => worst = worst.max((r.z - want).abs()),
            Err(e) => return Verdict::Fail(e.to_string()),
        }
    }
    verdict(worst <= 1e-10, format!("100 triples, max error {worst:.1e}"))
}

const DIVISION_TABLE: [(u16, usize); 10] = [
    (2002, 7),
    (2003, 7),
    (2004, 6),
    (2005, 8),
    (2006, 6),
    (2007, 7),
    (2008, 7),
    (2009, 7),
    (2010, 6),
    (2011, 6),
];

fn full_data() -> Verdict {
    let Some(dir) = std::env::var_os(FULL_DATA_ENV) else {
        return Verdict::NotRun(format!(
            "{FULL_DATA_ENV} is not set; the 2002-2011 line dataset is not bundled"
        ));
    };
    let dir = PathBuf::from(dir);
    let all = match load(&dir.join("games.csv"), &dir.join("divisions.csv")) {
        Ok(d) => d,
        Err(e) => return Verdict::Fail(e),
    };
    let d = all.filter(&GameFilter::regular_season().seasons(2002..=2011));
    let mut failures = Vec::new();
    let mut notes = vec![format!("{} games", d.len())];

    match moments(&line_differences(&d)) {
        Ok(m) => {
            notes.push(format!("LD mean {:.4} sd {:.4}", m.mean, m.std_dev));
            if (m.mean + 0.009).abs() > 0.02 || (m.std_dev - SIGMA).abs() > 0.05 {
                failures.push("LD moments");
            }
        }
        Err(e) => return Verdict::Fail(e.to_string()),
    }

    let s = favorite_ats_summary(&d);
    notes.push(format!(
        "favorites {}/{}/{}/{} (+{} pick-ems)",
        s.covers, s.wins_no_cover, s.losses, s.pushes, s.pick_ems
    ));
    if (s.covers, s.wins_no_cover, s.losses, s.pushes) != (1194, 412, 853, 101) {
        failures.push("favorite partition");
    }

    let t = home_record_table(&d).total;
    let cells = [t.favorites, t.underdogs, t.pick_ems].map(|c| (c.wins, c.losses));
    notes.push(format!("home records {cells:?}"));
    if cells != [(816, 888), (409, 396), (15, 13)] {
        failures.push("home record totals");
    }

    let model = WinModel::default();
    let mut scores = Vec::new();
    let mut off_by_more = false;
    for (season, paper) in DIVISION_TABLE {
        let outcome = build_schedule(&d, season, &model)
            .map_err(|e| e.to_string())
            .and_then(|schedule| {
                let result = simulate_with(&schedule, &SimulationOptions::new(1000, cli::DEFAULT_SEED))
                    .map_err(|e| e.to_string())?;
                predict_division_winners(&result, &schedule, d.divisions()).map_err(|e| e.to_string())
            });
        match outcome {
            Ok(preds) => {
                let (correct, _) = score_predictions(&preds);
                off_by_more |= correct.abs_diff(paper) > 1;
                scores.push(format!("{season}:{correct}"));
            }
            Err(e) => {
                off_by_more = true;
                scores.push(format!("{season}:({e})"));
            }
        }
    }
    notes.push(format!("divisions {}", scores.join(" ")));
    if off_by_more {
        failures.push("division predictions");
    }

    let counts: BTreeMap<String, usize> = movement_cumulative_counts(&d, &[0.5, 1.0])
        .into_iter()
        .map(|(t, n)| (t.to_string(), n))
        .collect();
    notes.push(format!("movement <=0.5: {}, <=1: {}", counts["0.5"], counts["1"]));
    if counts["0.5"] != 1548 || counts["1"] <= 2000 {
        failures.push("movement counts");
    }

    if failures.is_empty() {
        Verdict::Pass(notes.join("; "))
    } else {
        Verdict::Fail(format!("mismatched: {}; {}", failures.join(", "), notes.join("; ")))
    }
}

fn binary(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_nfl-lines"))
        .args(args)
        .env_remove("NFL_LINES_DATA")
        .output()
        .expect("binary runs")
}

fn cli_contract() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;

    let usage = binary(&["summary", "--definitely-not-a-flag"]);
    ok &= usage.status.code() == Some(2);
    notes.push(format!("unknown flag -> {:?}", usage.status.code()));

    let dir = std::env::temp_dir().join(format!("nfl-lines-acceptance-{}", std::process::id()));
    let bad = dir.join("bad.csv");
    let write = std::fs::create_dir_all(&dir).and_then(|()| {
        let mut text = std::fs::read_to_string(fixture("hand.csv"))?;
        text.push_str("2007,5,2007-10-07,NE,BUF,thirty,10,7,3\n");
        std::fs::write(&bad, text)
    });
    if let Err(e) = write {
        return Verdict::Fail(format!("temp file: {e}"));
    }
    let divisions = fixture("divisions.csv");
    let divisions = divisions.to_str().unwrap();
    let malformed = binary(&["--games", bad.to_str().unwrap(), "--divisions", divisions, "summary"]);
    let stderr = String::from_utf8_lossy(&malformed.stderr);
    ok &= malformed.status.code() == Some(1) && stderr.contains("line 9");
    notes.push(format!(
        "malformed row -> {:?} ({})",
        malformed.status.code(),
        if stderr.contains("line 9") {
            "names line 9"
        } else {
            "line number missing"
        }
    ));

    let games = fixture("games.csv");
    let games = games.to_str().unwrap();
    let out_dir = dir.join("out");
    let out_dir = out_dir.to_str().unwrap();
    let steps: [&[&str]; 4] = [
        &["summary"],
        &["hist", "--metric", "ld", "--format", "svg"],
        &["simulate", "--season", "2007"],
        &["backtest", "--strategy", "home-underdog", "--format", "csv"],
    ];
    let mut codes = Vec::new();
    for step in steps {
        let mut args = vec!["--games", games, "--divisions", divisions, "--output-dir", out_dir];
        args.extend_from_slice(step);
        let o = binary(&args);
        ok &= o.status.code() == Some(0);
        codes.push(o.status.code().unwrap_or(-1).to_string());
    }
    notes.push(format!("pipeline exits [{}]", codes.join(", ")));
    let _ = std::fs::remove_dir_all(&dir);
    verdict(ok, notes.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, Check); 12] = [
        ("win probability table", Duration::from_secs(1), win_table),
        ("parlay example", Duration::from_secs(1), parlay),
        ("break-even ratio", Duration::from_secs(1), break_even),
        (
            "poisson-binomial oracle",
            Duration::from_secs(5),
            poisson_binomial_oracle,
        ),
        ("simulator convergence", Duration::from_secs(5), simulator_convergence),
        ("simulate determinism", Duration::from_secs(10), determinism),
        ("accounting sign law", Duration::from_secs(5), sign_law),
        ("ATS partition", Duration::from_secs(1), ats_partition),
        ("GOF calibration", Duration::from_secs(30), gof_calibration),
        ("z-test oracle", Duration::from_secs(1), z_oracle),
        ("full 2002-2011 dataset", Duration::from_secs(60), full_data),
        ("CLI contract", Duration::from_secs(10), cli_contract),
    ];
    let mut failed = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let v = check();
        let elapsed = start.elapsed();
        let timing = format!("{:.2}s of {}s", elapsed.as_secs_f64(), budget.as_secs());
        let (tag, detail) = match v {
            Verdict::Pass(d) if elapsed <= budget => ("PASS", d),
            Verdict::Pass(d) => ("FAIL", format!("{d}; over time budget")),
            Verdict::Fail(d) => ("FAIL", d),
            Verdict::NotRun(d) => ("NOT RUN", d),
        };
        failed += usize::from(tag == "FAIL");
        println!("{tag:<7} {name}: {detail} [{timing}]");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
