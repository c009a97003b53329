//! Normal CDF, sample moments, one-proportion z-tests, and a chi-squared
//! goodness-of-fit test against a zero-mean Gaussian.

use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::model::WinModel;

/// Significance level used for `GofResult::reject_at_05`.
pub const ALPHA: f64 = 0.05;

/// Bin width used for line-difference goodness of fit.
pub const DEFAULT_GOF_BIN_WIDTH: f64 = 2.0;

/// Minimum expected count per merged bin.
pub const DEFAULT_MIN_EXPECTED: f64 = 5.0;

/// Smallest sample `chi_square_gof` accepts.
pub const GOF_MIN_SAMPLE: usize = 30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("need at least {needed} values, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("no decided outcomes (wins + losses = 0)")]
    EmptySample,
    #[error("proportion {0} is outside (0, 1)")]
    InvalidProportion(f64),
    #[error("{name} must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("only {0} bins remain after merging; at least 3 are required")]
    DegenerateBinning(usize),
}

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const ERFC_SERIES_LIMIT: f64 = 1.5;
const ERFC_CF_TERMS: u32 = 80;

/// Complementary error function for `x >= 0`.
fn erfc_nonneg(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < ERFC_SERIES_LIMIT {
        // erf(x) = 2/sqrt(pi) * exp(-x^2) * sum_n (2x^2)^n x / (1*3*...*(2n+1)); all terms positive.
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut n = 0u32;
        while term > sum * 1e-17 {
            n += 1;
            term *= 2.0 * x2 / f64::from(2 * n + 1);
            sum += term;
        }
        1.0 - FRAC_2_SQRT_PI * (-x2).exp() * sum
    } else {
        // Continued fraction erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
        let mut f = x;
        for n in (1..=ERFC_CF_TERMS).rev() {
            f = x + f64::from(n) * 0.5 / f;
        }
        (-x * x).exp() * 0.5 * FRAC_2_SQRT_PI / f
    }
}

/// Standard normal cumulative distribution function.
///
/// Evaluated through `erfc` on the lower tail so that `Φ(x) + Φ(−x) = 1` holds to rounding.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let lower = 0.5 * erfc_nonneg(x.abs() * std::f64::consts::FRAC_1_SQRT_2);
    if x < 0.0 {
        lower
    } else {
        1.0 - lower
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator).
    pub std_dev: f64,
    pub n: usize,
}

pub fn moments(values: &[f64]) -> Result<Moments, StatsError> {
    let n = values.len();
    if n < 2 {
        return Err(StatsError::InsufficientData { needed: 2, got: n });
    }
    let count = n as f64;
    let rough = values.iter().sum::<f64>() / count;
    let mean = rough + values.iter().map(|v| v - rough).sum::<f64>() / count;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok(Moments {
        mean,
        std_dev: (ss / (count - 1.0)).sqrt(),
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZTestResult {
    pub p_hat: f64,
    pub n: u64,
    pub p0: f64,
    pub z: f64,
}

/// One-proportion z statistic `(p̂ − p0) / sqrt(p0(1 − p0)/n)` with `n = wins + losses`.
pub fn proportion_z(wins: u64, losses: u64, p0: f64) -> Result<ZTestResult, StatsError> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(StatsError::InvalidProportion(p0));
    }
    let n = wins + losses;
    if n == 0 {
        return Err(StatsError::EmptySample);
    }
    let p_hat = wins as f64 / n as f64;
    let z = (p_hat - p0) / (p0 * (1.0 - p0) / n as f64).sqrt();
    Ok(ZTestResult { p_hat, n, p0, z })
}

/// A contiguous run of the fine grid after tail merging.
#[derive(Debug, Clone, PartialEq)]
pub struct GofBin {
    /// Lower edge; `-inf` for the left tail.
    pub lower: f64,
    /// Upper edge; `+inf` for the right tail.
    pub upper: f64,
    pub observed: u64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GofResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub bins_used: usize,
    pub critical_value: f64,
    pub p_value: f64,
    pub reject_at_05: bool,
    pub bins: Vec<GofBin>,
}

fn positive(name: &'static str, value: f64) -> Result<f64, StatsError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(StatsError::InvalidParameter { name, value })
    }
}

/// Pearson chi-squared test of `values` against `Normal(0, sigma)`.
///
/// Values are binned on a grid of width `bin_width` whose central bin is
/// centered on zero. Outermost bins are open-ended. Tail bins are merged
/// toward the center until every merged bin expects at least `min_expected`
/// observations. Degrees of freedom are `bins − 1`; the model has no
/// parameters estimated from the binned data.
pub fn chi_square_gof(values: &[f64], sigma: f64, bin_width: f64, min_expected: f64) -> Result<GofResult, StatsError> {
    let sigma = positive("sigma", sigma)?;
    let width = positive("bin_width", bin_width)?;
    if !(min_expected.is_finite() && min_expected > 0.0) {
        return Err(StatsError::InvalidParameter {
            name: "min_expected",
            value: min_expected,
        });
    }
    if values.len() < GOF_MIN_SAMPLE {
        return Err(StatsError::InsufficientData {
            needed: GOF_MIN_SAMPLE,
            got: values.len(),
        });
    }
    if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(StatsError::InvalidParameter {
            name: "value",
            value: bad,
        });
    }
    let n = values.len() as f64;

    // Fine grid: cell k covers [(k - 1/2)w, (k + 1/2)w) for k in -half..=half, ends open.
    let half = ((8.0 * sigma / width).ceil() as i64 + 1).min(100_000);
    let cells = (2 * half + 1) as usize;
    let lower_edge = |k: i64| {
        if k == -half {
            f64::NEG_INFINITY
        } else {
            (k as f64 - 0.5) * width
        }
    };
    let upper_edge = |k: i64| {
        if k == half {
            f64::INFINITY
        } else {
            (k as f64 + 0.5) * width
        }
    };
    let model = WinModel::new(0.0, sigma).expect("sigma validated");

    let mut observed = vec![0u64; cells];
    for &v in values {
        let k = ((v / width) + 0.5).floor().clamp(-half as f64, half as f64) as i64;
        observed[(k + half) as usize] += 1;
    }
    let fine: Vec<GofBin> = (-half..=half)
        .map(|k| {
            let lo = lower_edge(k);
            let hi = upper_edge(k);
            GofBin {
                lower: lo,
                upper: hi,
                observed: observed[(k + half) as usize],
                expected: n * (model.cdf(hi) - model.cdf(lo)),
            }
        })
        .collect();

    let bins = merge_tails(fine, half as usize, min_expected);
    if bins.len() < 3 {
        return Err(StatsError::DegenerateBinning(bins.len()));
    }

    let statistic: f64 = bins
        .iter()
        .map(|b| {
            let d = b.observed as f64 - b.expected;
            d * d / b.expected
        })
        .sum();
    let degrees_of_freedom = bins.len() - 1;
    let dist = ChiSquared::new(degrees_of_freedom as f64).expect("df >= 2");
    let critical_value = dist.inverse_cdf(1.0 - ALPHA);
    Ok(GofResult {
        statistic,
        degrees_of_freedom,
        bins_used: bins.len(),
        critical_value,
        p_value: dist.sf(statistic),
        reject_at_05: statistic > critical_value,
        bins,
    })
}

fn join(a: GofBin, b: &GofBin) -> GofBin {
    GofBin {
        lower: a.lower.min(b.lower),
        upper: a.upper.max(b.upper),
        observed: a.observed + b.observed,
        expected: a.expected + b.expected,
    }
}

/// Greedy merge from each tail toward the central cell at index `center`.
fn merge_tails(fine: Vec<GofBin>, center: usize, min_expected: f64) -> Vec<GofBin> {
    fn sweep<'a>(cells: impl Iterator<Item = &'a GofBin>, min_expected: f64) -> (Vec<GofBin>, Option<GofBin>) {
        let mut done = Vec::new();
        let mut acc: Option<GofBin> = None;
        for cell in cells {
            let merged = match acc.take() {
                Some(a) => join(a, cell),
                None => cell.clone(),
            };
            if merged.expected >= min_expected {
                done.push(merged);
            } else {
                acc = Some(merged);
            }
        }
        (done, acc)
    }

    let (left, left_rest) = sweep(fine[..center].iter(), min_expected);
    let (mut right, right_rest) = sweep(fine[center + 1..].iter().rev(), min_expected);
    right.reverse();

    let mut middle = fine[center].clone();
    for rest in [left_rest, right_rest].into_iter().flatten() {
        middle = join(middle, &rest);
    }

    let mut bins = left;
    if middle.expected < min_expected {
        if let Some(prev) = bins.pop() {
            middle = join(prev, &middle);
        } else if !right.is_empty() {
            let next = right.remove(0);
            middle = join(next, &middle);
        }
    }
    bins.push(middle);
    bins.extend(right);
    bins
}
