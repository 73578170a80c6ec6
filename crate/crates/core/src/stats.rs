//! Small summary-statistics helpers shared by the experiment drivers.

use rand::Rng;

use crate::rng::stream_rng;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of the sample mean.
pub fn std_error(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Percentile with linear interpolation between order statistics
/// (`q` in `[0, 1]`). NaNs sort last.
pub fn percentile(xs: &[f64], q: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    percentile_sorted(&sorted, q)
}

fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    let q = q.clamp(0.0, 1.0);
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub fn median(xs: &[f64]) -> f64 {
    percentile(xs, 0.5)
}

/// Mean, median and 10th/90th percentiles of a sample.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Spread {
    pub mean: f64,
    pub median: f64,
    pub p10: f64,
    pub p90: f64,
}

impl Spread {
    pub fn of(xs: &[f64]) -> Self {
        let mut sorted = xs.to_vec();
        sorted.sort_by(f64::total_cmp);
        if sorted.is_empty() {
            return Spread {
                mean: f64::NAN,
                median: f64::NAN,
                p10: f64::NAN,
                p90: f64::NAN,
            };
        }
        Spread {
            mean: mean(&sorted),
            median: percentile_sorted(&sorted, 0.5),
            p10: percentile_sorted(&sorted, 0.1),
            p90: percentile_sorted(&sorted, 0.9),
        }
    }
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Percentile bootstrap interval for `mean(num) / mean(den)`, resampling the
/// two samples independently. Returns `(lower, upper)` at the given
/// two-sided `level` (e.g. 0.9).
pub fn bootstrap_ratio_ci(
    num: &[f64],
    den: &[f64],
    resamples: usize,
    level: f64,
    seed: u64,
) -> (f64, f64) {
    let mut rng = stream_rng(seed, &[0xB007]);
    let mut ratios = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let a = resample_mean(num, &mut rng);
        let b = resample_mean(den, &mut rng);
        ratios.push(a / b);
    }
    let tail = (1.0 - level) / 2.0;
    (percentile(&ratios, tail), percentile(&ratios, 1.0 - tail))
}

/// Bootstrap estimate of the variance of the sample mean.
pub fn bootstrap_mean_variance(xs: &[f64], resamples: usize, seed: u64) -> f64 {
    let mut rng = stream_rng(seed, &[0xB00B]);
    let means: Vec<f64> = (0..resamples)
        .map(|_| resample_mean(xs, &mut rng))
        .collect();
    variance(&means)
}

fn resample_mean(xs: &[f64], rng: &mut impl Rng) -> f64 {
    let n = xs.len();
    (0..n).map(|_| xs[rng.random_range(0..n)]).sum::<f64>() / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentiles_interpolate() {
        let xs = [4.0, 1.0, 3.0, 2.0, 5.0];
        assert_eq!(median(&xs), 3.0);
        assert_eq!(percentile(&xs, 0.0), 1.0);
        assert_eq!(percentile(&xs, 1.0), 5.0);
        assert!((percentile(&xs, 0.1) - 1.4).abs() < 1e-12);
        let s = Spread::of(&xs);
        assert!(s.p10 <= s.median && s.median <= s.p90);
    }

    #[test]
    fn linear_fit_recovers_line() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| -3.0 * v + 2.0).collect();
        let (slope, icpt) = linear_fit(&x, &y);
        assert!((slope + 3.0).abs() < 1e-12);
        assert!((icpt - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bootstrap_ratio_brackets_point_estimate() {
        let a: Vec<f64> = (0..200).map(|i| 2.0 + (i % 7) as f64 * 0.1).collect();
        let b: Vec<f64> = (0..200).map(|i| 1.0 + (i % 5) as f64 * 0.1).collect();
        let (lo, hi) = bootstrap_ratio_ci(&a, &b, 1000, 0.9, 1);
        let r = mean(&a) / mean(&b);
        assert!(lo < r && r < hi);
    }
}
