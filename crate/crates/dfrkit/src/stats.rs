//! Small statistics helpers for the simulation harness and its tests.

use statrs::distribution::{Beta, ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Result of a chi-square goodness-of-fit test.
#[derive(Debug, Clone, Copy)]
pub struct ChiSquareFit {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Pearson chi-square test of observed counts against expected counts.
///
/// Bins are merged inward from both tails until every merged bin has
/// expected count >= `min_expected` (the usual validity rule).
pub fn chi_square_gof(
    observed: &[u64],
    expected: &[f64],
    min_expected: f64,
) -> Result<ChiSquareFit> {
    if observed.len() != expected.len() || observed.is_empty() {
        return Err(Error::InvalidParams(
            "observed/expected length mismatch".into(),
        ));
    }
    let mut lo = 0usize;
    let mut hi = expected.len() - 1;
    let mut acc = 0.0;
    while lo < hi && acc + expected[lo] < min_expected {
        acc += expected[lo];
        lo += 1;
    }
    let mut acc_hi = 0.0;
    while hi > lo && acc_hi + expected[hi] < min_expected {
        acc_hi += expected[hi];
        hi -= 1;
    }
    // merged low bin, middle bins, merged high bin
    let mut obs_bins: Vec<f64> = Vec::with_capacity(hi - lo + 3);
    let mut exp_bins: Vec<f64> = Vec::with_capacity(hi - lo + 3);
    let sum_obs =
        |r: std::ops::RangeInclusive<usize>| -> f64 { r.map(|i| observed[i] as f64).sum() };
    if lo > 0 {
        obs_bins.push(sum_obs(0..=lo - 1) + observed[lo] as f64);
        exp_bins.push(acc + expected[lo]);
        lo += 1;
    }
    let mid_end = if hi + 1 < expected.len() {
        hi
    } else {
        expected.len() - 1
    };
    for i in lo..=mid_end {
        obs_bins.push(observed[i] as f64);
        exp_bins.push(expected[i]);
    }
    if hi + 1 < expected.len() {
        let last = obs_bins.len() - 1;
        obs_bins[last] += sum_obs(hi + 1..=expected.len() - 1);
        exp_bins[last] += acc_hi;
    }
    if exp_bins.len() < 2 {
        return Err(Error::InvalidParams(
            "too few usable bins for a chi-square test".into(),
        ));
    }
    let mut statistic = 0.0;
    for (o, e) in obs_bins.iter().zip(&exp_bins) {
        if *e <= 0.0 {
            return Err(Error::Numerical("non-positive expected bin".into()));
        }
        statistic += (o - e) * (o - e) / e;
    }
    let df = exp_bins.len() - 1;
    let chi = ChiSquared::new(df as f64)
        .map_err(|e| Error::Numerical(format!("chi-square setup: {e}")))?;
    let p_value = (1.0 - chi.cdf(statistic)).clamp(0.0, 1.0);
    Ok(ChiSquareFit {
        statistic,
        degrees_of_freedom: df,
        p_value,
    })
}

/// Exact (Clopper-Pearson) binomial confidence interval.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials || !(0.0..1.0).contains(&confidence) {
        return Err(Error::InvalidParams("bad interval arguments".into()));
    }
    let alpha = 1.0 - confidence;
    let (s, n) = (successes as f64, trials as f64);
    let lo = if successes == 0 {
        0.0
    } else {
        Beta::new(s, n - s + 1.0)
            .map_err(|e| Error::Numerical(e.to_string()))?
            .inverse_cdf(alpha / 2.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        Beta::new(s + 1.0, n - s)
            .map_err(|e| Error::Numerical(e.to_string()))?
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    Ok((lo, hi))
}
