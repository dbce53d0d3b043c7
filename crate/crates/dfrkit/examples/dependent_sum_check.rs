//! Empirical check of the i.i.d. decomposition of the dependent
//! repetition sum, on parameters small enough to simulate heavily.
//!
//! One decoder bit sums m = 4 statistically dependent noise coefficients.
//! The toolkit computes that sum's pmf by rewriting the two cross products
//! as 2L independent copies of W; here we histogram the *actual* dependent
//! sum from protocol runs and compare with a chi-square test.

use dfrkit::dist::PrecisionPolicy;
use dfrkit::mc::{noise_histogram, HistogramKind};
use dfrkit::noise::sum_nstar_pmf;
use dfrkit::rng::RngSpec;
use dfrkit::stats::chi_square_gof;
use dfrkit::SchemeParams;

fn main() -> dfrkit::Result<()> {
    let params = SchemeParams::toy();
    let trials = 300_000u64;

    let analytic = sum_nstar_pmf(&params, &PrecisionPolicy::default())?;
    let empirical = noise_histogram(
        &params,
        trials,
        &RngSpec::from_u64(9),
        HistogramKind::SumOverRepetitions,
    )?;

    let (lo, hi) = analytic.support();
    let observed: Vec<u64> = (lo..=hi)
        .map(|v| (empirical.prob(v) * trials as f64).round() as u64)
        .collect();
    let expected: Vec<f64> = (lo..=hi)
        .map(|v| analytic.prob(v) * trials as f64)
        .collect();
    let fit = chi_square_gof(&observed, &expected, 5.0)?;

    println!("analytic support [{lo}, {hi}], {} protocol trials", trials);
    println!(
        "chi-square = {:.1} on {} degrees of freedom -> p = {:.4}",
        fit.statistic, fit.degrees_of_freedom, fit.p_value
    );
    println!(
        "decomposition {}",
        if fit.p_value > 0.001 {
            "CONSISTENT"
        } else {
            "REJECTED"
        }
    );
    Ok(())
}
