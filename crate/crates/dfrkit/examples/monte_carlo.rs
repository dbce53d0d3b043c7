//! Monte-Carlo failure-rate estimation on the toy parameter set, where
//! failures are frequent enough to measure, plus a zero-noise sanity run.

use dfrkit::mc::{run_trials, McOptions};
use dfrkit::rng::RngSpec;
use dfrkit::SchemeParams;

fn main() -> dfrkit::Result<()> {
    let params = SchemeParams::toy();
    let seed = RngSpec::from_u64(42);

    let report = run_trials(&params, 200_000, &seed, &McOptions::default())?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );

    // with all noise vectors forced to zero only compression noise remains,
    // far below the decision threshold: no failures, ever
    let quiet = run_trials(
        &params,
        10_000,
        &seed,
        &McOptions {
            zero_noise: true,
            keep_forensics: false,
        },
    )?;
    println!("zero-noise failures: {} / {}", quiet.failures, quiet.trials);
    Ok(())
}
