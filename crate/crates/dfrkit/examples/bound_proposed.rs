//! Compute the dependency-aware DFR upper bound at the official parameter
//! sets and print the full reports as JSON.
//!
//! Expected headline values: log2(DFR) close to -418.8 for n = 1024 and
//! -399.9 for n = 512.

use dfrkit::bounds::proposed_dfr_bound;
use dfrkit::dist::PrecisionPolicy;
use dfrkit::SchemeParams;

fn main() -> dfrkit::Result<()> {
    let policy = PrecisionPolicy::default(); // exact: no pruning
    for params in [SchemeParams::newhope512(), SchemeParams::newhope1024()] {
        let report = proposed_dfr_bound(&params, &policy)?;
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    }
    Ok(())
}
