//! Sweep the noise parameter k at r = 8 for both ring dimensions and print
//! the DFR column next to the shipped reference attack costs.
//!
//! A light prune threshold is used for speed; the discarded mass is
//! tracked and stays hundreds of orders of magnitude below the bounds.

use dfrkit::cli::security_sweep;
use dfrkit::dist::PrecisionPolicy;

fn main() -> dfrkit::Result<()> {
    let policy = PrecisionPolicy::default().with_prune(1e-200);
    let rows = security_sweep(&policy)?;
    println!(
        "   n   k  log2(DFR)  primal C/Q  dual C/Q   (costs: {}, not computed)",
        rows[0].costs_source
    );
    for r in rows {
        println!(
            "{:>4} {:>3} {:>10.2}     {}/{}     {}/{}",
            r.n,
            r.k,
            r.dfr_log2,
            r.primal_classical_ref,
            r.primal_quantum_ref,
            r.dual_classical_ref,
            r.dual_quantum_ref
        );
    }
    Ok(())
}
