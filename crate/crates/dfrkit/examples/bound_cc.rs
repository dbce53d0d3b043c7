//! The Chernoff-Cramer parameterized bound next to the exact-pmf bound.
//!
//! The CC route trades tightness for speed: it needs no large
//! convolutions, so it stays cheap as k grows, and it always dominates
//! the exact-pmf bound.

use dfrkit::bounds::{cc_dfr_bound, proposed_dfr_bound};
use dfrkit::dist::PrecisionPolicy;
use dfrkit::SchemeParams;

fn main() -> dfrkit::Result<()> {
    let policy = PrecisionPolicy::default();
    println!("   n   k   log2 proposed   log2 CC   CC wall");
    for params in [SchemeParams::newhope512(), SchemeParams::newhope1024()] {
        let exact = proposed_dfr_bound(&params, &policy)?;
        let cc = cc_dfr_bound(&params, &policy)?;
        assert!(
            cc.log2_dfr >= exact.log2_dfr,
            "CC must dominate the exact route"
        );
        println!(
            "{:>4} {:>3} {:>15.2} {:>9.2}   {:.3}s (t_opt = {:.4})",
            params.n,
            params.k,
            exact.log2_dfr,
            cc.log2_dfr,
            cc.wall_time_s,
            cc.t_opt.unwrap()
        );
    }
    // where the exact route gets expensive, CC alone still answers instantly
    for k in [20, 32, 48] {
        let params = SchemeParams::newhope1024().with_k(k);
        let cc = cc_dfr_bound(&params, &PrecisionPolicy::default())?;
        println!(
            "{:>4} {:>3} {:>15} {:>9.2}   {:.3}s",
            params.n, k, "-", cc.log2_dfr, cc.wall_time_s
        );
    }
    Ok(())
}
