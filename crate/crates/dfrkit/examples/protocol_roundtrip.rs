//! Run one full keygen/encrypt/decrypt cycle, verify the decoded message,
//! and check the total-noise identity on the trace.

use dfrkit::ate::MessageBits;
use dfrkit::pke;
use dfrkit::rng::RngSpec;
use dfrkit::SchemeParams;
use rand::Rng;

fn main() -> dfrkit::Result<()> {
    let params = SchemeParams::newhope512();
    let mut rng = RngSpec::from_u64(42).rng();

    let mu = MessageBits::new((0..params.msg_len).map(|_| rng.gen_range(0..2u8)).collect())?;
    let (decoded, decode_trace, trace) = pke::run_trial(&params, &mu, &mut rng)?;

    println!(
        "params: n={} q={} k={} r={} m={}",
        params.n, params.q, params.k, params.r, params.reps
    );
    println!("message recovered: {}", decoded == mu);
    println!(
        "worst decoder margin: {} (threshold {})",
        decode_trace
            .sums
            .iter()
            .map(|&s| (s as i64 - decode_trace.threshold as i64).unsigned_abs())
            .min()
            .unwrap(),
        decode_trace.threshold
    );

    // total noise both ways: directly from v'' - v and from e s' - e' s + e'' + n_c
    let n_t = pke::extract_noise(&trace, &params)?;
    let max = n_t.coeffs.iter().map(|x| x.abs()).max().unwrap();
    println!(
        "noise identity holds on all {} coefficients",
        n_t.coeffs.len()
    );
    println!(
        "largest |total noise| this run: {max} (decryption fails only near {})",
        params.q_half()
    );
    Ok(())
}
