//! Build the noise pmfs for n = 512 and write them as CSV files:
//! compression noise, difference noise, marginal total noise, and the
//! dependent repetition sum. These are the curves behind the bounds.

use std::fs::File;
use std::io::BufWriter;

use dfrkit::dist::{compression_noise_pmf, PrecisionPolicy};
use dfrkit::noise::{difference_noise_pmf, sum_nstar_pmf, total_noise_pmf};
use dfrkit::SchemeParams;

fn main() -> dfrkit::Result<()> {
    let params = SchemeParams::newhope512();
    let policy = PrecisionPolicy::default();
    let dir = std::path::Path::new("target/noise-pmfs");
    std::fs::create_dir_all(dir)?;

    let dists = [
        ("compression_noise.csv", compression_noise_pmf(&params)?),
        (
            "difference_noise.csv",
            difference_noise_pmf(&params, &policy)?,
        ),
        ("total_noise.csv", total_noise_pmf(&params, &policy)?),
        ("sum_nstar.csv", sum_nstar_pmf(&params, &policy)?),
    ];
    for (name, d) in dists {
        let (lo, hi) = d.support();
        let (tail, err) = d.two_sided_tail(params.q_half() as i64);
        println!(
            "{name}: support [{lo}, {hi}], sigma = {:.2}, log2 Pr(|X| > q/2) = {:.1}, err = {:.2e}",
            d.variance().sqrt(),
            (tail + err).log2(),
            d.err()
        );
        let mut w = BufWriter::new(File::create(dir.join(name))?);
        d.write_csv(&mut w)?;
    }
    println!("wrote 4 CSV files under {}", dir.display());
    Ok(())
}
