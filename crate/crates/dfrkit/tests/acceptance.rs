//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line with the measured numbers.
//!
//! Run with:
//!   cargo test --release --test acceptance -- --nocapture --test-threads=1
//!
//! The full suite performs large exact convolutions and 2 x 10^6 protocol
//! trials; expect roughly 15 minutes on one core.

use std::process::Command;
use std::time::Instant;

use dfrkit::bounds::{cc_dfr_bound, chernoff_opt, indep_dfr, proposed_dfr_bound};
use dfrkit::dist::{cbd_pmf, product_cbd_pmf, Dist, PrecisionPolicy};
use dfrkit::mc::{noise_histogram, run_trials, HistogramKind, McOptions};
use dfrkit::noise::{nstar_pmf, sum_nstar_pmf, w_pmf};
use dfrkit::renyi::{renyi_divergence, renyi_sweep, rounded_gaussian_pmf};
use dfrkit::rng::RngSpec;
use dfrkit::stats::chi_square_gof;
use dfrkit::SchemeParams;

fn verdict(name: &str, pass: bool, details: &str) -> bool {
    println!(
        "acceptance {name}: {} ({details})",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn bound_via_cli(args: &[&str]) -> (serde_json::Value, f64) {
    let started = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_dfrkit"))
        .arg("--format")
        .arg("json")
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("json report");
    (v, started.elapsed().as_secs_f64())
}

#[test]
fn criterion_1_proposed_bound_n1024() {
    let (report, wall) = bound_via_cli(&[
        "bound", "--method", "proposed", "--n", "1024", "--k", "8", "--r", "8",
    ]);
    let log2 = report["log2_dfr"].as_f64().unwrap();
    let pass = (-423.0..=-413.0).contains(&log2) && wall <= 1800.0;
    assert!(verdict(
        "1 proposed n=1024",
        pass,
        &format!("log2 DFR = {log2:.2}, target [-423, -413], wall {wall:.1}s <= 1800s")
    ));
}

#[test]
fn criterion_2_proposed_bound_n512() {
    let (report, wall) = bound_via_cli(&[
        "bound", "--method", "proposed", "--n", "512", "--k", "8", "--r", "8",
    ]);
    let log2 = report["log2_dfr"].as_f64().unwrap();
    let pass = (-404.0..=-394.0).contains(&log2) && wall <= 300.0;
    assert!(verdict(
        "2 proposed n=512",
        pass,
        &format!("log2 DFR = {log2:.2}, target -399 +/- 5, wall {wall:.1}s <= 300s")
    ));
}

#[test]
fn criterion_3_wraparound_tail_components() {
    let policy = PrecisionPolicy::default();
    let mut all = true;
    for (params, target) in [
        (SchemeParams::newhope1024(), -564.0),
        (SchemeParams::newhope512(), -908.0),
    ] {
        let d = nstar_pmf(&params, &policy).unwrap();
        let (p, err) = d.two_sided_tail(params.q_half() as i64);
        let log2 = (p + err).log2();
        let pass = (log2 - target).abs() <= 5.0;
        all &= verdict(
            &format!("3 tail n={}", params.n),
            pass,
            &format!("log2 Pr(|n*| > q/2) = {log2:.2}, target {target} +/- 5"),
        );
    }
    assert!(all);
}

#[test]
fn criterion_4_cc_bound() {
    let policy = PrecisionPolicy::default();
    let mut all = true;
    // paper values 10^-115 and 10^-111 in log2
    for (params, target) in [
        (
            SchemeParams::newhope1024(),
            -115.0 * std::f64::consts::LOG2_10,
        ),
        (
            SchemeParams::newhope512(),
            -111.0 * std::f64::consts::LOG2_10,
        ),
    ] {
        let cc = cc_dfr_bound(&params, &policy).unwrap();
        let proposed = proposed_dfr_bound(&params, &policy).unwrap();
        let pass = (cc.log2_dfr - target).abs() <= 15.0 && cc.log2_dfr >= proposed.log2_dfr;
        all &= verdict(
            &format!("4 cc n={}", params.n),
            pass,
            &format!(
                "log2 CC = {:.2}, target {target:.1} +/- 15, proposed = {:.2} (dominated)",
                cc.log2_dfr, proposed.log2_dfr
            ),
        );
    }
    assert!(all);
}

#[test]
fn criterion_5_table_sweeps() {
    let policy = PrecisionPolicy::default();
    let security_expect = [
        (1024usize, 8u32, -418.0),
        (1024, 9, -341.0),
        (1024, 10, -284.0),
        (1024, 11, -240.0),
        (1024, 12, -205.0),
        (1024, 13, -178.0),
        (1024, 14, -156.0),
        (1024, 15, -137.0),
        (512, 8, -399.0),
        (512, 9, -325.0),
        (512, 10, -270.0),
        (512, 11, -228.0),
        (512, 12, -195.0),
        (512, 13, -169.0),
        (512, 14, -147.0),
        (512, 15, -130.0),
    ];
    let rows = dfrkit::cli::security_sweep(&policy).unwrap();
    let mut all = true;
    for (n, k, target) in security_expect {
        let row = rows.iter().find(|r| r.n == n && r.k == k).unwrap();
        let pass = (row.dfr_log2 - target).abs() <= 5.0;
        if !pass {
            println!(
                "  security cell n={n} k={k}: {:.2} vs {target}",
                row.dfr_log2
            );
        }
        all &= pass;
    }
    // the bound must also be strictly increasing in k at fixed n
    for n in [1024usize, 512] {
        let col: Vec<f64> =
            rows.iter().filter(|r| r.n == n).map(|r| r.dfr_log2).collect();
        all &= col.windows(2).all(|w| w[0] < w[1]);
    }
    all = verdict(
        "5 security table (16 cells)",
        all,
        "every cell within +/- 5 of its log2 value, strictly increasing in k",
    ) && all;

    let bandwidth_expect = [
        (1024usize, 4u32, 8u32, -212.0),
        (1024, 4, 9, -173.0),
        (1024, 4, 10, -144.0),
        (512, 4, 8, -199.0),
        (512, 4, 9, -161.0),
    ];
    let rows = dfrkit::cli::bandwidth_sweep(&policy).unwrap();
    let mut bw = true;
    for (n, r, k, target) in bandwidth_expect {
        let row = rows
            .iter()
            .find(|x| x.n == n && x.r == r && x.k == k)
            .unwrap();
        let dfr_ok = (row.dfr_log2 - target).abs() <= 5.0;
        let red_ok = format!("{:.1}", row.ciphertext_reduction_pct) == "5.9";
        if !(dfr_ok && red_ok) {
            println!(
                "  bandwidth row n={n} r={r} k={k}: {:.2} vs {target}, reduction {:.1}",
                row.dfr_log2, row.ciphertext_reduction_pct
            );
        }
        bw &= dfr_ok && red_ok;
    }
    for row in rows.iter().filter(|x| x.r == 8) {
        bw &= row.ciphertext_reduction_pct == 0.0;
    }
    bw = verdict(
        "5 bandwidth table (r=4 rows)",
        bw,
        "DFR cells within +/- 5 and reduction column exactly 5.9%",
    ) && bw;
    assert!(all && bw);
}

#[test]
fn criterion_6_dependency_ordering() {
    // operating point: k chosen by an indep-model pre-sweep at n = 512
    // so the predicted DFR is closest to 1e-4
    let sweep_policy = PrecisionPolicy::default().with_prune(1e-30);
    let target = 1e-4f64.log2();
    let mut kstar = 0;
    let mut best = f64::INFINITY;
    for k in 40..=60u32 {
        let params = SchemeParams::newhope512().with_k(k);
        let rep = indep_dfr(&params, &sweep_policy).unwrap();
        if (rep.log2_dfr - target).abs() < best {
            best = (rep.log2_dfr - target).abs();
            kstar = k;
        }
    }
    let params = SchemeParams::newhope512().with_k(kstar);
    let policy = PrecisionPolicy::default().with_prune(1e-40);
    let indep = 2f64.powf(indep_dfr(&params, &policy).unwrap().log2_dfr);
    let proposed = 2f64.powf(proposed_dfr_bound(&params, &policy).unwrap().log2_dfr);

    let seed = RngSpec::from_u64(1);
    let trials = 1_000_000u64;
    let mc = run_trials(
        &params,
        trials,
        &seed,
        &McOptions {
            zero_noise: false,
            keep_forensics: false,
        },
    )
    .unwrap();
    let (lo, hi) = mc.ci95;
    println!("  operating point k = {kstar}: indep = {indep:.3e}, proposed bound = {proposed:.3e}");
    println!(
        "  {} trials: {} failures, DFR_hat = {:.3e}, 95% CI [{lo:.3e}, {hi:.3e}] ({:.0}s)",
        mc.trials, mc.failures, mc.dfr_hat, mc.wall_time_s
    );
    let lower = lo >= 0.2 * indep;
    let upper = hi <= proposed;
    let mut all = verdict(
        "6 lower ordering",
        lower,
        &format!("CI low {lo:.3e} >= 0.2 x indep {:.3e}", 0.2 * indep),
    );
    all &= verdict(
        "6 upper ordering",
        upper,
        &format!("CI high {hi:.3e} <= proposed {proposed:.3e}"),
    );
    // context: the point-estimate form of the same ordering, and how tight
    // the bound is at this operating point. P1 is negligible here and the
    // sign-pattern union is tight deep in the tail, so the bound all but
    // coincides with the true rate; a 95% CI endpoint can then land above
    // it through sampling noise alone even though DFR <= bound holds.
    println!(
        "  point estimate: {:.3e} {} proposed {proposed:.3e}; MC/indep = {:.2}",
        mc.dfr_hat,
        if mc.dfr_hat <= proposed { "<=" } else { ">" },
        mc.dfr_hat / indep
    );
    assert!(all);
}

#[test]
fn criterion_7_dependent_sum_distribution() {
    // 1e6 protocol trials at the toy parameters against the decomposed pmf
    let params = SchemeParams::toy();
    let trials = 1_000_000u64;
    let analytic = sum_nstar_pmf(&params, &PrecisionPolicy::default()).unwrap();
    let empirical = noise_histogram(
        &params,
        trials,
        &RngSpec::from_u64(7),
        HistogramKind::SumOverRepetitions,
    )
    .unwrap();
    let (lo, hi) = analytic.support();
    let observed: Vec<u64> = (lo..=hi)
        .map(|v| (empirical.prob(v) * trials as f64).round() as u64)
        .collect();
    let expected: Vec<f64> = (lo..=hi)
        .map(|v| analytic.prob(v) * trials as f64)
        .collect();
    let fit = chi_square_gof(&observed, &expected, 5.0).unwrap();
    let pass = fit.p_value > 0.001;
    assert!(verdict(
        "7 dependent-sum chi-square",
        pass,
        &format!(
            "chi2 = {:.1} on {} df, p = {:.4} > 0.001",
            fit.statistic, fit.degrees_of_freedom, fit.p_value
        )
    ));
}

#[test]
fn criterion_8_property_suites() {
    let started = Instant::now();
    let policy = PrecisionPolicy::default();

    // normalization and symmetry invariants through convolution chains
    let w = w_pmf(&SchemeParams::newhope1024(), &policy).unwrap();
    let mut acc = cbd_pmf(8).unwrap();
    for d in [&product_cbd_pmf(8).unwrap(), &w] {
        acc = acc.convolve(d, &policy).unwrap();
        acc.check_normalized(1e-9).unwrap();
        assert!(acc.is_symmetric(1e-9));
    }

    // exact-rational brute-force convolution oracle, supports <= 100
    use num_rational::BigRational;
    let mut rng = RngSpec::from_u64(80).rng();
    use rand::Rng;
    for _ in 0..5 {
        let len = rng.gen_range(20..=50usize);
        let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..1.0f64)).collect();
        let t: f64 = raw.iter().sum();
        let masses: Vec<f64> = raw.iter().map(|x| x / t).collect();
        let d = Dist::from_masses(-10, masses.clone(), 0.0).unwrap();
        let c = d.convolve(&d, &policy).unwrap();
        let rats: Vec<BigRational> = masses
            .iter()
            .map(|&x| BigRational::from_float(x).unwrap())
            .collect();
        for i in 0..2 * len - 1 {
            let mut exact = BigRational::from_float(0.0).unwrap();
            for j in 0..len {
                if i >= j && i - j < len {
                    exact += &rats[j] * &rats[i - j];
                }
            }
            let approx = exact.numer().to_string().parse::<f64>().unwrap()
                / exact.denom().to_string().parse::<f64>().unwrap();
            let got = c.masses()[i];
            assert!(
                (got - approx).abs() <= 1e-12 * approx.abs().max(got.abs()).max(1e-30),
                "index {i}: {got} vs {approx}"
            );
        }
    }

    // total-noise identity on every trial (integer, no tolerance)
    let mut rng = RngSpec::from_u64(81).rng();
    for (params, count) in [(SchemeParams::newhope512(), 30), (SchemeParams::toy(), 300)] {
        for _ in 0..count {
            let mu = dfrkit::ate::MessageBits::new(
                (0..params.msg_len).map(|_| rng.gen_range(0..2u8)).collect(),
            )
            .unwrap();
            let (_, _, trace) = dfrkit::pke::run_trial(&params, &mu, &mut rng).unwrap();
            dfrkit::pke::extract_noise(&trace, &params).unwrap();
        }
    }

    // noiseless encode/decode roundtrip: exhaustive at L = 2, random at 256
    let toy = SchemeParams::toy();
    for bits in [[0u8, 0], [0, 1], [1, 0], [1, 1]] {
        let mu = dfrkit::ate::MessageBits::new(bits.to_vec()).unwrap();
        let v = dfrkit::ate::ate_encode(&mu, &toy).unwrap();
        assert_eq!(dfrkit::ate::ate_decode(&v, &toy).unwrap().0, mu);
    }
    let big = SchemeParams::newhope1024();
    for _ in 0..20 {
        let mu = dfrkit::ate::MessageBits::new((0..256).map(|_| rng.gen_range(0..2u8)).collect())
            .unwrap();
        let v = dfrkit::ate::ate_encode(&mu, &big).unwrap();
        assert_eq!(dfrkit::ate::ate_decode(&v, &big).unwrap().0, mu);
    }

    // Chernoff dominates the exact tail on small sums
    let d = cbd_pmf(1).unwrap();
    let sum = d.self_convolve(100, &policy).unwrap();
    let log_mgf = |t: f64| {
        let terms: Vec<f64> = d
            .masses()
            .iter()
            .enumerate()
            .map(|(i, &p)| p.ln() + (d.offset() + i as i64) as f64 * t)
            .collect();
        let mx = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        mx + terms.iter().map(|&x| (x - mx).exp()).sum::<f64>().ln()
    };
    for theta in [30.0, 50.0, 70.0] {
        let (exact, _) = sum.window_prob(theta as i64 + 1, 100);
        let (_, b) = chernoff_opt(theta, 100, log_mgf).unwrap();
        assert!(b >= exact.log2() - 1e-9);
    }

    // Renyi: R_a(p || p) = 1 and monotone decrease over k = 2..16 at a = 9
    let p8 = cbd_pmf(8).unwrap();
    assert!((renyi_divergence(&p8, &p8, 9.0).unwrap() - 1.0).abs() < 1e-12);
    let sweep = renyi_sweep(2, 16, 9.0).unwrap();
    assert!(sweep.windows(2).all(|w| w[0].divergence > w[1].divergence));
    assert!(rounded_gaussian_pmf(8).unwrap().is_symmetric(1e-12));

    let elapsed = started.elapsed().as_secs_f64();
    assert!(verdict(
        "8 property suites",
        elapsed < 120.0,
        &format!("all invariants hold, {elapsed:.1}s < 120s")
    ));
}

#[test]
fn criterion_9_excluded_results_are_reference_only() {
    // attack costs: shipped as labeled reference data and echoed verbatim
    let policy = PrecisionPolicy::default().with_prune(1e-150);
    let rows = dfrkit::cli::security_sweep(&policy).unwrap();
    let mut ok = rows.iter().all(|r| r.costs_source == "reference");
    ok &= rows.len() == 16;
    let shipped = dfrkit::cli::SECURITY_REFERENCE_CSV;
    ok &= shipped.lines().count() == 17; // header + 16 rows
    let r = rows.iter().find(|r| r.n == 1024 && r.k == 8).unwrap();
    ok &= (r.primal_classical_ref, r.primal_quantum_ref) == (259, 235);

    // no method recomputes the superseded bound: the CLI accepts exactly
    // proposed / cc / indep
    use clap::Parser;
    ok &= dfrkit::cli::Cli::try_parse_from(["dfrkit", "bound", "--method", "current"]).is_err();

    // the divergence figure is locked by value regression + monotonicity,
    // not by absolute axis reproduction
    let r9 =
        renyi_divergence(&cbd_pmf(8).unwrap(), &rounded_gaussian_pmf(8).unwrap(), 9.0).unwrap();
    ok &= (r9 - 1.001_994_074_673_865_7).abs() < 1e-9;

    assert!(verdict(
        "9 exclusions",
        ok,
        "attack costs labeled reference; no superseded-bound method; divergence regression-locked"
    ));
}
