//! Command-line front end. All logic lives in the library; the binary is a
//! thin dispatcher around [`run`].

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{self, BoundReport, Method};
use crate::dist::{Dist, PrecisionPolicy};
use crate::error::{Error, Result};
use crate::mc::{self, McOptions};
use crate::noise;
use crate::params::SchemeParams;
use crate::renyi;
use crate::rng::RngSpec;

/// Attack-cost columns of the security sweep. These are published
/// reference values shipped with the tool, never computed by it.
pub const SECURITY_REFERENCE_CSV: &str = include_str!("../assets/security_reference.csv");

/// Rows of the bandwidth sweep: (n, r, k), r = 8 being the baseline.
pub const BANDWIDTH_ROWS: [(usize, u32, u32); 7] = [
    (1024, 8, 8),
    (1024, 4, 8),
    (1024, 4, 9),
    (1024, 4, 10),
    (512, 8, 8),
    (512, 4, 8),
    (512, 4, 9),
];

#[derive(Debug, Parser)]
#[command(
    name = "dfrkit",
    version,
    about = "Failure-rate analysis for a Ring-LWE encryption core"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: DFRKIT_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Prune convolution edges below this mass; pruned mass is tracked in err.
    #[arg(long, global = true, default_value_t = 0.0)]
    pub prune: f64,
    /// Allow repetition counts outside {2, 4}.
    #[arg(long, global = true)]
    pub allow_nonstandard_m: bool,
    /// Write machine output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ParamArgs {
    /// Ring dimension.
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    /// Modulus (odd prime).
    #[arg(long, default_value_t = 12289)]
    pub q: u32,
    /// Centered binomial noise parameter.
    #[arg(long, default_value_t = 8)]
    pub k: u32,
    /// Compression rate.
    #[arg(long, default_value_t = 8)]
    pub r: u32,
    /// Message length in bits.
    #[arg(long = "L", default_value_t = 256)]
    pub msg_len: usize,
}

impl ParamArgs {
    pub fn to_params(self) -> Result<SchemeParams> {
        SchemeParams::new(self.n, self.q, self.k, self.r, self.msg_len)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Proposed,
    Cc,
    Indep,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Proposed => Method::Proposed,
            MethodArg::Cc => Method::Cc,
            MethodArg::Indep => Method::Indep,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableArg {
    Security,
    Bandwidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhichArg {
    Total,
    Compression,
    Difference,
    Nstar,
    SumNstar,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a DFR bound.
    Bound {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum)]
        method: MethodArg,
    },
    /// Reproduce a parameter-sweep table.
    Sweep {
        #[arg(long, value_enum)]
        table: TableArg,
    },
    /// Dump a noise pmf as CSV.
    Dist {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum)]
        which: WhichArg,
    },
    /// Run Monte-Carlo protocol trials.
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Renyi divergence of the noise distribution from its rounded-Gaussian
    /// counterpart over a range of k.
    Renyi {
        #[arg(long, default_value_t = 9.0)]
        a: f64,
        #[arg(long, default_value_t = 2)]
        k_min: u32,
        #[arg(long, default_value_t = 16)]
        k_max: u32,
    },
}

/// One row of the security sweep. The attack costs are shipped reference
/// values (`costs_source = "reference"`), only the DFR column is computed.
#[derive(Debug, Clone, Serialize)]
pub struct SecurityRow {
    pub n: usize,
    pub k: u32,
    pub dfr_log2: f64,
    pub primal_classical_ref: u32,
    pub primal_quantum_ref: u32,
    pub dual_classical_ref: u32,
    pub dual_quantum_ref: u32,
    pub costs_source: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct BandwidthRow {
    pub n: usize,
    pub r: u32,
    pub k: u32,
    pub ciphertext_reduction_pct: f64,
    pub dfr_log2: f64,
}

/// Map an error to the process exit code: 2 for rejected input, 3 for
/// numerical failure, 1 otherwise.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParams(_) | Error::Domain(_) => 2,
        Error::Numerical(_) => 3,
        _ => 1,
    }
}

pub fn run(cli: Cli) -> Result<()> {
    init_threads(cli.threads);
    if !(cli.prune >= 0.0 && cli.prune < 1.0) {
        return Err(Error::InvalidParams(format!(
            "--prune {} must be in [0, 1)",
            cli.prune
        )));
    }
    let policy = PrecisionPolicy::default()
        .with_prune(cli.prune)
        .with_nonstandard_m(cli.allow_nonstandard_m);
    let out = render(&cli.command, &policy, cli.format)?;
    write_output(cli.out.as_deref(), &out)
}

fn render(command: &Command, policy: &PrecisionPolicy, format: Format) -> Result<String> {
    match command {
        Command::Bound { params, method } => {
            let params = params.to_params()?;
            let report = bounds::dfr_bound((*method).into(), &params, policy)?;
            Ok(match format {
                Format::Json => to_json(&report)?,
                Format::Csv => bound_csv_header() + &bound_csv_row(&report),
                Format::Text => bound_text(&report),
            })
        }
        Command::Sweep {
            table: TableArg::Security,
        } => {
            let rows = security_sweep(policy)?;
            Ok(match format {
                Format::Json => to_json(&rows)?,
                Format::Csv => {
                    let mut s = String::from(
                        "n,k,dfr_log2,primal_classical_ref,primal_quantum_ref,dual_classical_ref,dual_quantum_ref\n",
                    );
                    for r in &rows {
                        s += &format!(
                            "{},{},{:.2},{},{},{},{}\n",
                            r.n,
                            r.k,
                            r.dfr_log2,
                            r.primal_classical_ref,
                            r.primal_quantum_ref,
                            r.dual_classical_ref,
                            r.dual_quantum_ref
                        );
                    }
                    s
                }
                Format::Text => {
                    let mut s = String::from(
                        "   n   k  log2(DFR)  primal C/Q  dual C/Q  (attack costs: reference, not computed)\n",
                    );
                    for r in &rows {
                        s += &format!(
                            "{:>4} {:>3} {:>10.2}     {}/{}     {}/{}\n",
                            r.n,
                            r.k,
                            r.dfr_log2,
                            r.primal_classical_ref,
                            r.primal_quantum_ref,
                            r.dual_classical_ref,
                            r.dual_quantum_ref
                        );
                    }
                    s
                }
            })
        }
        Command::Sweep {
            table: TableArg::Bandwidth,
        } => {
            let rows = bandwidth_sweep(policy)?;
            Ok(match format {
                Format::Json => to_json(&rows)?,
                Format::Csv => {
                    let mut s = String::from("n,r,k,ciphertext_reduction_pct,dfr_log2\n");
                    for r in &rows {
                        s += &format!(
                            "{},{},{},{:.1},{:.2}\n",
                            r.n, r.r, r.k, r.ciphertext_reduction_pct, r.dfr_log2
                        );
                    }
                    s
                }
                Format::Text => {
                    let mut s = String::from("   n   r   k  reduction(%)  log2(DFR)\n");
                    for r in &rows {
                        s += &format!(
                            "{:>4} {:>3} {:>3} {:>12.1} {:>10.2}\n",
                            r.n, r.r, r.k, r.ciphertext_reduction_pct, r.dfr_log2
                        );
                    }
                    s
                }
            })
        }
        Command::Dist { params, which } => {
            let params = params.to_params()?;
            let d = compute_dist(&params, *which, policy)?;
            Ok(match format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct DistDump {
                        err: f64,
                        value: Vec<i64>,
                        prob: Vec<f64>,
                    }
                    let (lo, _) = d.support();
                    to_json(&DistDump {
                        err: d.err(),
                        value: (0..d.len() as i64).map(|i| lo + i).collect(),
                        prob: d.masses().to_vec(),
                    })?
                }
                // CSV is the native interface for pmf dumps.
                Format::Csv | Format::Text => d.to_csv_string(),
            })
        }
        Command::Simulate {
            params,
            trials,
            seed,
        } => {
            let params = params.to_params()?;
            if *trials == 0 {
                return Err(Error::InvalidParams("--trials must be >= 1".into()));
            }
            let spec = RngSpec::from_u64(*seed);
            let report = mc::run_trials(&params, *trials, &spec, &McOptions::default())?;
            Ok(match format {
                Format::Json => to_json(&report)?,
                Format::Csv => {
                    // per-failure forensics
                    let mut s = String::from("trial,bit,sum\n");
                    if let Some(forensics) = &report.forensics {
                        for f in forensics {
                            for (b, sum) in f.bits.iter().zip(&f.sums) {
                                s += &format!("{},{},{}\n", f.trial, b, sum);
                            }
                        }
                    }
                    s
                }
                Format::Text => format!(
                    "trials      {}\nfailures    {}\nbit errors  {}\nDFR         {:.3e}\n95% CI      [{:.3e}, {:.3e}]\nseed        {} (stream {})\nwall time   {:.2}s\n",
                    report.trials,
                    report.failures,
                    report.bit_errors,
                    report.dfr_hat,
                    report.ci95.0,
                    report.ci95.1,
                    report.seed,
                    report.stream,
                    report.wall_time_s
                ),
            })
        }
        Command::Renyi { a, k_min, k_max } => {
            let rows = renyi::renyi_sweep(*k_min, *k_max, *a)?;
            Ok(match format {
                Format::Json => to_json(&rows)?,
                Format::Csv | Format::Text => {
                    let mut s = String::from("k,a,divergence\n");
                    for r in &rows {
                        s += &format!("{},{},{:.12}\n", r.k, r.a, r.divergence);
                    }
                    s
                }
            })
        }
    }
}

pub fn security_sweep(policy: &PrecisionPolicy) -> Result<Vec<SecurityRow>> {
    let costs = parse_reference_costs();
    let mut rows = Vec::new();
    for &n in &[1024usize, 512] {
        for k in 8..=15u32 {
            let params = SchemeParams::new(n, 12289, k, 8, 256)?;
            let rep = bounds::proposed_dfr_bound(&params, policy)?;
            let c = costs.iter().find(|c| c.0 == n && c.1 == k).ok_or_else(|| {
                Error::InvalidParams(format!("no reference costs for n={n} k={k}"))
            })?;
            rows.push(SecurityRow {
                n,
                k,
                dfr_log2: rep.log2_dfr,
                primal_classical_ref: c.2,
                primal_quantum_ref: c.3,
                dual_classical_ref: c.4,
                dual_quantum_ref: c.5,
                costs_source: "reference",
            });
        }
    }
    Ok(rows)
}

pub fn bandwidth_sweep(policy: &PrecisionPolicy) -> Result<Vec<BandwidthRow>> {
    BANDWIDTH_ROWS
        .iter()
        .map(|&(n, r, k)| {
            let params = SchemeParams::new(n, 12289, k, r, 256)?;
            let rep = bounds::proposed_dfr_bound(&params, policy)?;
            Ok(BandwidthRow {
                n,
                r,
                k,
                ciphertext_reduction_pct: params.ciphertext_reduction_pct(),
                dfr_log2: rep.log2_dfr,
            })
        })
        .collect()
}

fn compute_dist(params: &SchemeParams, which: WhichArg, policy: &PrecisionPolicy) -> Result<Dist> {
    match which {
        WhichArg::Total => noise::total_noise_pmf(params, policy),
        WhichArg::Compression => crate::dist::compression_noise_pmf(params),
        WhichArg::Difference => noise::difference_noise_pmf(params, policy),
        WhichArg::Nstar => noise::nstar_pmf(params, policy),
        WhichArg::SumNstar => noise::sum_nstar_pmf(params, policy),
    }
}

fn parse_reference_costs() -> Vec<(usize, u32, u32, u32, u32, u32)> {
    SECURITY_REFERENCE_CSV
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<u32> = l.split(',').map(|x| x.trim().parse().unwrap()).collect();
            (f[0] as usize, f[1], f[2], f[3], f[4], f[5])
        })
        .collect()
}

fn bound_text(r: &BoundReport) -> String {
    let opt = |v: Option<f64>| match v {
        Some(x) if x.is_finite() => format!("{x:.3}"),
        _ => "-".into(),
    };
    format!(
        "method      {}\nparams      n={} q={} k={} r={} m={}\nlog2(DFR)   {:.3}\nP1 (log2)   {}\nP2 (log2)   {}\nt_opt       {}\nerr (log2)  {}\nwall time   {:.2}s\n",
        r.method,
        r.n,
        r.q,
        r.k,
        r.r,
        r.m,
        r.log2_dfr,
        opt(r.p1_log2),
        opt(r.p2_log2),
        opt(r.t_opt),
        opt(r.err_log2),
        r.wall_time_s
    )
}

fn bound_csv_header() -> String {
    "method,n,q,k,r,m,log2_dfr,p1_log2,p2_log2,t_opt,err_log2,wall_time_s\n".into()
}

fn bound_csv_row(r: &BoundReport) -> String {
    let opt = |v: Option<f64>| match v {
        Some(x) if x.is_finite() => format!("{x}"),
        _ => String::new(),
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}\n",
        r.method,
        r.n,
        r.q,
        r.k,
        r.r,
        r.m,
        r.log2_dfr,
        opt(r.p1_log2),
        opt(r.p2_log2),
        opt(r.t_opt),
        opt(r.err_log2),
        r.wall_time_s
    )
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Numerical(format!("serialization: {e}")))
}

fn write_output(path: Option<&Path>, s: &str) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            w.write_all(s.as_bytes())?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            w.write_all(s.as_bytes())?;
        }
    }
    Ok(())
}

fn init_threads(flag: Option<usize>) {
    let n = flag.or_else(|| {
        std::env::var("DFRKIT_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = n {
        if n > 0 {
            // ignore "already initialized": tests invoke run() repeatedly
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn run_to_string(args: &[&str]) -> Result<String> {
        let cli = Cli::try_parse_from(args).map_err(|e| Error::InvalidParams(e.to_string()))?;
        let policy = PrecisionPolicy::default()
            .with_prune(cli.prune)
            .with_nonstandard_m(cli.allow_nonstandard_m);
        render(&cli.command, &policy, cli.format)
    }

    #[test]
    fn bound_rejects_bad_n() {
        let err =
            run_to_string(&["dfrkit", "bound", "--method", "proposed", "--n", "1000"]).unwrap_err();
        assert_eq!(exit_code(&err), 2);
    }

    #[test]
    fn dist_compression_dump() {
        let out =
            run_to_string(&["dfrkit", "dist", "--which", "compression", "--n", "1024"]).unwrap();
        let mut lines = out.lines();
        assert!(lines.next().unwrap().starts_with("# err="));
        assert_eq!(lines.next().unwrap(), "value,prob");
        assert!(lines.next().unwrap().starts_with("-768,"));
        assert_eq!(
            out.lines().last().unwrap().split(',').next().unwrap(),
            "768"
        );
    }

    #[test]
    fn simulate_rejects_zero_trials() {
        let err = run_to_string(&[
            "dfrkit", "simulate", "--trials", "0", "--n", "8", "--q", "17", "--k", "1", "--r", "4",
            "--L", "2",
        ])
        .unwrap_err();
        assert_eq!(exit_code(&err), 2);
    }

    #[test]
    fn simulate_toy_json() {
        let out = run_to_string(&[
            "dfrkit", "--format", "json", "simulate", "--trials", "500", "--seed", "7", "--n", "8",
            "--q", "17", "--k", "1", "--r", "4", "--L", "2",
        ])
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["trials"], 500);
        assert!(v["dfr_hat"].is_number());
    }

    #[test]
    fn renyi_column_is_decreasing() {
        let out = run_to_string(&[
            "dfrkit", "renyi", "--a", "9", "--k-min", "2", "--k-max", "16",
        ])
        .unwrap();
        let vals: Vec<f64> = out
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
            .collect();
        assert_eq!(vals.len(), 15);
        assert!(vals.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn bound_text_toy_indep() {
        let out = run_to_string(&[
            "dfrkit", "bound", "--method", "indep", "--n", "8", "--q", "17", "--k", "1", "--r",
            "4", "--L", "2",
        ])
        .unwrap();
        assert!(out.contains("method      indep"));
    }

    #[test]
    fn reference_costs_parse() {
        let costs = parse_reference_costs();
        assert_eq!(costs.len(), 16);
        assert!(costs.contains(&(1024, 8, 259, 235, 257, 233)));
        assert!(costs.contains(&(512, 15, 122, 111, 122, 111)));
    }
}
