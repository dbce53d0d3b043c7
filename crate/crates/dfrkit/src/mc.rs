//! Monte-Carlo estimation of failure rates and empirical noise histograms
//! from full protocol trials.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::ate::MessageBits;
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::params::SchemeParams;
use crate::pke;
use crate::ring::{Poly, SignedVec};
use crate::rng::RngSpec;
use crate::stats;

/// Options for a trial run.
#[derive(Debug, Clone, Copy)]
pub struct McOptions {
    /// Force every noise vector to zero (compression noise remains).
    pub zero_noise: bool,
    /// Keep per-failure forensics (failing bits and their decoder sums).
    pub keep_forensics: bool,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            zero_noise: false,
            keep_forensics: true,
        }
    }
}

/// Forensics for one failed trial.
#[derive(Debug, Clone, Serialize)]
pub struct FailureRecord {
    pub trial: u64,
    /// Bit positions that decoded incorrectly.
    pub bits: Vec<usize>,
    /// Decoder sums of those bits.
    pub sums: Vec<u64>,
}

/// Aggregated result of a trial run.
#[derive(Debug, Clone, Serialize)]
pub struct McReport {
    pub n: usize,
    pub q: u32,
    pub k: u32,
    pub r: u32,
    pub m: usize,
    pub trials: u64,
    pub failures: u64,
    pub bit_errors: u64,
    pub dfr_hat: f64,
    /// Exact (Clopper-Pearson) 95% binomial interval on the DFR.
    pub ci95: (f64, f64),
    pub seed: String,
    pub stream: u64,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forensics: Option<Vec<FailureRecord>>,
}

struct TrialOutcome {
    bit_errors: u32,
    forensic: Option<FailureRecord>,
}

fn one_trial(
    params: &SchemeParams,
    spec: &RngSpec,
    trial: u64,
    opts: &McOptions,
) -> Result<TrialOutcome> {
    let mut rng = spec.with_stream(spec.stream.wrapping_add(trial)).rng();
    let mu = random_message(params, &mut rng);
    let (decoded, trace) = if opts.zero_noise {
        let a = crate::rng::sample_uniform_poly(params, &mut rng);
        let kp = pke::keygen_from_secrets(
            a,
            SignedVec::zero(params.n),
            SignedVec::zero(params.n),
            params,
        )?;
        let (ct, _) = pke::encrypt_from_secrets(
            &kp.a,
            &kp.b,
            &mu,
            SignedVec::zero(params.n),
            SignedVec::zero(params.n),
            SignedVec::zero(params.n),
            params,
        )?;
        pke::decrypt(&kp.s, &ct, params)?
    } else {
        let kp = pke::keygen(params, &mut rng)?;
        let (ct, _) = pke::encrypt(&kp.a, &kp.b, &mu, params, &mut rng)?;
        pke::decrypt(&kp.s, &ct, params)?
    };
    let bad: Vec<usize> = mu
        .bits
        .iter()
        .zip(&decoded.bits)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(i, _)| i)
        .collect();
    let forensic = if !bad.is_empty() && opts.keep_forensics {
        Some(FailureRecord {
            trial,
            sums: bad.iter().map(|&i| trace.sums[i]).collect(),
            bits: bad.clone(),
        })
    } else {
        None
    };
    Ok(TrialOutcome {
        bit_errors: bad.len() as u32,
        forensic,
    })
}

/// Run full keygen/encrypt/decrypt trials and count failures.
///
/// Trial i draws from stream `seed.stream + i`, so the result is identical
/// for any thread count or scheduling.
pub fn run_trials(
    params: &SchemeParams,
    trials: u64,
    seed: &RngSpec,
    opts: &McOptions,
) -> Result<McReport> {
    params.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be >= 1".into()));
    }
    let start = Instant::now();
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|i| one_trial(params, seed, i, opts))
        .collect::<Result<_>>()?;
    let mut failures = 0u64;
    let mut bit_errors = 0u64;
    let mut forensics = Vec::new();
    for o in outcomes {
        if o.bit_errors > 0 {
            failures += 1;
        }
        bit_errors += o.bit_errors as u64;
        if let Some(f) = o.forensic {
            forensics.push(f);
        }
    }
    forensics.sort_by_key(|f| f.trial);
    let ci95 = stats::clopper_pearson(failures, trials, 0.95)?;
    Ok(McReport {
        n: params.n,
        q: params.q,
        k: params.k,
        r: params.r,
        m: params.reps,
        trials,
        failures,
        bit_errors,
        dfr_hat: failures as f64 / trials as f64,
        ci95,
        seed: seed.seed_hex(),
        stream: seed.stream,
        wall_time_s: start.elapsed().as_secs_f64(),
        forensics: if opts.keep_forensics {
            Some(forensics)
        } else {
            None
        },
    })
}

/// Which empirical histogram to collect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistogramKind {
    /// Marginal of the centered total-noise coefficients (n samples per trial).
    Total,
    /// The integer-domain dependent sum of bit 0's m noise coefficients
    /// (one sample per trial).
    SumOverRepetitions,
}

/// Normalized histogram of extracted protocol noise.
pub fn noise_histogram(
    params: &SchemeParams,
    trials: u64,
    seed: &RngSpec,
    kind: HistogramKind,
) -> Result<Dist> {
    params.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be >= 1".into()));
    }
    let bound = match kind {
        HistogramKind::Total => params.q_half() as i64,
        HistogramKind::SumOverRepetitions => {
            params.reps as i64
                * (2 * params.n as i64 * (params.k as i64).pow(2)
                    + params.k as i64
                    + params.max_compression_noise() as i64)
        }
    };
    let size = (2 * bound + 1) as usize;
    let counts = (0..trials)
        .into_par_iter()
        .try_fold(
            || vec![0u64; size],
            |mut acc, i| -> Result<Vec<u64>> {
                let mut rng = seed.with_stream(seed.stream.wrapping_add(i)).rng();
                let mu = random_message(params, &mut rng);
                let (_, _, trace) = pke::run_trial(params, &mu, &mut rng)?;
                match kind {
                    HistogramKind::Total => {
                        let n_t = pke::extract_noise(&trace, params)?;
                        for &x in &n_t.coeffs {
                            acc[(x + bound) as usize] += 1;
                        }
                    }
                    HistogramKind::SumOverRepetitions => {
                        let nstar = pke::integer_noise(&trace)?;
                        let sum: i64 = (0..params.reps)
                            .map(|l| nstar.coeffs[params.msg_len * l])
                            .sum();
                        acc[(sum + bound) as usize] += 1;
                    }
                }
                Ok(acc)
            },
        )
        .try_reduce(
            || vec![0u64; size],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                Ok(a)
            },
        )?;
    let total: u64 = counts.iter().sum();
    let masses: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    Ok(Dist::from_masses(-bound, masses, 0.0)?.trimmed(0.0))
}

fn random_message(params: &SchemeParams, rng: &mut impl rand::RngCore) -> MessageBits {
    let bits = (0..params.msg_len)
        .map(|_| (rng.next_u32() & 1) as u8)
        .collect();
    MessageBits { bits }
}

/// Decode statistic sanity helper used by tests: decode of v + noise.
pub fn decode_with_noise(
    v: &Poly,
    noise: &SignedVec,
    params: &SchemeParams,
) -> Result<(MessageBits, crate::ate::DecodeTrace)> {
    let shifted = SignedVec::new(
        v.coeffs
            .iter()
            .zip(&noise.coeffs)
            .map(|(&a, &b)| a as i64 + b)
            .collect(),
    );
    crate::ate::ate_decode(&Poly::from_signed(&shifted, params.q), params)
}
