//! Decryption-failure-rate bounds.
//!
//! Three routes are implemented on the same parameter set:
//!
//! * `proposed`: the dependency-aware bound. One decoder bit fails only if
//!   either some coefficient wrapped mod q (the tail term P1, counted m
//!   times) or the dependent sum of its m noise coefficients landed in the
//!   decision window (P2). Both probabilities come from exactly computed
//!   pmfs, and DFR <= L * 2^m * (m P1 + P2).
//! * `cc`: the same structure bounded through moment generating
//!   functions, minimizing exp(-theta t + N ln M(t)) over t > 0.
//! * `indep`: the baseline that treats the m coefficients as independent,
//!   giving DFR = 1 - (1 - BER)^L.
//!
//! The 2^m factor counts the sign-pattern cases of the window argument; it
//! equals the m^2 cases of the m in {2, 4} constructions.

use std::time::Instant;

use serde::Serialize;

use crate::dist::{cbd_pmf, PrecisionPolicy};
use crate::error::{Error, Result};
use crate::noise;
use crate::params::SchemeParams;

/// Which bound a report came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Proposed,
    Cc,
    Indep,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Proposed => "proposed",
            Method::Cc => "cc",
            Method::Indep => "indep",
        })
    }
}

/// A computed DFR bound with its components and error accounting.
///
/// All probabilities are reported as log2; `log2_dfr` already includes the
/// distribution engine's discarded-mass bound, so it is a sound upper
/// bound on the method's value. Non-finite entries serialize as null.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub method: Method,
    pub n: usize,
    pub q: u32,
    pub k: u32,
    pub r: u32,
    pub m: usize,
    pub log2_dfr: f64,
    pub p1_log2: Option<f64>,
    pub p2_log2: Option<f64>,
    pub t_opt: Option<f64>,
    pub err_log2: Option<f64>,
    pub wall_time_s: f64,
}

impl BoundReport {
    fn new(method: Method, params: &SchemeParams) -> BoundReport {
        BoundReport {
            method,
            n: params.n,
            q: params.q,
            k: params.k,
            r: params.r,
            m: params.reps,
            log2_dfr: f64::NEG_INFINITY,
            p1_log2: None,
            p2_log2: None,
            t_opt: None,
            err_log2: None,
            wall_time_s: 0.0,
        }
    }
}

/// The dependency-aware upper bound DFR <= L * 2^m * (m P1 + P2).
///
/// P1 = Pr(|n*| > floor(q/2)) from the marginal coefficient pmf and
/// P2 = Pr(T_m <= sum of one bit's m coefficients <= 2 T_m) from the
/// decomposed dependent-sum pmf.
pub fn proposed_dfr_bound(params: &SchemeParams, policy: &PrecisionPolicy) -> Result<BoundReport> {
    params.validate()?;
    let start = Instant::now();
    let nstar = noise::nstar_pmf(params, policy)?;
    let (p1, e1) = nstar.two_sided_tail(params.q_half() as i64);
    let sum = noise::sum_nstar_pmf(params, policy)?;
    let (lo, hi) = params.error_window();
    let (p2, e2) = sum.window_prob(lo, hi);

    let m = params.reps as f64;
    let cases = (params.reps as f64).exp2();
    let scale = params.msg_len as f64 * cases;
    let dfr = (scale * (m * (p1 + e1) + (p2 + e2))).min(1.0);
    let err_total = scale * (m * e1 + e2);

    let mut rep = BoundReport::new(Method::Proposed, params);
    rep.log2_dfr = dfr.log2();
    rep.p1_log2 = Some((p1 + e1).log2());
    rep.p2_log2 = Some((p2 + e2).log2());
    rep.err_log2 = Some(err_total.log2());
    rep.wall_time_s = start.elapsed().as_secs_f64();
    Ok(rep)
}

/// The independence baseline: BER from the m-fold convolution of the
/// marginal total-noise pmf, then DFR = 1 - (1 - BER)^L.
pub fn indep_dfr(params: &SchemeParams, policy: &PrecisionPolicy) -> Result<BoundReport> {
    params.validate()?;
    let start = Instant::now();
    let total = noise::total_noise_pmf(params, policy)?;
    let summed = total.self_convolve(params.reps as u64, policy)?;
    let (lo, hi) = params.error_window();
    let (ber, err) = summed.window_prob(lo, hi);
    let dfr = ber_to_dfr((ber + err).min(1.0), params.msg_len);

    let mut rep = BoundReport::new(Method::Indep, params);
    rep.log2_dfr = dfr.log2();
    rep.err_log2 = Some((params.msg_len as f64 * err).log2());
    rep.wall_time_s = start.elapsed().as_secs_f64();
    Ok(rep)
}

/// 1 - (1 - ber)^l evaluated stably for tiny rates.
pub(crate) fn ber_to_dfr(ber: f64, l: usize) -> f64 {
    if ber <= 0.0 {
        return 0.0;
    }
    if ber >= 1.0 {
        return 1.0;
    }
    let a = -(l as f64) * (-ber).ln_1p();
    -(-a).exp_m1()
}

/// ln E[cosh^{2k}(t y / 2)] for y ~ psi_k: the log moment generating
/// function of the product of two centered binomial variables.
pub fn mgf_cbd_product_log(k: u32, t: f64) -> Result<f64> {
    let cbd = cbd_pmf(k)?;
    let terms: Vec<f64> = cbd
        .masses()
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(i, &p)| {
            let y = (cbd.offset() + i as i64) as f64;
            p.ln() + 2.0 * k as f64 * ln_cosh(t * y / 2.0)
        })
        .collect();
    Ok(log_sum_exp(&terms))
}

/// Pmf of Z = sum_l c_l^2 over the sign-weighted s-tuples; cached by the
/// CC bound so the optimizer can evaluate its MGF bound cheaply.
pub(crate) fn z_pmf(params: &SchemeParams, policy: &PrecisionPolicy) -> Result<Vec<(i64, f64)>> {
    noise::check_reps_supported(params.reps, policy)?;
    let mut acc = std::collections::BTreeMap::new();
    noise::for_each_s_tuple(params.k, params.reps, |c, p| {
        let z: i64 = c.iter().map(|&x| x * x).sum();
        *acc.entry(z).or_insert(0.0) += p;
    })?;
    Ok(acc.into_iter().collect())
}

fn log_mgf_w_upper(zp: &[(i64, f64)], k: u32, t: f64) -> f64 {
    let scale = k as f64 * t * t / 4.0;
    let terms: Vec<f64> = zp
        .iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|&(z, p)| p.ln() + z as f64 * scale)
        .collect();
    log_sum_exp(&terms)
}

/// ln E[exp(z k t^2 / 4)] for Z = sum_l (sum_j sigma_{l,j} s_j)^2: a valid
/// upper bound on the log-MGF of W via cosh^{2k}(x) <= exp(k x^2).
pub fn mgf_w_upper_log(params: &SchemeParams, policy: &PrecisionPolicy, t: f64) -> Result<f64> {
    Ok(log_mgf_w_upper(&z_pmf(params, policy)?, params.k, t))
}

/// Minimize g(t) = -theta t + count ln M(t) over t > 0: a log-spaced grid
/// scan followed by ternary refinement (g is convex). Any evaluated t
/// yields a valid bound, exp(g(t)); returns (t_opt, log2 bound).
pub fn chernoff_opt(
    theta: f64,
    count: u64,
    log_mgf: impl Fn(f64) -> f64,
) -> Result<(Option<f64>, f64)> {
    if count == 0 {
        return Err(Error::InvalidParams("chernoff_opt needs count >= 1".into()));
    }
    if theta <= 0.0 {
        // vacuous bound: probability <= 1
        return Ok((None, 0.0));
    }
    let nf = count as f64;
    let g = |t: f64| -theta * t + nf * log_mgf(t);
    const GRID: usize = 400;
    let (t_min, t_max) = (1e-7f64, 10.0f64);
    let step = (t_max / t_min).ln() / (GRID - 1) as f64;
    let mut best_i = 0usize;
    let mut best_g = f64::INFINITY;
    for i in 0..GRID {
        let t = t_min * (i as f64 * step).exp();
        let v = g(t);
        if !v.is_finite() {
            return Err(Error::Numerical(format!("log-MGF not finite at t = {t}")));
        }
        if v < best_g {
            best_g = v;
            best_i = i;
        }
    }
    let mut lo = t_min * (best_i.saturating_sub(1) as f64 * step).exp();
    let mut hi = t_min * ((best_i + 1).min(GRID - 1) as f64 * step).exp();
    for _ in 0..120 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if g(m1) < g(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let t = 0.5 * (lo + hi);
    let log2_bound = (g(t).min(best_g) / std::f64::consts::LN_2).min(0.0);
    Ok((Some(t), log2_bound))
}

/// The parameterized bound DFR <= L * 2^m * (B2 + m B1) with
/// B2 = inf_t exp(-theta2 t + 2L ln M_W^upper(t)),
///   theta2 = T_m - m (k + (q-1)/2r), and
/// B1 = 2 inf_t exp(-theta1 t + 2n ln M_prod(t)),
///   theta1 = floor(q/2) - (k + (q-1)/2r),
/// worst-casing the non-product noise by its maximum magnitude.
pub fn cc_dfr_bound(params: &SchemeParams, policy: &PrecisionPolicy) -> Result<BoundReport> {
    params.validate()?;
    let start = Instant::now();
    let zp = z_pmf(params, policy)?;
    let cbd = cbd_pmf(params.k)?;
    let k = params.k;
    let prod_log = |t: f64| {
        let terms: Vec<f64> = cbd
            .masses()
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, &p)| {
                let y = (cbd.offset() + i as i64) as f64;
                p.ln() + 2.0 * k as f64 * ln_cosh(t * y / 2.0)
            })
            .collect();
        log_sum_exp(&terms)
    };
    let w_log = |t: f64| log_mgf_w_upper(&zp, k, t);

    let m = params.reps as f64;
    let slack = k as f64 + (params.q as f64 - 1.0) / (2.0 * params.r as f64);
    let theta2 = m * params.q_half() as f64 / 2.0 - m * slack;
    let theta1 = params.q_half() as f64 - slack;

    let (t2, b2) = chernoff_opt(theta2, 2 * params.msg_len as u64, w_log)?;
    let (_t1, b1_one_sided) = chernoff_opt(theta1, 2 * params.n as u64, prod_log)?;
    let b1 = (b1_one_sided + 1.0).min(0.0); // two-sided tail

    let log2_dfr = ((params.msg_len as f64).log2() + m + log2_add(b2, m.log2() + b1)).min(0.0);

    let mut rep = BoundReport::new(Method::Cc, params);
    rep.log2_dfr = log2_dfr;
    rep.p1_log2 = Some(b1);
    rep.p2_log2 = Some(b2);
    rep.t_opt = t2;
    rep.wall_time_s = start.elapsed().as_secs_f64();
    Ok(rep)
}

/// Dispatch by method name.
pub fn dfr_bound(
    method: Method,
    params: &SchemeParams,
    policy: &PrecisionPolicy,
) -> Result<BoundReport> {
    match method {
        Method::Proposed => proposed_dfr_bound(params, policy),
        Method::Cc => cc_dfr_bound(params, policy),
        Method::Indep => indep_dfr(params, policy),
    }
}

/// Numerically stable ln cosh.
fn ln_cosh(x: f64) -> f64 {
    let ax = x.abs();
    ax + (-2.0 * ax).exp().ln_1p() - std::f64::consts::LN_2
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let mx = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !mx.is_finite() {
        return mx;
    }
    mx + terms.iter().map(|&t| (t - mx).exp()).sum::<f64>().ln()
}

/// log2(2^a + 2^b).
fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if !hi.is_finite() {
        return hi;
    }
    hi + (1.0 + (lo - hi).exp2()).log2()
}
