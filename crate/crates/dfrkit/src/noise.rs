//! The scheme's noise distributions, built exactly from the primitive pmfs.
//!
//! The key construction is the decomposition of the dependent repetition
//! sum into i.i.d. variables: summing one bit's m noise coefficients turns
//! the two cross products into 2L independent copies of
//!
//!   W = sum_l e_l * c_l,   c_l = sum_j sigma_{l,j} s_j,
//!
//! with sign pattern sigma_{l,j} = +1 for j < m - l and -1 otherwise, all
//! of e, s i.i.d. centered binomial. That makes the dependent sum's pmf
//! numerically computable as W^(*2L) (*) psi_k^(*m) (*) n_c^(*m).

use std::collections::BTreeMap;

use crate::dist::{cbd_pmf, compression_noise_pmf, product_cbd_pmf, Dist, PrecisionPolicy};
use crate::error::{Error, Result};
use crate::params::SchemeParams;

/// The decomposition's sign patterns are taken from the m in {2, 4}
/// construction; other repetition counts extrapolate the same column
/// pattern and must be enabled explicitly.
pub(crate) fn check_reps_supported(m: usize, policy: &PrecisionPolicy) -> Result<()> {
    if m == 2 || m == 4 {
        return Ok(());
    }
    if !policy.allow_nonstandard_m {
        return Err(Error::InvalidParams(format!(
            "repetition count m = {m} outside {{2, 4}} requires allow_nonstandard_m"
        )));
    }
    if m == 0 || m > 8 {
        return Err(Error::InvalidParams(format!(
            "repetition count m = {m} must be in [1, 8]"
        )));
    }
    Ok(())
}

/// Visit every s-tuple in [-k, k]^m with its probability under psi_k^m,
/// passing the coefficient vector (c_0, ..., c_{m-1}).
pub(crate) fn for_each_s_tuple(k: u32, m: usize, mut visit: impl FnMut(&[i64], f64)) -> Result<()> {
    let cbd = cbd_pmf(k)?;
    let kk = k as i64;
    let width = 2 * k as usize + 1;
    let mut idx = vec![0usize; m];
    let mut s = vec![-kk; m];
    let mut c = vec![0i64; m];
    loop {
        let mut p = 1.0;
        for &i in &idx {
            p *= cbd.masses()[i];
        }
        for (l, cl) in c.iter_mut().enumerate() {
            *cl = (0..m).map(|j| if j < m - l { s[j] } else { -s[j] }).sum();
        }
        visit(&c, p);
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == m {
                return Ok(());
            }
            idx[pos] += 1;
            if idx[pos] < width {
                s[pos] = idx[pos] as i64 - kk;
                break;
            }
            idx[pos] = 0;
            s[pos] = -kk;
            pos += 1;
        }
    }
}

/// Exact pmf of W = sum_l e_l c_l.
///
/// Conditioned on the s-tuple, W is a sum of m independent copies of
/// psi_k scaled by |c_l|, so tuples are grouped by the multiset of |c_l|
/// and each group contributes one small convolution chain.
pub fn w_pmf(params: &SchemeParams, policy: &PrecisionPolicy) -> Result<Dist> {
    params.validate()?;
    let m = params.reps;
    check_reps_supported(m, policy)?;
    let k = params.k as i64;
    let mut groups: BTreeMap<[u16; 8], f64> = BTreeMap::new();
    for_each_s_tuple(params.k, m, |c, p| {
        let mut key = [0u16; 8];
        for (slot, &cl) in key.iter_mut().zip(c) {
            *slot = cl.unsigned_abs() as u16;
        }
        key[..m].sort_unstable();
        *groups.entry(key).or_insert(0.0) += p;
    })?;
    let cbd = cbd_pmf(params.k)?;
    let wmax = m as i64 * k * (m as i64 * k);
    let mut masses = vec![0.0f64; (2 * wmax + 1) as usize];
    for (key, p) in groups {
        let (cond, off) = conditional_sum_pmf(&key[..m], cbd.masses(), k);
        for (i, &cm) in cond.iter().enumerate() {
            masses[(off + i as i64 + wmax) as usize] += p * cm;
        }
    }
    Dist::from_masses(-wmax, masses, 0.0).map(|d| d.trimmed(0.0))
}

/// Pmf of sum_l e_l c_l for fixed scale magnitudes, e_l i.i.d. with the
/// given pmf on [-k, k]. Returns the mass array and its first value.
fn conditional_sum_pmf(scales: &[u16], weights: &[f64], k: i64) -> (Vec<f64>, i64) {
    let mut cur = vec![1.0f64];
    let mut off = 0i64;
    for &c in scales {
        let c = c as i64;
        if c == 0 {
            continue;
        }
        let spread = (k * c) as usize;
        let mut next = vec![0.0f64; cur.len() + 2 * spread];
        for (j, &wj) in weights.iter().enumerate() {
            if wj == 0.0 {
                continue;
            }
            let shift = ((j as i64 - k) * c + spread as i64) as usize;
            for (i, &ci) in cur.iter().enumerate() {
                next[i + shift] += wj * ci;
            }
        }
        cur = next;
        off -= spread as i64;
    }
    (cur, off)
}

/// Reject constructions whose final materialized support cannot fit the
/// policy's cap, before any convolution work is done.
fn check_final_support(points: i64, policy: &PrecisionPolicy) -> Result<()> {
    if points > policy.max_support as i64 {
        return Err(Error::Numerical(format!(
            "final support of {points} points exceeds limit {}",
            policy.max_support
        )));
    }
    Ok(())
}

/// Largest |value| of one integer-domain noise coefficient.
fn nstar_bound(params: &SchemeParams) -> i64 {
    2 * params.n as i64 * (params.k as i64).pow(2)
        + params.k as i64
        + params.max_compression_noise() as i64
}

/// Marginal pmf of one integer-domain noise coefficient: the sum of 2n
/// i.i.d. binomial products plus one psi_k term plus one compression-noise
/// term.
pub fn nstar_pmf(params: &SchemeParams, policy: &PrecisionPolicy) -> Result<Dist> {
    params.validate()?;
    check_final_support(2 * nstar_bound(params) + 1, policy)?;
    let products = product_cbd_pmf(params.k)?.self_convolve(2 * params.n as u64, policy)?;
    products
        .convolve(&cbd_pmf(params.k)?, policy)?
        .convolve(&compression_noise_pmf(params)?, policy)
}

/// Marginal pmf of the total noise n_t = n_d + n_c. Identical to
/// [`nstar_pmf`] by construction; kept as a named alias for figure
/// reproduction and the independence baseline.
pub fn total_noise_pmf(params: &SchemeParams, policy: &PrecisionPolicy) -> Result<Dist> {
    nstar_pmf(params, policy)
}

/// Marginal pmf of the difference noise n_d = (e s' - e' s + e'')_i alone.
pub fn difference_noise_pmf(params: &SchemeParams, policy: &PrecisionPolicy) -> Result<Dist> {
    params.validate()?;
    check_final_support(
        2 * (2 * params.n as i64 * (params.k as i64).pow(2) + params.k as i64) + 1,
        policy,
    )?;
    product_cbd_pmf(params.k)?
        .self_convolve(2 * params.n as u64, policy)?
        .convolve(&cbd_pmf(params.k)?, policy)
}

/// Pmf of the dependent sum of one bit's m noise coefficients,
/// sum_l n*_{i + L l}: both cross terms decompose into L independent W's
/// each, so this is W^(*2L) (*) psi_k^(*m) (*) n_c^(*m).
pub fn sum_nstar_pmf(params: &SchemeParams, policy: &PrecisionPolicy) -> Result<Dist> {
    params.validate()?;
    let (m, k) = (params.reps as i64, params.k as i64);
    let wmax = m * k * (m * k);
    check_final_support(
        2 * (2 * params.msg_len as i64 * wmax + m * (k + params.max_compression_noise() as i64))
            + 1,
        policy,
    )?;
    let w = w_pmf(params, policy)?;
    let ws = w.self_convolve(2 * params.msg_len as u64, policy)?;
    let cbd_m = cbd_pmf(params.k)?.self_convolve(params.reps as u64, policy)?;
    let nc_m = compression_noise_pmf(params)?.self_convolve(params.reps as u64, policy)?;
    ws.convolve(&cbd_m, policy)?.convolve(&nc_m, policy)
}
