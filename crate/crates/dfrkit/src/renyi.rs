//! Renyi divergence between the centered binomial distribution and the
//! rounded Gaussian of equal variance k/2.

use serde::Serialize;
use statrs::function::erf::{erf, erfc};

use crate::dist::{cbd_pmf, Dist};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RenyiResult {
    pub k: u32,
    pub a: f64,
    pub divergence: f64,
}

/// Pmf of round(sqrt(k/2) * X) for standard normal X, materialized on
/// [-k, k]; the folded tail mass beyond that window is tracked in `err`.
pub fn rounded_gaussian_pmf(k: u32) -> Result<Dist> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be >= 1".into()));
    }
    let sigma = (k as f64 / 2.0).sqrt();
    let z = |x: f64| x / (sigma * std::f64::consts::SQRT_2);
    let cell = |x: i64| -> f64 {
        let lo = x as f64 - 0.5;
        let hi = x as f64 + 0.5;
        if lo >= 0.0 {
            0.5 * (erfc(z(lo)) - erfc(z(hi)))
        } else if hi <= 0.0 {
            0.5 * (erfc(z(-hi)) - erfc(z(-lo)))
        } else {
            0.5 * (erf(z(hi)) - erf(z(lo)))
        }
    };
    let masses: Vec<f64> = (-(k as i64)..=k as i64).map(cell).collect();
    let tail = erfc(z(k as f64 + 0.5)); // both tails together
    Dist::from_masses(-(k as i64), masses, tail)
}

/// R_a(P || Q) = ( sum_{x in sup(P)} P(x)^a / Q(x)^(a-1) )^(1/(a-1)).
///
/// The sum runs over the support of P only; Q must be positive there.
pub fn renyi_divergence(p: &Dist, q: &Dist, a: f64) -> Result<f64> {
    if !a.is_finite() || a <= 1.0 {
        return Err(Error::Domain(format!("order a = {a} must be a real > 1")));
    }
    let mut sum = 0.0;
    for (i, &px) in p.masses().iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        let x = p.offset() + i as i64;
        let qx = q.prob(x);
        if qx <= 0.0 {
            return Err(Error::Domain(format!(
                "Q vanishes at x = {x} inside sup(P)"
            )));
        }
        sum += (a * px.ln() - (a - 1.0) * qx.ln()).exp();
    }
    Ok(sum.powf(1.0 / (a - 1.0)))
}

/// Divergence of psi_k from the equal-variance rounded Gaussian across a
/// range of k.
pub fn renyi_sweep(k_min: u32, k_max: u32, a: f64) -> Result<Vec<RenyiResult>> {
    if k_min == 0 || k_min > k_max {
        return Err(Error::InvalidParams(format!(
            "bad k range [{k_min}, {k_max}]"
        )));
    }
    (k_min..=k_max)
        .map(|k| {
            let divergence = renyi_divergence(&cbd_pmf(k)?, &rounded_gaussian_pmf(k)?, a)?;
            Ok(RenyiResult { k, a, divergence })
        })
        .collect()
}
