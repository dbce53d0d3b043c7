//! Additive threshold encoding: m-fold repetition of each message bit onto
//! {0, floor(q/2)} and distance-sum threshold decoding.

use crate::error::{Error, Result};
use crate::params::SchemeParams;
use crate::ring::Poly;

/// An L-bit message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageBits {
    pub bits: Vec<u8>,
}

impl MessageBits {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidParams("message bits must be 0 or 1".into()));
        }
        Ok(MessageBits { bits })
    }

    pub fn zeros(l: usize) -> Self {
        MessageBits { bits: vec![0; l] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Decoder forensics: the raw distance sums and the threshold they were
/// compared against.
#[derive(Debug, Clone)]
pub struct DecodeTrace {
    /// Distance sums mu'_{s,i} = sum_l |v_{i + L l} - floor(q/2)|, one per bit.
    pub sums: Vec<u64>,
    /// Effective integer threshold ceil(T_m) with T_m = (m/2) floor(q/2);
    /// exact whenever m is even. Sums at or above it decode to 0.
    pub threshold: u64,
}

/// Spread each bit over its m repetition slots: v_{i + L l} = mu_i * floor(q/2).
pub fn ate_encode(mu: &MessageBits, params: &SchemeParams) -> Result<Poly> {
    if mu.len() != params.msg_len {
        return Err(Error::InvalidParams(format!(
            "message length {} != L = {}",
            mu.len(),
            params.msg_len
        )));
    }
    let mut v = Poly::zero(params.n);
    for (i, &bit) in mu.bits.iter().enumerate() {
        for l in 0..params.reps {
            v.coeffs[i + params.msg_len * l] = bit as u32 * params.q_half();
        }
    }
    Ok(v)
}

/// Threshold decoding of a (noisy) ring element.
///
/// Each bit's statistic sums the integer distances |v_i - floor(q/2)| over
/// its m repetition slots; sums at or above the threshold decode to 0,
/// below it to 1. The raw sums are returned for forensics.
pub fn ate_decode(v2: &Poly, params: &SchemeParams) -> Result<(MessageBits, DecodeTrace)> {
    if v2.len() != params.n {
        return Err(Error::InvalidParams(format!(
            "ring element length {} != n = {}",
            v2.len(),
            params.n
        )));
    }
    let qh = params.q_half() as i64;
    let threshold = params.decision_threshold();
    let mut sums = vec![0u64; params.msg_len];
    for (i, sum) in sums.iter_mut().enumerate() {
        for l in 0..params.reps {
            let c = (v2.coeffs[i + params.msg_len * l] % params.q) as i64;
            *sum += (c - qh).unsigned_abs();
        }
    }
    let bits = sums.iter().map(|&s| u8::from(s < threshold)).collect();
    Ok((MessageBits { bits }, DecodeTrace { sums, threshold }))
}
