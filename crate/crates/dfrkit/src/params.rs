//! Scheme parameters and the derived constants used throughout.

use serde::Serialize;

use crate::error::{Error, Result};

/// Parameter tuple (n, q, k, r, L, m) governing every computation.
///
/// `n` is the ring dimension, `q` the (odd prime) modulus, `k` the
/// centered-binomial noise parameter, `r` the ciphertext compression rate,
/// `msg_len` the message length L in bits and `reps` the repetition count
/// m = n / L of the threshold encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SchemeParams {
    pub n: usize,
    pub q: u32,
    pub k: u32,
    pub r: u32,
    pub msg_len: usize,
    pub reps: usize,
}

impl SchemeParams {
    /// Build and validate a parameter set; `reps` is derived as n / msg_len.
    pub fn new(n: usize, q: u32, k: u32, r: u32, msg_len: usize) -> Result<Self> {
        if msg_len == 0 || n == 0 || n % msg_len != 0 {
            return Err(Error::InvalidParams(format!(
                "n = {n} must be a positive multiple of L = {msg_len}"
            )));
        }
        let p = SchemeParams {
            n,
            q,
            k,
            r,
            msg_len,
            reps: n / msg_len,
        };
        p.validate()?;
        Ok(p)
    }

    /// The (n = 1024, q = 12289, k = 8, r = 8, L = 256, m = 4) preset.
    pub fn newhope1024() -> Self {
        SchemeParams {
            n: 1024,
            q: 12289,
            k: 8,
            r: 8,
            msg_len: 256,
            reps: 4,
        }
    }

    /// The (n = 512, q = 12289, k = 8, r = 8, L = 256, m = 2) preset.
    pub fn newhope512() -> Self {
        SchemeParams {
            n: 512,
            q: 12289,
            k: 8,
            r: 8,
            msg_len: 256,
            reps: 2,
        }
    }

    /// Small preset (n = 8, q = 17, k = 1, r = 4, L = 2, m = 4) for
    /// exhaustive oracles and cheap simulation.
    pub fn toy() -> Self {
        SchemeParams {
            n: 8,
            q: 17,
            k: 1,
            r: 4,
            msg_len: 2,
            reps: 4,
        }
    }

    /// Same parameter set with a different noise parameter.
    pub fn with_k(mut self, k: u32) -> Self {
        self.k = k;
        self
    }

    /// Same parameter set with a different compression rate.
    pub fn with_r(mut self, r: u32) -> Self {
        self.r = r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        if self.n == 0 || self.msg_len == 0 || self.reps == 0 {
            return fail("n, L and m must be positive".into());
        }
        if self.n != self.msg_len * self.reps {
            return fail(format!(
                "n = {} but L * m = {}",
                self.n,
                self.msg_len * self.reps
            ));
        }
        if self.q < 3 || self.q % 2 == 0 || !is_prime(self.q) {
            return fail(format!("q = {} must be an odd prime", self.q));
        }
        if self.q > 1 << 20 || self.n > 1 << 20 {
            return fail("q and n are limited to 2^20".into());
        }
        if self.k == 0 || self.k > 64 {
            return fail(format!("k = {} must be in [1, 64]", self.k));
        }
        // r = q is allowed as the lossless-compression degenerate case.
        if !(2..=self.q).contains(&self.r) || !(self.r.is_power_of_two() || self.r == self.q) {
            return fail(format!(
                "r = {} must be a power of two in [2, q] (or equal to q)",
                self.r
            ));
        }
        Ok(())
    }

    /// Largest centered representative, floor(q / 2).
    pub fn q_half(&self) -> u32 {
        self.q / 2
    }

    /// Integer decision threshold of the repetition decoder.
    ///
    /// The decoder compares an integer distance sum against
    /// T_m = (m/2) * floor(q/2); since the sums are integers the effective
    /// threshold is ceil(T_m), which equals T_m whenever m is even.
    pub fn decision_threshold(&self) -> u64 {
        (self.reps as u64 * self.q_half() as u64).div_ceil(2)
    }

    /// Largest possible decoder sum, 2 * T_m = m * floor(q/2).
    pub fn max_decoder_sum(&self) -> u64 {
        self.reps as u64 * self.q_half() as u64
    }

    /// The bit-error window [ceil(T_m), 2*T_m] on the summed noise.
    pub fn error_window(&self) -> (i64, i64) {
        (
            self.decision_threshold() as i64,
            self.max_decoder_sum() as i64,
        )
    }

    /// Worst-case magnitude of a single compression-noise coefficient,
    /// floor(q / 2r).
    pub fn max_compression_noise(&self) -> u32 {
        self.q / (2 * self.r)
    }

    /// Bits needed to transmit the ciphertext (u, h): n coefficients at
    /// ceil(log2 q) bits plus n compressed symbols at ceil(log2 r) bits.
    pub fn ciphertext_bits(&self) -> u64 {
        let qb = 32 - (self.q - 1).leading_zeros();
        let rb = 32 - (self.r - 1).leading_zeros();
        self.n as u64 * (qb as u64 + rb as u64)
    }

    /// Ciphertext size reduction in percent relative to the r = 8 baseline.
    pub fn ciphertext_reduction_pct(&self) -> f64 {
        let base = self.with_r(8).ciphertext_bits() as f64;
        100.0 * (1.0 - self.ciphertext_bits() as f64 / base)
    }
}

fn is_prime(x: u32) -> bool {
    if x < 2 {
        return false;
    }
    if x % 2 == 0 {
        return x == 2;
    }
    let mut d = 3u32;
    while (d as u64) * (d as u64) <= x as u64 {
        if x % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}
