//! Deterministic randomness: seeded counter-based streams and the samplers
//! for the uniform and centered binomial distributions.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::params::SchemeParams;
use crate::ring::{Poly, SignedVec};

/// A reproducible randomness source: a 256-bit seed plus a stream id.
///
/// Identical (seed, stream) pairs always produce identical output
/// sequences, so concurrent users (e.g. parallel trials) take distinct
/// stream ids from the same seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngSpec {
    pub seed: [u8; 32],
    pub stream: u64,
}

impl RngSpec {
    pub fn new(seed: [u8; 32], stream: u64) -> Self {
        RngSpec { seed, stream }
    }

    /// Spread a small integer seed into the 256-bit seed (little-endian).
    pub fn from_u64(seed: u64) -> Self {
        let mut s = [0u8; 32];
        s[..8].copy_from_slice(&seed.to_le_bytes());
        RngSpec { seed: s, stream: 0 }
    }

    pub fn with_stream(&self, stream: u64) -> Self {
        RngSpec {
            seed: self.seed,
            stream,
        }
    }

    /// Instantiate the generator for this (seed, stream).
    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::from_seed(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    pub fn seed_hex(&self) -> String {
        self.seed.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// One draw from the centered binomial distribution with parameter k:
/// the difference of two k-bit popcounts, giving values in [-k, k].
pub fn sample_cbd(k: u32, rng: &mut impl RngCore) -> i32 {
    debug_assert!((1..=64).contains(&k));
    let (b0, b1) = if k <= 32 {
        let x = rng.next_u64();
        let mask = (1u64 << k) - 1;
        ((x & mask).count_ones(), ((x >> k) & mask).count_ones())
    } else {
        let mask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        (
            (rng.next_u64() & mask).count_ones(),
            (rng.next_u64() & mask).count_ones(),
        )
    };
    b0 as i32 - b1 as i32
}

/// Unbiased uniform draw from [0, q) by rejection sampling.
pub fn sample_uniform_mod(q: u32, rng: &mut impl RngCore) -> u32 {
    let zone = (1u64 << 32) / q as u64 * q as u64;
    loop {
        let x = rng.next_u32();
        if (x as u64) < zone {
            return x % q;
        }
    }
}

/// A length-n vector of i.i.d. centered binomial coefficients.
pub fn sample_cbd_vec(params: &SchemeParams, rng: &mut impl RngCore) -> SignedVec {
    SignedVec::new(
        (0..params.n)
            .map(|_| sample_cbd(params.k, rng) as i64)
            .collect(),
    )
}

/// A uniform ring element with coefficients in [0, q).
pub fn sample_uniform_poly(params: &SchemeParams, rng: &mut impl RngCore) -> Poly {
    Poly::new(
        (0..params.n)
            .map(|_| sample_uniform_mod(params.q, rng))
            .collect(),
    )
}

/// Validate that the sampler can serve this parameter set.
pub fn check_sampleable(params: &SchemeParams) -> Result<()> {
    if params.k == 0 || params.k > 64 {
        return Err(Error::InvalidParams(format!(
            "k = {} outside sampler range",
            params.k
        )));
    }
    Ok(())
}
