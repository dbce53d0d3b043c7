//! dfrkit: decryption-failure-rate analysis for a Ring-LWE encryption core.
//!
//! The crate bundles an algorithmic-level implementation of the
//! NewHope-style CPA scheme (ring arithmetic, threshold coding, compression)
//! with the numerical machinery to analyse its failure behaviour: exact
//! discrete-distribution convolution with discarded-mass accounting,
//! dependency-aware and Chernoff-parameterized DFR upper bounds, the
//! independence baseline, Monte-Carlo simulation, and Renyi-divergence
//! comparison of the noise distribution against its rounded-Gaussian
//! counterpart.
//!
//! Start from [`params::SchemeParams`] and the `examples/` directory; the
//! `dfrkit` binary exposes the same analyses as subcommands.

pub mod ate;
pub mod bounds;
pub mod cli;
pub mod dist;
pub mod error;
pub mod mc;
pub mod noise;
pub mod params;
pub mod pke;
pub mod renyi;
pub mod ring;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use params::SchemeParams;
