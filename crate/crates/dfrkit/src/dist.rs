//! Finite discrete distributions over the integers with rigorous
//! discarded-mass accounting.
//!
//! Masses are kept in linear-domain f64. Everything the toolkit reports as
//! an upper bound is `value + err`, where `err` upper-bounds all mass ever
//! discarded (pruned edges, underflowed products), so pruning can only
//! loosen a bound, never invalidate it.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::SchemeParams;
use crate::ring;

/// Smallest positive f64; one lost product can hide at most this much mass.
const ULP_FLOOR: f64 = f64::MIN_POSITIVE * f64::EPSILON; // 2^-1074

/// Knobs for the convolution engine.
#[derive(Debug, Clone, Copy)]
pub struct PrecisionPolicy {
    /// Masses below this are trimmed from the support edges and added to
    /// `err`. 0 keeps everything (exact zeros are always trimmed).
    pub prune_threshold: f64,
    /// Allowed deviation of (total mass + err) from 1.
    pub mass_tolerance: f64,
    /// Hard cap on materialized support size per distribution.
    pub max_support: usize,
    /// Permit repetition counts outside {2, 4} in the decomposition-based
    /// constructions (the sign patterns are an extrapolation there).
    pub allow_nonstandard_m: bool,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            prune_threshold: 0.0,
            mass_tolerance: 1e-9,
            max_support: 1 << 26,
            allow_nonstandard_m: false,
        }
    }
}

impl PrecisionPolicy {
    pub fn with_prune(mut self, threshold: f64) -> Self {
        self.prune_threshold = threshold;
        self
    }

    pub fn with_nonstandard_m(mut self, allow: bool) -> Self {
        self.allow_nonstandard_m = allow;
        self
    }
}

/// A probability mass function on a contiguous integer support.
#[derive(Debug, Clone)]
pub struct Dist {
    offset: i64,
    masses: Vec<f64>,
    err: f64,
}

impl Dist {
    /// Point mass at `v`.
    pub fn delta(v: i64) -> Dist {
        Dist {
            offset: v,
            masses: vec![1.0],
            err: 0.0,
        }
    }

    pub fn from_masses(offset: i64, masses: Vec<f64>, err: f64) -> Result<Dist> {
        if masses.is_empty() {
            return Err(Error::InvalidParams("empty support".into()));
        }
        if masses.iter().any(|&m| !m.is_finite() || m < 0.0) || !err.is_finite() || err < 0.0 {
            return Err(Error::InvalidParams(
                "masses must be finite and non-negative".into(),
            ));
        }
        let d = Dist {
            offset,
            masses,
            err,
        };
        d.check_normalized(1e-9)?;
        Ok(d)
    }

    /// Value of the first support point.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Inclusive support bounds (min value, max value).
    pub fn support(&self) -> (i64, i64) {
        (self.offset, self.offset + self.masses.len() as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Upper bound on all discarded / underflowed mass.
    pub fn err(&self) -> f64 {
        self.err
    }

    pub fn prob(&self, x: i64) -> f64 {
        let i = x - self.offset;
        if i < 0 || i >= self.masses.len() as i64 {
            0.0
        } else {
            self.masses[i as usize]
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.masses
            .iter()
            .enumerate()
            .map(|(i, &m)| (self.offset + i as i64) as f64 * m)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.masses
            .iter()
            .enumerate()
            .map(|(i, &m)| {
                let d = (self.offset + i as i64) as f64 - mu;
                d * d * m
            })
            .sum()
    }

    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let t = self.total_mass() + self.err;
        if !(t - 1.0).abs().is_finite() || (t - 1.0).abs() > tol {
            return Err(Error::Numerical(format!(
                "mass + err = {t} deviates from 1 beyond tolerance {tol}"
            )));
        }
        Ok(())
    }

    /// Exact comparison of index-mirrored masses, within a relative bound.
    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let (lo, hi) = self.support();
        if lo != -hi {
            return false;
        }
        let n = self.masses.len();
        (0..n / 2 + 1).all(|i| {
            let (a, b) = (self.masses[i], self.masses[n - 1 - i]);
            (a - b).abs() <= rel_tol * a.abs().max(b.abs())
        })
    }

    /// Exact direct convolution (sum of independent variables).
    pub fn convolve(&self, other: &Dist, policy: &PrecisionPolicy) -> Result<Dist> {
        let (a, b) = if self.masses.len() >= other.masses.len() {
            (self, other)
        } else {
            (other, self)
        };
        let (la, lb) = (a.masses.len(), b.masses.len());
        let out_len = la + lb - 1;
        if out_len > policy.max_support {
            return Err(Error::Numerical(format!(
                "convolution support {out_len} exceeds limit {}",
                policy.max_support
            )));
        }
        let brev: Vec<f64> = b.masses.iter().rev().copied().collect();
        let mut out = vec![0.0f64; out_len];
        let fill = |i: usize| -> f64 {
            // out[i] = sum_j a[j] * b[i-j]; the reversed copy of b makes the
            // inner loop a contiguous forward dot product.
            let j0 = i.saturating_sub(lb - 1);
            let j1 = (la - 1).min(i);
            let shift = lb - 1 + j0;
            dot(&a.masses[j0..=j1], &brev[shift - i..=shift - i + (j1 - j0)])
        };
        if la as u64 * lb as u64 > 1 << 22 {
            out.par_iter_mut()
                .enumerate()
                .with_min_len(1 << 12)
                .for_each(|(i, slot)| *slot = fill(i));
        } else {
            for (i, slot) in out.iter_mut().enumerate() {
                *slot = fill(i);
            }
        }
        // every product that underflowed hides at most one ulp of mass
        let underflow = la as f64 * lb as f64 * ULP_FLOOR;
        let d = Dist {
            offset: a.offset + b.offset,
            masses: out,
            err: a.err + b.err + underflow,
        };
        let d = d.trimmed(policy.prune_threshold);
        d.check_normalized(policy.mass_tolerance)?;
        Ok(d)
    }

    /// Distribution of the sum of `count` independent copies, by binary
    /// doubling (square-and-multiply over the convolution monoid).
    pub fn self_convolve(&self, count: u64, policy: &PrecisionPolicy) -> Result<Dist> {
        if count == 0 {
            return Err(Error::InvalidParams(
                "self_convolve needs count >= 1".into(),
            ));
        }
        let mut result: Option<Dist> = None;
        let mut base = self.clone();
        let mut c = count;
        loop {
            if c & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.convolve(&base, policy)?,
                });
            }
            c >>= 1;
            if c == 0 {
                break;
            }
            base = base.convolve(&base, policy)?;
        }
        Ok(result.expect("count >= 1"))
    }

    /// Pmf of c * X. c = 0 collapses to a point mass at 0.
    pub fn scale_support(&self, c: i64) -> Dist {
        if c == 0 {
            return Dist {
                offset: 0,
                masses: vec![self.total_mass()],
                err: self.err,
            };
        }
        let stride = c.unsigned_abs() as usize;
        let new_len = (self.masses.len() - 1)
            .checked_mul(stride)
            .and_then(|v| v.checked_add(1))
            .expect("scaled support overflows usize");
        let mut masses = vec![0.0; new_len];
        let (lo, hi) = self.support();
        let offset = if c > 0 { c * lo } else { c * hi };
        for (i, &m) in self.masses.iter().enumerate() {
            let v = c * (lo + i as i64);
            masses[(v - offset) as usize] = m;
        }
        Dist {
            offset,
            masses,
            err: self.err,
        }
    }

    /// Total mass on [lo, hi] plus the one-sided uncertainty `err`.
    ///
    /// Callers computing upper bounds must report `value + err`.
    pub fn window_prob(&self, lo: i64, hi: i64) -> (f64, f64) {
        if lo > hi {
            return (0.0, self.err);
        }
        let (slo, shi) = self.support();
        let from = lo.max(slo);
        let to = hi.min(shi);
        if from > to {
            return (0.0, self.err);
        }
        let i0 = (from - self.offset) as usize;
        let i1 = (to - self.offset) as usize;
        (self.masses[i0..=i1].iter().sum(), self.err)
    }

    /// Pr(|X| > thr) plus the one-sided uncertainty `err`.
    pub fn two_sided_tail(&self, thr: i64) -> (f64, f64) {
        let (slo, shi) = self.support();
        let (lo, _) = self.window_prob(slo, -thr - 1);
        let (hi, _) = self.window_prob(thr + 1, shi);
        (lo + hi, self.err)
    }

    /// CSV dump: an `# err=` comment line, a `value,prob` header, then one
    /// row per support point with >= 17 significant digits.
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "# err={:.17e}", self.err)?;
        writeln!(w, "value,prob")?;
        for (i, &m) in self.masses.iter().enumerate() {
            writeln!(w, "{},{:.17e}", self.offset + i as i64, m)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("csv is ascii")
    }

    /// Trim exact-zero edges (free) and, when a threshold is set, prune
    /// sub-threshold edges into `err`.
    pub(crate) fn trimmed(mut self, threshold: f64) -> Dist {
        let below = |m: f64| m == 0.0 || m < threshold;
        let mut lo = 0usize;
        let mut hi = self.masses.len() - 1;
        let mut pruned = 0.0;
        while lo < hi && below(self.masses[lo]) {
            pruned += self.masses[lo];
            lo += 1;
        }
        while hi > lo && below(self.masses[hi]) {
            pruned += self.masses[hi];
            hi -= 1;
        }
        if lo > 0 || hi + 1 < self.masses.len() {
            self.masses = self.masses[lo..=hi].to_vec();
            self.offset += lo as i64;
            self.err += pruned;
        }
        self
    }
}

/// Fixed-order dot product (four independent accumulators), so results do
/// not depend on chunking or thread count.
fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let n4 = x.len() / 4 * 4;
    let mut acc = [0.0f64; 4];
    let mut i = 0;
    while i < n4 {
        acc[0] += x[i] * y[i];
        acc[1] += x[i + 1] * y[i + 1];
        acc[2] += x[i + 2] * y[i + 2];
        acc[3] += x[i + 3] * y[i + 3];
        i += 4;
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    while i < x.len() {
        s += x[i] * y[i];
        i += 1;
    }
    s
}

/// Exact pmf of the centered binomial distribution psi_k:
/// P(x) = C(2k, x + k) / 4^k on [-k, k].
pub fn cbd_pmf(k: u32) -> Result<Dist> {
    if k == 0 || k > 64 {
        return Err(Error::InvalidParams(format!("k = {k} must be in [1, 64]")));
    }
    let n = 2 * k as usize;
    let mut masses = vec![0.0f64; n + 1];
    masses[0] = 0.25f64.powi(k as i32);
    for i in 1..=n {
        masses[i] = masses[i - 1] * (n - i + 1) as f64 / i as f64;
    }
    Dist::from_masses(-(k as i64), masses, 0.0)
}

/// Exact pmf of X * Y for X, Y i.i.d. psi_k; support within [-k^2, k^2].
pub fn product_cbd_pmf(k: u32) -> Result<Dist> {
    let base = cbd_pmf(k)?;
    let kk = (k * k) as i64;
    let mut masses = vec![0.0f64; (2 * kk + 1) as usize];
    for (i, &pi) in base.masses().iter().enumerate() {
        let x = base.offset() + i as i64;
        for (j, &pj) in base.masses().iter().enumerate() {
            let y = base.offset() + j as i64;
            masses[(x * y + kk) as usize] += pi * pj;
        }
    }
    Ok(Dist {
        offset: -kk,
        masses,
        err: 0.0,
    }
    .trimmed(0.0))
}

/// Exact pmf of the centered compression round-trip error
/// decompress(compress(X)) - X for X uniform on [0, q), by exhaustive
/// enumeration of all q inputs. Support stays within [-floor(q/2r), floor(q/2r)].
pub fn compression_noise_pmf(params: &SchemeParams) -> Result<Dist> {
    params.validate()?;
    let bound = params.max_compression_noise() as i64;
    let mut masses = vec![0.0f64; (2 * bound + 1) as usize];
    let w = 1.0 / params.q as f64;
    for v in 0..params.q {
        let d = ring::decompress_coeff(
            ring::compress_coeff(v, params.q, params.r),
            params.q,
            params.r,
        );
        let noise = ring::centered((d + params.q - v) % params.q, params.q);
        debug_assert!(noise.abs() <= bound);
        masses[(noise + bound) as usize] += w;
    }
    Ok(Dist {
        offset: -bound,
        masses,
        err: 0.0,
    }
    .trimmed(0.0))
}
