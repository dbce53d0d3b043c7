//! Arithmetic in Z_q[x]/(x^n + 1): negacyclic products in the modular and
//! integer domains, and ciphertext coefficient compression.

use crate::error::{Error, Result};
use crate::params::SchemeParams;

/// Ring element with every coefficient reduced to [0, q).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub coeffs: Vec<u32>,
}

/// Integer-coefficient vector over Z (noise and secrets live here).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedVec {
    pub coeffs: Vec<i64>,
}

/// Compressed ciphertext component: n symbols in [0, r).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedPoly {
    pub symbols: Vec<u32>,
}

impl Poly {
    pub fn new(coeffs: Vec<u32>) -> Self {
        Poly { coeffs }
    }

    pub fn zero(n: usize) -> Self {
        Poly { coeffs: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Reduce an integer vector into [0, q).
    pub fn from_signed(v: &SignedVec, q: u32) -> Self {
        Poly {
            coeffs: v
                .coeffs
                .iter()
                .map(|&x| x.rem_euclid(q as i64) as u32)
                .collect(),
        }
    }

    pub fn add(&self, other: &Poly, q: u32) -> Result<Poly> {
        check_len(self.len(), other.len())?;
        Ok(Poly {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| (a + b) % q)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Poly, q: u32) -> Result<Poly> {
        check_len(self.len(), other.len())?;
        Ok(Poly {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| (a + q - b) % q)
                .collect(),
        })
    }

    /// Centered representatives in [-floor(q/2), floor(q/2)].
    pub fn centered(&self, q: u32) -> SignedVec {
        SignedVec {
            coeffs: self.coeffs.iter().map(|&x| centered(x, q)).collect(),
        }
    }
}

impl SignedVec {
    pub fn new(coeffs: Vec<i64>) -> Self {
        SignedVec { coeffs }
    }

    pub fn zero(n: usize) -> Self {
        SignedVec { coeffs: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &SignedVec) -> Result<SignedVec> {
        check_len(self.len(), other.len())?;
        Ok(SignedVec {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &SignedVec) -> Result<SignedVec> {
        check_len(self.len(), other.len())?;
        Ok(SignedVec {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }
}

/// Centered representative of x mod q in [-floor(q/2), floor(q/2)].
pub fn centered(x: u32, q: u32) -> i64 {
    if x <= q / 2 {
        x as i64
    } else {
        x as i64 - q as i64
    }
}

/// Product in R_q = Z_q[x]/(x^n + 1), schoolbook O(n^2).
pub fn poly_mul(a: &Poly, b: &Poly, params: &SchemeParams) -> Result<Poly> {
    check_dims(a.len(), b.len(), params)?;
    let av: Vec<i64> = a.coeffs.iter().map(|&x| x as i64).collect();
    let bv: Vec<i64> = b.coeffs.iter().map(|&x| x as i64).collect();
    let c = negacyclic_product(&av, &bv);
    Ok(Poly {
        coeffs: c
            .iter()
            .map(|&x| x.rem_euclid(params.q as i64) as u32)
            .collect(),
    })
}

/// Product of a ring element with an integer vector, reduced into [0, q).
pub fn poly_mul_signed(a: &Poly, s: &SignedVec, params: &SchemeParams) -> Result<Poly> {
    check_dims(a.len(), s.len(), params)?;
    let av: Vec<i64> = a.coeffs.iter().map(|&x| x as i64).collect();
    let c = negacyclic_product(&av, &s.coeffs);
    Ok(Poly {
        coeffs: c
            .iter()
            .map(|&x| x.rem_euclid(params.q as i64) as u32)
            .collect(),
    })
}

/// Negacyclic correlation over Z (no modular reduction):
/// (e (.) s)_i = sum_j sign(i - j) e_j s_{(i-j) mod n}, sign(x) = 1 for
/// x >= 0 and -1 otherwise. Reduced mod q this equals the R_q product.
pub fn cyclic_shift_product(e: &SignedVec, s: &SignedVec) -> Result<SignedVec> {
    check_len(e.len(), s.len())?;
    if e.is_empty() {
        return Err(Error::InvalidParams("empty operands".into()));
    }
    Ok(SignedVec {
        coeffs: negacyclic_product(&e.coeffs, &s.coeffs),
    })
}

/// Shared negacyclic kernel. Callers keep |a_i| * |b_j| * n below i64
/// range; parameter validation caps n * q^2 well inside it. Inputs within
/// i32 take a widening-multiply fast path.
fn negacyclic_product(a: &[i64], b: &[i64]) -> Vec<i64> {
    let n = a.len();
    let fits = |v: &[i64]| {
        v.iter()
            .all(|&x| (i32::MIN as i64..=i32::MAX as i64).contains(&x))
    };
    if fits(a) && fits(b) {
        let a32: Vec<i32> = a.iter().map(|&x| x as i32).collect();
        let grev = reversed_sign_table(b, |x| x as i32);
        return (0..n)
            .map(|i| dot_i32(&a32, &grev[n - 1 - i..2 * n - 1 - i]))
            .collect();
    }
    let grev = reversed_sign_table(b, |x| x);
    (0..n)
        .map(|i| dot_i64(a, &grev[n - 1 - i..2 * n - 1 - i]))
        .collect()
}

/// sign(d) * b[d mod n] for d = i - j, reversed so that the inner loop of
/// the correlation is a contiguous forward dot product.
fn reversed_sign_table<T: Copy + std::ops::Neg<Output = T>>(
    b: &[i64],
    cast: impl Fn(i64) -> T,
) -> Vec<T> {
    let n = b.len();
    let mut grev = Vec::with_capacity(2 * n - 1);
    for t in 0..2 * n - 1 {
        let d = (2 * n - 2 - t) as i64 - (n as i64 - 1);
        let v = if d >= 0 {
            cast(b[d as usize])
        } else {
            -cast(b[(d + n as i64) as usize])
        };
        grev.push(v);
    }
    grev
}

fn dot_i32(x: &[i32], y: &[i32]) -> i64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = [0i64; 8];
    for (cx, cy) in x.chunks_exact(8).zip(y.chunks_exact(8)) {
        for l in 0..8 {
            acc[l] += cx[l] as i64 * cy[l] as i64;
        }
    }
    let mut s = acc.iter().sum::<i64>();
    let rem = x.len() / 8 * 8;
    for (a, b) in x[rem..].iter().zip(&y[rem..]) {
        s += *a as i64 * *b as i64;
    }
    s
}

fn dot_i64(x: &[i64], y: &[i64]) -> i64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = [0i64; 4];
    for (cx, cy) in x.chunks_exact(4).zip(y.chunks_exact(4)) {
        acc[0] += cx[0] * cy[0];
        acc[1] += cx[1] * cy[1];
        acc[2] += cx[2] * cy[2];
        acc[3] += cx[3] * cy[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    let rem = x.len() / 4 * 4;
    for (a, b) in x[rem..].iter().zip(&y[rem..]) {
        s += a * b;
    }
    s
}

/// Round half-up: floor(num/den + 1/2) for non-negative integers.
fn round_div(num: u64, den: u64) -> u64 {
    (2 * num + den) / (2 * den)
}

/// Single-coefficient compression round(x * r / q) mod r.
pub(crate) fn compress_coeff(x: u32, q: u32, r: u32) -> u32 {
    (round_div(x as u64 * r as u64, q as u64) % r as u64) as u32
}

/// Single-coefficient decompression round(h * q / r); always lands in [0, q).
pub(crate) fn decompress_coeff(h: u32, q: u32, r: u32) -> u32 {
    round_div(h as u64 * q as u64, r as u64) as u32
}

/// Coefficient compression h_i = round(v_i * r / q) mod r.
pub fn compress(v: &Poly, params: &SchemeParams) -> Result<CompressedPoly> {
    check_dims(v.len(), params.n, params)?;
    Ok(CompressedPoly {
        symbols: v
            .coeffs
            .iter()
            .map(|&x| compress_coeff(x, params.q, params.r))
            .collect(),
    })
}

/// Decompression v_i = round(h_i * q / r); outputs always lie in [0, q).
pub fn decompress(h: &CompressedPoly, params: &SchemeParams) -> Result<Poly> {
    check_dims(h.symbols.len(), params.n, params)?;
    let mut coeffs = Vec::with_capacity(h.symbols.len());
    for &sym in &h.symbols {
        if sym >= params.r {
            return Err(Error::InvalidParams(format!(
                "compressed symbol {sym} out of range [0, {})",
                params.r
            )));
        }
        let v = decompress_coeff(sym, params.q, params.r);
        debug_assert!(v < params.q);
        coeffs.push(v);
    }
    Ok(Poly { coeffs })
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::InvalidParams(format!("length mismatch: {a} vs {b}")));
    }
    Ok(())
}

fn check_dims(a: usize, b: usize, params: &SchemeParams) -> Result<()> {
    check_len(a, b)?;
    check_len(a, params.n)?;
    Ok(())
}
