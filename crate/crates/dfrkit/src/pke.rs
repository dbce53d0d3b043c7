//! The CPA public-key encryption core at algorithmic level: keygen,
//! encrypt (threshold-encode + compress) and decrypt (decompress +
//! threshold-decode), plus full per-trial traces for noise forensics.

use rand::RngCore;

use crate::ate::{self, DecodeTrace, MessageBits};
use crate::error::{Error, Result};
use crate::params::SchemeParams;
use crate::ring::{
    compress, cyclic_shift_product, decompress, poly_mul_signed, CompressedPoly, Poly, SignedVec,
};
use crate::rng;

/// Key material. `a` and `b` are public; `s` is the decryption key and `e`
/// is retained only so traces can verify the noise identity.
#[derive(Debug, Clone)]
pub struct KeyPair {
    pub a: Poly,
    pub b: Poly,
    pub s: SignedVec,
    pub e: SignedVec,
}

#[derive(Debug, Clone)]
pub struct Ciphertext {
    pub u: Poly,
    pub h: CompressedPoly,
}

/// Everything the encryptor knows that the noise analysis needs.
#[derive(Debug, Clone)]
pub struct EncryptTrace {
    pub s_prime: SignedVec,
    pub e_prime: SignedVec,
    pub e_dprime: SignedVec,
    pub mu: MessageBits,
    /// Encoded message v.
    pub v: Poly,
    /// Pre-compression ciphertext component v' = b s' + e'' + v.
    pub v_prime: Poly,
    /// Centered compression noise decompress(h) - v'.
    pub n_c: SignedVec,
}

/// One protocol run's secrets, noises and intermediate values.
#[derive(Debug, Clone)]
pub struct TrialTrace {
    pub s: SignedVec,
    pub s_prime: SignedVec,
    pub e: SignedVec,
    pub e_prime: SignedVec,
    pub e_dprime: SignedVec,
    pub mu: MessageBits,
    pub v: Poly,
    pub v_prime: Poly,
    /// Decryption statistic v'' = decompress(h) - u s.
    pub v_dprime: Poly,
    /// Centered compression noise.
    pub n_c: SignedVec,
    /// Centered total noise v'' - v.
    pub n_t: SignedVec,
}

/// Sample a = uniform, s, e coefficient-wise centered binomial, b = a s + e.
pub fn keygen(params: &SchemeParams, rng: &mut impl RngCore) -> Result<KeyPair> {
    params.validate()?;
    rng::check_sampleable(params)?;
    let a = rng::sample_uniform_poly(params, rng);
    let s = rng::sample_cbd_vec(params, rng);
    let e = rng::sample_cbd_vec(params, rng);
    keygen_from_secrets(a, s, e, params)
}

/// Deterministic keygen core; useful for zero-noise and adversarial tests.
pub fn keygen_from_secrets(
    a: Poly,
    s: SignedVec,
    e: SignedVec,
    params: &SchemeParams,
) -> Result<KeyPair> {
    let b = poly_mul_signed(&a, &s, params)?.add(&Poly::from_signed(&e, params.q), params.q)?;
    Ok(KeyPair { a, b, s, e })
}

/// Encrypt an L-bit message under the public key (a, b).
pub fn encrypt(
    a: &Poly,
    b: &Poly,
    mu: &MessageBits,
    params: &SchemeParams,
    rng: &mut impl RngCore,
) -> Result<(Ciphertext, EncryptTrace)> {
    let s_prime = rng::sample_cbd_vec(params, rng);
    let e_prime = rng::sample_cbd_vec(params, rng);
    let e_dprime = rng::sample_cbd_vec(params, rng);
    encrypt_from_secrets(a, b, mu, s_prime, e_prime, e_dprime, params)
}

/// Deterministic encryption core with explicit noise vectors.
pub fn encrypt_from_secrets(
    a: &Poly,
    b: &Poly,
    mu: &MessageBits,
    s_prime: SignedVec,
    e_prime: SignedVec,
    e_dprime: SignedVec,
    params: &SchemeParams,
) -> Result<(Ciphertext, EncryptTrace)> {
    if mu.len() != params.msg_len {
        return Err(Error::InvalidParams(format!(
            "message length {} != L = {}",
            mu.len(),
            params.msg_len
        )));
    }
    let u = poly_mul_signed(a, &s_prime, params)?
        .add(&Poly::from_signed(&e_prime, params.q), params.q)?;
    let v = ate::ate_encode(mu, params)?;
    let v_prime = poly_mul_signed(b, &s_prime, params)?
        .add(&Poly::from_signed(&e_dprime, params.q), params.q)?
        .add(&v, params.q)?;
    let h = compress(&v_prime, params)?;
    let n_c = decompress(&h, params)?
        .sub(&v_prime, params.q)?
        .centered(params.q);
    let trace = EncryptTrace {
        s_prime,
        e_prime,
        e_dprime,
        mu: mu.clone(),
        v,
        v_prime,
        n_c,
    };
    Ok((Ciphertext { u, h }, trace))
}

/// The decryption statistic v'' = decompress(h) - u s (mod q).
pub fn decryption_statistic(s: &SignedVec, ct: &Ciphertext, params: &SchemeParams) -> Result<Poly> {
    decompress(&ct.h, params)?.sub(&poly_mul_signed(&ct.u, s, params)?, params.q)
}

/// Recover the message by threshold-decoding v''.
pub fn decrypt(
    s: &SignedVec,
    ct: &Ciphertext,
    params: &SchemeParams,
) -> Result<(MessageBits, DecodeTrace)> {
    ate::ate_decode(&decryption_statistic(s, ct, params)?, params)
}

impl TrialTrace {
    /// Assemble the full trace of one protocol run.
    pub fn assemble(
        kp: &KeyPair,
        enc: EncryptTrace,
        ct: &Ciphertext,
        params: &SchemeParams,
    ) -> Result<TrialTrace> {
        let v_dprime = decryption_statistic(&kp.s, ct, params)?;
        let n_t = v_dprime.sub(&enc.v, params.q)?.centered(params.q);
        Ok(TrialTrace {
            s: kp.s.clone(),
            s_prime: enc.s_prime,
            e: kp.e.clone(),
            e_prime: enc.e_prime,
            e_dprime: enc.e_dprime,
            mu: enc.mu,
            v: enc.v,
            v_prime: enc.v_prime,
            v_dprime,
            n_c: enc.n_c,
            n_t,
        })
    }
}

/// Centered total noise (v'' - v) mod q, cross-checked coefficient-wise
/// against the algebraic decomposition e s' - e' s + e'' + n_c.
pub fn extract_noise(trace: &TrialTrace, params: &SchemeParams) -> Result<SignedVec> {
    let direct = trace.v_dprime.sub(&trace.v, params.q)?.centered(params.q);
    let alg = integer_noise(trace)?;
    let reduced = Poly::from_signed(&alg, params.q).centered(params.q);
    if direct != reduced {
        return Err(Error::Integrity(
            "total-noise decomposition mismatch between direct and algebraic routes".into(),
        ));
    }
    Ok(direct)
}

/// The pre-wraparound integer noise n*, i.e. e s' - e' s + e'' + n_c over Z.
pub fn integer_noise(trace: &TrialTrace) -> Result<SignedVec> {
    cyclic_shift_product(&trace.e, &trace.s_prime)?
        .sub(&cyclic_shift_product(&trace.e_prime, &trace.s)?)?
        .add(&trace.e_dprime)?
        .add(&trace.n_c)
}

/// Run one full keygen/encrypt/decrypt cycle and report the decoded bits
/// alongside the assembled trace.
pub fn run_trial(
    params: &SchemeParams,
    mu: &MessageBits,
    rng: &mut impl RngCore,
) -> Result<(MessageBits, DecodeTrace, TrialTrace)> {
    let kp = keygen(params, rng)?;
    let (ct, enc) = encrypt(&kp.a, &kp.b, mu, params, rng)?;
    let (decoded, dec_trace) = decrypt(&kp.s, &ct, params)?;
    let trace = TrialTrace::assemble(&kp, enc, &ct, params)?;
    Ok((decoded, dec_trace, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSpec;
    use rand::Rng;

    fn random_message(l: usize, rng: &mut impl Rng) -> MessageBits {
        MessageBits::new((0..l).map(|_| rng.gen_range(0..2u8)).collect()).unwrap()
    }

    #[test]
    fn keygen_is_reproducible_and_consistent() {
        let p = SchemeParams::newhope512();
        let spec = RngSpec::from_u64(100);
        let kp1 = keygen(&p, &mut spec.rng()).unwrap();
        let kp2 = keygen(&p, &mut spec.rng()).unwrap();
        assert_eq!(kp1.a, kp2.a);
        assert_eq!(kp1.b, kp2.b);
        assert_eq!(kp1.s, kp2.s);
        // b - a s = e (mod q)
        let residual = kp1
            .b
            .sub(&poly_mul_signed(&kp1.a, &kp1.s, &p).unwrap(), p.q)
            .unwrap();
        assert_eq!(residual, Poly::from_signed(&kp1.e, p.q));
    }

    #[test]
    fn zero_noise_roundtrip_recovers_exactly() {
        // All noise forced to zero and r = q makes compression lossless.
        let p = SchemeParams::new(8, 17, 1, 17, 2).unwrap();
        let mut rng = RngSpec::from_u64(101).rng();
        for _ in 0..50 {
            let a = crate::rng::sample_uniform_poly(&p, &mut rng);
            // secret must be invertible enough for decryption to cancel; with
            // zero noise any s works since u s is recomputed exactly.
            let s = crate::rng::sample_cbd_vec(&p, &mut rng);
            let kp = keygen_from_secrets(a, s, SignedVec::zero(8), &p).unwrap();
            let mu = random_message(2, &mut rng);
            let sp = crate::rng::sample_cbd_vec(&p, &mut rng);
            let (ct, _) = encrypt_from_secrets(
                &kp.a,
                &kp.b,
                &mu,
                sp,
                SignedVec::zero(8),
                SignedVec::zero(8),
                &p,
            )
            .unwrap();
            let (dec, _) = decrypt(&kp.s, &ct, &p).unwrap();
            assert_eq!(dec, mu);
        }
    }

    #[test]
    fn official_roundtrips_never_fail() {
        // At the official parameters the failure rate is astronomically
        // small, so 10^3 random roundtrips must all succeed.
        let p = SchemeParams::newhope512();
        let mut rng = RngSpec::from_u64(102).rng();
        for _ in 0..1000 {
            let mu = random_message(256, &mut rng);
            let (dec, _, _) = run_trial(&p, &mu, &mut rng).unwrap();
            assert_eq!(dec, mu);
        }
    }

    #[test]
    fn noise_identity_holds_exactly() {
        let p = SchemeParams::newhope512();
        let mut rng = RngSpec::from_u64(103).rng();
        for _ in 0..20 {
            let mu = random_message(256, &mut rng);
            let (_, _, trace) = run_trial(&p, &mu, &mut rng).unwrap();
            let n_t = extract_noise(&trace, &p).unwrap();
            assert_eq!(n_t, trace.n_t);
            // compression noise bounded by floor(q/2r)
            let bound = p.max_compression_noise() as i64;
            assert!(trace.n_c.coeffs.iter().all(|&x| x.abs() <= bound));
        }
    }

    #[test]
    fn tampered_trace_fails_integrity() {
        let p = SchemeParams::toy();
        let mut rng = RngSpec::from_u64(104).rng();
        let mu = random_message(2, &mut rng);
        let (_, _, mut trace) = run_trial(&p, &mu, &mut rng).unwrap();
        trace.e_dprime.coeffs[0] += 1;
        assert!(extract_noise(&trace, &p).is_err());
    }

    #[test]
    fn decrypt_equals_decode_of_noisy_codeword() {
        // decrypt(ct) must equal ate_decode(v + n_t).
        let p = SchemeParams::newhope512();
        let mut rng = RngSpec::from_u64(105).rng();
        let mu = random_message(256, &mut rng);
        let (dec, _, trace) = run_trial(&p, &mu, &mut rng).unwrap();
        let noisy = Poly::from_signed(
            &SignedVec::new(
                trace
                    .v
                    .coeffs
                    .iter()
                    .zip(&trace.n_t.coeffs)
                    .map(|(&v, &n)| v as i64 + n)
                    .collect(),
            ),
            p.q,
        );
        let (dec2, _) = crate::ate::ate_decode(&noisy, &p).unwrap();
        assert_eq!(dec, dec2);
    }

    #[test]
    fn injected_threshold_noise_flips_a_bit() {
        // Push all m repetition slots of bit 0 to distance floor(q/2) from
        // the encoded value; the decoder must flip that bit.
        let p = SchemeParams::newhope1024();
        let mu = MessageBits::new([vec![1u8], vec![0; 255]].concat()).unwrap();
        let mut v = ate::ate_encode(&mu, &p).unwrap();
        for l in 0..p.reps {
            v.coeffs[256 * l] = 0; // distance q/2 from the '1' level
        }
        let (dec, trace) = ate::ate_decode(&v, &p).unwrap();
        assert_eq!(trace.sums[0], p.max_decoder_sum());
        assert_eq!(dec.bits[0], 0);
        assert_ne!(dec.bits[0], mu.bits[0]);
    }

    #[test]
    fn ciphertext_sizes_scale_with_r() {
        let p8 = SchemeParams::newhope1024();
        let p4 = p8.with_r(4);
        assert_eq!(p8.ciphertext_bits(), 1024 * 17);
        assert_eq!(p4.ciphertext_bits(), 1024 * 16);
    }

    #[test]
    fn uniform_public_poly_chi_square() {
        // chi-square uniformity of a's coefficients over [0, q), ~1e6 draws.
        let p = SchemeParams::newhope512();
        let mut rng = RngSpec::from_u64(106).rng();
        let mut counts = vec![0u64; p.q as usize];
        let trials = 2000;
        for _ in 0..trials {
            let a = crate::rng::sample_uniform_poly(&p, &mut rng);
            for &c in &a.coeffs {
                counts[c as usize] += 1;
            }
        }
        let total = (trials * p.n) as f64;
        let expect = total / p.q as f64;
        let stat: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expect).powi(2) / expect)
            .sum();
        // df = q - 1 = 12288; 5-sigma acceptance band
        let df = (p.q - 1) as f64;
        assert!(
            (stat - df).abs() < 5.0 * (2.0 * df).sqrt(),
            "chi2 = {stat}, df = {df}"
        );
    }
}
