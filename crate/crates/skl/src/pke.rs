//! Single-bit public-key encryption: the interface plus two instantiations.
//!
//! [`RegevPke`] is plain LWE encryption over its own small parameter set.
//! [`ToyPke`] masks the bit with a hash of a key that sits in both `ek` and
//! `dk`. It is **not secure**; it exists so that high-repetition leasing
//! tests stay cheap.

use std::fmt::Debug;

use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::bits::BitVec;
use crate::codec::{Reader, Writer};
use crate::error::{ensure_len, Error, Result};
use crate::modq::{GaussSampler, ModQMatrix, ModQVector, Modulus, Scalar};

/// A single-bit PKE whose decryption keys have a fixed-width bit encoding.
///
/// The fixed width lets a boolean circuit output a decryption key.
pub trait Pke: Clone + Debug {
    /// Encryption key.
    type Ek: Clone + Debug + PartialEq;
    /// Decryption key.
    type Dk: Clone + Debug + PartialEq;
    /// Ciphertext.
    type Ct: Clone + Debug + PartialEq;

    /// Key generation.
    fn kg<R: RngCore + ?Sized>(&self, rng: &mut R) -> (Self::Ek, Self::Dk);
    /// Encrypts one bit.
    fn enc<R: RngCore + ?Sized>(&self, ek: &Self::Ek, m: bool, rng: &mut R) -> Self::Ct;
    /// Decrypts one bit.
    fn dec(&self, dk: &Self::Dk, ct: &Self::Ct) -> Result<bool>;

    /// Width of [`Self::dk_to_bits`].
    fn dk_bits(&self) -> usize;
    /// Fixed-width encoding of a decryption key.
    fn dk_to_bits(&self, dk: &Self::Dk) -> BitVec;
    /// Inverse of [`Self::dk_to_bits`].
    fn dk_from_bits(&self, bits: &BitVec) -> Result<Self::Dk>;

    /// Serializes an encryption key.
    fn encode_ek(&self, ek: &Self::Ek, w: &mut Writer);
    /// Parses an encryption key.
    fn decode_ek(&self, r: &mut Reader<'_>) -> Result<Self::Ek>;
    /// Serializes a ciphertext.
    fn encode_ct(&self, ct: &Self::Ct, w: &mut Writer);
    /// Parses a ciphertext.
    fn decode_ct(&self, r: &mut Reader<'_>) -> Result<Self::Ct>;
}

/// Key length of [`ToyPke`] in bytes.
pub const TOY_KEY_BYTES: usize = 16;
/// Nonce length of [`ToyPke`] ciphertexts in bytes.
pub const TOY_NONCE_BYTES: usize = 16;

/// Hash-masked bit under a key shared by `ek` and `dk`. Correctness only; not secure.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ToyPke;

/// [`ToyPke`] key (used as both `ek` and `dk`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToyKey(pub [u8; TOY_KEY_BYTES]);

/// [`ToyPke`] ciphertext.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToyCt {
    /// Fresh nonce.
    pub nonce: [u8; TOY_NONCE_BYTES],
    /// `m ⊕ lsb(H(key ‖ nonce))`.
    pub masked: bool,
}

fn toy_pad(key: &ToyKey, nonce: &[u8; TOY_NONCE_BYTES]) -> bool {
    let h = Sha256::new()
        .chain_update(b"skl.toy-pke")
        .chain_update(key.0)
        .chain_update(nonce)
        .finalize();
    h[0] & 1 == 1
}

impl Pke for ToyPke {
    type Ek = ToyKey;
    type Dk = ToyKey;
    type Ct = ToyCt;

    fn kg<R: RngCore + ?Sized>(&self, rng: &mut R) -> (ToyKey, ToyKey) {
        let mut k = [0u8; TOY_KEY_BYTES];
        rng.fill_bytes(&mut k);
        (ToyKey(k), ToyKey(k))
    }

    fn enc<R: RngCore + ?Sized>(&self, ek: &ToyKey, m: bool, rng: &mut R) -> ToyCt {
        let mut nonce = [0u8; TOY_NONCE_BYTES];
        rng.fill_bytes(&mut nonce);
        ToyCt {
            masked: m ^ toy_pad(ek, &nonce),
            nonce,
        }
    }

    fn dec(&self, dk: &ToyKey, ct: &ToyCt) -> Result<bool> {
        Ok(ct.masked ^ toy_pad(dk, &ct.nonce))
    }

    fn dk_bits(&self) -> usize {
        TOY_KEY_BYTES * 8
    }

    fn dk_to_bits(&self, dk: &ToyKey) -> BitVec {
        BitVec::from_bytes(&dk.0, TOY_KEY_BYTES * 8).expect("whole bytes")
    }

    fn dk_from_bits(&self, bits: &BitVec) -> Result<ToyKey> {
        ensure_len(TOY_KEY_BYTES * 8, bits.len())?;
        let mut k = [0u8; TOY_KEY_BYTES];
        k.copy_from_slice(bits.as_bytes());
        Ok(ToyKey(k))
    }

    fn encode_ek(&self, ek: &ToyKey, w: &mut Writer) {
        w.raw(&ek.0);
    }

    fn decode_ek(&self, r: &mut Reader<'_>) -> Result<ToyKey> {
        let mut k = [0u8; TOY_KEY_BYTES];
        k.copy_from_slice(r.raw(TOY_KEY_BYTES)?);
        Ok(ToyKey(k))
    }

    fn encode_ct(&self, ct: &ToyCt, w: &mut Writer) {
        w.raw(&ct.nonce);
        w.u8(u8::from(ct.masked));
    }

    fn decode_ct(&self, r: &mut Reader<'_>) -> Result<ToyCt> {
        let mut nonce = [0u8; TOY_NONCE_BYTES];
        nonce.copy_from_slice(r.raw(TOY_NONCE_BYTES)?);
        let masked = match r.u8()? {
            0 => false,
            1 => true,
            b => return Err(Error::Decode(format!("toy ciphertext bit byte {b}"))),
        };
        Ok(ToyCt { nonce, masked })
    }
}

/// Regev encryption: `ek = (A, b = sᵀA + e)`, `dk = s`.
#[derive(Clone, Debug)]
pub struct RegevPke<S: Scalar> {
    md: Modulus<S>,
    n: usize,
    m: usize,
    noise: Option<GaussSampler>,
}

/// [`RegevPke`] encryption key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegevEk<S: Scalar> {
    /// Uniform `n × m` matrix.
    pub a: ModQMatrix<S>,
    /// `sᵀA + e`.
    pub b: ModQVector<S>,
}

/// [`RegevPke`] ciphertext `(A·r, ⟨b, r⟩ + m·⌊q/2⌋)` for binary `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegevCt<S: Scalar> {
    /// `A·r`.
    pub c1: ModQVector<S>,
    /// `⟨b, r⟩ + m·⌊q/2⌋`.
    pub c2: S,
}

impl<S: Scalar> RegevPke<S> {
    /// Instantiation with modulus `q`, secret dimension `n`, `m` samples and noise width `sigma` (0 for noiseless).
    pub fn new(q: S, n: usize, m: usize, sigma: f64) -> Result<Self> {
        let md = Modulus::new(q);
        if n == 0 || m == 0 {
            return Err(Error::InvalidParams(
                "Regev dimensions must be positive".into(),
            ));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParams(format!("noise width {sigma}")));
        }
        let noise = (sigma > 0.0).then(|| GaussSampler::new(sigma, m));
        // Worst-case decryption noise is m·B for binary r and |e_j| ≤ B.
        let worst = noise.as_ref().map_or(0.0, |g| g.bound() as f64) * m as f64;
        if worst >= md.q_f64() / 4.0 {
            return Err(Error::InvalidParams(format!(
                "noise bound {worst} reaches q/4"
            )));
        }
        Ok(Self { md, n, m, noise })
    }

    /// Modulus.
    pub fn modulus(&self) -> &Modulus<S> {
        &self.md
    }

    /// Secret dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Sample count.
    pub fn m(&self) -> usize {
        self.m
    }
}

/// `q = 2³¹ − 1`, `n = 16`, `m = 256`, `σ = 3.2`: decryption noise never reaches `q/4`.
pub fn regev_small() -> RegevPke<u64> {
    RegevPke::new((1u64 << 31) - 1, 16, 256, 3.2).expect("valid preset")
}

impl<S: Scalar> Pke for RegevPke<S> {
    type Ek = RegevEk<S>;
    type Dk = ModQVector<S>;
    type Ct = RegevCt<S>;

    fn kg<R: RngCore + ?Sized>(&self, rng: &mut R) -> (RegevEk<S>, ModQVector<S>) {
        let md = &self.md;
        let a = ModQMatrix::random(md, self.n, self.m, rng);
        let s = ModQVector::random(md, self.n, rng);
        let e = match &self.noise {
            Some(g) => ModQVector::from_i128s(md, &g.sample_vec(self.m, rng)),
            None => ModQVector::zeros(self.m),
        };
        let b = a
            .left_mul(md, &s)
            .and_then(|sa| sa.add(md, &e))
            .expect("dimensions agree");
        (RegevEk { a, b }, s)
    }

    fn enc<R: RngCore + ?Sized>(&self, ek: &RegevEk<S>, m: bool, rng: &mut R) -> RegevCt<S> {
        let md = &self.md;
        let r: Vec<i128> = (0..self.m)
            .map(|_| i128::from(rng.next_u32() & 1))
            .collect();
        let c1 = ek.a.mul_signed(md, &r).expect("dimensions agree");
        let mut c2 = S::signed_dot(ek.b.entries(), &r, md.q());
        if m {
            c2 = md.add(&c2, md.half());
        }
        RegevCt { c1, c2 }
    }

    fn dec(&self, dk: &ModQVector<S>, ct: &RegevCt<S>) -> Result<bool> {
        ensure_len(self.n, ct.c1.len())?;
        let md = &self.md;
        let res = md.sub(&ct.c2, &dk.dot(md, &ct.c1)?);
        Ok(md.centered_abs(&res) >= *md.quarter())
    }

    fn dk_bits(&self) -> usize {
        self.n * self.md.byte_len() * 8
    }

    fn dk_to_bits(&self, dk: &ModQVector<S>) -> BitVec {
        let bytes = dk.to_fixed_bytes(&self.md);
        BitVec::from_bytes(&bytes, bytes.len() * 8).expect("whole bytes")
    }

    fn dk_from_bits(&self, bits: &BitVec) -> Result<ModQVector<S>> {
        ensure_len(self.dk_bits(), bits.len())?;
        let v = ModQVector::from_fixed_bytes(&self.md, bits.as_bytes())?;
        ensure_len(self.n, v.len())?;
        Ok(v)
    }

    fn encode_ek(&self, ek: &RegevEk<S>, w: &mut Writer) {
        ek.a.encode(&self.md, w);
        ek.b.encode(&self.md, w);
    }

    fn decode_ek(&self, r: &mut Reader<'_>) -> Result<RegevEk<S>> {
        let a = ModQMatrix::decode(&self.md, r)?;
        let b = ModQVector::decode(&self.md, r)?;
        ensure_len(self.n, a.rows())?;
        ensure_len(self.m, a.cols())?;
        ensure_len(self.m, b.len())?;
        Ok(RegevEk { a, b })
    }

    fn encode_ct(&self, ct: &RegevCt<S>, w: &mut Writer) {
        let mut v = ct.c1.entries().to_vec();
        v.push(ct.c2.clone());
        ModQVector::from_entries(v).encode(&self.md, w);
    }

    fn decode_ct(&self, r: &mut Reader<'_>) -> Result<RegevCt<S>> {
        let v = ModQVector::decode(&self.md, r)?;
        ensure_len(self.n + 1, v.len())?;
        let mut e = v.entries().to_vec();
        let c2 = e.pop().unwrap_or_else(S::zero);
        Ok(RegevCt {
            c1: ModQVector::from_entries(e),
            c2,
        })
    }
}
