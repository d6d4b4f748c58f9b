//! Residue scalars for Z_q.
//!
//! [`Scalar`] abstracts the storage type of a residue. Two implementations
//! exist: `u64` for moduli below 2^63 (word-size arithmetic with 128-bit
//! intermediates) and [`BigUint`] for wide moduli. Residues are stored as
//! canonical representatives in `[0, q)`; the centered representative in
//! `(-q/2, q/2]` is derived on demand by [`Modulus`].

use std::fmt;
use std::hash::Hash;

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{FromPrimitive, Num, One, ToPrimitive, Zero};
use rand::{Rng, RngCore};

/// Storage type for residues modulo a prime.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Eq
    + PartialOrd
    + Ord
    + Hash
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Num
    + ToPrimitive
    + FromPrimitive
{
    /// Unreduced accumulator for sums of products.
    type Acc: Clone;

    /// Converts to an arbitrary-precision integer.
    fn to_big(&self) -> BigUint;
    /// Converts from an arbitrary-precision integer, `None` when it does not fit.
    fn from_big(v: &BigUint) -> Option<Self>;
    /// Uniform value in `[0, q)`.
    fn sample_below<R: RngCore + ?Sized>(q: &Self, rng: &mut R) -> Self;
    /// `a·b mod q` for reduced operands.
    fn mul_mod(a: &Self, b: &Self, q: &Self) -> Self;
    /// `v mod q` for a signed machine integer.
    fn reduce_i128(v: i128, q: &Self) -> Self;
    /// Fresh accumulator.
    fn acc_zero() -> Self::Acc;
    /// `acc += a·b` for reduced operands, reducing lazily.
    fn acc_mac(acc: &mut Self::Acc, a: &Self, b: &Self, q: &Self);
    /// Final reduction of an accumulator.
    fn acc_finish(acc: Self::Acc, q: &Self) -> Self;
    /// `Σ vals[i]·coeffs[i] mod q` with signed integer coefficients.
    fn signed_dot(vals: &[Self], coeffs: &[i128], q: &Self) -> Self;
    /// Products `vals · R` for a ternary matrix given as `Rᵀ`, row-major with `cols` rows of `vals.len()` entries.
    fn ternary_mat_vec(vals: &[Self], r_t: &[i8], cols: usize, q: &Self) -> Vec<Self>;
}

impl Scalar for u64 {
    type Acc = u128;

    fn to_big(&self) -> BigUint {
        BigUint::from(*self)
    }

    fn from_big(v: &BigUint) -> Option<Self> {
        v.to_u64()
    }

    fn sample_below<R: RngCore + ?Sized>(q: &Self, rng: &mut R) -> Self {
        rng.gen_range(0..*q)
    }

    fn mul_mod(a: &Self, b: &Self, q: &Self) -> Self {
        ((*a as u128 * *b as u128) % *q as u128) as u64
    }

    fn reduce_i128(v: i128, q: &Self) -> Self {
        v.rem_euclid(*q as i128) as u64
    }

    fn acc_zero() -> u128 {
        0
    }

    #[inline]
    fn acc_mac(acc: &mut u128, a: &Self, b: &Self, q: &Self) {
        *acc += *a as u128 * *b as u128;
        if *acc >> 127 != 0 {
            *acc %= *q as u128;
        }
    }

    fn acc_finish(acc: u128, q: &Self) -> Self {
        (acc % *q as u128) as u64
    }

    fn signed_dot(vals: &[Self], coeffs: &[i128], q: &Self) -> Self {
        debug_assert_eq!(vals.len(), coeffs.len());
        // Small coefficients against residues below 2^63 cannot overflow an
        // i128 accumulator for any realistic length, so take a single pass.
        const SMALL: i128 = 1 << 32;
        if *q < 1 << 63
            && vals.len() < 1 << 30
            && coeffs.iter().all(|c| (-SMALL..SMALL).contains(c))
        {
            let acc: i128 = vals
                .iter()
                .zip(coeffs)
                .map(|(&a, &c)| i128::from(a as i64) * i128::from(c as i64))
                .sum();
            return acc.rem_euclid(*q as i128) as u64;
        }
        let qq = *q as u128;
        let (mut pos, mut neg) = (0u128, 0u128);
        for (a, &c) in vals.iter().zip(coeffs) {
            let mut mag = c.unsigned_abs();
            if mag >> 64 != 0 {
                mag %= qq;
            }
            let p = if mag >> 63 == 0 {
                *a as u128 * mag
            } else {
                *a as u128 * (mag % qq)
            };
            let slot = if c < 0 { &mut neg } else { &mut pos };
            *slot += p;
            if *slot >> 127 != 0 {
                *slot %= qq;
            }
        }
        let (pos, neg) = ((pos % qq) as u64, (neg % qq) as u64);
        if pos >= neg {
            pos - neg
        } else {
            *q - (neg - pos)
        }
    }

    fn ternary_mat_vec(vals: &[Self], r_t: &[i8], cols: usize, q: &Self) -> Vec<Self> {
        let rows = vals.len();
        debug_assert_eq!(r_t.len(), rows * cols);
        (0..cols)
            .map(|c| {
                let col = &r_t[c * rows..(c + 1) * rows];
                let mut acc: i128 = 0;
                for (v, &r) in vals.iter().zip(col) {
                    acc += i128::from(r) * (*v as i128);
                }
                acc.rem_euclid(*q as i128) as u64
            })
            .collect()
    }
}

impl Scalar for BigUint {
    type Acc = BigUint;

    fn to_big(&self) -> BigUint {
        self.clone()
    }

    fn from_big(v: &BigUint) -> Option<Self> {
        Some(v.clone())
    }

    fn sample_below<R: RngCore + ?Sized>(q: &Self, rng: &mut R) -> Self {
        let mut adapter = DynRng(rng);
        adapter.gen_biguint_below(q)
    }

    fn mul_mod(a: &Self, b: &Self, q: &Self) -> Self {
        (a * b) % q
    }

    fn reduce_i128(v: i128, q: &Self) -> Self {
        let m = BigUint::from(v.unsigned_abs()) % q;
        if v < 0 && !m.is_zero() {
            q - m
        } else {
            m
        }
    }

    fn acc_zero() -> BigUint {
        BigUint::zero()
    }

    fn acc_mac(acc: &mut BigUint, a: &Self, b: &Self, _q: &Self) {
        *acc += a * b;
    }

    fn acc_finish(acc: BigUint, q: &Self) -> Self {
        acc % q
    }

    fn signed_dot(vals: &[Self], coeffs: &[i128], q: &Self) -> Self {
        debug_assert_eq!(vals.len(), coeffs.len());
        let (mut pos, mut neg) = (BigUint::zero(), BigUint::zero());
        for (a, &c) in vals.iter().zip(coeffs) {
            if c == 0 {
                continue;
            }
            let p = a * BigUint::from(c.unsigned_abs());
            if c < 0 {
                neg += p;
            } else {
                pos += p;
            }
        }
        let diff = BigInt::from_biguint(Sign::Plus, pos) - BigInt::from_biguint(Sign::Plus, neg);
        reduce_bigint(&diff, q)
    }

    fn ternary_mat_vec(vals: &[Self], r_t: &[i8], cols: usize, q: &Self) -> Vec<Self> {
        let rows = vals.len();
        debug_assert_eq!(r_t.len(), rows * cols);
        let limbs = q.to_u64_digits().len();
        let mut flat = vec![0u64; rows * limbs];
        for (i, v) in vals.iter().enumerate() {
            for (l, d) in v.to_u64_digits().into_iter().enumerate() {
                flat[i * limbs + l] = d;
            }
        }
        let mut acc = vec![0i128; limbs];
        (0..cols)
            .map(|c| {
                acc.iter_mut().for_each(|a| *a = 0);
                let col = &r_t[c * rows..(c + 1) * rows];
                for (i, &r) in col.iter().enumerate() {
                    if r == 0 {
                        continue;
                    }
                    let digits = &flat[i * limbs..(i + 1) * limbs];
                    if r > 0 {
                        for (a, &d) in acc.iter_mut().zip(digits) {
                            *a += d as i128;
                        }
                    } else {
                        for (a, &d) in acc.iter_mut().zip(digits) {
                            *a -= d as i128;
                        }
                    }
                }
                let mut total = BigInt::zero();
                for &a in acc.iter().rev() {
                    total = (total << 64) + BigInt::from(a);
                }
                reduce_bigint(&total, q)
            })
            .collect()
    }
}

/// Reduces a signed big integer into `[0, q)`.
pub fn reduce_bigint<S: Scalar>(v: &BigInt, q: &S) -> S {
    let qb = BigInt::from_biguint(Sign::Plus, q.to_big());
    let r = v.mod_floor(&qb);
    S::from_big(r.magnitude()).expect("reduced value fits the scalar type")
}

/// Adapter giving `?Sized` generators the `RandBigInt` extension.
struct DynRng<'a, R: RngCore + ?Sized>(&'a mut R);

impl<R: RngCore + ?Sized> RngCore for DynRng<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

/// A prime modulus with cached derived constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Modulus<S: Scalar> {
    q: S,
    half: S,
    quarter: S,
    bits: u32,
    q_big: BigUint,
}

impl<S: Scalar> Modulus<S> {
    /// Wraps `q`; the caller is responsible for primality (see [`is_probable_prime`]).
    pub fn new(q: S) -> Self {
        let q_big = q.to_big();
        let two = S::one() + S::one();
        let half = q.clone() / two.clone();
        let quarter = half.clone() / two;
        let bits = q_big.bits() as u32;
        Self {
            q,
            half,
            quarter,
            bits,
            q_big,
        }
    }

    /// The modulus.
    pub fn q(&self) -> &S {
        &self.q
    }

    /// `⌊q/2⌋`.
    pub fn half(&self) -> &S {
        &self.half
    }

    /// `⌊q/4⌋`.
    pub fn quarter(&self) -> &S {
        &self.quarter
    }

    /// `⌈log₂ q⌉` (the bit length, since q is odd).
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// The modulus as an arbitrary-precision integer.
    pub fn q_big(&self) -> &BigUint {
        &self.q_big
    }

    /// Bytes needed for a canonical residue.
    pub fn byte_len(&self) -> usize {
        (self.bits as usize).div_ceil(8)
    }

    /// `q` as a float.
    pub fn q_f64(&self) -> f64 {
        self.q_big.to_f64().unwrap_or(f64::INFINITY)
    }

    /// `a + b mod q`.
    pub fn add(&self, a: &S, b: &S) -> S {
        let s = a.clone() + b.clone();
        if s >= self.q {
            s - self.q.clone()
        } else {
            s
        }
    }

    /// `a - b mod q`.
    pub fn sub(&self, a: &S, b: &S) -> S {
        if a >= b {
            a.clone() - b.clone()
        } else {
            self.q.clone() - (b.clone() - a.clone())
        }
    }

    /// `-a mod q`.
    pub fn neg(&self, a: &S) -> S {
        if a.is_zero() {
            S::zero()
        } else {
            self.q.clone() - a.clone()
        }
    }

    /// `a·b mod q`.
    pub fn mul(&self, a: &S, b: &S) -> S {
        S::mul_mod(a, b, &self.q)
    }

    /// Reduces a signed machine integer.
    pub fn from_i128(&self, v: i128) -> S {
        S::reduce_i128(v, &self.q)
    }

    /// Reduces a signed big integer.
    pub fn from_bigint(&self, v: &BigInt) -> S {
        reduce_bigint(v, &self.q)
    }

    /// Uniform residue.
    pub fn random<R: RngCore + ?Sized>(&self, rng: &mut R) -> S {
        S::sample_below(&self.q, rng)
    }

    /// `|centered(a)|` as a residue-typed magnitude.
    pub fn centered_abs(&self, a: &S) -> S {
        if *a > self.half {
            self.q.clone() - a.clone()
        } else {
            a.clone()
        }
    }

    /// Centered representative in `(-q/2, q/2]` as a big integer.
    pub fn centered_bigint(&self, a: &S) -> BigInt {
        if *a > self.half {
            -BigInt::from_biguint(Sign::Plus, (self.q.clone() - a.clone()).to_big())
        } else {
            BigInt::from_biguint(Sign::Plus, a.to_big())
        }
    }

    /// Centered representative as a machine integer, `None` when it does not fit.
    pub fn centered_i128(&self, a: &S) -> Option<i128> {
        self.centered_bigint(a).to_i128()
    }

    /// Centered representative as a float (for norms only).
    pub fn centered_f64(&self, a: &S) -> f64 {
        if *a > self.half {
            -(self.q.clone() - a.clone())
                .to_f64()
                .unwrap_or(f64::INFINITY)
        } else {
            a.to_f64().unwrap_or(f64::INFINITY)
        }
    }
}

/// Deterministic Miller–Rabin over a fixed base set; exact below 3.3·10^24 and overwhelming beyond.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    const SMALL: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    const BASES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    'outer: for a in BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}
