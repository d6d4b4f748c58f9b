//! Dense vectors and matrices over Z_q and their wire encoding.
//!
//! Entries are canonical residues; every operation that needs the modulus
//! takes a [`Modulus`] explicitly. The encoding writes 32-bit little-endian
//! dimensions, then each entry as `len ‖ sign ‖ magnitude` where the magnitude
//! is the minimal big-endian encoding of the centered representative.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;
use rand::RngCore;

use super::scalar::{Modulus, Scalar};
use crate::codec::{Reader, Writer};
use crate::error::{ensure_len, Error, Result};

/// A vector over Z_q.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModQVector<S: Scalar> {
    entries: Vec<S>,
}

impl<S: Scalar> ModQVector<S> {
    /// Wraps already-reduced entries.
    pub fn from_entries(entries: Vec<S>) -> Self {
        Self { entries }
    }

    /// Zero vector.
    pub fn zeros(len: usize) -> Self {
        Self {
            entries: vec![S::zero(); len],
        }
    }

    /// Reduces signed integers.
    pub fn from_i128s(md: &Modulus<S>, values: &[i128]) -> Self {
        Self {
            entries: values.iter().map(|&v| md.from_i128(v)).collect(),
        }
    }

    /// Uniform vector.
    pub fn random<R: RngCore + ?Sized>(md: &Modulus<S>, len: usize, rng: &mut R) -> Self {
        Self {
            entries: (0..len).map(|_| md.random(rng)).collect(),
        }
    }

    /// Length.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// True for the empty vector.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries.
    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    /// Entry `i`.
    pub fn get(&self, i: usize) -> &S {
        &self.entries[i]
    }

    /// Componentwise sum.
    pub fn add(&self, md: &Modulus<S>, other: &Self) -> Result<Self> {
        ensure_len(self.len(), other.len())?;
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| md.add(a, b))
                .collect(),
        })
    }

    /// Componentwise difference.
    pub fn sub(&self, md: &Modulus<S>, other: &Self) -> Result<Self> {
        ensure_len(self.len(), other.len())?;
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| md.sub(a, b))
                .collect(),
        })
    }

    /// Inner product with another residue vector.
    pub fn dot(&self, md: &Modulus<S>, other: &Self) -> Result<S> {
        ensure_len(self.len(), other.len())?;
        let mut acc = S::acc_zero();
        for (a, b) in self.entries.iter().zip(&other.entries) {
            S::acc_mac(&mut acc, a, b, md.q());
        }
        Ok(S::acc_finish(acc, md.q()))
    }

    /// Centered representatives as big integers.
    pub fn centered(&self, md: &Modulus<S>) -> Vec<BigInt> {
        self.entries.iter().map(|e| md.centered_bigint(e)).collect()
    }

    /// Squared Euclidean norm of the centered representative (floating point).
    pub fn norm2_sq(&self, md: &Modulus<S>) -> f64 {
        self.entries
            .iter()
            .map(|e| md.centered_f64(e).powi(2))
            .sum()
    }

    /// Infinity norm of the centered representative.
    pub fn norm_inf(&self, md: &Modulus<S>) -> S {
        self.entries
            .iter()
            .map(|e| md.centered_abs(e))
            .max()
            .unwrap_or_else(S::zero)
    }

    /// Canonical residues as fixed-width big-endian bytes, `md.byte_len()` per entry.
    pub fn to_fixed_bytes(&self, md: &Modulus<S>) -> Vec<u8> {
        let width = md.byte_len();
        let mut out = Vec::with_capacity(width * self.len());
        for e in &self.entries {
            let be = e.to_big().to_bytes_be();
            let be: &[u8] = if e.is_zero() { &[] } else { &be };
            out.extend(std::iter::repeat_n(0u8, width - be.len()));
            out.extend_from_slice(be);
        }
        out
    }

    /// Inverse of [`Self::to_fixed_bytes`]; rejects non-canonical residues.
    pub fn from_fixed_bytes(md: &Modulus<S>, bytes: &[u8]) -> Result<Self> {
        let width = md.byte_len();
        if width == 0 || !bytes.len().is_multiple_of(width) {
            return Err(Error::Decode(
                "fixed-width residue block has the wrong size".into(),
            ));
        }
        let entries = bytes
            .chunks(width)
            .map(|c| {
                let v = BigUint::from_bytes_be(c);
                if &v >= md.q_big() {
                    return Err(Error::Decode("residue not reduced".into()));
                }
                S::from_big(&v).ok_or_else(|| Error::Decode("residue does not fit scalar".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }

    /// Writes the length header and entries.
    pub fn encode(&self, md: &Modulus<S>, w: &mut Writer) {
        w.len(self.len());
        for e in &self.entries {
            encode_entry(md, e, w);
        }
    }

    /// Reads a vector written by [`Self::encode`].
    pub fn decode(md: &Modulus<S>, r: &mut Reader<'_>) -> Result<Self> {
        let n = r.len(2)?;
        let entries = (0..n)
            .map(|_| decode_entry(md, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }
}

/// A row-major matrix over Z_q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModQMatrix<S: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> ModQMatrix<S> {
    /// Wraps row-major data.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        ensure_len(rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    /// Uniform matrix.
    pub fn random<R: RngCore + ?Sized>(
        md: &Modulus<S>,
        rows: usize,
        cols: usize,
        rng: &mut R,
    ) -> Self {
        Self {
            rows,
            cols,
            data: (0..rows * cols).map(|_| md.random(rng)).collect(),
        }
    }

    /// Row count.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Column count.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    /// Row `i`.
    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Row-major entries.
    pub fn data(&self) -> &[S] {
        &self.data
    }

    /// `vᵀ·self` for `v` of length `rows`.
    pub fn left_mul(&self, md: &Modulus<S>, v: &ModQVector<S>) -> Result<ModQVector<S>> {
        ensure_len(self.rows, v.len())?;
        let mut acc = vec![S::acc_zero(); self.cols];
        for (i, vi) in v.entries().iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (a, x) in acc.iter_mut().zip(self.row(i)) {
                S::acc_mac(a, vi, x, md.q());
            }
        }
        Ok(ModQVector::from_entries(
            acc.into_iter().map(|a| S::acc_finish(a, md.q())).collect(),
        ))
    }

    /// `self·t` for a signed integer vector `t` of length `cols`.
    pub fn mul_signed(&self, md: &Modulus<S>, t: &[i128]) -> Result<ModQVector<S>> {
        ensure_len(self.cols, t.len())?;
        Ok(ModQVector::from_entries(
            (0..self.rows)
                .map(|i| S::signed_dot(self.row(i), t, md.q()))
                .collect(),
        ))
    }

    /// Writes both dimensions and the entries row by row.
    pub fn encode(&self, md: &Modulus<S>, w: &mut Writer) {
        w.len(self.rows);
        w.len(self.cols);
        for e in &self.data {
            encode_entry(md, e, w);
        }
    }

    /// Reads a matrix written by [`Self::encode`].
    pub fn decode(md: &Modulus<S>, r: &mut Reader<'_>) -> Result<Self> {
        let rows = r.len(0)?;
        let cols = r.len(0)?;
        let count = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Decode("matrix too large".into()))?;
        if count.saturating_mul(2) > r.remaining() {
            return Err(Error::Decode("matrix dimensions exceed input".into()));
        }
        let data = (0..count)
            .map(|_| decode_entry(md, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows, cols, data })
    }
}

fn encode_entry<S: Scalar>(md: &Modulus<S>, e: &S, w: &mut Writer) {
    let c = md.centered_bigint(e);
    let (sign, mag) = c.to_bytes_be();
    let mag: &[u8] = if c.is_zero() { &[] } else { &mag };
    w.u8(u8::try_from(mag.len()).expect("entry magnitude fits 255 bytes"));
    w.u8(u8::from(sign == Sign::Minus));
    w.raw(mag);
}

fn decode_entry<S: Scalar>(md: &Modulus<S>, r: &mut Reader<'_>) -> Result<S> {
    let len = r.u8()? as usize;
    let sign = r.u8()?;
    let mag = r.raw(len)?;
    if sign > 1 || (len > 0 && mag[0] == 0) || (len == 0 && sign == 1) {
        return Err(Error::Decode("non-canonical residue encoding".into()));
    }
    let magnitude = BigUint::from_bytes_be(mag);
    if magnitude > md.half().to_big() {
        return Err(Error::Decode("residue outside the centered range".into()));
    }
    let value = BigInt::from_biguint(if sign == 1 { Sign::Minus } else { Sign::Plus }, magnitude);
    Ok(md.from_bigint(&value))
}
