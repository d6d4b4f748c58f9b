//! GF(2) vectors, inner products, block recomposition and affine-coset sampling.
//!
//! Bits are packed LSB-first within bytes and the bit length is carried
//! explicitly, so padding bits in the last byte never influence results.
//! Textual form lists bit 0 first: `"101"` has bits `[1, 0, 1]`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore};

use crate::error::{ensure_len, Error, Result};

/// A bit string of explicit length.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    bytes: Vec<u8>,
}

impl BitVec {
    /// All-zero vector of length `len`.
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            bytes: vec![0; len.div_ceil(8)],
        }
    }

    /// Builds a vector from booleans, index 0 first.
    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Interprets `bytes` as LSB-first packed bits and keeps the first `len`.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        let need = len.div_ceil(8);
        if bytes.len() < need {
            return Err(Error::LengthMismatch {
                expected: need,
                got: bytes.len(),
            });
        }
        let mut v = Self {
            len,
            bytes: bytes[..need].to_vec(),
        };
        v.clear_padding();
        Ok(v)
    }

    /// The low `len` bits of `value`, bit `i` of the vector being bit `i` of the integer.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64, "from_u64 supports at most 64 bits");
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, (value >> i) & 1 == 1);
        }
        v
    }

    /// Uniformly random vector of length `len`.
    pub fn random<R: RngCore + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(len);
        rng.fill_bytes(&mut v.bytes);
        v.clear_padding();
        v
    }

    /// Bit length.
    pub fn len(&self) -> usize {
        self.len
    }

    /// True for the empty vector.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed bytes (padding bits are zero).
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Bit `i`.
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.bytes[i / 8] >> (i % 8)) & 1 == 1
    }

    /// Sets bit `i`.
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u8 << (i % 8);
        if bit {
            self.bytes[i / 8] |= mask;
        } else {
            self.bytes[i / 8] &= !mask;
        }
    }

    /// Flips bit `i`.
    pub fn flip(&mut self, i: usize) {
        let b = self.get(i);
        self.set(i, !b);
    }

    /// Integer value of a vector of at most 64 bits.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= 64, "to_u64 supports at most 64 bits");
        (0..self.len).fold(0u64, |acc, i| acc | (u64::from(self.get(i)) << i))
    }

    /// Bits as booleans, index 0 first.
    pub fn to_bools(&self) -> Vec<bool> {
        self.iter().collect()
    }

    /// Iterator over the bits.
    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// True when every bit is zero.
    pub fn is_zero(&self) -> bool {
        self.bytes.iter().all(|&b| b == 0)
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Bitwise XOR of equal-length vectors.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        ensure_len(self.len, other.len)?;
        let bytes = self
            .bytes
            .iter()
            .zip(&other.bytes)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Self {
            len: self.len,
            bytes,
        })
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    /// Concatenation of many vectors in order.
    pub fn concat_all<'a, I: IntoIterator<Item = &'a BitVec>>(parts: I) -> Self {
        let mut out = Self::zeros(0);
        for p in parts {
            out.extend(p);
        }
        out
    }

    /// Appends `other` in place.
    pub fn extend(&mut self, other: &Self) {
        if self.len.is_multiple_of(8) {
            self.bytes.extend_from_slice(&other.bytes);
            self.len += other.len;
            return;
        }
        let start = self.len;
        self.len += other.len;
        self.bytes.resize(self.len.div_ceil(8), 0);
        for i in 0..other.len {
            if other.get(i) {
                self.set(start + i, true);
            }
        }
    }

    /// Appends one bit.
    pub fn push(&mut self, bit: bool) {
        self.len += 1;
        if self.bytes.len() < self.len.div_ceil(8) {
            self.bytes.push(0);
        }
        self.set(self.len - 1, bit);
    }

    /// Sub-vector `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        if start + len > self.len {
            return Err(Error::LengthMismatch {
                expected: start + len,
                got: self.len,
            });
        }
        if start.is_multiple_of(8) {
            return Self::from_bytes(&self.bytes[start / 8..], len);
        }
        let mut out = Self::zeros(len);
        for i in 0..len {
            out.set(i, self.get(start + i));
        }
        Ok(out)
    }

    /// Splits into consecutive chunks of `chunk` bits; the length must divide evenly.
    pub fn chunks(&self, chunk: usize) -> Result<Vec<Self>> {
        if chunk == 0 {
            return if self.len == 0 {
                Ok(Vec::new())
            } else {
                Err(Error::Decode("zero chunk size".into()))
            };
        }
        if !self.len.is_multiple_of(chunk) {
            return Err(Error::LengthMismatch {
                expected: self.len.next_multiple_of(chunk),
                got: self.len,
            });
        }
        (0..self.len / chunk)
            .map(|i| self.slice(i * chunk, chunk))
            .collect()
    }

    fn clear_padding(&mut self) {
        let rem = self.len % 8;
        if rem != 0 {
            if let Some(last) = self.bytes.last_mut() {
                *last &= (1u8 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "BitVec({self})")
        } else {
            write!(f, "BitVec(len={}, weight={})", self.len, self.weight())
        }
    }
}

impl FromStr for BitVec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Decode(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bools(&bits))
    }
}

/// `⊕ᵢ a[i]·b[i]` for equal-length vectors.
pub fn gf2_inner(a: &BitVec, b: &BitVec) -> Result<bool> {
    ensure_len(a.len, b.len)?;
    let ones: u32 = a
        .bytes
        .iter()
        .zip(&b.bytes)
        .map(|(x, y)| (x & y).count_ones())
        .sum();
    Ok(ones % 2 == 1)
}

/// The strings `α_j^b` recovered for each of `w` blocks, both choices per block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockTable {
    w: usize,
    u: usize,
    entries: Vec<[BitVec; 2]>,
}

impl BlockTable {
    /// Validates that every entry has length `u`.
    pub fn new(u: usize, entries: Vec<[BitVec; 2]>) -> Result<Self> {
        for pair in &entries {
            ensure_len(u, pair[0].len())?;
            ensure_len(u, pair[1].len())?;
        }
        Ok(Self {
            w: entries.len(),
            u,
            entries,
        })
    }

    /// Number of blocks.
    pub fn w(&self) -> usize {
        self.w
    }

    /// Block length in bits.
    pub fn u(&self) -> usize {
        self.u
    }

    /// Entry `α_j^b`.
    pub fn entry(&self, j: usize, b: bool) -> &BitVec {
        &self.entries[j][usize::from(b)]
    }

    /// `d*[j] = ⟨c_j, α_j⁰ ⊕ α_j¹⟩` for a vector `c` of length `w·u`.
    pub fn correction(&self, c: &BitVec) -> Result<BitVec> {
        ensure_len(self.w * self.u, c.len())?;
        let mut out = BitVec::zeros(self.w);
        for (j, pair) in self.entries.iter().enumerate() {
            let cj = c.slice(j * self.u, self.u)?;
            out.set(j, gf2_inner(&cj, &pair[0].xor(&pair[1])?)?);
        }
        Ok(out)
    }
}

/// `α₁^{x[1]} ‖ … ‖ α_w^{x[w]}`.
pub fn block_recompose(t: &BlockTable, x: &BitVec) -> Result<BitVec> {
    ensure_len(t.w, x.len())?;
    Ok(BitVec::concat_all((0..t.w).map(|j| t.entry(j, x.get(j)))))
}

/// Uniform sample from `{w : ⟨w, delta⟩ = theta}`; uniform over all strings when `delta = 0`.
pub fn coset_sample<R: Rng + ?Sized>(delta: &BitVec, theta: bool, rng: &mut R) -> Result<BitVec> {
    let mut w = BitVec::random(delta.len(), rng);
    let Some(pivot) = (0..delta.len()).find(|&i| delta.get(i)) else {
        return if theta { Err(Error::EmptyCoset) } else { Ok(w) };
    };
    w.set(pivot, false);
    let parity = gf2_inner(&w, delta)?;
    w.set(pivot, parity ^ theta);
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn bv(s: &str) -> BitVec {
        s.parse().unwrap()
    }

    #[test]
    fn inner_product_examples() {
        assert!(gf2_inner(&bv("101"), &bv("110")).unwrap());
        assert!(!gf2_inner(&bv("0000"), &bv("1011")).unwrap());
        assert!(!gf2_inner(&bv("1111"), &bv("1111")).unwrap());
        assert!(matches!(
            gf2_inner(&bv("1"), &bv("11")),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn recompose_examples() {
        let t = BlockTable::new(2, vec![[bv("00"), bv("11")], [bv("01"), bv("10")]]).unwrap();
        assert_eq!(block_recompose(&t, &bv("10")).unwrap(), bv("1101"));
        assert_eq!(block_recompose(&t, &bv("00")).unwrap(), bv("0001"));
        let empty = BlockTable::new(0, vec![[bv(""), bv("")]; 3]).unwrap();
        assert!(block_recompose(&empty, &bv("101")).unwrap().is_empty());
        assert!(block_recompose(&t, &bv("1")).is_err());
    }

    #[test]
    fn coset_sample_example() {
        let mut rng = rng_from_seed(1);
        let delta = bv("010");
        let mut counts = std::collections::HashMap::new();
        for _ in 0..4000 {
            let w = coset_sample(&delta, false, &mut rng).unwrap();
            *counts.entry(w.to_string()).or_insert(0usize) += 1;
        }
        let mut keys: Vec<_> = counts.keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, vec!["000", "001", "100", "101"]);
        assert!(counts.values().all(|&c| (850..1150).contains(&c)));
        assert_eq!(
            coset_sample(&bv("000"), true, &mut rng),
            Err(Error::EmptyCoset)
        );
        assert_eq!(coset_sample(&bv("000"), false, &mut rng).unwrap().len(), 3);
    }

    #[test]
    fn slicing_and_concat() {
        let a = bv("1011001");
        let b = bv("01");
        let c = a.concat(&b);
        assert_eq!(c.to_string(), "101100101");
        assert_eq!(c.slice(3, 4).unwrap().to_string(), "1001");
        assert_eq!(c.chunks(3).unwrap().len(), 3);
        assert_eq!(BitVec::from_u64(0b110, 3).to_string(), "011");
        assert_eq!(bv("011").to_u64(), 6);
    }
}
