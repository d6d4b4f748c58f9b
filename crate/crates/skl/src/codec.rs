//! Little byte-level writer and reader used by every serialized format.
//!
//! Integers are little-endian; variable-size blobs carry a 32-bit length
//! prefix. Readers fail with [`Error::Decode`] on truncation.

use crate::bits::BitVec;
use crate::error::{Error, Result};

/// Append-only byte sink.
#[derive(Default, Debug, Clone)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    /// Empty writer.
    pub fn new() -> Self {
        Self::default()
    }

    /// Finished bytes.
    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }

    /// One byte.
    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    /// 32-bit little-endian integer.
    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    /// A length that must fit 32 bits.
    pub fn len(&mut self, v: usize) {
        self.u32(u32::try_from(v).expect("length fits 32 bits"));
    }

    /// 64-bit little-endian integer.
    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    /// IEEE-754 double.
    pub fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    /// Raw bytes without a prefix.
    pub fn raw(&mut self, bytes: &[u8]) {
        self.buf.extend_from_slice(bytes);
    }

    /// Length-prefixed bytes.
    pub fn blob(&mut self, bytes: &[u8]) {
        self.len(bytes.len());
        self.raw(bytes);
    }

    /// Bit vector: 32-bit bit length, then packed bytes.
    pub fn bits(&mut self, v: &BitVec) {
        self.len(v.len());
        self.raw(v.as_bytes());
    }

    /// UTF-8 string, length-prefixed.
    pub fn str(&mut self, s: &str) {
        self.blob(s.as_bytes());
    }
}

/// Cursor over a byte slice.
#[derive(Debug, Clone)]
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    /// Reader positioned at the start of `buf`.
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    /// Bytes not yet consumed.
    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    /// Fails unless every byte was consumed.
    pub fn finish(&self) -> Result<()> {
        if self.remaining() == 0 {
            Ok(())
        } else {
            Err(Error::Decode(format!(
                "{} trailing bytes",
                self.remaining()
            )))
        }
    }

    /// Next `n` raw bytes.
    pub fn raw(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(Error::Decode(format!(
                "truncated input: need {n}, have {}",
                self.remaining()
            )));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    /// One byte.
    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.raw(1)?[0])
    }

    /// 32-bit little-endian integer.
    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.raw(4)?.try_into().expect("4 bytes"),
        ))
    }

    /// A 32-bit length, bounded by the remaining input when `per_item` bytes are implied per unit.
    pub fn len(&mut self, per_item: usize) -> Result<usize> {
        let n = self.u32()? as usize;
        if per_item > 0 && n.saturating_mul(per_item) > self.remaining() {
            return Err(Error::Decode(format!("declared count {n} exceeds input")));
        }
        Ok(n)
    }

    /// 64-bit little-endian integer.
    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(
            self.raw(8)?.try_into().expect("8 bytes"),
        ))
    }

    /// IEEE-754 double.
    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(
            self.raw(8)?.try_into().expect("8 bytes"),
        ))
    }

    /// Length-prefixed bytes.
    pub fn blob(&mut self) -> Result<&'a [u8]> {
        let n = self.len(1)?;
        self.raw(n)
    }

    /// Bit vector written by [`Writer::bits`].
    pub fn bits(&mut self) -> Result<BitVec> {
        let n = self.u32()? as usize;
        let bytes = self.raw(n.div_ceil(8))?;
        let v = BitVec::from_bytes(bytes, n)?;
        if v.as_bytes() != bytes {
            return Err(Error::Decode("nonzero padding bits".into()));
        }
        Ok(v)
    }

    /// UTF-8 string.
    pub fn str(&mut self) -> Result<String> {
        String::from_utf8(self.blob()?.to_vec()).map_err(|e| Error::Decode(e.to_string()))
    }
}
