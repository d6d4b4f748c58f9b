//! Claw-free function generator interface with a toy instantiation.
//!
//! The toy family on `X = {0,1}^w` (even `w ≤ 64`) is
//! `f(x) = P(min(x, x ⊕ fold))` where `P` is a keyed 4-round Feistel
//! permutation and `fold` is `0` (injective mode) or a nonzero `δ` (two-to-one
//! mode, claws `{x, x ⊕ δ}`). Both modes publish the same fields so that `Chk`
//! is evaluable from the public parameters.
//!
//! This instantiation is functionally faithful only: the fold is public, so
//! anyone can compute claws. It offers neither mode indistinguishability nor
//! the adaptive hardcore property.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::bits::BitVec;
use crate::branch::{BranchState, Registers};
use crate::codec::{Reader, Writer};
use crate::error::{ensure_len, Error, Result};
use crate::garble::{CircuitBuilder, Wire};

const ROUNDS: usize = 4;
const PP_TAG: u8 = 0x21;
const TD_TAG: u8 = 0x22;

/// Generator mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NtcfMode {
    /// Injective (`mode = 1`).
    Injective,
    /// Two-to-one (`mode = 2`).
    TwoToOne,
}

/// Public parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NtcfPp {
    w: usize,
    seed: [u8; 32],
    keys: [u64; ROUNDS],
    fold: u64,
}

/// Trapdoor: public parameters plus the claw difference in two-to-one mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NtcfTd {
    pp: NtcfPp,
    delta: Option<BitVec>,
}

/// Preimages of an image point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preimage {
    /// The unique preimage (injective mode).
    Single(BitVec),
    /// The ordered claw `x₀ < x₁` (two-to-one mode).
    Claw(BitVec, BitVec),
}

fn mask(bits: usize) -> u64 {
    if bits == 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

fn rotl(v: u64, k: usize, h: usize) -> u64 {
    if h == 0 {
        return 0;
    }
    let k = k % h;
    if k == 0 {
        v & mask(h)
    } else {
        ((v << k) | (v >> (h - k))) & mask(h)
    }
}

impl NtcfPp {
    fn build(w: usize, seed: [u8; 32], fold: u64) -> Result<Self> {
        if w < 2 || !w.is_multiple_of(2) || w > 64 {
            return Err(Error::InvalidParams(format!(
                "preimage length must be even and in 2..=64, got {w}"
            )));
        }
        if fold & !mask(w) != 0 {
            return Err(Error::InvalidParams(
                "fold exceeds the preimage length".into(),
            ));
        }
        let mut keyrng = ChaCha20Rng::from_seed(seed);
        let h = w / 2;
        let keys = std::array::from_fn(|_| keyrng.next_u64() & mask(h));
        Ok(Self {
            w,
            seed,
            keys,
            fold,
        })
    }

    /// Injective-mode parameters from a seed.
    pub fn injective(w: usize, seed: [u8; 32]) -> Result<Self> {
        Self::build(w, seed, 0)
    }

    /// Two-to-one parameters with claw difference `delta`; rejects `delta = 0`.
    pub fn two_to_one(w: usize, seed: [u8; 32], delta: &BitVec) -> Result<Self> {
        ensure_len(w, delta.len())?;
        if delta.is_zero() {
            return Err(Error::InvalidParams(
                "claw difference must be nonzero".into(),
            ));
        }
        Self::build(w, seed, delta.to_u64())
    }

    /// Preimage length.
    pub fn w(&self) -> usize {
        self.w
    }

    /// The public fold (zero in injective mode).
    pub fn fold(&self) -> BitVec {
        BitVec::from_u64(self.fold, self.w)
    }

    fn half(&self) -> usize {
        self.w / 2
    }

    fn round_fn(&self, r: u64, k: u64) -> u64 {
        let h = self.half();
        (rotl(r, 1, h) & rotl(r, 2, h)) ^ rotl(r, 3, h) ^ k
    }

    fn permute(&self, x: u64) -> u64 {
        let h = self.half();
        let (mut l, mut r) = (x & mask(h), x >> h);
        for &k in &self.keys {
            (l, r) = (r, l ^ self.round_fn(r, k));
        }
        l | (r << h)
    }

    fn unpermute(&self, y: u64) -> u64 {
        let h = self.half();
        let (mut l, mut r) = (y & mask(h), y >> h);
        for &k in self.keys.iter().rev() {
            (l, r) = (r ^ self.round_fn(l, k), l);
        }
        l | (r << h)
    }

    fn canonical(&self, x: u64) -> u64 {
        x.min(x ^ self.fold)
    }

    fn f(&self, x: u64) -> u64 {
        self.permute(self.canonical(x))
    }

    /// `f(x)` as a bit string.
    pub fn eval(&self, x: &BitVec) -> Result<BitVec> {
        ensure_len(self.w, x.len())?;
        Ok(BitVec::from_u64(self.f(x.to_u64()), self.w))
    }

    /// Builds `f` over circuit wires (least-significant bit first).
    pub fn eval_circuit(&self, b: &mut CircuitBuilder, x: &[Wire]) -> Vec<Wire> {
        assert_eq!(x.len(), self.w, "input width mismatch");
        let h = self.half();
        let fold = self.fold();
        let canon = if self.fold == 0 {
            x.to_vec()
        } else {
            let top = 63 - self.fold.leading_zeros() as usize;
            let pick = x[top];
            x.iter()
                .zip(fold.iter())
                .map(|(&xi, d)| if d { b.xor(xi, pick) } else { xi })
                .collect()
        };
        let (mut l, mut r) = (canon[..h].to_vec(), canon[h..].to_vec());
        let rot = |v: &[Wire], k: usize| -> Vec<Wire> {
            (0..h).map(|i| v[(i + h - k % h) % h]).collect()
        };
        for &k in &self.keys {
            let (r1, r2, r3) = (rot(&r, 1), rot(&r, 2), rot(&r, 3));
            let f: Vec<Wire> = (0..h)
                .map(|i| {
                    let a = b.and(r1[i], r2[i]);
                    let t = b.xor(a, r3[i]);
                    b.xor(t, Wire::Const(k >> i & 1 == 1))
                })
                .collect();
            let nr = b.xor_bits(&l, &f);
            l = r;
            r = nr;
        }
        l.extend(r);
        l
    }

    /// Writes the parameters: tag, `w`, seed, fold.
    pub fn encode(&self, w: &mut Writer) {
        w.u8(PP_TAG);
        w.u8(self.w as u8);
        w.raw(&self.seed);
        w.u64(self.fold);
    }

    /// Inverse of [`Self::encode`].
    pub fn decode(r: &mut Reader<'_>) -> Result<Self> {
        if r.u8()? != PP_TAG {
            return Err(Error::Decode("not claw-free parameters".into()));
        }
        let w = r.u8()? as usize;
        let seed: [u8; 32] = r.raw(32)?.try_into().expect("32 bytes");
        let fold = r.u64()?;
        Self::build(w, seed, fold).map_err(|e| Error::Decode(e.to_string()))
    }
}

impl NtcfTd {
    /// The public parameters.
    pub fn pp(&self) -> &NtcfPp {
        &self.pp
    }

    /// Generator mode.
    pub fn mode(&self) -> NtcfMode {
        if self.delta.is_some() {
            NtcfMode::TwoToOne
        } else {
            NtcfMode::Injective
        }
    }

    /// The claw difference, if two-to-one.
    pub fn delta(&self) -> Option<&BitVec> {
        self.delta.as_ref()
    }

    /// Writes the trapdoor: tag, parameters, optional `δ`.
    pub fn encode(&self, w: &mut Writer) {
        w.u8(TD_TAG);
        self.pp.encode(w);
        match &self.delta {
            Some(d) => {
                w.u8(1);
                w.bits(d);
            }
            None => w.u8(0),
        }
    }

    /// Inverse of [`Self::encode`].
    pub fn decode(r: &mut Reader<'_>) -> Result<Self> {
        if r.u8()? != TD_TAG {
            return Err(Error::Decode("not a claw-free trapdoor".into()));
        }
        let pp = NtcfPp::decode(r)?;
        let delta = match r.u8()? {
            0 => None,
            1 => Some(r.bits()?),
            _ => return Err(Error::Decode("bad trapdoor flag".into())),
        };
        if delta.as_ref().map(BitVec::to_u64).unwrap_or(0) != pp.fold {
            return Err(Error::Decode(
                "trapdoor does not match its parameters".into(),
            ));
        }
        Ok(Self { pp, delta })
    }
}

/// Samples parameters and trapdoor in the given mode.
pub fn ntcf_func_gen<R: RngCore + ?Sized>(
    w: usize,
    mode: NtcfMode,
    rng: &mut R,
) -> Result<(NtcfPp, NtcfTd)> {
    let mut seed = [0u8; 32];
    rng.fill_bytes(&mut seed);
    match mode {
        NtcfMode::Injective => {
            let pp = NtcfPp::injective(w, seed)?;
            Ok((pp.clone(), NtcfTd { pp, delta: None }))
        }
        NtcfMode::TwoToOne => {
            if !(2..=64).contains(&w) {
                return Err(Error::InvalidParams(format!(
                    "preimage length must be in 2..=64, got {w}"
                )));
            }
            let delta = loop {
                let d = BitVec::random(w, rng);
                if !d.is_zero() {
                    break d;
                }
            };
            let pp = NtcfPp::two_to_one(w, seed, &delta)?;
            Ok((
                pp.clone(),
                NtcfTd {
                    pp,
                    delta: Some(delta),
                },
            ))
        }
    }
}

/// Claw-state generation: returns `y` and the state over register `x`.
pub fn ntcf_state_gen<R: Rng + ?Sized>(
    pp: &NtcfPp,
    god: &NtcfTd,
    rng: &mut R,
) -> Result<(BitVec, BranchState)> {
    if &god.pp != pp {
        return Err(Error::InvalidParams(
            "trapdoor does not match the parameters".into(),
        ));
    }
    let x = BitVec::random(pp.w, rng).to_u64();
    match &god.delta {
        None => {
            let y = BitVec::from_u64(pp.f(x), pp.w);
            Ok((
                y,
                BranchState::classical(Registers::single("x", BitVec::from_u64(x, pp.w))),
            ))
        }
        Some(d) => {
            let x0 = pp.canonical(x);
            let x1 = x0 ^ d.to_u64();
            let y = BitVec::from_u64(pp.f(x0), pp.w);
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let state = BranchState::make_state(vec![
                (h, Registers::single("x", BitVec::from_u64(x0, pp.w))),
                (h, Registers::single("x", BitVec::from_u64(x1, pp.w))),
            ])?;
            Ok((y, state))
        }
    }
}

/// `f(x) = y`; false on length mismatch.
pub fn ntcf_chk(pp: &NtcfPp, x: &BitVec, y: &BitVec) -> bool {
    x.len() == pp.w && y.len() == pp.w && pp.f(x.to_u64()) == y.to_u64()
}

/// Preimages of `y`, `None` off the image.
pub fn ntcf_invert(td: &NtcfTd, y: &BitVec) -> Option<Preimage> {
    let pp = &td.pp;
    if y.len() != pp.w {
        return None;
    }
    let z = pp.unpermute(y.to_u64());
    match &td.delta {
        None => Some(Preimage::Single(BitVec::from_u64(z, pp.w))),
        Some(d) => {
            let z1 = z ^ d.to_u64();
            (z < z1).then(|| Preimage::Claw(BitVec::from_u64(z, pp.w), BitVec::from_u64(z1, pp.w)))
        }
    }
}

/// `y` lies in the image and `d ≠ 0`.
pub fn ntcf_good_set(td: &NtcfTd, y: &BitVec, d: &BitVec) -> bool {
    d.len() == td.pp.w && !d.is_zero() && ntcf_invert(td, y).is_some()
}
