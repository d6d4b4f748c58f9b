//! Lattice dual-mode oblivious transfer (PVW over LWE).
//!
//! The CRS is `(A, v)`. In hiding mode `vᵀ = sᵀA + eᵀ`; in extraction mode
//! `v` is uniform. The receiver with choice `b` publishes `u₀` where
//! `u_b = rᵀA + e'ᵀ` and `u₁ = u₀ + v`. The sender encrypts `z_β` under `u_β`
//! Regev-style, `w_β = (A·t_β, u_βᵀt_β + z_β·⌊q/2⌋)`, and the receiver
//! decodes with `r`.
//!
//! A second message may carry a string of payload bits under the same first
//! message: every bit uses fresh sender randomness.

use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::bits::BitVec;
use crate::branch::{BranchState, Registers};
use crate::codec::{Reader, Writer};
use crate::error::{ensure_len, Error, Result};
use crate::modq::{
    invert_lwe, is_messy, trap_gen, GadgetTrapdoor, LatticeParams, ModQMatrix, ModQVector, Scalar,
};

/// Message-type tag of an encoded first message.
pub const MSG1_TAG: u8 = 0x11;
/// Message-type tag of an encoded second message.
pub const MSG2_TAG: u8 = 0x12;

/// CRS mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Extraction mode (`mode = 1`): the receiver's choice can be extracted.
    Extractable,
    /// Hiding mode (`mode = 2`): the receiver's message hides the choice statistically.
    Hiding,
}

impl Mode {
    /// Numeric label, 1 or 2.
    pub fn number(self) -> u8 {
        match self {
            Mode::Extractable => 1,
            Mode::Hiding => 2,
        }
    }

    /// Parses 1 or 2.
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Mode::Extractable),
            2 => Ok(Mode::Hiding),
            _ => Err(Error::InvalidParams(format!(
                "mode must be 1 or 2, got {n}"
            ))),
        }
    }
}

/// Public CRS `(A, v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OtCrs<S: Scalar> {
    a: Arc<ModQMatrix<S>>,
    v: ModQVector<S>,
}

impl<S: Scalar> OtCrs<S> {
    /// The matrix `A`.
    pub fn a(&self) -> &ModQMatrix<S> {
        &self.a
    }

    /// The vector `v`.
    pub fn v(&self) -> &ModQVector<S> {
        &self.v
    }
}

/// Trapdoor `(A, T, v)` with its mode.
#[derive(Clone, Debug)]
pub struct OtTrapdoor<S: Scalar> {
    td: GadgetTrapdoor<S>,
    v: ModQVector<S>,
    mode: Mode,
}

impl<S: Scalar> OtTrapdoor<S> {
    /// CRS mode.
    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// The gadget trapdoor for `A`.
    pub fn gadget(&self) -> &GadgetTrapdoor<S> {
        &self.td
    }

    /// The CRS vector `v`.
    pub fn v(&self) -> &ModQVector<S> {
        &self.v
    }
}

/// Receiver secret `r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OtReceiverState<S: Scalar> {
    /// The LWE secret of the receiver message.
    pub r: ModQVector<S>,
}

impl<S: Scalar> OtReceiverState<S> {
    /// Fixed-width serialization: `n` canonical residues, big-endian, as bits.
    pub fn to_bits(&self, p: &LatticeParams<S>) -> BitVec {
        let bytes = self.r.to_fixed_bytes(p.modulus());
        BitVec::from_bytes(&bytes, bytes.len() * 8).expect("whole bytes")
    }

    /// Inverse of [`Self::to_bits`].
    pub fn from_bits(p: &LatticeParams<S>, bits: &BitVec) -> Result<Self> {
        ensure_len(state_bits(p), bits.len())?;
        Ok(Self {
            r: ModQVector::from_fixed_bytes(p.modulus(), bits.as_bytes())?,
        })
    }
}

/// Bit length of a serialized receiver state.
pub fn state_bits<S: Scalar>(p: &LatticeParams<S>) -> usize {
    p.n() * p.modulus().byte_len() * 8
}

/// Sender message: one `(w₀, w₁)` pair per payload bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OtMsg2<S: Scalar> {
    pairs: Vec<[ModQVector<S>; 2]>,
}

impl<S: Scalar> OtMsg2<S> {
    /// Number of payload bits.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    /// True for an empty payload.
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The `(w₀, w₁)` pairs.
    pub fn pairs(&self) -> &[[ModQVector<S>; 2]] {
        &self.pairs
    }

    /// Writes the tagged message.
    pub fn encode(&self, p: &LatticeParams<S>, w: &mut Writer) {
        w.u8(MSG2_TAG);
        w.len(self.pairs.len());
        for [w0, w1] in &self.pairs {
            w0.encode(p.modulus(), w);
            w1.encode(p.modulus(), w);
        }
    }

    /// Reads a message written by [`Self::encode`], checking dimensions.
    pub fn decode(p: &LatticeParams<S>, r: &mut Reader<'_>) -> Result<Self> {
        expect_tag(r, MSG2_TAG)?;
        let count = r.len(8)?;
        let mut pairs = Vec::with_capacity(count);
        for _ in 0..count {
            let w0 = ModQVector::decode(p.modulus(), r)?;
            let w1 = ModQVector::decode(p.modulus(), r)?;
            ensure_len(p.n() + 1, w0.len())?;
            ensure_len(p.n() + 1, w1.len())?;
            pairs.push([w0, w1]);
        }
        Ok(Self { pairs })
    }
}

/// Writes a tagged first message.
pub fn encode_msg1<S: Scalar>(p: &LatticeParams<S>, msg1: &ModQVector<S>, w: &mut Writer) {
    w.u8(MSG1_TAG);
    msg1.encode(p.modulus(), w);
}

/// Reads a tagged first message, checking its length.
pub fn decode_msg1<S: Scalar>(p: &LatticeParams<S>, r: &mut Reader<'_>) -> Result<ModQVector<S>> {
    expect_tag(r, MSG1_TAG)?;
    let v = ModQVector::decode(p.modulus(), r)?;
    ensure_len(p.m(), v.len())?;
    Ok(v)
}

fn expect_tag(r: &mut Reader<'_>, tag: u8) -> Result<()> {
    let got = r.u8()?;
    if got == tag {
        Ok(())
    } else {
        Err(Error::Decode(format!(
            "expected message tag {tag:#04x}, found {got:#04x}"
        )))
    }
}

/// Samples a CRS and its trapdoor.
pub fn ot_crs_gen<S: Scalar, R: RngCore + ?Sized>(
    p: &LatticeParams<S>,
    mode: Mode,
    rng: &mut R,
) -> (OtCrs<S>, OtTrapdoor<S>) {
    let md = p.modulus();
    let td = trap_gen(p, rng);
    let v = match mode {
        Mode::Hiding => {
            let s = ModQVector::random(md, p.n(), rng);
            let e = ModQVector::from_i128s(md, &p.crs_noise().sample_vec(p.m(), rng));
            td.matrix()
                .left_mul(md, &s)
                .and_then(|sa| sa.add(md, &e))
                .expect("dimensions agree")
        }
        Mode::Extractable => ModQVector::random(md, p.m(), rng),
    };
    (
        OtCrs {
            a: td.matrix_arc(),
            v: v.clone(),
        },
        OtTrapdoor { td, v, mode },
    )
}

/// `u_b = rᵀA + e'ᵀ` with fresh `r`, returning `(r, e', u_b)`.
fn lwe_sample<S: Scalar, R: RngCore + ?Sized>(
    p: &LatticeParams<S>,
    a: &ModQMatrix<S>,
    rng: &mut R,
) -> (ModQVector<S>, Vec<i128>, ModQVector<S>) {
    let md = p.modulus();
    let r = ModQVector::random(md, p.n(), rng);
    let e = p.receiver_noise().sample_vec(p.m(), rng);
    let u = a
        .left_mul(md, &r)
        .and_then(|ra| ra.add(md, &ModQVector::from_i128s(md, &e)))
        .expect("dimensions agree");
    (r, e, u)
}

/// `u₁ = u₀ + v` or `u₀ = u₁ − v`.
fn shift<S: Scalar>(
    p: &LatticeParams<S>,
    v: &ModQVector<S>,
    u: &ModQVector<S>,
    add: bool,
) -> ModQVector<S> {
    if add {
        u.add(p.modulus(), v)
    } else {
        u.sub(p.modulus(), v)
    }
    .expect("lengths agree")
}

/// Receiver's first message for choice `b`.
pub fn ot_receive1<S: Scalar, R: RngCore + ?Sized>(
    p: &LatticeParams<S>,
    crs: &OtCrs<S>,
    b: bool,
    rng: &mut R,
) -> (ModQVector<S>, OtReceiverState<S>) {
    let (r, _, ub) = lwe_sample(p, &crs.a, rng);
    let msg1 = if b { shift(p, &crs.v, &ub, false) } else { ub };
    (msg1, OtReceiverState { r })
}

/// Sender's reply carrying payload strings `z0`, `z1` of equal length.
pub fn ot_send<S: Scalar, R: RngCore + ?Sized>(
    p: &LatticeParams<S>,
    crs: &OtCrs<S>,
    msg1: &ModQVector<S>,
    z0: &BitVec,
    z1: &BitVec,
    rng: &mut R,
) -> Result<OtMsg2<S>> {
    ensure_len(p.m(), msg1.len())?;
    ensure_len(z0.len(), z1.len())?;
    let md = p.modulus();
    let keys = [msg1.clone(), shift(p, &crs.v, msg1, true)];
    let pairs = (0..z0.len())
        .map(|j| {
            let enc = |beta: usize, bit: bool, rng: &mut R| {
                let t = p.sender_noise().sample_vec(p.m(), rng);
                let mut w = crs
                    .a
                    .mul_signed(md, &t)
                    .expect("dimensions agree")
                    .entries()
                    .to_vec();
                let mut last = S::signed_dot(keys[beta].entries(), &t, md.q());
                if bit {
                    last = md.add(&last, md.half());
                }
                w.push(last);
                ModQVector::from_entries(w)
            };
            [enc(0, z0.get(j), rng), enc(1, z1.get(j), rng)]
        })
        .collect();
    Ok(OtMsg2 { pairs })
}

/// Single-bit convenience wrapper around [`ot_send`].
pub fn ot_send_bit<S: Scalar, R: RngCore + ?Sized>(
    p: &LatticeParams<S>,
    crs: &OtCrs<S>,
    msg1: &ModQVector<S>,
    z0: bool,
    z1: bool,
    rng: &mut R,
) -> Result<OtMsg2<S>> {
    ot_send(
        p,
        crs,
        msg1,
        &BitVec::from_bools(&[z0]),
        &BitVec::from_bools(&[z1]),
        rng,
    )
}

/// Simulated sender reply: both payloads set to `zb`.
pub fn ot_simulate_send<S: Scalar, R: RngCore + ?Sized>(
    p: &LatticeParams<S>,
    crs: &OtCrs<S>,
    msg1: &ModQVector<S>,
    zb: &BitVec,
    rng: &mut R,
) -> Result<OtMsg2<S>> {
    ot_send(p, crs, msg1, zb, zb, rng)
}

/// Decodes `z_b`: each bit is 0 iff `|w_{b,n+1} − rᵀw_{b,[1,n]}| < q/4`.
pub fn ot_receive2<S: Scalar>(
    p: &LatticeParams<S>,
    b: bool,
    st: &OtReceiverState<S>,
    msg2: &OtMsg2<S>,
) -> Result<BitVec> {
    ensure_len(p.n(), st.r.len())?;
    let md = p.modulus();
    let n = p.n();
    let bits = msg2
        .pairs
        .iter()
        .map(|pair| {
            let w = &pair[usize::from(b)];
            ensure_len(n + 1, w.len())?;
            let head = ModQVector::from_entries(w.entries()[..n].to_vec());
            let res = md.sub(w.get(n), &st.r.dot(md, &head)?);
            Ok(md.centered_abs(&res) >= *md.quarter())
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(BitVec::from_bools(&bits))
}

/// Recovers the receiver state for each choice bit; `None` where inversion fails.
pub fn ot_sta_rcv<S: Scalar>(
    p: &LatticeParams<S>,
    td: &OtTrapdoor<S>,
    msg1: &ModQVector<S>,
) -> Result<[Option<OtReceiverState<S>>; 2]> {
    if td.mode != Mode::Hiding {
        return Err(Error::InvalidParams(
            "state recovery needs a hiding-mode trapdoor".into(),
        ));
    }
    ensure_len(p.m(), msg1.len())?;
    let u1 = shift(p, &td.v, msg1, true);
    let rec = |u: &ModQVector<S>| {
        Ok::<_, Error>(invert_lwe(p, &td.td, u)?.map(|(r, _)| OtReceiverState { r }))
    };
    Ok([rec(msg1)?, rec(&u1)?])
}

/// Extracts the receiver's choice: the bit of the unique non-messy branch, `None` otherwise.
pub fn ot_extract<S: Scalar>(
    p: &LatticeParams<S>,
    td: &OtTrapdoor<S>,
    msg1: &ModQVector<S>,
) -> Result<Option<bool>> {
    if td.mode != Mode::Extractable {
        return Err(Error::InvalidParams(
            "extraction needs an extraction-mode trapdoor".into(),
        ));
    }
    ensure_len(p.m(), msg1.len())?;
    let u1 = shift(p, &td.v, msg1, true);
    let beta0 = is_messy(p, &td.td, msg1)?;
    let beta1 = is_messy(p, &td.td, &u1)?;
    Ok(match (beta0, beta1) {
        (true, false) => Some(true),
        (false, true) => Some(false),
        _ => None,
    })
}

/// Result of the coherent first-message step on a list of weighted choices.
#[derive(Clone, Debug)]
pub(crate) struct CoherentStep<S: Scalar> {
    pub msg1: ModQVector<S>,
    /// Receiver state per branch; `None` for a branch that collapsed away.
    pub states: Vec<Option<OtReceiverState<S>>>,
    /// Unnormalized amplitudes after measuring `msg1`.
    pub amplitudes: Vec<f64>,
}

/// Runs the receiver isometry on `Σ α_k |b_k⟩` and measures the first message.
///
/// The outcome is drawn from `Σ α_k² P_{b_k}` by choosing an anchor branch with
/// probability `α_k²` and sampling its honest message. The other branch keeps
/// the unique state consistent with that message, with amplitude scaled by
/// `√pmf(e')` relative to the anchor; it vanishes when no such state exists
/// within the noise support.
pub(crate) fn coherent_step<S: Scalar, R: Rng + ?Sized>(
    p: &LatticeParams<S>,
    crs: &OtCrs<S>,
    god: &OtTrapdoor<S>,
    branches: &[(f64, bool)],
    rng: &mut R,
) -> Result<CoherentStep<S>> {
    let total: f64 = branches.iter().map(|(a, _)| a * a).sum();
    if branches.is_empty() || total <= 0.0 {
        return Err(Error::InvalidState(
            "coherent receive on an empty state".into(),
        ));
    }
    let mut pick = rng.gen::<f64>() * total;
    let mut anchor = branches.len() - 1;
    for (k, (a, _)) in branches.iter().enumerate() {
        if pick < a * a {
            anchor = k;
            break;
        }
        pick -= a * a;
    }
    let b_anchor = branches[anchor].1;
    let (r, e_anchor, ub) = lwe_sample(p, &crs.a, rng);
    let msg1 = if b_anchor {
        shift(p, &crs.v, &ub, false)
    } else {
        ub.clone()
    };
    let anchor_state = OtReceiverState { r };
    let md = p.modulus();
    let bound = p.receiver_noise().bound();
    let anchor_norm: f64 = e_anchor.iter().map(|&x| (x as f64).powi(2)).sum();
    let sigma_sq = p.sigma_prime().powi(2);
    let mut states = Vec::with_capacity(branches.len());
    let mut amplitudes = Vec::with_capacity(branches.len());
    for &(alpha, b) in branches {
        if b == b_anchor {
            states.push(Some(anchor_state.clone()));
            amplitudes.push(alpha);
            continue;
        }
        let ub_other = if b {
            shift(p, &crs.v, &msg1, true)
        } else {
            msg1.clone()
        };
        match invert_lwe(p, &god.td, &ub_other)? {
            Some((r_other, e_other)) if e_other.norm_inf(md) <= md.from_i128(bound) => {
                let other_norm = e_other.norm2_sq(md);
                let ratio =
                    (-std::f64::consts::PI * (other_norm - anchor_norm) / (2.0 * sigma_sq)).exp();
                states.push(Some(OtReceiverState { r: r_other }));
                amplitudes.push(alpha * ratio);
            }
            _ => {
                states.push(None);
                amplitudes.push(0.0);
            }
        }
    }
    Ok(CoherentStep {
        msg1,
        states,
        amplitudes,
    })
}

/// Outcome of [`ot_coherent_receive1`].
#[derive(Clone, Debug)]
pub struct CoherentReceive<S: Scalar> {
    /// The measured first message.
    pub msg1: ModQVector<S>,
    /// The post-measurement state with the `st` register appended.
    pub state: BranchState,
    /// True when a branch vanished.
    pub collapsed: bool,
}

/// Coherent receiver on a state holding a 1-bit register `b`; appends register `st`.
pub fn ot_coherent_receive1<S: Scalar, R: Rng + ?Sized>(
    p: &LatticeParams<S>,
    crs: &OtCrs<S>,
    state: &BranchState,
    god: &OtTrapdoor<S>,
    rng: &mut R,
) -> Result<CoherentReceive<S>> {
    let choices = state
        .branches()
        .iter()
        .map(|br| {
            let b = br.registers.require("b")?;
            ensure_len(1, b.len())?;
            Ok((br.amplitude, b.get(0)))
        })
        .collect::<Result<Vec<_>>>()?;
    let step = coherent_step(p, crs, god, &choices, rng)?;
    let collapsed = step.states.iter().any(Option::is_none);
    let kept = state
        .branches()
        .iter()
        .zip(&step.states)
        .zip(&step.amplitudes)
        .filter_map(|((br, st), &amp)| {
            st.as_ref()
                .map(|st| (amp, br.registers.clone(), st.to_bits(p)))
        })
        .map(|(amp, regs, st)| {
            let mut pairs: Vec<(String, BitVec)> = regs
                .iter()
                .map(|(n, v)| (n.to_string(), v.clone()))
                .collect();
            pairs.push(("st".to_string(), st));
            Ok((amp, Registers::new(pairs)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoherentReceive {
        msg1: step.msg1,
        state: BranchState::make_state(kept)?,
        collapsed,
    })
}
