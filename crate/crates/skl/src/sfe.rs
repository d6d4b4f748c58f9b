//! Two-message dual-mode SFE: one OT per input bit plus a garbled circuit.
//!
//! The receiver's state `st` is the concatenation of the per-bit OT states,
//! each serialized to a fixed block of [`crate::ot::state_bits`] bits, so
//! that `st = α₁^{x[1]} ‖ … ‖ α_w^{x[w]}` for the table recovered by
//! [`sfe_sta_rcv`].

use rand::{Rng, RngCore};

use crate::bits::{BitVec, BlockTable};
use crate::branch::{BranchState, Registers};
use crate::codec::{Reader, Writer};
use crate::error::{ensure_len, Error, Result};
use crate::garble::{garble, gc_eval, gc_simulate, BoolCircuit, GarbledCircuit, Label, Topology};
use crate::modq::{LatticeParams, ModQVector, Scalar};
use crate::ot::{
    coherent_step, decode_msg1, encode_msg1, ot_crs_gen, ot_extract, ot_receive1, ot_receive2,
    ot_send, ot_simulate_send, ot_sta_rcv, state_bits, Mode, OtCrs, OtMsg2, OtReceiverState,
    OtTrapdoor,
};

/// One OT CRS per input bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SfeCrs<S: Scalar> {
    ots: Vec<OtCrs<S>>,
}

impl<S: Scalar> SfeCrs<S> {
    /// Input width.
    pub fn width(&self) -> usize {
        self.ots.len()
    }

    /// Per-bit CRSs.
    pub fn ots(&self) -> &[OtCrs<S>] {
        &self.ots
    }
}

/// One OT trapdoor per input bit, sharing a mode.
#[derive(Clone, Debug)]
pub struct SfeTrapdoor<S: Scalar> {
    ots: Vec<OtTrapdoor<S>>,
    mode: Mode,
}

impl<S: Scalar> SfeTrapdoor<S> {
    /// CRS mode.
    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Per-bit trapdoors.
    pub fn ots(&self) -> &[OtTrapdoor<S>] {
        &self.ots
    }
}

/// Receiver's first message: one OT first message per input bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SfeMsg1<S: Scalar> {
    /// Per-bit messages.
    pub msgs: Vec<ModQVector<S>>,
}

impl<S: Scalar> SfeMsg1<S> {
    /// Count-prefixed concatenation of tagged OT messages.
    pub fn encode(&self, p: &LatticeParams<S>, w: &mut Writer) {
        w.len(self.msgs.len());
        for m in &self.msgs {
            encode_msg1(p, m, w);
        }
    }

    /// Inverse of [`Self::encode`].
    pub fn decode(p: &LatticeParams<S>, r: &mut Reader<'_>) -> Result<Self> {
        let n = r.len(1)?;
        Ok(Self {
            msgs: (0..n).map(|_| decode_msg1(p, r)).collect::<Result<_>>()?,
        })
    }
}

/// Receiver state: one OT state per input bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SfeState<S: Scalar> {
    /// Per-bit states.
    pub states: Vec<OtReceiverState<S>>,
}

impl<S: Scalar> SfeState<S> {
    /// The concatenated `st` string.
    pub fn to_bits(&self, p: &LatticeParams<S>) -> BitVec {
        let parts: Vec<BitVec> = self.states.iter().map(|s| s.to_bits(p)).collect();
        BitVec::concat_all(&parts)
    }

    /// Splits an `st` string back into per-bit states.
    pub fn from_bits(p: &LatticeParams<S>, bits: &BitVec) -> Result<Self> {
        let u = state_bits(p);
        if u == 0 || !bits.len().is_multiple_of(u) {
            return Err(Error::LengthMismatch {
                expected: u,
                got: bits.len(),
            });
        }
        let states = bits
            .chunks(u)?
            .iter()
            .map(|c| OtReceiverState::from_bits(p, c))
            .collect::<Result<_>>()?;
        Ok(Self { states })
    }
}

/// Sender message: the garbled circuit and one OT reply per input wire carrying its label pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SfeMsg2<S: Scalar> {
    /// The garbled circuit.
    pub gc: GarbledCircuit,
    /// Per-wire OT replies.
    pub ots: Vec<OtMsg2<S>>,
}

impl<S: Scalar> SfeMsg2<S> {
    /// Count-prefixed OT replies followed by the garbled-circuit blob.
    pub fn encode(&self, p: &LatticeParams<S>, w: &mut Writer) {
        w.len(self.ots.len());
        for m in &self.ots {
            m.encode(p, w);
        }
        let mut g = Writer::new();
        self.gc.encode(&mut g);
        w.blob(&g.into_bytes());
    }

    /// Inverse of [`Self::encode`].
    pub fn decode(p: &LatticeParams<S>, r: &mut Reader<'_>) -> Result<Self> {
        let n = r.len(1)?;
        let ots = (0..n)
            .map(|_| OtMsg2::decode(p, r))
            .collect::<Result<Vec<_>>>()?;
        let blob = r.blob()?;
        let mut gr = Reader::new(blob);
        let gc = GarbledCircuit::decode(&mut gr)?;
        gr.finish()?;
        Ok(Self { gc, ots })
    }
}

/// Samples `w` OT CRSs in the given mode.
pub fn sfe_crs_gen<S: Scalar, R: RngCore + ?Sized>(
    p: &LatticeParams<S>,
    mode: Mode,
    w: usize,
    rng: &mut R,
) -> (SfeCrs<S>, SfeTrapdoor<S>) {
    let (ots, tds) = (0..w).map(|_| ot_crs_gen(p, mode, rng)).unzip();
    (SfeCrs { ots }, SfeTrapdoor { ots: tds, mode })
}

/// Classical first message for input `x`.
pub fn sfe_receive1<S: Scalar, R: RngCore + ?Sized>(
    p: &LatticeParams<S>,
    crs: &SfeCrs<S>,
    x: &BitVec,
    rng: &mut R,
) -> Result<(SfeMsg1<S>, SfeState<S>)> {
    ensure_len(crs.width(), x.len())?;
    let (msgs, states) = crs
        .ots
        .iter()
        .zip(x.iter())
        .map(|(c, b)| ot_receive1(p, c, b, rng))
        .unzip();
    Ok((SfeMsg1 { msgs }, SfeState { states }))
}

/// Outcome of [`sfe_coherent_receive1`].
#[derive(Clone, Debug)]
pub struct SfeCoherentReceive<S: Scalar> {
    /// The measured first message.
    pub msg1: SfeMsg1<S>,
    /// Post-measurement state with register `st` appended.
    pub state: BranchState,
    /// True when a branch vanished.
    pub collapsed: bool,
}

/// Coherent receiver over a state with a `w`-bit register `x`; appends register `st`.
pub fn sfe_coherent_receive1<S: Scalar, R: Rng + ?Sized>(
    p: &LatticeParams<S>,
    crs: &SfeCrs<S>,
    state: &BranchState,
    god: &SfeTrapdoor<S>,
    rng: &mut R,
) -> Result<SfeCoherentReceive<S>> {
    ensure_len(crs.width(), god.ots.len())?;
    let xs = state
        .branches()
        .iter()
        .map(|b| {
            let x = b.registers.require("x")?;
            ensure_len(crs.width(), x.len())?;
            Ok(x.clone())
        })
        .collect::<Result<Vec<BitVec>>>()?;
    let mut amps = state.amplitudes();
    let mut per_branch: Vec<Vec<OtReceiverState<S>>> =
        vec![Vec::with_capacity(crs.width()); xs.len()];
    let mut msgs = Vec::with_capacity(crs.width());
    for (j, (c, td)) in crs.ots.iter().zip(&god.ots).enumerate() {
        let alive: Vec<usize> = (0..xs.len()).filter(|&k| amps[k] > 0.0).collect();
        let choices: Vec<(f64, bool)> = alive.iter().map(|&k| (amps[k], xs[k].get(j))).collect();
        let step = coherent_step(p, c, td, &choices, rng)?;
        for (slot, &k) in alive.iter().enumerate() {
            match &step.states[slot] {
                Some(st) => {
                    per_branch[k].push(st.clone());
                    amps[k] = step.amplitudes[slot];
                }
                None => amps[k] = 0.0,
            }
        }
        msgs.push(step.msg1);
    }
    let collapsed = amps.iter().filter(|&&a| a > 0.0).count() < xs.len();
    let kept = state
        .branches()
        .iter()
        .enumerate()
        .filter(|(k, _)| amps[*k] > 0.0)
        .map(|(k, b)| {
            let mut regs: Vec<(String, BitVec)> = b
                .registers
                .iter()
                .map(|(n, v)| (n.to_string(), v.clone()))
                .collect();
            regs.push((
                "st".into(),
                SfeState {
                    states: per_branch[k].clone(),
                }
                .to_bits(p),
            ));
            Ok((amps[k], Registers::new(regs)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SfeCoherentReceive {
        msg1: SfeMsg1 { msgs },
        state: BranchState::make_state(kept)?,
        collapsed,
    })
}

fn label_bits(l: &Label) -> BitVec {
    BitVec::from_bytes(l, l.len() * 8).expect("whole bytes")
}

/// Garbles `c` and transfers each input wire's label pair by OT.
pub fn sfe_send<S: Scalar, R: RngCore + ?Sized>(
    p: &LatticeParams<S>,
    crs: &SfeCrs<S>,
    msg1: &SfeMsg1<S>,
    c: &BoolCircuit,
    label_bytes: usize,
    rng: &mut R,
) -> Result<SfeMsg2<S>> {
    ensure_len(crs.width(), c.n_inputs())?;
    ensure_len(crs.width(), msg1.msgs.len())?;
    let (gc, labels) = garble(c, label_bytes, rng)?;
    let ots = crs
        .ots
        .iter()
        .zip(&msg1.msgs)
        .zip(&labels)
        .map(|((crs_j, m), pair)| {
            ot_send(
                p,
                crs_j,
                m,
                &label_bits(&pair[0]),
                &label_bits(&pair[1]),
                rng,
            )
        })
        .collect::<Result<_>>()?;
    Ok(SfeMsg2 { gc, ots })
}

/// Recovers the input labels and evaluates the garbled circuit.
pub fn sfe_receive2<S: Scalar>(
    p: &LatticeParams<S>,
    x: &BitVec,
    st: &SfeState<S>,
    msg2: &SfeMsg2<S>,
) -> Result<BitVec> {
    ensure_len(msg2.ots.len(), x.len())?;
    ensure_len(msg2.ots.len(), st.states.len())?;
    let labels = msg2
        .ots
        .iter()
        .zip(&st.states)
        .zip(x.iter())
        .map(|((m, s), b)| Ok(ot_receive2(p, b, s, m)?.as_bytes().to_vec()))
        .collect::<Result<Vec<Label>>>()?;
    gc_eval(&msg2.gc, &labels)
}

/// Recovers `{α_j^b}`, the receiver-state block for each input bit and choice; `None` when any recovery fails.
pub fn sfe_sta_rcv<S: Scalar>(
    p: &LatticeParams<S>,
    td: &SfeTrapdoor<S>,
    msg1: &SfeMsg1<S>,
) -> Result<Option<BlockTable>> {
    ensure_len(td.ots.len(), msg1.msgs.len())?;
    let mut entries = Vec::with_capacity(td.ots.len());
    for (t, m) in td.ots.iter().zip(&msg1.msgs) {
        match ot_sta_rcv(p, t, m)? {
            [Some(a0), Some(a1)] => entries.push([a0.to_bits(p), a1.to_bits(p)]),
            _ => return Ok(None),
        }
    }
    BlockTable::new(state_bits(p), entries).map(Some)
}

/// Extracts the receiver's input bit by bit; `None` when any bit fails.
pub fn sfe_extract<S: Scalar>(
    p: &LatticeParams<S>,
    td: &SfeTrapdoor<S>,
    msg1: &SfeMsg1<S>,
) -> Result<Option<BitVec>> {
    ensure_len(td.ots.len(), msg1.msgs.len())?;
    let mut bits = Vec::with_capacity(td.ots.len());
    for (t, m) in td.ots.iter().zip(&msg1.msgs) {
        match ot_extract(p, t, m)? {
            Some(b) => bits.push(b),
            None => return Ok(None),
        }
    }
    Ok(Some(BitVec::from_bools(&bits)))
}

/// Simulated sender message from the output `y` and the circuit wiring.
pub fn sfe_simulate<S: Scalar, R: Rng + ?Sized>(
    p: &LatticeParams<S>,
    crs: &SfeCrs<S>,
    msg1: &SfeMsg1<S>,
    y: &BitVec,
    topology: &Topology,
    label_bytes: usize,
    rng: &mut R,
) -> Result<SfeMsg2<S>> {
    ensure_len(crs.width(), topology.n_inputs)?;
    ensure_len(crs.width(), msg1.msgs.len())?;
    let (gc, labels) = gc_simulate(topology, y, label_bytes, rng)?;
    let ots = crs
        .ots
        .iter()
        .zip(&msg1.msgs)
        .zip(&labels)
        .map(|((crs_j, m), l)| ot_simulate_send(p, crs_j, m, &label_bits(l), rng))
        .collect::<Result<_>>()?;
    Ok(SfeMsg2 { gc, ots })
}
