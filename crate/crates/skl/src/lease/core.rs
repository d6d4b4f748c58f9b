//! Machinery shared by the leasing schemes: setup of `2n` instance pairs, the
//! two-round key generation, deletion and deletion verification.
//!
//! Index `i` pairs a claw-free function with an SFE instance. Indices in the
//! hidden subset `S` use the injective function and an extractable CRS; the
//! others use the two-to-one function and a hiding CRS. The lessee's key at
//! index `i` is a branch state with registers `x`, `st` and, after round 2,
//! `payload = C[msk_i, y_i](x)`.

use rand::seq::index::sample;
use rand::Rng;

use crate::bits::{gf2_inner, BitVec, BlockTable};
use crate::branch::BranchState;
use crate::codec::{Reader, Writer};
use crate::error::{ensure_len, Error, Result};
use crate::garble::{BoolCircuit, CircuitBuilder, Wire, DEFAULT_LABEL_BYTES};
use crate::modq::{LatticeParams, Scalar};
use crate::ntcf::{
    ntcf_func_gen, ntcf_good_set, ntcf_invert, ntcf_state_gen, NtcfMode, NtcfPp, NtcfTd, Preimage,
};
use crate::ot::{state_bits, Mode};
use crate::sfe::{
    sfe_coherent_receive1, sfe_crs_gen, sfe_receive2, sfe_send, sfe_sta_rcv, SfeCrs, SfeMsg1,
    SfeMsg2, SfeState, SfeTrapdoor,
};

/// Register holding the claw-free preimage.
pub const REG_X: &str = "x";
/// Register holding the SFE receiver state.
pub const REG_ST: &str = "st";
/// Register holding the circuit output.
pub const REG_PAYLOAD: &str = "payload";

/// Protocol dimensions shared by both parties.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SklConfig {
    /// Half the number of indices.
    pub n: usize,
    /// Claw-free input width, which is also the mark length.
    pub w: usize,
    /// Garbled label length in bytes.
    pub label_bytes: usize,
}

impl SklConfig {
    /// `n` pairs of width `w` with the default label length.
    pub fn new(n: usize, w: usize) -> Result<Self> {
        let c = Self {
            n,
            w,
            label_bytes: DEFAULT_LABEL_BYTES,
        };
        c.validate()?;
        Ok(c)
    }

    /// Same dimensions with another label length.
    pub fn with_label_bytes(mut self, label_bytes: usize) -> Result<Self> {
        self.label_bytes = label_bytes;
        self.validate()?;
        Ok(self)
    }

    /// Number of indices `2n`.
    pub fn indices(&self) -> usize {
        2 * self.n
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if self.w < 2 || self.w > 64 || !self.w.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "w = {} must be even and in 2..=64",
                self.w
            )));
        }
        if !(crate::garble::MIN_LABEL_BYTES..=crate::garble::MAX_LABEL_BYTES)
            .contains(&self.label_bytes)
        {
            return Err(Error::InvalidParams(format!(
                "label length {} bytes",
                self.label_bytes
            )));
        }
        Ok(())
    }
}

/// The public parameters of one index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SklInstance<S: Scalar> {
    /// Claw-free function parameters.
    pub pp: NtcfPp,
    /// SFE CRS.
    pub crs: SfeCrs<S>,
}

/// `{pp_i, crs_i}` for `i ∈ [2n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SklPublic<S: Scalar> {
    /// Dimensions.
    pub config: SklConfig,
    /// Per-index parameters.
    pub instances: Vec<SklInstance<S>>,
}

/// What the lessor records from round 1 at one index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscriptEntry<S: Scalar> {
    /// The committed image.
    pub y: BitVec,
    /// The SFE first message.
    pub msg1: SfeMsg1<S>,
}

/// Deletion-verification key: the subset, trapdoors outside it, and the round-1 transcript.
#[derive(Clone, Debug)]
pub struct SklDvk<S: Scalar> {
    /// `in_subset[i]` iff `i ∈ S`.
    pub in_subset: Vec<bool>,
    /// `td_i` for `i ∉ S`.
    pub ntcf_tds: Vec<Option<NtcfTd>>,
    /// SFE trapdoors for `i ∉ S`.
    pub sfe_tds: Vec<Option<SfeTrapdoor<S>>>,
    /// `(y_i, msg1_i)`, filled in at round 2.
    pub transcript: Vec<Option<TranscriptEntry<S>>>,
}

impl<S: Scalar> SklDvk<S> {
    /// Indices of `S`, ascending.
    pub fn subset(&self) -> Vec<usize> {
        (0..self.in_subset.len())
            .filter(|&i| self.in_subset[i])
            .collect()
    }

    /// Records a round-1 bundle.
    pub fn record(&mut self, msg1: &KeygenMsg1<S>) -> Result<()> {
        ensure_len(self.in_subset.len(), msg1.ys.len())?;
        ensure_len(self.in_subset.len(), msg1.msg1s.len())?;
        self.transcript = msg1
            .ys
            .iter()
            .zip(&msg1.msg1s)
            .map(|(y, m)| {
                Some(TranscriptEntry {
                    y: y.clone(),
                    msg1: m.clone(),
                })
            })
            .collect();
        Ok(())
    }
}

/// Every trapdoor, used only to act out the lessee's quantum steps in the branch simulator.
///
/// A real lessee needs none of this; the simulator uses it to locate claws
/// and to find the partner state of the coherent OT receiver.
#[derive(Clone, Debug)]
pub struct SimulatorHandle<S: Scalar> {
    /// Claw-free trapdoors, all indices.
    pub ntcf_tds: Vec<NtcfTd>,
    /// SFE trapdoors, all indices.
    pub sfe_tds: Vec<SfeTrapdoor<S>>,
}

/// Round-1 bundle `{y_i, msg1_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeygenMsg1<S: Scalar> {
    /// Images.
    pub ys: Vec<BitVec>,
    /// SFE first messages.
    pub msg1s: Vec<SfeMsg1<S>>,
}

/// Round-2 bundle `{msg2_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeygenMsg2<S: Scalar> {
    /// SFE sender messages.
    pub msg2s: Vec<SfeMsg2<S>>,
}

/// Deletion certificate `{(d_i, c_i)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeletionCert {
    /// `(d_i, c_i)` with `|d_i| = w`, `|c_i| = u·w`.
    pub entries: Vec<(BitVec, BitVec)>,
}

impl<S: Scalar> KeygenMsg1<S> {
    /// One blob per index: `y_i` then `msg1_i`.
    pub fn to_items(&self, p: &LatticeParams<S>) -> Vec<Vec<u8>> {
        self.ys
            .iter()
            .zip(&self.msg1s)
            .map(|(y, m)| {
                let mut w = Writer::new();
                w.bits(y);
                m.encode(p, &mut w);
                w.into_bytes()
            })
            .collect()
    }

    /// Inverse of [`Self::to_items`].
    pub fn from_items(p: &LatticeParams<S>, items: &[Vec<u8>]) -> Result<Self> {
        let (ys, msg1s) = items
            .iter()
            .map(|item| {
                let mut r = Reader::new(item);
                let y = r.bits()?;
                let m = SfeMsg1::decode(p, &mut r)?;
                r.finish()?;
                Ok((y, m))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        Ok(Self { ys, msg1s })
    }
}

impl<S: Scalar> KeygenMsg2<S> {
    /// One blob per index.
    pub fn to_items(&self, p: &LatticeParams<S>) -> Vec<Vec<u8>> {
        self.msg2s
            .iter()
            .map(|m| {
                let mut w = Writer::new();
                m.encode(p, &mut w);
                w.into_bytes()
            })
            .collect()
    }

    /// Inverse of [`Self::to_items`].
    pub fn from_items(p: &LatticeParams<S>, items: &[Vec<u8>]) -> Result<Self> {
        let msg2s = items
            .iter()
            .map(|item| {
                let mut r = Reader::new(item);
                let m = SfeMsg2::decode(p, &mut r)?;
                r.finish()?;
                Ok(m)
            })
            .collect::<Result<_>>()?;
        Ok(Self { msg2s })
    }
}

impl DeletionCert {
    /// One blob per index: `d_i` then `c_i`.
    pub fn to_items(&self) -> Vec<Vec<u8>> {
        self.entries
            .iter()
            .map(|(d, c)| {
                let mut w = Writer::new();
                w.bits(d);
                w.bits(c);
                w.into_bytes()
            })
            .collect()
    }

    /// Inverse of [`Self::to_items`].
    pub fn from_items(items: &[Vec<u8>]) -> Result<Self> {
        let entries = items
            .iter()
            .map(|item| {
                let mut r = Reader::new(item);
                let d = r.bits()?;
                let c = r.bits()?;
                r.finish()?;
                Ok((d, c))
            })
            .collect::<Result<_>>()?;
        Ok(Self { entries })
    }

    /// A uniformly random certificate of the right shape.
    pub fn random<S: Scalar, R: Rng + ?Sized>(
        p: &LatticeParams<S>,
        config: &SklConfig,
        rng: &mut R,
    ) -> Self {
        let u = state_bits(p);
        Self {
            entries: (0..config.indices())
                .map(|_| {
                    (
                        BitVec::random(config.w, rng),
                        BitVec::random(u * config.w, rng),
                    )
                })
                .collect(),
        }
    }
}

/// Samples `S` and the `2n` instance pairs with modes matched to it.
pub fn skl_setup<S: Scalar, R: Rng + ?Sized>(
    p: &LatticeParams<S>,
    config: SklConfig,
    rng: &mut R,
) -> Result<(SklPublic<S>, SklDvk<S>, SimulatorHandle<S>)> {
    config.validate()?;
    let total = config.indices();
    let mut in_subset = vec![false; total];
    for i in sample(rng, total, config.n) {
        in_subset[i] = true;
    }
    let mut instances = Vec::with_capacity(total);
    let mut handle = SimulatorHandle {
        ntcf_tds: Vec::with_capacity(total),
        sfe_tds: Vec::with_capacity(total),
    };
    for &inside in &in_subset {
        let (fmode, smode) = if inside {
            (NtcfMode::Injective, Mode::Extractable)
        } else {
            (NtcfMode::TwoToOne, Mode::Hiding)
        };
        let (pp, td) = ntcf_func_gen(config.w, fmode, rng)?;
        let (crs, std) = sfe_crs_gen(p, smode, config.w, rng);
        instances.push(SklInstance { pp, crs });
        handle.ntcf_tds.push(td);
        handle.sfe_tds.push(std);
    }
    let dvk = SklDvk {
        ntcf_tds: in_subset
            .iter()
            .zip(&handle.ntcf_tds)
            .map(|(&s, t)| (!s).then(|| t.clone()))
            .collect(),
        sfe_tds: in_subset
            .iter()
            .zip(&handle.sfe_tds)
            .map(|(&s, t)| (!s).then(|| t.clone()))
            .collect(),
        transcript: vec![None; total],
        in_subset,
    };
    Ok((SklPublic { config, instances }, dvk, handle))
}

/// The lessee's state between the two rounds (also the non-interactive half-key).
#[derive(Clone, Debug)]
pub struct LesseeState {
    /// Per-index states with registers `x`, `st`.
    pub states: Vec<BranchState>,
    /// Committed images.
    pub ys: Vec<BitVec>,
    /// Indices where a branch vanished during the coherent SFE step.
    pub collapsed: Vec<bool>,
}

/// Round 1: prepare a claw state per index and run the SFE receiver coherently on `x`.
pub fn skl_lessee_round1<S: Scalar, R: Rng + ?Sized>(
    p: &LatticeParams<S>,
    public: &SklPublic<S>,
    god: &SimulatorHandle<S>,
    rng: &mut R,
) -> Result<(KeygenMsg1<S>, LesseeState)> {
    let total = public.instances.len();
    ensure_len(total, god.ntcf_tds.len())?;
    ensure_len(total, god.sfe_tds.len())?;
    let mut msg1 = KeygenMsg1 {
        ys: Vec::with_capacity(total),
        msg1s: Vec::with_capacity(total),
    };
    let mut state = LesseeState {
        states: Vec::with_capacity(total),
        ys: Vec::with_capacity(total),
        collapsed: Vec::with_capacity(total),
    };
    for (i, inst) in public.instances.iter().enumerate() {
        let (y, claw) = ntcf_state_gen(&inst.pp, &god.ntcf_tds[i], rng)?;
        let rec = sfe_coherent_receive1(p, &inst.crs, &claw, &god.sfe_tds[i], rng)?;
        msg1.ys.push(y.clone());
        msg1.msg1s.push(rec.msg1);
        state.states.push(rec.state);
        state.ys.push(y);
        state.collapsed.push(rec.collapsed);
    }
    Ok((msg1, state))
}

/// A deterministic marking procedure expressible as a circuit.
pub trait MarkScheme {
    /// Mark length (must equal the protocol width `w`).
    fn mark_len(&self) -> usize;
    /// Width of the marked key.
    fn key_bits(&self) -> usize;
    /// Wires of the key marked with `x`.
    fn build_mark(&self, b: &mut CircuitBuilder, x: &[Wire]) -> Result<Vec<Wire>>;
}

/// `C[msk, y](x) = 1 ‖ Mark(msk, x)` if `f(x) = y`, else `0 ‖ 0…0`.
pub fn lessor_circuit<M: MarkScheme + ?Sized>(
    pp: &NtcfPp,
    y: &BitVec,
    marker: &M,
) -> Result<BoolCircuit> {
    ensure_len(pp.w(), marker.mark_len())?;
    ensure_len(pp.w(), y.len())?;
    let mut b = CircuitBuilder::new(pp.w());
    let xs = b.inputs();
    let fx = pp.eval_circuit(&mut b, &xs);
    let valid = b.eq_const(&fx, y);
    let key = marker.build_mark(&mut b, &xs)?;
    ensure_len(marker.key_bits(), key.len())?;
    let mut outs = vec![valid];
    outs.extend(b.and_all(valid, &key));
    b.finish(&outs)
}

/// Splits a payload into its validity bit and marked key; validity 0 is an error.
pub fn payload_key(payload: &BitVec) -> Result<BitVec> {
    if payload.is_empty() || !payload.get(0) {
        return Err(Error::InvalidState(
            "payload carries the invalid marker".into(),
        ));
    }
    payload.slice(1, payload.len() - 1)
}

fn check_msg1<S: Scalar>(
    p: &LatticeParams<S>,
    public: &SklPublic<S>,
    msg1: &KeygenMsg1<S>,
) -> Result<()> {
    let total = public.instances.len();
    let w = public.config.w;
    if msg1.ys.len() != total || msg1.msg1s.len() != total {
        return Err(Error::Protocol(format!(
            "round-1 bundle has {} / {} entries, expected {total}",
            msg1.ys.len(),
            msg1.msg1s.len()
        )));
    }
    for (i, (y, m)) in msg1.ys.iter().zip(&msg1.msg1s).enumerate() {
        if y.len() != w || m.msgs.len() != w || m.msgs.iter().any(|v| v.len() != p.m()) {
            return Err(Error::Protocol(format!("round-1 entry {i} is malformed")));
        }
    }
    Ok(())
}

/// Round 2: garble `C[msk_i, y_i]` per index, send it through SFE and record the transcript.
pub fn skl_lessor_round2<S, M, R>(
    p: &LatticeParams<S>,
    public: &SklPublic<S>,
    markers: &[M],
    msg1: &KeygenMsg1<S>,
    dvk: &mut SklDvk<S>,
    rng: &mut R,
) -> Result<KeygenMsg2<S>>
where
    S: Scalar,
    M: MarkScheme,
    R: Rng + ?Sized,
{
    check_msg1(p, public, msg1)?;
    ensure_len(public.instances.len(), markers.len())?;
    let msg2 = skl_send_all(p, public, markers, msg1, rng)?;
    dvk.record(msg1)?;
    Ok(msg2)
}

/// The sender side of round 2 without touching a verification key.
pub(crate) fn skl_send_all<S, M, R>(
    p: &LatticeParams<S>,
    public: &SklPublic<S>,
    markers: &[M],
    msg1: &KeygenMsg1<S>,
    rng: &mut R,
) -> Result<KeygenMsg2<S>>
where
    S: Scalar,
    M: MarkScheme,
    R: Rng + ?Sized,
{
    check_msg1(p, public, msg1)?;
    let msg2s = public
        .instances
        .iter()
        .zip(markers)
        .zip(msg1.ys.iter().zip(&msg1.msg1s))
        .map(|((inst, mk), (y, m1))| {
            let c = lessor_circuit(&inst.pp, y, mk)?;
            sfe_send(p, &inst.crs, m1, &c, public.config.label_bytes, rng)
        })
        .collect::<Result<_>>()?;
    Ok(KeygenMsg2 { msg2s })
}

/// The leased key: per-index states with a `payload` register, plus the round-2 messages.
#[derive(Clone, Debug)]
pub struct QuantumKey<S: Scalar> {
    /// Per-index states with registers `x`, `st`, `payload`.
    pub states: Vec<BranchState>,
    /// Round-2 messages, kept to uncompute the payload.
    pub msg2s: Vec<SfeMsg2<S>>,
}

impl<S: Scalar> QuantumKey<S> {
    /// All branch amplitudes, index by index.
    pub fn amplitudes(&self) -> Vec<Vec<f64>> {
        self.states.iter().map(BranchState::amplitudes).collect()
    }
}

/// `payload = sfe_receive2(x, st, msg2)` as a register map.
pub(crate) fn payload_map<'a, S: Scalar>(
    p: &'a LatticeParams<S>,
    msg2: &'a SfeMsg2<S>,
) -> impl FnMut(&crate::branch::Registers) -> Result<BitVec> + 'a {
    move |regs| {
        let x = regs.require(REG_X)?;
        let st = SfeState::from_bits(p, regs.require(REG_ST)?)?;
        sfe_receive2(p, x, &st, msg2)
    }
}

/// Attaches the payload at one index.
pub(crate) fn attach_payload<S: Scalar>(
    p: &LatticeParams<S>,
    state: &BranchState,
    msg2: &SfeMsg2<S>,
) -> Result<BranchState> {
    state.apply_map(REG_PAYLOAD, payload_map(p, msg2))
}

/// Removes the payload at one index.
pub(crate) fn detach_payload<S: Scalar>(
    p: &LatticeParams<S>,
    state: &BranchState,
    msg2: &SfeMsg2<S>,
) -> Result<BranchState> {
    state.uncompute(REG_PAYLOAD, payload_map(p, msg2))
}

/// Finishes the key: computes `payload` in every branch of every index.
pub fn skl_lessee_finish<S: Scalar>(
    p: &LatticeParams<S>,
    state: LesseeState,
    msg2: KeygenMsg2<S>,
) -> Result<QuantumKey<S>> {
    ensure_len(state.states.len(), msg2.msg2s.len())?;
    let states = state
        .states
        .iter()
        .zip(&msg2.msg2s)
        .map(|(s, m)| attach_payload(p, s, m))
        .collect::<Result<_>>()?;
    Ok(QuantumKey {
        states,
        msg2s: msg2.msg2s,
    })
}

/// Undoes [`skl_lessee_finish`].
pub fn skl_lessee_unfinish<S: Scalar>(
    p: &LatticeParams<S>,
    key: &QuantumKey<S>,
) -> Result<Vec<BranchState>> {
    key.states
        .iter()
        .zip(&key.msg2s)
        .map(|(s, m)| detach_payload(p, s, m))
        .collect()
}

fn hadamard_cert<R: Rng + ?Sized>(
    states: &[BranchState],
    w: usize,
    rng: &mut R,
) -> Result<DeletionCert> {
    let entries = states
        .iter()
        .map(|s| {
            if s.register_names() != [REG_X, REG_ST] {
                return Err(Error::InvalidState(format!(
                    "deletion expects registers x, st; found {:?}",
                    s.register_names()
                )));
            }
            let out = s.measure_hadamard_all(rng);
            Ok((out.slice(0, w)?, out.slice(w, out.len() - w)?))
        })
        .collect::<Result<_>>()?;
    Ok(DeletionCert { entries })
}

/// Deletes the key: uncompute the payload, then measure `(x, st)` in the Hadamard basis.
pub fn skl_del<S: Scalar, R: Rng + ?Sized>(
    p: &LatticeParams<S>,
    key: QuantumKey<S>,
    rng: &mut R,
) -> Result<DeletionCert> {
    let w = key.states.first().map_or(0, |s| {
        s.branches()[0]
            .registers
            .require(REG_X)
            .map_or(0, BitVec::len)
    });
    hadamard_cert(&skl_lessee_unfinish(p, &key)?, w, rng)
}

/// Deletes a key that never received a payload.
pub fn skl_del_half<R: Rng + ?Sized>(state: LesseeState, rng: &mut R) -> Result<DeletionCert> {
    let w = state.ys.first().map_or(0, BitVec::len);
    hadamard_cert(&state.states, w, rng)
}

/// Outcome of deletion verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelVerdict {
    /// Overall decision.
    pub accepted: bool,
    /// One line per failing index or structural problem.
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Debug)]
enum IndexCheck {
    Skip,
    Reject(String),
    Check {
        td: NtcfTd,
        y: BitVec,
        delta: BitVec,
        table: BlockTable,
    },
}

/// Deletion verifier with the per-index claws and block tables precomputed.
#[derive(Clone, Debug)]
pub struct DelVerifier {
    w: usize,
    u: usize,
    checks: Vec<IndexCheck>,
}

impl DelVerifier {
    /// Inverts every `y_i` and recovers every block table for `i ∉ S`.
    pub fn new<S: Scalar>(p: &LatticeParams<S>, dvk: &SklDvk<S>, w: usize) -> Self {
        let checks = (0..dvk.in_subset.len())
            .map(|i| {
                if dvk.in_subset[i] {
                    return IndexCheck::Skip;
                }
                let (Some(td), Some(std), Some(tr)) =
                    (&dvk.ntcf_tds[i], &dvk.sfe_tds[i], &dvk.transcript[i])
                else {
                    return IndexCheck::Reject(format!("index {i}: no trapdoor or transcript"));
                };
                let Some(Preimage::Claw(x0, x1)) = ntcf_invert(td, &tr.y) else {
                    return IndexCheck::Reject(format!("index {i}: image has no claw"));
                };
                match sfe_sta_rcv(p, std, &tr.msg1) {
                    Ok(Some(table)) if table.w() == w => IndexCheck::Check {
                        td: td.clone(),
                        y: tr.y.clone(),
                        delta: x0.xor(&x1).expect("equal widths"),
                        table,
                    },
                    Ok(_) => {
                        IndexCheck::Reject(format!("index {i}: receiver states not recoverable"))
                    }
                    Err(e) => IndexCheck::Reject(format!("index {i}: {e}")),
                }
            })
            .collect();
        Self {
            w,
            u: state_bits(p),
            checks,
        }
    }

    /// Accepts iff every `i ∉ S` has `⟨d_i ⊕ d*_i, x₀ ⊕ x₁⟩ = 0` with `d_i ⊕ d*_i` in the good set.
    pub fn verify(&self, cert: &DeletionCert) -> DelVerdict {
        let mut diagnostics = Vec::new();
        if cert.entries.len() != self.checks.len() {
            diagnostics.push(format!(
                "certificate has {} entries, expected {}",
                cert.entries.len(),
                self.checks.len()
            ));
            return DelVerdict {
                accepted: false,
                diagnostics,
            };
        }
        for (i, (check, (d, c))) in self.checks.iter().zip(&cert.entries).enumerate() {
            if d.len() != self.w || c.len() != self.u * self.w {
                diagnostics.push(format!(
                    "index {i}: entry lengths ({}, {})",
                    d.len(),
                    c.len()
                ));
                continue;
            }
            match check {
                IndexCheck::Skip => {}
                IndexCheck::Reject(why) => diagnostics.push(why.clone()),
                IndexCheck::Check {
                    td,
                    y,
                    delta,
                    table,
                } => {
                    let d_star = table.correction(c).expect("lengths checked");
                    let corrected = d.xor(&d_star).expect("lengths checked");
                    if gf2_inner(&corrected, delta).expect("lengths checked") {
                        diagnostics.push(format!("index {i}: parity check failed"));
                    } else if !ntcf_good_set(td, y, &corrected) {
                        diagnostics
                            .push(format!("index {i}: corrected vector outside the good set"));
                    }
                }
            }
        }
        DelVerdict {
            accepted: diagnostics.is_empty(),
            diagnostics,
        }
    }
}

/// One-shot deletion verification.
pub fn skl_del_vrfy<S: Scalar>(
    p: &LatticeParams<S>,
    dvk: &SklDvk<S>,
    w: usize,
    cert: &DeletionCert,
) -> DelVerdict {
    DelVerifier::new(p, dvk, w).verify(cert)
}
