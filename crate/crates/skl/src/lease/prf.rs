//! PRF leasing: the core protocol with watermarkable-UPF marking, coherent
//! evaluation with a collapse diagnostic, and an inner-product wrapper.

use rand::Rng;

use super::core::{
    payload_key, skl_lessor_round2, skl_setup, KeygenMsg1, KeygenMsg2, MarkScheme, QuantumKey,
    SimulatorHandle, SklConfig, SklDvk, SklPublic, REG_PAYLOAD,
};
use crate::bits::{gf2_inner, BitVec};
use crate::branch::Registers;
use crate::error::{ensure_len, Error, Result};
use crate::garble::{CircuitBuilder, Wire};
use crate::modq::{LatticeParams, Scalar};
use crate::wupf::{wupf_eval, wupf_kg, wupf_mark_circuit, WupfKey, WupfMsk, WupfXk};

/// Register holding a coherent evaluation result.
pub const REG_EVAL: &str = "eval";

impl MarkScheme for WupfMsk {
    fn mark_len(&self) -> usize {
        self.w()
    }

    fn key_bits(&self) -> usize {
        WupfKey::bit_len(self.w(), self.ell())
    }

    fn build_mark(&self, b: &mut CircuitBuilder, x: &[Wire]) -> Result<Vec<Wire>> {
        wupf_mark_circuit(self, b, x)
    }
}

/// `msk = {wupf.msk_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrfSklMsk {
    /// Per-index master keys.
    pub msks: Vec<WupfMsk>,
}

/// Extraction keys `{wupf.xk_i}` (differing points included), for tests and experiments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrfSklXk {
    /// Per-index extraction keys.
    pub xks: Vec<WupfXk>,
}

impl PrfSklMsk {
    /// Block input length `ℓ`.
    pub fn ell(&self) -> usize {
        self.msks.first().map_or(0, WupfMsk::ell)
    }

    /// Output width per index.
    pub fn w(&self) -> usize {
        self.msks.first().map_or(0, WupfMsk::w)
    }

    /// Input length `2n·ℓ·w`.
    pub fn input_len(&self) -> usize {
        self.msks.len() * self.ell() * self.w()
    }
}

/// Core setup plus one watermarkable UPF per index, with block input length `ell`.
#[allow(clippy::type_complexity)]
pub fn prf_skl_setup<S: Scalar, R: Rng + ?Sized>(
    p: &LatticeParams<S>,
    config: SklConfig,
    ell: usize,
    rng: &mut R,
) -> Result<(
    SklPublic<S>,
    PrfSklMsk,
    PrfSklXk,
    SklDvk<S>,
    SimulatorHandle<S>,
)> {
    let (public, dvk, god) = skl_setup(p, config, rng)?;
    let (msks, xks) = (0..config.indices())
        .map(|_| wupf_kg(config.w, ell, rng))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    Ok((public, PrfSklMsk { msks }, PrfSklXk { xks }, dvk, god))
}

/// Round 2 with `Mark = wupf_mark(msk_i, ·)`.
pub fn prf_skl_lessor_round2<S: Scalar, R: Rng + ?Sized>(
    p: &LatticeParams<S>,
    public: &SklPublic<S>,
    msk: &PrfSklMsk,
    msg1: &KeygenMsg1<S>,
    dvk: &mut SklDvk<S>,
    rng: &mut R,
) -> Result<KeygenMsg2<S>> {
    skl_lessor_round2(p, public, &msk.msks, msg1, dvk, rng)
}

fn split_input(s: &BitVec, indices: usize) -> Result<Vec<BitVec>> {
    if indices == 0 || !s.len().is_multiple_of(indices) {
        return Err(Error::LengthMismatch {
            expected: indices,
            got: s.len(),
        });
    }
    s.chunks(s.len() / indices)
}

/// `t_i = wupf_eval(msk_i, s_i)` concatenated.
pub fn prf_skl_eval(msk: &PrfSklMsk, s: &BitVec) -> Result<BitVec> {
    ensure_len(msk.input_len(), s.len())?;
    let parts = msk
        .msks
        .iter()
        .zip(split_input(s, msk.msks.len())?)
        .map(|(k, si)| wupf_eval(&k.eval_key(), &si))
        .collect::<Result<Vec<_>>>()?;
    Ok(BitVec::concat_all(&parts))
}

/// Outcome of [`prf_skl_qleval`].
#[derive(Clone, Debug)]
pub struct QlEval<S: Scalar> {
    /// The output.
    pub t: BitVec,
    /// The key after evaluation.
    pub key: QuantumKey<S>,
    /// Indices whose branches disagreed, so that measuring collapsed them.
    pub collapsed: Vec<usize>,
}

fn eval_map<'a>(
    w: usize,
    ell: usize,
    s: &'a BitVec,
) -> impl FnMut(&Registers) -> Result<BitVec> + 'a {
    move |regs| {
        let key = WupfKey::from_bits(w, ell, &payload_key(regs.require(REG_PAYLOAD)?)?)?;
        wupf_eval(&key, s)
    }
}

/// Coherent evaluation with the leased key, block input length `ell`.
pub fn prf_skl_qleval<S: Scalar, R: Rng + ?Sized>(
    qsk: &QuantumKey<S>,
    ell: usize,
    s: &BitVec,
    rng: &mut R,
) -> Result<QlEval<S>> {
    let blocks = split_input(s, qsk.states.len())?;
    let w = if ell == 0 { 0 } else { blocks[0].len() / ell };
    ensure_len(qsk.states.len() * w * ell, s.len())?;
    let mut parts = Vec::with_capacity(blocks.len());
    let mut states = Vec::with_capacity(blocks.len());
    let mut collapsed = Vec::new();
    for (i, (state, si)) in qsk.states.iter().zip(&blocks).enumerate() {
        let with = state.apply_map(REG_EVAL, eval_map(w, ell, si))?;
        let (t, post) = with.measure_register(REG_EVAL, rng)?;
        if post.branch_count() < with.branch_count() {
            collapsed.push(i);
        }
        parts.push(t);
        states.push(post.uncompute(REG_EVAL, eval_map(w, ell, si))?);
    }
    Ok(QlEval {
        t: BitVec::concat_all(&parts),
        key: QuantumKey {
            states,
            msg2s: qsk.msg2s.clone(),
        },
        collapsed,
    })
}

/// `⟨UPF(msk, s), r⟩`.
pub fn prf_gl_eval(msk: &PrfSklMsk, s: &BitVec, r: &BitVec) -> Result<bool> {
    gf2_inner(&prf_skl_eval(msk, s)?, r)
}

/// `⟨UPF(qsk, s), r⟩` through coherent evaluation.
pub fn prf_gl_qleval<S: Scalar, R: Rng + ?Sized>(
    qsk: &QuantumKey<S>,
    ell: usize,
    s: &BitVec,
    r: &BitVec,
    rng: &mut R,
) -> Result<(bool, QlEval<S>)> {
    let out = prf_skl_qleval(qsk, ell, s, rng)?;
    Ok((gf2_inner(&out.t, r)?, out))
}
