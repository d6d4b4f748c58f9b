//! PKE leasing: the core protocol with watermarkable-PKE marking, coherent
//! decryption, and an inner-product wrapper for indistinguishability.

use rand::Rng;

use super::core::{
    payload_key, skl_lessor_round2, skl_setup, KeygenMsg1, KeygenMsg2, MarkScheme, QuantumKey,
    SimulatorHandle, SklConfig, SklDvk, SklPublic, REG_PAYLOAD,
};
use crate::bits::{gf2_inner, BitVec};
use crate::branch::{BranchState, Registers};
use crate::error::{ensure_len, Result};
use crate::garble::{CircuitBuilder, Wire};
use crate::modq::{LatticeParams, Scalar};
use crate::pke::Pke;
use crate::wpke::{
    wpke_dec, wpke_dec_msk, wpke_enc, wpke_kg, wpke_mark_circuit, WpkeCt, WpkeDk, WpkeEk, WpkeMsk,
};

/// Register holding a coherent decryption result.
pub const REG_DEC: &str = "dec";

/// Marking by a watermarkable-PKE master key.
#[derive(Clone, Debug)]
pub struct WpkeMarker<'a, P: Pke> {
    /// Base scheme.
    pub pke: &'a P,
    /// Master key of this index.
    pub msk: &'a WpkeMsk<P>,
}

impl<P: Pke> MarkScheme for WpkeMarker<'_, P> {
    fn mark_len(&self) -> usize {
        self.msk.ell()
    }

    fn key_bits(&self) -> usize {
        WpkeDk::<P>::bit_len(self.pke, self.msk.ell())
    }

    fn build_mark(&self, b: &mut CircuitBuilder, x: &[Wire]) -> Result<Vec<Wire>> {
        wpke_mark_circuit(self.pke, self.msk, b, x)
    }
}

/// `ek = {pp_i, crs_i, wpke.ek_i}`.
#[derive(Clone, Debug)]
pub struct PkeSklEk<S: Scalar, P: Pke> {
    /// Claw-free and SFE parameters.
    pub public: SklPublic<S>,
    /// Watermarkable keys, one per index.
    pub weks: Vec<WpkeEk<P>>,
}

/// `msk = {wpke.msk_i}`.
#[derive(Clone, Debug)]
pub struct PkeSklMsk<P: Pke> {
    /// Per-index master keys.
    pub msks: Vec<WpkeMsk<P>>,
}

/// `{wpke.ct_i}` for a message of `2n·w` bits.
#[derive(Clone, Debug, PartialEq)]
pub struct PkeSklCt<P: Pke> {
    /// Per-index ciphertexts.
    pub cts: Vec<WpkeCt<P>>,
}

impl<P: Pke> PkeSklMsk<P> {
    /// Per-index markers for round 2.
    pub fn markers<'a>(&'a self, pke: &'a P) -> Vec<WpkeMarker<'a, P>> {
        self.msks
            .iter()
            .map(|msk| WpkeMarker { pke, msk })
            .collect()
    }
}

/// Message length `2n·w`.
pub fn pke_skl_message_len(config: &SklConfig) -> usize {
    config.indices() * config.w
}

/// Core setup plus one watermarkable keypair per index.
#[allow(clippy::type_complexity)]
pub fn pke_skl_setup<S: Scalar, P: Pke, R: Rng + ?Sized>(
    p: &LatticeParams<S>,
    pke: &P,
    config: SklConfig,
    rng: &mut R,
) -> Result<(PkeSklEk<S, P>, PkeSklMsk<P>, SklDvk<S>, SimulatorHandle<S>)> {
    let (public, dvk, god) = skl_setup(p, config, rng)?;
    let (weks, msks) = (0..config.indices())
        .map(|_| wpke_kg(pke, config.w, rng))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    Ok((PkeSklEk { public, weks }, PkeSklMsk { msks }, dvk, god))
}

/// Round 2 with `Mark = wpke_mark(msk_i, ·)`.
pub fn pke_skl_lessor_round2<S: Scalar, P: Pke, R: Rng + ?Sized>(
    p: &LatticeParams<S>,
    pke: &P,
    ek: &PkeSklEk<S, P>,
    msk: &PkeSklMsk<P>,
    msg1: &KeygenMsg1<S>,
    dvk: &mut SklDvk<S>,
    rng: &mut R,
) -> Result<KeygenMsg2<S>> {
    skl_lessor_round2(p, &ek.public, &msk.markers(pke), msg1, dvk, rng)
}

/// Encrypts block `i` of `m` under `wpke.ek_i`.
pub fn pke_skl_enc<P: Pke, R: Rng + ?Sized>(
    pke: &P,
    weks: &[WpkeEk<P>],
    m: &BitVec,
    rng: &mut R,
) -> Result<PkeSklCt<P>> {
    let w = weks.first().map_or(0, WpkeEk::ell);
    ensure_len(weks.len() * w, m.len())?;
    let blocks = m.chunks(w.max(1))?;
    let cts = weks
        .iter()
        .zip(&blocks)
        .map(|(ek, mi)| wpke_enc(pke, ek, mi, rng))
        .collect::<Result<_>>()?;
    Ok(PkeSklCt { cts })
}

/// Decrypts with the master keys.
pub fn pke_skl_dec<P: Pke>(pke: &P, msk: &PkeSklMsk<P>, ct: &PkeSklCt<P>) -> Result<BitVec> {
    ensure_len(msk.msks.len(), ct.cts.len())?;
    let parts = msk
        .msks
        .iter()
        .zip(&ct.cts)
        .map(|(k, c)| wpke_dec_msk(pke, k, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(BitVec::concat_all(&parts))
}

fn dec_map<'a, P: Pke>(
    pke: &'a P,
    ct: &'a WpkeCt<P>,
) -> impl FnMut(&Registers) -> Result<BitVec> + 'a {
    move |regs| {
        let key = payload_key(regs.require(REG_PAYLOAD)?)?;
        let dk = WpkeDk::from_bits(pke, ct.ell(), &key)?;
        wpke_dec(pke, &dk, ct)
    }
}

/// Decrypts one index coherently: compute, measure, uncompute.
pub(crate) fn qdec_index<P: Pke, R: Rng + ?Sized>(
    pke: &P,
    state: &BranchState,
    ct: &WpkeCt<P>,
    rng: &mut R,
) -> Result<(BitVec, BranchState)> {
    let with = state.apply_map(REG_DEC, dec_map(pke, ct))?;
    let (m, post) = with.measure_register(REG_DEC, rng)?;
    Ok((m, post.uncompute(REG_DEC, dec_map(pke, ct))?))
}

/// Coherent decryption with the leased key; the key comes back unchanged when every branch agrees.
pub fn pke_skl_qdec<S: Scalar, P: Pke, R: Rng + ?Sized>(
    pke: &P,
    qdk: &QuantumKey<S>,
    ct: &PkeSklCt<P>,
    rng: &mut R,
) -> Result<(BitVec, QuantumKey<S>)> {
    ensure_len(qdk.states.len(), ct.cts.len())?;
    let mut parts = Vec::with_capacity(ct.cts.len());
    let mut states = Vec::with_capacity(ct.cts.len());
    for (s, c) in qdk.states.iter().zip(&ct.cts) {
        let (m, post) = qdec_index(pke, s, c, rng)?;
        parts.push(m);
        states.push(post);
    }
    Ok((
        BitVec::concat_all(&parts),
        QuantumKey {
            states,
            msg2s: qdk.msg2s.clone(),
        },
    ))
}

/// `(Enc(x), r, ⟨x, r⟩ ⊕ m)` for uniform `x`, `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct GlCiphertext<P: Pke> {
    /// Encryption of the hidden string.
    pub ct: PkeSklCt<P>,
    /// The inner-product vector.
    pub r: BitVec,
    /// `⟨x, r⟩ ⊕ m`.
    pub b: bool,
}

/// Encrypts one bit through the inner-product hardcore bit.
pub fn gl_encrypt<P: Pke, R: Rng + ?Sized>(
    pke: &P,
    weks: &[WpkeEk<P>],
    m: bool,
    rng: &mut R,
) -> Result<GlCiphertext<P>> {
    let len = weks.len() * weks.first().map_or(0, WpkeEk::ell);
    gl_encrypt_with(pke, weks, m, &BitVec::random(len, rng), rng)
}

/// [`gl_encrypt`] with a caller-chosen `r`.
pub fn gl_encrypt_with<P: Pke, R: Rng + ?Sized>(
    pke: &P,
    weks: &[WpkeEk<P>],
    m: bool,
    r: &BitVec,
    rng: &mut R,
) -> Result<GlCiphertext<P>> {
    let x = BitVec::random(r.len(), rng);
    let ct = pke_skl_enc(pke, weks, &x, rng)?;
    Ok(GlCiphertext {
        ct,
        r: r.clone(),
        b: gf2_inner(&x, r)? ^ m,
    })
}

/// Inverts [`gl_encrypt`] with the master keys.
pub fn gl_decrypt<P: Pke>(pke: &P, msk: &PkeSklMsk<P>, ct: &GlCiphertext<P>) -> Result<bool> {
    Ok(gf2_inner(&pke_skl_dec(pke, msk, &ct.ct)?, &ct.r)? ^ ct.b)
}

/// Inverts [`gl_encrypt`] with the leased key.
pub fn gl_qdecrypt<S: Scalar, P: Pke, R: Rng + ?Sized>(
    pke: &P,
    qdk: &QuantumKey<S>,
    ct: &GlCiphertext<P>,
    rng: &mut R,
) -> Result<(bool, QuantumKey<S>)> {
    let (x, key) = pke_skl_qdec(pke, qdk, &ct.ct, rng)?;
    Ok((gf2_inner(&x, &ct.r)? ^ ct.b, key))
}

/// Bitwise repetition of [`gl_encrypt`].
pub fn gl_encrypt_bits<P: Pke, R: Rng + ?Sized>(
    pke: &P,
    weks: &[WpkeEk<P>],
    m: &BitVec,
    rng: &mut R,
) -> Result<Vec<GlCiphertext<P>>> {
    m.iter()
        .map(|bit| gl_encrypt(pke, weks, bit, rng))
        .collect()
}

/// Bitwise repetition of [`gl_decrypt`].
pub fn gl_decrypt_bits<P: Pke>(
    pke: &P,
    msk: &PkeSklMsk<P>,
    cts: &[GlCiphertext<P>],
) -> Result<BitVec> {
    let bits = cts
        .iter()
        .map(|c| gl_decrypt(pke, msk, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(BitVec::from_bools(&bits))
}
