//! Non-interactive PKE leasing: the lessee's round-1 bundle is the public
//! key, and every ciphertext carries fresh watermarkable keys together with
//! the round-2 messages that let the lessee finish a key for it.

use rand::Rng;

use super::core::{
    attach_payload, detach_payload, skl_del_half, skl_lessee_round1, skl_send_all, skl_setup,
    DelVerdict, DelVerifier, DeletionCert, KeygenMsg1, KeygenMsg2, LesseeState, SimulatorHandle,
    SklConfig, SklDvk, SklPublic,
};
use super::pke::{pke_skl_enc, qdec_index, PkeSklCt, WpkeMarker};
use crate::bits::BitVec;
use crate::error::{ensure_len, Result};
use crate::modq::{LatticeParams, Scalar};
use crate::pke::Pke;
use crate::wpke::{wpke_kg, WpkeEk};

/// Public encryption key: the parameters and the lessee's round-1 bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiEk<S: Scalar> {
    /// Claw-free and SFE parameters.
    pub public: SklPublic<S>,
    /// `{y_i, msg1_i}`.
    pub msg1: KeygenMsg1<S>,
}

/// A ciphertext with everything needed to finish a key for it.
#[derive(Clone, Debug)]
pub struct NiCiphertext<S: Scalar, P: Pke> {
    /// Fresh watermarkable keys.
    pub weks: Vec<WpkeEk<P>>,
    /// SFE sender messages for the fresh master keys.
    pub msg2: KeygenMsg2<S>,
    /// Watermarkable ciphertexts.
    pub ct: PkeSklCt<P>,
}

/// Setup without a master key: the subset, the instances and the verification key.
pub fn ni_setup<S: Scalar, R: Rng + ?Sized>(
    p: &LatticeParams<S>,
    config: SklConfig,
    rng: &mut R,
) -> Result<(SklPublic<S>, SklDvk<S>, SimulatorHandle<S>)> {
    skl_setup(p, config, rng)
}

/// Lessee key generation: publish round 1 as the encryption key, keep the half-key.
pub fn ni_kg<S: Scalar, R: Rng + ?Sized>(
    p: &LatticeParams<S>,
    public: &SklPublic<S>,
    god: &SimulatorHandle<S>,
    rng: &mut R,
) -> Result<(NiEk<S>, LesseeState)> {
    let (msg1, half) = skl_lessee_round1(p, public, god, rng)?;
    Ok((
        NiEk {
            public: public.clone(),
            msg1,
        },
        half,
    ))
}

/// Encrypts `m` under fresh watermarkable keys and bundles the round-2 messages.
pub fn ni_enc<S: Scalar, P: Pke, R: Rng + ?Sized>(
    p: &LatticeParams<S>,
    pke: &P,
    ek: &NiEk<S>,
    m: &BitVec,
    rng: &mut R,
) -> Result<NiCiphertext<S, P>> {
    let config = ek.public.config;
    let (weks, msks): (Vec<_>, Vec<_>) = (0..config.indices())
        .map(|_| wpke_kg(pke, config.w, rng))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let markers: Vec<WpkeMarker<'_, P>> = msks.iter().map(|msk| WpkeMarker { pke, msk }).collect();
    let msg2 = skl_send_all(p, &ek.public, &markers, &ek.msg1, rng)?;
    let ct = pke_skl_enc(pke, &weks, m, rng)?;
    Ok(NiCiphertext { weks, msg2, ct })
}

/// Finishes a key for this ciphertext, decrypts coherently and returns the half-key.
pub fn ni_qdec<S: Scalar, P: Pke, R: Rng + ?Sized>(
    p: &LatticeParams<S>,
    pke: &P,
    half: &LesseeState,
    ct: &NiCiphertext<S, P>,
    rng: &mut R,
) -> Result<(BitVec, LesseeState)> {
    ensure_len(half.states.len(), ct.msg2.msg2s.len())?;
    ensure_len(half.states.len(), ct.ct.cts.len())?;
    let mut parts = Vec::with_capacity(half.states.len());
    let mut states = Vec::with_capacity(half.states.len());
    for ((s, m2), c) in half.states.iter().zip(&ct.msg2.msg2s).zip(&ct.ct.cts) {
        let full = attach_payload(p, s, m2)?;
        let (m, post) = qdec_index(pke, &full, c, rng)?;
        parts.push(m);
        states.push(detach_payload(p, &post, m2)?);
    }
    Ok((
        BitVec::concat_all(&parts),
        LesseeState {
            states,
            ys: half.ys.clone(),
            collapsed: half.collapsed.clone(),
        },
    ))
}

/// Deletes the half-key.
pub fn ni_del<R: Rng + ?Sized>(half: LesseeState, rng: &mut R) -> Result<DeletionCert> {
    skl_del_half(half, rng)
}

/// Verifies deletion; the transcript is read from the published key.
pub fn ni_del_vrfy<S: Scalar>(
    p: &LatticeParams<S>,
    dvk: &SklDvk<S>,
    ek: &NiEk<S>,
    cert: &DeletionCert,
) -> Result<DelVerdict> {
    let mut dvk = dvk.clone();
    dvk.record(&ek.msg1)?;
    Ok(DelVerifier::new(p, &dvk, ek.public.config.w).verify(cert))
}
