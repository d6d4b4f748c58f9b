//! Security experiments driven against pluggable adversaries: the
//! cut-and-choose adaptive hardcore game, the OW-VRA and UP-VRA games, and
//! standalone parallel-extraction runs.

use rand::seq::index::sample;
use rand::RngCore;

use crate::bits::{coset_sample, gf2_inner, BitVec};
use crate::branch::BranchState;
use crate::error::{Error, Result};
use crate::lease::{
    ni_del_vrfy, ni_enc, ni_setup, pke_skl_enc, pke_skl_lessor_round2, pke_skl_message_len,
    pke_skl_setup, prf_skl_eval, prf_skl_lessor_round2, prf_skl_setup, skl_del, skl_del_half,
    skl_lessee_finish, skl_lessee_round1, DelVerifier, DeletionCert, KeygenMsg1, KeygenMsg2,
    LesseeState, NiCiphertext, NiEk, PkeSklCt, QuantumKey, SimulatorHandle, SklConfig, SklDvk,
    SklPublic,
};
use crate::modq::{LatticeParams, Scalar};
use crate::ntcf::{
    ntcf_chk, ntcf_func_gen, ntcf_good_set, ntcf_invert, ntcf_state_gen, NtcfMode, NtcfPp, NtcfTd,
    Preimage,
};
use crate::pke::{Pke, ToyPke};
use crate::wpke::{wpke_dec, wpke_kg, wpke_mark, wpke_parallel_extract};
use crate::wupf::{wupf_eval, wupf_kg, wupf_mark, wupf_parallel_extract};

use super::session::Scheme;

/// Quantum state preparation for the cut-and-choose adversary.
///
/// The branch simulator needs the trapdoor to lay out a claw state; the
/// adversary receives only `(y, state)`, which a quantum machine could
/// prepare from `pp` alone.
pub struct StateLab<'a> {
    tds: &'a [NtcfTd],
}

impl StateLab<'_> {
    /// The claw state at index `i`.
    pub fn claw_state(&self, i: usize, rng: &mut dyn RngCore) -> Result<(BitVec, BranchState)> {
        let td = self
            .tds
            .get(i)
            .ok_or_else(|| Error::Protocol(format!("no index {i}")))?;
        ntcf_state_gen(td.pp(), td, rng)
    }
}

/// An adversary for the cut-and-choose experiment.
pub trait CutAndChooseAdversary {
    /// Step 3: `{(y_i, d_i)}` for every index.
    fn commit(
        &mut self,
        pps: &[NtcfPp],
        lab: &StateLab<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<(BitVec, BitVec)>>;
    /// Step 6: preimages `{x_i}` for `i ∈ S`, in the order of `subset`.
    fn open(
        &mut self,
        subset: &[usize],
        tds: &[Option<NtcfTd>],
        rng: &mut dyn RngCore,
    ) -> Result<Vec<BitVec>>;
}

/// Outcome of [`run_cut_and_choose`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutAndChooseReport {
    /// Experiment output.
    pub outcome: bool,
    /// Step 4 passed.
    pub equations_passed: bool,
    /// Step 7 passed (false when step 4 already aborted).
    pub preimages_passed: bool,
    /// Reasons for failure or protocol violations.
    pub diagnostics: Vec<String>,
}

impl CutAndChooseReport {
    fn abort(equations_passed: bool, why: String) -> Self {
        Self {
            outcome: false,
            equations_passed,
            preimages_passed: false,
            diagnostics: vec![why],
        }
    }
}

/// Runs the seven-step cut-and-choose experiment with `2n` functions of width `w`.
pub fn run_cut_and_choose<A, R>(
    adv: &mut A,
    n: usize,
    w: usize,
    rng: &mut R,
) -> Result<CutAndChooseReport>
where
    A: CutAndChooseAdversary + ?Sized,
    R: RngCore,
{
    if n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    let total = 2 * n;
    let mut in_s = vec![false; total];
    for i in sample(rng, total, n) {
        in_s[i] = true;
    }
    let mut pps = Vec::with_capacity(total);
    let mut tds = Vec::with_capacity(total);
    for &inside in &in_s {
        let mode = if inside {
            NtcfMode::Injective
        } else {
            NtcfMode::TwoToOne
        };
        let (pp, td) = ntcf_func_gen(w, mode, rng)?;
        pps.push(pp);
        tds.push(td);
    }
    let lab = StateLab { tds: &tds };
    let committed = match adv.commit(&pps, &lab, rng) {
        Ok(c) if c.len() == total => c,
        Ok(c) => {
            return Ok(CutAndChooseReport::abort(
                false,
                format!("adversary committed {} entries, expected {total}", c.len()),
            ))
        }
        Err(e) => {
            return Ok(CutAndChooseReport::abort(
                false,
                format!("adversary failed at commit: {e}"),
            ))
        }
    };
    for i in (0..total).filter(|&i| !in_s[i]) {
        let (y, d) = &committed[i];
        let ok = match ntcf_invert(&tds[i], y) {
            Some(Preimage::Claw(x0, x1)) if d.len() == w => {
                ntcf_good_set(&tds[i], y, d) && !gf2_inner(d, &x0.xor(&x1)?)?
            }
            _ => false,
        };
        if !ok {
            return Ok(CutAndChooseReport::abort(
                false,
                format!("index {i}: equation check failed"),
            ));
        }
    }
    let subset: Vec<usize> = (0..total).filter(|&i| in_s[i]).collect();
    let revealed: Vec<Option<NtcfTd>> = tds
        .iter()
        .zip(&in_s)
        .map(|(t, &s)| (!s).then(|| t.clone()))
        .collect();
    let opened = match adv.open(&subset, &revealed, rng) {
        Ok(x) if x.len() == subset.len() => x,
        Ok(x) => {
            return Ok(CutAndChooseReport::abort(
                true,
                format!(
                    "adversary opened {} preimages, expected {}",
                    x.len(),
                    subset.len()
                ),
            ))
        }
        Err(e) => {
            return Ok(CutAndChooseReport::abort(
                true,
                format!("adversary failed at open: {e}"),
            ))
        }
    };
    let failing: Vec<String> = subset
        .iter()
        .zip(&opened)
        .filter(|(&i, x)| !ntcf_chk(&pps[i], x, &committed[i].0))
        .map(|(&i, _)| format!("index {i}: preimage check failed"))
        .collect();
    Ok(CutAndChooseReport {
        outcome: failing.is_empty(),
        equations_passed: true,
        preimages_passed: failing.is_empty(),
        diagnostics: failing,
    })
}

/// Prepares honest claw states, measures them in the Hadamard basis for `d`, then guesses preimages.
#[derive(Clone, Debug, Default)]
pub struct HonestDeleteAdversary {
    w: usize,
}

impl CutAndChooseAdversary for HonestDeleteAdversary {
    fn commit(
        &mut self,
        pps: &[NtcfPp],
        lab: &StateLab<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<(BitVec, BitVec)>> {
        self.w = pps.first().map_or(0, NtcfPp::w);
        (0..pps.len())
            .map(|i| {
                let (y, state) = lab.claw_state(i, rng)?;
                Ok((y, state.measure_hadamard_all(rng)))
            })
            .collect()
    }

    fn open(
        &mut self,
        subset: &[usize],
        _: &[Option<NtcfTd>],
        rng: &mut dyn RngCore,
    ) -> Result<Vec<BitVec>> {
        Ok(subset.iter().map(|_| BitVec::random(self.w, rng)).collect())
    }
}

/// Reads the public fold of the toy function: it keeps a preimage everywhere and answers every parity check.
#[derive(Clone, Debug, Default)]
pub struct KeepEverythingAdversary {
    kept: Vec<BitVec>,
}

impl CutAndChooseAdversary for KeepEverythingAdversary {
    fn commit(
        &mut self,
        pps: &[NtcfPp],
        _: &StateLab<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<(BitVec, BitVec)>> {
        self.kept.clear();
        pps.iter()
            .map(|pp| {
                let x = BitVec::random(pp.w(), rng);
                let y = pp.eval(&x)?;
                let fold = pp.fold();
                let d = loop {
                    let d = if fold.is_zero() {
                        BitVec::random(pp.w(), rng)
                    } else {
                        coset_sample(&fold, false, rng)?
                    };
                    if !d.is_zero() {
                        break d;
                    }
                };
                self.kept.push(x);
                Ok((y, d))
            })
            .collect()
    }

    fn open(
        &mut self,
        subset: &[usize],
        _: &[Option<NtcfTd>],
        _: &mut dyn RngCore,
    ) -> Result<Vec<BitVec>> {
        subset
            .iter()
            .map(|&i| {
                self.kept
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::Protocol("open before commit".into()))
            })
            .collect()
    }
}

/// What the challenger hands over once the certificate verifies.
#[derive(Clone, Debug)]
pub enum VraChallenge<S: Scalar> {
    /// OW-VRA: a ciphertext of a uniform message.
    Ciphertext(PkeSklCt<ToyPke>),
    /// Non-interactive OW-VRA: a ciphertext bundle.
    NiCiphertext(Box<NiCiphertext<S, ToyPke>>),
    /// UP-VRA: a uniform PRF input.
    Input(BitVec),
}

/// Evaluation oracle `Eval(msk, ·)`; `None` for the PKE games.
pub type EvalOracle<'a> = Option<&'a dyn Fn(&BitVec) -> Result<BitVec>>;

/// An adversary for the VRA games. It plays the lessee in key generation.
pub trait VraAdversary<S: Scalar> {
    /// Round 1 (for the non-interactive scheme this message is the encryption key).
    fn round1(
        &mut self,
        p: &LatticeParams<S>,
        public: &SklPublic<S>,
        god: &SimulatorHandle<S>,
        oracle: EvalOracle<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<KeygenMsg1<S>>;

    /// Receives round 2 (absent when non-interactive) and returns a certificate, or `None` to refuse.
    fn certify(
        &mut self,
        p: &LatticeParams<S>,
        msg2: Option<KeygenMsg2<S>>,
        oracle: EvalOracle<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<Option<DeletionCert>>;

    /// Guesses the challenge message or PRF output given the verification key.
    fn guess(
        &mut self,
        dvk: &SklDvk<S>,
        challenge: &VraChallenge<S>,
        rng: &mut dyn RngCore,
    ) -> Result<BitVec>;
}

/// Outcome of [`run_vra_game`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VraReport {
    /// Experiment output.
    pub won: bool,
    /// The certificate was produced and accepted.
    pub deleted: bool,
    /// Reasons for a zero outcome.
    pub diagnostics: Vec<String>,
}

impl VraReport {
    fn lost(deleted: bool, why: impl Into<String>) -> Self {
        Self {
            won: false,
            deleted,
            diagnostics: vec![why.into()],
        }
    }
}

/// Runs OW-VRA (`Pke`, `PkeNi`) or UP-VRA (`Prf`, block input length `ell`).
pub fn run_vra_game<S, A, R>(
    p: &LatticeParams<S>,
    scheme: Scheme,
    config: SklConfig,
    ell: usize,
    adv: &mut A,
    rng: &mut R,
) -> Result<VraReport>
where
    S: Scalar,
    A: VraAdversary<S> + ?Sized,
    R: RngCore,
{
    let pke = ToyPke;
    match scheme {
        Scheme::Pke => {
            let (ek, msk, mut dvk, god) = pke_skl_setup(p, &pke, config, rng)?;
            let msg1 = match adv.round1(p, &ek.public, &god, None, rng) {
                Ok(m) => m,
                Err(e) => return Ok(VraReport::lost(false, format!("round 1: {e}"))),
            };
            let msg2 = match pke_skl_lessor_round2(p, &pke, &ek, &msk, &msg1, &mut dvk, rng) {
                Ok(m) => m,
                Err(e) => return Ok(VraReport::lost(false, format!("lessor aborted: {e}"))),
            };
            let cert = adv.certify(p, Some(msg2), None, rng);
            let Some(dvk) = gate(p, &dvk, config.w, cert) else {
                return Ok(VraReport::lost(false, "certificate missing or rejected"));
            };
            let m = BitVec::random(pke_skl_message_len(&config), rng);
            let ct = pke_skl_enc(&pke, &ek.weks, &m, rng)?;
            finish(adv.guess(&dvk, &VraChallenge::Ciphertext(ct), rng), &m)
        }
        Scheme::PkeNi => {
            let (public, dvk, god) = ni_setup(p, config, rng)?;
            let msg1 = match adv.round1(p, &public, &god, None, rng) {
                Ok(m) => m,
                Err(e) => return Ok(VraReport::lost(false, format!("round 1: {e}"))),
            };
            let ek = NiEk { public, msg1 };
            let accepted = match adv.certify(p, None, None, rng) {
                Ok(Some(cert)) => ni_del_vrfy(p, &dvk, &ek, &cert)?.accepted,
                _ => false,
            };
            if !accepted {
                return Ok(VraReport::lost(false, "certificate missing or rejected"));
            }
            let mut dvk = dvk;
            dvk.record(&ek.msg1)?;
            let m = BitVec::random(pke_skl_message_len(&config), rng);
            let ct = ni_enc(p, &pke, &ek, &m, rng)?;
            finish(
                adv.guess(&dvk, &VraChallenge::NiCiphertext(Box::new(ct)), rng),
                &m,
            )
        }
        Scheme::Prf => {
            let (public, msk, _, mut dvk, god) = prf_skl_setup(p, config, ell, rng)?;
            let eval = |s: &BitVec| prf_skl_eval(&msk, s);
            let msg1 = match adv.round1(p, &public, &god, Some(&eval), rng) {
                Ok(m) => m,
                Err(e) => return Ok(VraReport::lost(false, format!("round 1: {e}"))),
            };
            let msg2 = match prf_skl_lessor_round2(p, &public, &msk, &msg1, &mut dvk, rng) {
                Ok(m) => m,
                Err(e) => return Ok(VraReport::lost(false, format!("lessor aborted: {e}"))),
            };
            let cert = adv.certify(p, Some(msg2), Some(&eval), rng);
            let Some(dvk) = gate(p, &dvk, config.w, cert) else {
                return Ok(VraReport::lost(false, "certificate missing or rejected"));
            };
            let s = BitVec::random(msk.input_len(), rng);
            let t = prf_skl_eval(&msk, &s)?;
            finish(adv.guess(&dvk, &VraChallenge::Input(s), rng), &t)
        }
    }
}

fn gate<S: Scalar>(
    p: &LatticeParams<S>,
    dvk: &SklDvk<S>,
    w: usize,
    cert: Result<Option<DeletionCert>>,
) -> Option<SklDvk<S>> {
    match cert {
        Ok(Some(c)) if DelVerifier::new(p, dvk, w).verify(&c).accepted => Some(dvk.clone()),
        _ => None,
    }
}

fn finish(guess: Result<BitVec>, want: &BitVec) -> Result<VraReport> {
    Ok(match guess {
        Ok(g) if &g == want => VraReport {
            won: true,
            deleted: true,
            diagnostics: vec![],
        },
        Ok(_) => VraReport::lost(true, "wrong guess"),
        Err(e) => VraReport::lost(true, format!("guess failed: {e}")),
    })
}

/// The lessee's held key during a VRA game.
#[derive(Clone, Debug)]
enum Held<S: Scalar> {
    Nothing,
    Half(LesseeState),
    Full(QuantumKey<S>),
}

/// Runs key generation honestly and then either refuses to delete or deletes and guesses uniformly.
#[derive(Clone, Debug)]
pub struct HonestVraAdversary<S: Scalar> {
    /// When false, no certificate is ever produced.
    pub delete: bool,
    held: Held<S>,
    half: Option<LesseeState>,
    guess_len: usize,
}

impl<S: Scalar> HonestVraAdversary<S> {
    /// Deletes honestly, then guesses uniformly.
    pub fn deleting() -> Self {
        Self {
            delete: true,
            held: Held::Nothing,
            half: None,
            guess_len: 0,
        }
    }

    /// Keeps its key and never produces a certificate.
    pub fn refusing() -> Self {
        Self {
            delete: false,
            ..Self::deleting()
        }
    }
}

impl<S: Scalar> VraAdversary<S> for HonestVraAdversary<S> {
    fn round1(
        &mut self,
        p: &LatticeParams<S>,
        public: &SklPublic<S>,
        god: &SimulatorHandle<S>,
        _: EvalOracle<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<KeygenMsg1<S>> {
        let (msg1, state) = skl_lessee_round1(p, public, god, rng)?;
        self.guess_len = public.config.indices() * public.config.w;
        self.half = Some(state);
        Ok(msg1)
    }

    fn certify(
        &mut self,
        p: &LatticeParams<S>,
        msg2: Option<KeygenMsg2<S>>,
        _: EvalOracle<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<Option<DeletionCert>> {
        let half = self
            .half
            .take()
            .ok_or_else(|| Error::Protocol("certify before round 1".into()))?;
        self.held = match msg2 {
            Some(m) => Held::Full(skl_lessee_finish(p, half, m)?),
            None => Held::Half(half),
        };
        if !self.delete {
            return Ok(None);
        }
        let cert = match std::mem::replace(&mut self.held, Held::Nothing) {
            Held::Full(key) => skl_del(p, key, rng)?,
            Held::Half(half) => skl_del_half(half, rng)?,
            Held::Nothing => return Err(Error::Protocol("no key to delete".into())),
        };
        Ok(Some(cert))
    }

    fn guess(
        &mut self,
        _: &SklDvk<S>,
        _: &VraChallenge<S>,
        rng: &mut dyn RngCore,
    ) -> Result<BitVec> {
        Ok(BitVec::random(self.guess_len, rng))
    }
}

/// Outcome of a standalone extraction run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractionReport {
    /// The planted marks.
    pub marks: Vec<BitVec>,
    /// What the extractor recovered.
    pub extracted: Vec<BitVec>,
}

impl ExtractionReport {
    /// Every mark came back.
    pub fn all_recovered(&self) -> bool {
        self.marks == self.extracted
    }
}

/// Plants `count` random `ell`-bit marks in watermarkable-PKE keys and extracts them from an honest decryptor.
pub fn run_wpke_extraction<P: Pke, R: RngCore>(
    pke: &P,
    count: usize,
    ell: usize,
    rng: &mut R,
) -> Result<ExtractionReport> {
    let mut eks = Vec::with_capacity(count);
    let mut dks = Vec::with_capacity(count);
    let mut marks = Vec::with_capacity(count);
    for _ in 0..count {
        let (ek, msk) = wpke_kg(pke, ell, rng)?;
        let x = BitVec::random(ell, rng);
        dks.push(wpke_mark(&msk, &x)?);
        eks.push(ek);
        marks.push(x);
    }
    let extracted = wpke_parallel_extract(
        pke,
        &eks,
        |cts| {
            cts.iter()
                .zip(&dks)
                .map(|(c, dk)| wpke_dec(pke, dk, c).unwrap_or_else(|_| BitVec::zeros(ell)))
                .collect()
        },
        rng,
    );
    Ok(ExtractionReport { marks, extracted })
}

/// Plants `count` random `w`-bit marks in watermarkable-UPF keys and extracts them from an honest predictor.
pub fn run_wupf_extraction<R: RngCore>(
    count: usize,
    w: usize,
    ell: usize,
    rng: &mut R,
) -> Result<ExtractionReport> {
    let mut xks = Vec::with_capacity(count);
    let mut keys = Vec::with_capacity(count);
    let mut marks = Vec::with_capacity(count);
    for _ in 0..count {
        let (msk, xk) = wupf_kg(w, ell, rng)?;
        let x = BitVec::random(w, rng);
        keys.push(wupf_mark(&msk, &x)?);
        xks.push(xk);
        marks.push(x);
    }
    let extracted = wupf_parallel_extract(&xks, |inputs| {
        inputs
            .iter()
            .zip(&keys)
            .map(|(s, k)| wupf_eval(k, s).unwrap_or_else(|_| BitVec::zeros(w)))
            .collect()
    });
    Ok(ExtractionReport { marks, extracted })
}
