//! End-to-end sessions: key generation, use, deletion and verification over a
//! transport, with a line-oriented report.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use super::frames::{
    cert_frame, cert_from_frame, ct_frame, ct_from_frame, input_frame, input_from_frame,
    msg1_frame, msg1_from_frame, msg2_frame, msg2_from_frame, ni_frame, ni_from_frame,
};
use super::transport::{Loopback, Party, TcpLoopback, Transport};
use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::lease::{
    ni_del, ni_del_vrfy, ni_enc, ni_kg, ni_qdec, ni_setup, pke_skl_enc, pke_skl_lessor_round2,
    pke_skl_message_len, pke_skl_qdec, pke_skl_setup, prf_skl_eval, prf_skl_lessor_round2,
    prf_skl_qleval, prf_skl_setup, skl_del, skl_lessee_finish, skl_lessee_round1, DelVerifier,
    NiEk, SklConfig,
};
use crate::modq::{LatticeParams, Scalar};
use crate::pke::ToyPke;
use crate::rng::{rng_from_seed, split, SklRng};

/// Which leasing scheme a session runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Interactive PKE leasing.
    Pke,
    /// Non-interactive PKE leasing.
    PkeNi,
    /// PRF leasing.
    Prf,
}

impl Scheme {
    /// Every scheme.
    pub const ALL: [Scheme; 3] = [Self::Pke, Self::PkeNi, Self::Prf];
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pke => "pke",
            Self::PkeNi => "pke-ni",
            Self::Prf => "prf",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pke" => Ok(Self::Pke),
            "pke-ni" => Ok(Self::PkeNi),
            "prf" => Ok(Self::Prf),
            _ => Err(Error::InvalidParams(format!("unknown scheme {s:?}"))),
        }
    }
}

/// Session dimensions and knobs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SessionOptions {
    /// Protocol dimensions.
    pub config: SklConfig,
    /// PRF block input length.
    pub ell: usize,
    /// Decryptions or evaluations before deletion.
    pub uses: usize,
    /// Run over a TCP socket pair instead of in-process queues.
    pub tcp: bool,
}

/// Default width: wide enough that honest certificates almost never hit `d = 0`.
pub const DEFAULT_W: usize = 16;
/// Default garbled label length in bytes.
pub const DEFAULT_SESSION_LABEL_BYTES: usize = 8;
/// Default PRF block input length.
pub const DEFAULT_ELL: usize = 16;

impl SessionOptions {
    /// Defaults for `n` index pairs.
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self {
            config: SklConfig::new(n, DEFAULT_W)?.with_label_bytes(DEFAULT_SESSION_LABEL_BYTES)?,
            ell: DEFAULT_ELL,
            uses: 1,
            tcp: false,
        })
    }
}

/// The three independent random streams of a session.
#[derive(Clone, Debug)]
pub struct SessionRngs {
    /// Setup, round 2 and verification.
    pub lessor: SklRng,
    /// Claw states, round 1 and deletion.
    pub lessee: SklRng,
    /// Messages, encryption and PRF inputs.
    pub user: SklRng,
}

impl SessionRngs {
    /// Splits the root seed into the three streams.
    pub fn from_seed(seed: u64) -> Self {
        let mut root = rng_from_seed(seed);
        Self {
            lessor: split(&mut root),
            lessee: split(&mut root),
            user: split(&mut root),
        }
    }
}

/// Outcome of one phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseResult {
    /// Phase name.
    pub name: &'static str,
    /// Whether the phase succeeded.
    pub pass: bool,
    /// Wall time in microseconds.
    pub micros: u128,
    /// Free-form detail, empty on plain success.
    pub detail: String,
}

/// Everything a session reports.
#[derive(Clone, Debug)]
pub struct SessionReport {
    /// Scheme run.
    pub scheme: Scheme,
    /// Preset name.
    pub params: String,
    /// Dimensions.
    pub options: SessionOptions,
    /// Root seed.
    pub seed: u64,
    /// Phases in order; a failed phase ends the session.
    pub phases: Vec<PhaseResult>,
    /// Frames sent.
    pub frames: usize,
    /// Bytes sent.
    pub wire_bytes: usize,
    /// Hex SHA-256 of every frame sent.
    pub transcript_sha256: String,
    /// Indices where the coherent SFE step lost a branch.
    pub collapsed: Vec<usize>,
}

/// Phase names, in order.
pub const PHASES: [&str; 5] = ["setup", "keygen", "use", "delete", "verify"];

impl SessionReport {
    /// True when every phase ran and passed.
    pub fn passed(&self) -> bool {
        self.phases.len() == PHASES.len() && self.phases.iter().all(|p| p.pass)
    }

    /// The phase named `name`, if it ran.
    pub fn phase(&self, name: &str) -> Option<&PhaseResult> {
        self.phases.iter().find(|p| p.name == name)
    }

    /// `field=value` lines; timings only when asked, so seeded reports compare equal.
    pub fn to_text(&self, timings: bool) -> String {
        let c = self.options.config;
        let mut out = vec![
            format!("scheme={}", self.scheme),
            format!("params={}", self.params),
            format!("n={}", c.n),
            format!("w={}", c.w),
            format!("label_bytes={}", c.label_bytes),
            format!("seed={}", self.seed),
        ];
        if self.scheme == Scheme::Prf {
            out.push(format!("ell={}", self.options.ell));
        }
        out.push(format!("uses={}", self.options.uses));
        for name in PHASES {
            match self.phase(name) {
                Some(p) => {
                    out.push(format!(
                        "phase.{name}={}",
                        if p.pass { "pass" } else { "fail" }
                    ));
                    if !p.detail.is_empty() {
                        out.push(format!("detail.{name}={}", p.detail));
                    }
                    if timings {
                        out.push(format!("time.{name}_ms={:.3}", p.micros as f64 / 1000.0));
                    }
                }
                None => out.push(format!("phase.{name}=skipped")),
            }
        }
        let collapsed: Vec<String> = self.collapsed.iter().map(usize::to_string).collect();
        out.push(format!("collapsed=[{}]", collapsed.join(",")));
        out.push(format!("wire.frames={}", self.frames));
        out.push(format!("wire.bytes={}", self.wire_bytes));
        out.push(format!("wire.sha256={}", self.transcript_sha256));
        out.push(format!(
            "result={}",
            if self.passed() { "pass" } else { "fail" }
        ));
        out.join("\n") + "\n"
    }
}

struct Recorder {
    phases: Vec<PhaseResult>,
}

impl Recorder {
    /// Runs one phase; `Ok(Some(detail))` is a failure with a reason.
    fn run<T>(
        &mut self,
        name: &'static str,
        f: impl FnOnce() -> Result<(T, Option<String>)>,
    ) -> Option<T> {
        let start = Instant::now();
        let out = f();
        let micros = start.elapsed().as_micros();
        match out {
            Ok((v, fail)) => {
                let pass = fail.is_none();
                self.phases.push(PhaseResult {
                    name,
                    pass,
                    micros,
                    detail: fail.unwrap_or_default(),
                });
                pass.then_some(v)
            }
            Err(e) => {
                self.phases.push(PhaseResult {
                    name,
                    pass: false,
                    micros,
                    detail: e.to_string(),
                });
                None
            }
        }
    }
}

fn ok<T>(v: T) -> Result<(T, Option<String>)> {
    Ok((v, None))
}

fn verdict_detail(accepted: bool, diagnostics: &[String]) -> Option<String> {
    (!accepted).then(|| diagnostics.join("; "))
}

/// Runs one seeded session of `scheme` under preset `p`.
pub fn run_session<S: Scalar>(
    p: &LatticeParams<S>,
    scheme: Scheme,
    options: SessionOptions,
    seed: u64,
) -> Result<SessionReport> {
    if options.tcp {
        let mut t = TcpLoopback::new()?;
        run_session_over(p, scheme, options, seed, &mut t)
    } else {
        run_session_over(p, scheme, options, seed, &mut Loopback::new())
    }
}

/// [`run_session`] over a caller-supplied transport.
pub fn run_session_over<S: Scalar, T: Transport>(
    p: &LatticeParams<S>,
    scheme: Scheme,
    options: SessionOptions,
    seed: u64,
    t: &mut T,
) -> Result<SessionReport> {
    if scheme == Scheme::Prf && options.ell == 0 {
        return Err(Error::InvalidParams("ell must be positive".into()));
    }
    let mut rngs = SessionRngs::from_seed(seed);
    let mut rec = Recorder { phases: Vec::new() };
    let collapsed = match scheme {
        Scheme::Pke => pke_session(p, options, &mut rngs, t, &mut rec),
        Scheme::PkeNi => ni_session(p, options, &mut rngs, t, &mut rec),
        Scheme::Prf => prf_session(p, options, &mut rngs, t, &mut rec),
    };
    Ok(SessionReport {
        scheme,
        params: p.name().to_string(),
        options,
        seed,
        phases: rec.phases,
        frames: t.stats().frames,
        wire_bytes: t.stats().bytes,
        transcript_sha256: t.stats().digest_hex(),
        collapsed,
    })
}

fn collapsed_of(flags: &[bool]) -> Vec<usize> {
    flags
        .iter()
        .enumerate()
        .filter(|(_, &c)| c)
        .map(|(i, _)| i)
        .collect()
}

fn pke_session<S: Scalar, T: Transport>(
    p: &LatticeParams<S>,
    o: SessionOptions,
    rngs: &mut SessionRngs,
    t: &mut T,
    rec: &mut Recorder,
) -> Vec<usize> {
    let pke = ToyPke;
    let mut collapsed = Vec::new();
    let _ = (|| -> Option<()> {
        let (ek, msk, mut dvk, god) = rec.run("setup", || {
            ok(pke_skl_setup(p, &pke, o.config, &mut rngs.lessor)?)
        })?;
        let key = rec.run("keygen", || {
            let (msg1, state) = skl_lessee_round1(p, &ek.public, &god, &mut rngs.lessee)?;
            collapsed = collapsed_of(&state.collapsed);
            t.send(Party::Lessee, &msg1_frame(p, &msg1))?;
            let got = msg1_from_frame(p, t.recv(Party::Lessor)?)?;
            let msg2 = pke_skl_lessor_round2(p, &pke, &ek, &msk, &got, &mut dvk, &mut rngs.lessor)?;
            t.send(Party::Lessor, &msg2_frame(p, &msg2))?;
            let got = msg2_from_frame(p, t.recv(Party::Lessee)?)?;
            ok(skl_lessee_finish(p, state, got)?)
        })?;
        let key = rec.run("use", || {
            let mut key = key;
            let mut wrong = 0;
            for _ in 0..o.uses {
                let m = BitVec::random(pke_skl_message_len(&o.config), &mut rngs.user);
                let ct = pke_skl_enc(&pke, &ek.weks, &m, &mut rngs.user)?;
                t.send(Party::Lessor, &ct_frame(&pke, &ct))?;
                let got = ct_from_frame(&pke, t.recv(Party::Lessee)?)?;
                let (dec, next) = pke_skl_qdec(&pke, &key, &got, &mut rngs.lessee)?;
                wrong += usize::from(dec != m);
                key = next;
            }
            Ok((
                key,
                (wrong > 0).then(|| format!("{wrong}/{} decryptions wrong", o.uses)),
            ))
        })?;
        rec.run("delete", || {
            let cert = skl_del(p, key, &mut rngs.lessee)?;
            ok(t.send(Party::Lessee, &cert_frame(&cert))?)
        })?;
        rec.run("verify", || {
            let cert = cert_from_frame(t.recv(Party::Lessor)?)?;
            let v = DelVerifier::new(p, &dvk, o.config.w).verify(&cert);
            Ok(((), verdict_detail(v.accepted, &v.diagnostics)))
        })
    })();
    collapsed
}

fn ni_session<S: Scalar, T: Transport>(
    p: &LatticeParams<S>,
    o: SessionOptions,
    rngs: &mut SessionRngs,
    t: &mut T,
    rec: &mut Recorder,
) -> Vec<usize> {
    let pke = ToyPke;
    let mut collapsed = Vec::new();
    let _ = (|| -> Option<()> {
        let (public, dvk, god) =
            rec.run("setup", || ok(ni_setup(p, o.config, &mut rngs.lessor)?))?;
        let (ek, half) = rec.run("keygen", || {
            let (ek, half) = ni_kg(p, &public, &god, &mut rngs.lessee)?;
            collapsed = collapsed_of(&half.collapsed);
            t.send(Party::Lessee, &msg1_frame(p, &ek.msg1))?;
            let msg1 = msg1_from_frame(p, t.recv(Party::Lessor)?)?;
            ok((
                NiEk {
                    public: public.clone(),
                    msg1,
                },
                half,
            ))
        })?;
        let half = rec.run("use", || {
            let mut half = half;
            let mut wrong = 0;
            for _ in 0..o.uses {
                let m = BitVec::random(pke_skl_message_len(&o.config), &mut rngs.user);
                let ct = ni_enc(p, &pke, &ek, &m, &mut rngs.user)?;
                t.send(Party::Lessor, &ni_frame(p, &pke, &ct))?;
                let got = ni_from_frame(p, &pke, t.recv(Party::Lessee)?)?;
                let (dec, next) = ni_qdec(p, &pke, &half, &got, &mut rngs.lessee)?;
                wrong += usize::from(dec != m);
                half = next;
            }
            Ok((
                half,
                (wrong > 0).then(|| format!("{wrong}/{} decryptions wrong", o.uses)),
            ))
        })?;
        rec.run("delete", || {
            let cert = ni_del(half, &mut rngs.lessee)?;
            ok(t.send(Party::Lessee, &cert_frame(&cert))?)
        })?;
        rec.run("verify", || {
            let cert = cert_from_frame(t.recv(Party::Lessor)?)?;
            let v = ni_del_vrfy(p, &dvk, &ek, &cert)?;
            Ok(((), verdict_detail(v.accepted, &v.diagnostics)))
        })
    })();
    collapsed
}

fn prf_session<S: Scalar, T: Transport>(
    p: &LatticeParams<S>,
    o: SessionOptions,
    rngs: &mut SessionRngs,
    t: &mut T,
    rec: &mut Recorder,
) -> Vec<usize> {
    let mut collapsed = Vec::new();
    let _ = (|| -> Option<()> {
        let (public, msk, _xk, mut dvk, god) = rec.run("setup", || {
            ok(prf_skl_setup(p, o.config, o.ell, &mut rngs.lessor)?)
        })?;
        let key = rec.run("keygen", || {
            let (msg1, state) = skl_lessee_round1(p, &public, &god, &mut rngs.lessee)?;
            collapsed = collapsed_of(&state.collapsed);
            t.send(Party::Lessee, &msg1_frame(p, &msg1))?;
            let got = msg1_from_frame(p, t.recv(Party::Lessor)?)?;
            let msg2 = prf_skl_lessor_round2(p, &public, &msk, &got, &mut dvk, &mut rngs.lessor)?;
            t.send(Party::Lessor, &msg2_frame(p, &msg2))?;
            let got = msg2_from_frame(p, t.recv(Party::Lessee)?)?;
            ok(skl_lessee_finish(p, state, got)?)
        })?;
        let key = rec.run("use", || {
            let mut key = key;
            let mut wrong = 0;
            for _ in 0..o.uses {
                let s = BitVec::random(msk.input_len(), &mut rngs.user);
                let want = prf_skl_eval(&msk, &s)?;
                t.send(Party::Lessor, &input_frame(&s))?;
                let got = input_from_frame(t.recv(Party::Lessee)?)?;
                let out = prf_skl_qleval(&key, o.ell, &got, &mut rngs.lessee)?;
                wrong += usize::from(out.t != want);
                key = out.key;
            }
            Ok((
                key,
                (wrong > 0).then(|| format!("{wrong}/{} evaluations disagree", o.uses)),
            ))
        })?;
        rec.run("delete", || {
            let cert = skl_del(p, key, &mut rngs.lessee)?;
            ok(t.send(Party::Lessee, &cert_frame(&cert))?)
        })?;
        rec.run("verify", || {
            let cert = cert_from_frame(t.recv(Party::Lessor)?)?;
            let v = DelVerifier::new(p, &dvk, o.config.w).verify(&cert);
            Ok(((), verdict_detail(v.accepted, &v.diagnostics)))
        })
    })();
    collapsed
}
