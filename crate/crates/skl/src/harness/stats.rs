//! Monte-Carlo statistics: Hadamard sampling against brute force, random
//! certificate acceptance, coherent-receiver collapse with its certified
//! bound, and extraction-mode decoding.

use rand::RngCore;

use crate::bits::BitVec;
use crate::branch::{BranchState, Registers};
use crate::error::{Error, Result};
use crate::lease::{skl_lessee_round1, skl_setup, DelVerifier, DeletionCert, SklConfig};
use crate::modq::{smudging_lemma_bound, smudging_tv, LatticeParams, Scalar, TruncatedGaussian};
use crate::ot::{ot_crs_gen, ot_extract, ot_receive1, Mode};
use crate::sfe::{sfe_coherent_receive1, sfe_crs_gen};

/// Ordered `key=value` lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StatsReport {
    /// The lines, in order.
    pub lines: Vec<(String, String)>,
}

impl StatsReport {
    fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.lines.push((key.into(), value.to_string()));
    }

    /// The value recorded under `key`.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// `key=value` text.
    pub fn to_text(&self) -> String {
        self.lines
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }
}

/// Exact Hadamard-basis outcome distribution of a state over `L ≤ 20` total register bits.
///
/// `Pr[d] = 2^{-L} (Σ_b α_b (−1)^{⟨d, r_b⟩})²`, indexed by `d` read as a little-endian integer.
pub fn hadamard_distribution(state: &BranchState) -> Result<Vec<f64>> {
    let contents: Vec<(f64, u64)> = state
        .branches()
        .iter()
        .map(|b| (b.amplitude, b.registers.concat()))
        .map(|(a, bits)| (a, bits.to_u64()))
        .collect();
    let len = state.branches()[0].registers.concat().len();
    if len > 20 {
        return Err(Error::InvalidParams(format!(
            "{len} bits is too many to enumerate"
        )));
    }
    let size = 1usize << len;
    Ok((0..size as u64)
        .map(|d| {
            let amp: f64 = contents
                .iter()
                .map(|&(a, r)| if (d & r).count_ones() % 2 == 0 { a } else { -a })
                .sum();
            amp * amp / size as f64
        })
        .collect())
}

/// Total-variation distance between `samples` draws of `measure_hadamard_all` and the exact distribution.
pub fn hadamard_sample_tv<R: RngCore>(
    state: &BranchState,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let exact = hadamard_distribution(state)?;
    let mut counts = vec![0usize; exact.len()];
    for _ in 0..samples {
        counts[state.measure_hadamard_all(rng).to_u64() as usize] += 1;
    }
    Ok(exact
        .iter()
        .zip(&counts)
        .map(|(p, &c)| (p - c as f64 / samples as f64).abs())
        .sum::<f64>()
        / 2.0)
}

/// Amplitude pairs exercised by [`stats_hadamard`].
pub const HADAMARD_AMPLITUDES: [(f64, f64); 3] = [
    (
        std::f64::consts::FRAC_1_SQRT_2,
        std::f64::consts::FRAC_1_SQRT_2,
    ),
    (0.8, 0.6),
    (1.0, 0.0),
];

/// A two-branch state on one register of `len` bits with distinct random contents.
pub fn random_pair_state<R: RngCore>(
    len: usize,
    amps: (f64, f64),
    rng: &mut R,
) -> Result<BranchState> {
    if len == 0 {
        return Err(Error::InvalidParams("register must be nonempty".into()));
    }
    let r0 = BitVec::random(len, rng);
    let r1 = loop {
        let r = BitVec::random(len, rng);
        if r != r0 {
            break r;
        }
    };
    BranchState::make_state(vec![
        (amps.0, Registers::single("r", r0)),
        (amps.1, Registers::single("r", r1)),
    ])
}

/// Hadamard TV for every `L ∈ 1..=max_len` and every amplitude pair, plus the maximum.
pub fn stats_hadamard<R: RngCore>(
    max_len: usize,
    samples: usize,
    rng: &mut R,
) -> Result<StatsReport> {
    let mut out = StatsReport::default();
    let mut worst = 0.0f64;
    for len in 1..=max_len {
        for (a0, a1) in HADAMARD_AMPLITUDES {
            let state = random_pair_state(len, (a0, a1), rng)?;
            let tv = hadamard_sample_tv(&state, samples, rng)?;
            worst = worst.max(tv);
            out.push(format!("tv.L{len}.a{a0:.3}_{a1:.3}"), format!("{tv:.5}"));
        }
    }
    out.push("samples", samples);
    out.push("tv.max", format!("{worst:.5}"));
    Ok(out)
}

/// Acceptance rate of uniformly random certificates against one honest round-1 transcript.
pub fn random_cert_acceptance<S: Scalar, R: RngCore>(
    p: &LatticeParams<S>,
    config: SklConfig,
    trials: usize,
    rng: &mut R,
) -> Result<(usize, usize)> {
    let (public, mut dvk, god) = skl_setup(p, config, rng)?;
    let (msg1, _) = skl_lessee_round1(p, &public, &god, rng)?;
    dvk.record(&msg1)?;
    let verifier = DelVerifier::new(p, &dvk, config.w);
    let accepted = (0..trials)
        .filter(|_| {
            verifier
                .verify(&DeletionCert::random(p, &config, rng))
                .accepted
        })
        .count();
    Ok((accepted, trials))
}

/// [`random_cert_acceptance`] as a report with the reference interval `[2^{-(n+1)}, 2^{-(n-1)}]`.
pub fn stats_delvrfy<S: Scalar, R: RngCore>(
    p: &LatticeParams<S>,
    config: SklConfig,
    trials: usize,
    rng: &mut R,
) -> Result<StatsReport> {
    let (accepted, trials) = random_cert_acceptance(p, config, trials, rng)?;
    let rate = accepted as f64 / trials.max(1) as f64;
    let lo = (-(config.n as f64) - 1.0).exp2();
    let hi = (-(config.n as f64) + 1.0).exp2();
    let mut out = StatsReport::default();
    out.push("params", p.name());
    out.push("n", config.n);
    out.push("w", config.w);
    out.push("trials", trials);
    out.push("accepted", accepted);
    out.push("rate", format!("{rate:.6}"));
    out.push("expected", format!("{:.6}", (-(config.n as f64)).exp2()));
    out.push("interval", format!("[{lo:.6}, {hi:.6}]"));
    out.push("within", rate >= lo && rate <= hi);
    Ok(out)
}

/// Certified `log₂` upper bound on the hiding-mode collapse probability of a `w`-wire coherent receiver.
///
/// Each wire's partner branch carries noise `e'_a ± e` with `‖e‖∞` at most the
/// CRS truncation bound; it is lost only if some coordinate leaves the
/// receiver's truncated support. The bound is the union over `w·m` coordinates.
pub fn hiding_collapse_bound_log2<S: Scalar>(p: &LatticeParams<S>, w: usize) -> f64 {
    let dist = TruncatedGaussian::new(p.sigma_prime(), p.m());
    let per = dist.support_loss_log2(p.crs_noise().bound());
    per + ((w * p.m()) as f64).log2()
}

/// Counts of [`sfe_coherent_receive1`] outcomes on two-branch claws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CollapseCounts {
    /// Trials per mode.
    pub trials: usize,
    /// Hiding-mode runs that kept both branches.
    pub hiding_survived: usize,
    /// Extraction-mode runs that lost a branch.
    pub extraction_collapsed: usize,
}

/// Runs the coherent SFE receiver on a fresh `(|x₀⟩ + |x₁⟩)/√2` over `w` bits in both modes.
pub fn coherent_collapse_counts<S: Scalar, R: RngCore>(
    p: &LatticeParams<S>,
    w: usize,
    trials: usize,
    rng: &mut R,
) -> Result<CollapseCounts> {
    let mut counts = CollapseCounts {
        trials,
        hiding_survived: 0,
        extraction_collapsed: 0,
    };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for _ in 0..trials {
        for mode in [Mode::Hiding, Mode::Extractable] {
            let claw = random_pair_state(w, (h, h), rng)?;
            let claw = BranchState::make_state(
                claw.branches()
                    .iter()
                    .map(|b| (b.amplitude, Registers::single("x", b.registers.concat())))
                    .collect(),
            )?;
            let (crs, td) = sfe_crs_gen(p, mode, w, rng);
            let rec = sfe_coherent_receive1(p, &crs, &claw, &td, rng)?;
            match mode {
                Mode::Hiding => counts.hiding_survived += usize::from(!rec.collapsed),
                Mode::Extractable => counts.extraction_collapsed += usize::from(rec.collapsed),
            }
        }
    }
    Ok(counts)
}

/// Smudging and support-loss figures for the preset, plus optional collapse counts.
pub fn stats_smudging<S: Scalar, R: RngCore>(
    p: &LatticeParams<S>,
    w: usize,
    trials: usize,
    rng: &mut R,
) -> Result<StatsReport> {
    let e = p.crs_noise().bound();
    let mut out = StatsReport::default();
    out.push("params", p.name());
    out.push("sigma", p.sigma());
    out.push("sigma_prime", p.sigma_prime());
    out.push("m", p.m());
    out.push("crs_noise_bound", e);
    out.push(
        "smudging_tv.coordinate",
        format!("{:.3e}", smudging_tv(p.sigma_prime(), p.m(), e)),
    );
    out.push(
        "smudging_lemma.coordinate",
        format!(
            "{:.3e}",
            smudging_lemma_bound(p.sigma_prime(), p.m(), e as f64)
        ),
    );
    let bound = hiding_collapse_bound_log2(p, w);
    out.push("w", w);
    out.push("collapse_bound_log2", format!("{bound:.1}"));
    out.push("certified_below_2^-20", bound <= -20.0);
    if trials > 0 {
        let c = coherent_collapse_counts(p, w, trials, rng)?;
        out.push("trials", c.trials);
        out.push("hiding_survived", c.hiding_survived);
        out.push("extraction_collapsed", c.extraction_collapsed);
    }
    Ok(out)
}

/// Extraction-mode decoding: honest first messages must extract to their choice bit.
pub fn stats_messy<S: Scalar, R: RngCore>(
    p: &LatticeParams<S>,
    trials: usize,
    rng: &mut R,
) -> Result<StatsReport> {
    let mut correct = 0;
    let mut failed = 0;
    for _ in 0..trials {
        let (crs, td) = ot_crs_gen(p, Mode::Extractable, rng);
        let b = rng.next_u32() & 1 == 1;
        let (msg1, _) = ot_receive1(p, &crs, b, rng);
        match ot_extract(p, &td, &msg1)? {
            Some(got) if got == b => correct += 1,
            _ => failed += 1,
        }
    }
    let mut out = StatsReport::default();
    out.push("params", p.name());
    out.push("trials", trials);
    out.push("extracted", correct);
    out.push("failed", failed);
    out.push(
        "rate",
        format!("{:.4}", correct as f64 / trials.max(1) as f64),
    );
    Ok(out)
}
