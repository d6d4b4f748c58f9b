//! Lattice parameter sets and the two presets.
//!
//! * `demo`: `q = 2^61 − 1`, `n = 4`, `m = 610`, `σ = 4`, `σ' = 2^24`, `τ = 8`.
//!   Correctness holds with a wide margin; the `τ ≥ √(qm)·log²m` requirement
//!   is waived, so messiness is not certified and [`super::is_messy`] refuses
//!   to run.
//! * `full`: `q = 2^150 − 3`, `n = 8`, `m = 2700`, `σ = 2^8`, `σ' = 2^25`,
//!   `τ = √(qm)·log₂²m`; every inequality holds.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use super::gauss::GaussSampler;
use super::scalar::{is_probable_prime, Modulus, Scalar};
use crate::error::{Error, Result};

/// Dimensions, modulus and noise widths of an LWE instance family.
#[derive(Clone, Debug)]
pub struct LatticeParams<S: Scalar> {
    name: String,
    modulus: Modulus<S>,
    n: usize,
    m: usize,
    sigma: f64,
    sigma_prime: f64,
    tau: f64,
    c_const: f64,
    messy_certified: bool,
    crs_noise: GaussSampler,
    receiver_noise: GaussSampler,
    sender_noise: GaussSampler,
}

impl<S: Scalar> LatticeParams<S> {
    /// Validates and builds a parameter set.
    pub fn new(
        name: &str,
        q: S,
        n: usize,
        m: usize,
        sigma: f64,
        sigma_prime: f64,
        tau: f64,
    ) -> Result<Self> {
        let modulus = Modulus::new(q);
        let q_big = modulus.q_big().clone();
        if !is_probable_prime(&q_big) {
            return Err(Error::InvalidParams("q must be prime".into()));
        }
        if S::from_big(&(&q_big << 1u32)).is_none() {
            return Err(Error::InvalidParams("2q must fit the scalar type".into()));
        }
        if n == 0 {
            return Err(Error::InvalidParams("n must be positive".into()));
        }
        let k = modulus.bits() as usize;
        if m < 2 * (n + 1) * k {
            return Err(Error::InvalidParams(format!(
                "m = {m} is below 2(n+1)⌈log q⌉ = {}",
                2 * (n + 1) * k
            )));
        }
        for (label, w) in [("sigma", sigma), ("sigma'", sigma_prime), ("tau", tau)] {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidParams(format!("{label} must be positive")));
            }
        }
        let q_f = modulus.q_f64();
        let mf = m as f64;
        if mf * mf * sigma_prime * tau > q_f / 8.0 {
            return Err(Error::InvalidParams("m²σ'τ exceeds q/8".into()));
        }
        let messy_certified = tau >= (q_f * mf).sqrt() * mf.log2().powi(2);
        let m_bar = m - n * k;
        let c_const = 6.0 * ((m_bar as f64 + 1.0) / (n * k) as f64).sqrt();
        Ok(Self {
            name: name.to_string(),
            modulus,
            n,
            m,
            sigma,
            sigma_prime,
            tau,
            c_const,
            messy_certified,
            crs_noise: GaussSampler::new(sigma, m),
            receiver_noise: GaussSampler::new(sigma_prime, m),
            sender_noise: GaussSampler::new(tau, m),
        })
    }

    /// Overrides the trapdoor constant `C` of the inversion bound `q/(C√(n⌈log q⌉))`.
    pub fn with_c(mut self, c: f64) -> Self {
        self.c_const = c;
        self
    }

    /// Preset label.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// The modulus.
    pub fn modulus(&self) -> &Modulus<S> {
        &self.modulus
    }

    /// Secret dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Sample dimension.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Gadget length `⌈log₂ q⌉`.
    pub fn k(&self) -> usize {
        self.modulus.bits() as usize
    }

    /// Columns of the uniform block of a trapdoor matrix, `m − n·k`.
    pub fn m_bar(&self) -> usize {
        self.m - self.n * self.k()
    }

    /// CRS noise width.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Receiver noise width.
    pub fn sigma_prime(&self) -> f64 {
        self.sigma_prime
    }

    /// Sender randomness width.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Trapdoor constant `C`.
    pub fn c_const(&self) -> f64 {
        self.c_const
    }

    /// Inversion acceptance radius `q/(C√(n⌈log q⌉))` on the Euclidean norm of the error.
    pub fn invert_bound(&self) -> f64 {
        self.modulus.q_f64() / (self.c_const * ((self.n * self.k()) as f64).sqrt())
    }

    /// True when `τ ≥ √(qm)·log₂²m`, the regime in which messiness is certified.
    pub fn messy_certified(&self) -> bool {
        self.messy_certified
    }

    /// `log₂(q/8) − log₂(m²σ'τ)`, the correctness slack in bits.
    pub fn correctness_margin_bits(&self) -> f64 {
        let mf = self.m as f64;
        (self.modulus.q_f64() / 8.0).log2() - (mf * mf * self.sigma_prime * self.tau).log2()
    }

    /// Sampler of width σ.
    pub fn crs_noise(&self) -> &GaussSampler {
        &self.crs_noise
    }

    /// Sampler of width σ'.
    pub fn receiver_noise(&self) -> &GaussSampler {
        &self.receiver_noise
    }

    /// Sampler of width τ.
    pub fn sender_noise(&self) -> &GaussSampler {
        &self.sender_noise
    }
}

/// Fast word-size preset.
pub fn demo() -> LatticeParams<u64> {
    let q = (1u64 << 61) - 1;
    LatticeParams::new("demo", q, 4, 2 * 5 * 61, 4.0, (1u64 << 24) as f64, 8.0)
        .expect("demo preset is valid")
}

/// Wide-modulus preset satisfying every inequality of the OT analysis.
pub fn full() -> LatticeParams<BigUint> {
    let q = (BigUint::one() << 150u32) - BigUint::from(3u32);
    let m = 2 * 9 * 150;
    let mf = m as f64;
    let tau = (q.to_f64().expect("finite") * mf).sqrt() * mf.log2().powi(2);
    LatticeParams::new("full", q, 8, m, 256.0, (1u64 << 25) as f64, tau)
        .expect("full preset is valid")
}
