//! Truncated discrete Gaussians over Z.
//!
//! The Gaussian function is `ρ_σ(x) = exp(-π x²/σ²)` and coordinates are
//! truncated at `⌈σ√m⌉`. Narrow widths are sampled by inverse CDF over a
//! precomputed 64-bit table; wide widths by rejection from a uniform proposal
//! on `[-B', B']`, `B' = min(⌈σ√m⌉, ⌈7σ⌉)`. Mass beyond 7σ is below 10⁻⁶⁶ and
//! therefore below both the table resolution and double precision.

use num_traits::ToPrimitive;
use rand::{Rng, RngCore};

use super::scalar::{Modulus, Scalar};
use super::vector::ModQVector;

const TABLE_MAX_SIGMA: f64 = 64.0;
const DIRECT_SUM_LIMIT: i128 = 1 << 24;
const TAIL_SIGMAS: f64 = 7.0;

/// Per-coordinate truncation bound `⌈σ√m⌉`.
pub fn truncation_bound(sigma: f64, m: usize) -> i128 {
    (sigma * (m as f64).sqrt()).ceil() as i128
}

/// `ρ_σ(x)`.
pub fn rho(sigma: f64, x: f64) -> f64 {
    (-std::f64::consts::PI * x * x / (sigma * sigma)).exp()
}

const UNRESOLVED: u16 = u16::MAX;

#[derive(Clone, Debug)]
enum Kind {
    Table {
        lo: i128,
        thresholds: Vec<u64>,
        /// Index for each top-16-bit prefix of the uniform word, or `UNRESOLVED`.
        prefix: Vec<u16>,
    },
    Rejection {
        range: i128,
    },
}

/// Sampler for the truncated discrete Gaussian of width `sigma` in dimension `m`.
#[derive(Clone, Debug)]
pub struct GaussSampler {
    sigma: f64,
    bound: i128,
    kind: Kind,
}

impl GaussSampler {
    /// Prepares a sampler; `sigma` must be positive.
    pub fn new(sigma: f64, m: usize) -> Self {
        assert!(sigma > 0.0 && sigma.is_finite(), "sigma must be positive");
        let bound = truncation_bound(sigma, m.max(1));
        let range = bound.min((TAIL_SIGMAS * sigma).ceil() as i128).max(0);
        let kind = if sigma <= TABLE_MAX_SIGMA {
            let weights: Vec<f64> = (-range..=range).map(|x| rho(sigma, x as f64)).collect();
            let total: f64 = weights.iter().sum();
            let mut cum = 0.0;
            let mut thresholds: Vec<u64> = weights
                .iter()
                .map(|w| {
                    cum += w / total;
                    (cum * 18_446_744_073_709_551_616.0).min(u64::MAX as f64) as u64
                })
                .collect();
            *thresholds.last_mut().expect("nonempty support") = u64::MAX;
            let index = |u: u64| {
                thresholds
                    .partition_point(|&t| t <= u)
                    .min(thresholds.len() - 1)
            };
            let prefix = (0..=u64::from(u16::MAX))
                .map(|p| {
                    let (first, last) = (index(p << 48), index((p << 48) | ((1 << 48) - 1)));
                    if first == last {
                        first as u16
                    } else {
                        UNRESOLVED
                    }
                })
                .collect();
            Kind::Table {
                lo: -range,
                thresholds,
                prefix,
            }
        } else {
            Kind::Rejection { range }
        };
        Self { sigma, bound, kind }
    }

    /// Width parameter.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Truncation bound `⌈σ√m⌉`.
    pub fn bound(&self) -> i128 {
        self.bound
    }

    /// One coordinate.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> i128 {
        match &self.kind {
            Kind::Table {
                lo,
                thresholds,
                prefix,
            } => {
                let u = rng.next_u64();
                let idx = match prefix[(u >> 48) as usize] {
                    UNRESOLVED => thresholds
                        .partition_point(|&t| t <= u)
                        .min(thresholds.len() - 1),
                    i => usize::from(i),
                };
                lo + idx as i128
            }
            Kind::Rejection { range } => loop {
                let x = rng.gen_range(-*range..=*range);
                if rng.gen::<f64>() < rho(self.sigma, x as f64) {
                    return x;
                }
            },
        }
    }

    /// `len` i.i.d. coordinates.
    pub fn sample_vec<R: RngCore + ?Sized>(&self, len: usize, rng: &mut R) -> Vec<i128> {
        (0..len).map(|_| self.sample(rng)).collect()
    }
}

/// `m` i.i.d. coordinates of width `sigma`, reduced into Z_q.
pub fn sample_gauss<S: Scalar, R: RngCore + ?Sized>(
    sigma: f64,
    m: usize,
    md: &Modulus<S>,
    rng: &mut R,
) -> ModQVector<S> {
    let sampler = GaussSampler::new(sigma, m);
    ModQVector::from_i128s(md, &sampler.sample_vec(m, rng))
}

/// Exact probability mass function of the one-dimensional truncated Gaussian.
#[derive(Clone, Debug)]
pub struct TruncatedGaussian {
    sigma: f64,
    bound: i128,
    z: f64,
}

impl TruncatedGaussian {
    /// Distribution of width `sigma` truncated at `⌈σ√m⌉`.
    pub fn new(sigma: f64, m: usize) -> Self {
        let bound = truncation_bound(sigma, m.max(1));
        let reach = bound.min((10.0 * sigma).ceil() as i128 + 1);
        let z = if reach <= DIRECT_SUM_LIMIT {
            1.0 + 2.0 * (1..=reach).rev().map(|x| rho(sigma, x as f64)).sum::<f64>()
        } else if (bound as f64) >= 10.0 * sigma {
            sigma
        } else {
            sigma * libm::erf(std::f64::consts::PI.sqrt() * (bound as f64 + 0.5) / sigma)
        };
        Self { sigma, bound, z }
    }

    /// Truncation bound.
    pub fn bound(&self) -> i128 {
        self.bound
    }

    /// Normalizing constant `Σ_{|x|≤B} ρ_σ(x)`.
    pub fn normalizer(&self) -> f64 {
        self.z
    }

    /// `Pr[X = x]`.
    pub fn pmf(&self, x: i128) -> f64 {
        if x.abs() > self.bound {
            0.0
        } else {
            rho(self.sigma, x as f64) / self.z
        }
    }

    /// `Pr[lo ≤ X ≤ hi]`.
    pub fn mass(&self, lo: i128, hi: i128) -> f64 {
        let (lo, hi) = (lo.max(-self.bound), hi.min(self.bound));
        if lo > hi {
            return 0.0;
        }
        if hi - lo < DIRECT_SUM_LIMIT {
            return (lo..=hi).map(|x| self.pmf(x)).sum();
        }
        let s = std::f64::consts::PI.sqrt() / self.sigma;
        let integral = 0.5
            * self.sigma
            * (libm::erf(s * (hi as f64 + 0.5)) - libm::erf(s * (lo as f64 - 0.5)));
        (integral / self.z).min(1.0)
    }

    /// Total-variation distance between `X` and `X + e`.
    pub fn shift_tv(&self, e: i128) -> f64 {
        let e = e.abs();
        if e == 0 {
            return 0.0;
        }
        if e > 2 * self.bound {
            return 1.0;
        }
        self.mass(-(e / 2), (e + 1) / 2 - 1)
    }

    /// Upper bound on `log₂ Pr[|X + e| > B]`, `-∞` when `e = 0`.
    pub fn support_loss_log2(&self, e: i128) -> f64 {
        let e = e.abs();
        if e == 0 {
            return f64::NEG_INFINITY;
        }
        let first = self.bound - e + 1;
        if first <= 0 {
            return self.mass(first, self.bound).log2();
        }
        let ln = (e as f64).ln()
            - std::f64::consts::PI * (first as f64 / self.sigma).powi(2)
            - self.z.ln();
        (ln / std::f64::consts::LN_2).min(0.0)
    }
}

/// Exact total-variation distance between the truncated Gaussian of width `sigma_prime` (dimension `m`) and its shift by `e`.
pub fn smudging_tv(sigma_prime: f64, m: usize, e: i128) -> f64 {
    TruncatedGaussian::new(sigma_prime, m).shift_tv(e)
}

/// The smudging lemma's upper bound `√(2(1 − exp(−2π√m·|e|/σ')))`.
pub fn smudging_lemma_bound(sigma_prime: f64, m: usize, e_norm: f64) -> f64 {
    let t = 2.0 * std::f64::consts::PI * (m as f64).sqrt() * e_norm / sigma_prime;
    (2.0 * (1.0 - (-t).exp())).sqrt()
}

/// Upper bound on `log₂ Pr[‖X + e‖∞ > B]` for an `m`-dimensional sample, by the union bound over coordinates.
pub fn support_loss_log2<S: Scalar>(
    sigma: f64,
    m: usize,
    md: &Modulus<S>,
    e: &ModQVector<S>,
) -> f64 {
    let dist = TruncatedGaussian::new(sigma, m);
    let logs: Vec<f64> = e
        .entries()
        .iter()
        .map(|x| {
            let c = md.centered_bigint(x).to_i128().unwrap_or(i128::MAX / 4);
            dist.support_loss_log2(c)
        })
        .collect();
    log2_sum_exp2(&logs)
}

/// `log₂ Σ 2^{xᵢ}` computed stably.
pub fn log2_sum_exp2(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp2()).sum::<f64>().log2()
}
