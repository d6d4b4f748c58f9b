//! Lattice toolbox: residues, vectors, Gaussians, parameters and trapdoors.

pub mod gauss;
pub mod params;
pub mod scalar;
pub mod trapdoor;
pub mod vector;

pub use gauss::{
    log2_sum_exp2, rho, sample_gauss, smudging_lemma_bound, smudging_tv, support_loss_log2,
    truncation_bound, GaussSampler, TruncatedGaussian,
};
pub use params::{demo, full, LatticeParams};
pub use scalar::{is_probable_prime, Modulus, Scalar};
pub use trapdoor::{invert_lwe, is_messy, trap_gen, GadgetTrapdoor};
pub use vector::{ModQMatrix, ModQVector};
