//! Classical-lessor secure key leasing.
//!
//! The crate is layered bottom-up:
//!
//! * [`bits`]: GF(2) vectors, block tables and coset sampling.
//! * [`modq`]: Z_q arithmetic generic over the residue type, truncated
//!   Gaussians, gadget trapdoors.
//! * [`branch`]: exact simulation of lessee states with at most two branches.
//! * [`ot`], [`garble`], [`sfe`]: the lattice dual-mode OT, Yao garbling and
//!   the two-message SFE built from them.
//! * [`ntcf`]: the claw-free function interface with a toy instantiation.
//! * [`pke`], [`wpke`], [`wupf`]: base encryption and the watermarkable
//!   primitives with their extractors.
//! * [`lease`]: the leasing protocols (shared core, PKE, PRF, non-interactive).
//! * [`harness`]: wire format, sessions and experiment games.
//!
//! Lattice code is generic over [`modq::Scalar`]; the aliases below fix the
//! two residue types used by the presets.

pub mod bits;
pub mod branch;
pub mod codec;
pub mod error;
pub mod garble;
pub mod harness;
pub mod lease;
pub mod modq;
pub mod ntcf;
pub mod ot;
pub mod pke;
pub mod rng;
pub mod sfe;
pub mod wpke;
pub mod wupf;

pub use bits::{block_recompose, coset_sample, gf2_inner, BitVec, BlockTable};
pub use error::{Error, Result};
pub use rng::{rng_from_seed, SklRng};

/// Residue type of the `demo` preset.
pub type DemoScalar = u64;
/// Residue type of the `full` preset.
pub type FullScalar = num_bigint::BigUint;
/// Parameters at the `demo` preset.
pub type DemoParams = modq::LatticeParams<DemoScalar>;
/// Parameters at the `full` preset.
pub type FullParams = modq::LatticeParams<FullScalar>;
/// Vectors at the `demo` preset.
pub type DemoVector = modq::ModQVector<DemoScalar>;
/// Vectors at the `full` preset.
pub type FullVector = modq::ModQVector<FullScalar>;
