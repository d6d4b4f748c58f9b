//! Leasing protocols: the shared core, PKE leasing (interactive and
//! non-interactive) and PRF leasing.

pub mod core;
pub mod ni;
pub mod pke;
pub mod prf;

pub use self::core::*;
pub use self::ni::*;
pub use self::pke::*;
pub use self::prf::*;
