//! Protocol runner: wire format, transports, end-to-end sessions, security
//! experiments and Monte-Carlo statistics.

pub mod frames;
pub mod games;
pub mod session;
pub mod stats;
pub mod transport;
pub mod wire;

pub use games::*;
pub use session::*;
pub use stats::*;
pub use transport::*;
pub use wire::*;
