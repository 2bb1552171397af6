//! Exact combinatorial invariants of moduli spaces of abelian G-covers of
//! elliptic curves.

pub mod adapted_basis;
pub mod bielliptic;
pub mod classify;
pub mod covers;
pub mod error;
pub mod groups;
pub mod oracle;
pub mod picard;

pub use covers::RamificationData;
pub use error::{Error, Result};
pub use groups::{FinAbGroup, GroupElement, Homomorphism};

/// Crate version, echoed in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
