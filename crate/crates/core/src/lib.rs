//! Irreducibility, reduction and k.p coupling analysis for projective
//! co-representations of finite anti-unitary groups.
pub mod catalog;
pub mod corep;
pub mod error;
pub mod group;
pub mod io;
pub mod kp;
pub mod linalg;
pub mod reduce;
pub use error::{Error, Result};

/// Seed used by every randomized routine when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5EED_2024;
