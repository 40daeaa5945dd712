//! Exact arithmetic and geometry for beta-expansions in algebraic bases.
//!
//! The crate works with number fields Q(beta) where beta is the dominant real
//! root of a monic integer polynomial of degree 2 or 3. On top of exact field
//! arithmetic it provides:
//!
//! * greedy beta-expansions of field elements with certified digits,
//! * the expansion of 1, its quasi-greedy form and Parry admissibility,
//! * pure-periodicity tests and the classification of bases (Pisot, unit,
//!   finiteness property, gamma threshold theorems),
//! * Galois embeddings into the conjugate space, beta-integer point clouds,
//!   central/sub/translated tiles, rasterization and covering audits,
//! * the geometric pure-periodicity membership test, representations of
//!   conjugate points by two-sided admissible digit strings, spiral ray
//!   probes,
//! * ascending Farey scans estimating the pure-periodicity threshold.
//!
//! Everything user-visible is exact or carries certified error bounds;
//! floating point only ever appears as outward-rounded interval arithmetic.

pub mod classify;
pub mod exec;
pub mod expansion;
pub mod field;
pub mod gamma;
pub mod tiling;
pub mod words;

mod error;

pub use error::Error;

/// Convenient alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
