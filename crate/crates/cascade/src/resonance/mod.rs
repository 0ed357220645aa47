//! Lattice points, generation sets and exact resonance checks.

pub mod genset;
pub mod lattice;
pub mod nondeg;
pub mod search;
pub mod vector;

pub use genset::*;
pub use lattice::*;
pub use nondeg::*;
pub use search::*;
pub use vector::*;
