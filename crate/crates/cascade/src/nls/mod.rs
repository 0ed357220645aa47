//! Quintic NLS on T² in Fourier variables: finite supports, Galerkin and
//! resonant truncations, and the comparison with the resonant dynamics.

pub mod experiment;
pub mod galerkin;
pub mod multilinear;
pub mod state;

pub use experiment::*;
pub use galerkin::*;
pub use multilinear::*;
pub use state::*;
