//! The toy model: equal amplitudes within each generation.

pub mod flow;
pub mod model;
pub mod orbits;

pub use flow::*;
pub use model::*;
pub use orbits::*;
