//! Constructive pipeline: combinatorial model → prototype → rational perturbation → integer set.

pub mod model;
pub mod placement;
pub mod weights;

pub use model::*;
pub use placement::*;
pub use weights::*;
