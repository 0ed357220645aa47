//! Local coordinates near the periodic orbits T_j, targets and slider shooting.

pub mod frame;
pub mod slider;
pub mod targets;

pub use frame::*;
pub use slider::*;
pub use targets::*;
