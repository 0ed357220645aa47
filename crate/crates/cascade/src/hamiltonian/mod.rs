//! Exact resonant Hamiltonians restricted to finite frequency sets.

pub mod appendix;
pub mod polar;
pub mod poly;
pub mod restricted;

pub use appendix::*;
pub use polar::*;
pub use poly::*;
pub use restricted::*;
