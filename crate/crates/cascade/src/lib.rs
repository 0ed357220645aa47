//! Constructing generation sets for the defocusing quintic NLS on T² and
//! simulating the resonant dynamics they support.

pub mod builder;
pub mod hamiltonian;
pub mod local;
pub mod nls;
pub mod reduced;
pub mod numeric;
pub mod resonance;
pub mod toy;
