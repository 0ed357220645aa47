//! Scalar types and the extrapolation integrator.

pub mod dd;
pub mod ode;
pub mod real;

pub use dd::DoubleDouble;
pub use ode::{ExtrapolationConfig, Extrapolator, Flow, IntegrationError, OdeSystem, StepStats};
pub use real::{Precision, Real};

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
