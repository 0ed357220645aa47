//! Two-mode comparison systems on the slice I1 + I2 = 1: couplings that
//! cannot move the energy all the way from one mode to the other, and the
//! rectangle coupling that can.
//!
//! Every system is integrated in the Cartesian variables z_k = √I_k e^{iθ_k}
//! with ż_k = i∂H/∂z̄_k, which is regular at the poles I_k = 0.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::hamiltonian::{frak_s2_coefficients, frak_s2_reduced, frak_s3_reduced, rat, two_generation_3h, HamiltonianError, Monomial, PolynomialHamiltonian};
use crate::numeric::{ExtrapolationConfig, Extrapolator, Flow, IntegrationError, OdeSystem};
use crate::resonance::LatticePoint;
use crate::toy::heteroclinic_angle;

#[derive(Debug, Error)]
pub enum ReducedError {
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error("the configuration does not reduce to a single cos(3Δθ) coupling")]
    Shape,
    #[error("invalid scan: {0}")]
    Invalid(String),
    #[error(transparent)]
    Integration(#[from] IntegrationError),
}

#[derive(Clone, Debug)]
pub struct ReducedSystem {
    pub name: String,
    /// H(z1, z2), gauge invariant.
    pub hamiltonian: PolynomialHamiltonian,
    /// Angular period of H in Δθ = θ1 − θ2.
    pub period: f64,
    grad: [PolynomialHamiltonian; 2],
}

impl ReducedSystem {
    pub fn new(name: impl Into<String>, hamiltonian: PolynomialHamiltonian, period: f64) -> Self {
        let grad = [hamiltonian.derivative(0, true), hamiltonian.derivative(1, true)];
        ReducedSystem { name: name.into(), hamiltonian, period, grad }
    }

    pub fn energy(&self, z: &[Complex64; 2]) -> f64 {
        self.hamiltonian.eval(z).re
    }

    /// H on the slice J = 1 at (I1, Δθ).
    pub fn energy_polar(&self, i1: f64, dtheta: f64) -> f64 {
        self.energy(&slice_point(i1, dtheta))
    }

    pub fn field(&self, z: &[Complex64; 2]) -> [Complex64; 2] {
        let i = Complex64::new(0.0, 1.0);
        [i * self.grad[0].eval(z), i * self.grad[1].eval(z)]
    }

    /// (İ1, Δθ̇) at (I1, Δθ) on J = 1, for I1 ∈ (0, 1).
    pub fn polar_field(&self, i1: f64, dtheta: f64) -> (f64, f64) {
        let z = slice_point(i1, dtheta);
        let dz = self.field(&z);
        let di1 = 2.0 * (z[0].conj() * dz[0]).re;
        let rate = |k: usize| (dz[k] / z[k]).im;
        (di1, rate(0) - rate(1))
    }
}

/// z1 = √I1 e^{iΔθ}, z2 = √(1 − I1).
pub fn slice_point(i1: f64, dtheta: f64) -> [Complex64; 2] {
    [Complex64::from_polar(i1.max(0.0).sqrt(), dtheta), Complex64::new((1.0 - i1).max(0.0).sqrt(), 0.0)]
}

impl OdeSystem<f64> for ReducedSystem {
    fn dim(&self) -> usize {
        4
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let z = [Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3])];
        let f = self.field(&z);
        dy.copy_from_slice(&[f[0].re, f[0].im, f[1].re, f[1].im]);
    }
}

fn action(v: usize) -> PolynomialHamiltonian {
    PolynomialHamiltonian::monomial(Monomial::action(v, 1), rat(1))
}

/// a J³ + b I1 I2 J + c Re(z1³ z̄2³), i.e. c (I1 I2)^{3/2} cos(3Δθ).
pub fn cubic_coupling(a: &BigRational, b: &BigRational, c: &BigRational) -> PolynomialHamiltonian {
    let j = action(0) + action(1);
    let mut h = (j.clone() * j.clone() * j.clone()).scale(a) + (j * action(0) * action(1)).scale(b);
    let half = c * BigRational::new(1.into(), 2.into());
    h.add_term(Monomial::from_factors([(0, 3, 0), (1, 0, 3)]), half.clone());
    h.add_term(Monomial::from_factors([(0, 0, 3), (1, 3, 0)]), half);
    h
}

/// H = 31 J³ − 66 I1 I2 J + 24 (I1 I2)^{3/2} cos(3Δθ), as displayed.
pub fn frak_s2_system() -> ReducedSystem {
    ReducedSystem::new("s2", cubic_coupling(&rat(31), &rat(-66), &rat(24)), 2.0 * PI / 3.0)
}

/// The 𝔖⁽²⁾ system generated from an explicit six-point configuration.
pub fn frak_s2_from_configuration(k: &[LatticePoint; 6]) -> Result<(ReducedSystem, [BigRational; 3]), ReducedError> {
    let polar = frak_s2_reduced(k)?;
    let (a, b, c) = frak_s2_coefficients(&polar).ok_or(ReducedError::Shape)?;
    Ok((ReducedSystem::new("s2-derived", cubic_coupling(&a, &b, &c), 2.0 * PI / 3.0), [a, b, c]))
}

/// The 𝔖⁽³⁾-type system generated from an explicit quadruple.
pub fn frak_s3_system(k: &[LatticePoint; 4]) -> Result<ReducedSystem, ReducedError> {
    let h = frak_s3_reduced(k)?.ok_or(ReducedError::Shape)?;
    Ok(ReducedSystem::new("s3", h, 2.0 * PI / 3.0))
}

/// The rectangle two-generation toy system, h = (3h)/3, with period π.
pub fn rectangle_system(n: usize) -> ReducedSystem {
    let h = two_generation_3h(n).scale(&BigRational::new(1.into(), 3.into()));
    ReducedSystem::new("s1", h, PI)
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitSummary {
    pub phase: f64,
    pub sup_i1: f64,
    pub mass_drift: f64,
    pub energy_drift: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub system: String,
    pub i1_0: f64,
    pub horizon: f64,
    pub margin: f64,
    pub orbits: Vec<OrbitSummary>,
    pub sup_i1: f64,
    pub passes: bool,
}

/// Integrates from (I1_0, Δθ = phase) on J = 1 and returns the largest I1 seen.
pub fn transfer_orbit(system: &ReducedSystem, i1_0: f64, phase: f64, horizon: f64, tol: f64) -> Result<OrbitSummary, ReducedError> {
    let z0 = slice_point(i1_0, phase);
    let mut y = vec![z0[0].re, z0[0].im, z0[1].re, z0[1].im];
    let h0 = system.energy(&z0);
    let mut cfg = ExtrapolationConfig::new(tol, tol);
    cfg.h_init = 1e-3;
    let mut ig = Extrapolator::new(cfg, 4);
    let mut out = OrbitSummary { phase, sup_i1: i1_0, mass_drift: 0.0, energy_drift: 0.0 };
    ig.integrate(system, 0.0, &mut y, horizon, |_, y| {
        let z = [Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3])];
        out.sup_i1 = out.sup_i1.max(z[0].norm_sqr());
        out.mass_drift = out.mass_drift.max((z[0].norm_sqr() + z[1].norm_sqr() - 1.0).abs());
        out.energy_drift = out.energy_drift.max((system.energy(&z) - h0).abs());
        Flow::Continue
    })?;
    Ok(out)
}

/// sup over time and over `phases` equally spaced initial angles of I1; passes
/// if it stays below 1 − margin.
pub fn no_full_transfer_scan(system: &ReducedSystem, i1_0: f64, phases: usize, horizon: f64, margin: f64) -> Result<ScanReport, ReducedError> {
    if !(0.0..0.5).contains(&i1_0) || phases == 0 || !(horizon > 0.0) {
        return Err(ReducedError::Invalid(format!("need I1_0 ∈ [0, 0.5), phases ≥ 1, T > 0 (got {i1_0}, {phases}, {horizon})")));
    }
    let orbits = (0..phases)
        .into_par_iter()
        .map(|k| transfer_orbit(system, i1_0, system.period * k as f64 / phases as f64, horizon, 1e-12))
        .collect::<Result<Vec<_>, _>>()?;
    let sup_i1 = orbits.iter().map(|o| o.sup_i1).fold(0.0, f64::max);
    Ok(ScanReport { system: system.name.clone(), i1_0, horizon, margin, orbits, sup_i1, passes: sup_i1 <= 1.0 - margin })
}

/// Full transfer along the rectangle heteroclinic: start on Δθ = φ0.
pub fn positive_control(n: usize, i1_0: f64, horizon: f64) -> Result<OrbitSummary, ReducedError> {
    transfer_orbit(&rectangle_system(n), i1_0, heteroclinic_angle(n as f64), horizon, 1e-13)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PortraitPoint {
    pub dtheta: f64,
    pub i1: f64,
    pub h: f64,
}

/// (Δθ, I1, H) on a grid×grid lattice of [−period, period] × [0, 1].
pub fn phase_portrait(system: &ReducedSystem, grid: usize) -> Vec<PortraitPoint> {
    let g = grid.max(2);
    let mut out = Vec::with_capacity(g * g);
    for a in 0..g {
        let dtheta = -system.period + 2.0 * system.period * a as f64 / (g - 1) as f64;
        for b in 0..g {
            let i1 = b as f64 / (g - 1) as f64;
            out.push(PortraitPoint { dtheta, i1, h: system.energy_polar(i1, dtheta) });
        }
    }
    out
}

/// Interior equilibria on the lines sin(mΔθ) = 0 with m = 2π/period, found by
/// bisection of Δθ̇ in I1.
pub fn critical_points(system: &ReducedSystem, resolution: usize) -> Vec<PortraitPoint> {
    let m = (2.0 * PI / system.period).round();
    let mut out = Vec::new();
    for line in 0..2 {
        let dtheta = line as f64 * PI / m;
        let f = |i1: f64| system.polar_field(i1, dtheta).1;
        let xs: Vec<f64> = (1..resolution).map(|k| k as f64 / resolution as f64).collect();
        for w in xs.windows(2) {
            let (mut lo, mut hi) = (w[0], w[1]);
            let (flo, fhi) = (f(lo), f(hi));
            if flo == 0.0 {
                out.push(PortraitPoint { dtheta, i1: lo, h: system.energy_polar(lo, dtheta) });
                continue;
            }
            if flo.signum() == fhi.signum() {
                continue;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid).signum() == flo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let i1 = 0.5 * (lo + hi);
            out.push(PortraitPoint { dtheta, i1, h: system.energy_polar(i1, dtheta) });
        }
    }
    // A root on a grid node is reached from both neighbouring cells.
    out.dedup_by(|a, b| a.dtheta == b.dtheta && (a.i1 - b.i1).abs() < 1e-9);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_values() {
        let s = frak_s2_system();
        assert!((s.energy_polar(0.0, 0.4) - 31.0).abs() < 1e-12);
        assert!((s.energy_polar(1.0, 1.1) - 31.0).abs() < 1e-12);
        let (_, rate) = s.polar_field(1e-12, 0.3);
        assert!((rate + 66.0).abs() < 1e-4);
        let (di1, _) = s.polar_field(0.3, PI / 3.0);
        assert!(di1.abs() < 1e-12);
    }

    #[test]
    fn pole_is_invariant() {
        let o = transfer_orbit(&frak_s2_system(), 0.0, 0.0, 5.0, 1e-12).unwrap();
        assert_eq!(o.sup_i1, 0.0);
    }
}
