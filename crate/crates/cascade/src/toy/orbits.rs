//! Closed-form orbits, the two-generation portrait and the scaling symmetry.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::flow::Trajectory;
use super::model::{heteroclinic_angle, lyapunov_rate, ToyModel};

/// The single-mode orbit T_j as printed: b_j(t) = √J exp(−i(3n − 4/3)J² t).
pub fn periodic_orbit(n_gen: usize, j: usize, big_j: f64, n: f64, t: f64) -> Vec<Complex64> {
    single_mode(n_gen, j, big_j, -(3.0 * n - 4.0 / 3.0) * big_j * big_j * t)
}

/// The phase rate of T_j generated by the toy vector field: (4 − 9n)J² · scale.
pub fn periodic_rate(model: &ToyModel, big_j: f64) -> f64 {
    (4.0 - 9.0 * model.n) * big_j * big_j * model.scale
}

/// T_j as generated by the vector field of `model`.
pub fn periodic_orbit_field(model: &ToyModel, j: usize, big_j: f64, t: f64) -> Vec<Complex64> {
    single_mode(model.n_gen, j, big_j, periodic_rate(model, big_j) * t)
}

/// 1-based `j`.
fn single_mode(n_gen: usize, j: usize, big_j: f64, phase: f64) -> Vec<Complex64> {
    assert!((1..=n_gen).contains(&j), "mode index {j} outside 1..={n_gen}");
    let mut b = vec![Complex64::new(0.0, 0.0); n_gen];
    b[j - 1] = Complex64::from_polar(big_j.sqrt(), phase);
    b
}

/// (I1(t), φ0) on the heteroclinic from b_2 (t → −∞) to b_1 (t → +∞) at J = 1.
pub fn heteroclinic_2g(n: f64, t: f64) -> (f64, f64) {
    let e = (2.0 * lyapunov_rate(n) * t).exp();
    let i1 = if e.is_infinite() { 1.0 } else { e / (1.0 + e) };
    (i1, heteroclinic_angle(n))
}

/// Two-generation state with |b1|² = I1, |b2|² = J − I1 and arg b1 − arg b2 = φ.
pub fn two_generation_state(i1: f64, big_j: f64, phi: f64) -> [Complex64; 2] {
    [Complex64::from_polar(i1.sqrt(), phi), Complex64::new((big_j - i1).max(0.0).sqrt(), 0.0)]
}

/// h of the two-generation system on J = 1 in polar coordinates, φ = θ1 − θ2.
pub fn h_2g(n: f64, i1: f64, phi: f64) -> f64 {
    let i2 = 1.0 - i1;
    ((4.0 - 9.0 * n) + 6.0 * i1 * i2 * (3.0 * n - 2.0 + 6.0 * (n - 1.0) * (2.0 * phi).cos())) / 3.0
}

#[derive(Clone, Debug)]
pub struct PortraitSample {
    pub angle: f64,
    pub i1: f64,
    pub h: f64,
}

#[derive(Clone, Debug)]
pub struct Portrait {
    pub samples: Vec<PortraitSample>,
    /// Level of the separatrix through the periodic orbits.
    pub separatrix: f64,
    pub grid: usize,
}

/// (φ, I1, h_2g) on a `grid`×`grid` lattice of [−π, π] × [0, 1].
pub fn phase_portrait_2g(n: f64, grid: usize) -> Portrait {
    let g = grid.max(2);
    let mut samples = Vec::with_capacity(g * g);
    for a in 0..g {
        let phi = -PI + 2.0 * PI * a as f64 / (g - 1) as f64;
        for b in 0..g {
            let i1 = b as f64 / (g - 1) as f64;
            samples.push(PortraitSample { angle: phi, i1, h: h_2g(n, i1, phi) });
        }
    }
    Portrait { samples, separatrix: (4.0 - 9.0 * n) / 3.0, grid: g }
}

/// b(t) ↦ μ⁻¹ b(t/μ⁴): maps toy-model solutions to toy-model solutions.
pub fn scaling_map(tr: &Trajectory, mu: f64) -> Trajectory {
    let m4 = mu.powi(4);
    let s = 1.0 / mu;
    Trajectory {
        times: tr.times.iter().map(|t| t * m4).collect(),
        states: tr.states.iter().map(|b| b.iter().map(|z| z * s).collect()).collect(),
        mass: tr.mass.iter().map(|j| j * s * s).collect(),
        energy: tr.energy.iter().map(|h| h * s.powi(6)).collect(),
        stats: tr.stats,
        precision: tr.precision,
    }
}

/// Unwrapped phase of mode `k` along the trajectory, fitted linearly against time.
pub fn measured_phase_rate(tr: &Trajectory, k: usize) -> f64 {
    let mut phase = Vec::with_capacity(tr.states.len());
    let mut prev = tr.states[0][k].arg();
    let mut acc = prev;
    for s in &tr.states {
        let a = s[k].arg();
        let mut d = a - prev;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
        }
        acc += d;
        prev = a;
        phase.push(acc);
    }
    crate::numeric::fit_slope(&tr.times, &phase)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heteroclinic_midpoint() {
        assert_eq!(heteroclinic_2g(2.0, 0.0).0, 0.5);
        assert_eq!(heteroclinic_2g(16.0, 10.0).0, 1.0);
    }

    #[test]
    fn paper_periodic_rate() {
        let b = periodic_orbit(3, 2, 1.0, 16.0, 1.0);
        assert!((b[1].arg() + 2.6843695164095613).abs() < 1e-12);
        assert!((b[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn portrait_symmetries() {
        let n = 4.0;
        for &i in &[0.1, 0.5, 0.8] {
            for &p in &[0.2, 1.0, 2.5] {
                let h = h_2g(n, i, p);
                assert!((h - h_2g(n, i, -p)).abs() < 1e-12);
                assert!((h - h_2g(n, i, p + PI)).abs() < 1e-12);
            }
        }
        assert_eq!(h_2g(n, 0.0, 0.3), h_2g(n, 0.0, 2.0));
        // The heteroclinic line lies on the separatrix level.
        let p = phase_portrait_2g(n, 5);
        assert!((h_2g(n, 0.37, heteroclinic_angle(n)) - p.separatrix).abs() < 1e-12);
    }
}
