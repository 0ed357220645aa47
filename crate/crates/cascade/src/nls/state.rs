//! Finitely supported Fourier sequences on Z² and their norms.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use crate::resonance::LatticePoint;

/// A finitely supported sequence (a_j)_{j ∈ Z²}; the support is tracked explicitly.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FourierState {
    pub support: Vec<LatticePoint>,
    pub amps: Vec<Complex64>,
}

impl FourierState {
    pub fn new(support: Vec<LatticePoint>, amps: Vec<Complex64>) -> Self {
        assert_eq!(support.len(), amps.len(), "one amplitude per support point");
        FourierState { support, amps }
    }

    pub fn zeros(support: Vec<LatticePoint>) -> Self {
        let amps = vec![Complex64::new(0.0, 0.0); support.len()];
        FourierState { support, amps }
    }

    pub fn delta(k: LatticePoint, amp: Complex64) -> Self {
        FourierState { support: vec![k], amps: vec![amp] }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn get(&self, k: &LatticePoint) -> Complex64 {
        self.support.iter().position(|p| p == k).map_or(Complex64::new(0.0, 0.0), |i| self.amps[i])
    }

    pub fn l1(&self) -> f64 {
        self.amps.iter().map(|z| z.norm()).sum()
    }

    /// L = Σ|a_j|².
    pub fn mass(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// M = Σ j|a_j|².
    pub fn momentum(&self) -> (f64, f64) {
        self.support.iter().zip(&self.amps).fold((0.0, 0.0), |(mx, my), (k, z)| (mx + k.x as f64 * z.norm_sqr(), my + k.y as f64 * z.norm_sqr()))
    }

    /// (Σ|a_j|²|j|^{2s})^{1/2}; the zero mode carries weight 0.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.support.iter().zip(&self.amps).map(|(k, z)| z.norm_sqr() * sobolev_weight(k, s)).sum::<f64>().sqrt()
    }

    /// ℓ¹ distance, treating missing points as zeros.
    pub fn l1_distance(&self, other: &FourierState) -> f64 {
        let mut map: BTreeMap<(i64, i64), Complex64> = self.support.iter().map(|k| (k.x, k.y)).zip(self.amps.iter().copied()).collect();
        for (k, z) in other.support.iter().zip(&other.amps) {
            *map.entry((k.x, k.y)).or_insert(Complex64::new(0.0, 0.0)) -= z;
        }
        map.values().map(|z| z.norm()).sum()
    }
}

/// |j|^{2s}, with 0 at j = 0.
pub fn sobolev_weight(k: &LatticePoint, s: f64) -> f64 {
    if k.norm2 == 0 {
        0.0
    } else {
        (k.norm2 as f64).powf(s)
    }
}

pub fn sobolev_norm(a: &FourierState, s: f64) -> f64 {
    a.sobolev_norm(s)
}

/// Index of every support point.
pub fn index_of(support: &[LatticePoint]) -> HashMap<(i64, i64), usize> {
    support.iter().enumerate().map(|(i, k)| ((k.x, k.y), i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_of_a_single_mode() {
        let a = FourierState::delta(LatticePoint::of(3, 4), Complex64::new(0.0, 2.0));
        assert_eq!(a.l1(), 2.0);
        assert_eq!(a.mass(), 4.0);
        assert_eq!(a.momentum(), (12.0, 16.0));
        assert!((a.sobolev_norm(1.5) - 2.0 * 5f64.powf(1.5)).abs() < 1e-12);
        assert_eq!(FourierState::delta(LatticePoint::of(0, 0), Complex64::new(1.0, 0.0)).sobolev_norm(1.0), 0.0);
    }

    #[test]
    fn distance_over_different_supports() {
        let a = FourierState::new(vec![LatticePoint::of(1, 0), LatticePoint::of(0, 1)], vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)]);
        let b = FourierState::new(vec![LatticePoint::of(0, 1), LatticePoint::of(2, 2)], vec![Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.25)]);
        assert!((a.l1_distance(&b) - 1.25).abs() < 1e-15);
    }
}
