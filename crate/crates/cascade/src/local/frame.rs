//! Coordinates adapted to the periodic orbit T_j.

use nalgebra::DMatrix;
use num_complex::{Complex, Complex64};
use thiserror::Error;

use crate::numeric::{DoubleDouble, OdeSystem, Real};
use crate::toy::{heteroclinic_angle, ToyModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("mode {0} vanishes: the chart around T_{0} is singular")]
    Singular(usize),
    #[error("mode index {j} outside 1..={n_gen}")]
    Index { j: usize, n_gen: usize },
    #[error("|c|² = {c2} exceeds J = {j}")]
    OutsideChart { c2: f64, j: f64 },
}

/// (J, ϑ, c) with c_k = b_k e^{−iϑ}, ϑ = arg b_j; `c` omits mode j.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalState {
    /// 1-based base orbit index.
    pub j: usize,
    pub mass: f64,
    pub theta: f64,
    pub c: Vec<Complex64>,
}

impl LocalState {
    /// c_k for 1-based mode k ≠ j.
    pub fn mode(&self, k: usize) -> Complex64 {
        assert_ne!(k, self.j);
        self.c[if k < self.j { k - 1 } else { k - 2 }]
    }

    pub fn c2(&self) -> f64 {
        self.c.iter().map(|z| z.norm_sqr()).sum()
    }
}

pub fn to_local(b: &[Complex64], j: usize) -> Result<LocalState, FrameError> {
    if !(1..=b.len()).contains(&j) {
        return Err(FrameError::Index { j, n_gen: b.len() });
    }
    let bj = b[j - 1];
    if bj.norm() == 0.0 {
        return Err(FrameError::Singular(j));
    }
    let theta = bj.arg();
    let rot = Complex64::from_polar(1.0, -theta);
    let c = b.iter().enumerate().filter(|(k, _)| *k != j - 1).map(|(_, z)| z * rot).collect();
    Ok(LocalState { j, mass: b.iter().map(|z| z.norm_sqr()).sum(), theta, c })
}

pub fn from_local(s: &LocalState) -> Result<Vec<Complex64>, FrameError> {
    let c2 = s.c2();
    if c2 > s.mass {
        return Err(FrameError::OutsideChart { c2, j: s.mass });
    }
    let rot = Complex64::from_polar(1.0, s.theta);
    let mut b = Vec::with_capacity(s.c.len() + 1);
    for k in 1..=s.c.len() + 1 {
        if k == s.j {
            b.push(Complex64::from_polar((s.mass - c2).sqrt(), s.theta));
        } else {
            b.push(s.mode(k) * rot);
        }
    }
    Ok(b)
}

/// Real hyperbolic coordinates (c⁺, c⁻) of a mode adjacent to T_j:
/// c = (ω̄c⁻ + ωc⁺)/√(2 Im ω²) with ω = e^{iφ0}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hyperbolic {
    pub plus: f64,
    pub minus: f64,
}

fn omega_scale(n: f64) -> (f64, f64) {
    let phi = heteroclinic_angle(n);
    (phi, (2.0 * (2.0 * phi).sin()).sqrt())
}

pub fn diagonalize_hyperbolic(c: Complex64, n: f64) -> Hyperbolic {
    let (phi, s) = omega_scale(n);
    let sum = s * c.re / phi.cos();
    let diff = s * c.im / phi.sin();
    Hyperbolic { plus: 0.5 * (sum + diff), minus: 0.5 * (sum - diff) }
}

pub fn undiagonalize(h: Hyperbolic, n: f64) -> Complex64 {
    let (phi, s) = omega_scale(n);
    let w = Complex64::from_polar(1.0, phi);
    (w.conj() * h.minus + w * h.plus) / s
}

/// √3(3n−2)/√((9n−8)(3n−4)).
pub fn kappa(n: f64) -> f64 {
    3f64.sqrt() * (3.0 * n - 2.0) / ((9.0 * n - 8.0) * (3.0 * n - 4.0)).sqrt()
}

/// ċ for the reduced system around T_j at fixed J, in scalar type T.
///
/// With ϑ = 0 the full state is b_j = √(J − |c|²), b_k = c_k, and
/// ċ_k = ḃ_k − i ϑ̇ c_k with ϑ̇ = Im(ḃ_j / b_j).
#[derive(Clone, Copy, Debug)]
pub struct ReducedSystem {
    pub model: ToyModel,
    pub j: usize,
    pub mass: f64,
}

impl ReducedSystem {
    pub fn field<T: Real>(&self, c: &[Complex<T>], out: &mut [Complex<T>]) {
        let m = self.model.n_gen;
        let c2 = c.iter().fold(T::zero(), |s, z| s + z.norm_sqr());
        let bj = (T::from_f64(self.mass) - c2).sqrt();
        let mut b = Vec::with_capacity(m);
        let mut it = c.iter();
        for k in 1..=m {
            b.push(if k == self.j { Complex::new(bj, T::zero()) } else { *it.next().expect("N−1 local modes") });
        }
        let mut db = vec![Complex::new(T::zero(), T::zero()); m];
        self.model.field(&b, &mut db);
        let rate = db[self.j - 1].im / bj;
        let mut o = 0;
        for k in 1..=m {
            if k == self.j {
                continue;
            }
            let z = b[k - 1];
            out[o] = db[k - 1] - Complex::new(-rate * z.im, rate * z.re);
            o += 1;
        }
    }
}

impl<T: Real> OdeSystem<T> for ReducedSystem {
    fn dim(&self) -> usize {
        2 * (self.model.n_gen - 1)
    }

    fn rhs(&self, _t: T, y: &[T], dy: &mut [T]) {
        let c: Vec<Complex<T>> = y.chunks_exact(2).map(|p| Complex::new(p[0], p[1])).collect();
        let mut out = vec![Complex::new(T::zero(), T::zero()); c.len()];
        self.field(&c, &mut out);
        for (k, z) in out.iter().enumerate() {
            dy[2 * k] = z.re;
            dy[2 * k + 1] = z.im;
        }
    }
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    /// Positive real parts, largest first.
    pub hyperbolic: Vec<f64>,
    /// Positive frequencies of purely imaginary pairs.
    pub elliptic: Vec<f64>,
}

/// Spectrum of the linearized reduced flow at T_j (central differences in double-double).
pub fn linearization_spectrum(model: &ToyModel, j: usize, mass: f64) -> Spectrum {
    let sys = ReducedSystem { model: *model, j, mass };
    let dim = 2 * (model.n_gen - 1);
    let h = DoubleDouble::from_f64(1e-12);
    let mut jac = DMatrix::<f64>::zeros(dim, dim);
    let zero = vec![DoubleDouble::from_f64(0.0); dim];
    let mut fp = vec![DoubleDouble::from_f64(0.0); dim];
    let mut fm = fp.clone();
    for col in 0..dim {
        let mut y = zero.clone();
        y[col] = h;
        OdeSystem::<DoubleDouble>::rhs(&sys, DoubleDouble::from_f64(0.0), &y, &mut fp);
        y[col] = -h;
        OdeSystem::<DoubleDouble>::rhs(&sys, DoubleDouble::from_f64(0.0), &y, &mut fm);
        for row in 0..dim {
            jac[(row, col)] = ((fp[row] - fm[row]) / (h + h)).to_f64();
        }
    }
    let eig: Vec<Complex64> = jac.complex_eigenvalues().iter().map(|z| Complex64::new(z.re, z.im)).collect();
    let scale = eig.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let mut hyperbolic: Vec<f64> = eig.iter().filter(|z| z.re > 1e-9 * scale).map(|z| z.re).collect();
    hyperbolic.sort_by(|a, b| b.total_cmp(a));
    let mut elliptic: Vec<f64> = eig.iter().filter(|z| z.re.abs() <= 1e-9 * scale && z.im > 0.0).map(|z| z.im).collect();
    elliptic.sort_by(|a, b| b.total_cmp(a));
    Spectrum { eigenvalues: eig, hyperbolic, elliptic }
}
