use num_complex::{Complex, Complex64};

use crate::numeric::Real;

/// The toy model on N modes b_1..b_N (stored 0-based) with n elements per generation.
///
/// ḃ = i ∂h/∂b̄, i.e. the flow of h for the symplectic form i db∧db̄ with the sign
/// that makes single-mode orbits rotate clockwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToyModel {
    pub n_gen: usize,
    pub n: f64,
    /// Multiplier on h; 1 except in rescaled-time mode.
    pub scale: f64,
}

/// λ = 2√((9n−8)(3n−4)), the hyperbolic rate of the periodic orbits at J = 1.
pub fn lyapunov_rate(n: f64) -> f64 {
    2.0 * ((9.0 * n - 8.0) * (3.0 * n - 4.0)).sqrt()
}

/// φ0 = ½ arccos(−(3n−2)/(6(n−1))).
pub fn heteroclinic_angle(n: f64) -> f64 {
    0.5 * (-(3.0 * n - 2.0) / (6.0 * (n - 1.0))).acos()
}

fn c<T: Real>(x: f64) -> T {
    T::from_f64(x)
}

impl ToyModel {
    pub fn new(n_gen: usize, n: f64) -> Self {
        ToyModel { n_gen, n, scale: 1.0 }
    }

    /// h multiplied by √3/λ so that the hyperbolic exponents become ±√3.
    pub fn rescaled(self) -> Self {
        ToyModel { scale: 3f64.sqrt() / lyapunov_rate(self.n), ..self }
    }

    pub fn is_rescaled(&self) -> bool {
        self.scale != 1.0
    }

    /// b_k² b̄_l² + c.c.
    fn exchange<T: Real>(a: Complex<T>, b: Complex<T>) -> T {
        let z = a * a * (b * b).conj();
        z.re + z.re
    }

    /// 3h without the scale factor.
    fn h3<T: Real>(&self, b: &[Complex<T>]) -> T {
        let m = b.len();
        let a: Vec<T> = b.iter().map(|z| z.norm_sqr()).collect();
        let j = a.iter().fold(T::zero(), |s, &x| s + x);
        let mut s2 = T::zero();
        let mut s3 = T::zero();
        for &x in &a {
            s2 += x * x;
            s3 += x * x * x;
        }
        let mut sp = T::zero();
        let mut weighted_p = T::zero();
        for k in 0..m.saturating_sub(1) {
            let p = Self::exchange(b[k], b[k + 1]);
            sp += p;
            weighted_p += (a[k] + a[k + 1]) * p;
        }
        let mut weighted_q = T::zero();
        for k in 1..m.saturating_sub(1) {
            weighted_q += a[k] * Self::exchange(b[k - 1], b[k + 1]);
        }
        let n: T = c(self.n);
        c::<T>(4.0) * s3 - c::<T>(9.0) * n * j * (s2 - c::<T>(2.0) * sp) - c::<T>(18.0) * weighted_p + c::<T>(36.0) * weighted_q
    }

    pub fn hamiltonian<T: Real>(&self, b: &[Complex<T>]) -> T {
        self.h3(b) * c::<T>(self.scale) / c::<T>(3.0)
    }

    /// ∂h/∂b̄_j for every j.
    pub fn gradient_conj<T: Real>(&self, b: &[Complex<T>], out: &mut [Complex<T>]) {
        let m = b.len();
        let two: T = c(2.0);
        let a: Vec<T> = b.iter().map(|z| z.norm_sqr()).collect();
        let j = a.iter().fold(T::zero(), |s, &x| s + x);
        let s2 = a.iter().fold(T::zero(), |s, &x| s + x * x);
        let p: Vec<T> = (0..m.saturating_sub(1)).map(|k| Self::exchange(b[k], b[k + 1])).collect();
        let q: Vec<T> = (0..m).map(|k| if k >= 1 && k + 1 < m { Self::exchange(b[k - 1], b[k + 1]) } else { T::zero() }).collect();
        let sp = p.iter().fold(T::zero(), |s, &x| s + x);
        let n: T = c(self.n);
        let nine_n = c::<T>(9.0) * n;
        let scale = c::<T>(self.scale) / c::<T>(3.0);
        for jj in 0..m {
            let bj = b[jj];
            // ∂P_k/∂b̄_j for k = j (mode j is the left end) and k = j−1 (right end).
            let dp_right = if jj + 1 < m { bj.conj() * b[jj + 1] * b[jj + 1] * two } else { Complex::new(T::zero(), T::zero()) };
            let dp_left = if jj >= 1 { b[jj - 1] * b[jj - 1] * bj.conj() * two } else { Complex::new(T::zero(), T::zero()) };
            let dsp = dp_right + dp_left;
            // ∂Q_k/∂b̄_j for k = j+1 (j is the left end) and k = j−1 (right end).
            let dq_right = if jj + 2 < m { bj.conj() * b[jj + 2] * b[jj + 2] * two } else { Complex::new(T::zero(), T::zero()) };
            let dq_left = if jj >= 2 { b[jj - 2] * b[jj - 2] * bj.conj() * two } else { Complex::new(T::zero(), T::zero()) };

            let mut g = bj * (c::<T>(12.0) * a[jj] * a[jj]);
            g = g - bj * (nine_n * (s2 - two * sp)) - (bj * (two * a[jj]) - dsp * two) * (nine_n * j);
            let p_adj = if jj >= 1 { p[jj - 1] } else { T::zero() } + if jj + 1 < m { p[jj] } else { T::zero() };
            let mut w = bj * p_adj;
            if jj + 1 < m {
                w = w + dp_right * (a[jj] + a[jj + 1]);
            }
            if jj >= 1 {
                w = w + dp_left * (a[jj - 1] + a[jj]);
            }
            g = g - w * c::<T>(18.0);
            let mut v = bj * q[jj];
            if jj + 2 < m {
                v = v + dq_right * a[jj + 1];
            }
            if jj >= 2 {
                v = v + dq_left * a[jj - 1];
            }
            g = g + v * c::<T>(36.0);
            out[jj] = g * scale;
        }
    }

    /// ḃ = i ∂h/∂b̄.
    pub fn field<T: Real>(&self, b: &[Complex<T>], out: &mut [Complex<T>]) {
        self.gradient_conj(b, out);
        for z in out.iter_mut() {
            *z = Complex::new(-z.im, z.re);
        }
    }

    pub fn field_f64(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); b.len()];
        self.field(b, &mut out);
        out
    }
}

/// Σ|b_k|².
pub fn mass<T: Real>(b: &[Complex<T>]) -> T {
    b.iter().fold(T::zero(), |s, z| s + z.norm_sqr())
}

/// Packs complex amplitudes as interleaved (re, im) pairs.
pub fn pack<T: Real>(b: &[Complex<T>]) -> Vec<T> {
    b.iter().flat_map(|z| [z.re, z.im]).collect()
}

pub fn unpack<T: Real>(y: &[T]) -> Vec<Complex<T>> {
    y.chunks_exact(2).map(|p| Complex::new(p[0], p[1])).collect()
}

pub fn to_c64<T: Real>(b: &[Complex<T>]) -> Vec<Complex64> {
    b.iter().map(|z| Complex64::new(z.re.to_f64(), z.im.to_f64())).collect()
}

pub fn from_c64<T: Real>(b: &[Complex64]) -> Vec<Complex<T>> {
    b.iter().map(|z| Complex::new(T::from_f64(z.re), T::from_f64(z.im))).collect()
}

/// Central finite-difference estimate of ∂h/∂b̄ = ½(∂_x + i ∂_y) h.
pub fn gradient_fd(model: &ToyModel, b: &[Complex64], step: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(b.len());
    let mut w = b.to_vec();
    for k in 0..b.len() {
        let mut d = [0.0; 2];
        for (i, dir) in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)].into_iter().enumerate() {
            w[k] = b[k] + dir * step;
            let hp = model.hamiltonian(&w);
            w[k] = b[k] - dir * step;
            let hm = model.hamiltonian(&w);
            w[k] = b[k];
            d[i] = (hp - hm) / (2.0 * step);
        }
        out.push(Complex64::new(d[0], d[1]) * 0.5);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::DoubleDouble;

    #[test]
    fn single_mode_value() {
        let m = ToyModel::new(4, 16.0);
        let mut b = vec![Complex64::new(0.0, 0.0); 4];
        b[0] = Complex64::new(1.0, 0.0);
        assert!((m.hamiltonian(&b) + 140.0 / 3.0).abs() < 1e-12);
        assert_eq!(m.hamiltonian(&[Complex64::new(0.0, 0.0); 4]), 0.0);
    }

    #[test]
    fn rates_and_angles() {
        assert!((lyapunov_rate(2.0) - 8.94427190999916).abs() < 1e-12);
        assert!((lyapunov_rate(16.0) - 154.71263684650940).abs() < 1e-9);
        assert!((heteroclinic_angle(2.0) - 1.1502619915109316).abs() < 1e-12);
        // ½ arccos(−46/90) = 1.0536366700845728…
        assert!((heteroclinic_angle(16.0) - 1.0536366700845728).abs() < 1e-14);
    }

    #[test]
    fn gradient_matches_differences() {
        let m = ToyModel::new(6, 8.0);
        let b: Vec<Complex64> = (0..6).map(|k| Complex64::from_polar(0.2 + 0.1 * k as f64, 0.7 * k as f64 - 1.0)).collect();
        let mut g = vec![Complex64::new(0.0, 0.0); 6];
        m.gradient_conj(&b, &mut g);
        let fd = gradient_fd(&m, &b, 1e-5);
        for k in 0..6 {
            assert!((g[k] - fd[k]).norm() <= 1e-7 * g[k].norm().max(1.0), "{k}: {} vs {}", g[k], fd[k]);
        }
    }

    #[test]
    fn generic_precision_agrees() {
        let m = ToyModel::new(5, 16.0);
        let b: Vec<Complex64> = (0..5).map(|k| Complex64::from_polar(0.3, 0.4 * k as f64)).collect();
        let bd: Vec<Complex<DoubleDouble>> = from_c64(&b);
        let h = m.hamiltonian(&b);
        let hd = m.hamiltonian(&bd).to_f64();
        assert!((h - hd).abs() < 1e-13 * h.abs());
    }
}
