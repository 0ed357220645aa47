//! Invariant-monitored integration of the toy model.

use num_complex::{Complex, Complex64};
use thiserror::Error;

use super::model::{mass, pack, to_c64, unpack, from_c64, ToyModel};
use crate::numeric::{DoubleDouble, ExtrapolationConfig, Extrapolator, Flow, IntegrationError, OdeSystem, Precision, Real, StepStats};

impl<T: Real> OdeSystem<T> for ToyModel {
    fn dim(&self) -> usize {
        2 * self.n_gen
    }

    fn rhs(&self, _t: T, y: &[T], dy: &mut [T]) {
        let b = unpack(y);
        let mut f = vec![Complex::new(T::zero(), T::zero()); b.len()];
        self.field(&b, &mut f);
        for (k, z) in f.iter().enumerate() {
            dy[2 * k] = z.re;
            dy[2 * k + 1] = z.im;
        }
    }
}

#[derive(Clone, Debug)]
pub struct IntegrateOptions {
    pub tol: f64,
    pub precision: Precision,
    /// Reject any step that moves J by more than this (relative).
    pub drift_guard: f64,
    /// Sample spacing; `None` records every accepted step.
    pub sample_dt: Option<f64>,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions { tol: 1e-13, precision: Precision::Double, drift_guard: 1e-10, sample_dt: None }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    /// J and h at each stored state.
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    pub stats: StepStats,
    pub precision: Precision,
}

impl Trajectory {
    /// max |J(t) − J(0)| over the stored states.
    pub fn mass_drift(&self) -> f64 {
        self.mass.iter().map(|j| (j - self.mass[0]).abs()).fold(0.0, f64::max)
    }

    pub fn energy_drift(&self) -> f64 {
        self.energy.iter().map(|h| (h - self.energy[0]).abs()).fold(0.0, f64::max)
    }

    pub fn last(&self) -> &[Complex64] {
        self.states.last().expect("trajectory has at least the initial state")
    }

    /// max_t |b_k(t)| for every k.
    pub fn peaks(&self) -> Vec<f64> {
        let m = self.states[0].len();
        (0..m).map(|k| self.states.iter().map(|s| s[k].norm()).fold(0.0, f64::max)).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToyError {
    #[error("invalid options: {0}")]
    Invalid(String),
    #[error(transparent)]
    Integration(#[from] IntegrationError),
}

fn record<T: Real>(model: &ToyModel, y: &[T], t: T, tr: &mut Trajectory) {
    let b: Vec<Complex<T>> = unpack(y);
    tr.times.push(t.to_f64());
    tr.mass.push(mass(&b).to_f64());
    tr.energy.push(model.hamiltonian(&b).to_f64());
    tr.states.push(to_c64(&b));
}

/// Integrates in scalar type T from `b0` over [0, t_end] (t_end may be negative).
pub fn integrate_in<T: Real>(model: &ToyModel, b0: &[Complex<T>], t_end: f64, opts: &IntegrateOptions) -> Result<(Trajectory, Vec<Complex<T>>), ToyError> {
    if !(opts.tol > 0.0) {
        return Err(ToyError::Invalid(format!("tol must be positive (got {})", opts.tol)));
    }
    if b0.len() != model.n_gen {
        return Err(ToyError::Invalid(format!("state has {} modes, model has {}", b0.len(), model.n_gen)));
    }
    let mut y = pack(b0);
    let j0 = mass(b0).to_f64().max(f64::MIN_POSITIVE);
    let monitor = move |y: &[T]| (mass(&unpack(y)).to_f64() - j0).abs() / j0;
    let mut cfg = ExtrapolationConfig::for_precision::<T>(opts.tol);
    cfg.atol = opts.tol * 1e-3 * j0.sqrt();
    let mut ex = Extrapolator::new(cfg, y.len()).with_drift_guard(&monitor, opts.drift_guard.max(opts.tol));
    let mut tr = Trajectory { times: vec![], states: vec![], mass: vec![], energy: vec![], stats: StepStats::default(), precision: precision_of::<T>() };
    let t0 = T::zero();
    record(model, &y, t0, &mut tr);
    match opts.sample_dt {
        None => {
            ex.integrate(model, t0, &mut y, T::from_f64(t_end), |t, y| {
                record(model, y, t, &mut tr);
                Flow::Continue
            })?;
        }
        Some(dt) => {
            let steps = (t_end.abs() / dt).ceil().max(1.0) as usize;
            let mut t = t0;
            for i in 1..=steps {
                let target = if i == steps { t_end } else { t_end.signum() * dt * i as f64 };
                t = ex.integrate(model, t, &mut y, T::from_f64(target), |_, _| Flow::Continue)?;
                record(model, &y, t, &mut tr);
            }
        }
    }
    tr.stats = ex.stats;
    Ok((tr, unpack(&y)))
}

fn precision_of<T: Real>() -> Precision {
    if T::EPS < 1e-20 {
        Precision::DoubleDouble
    } else {
        Precision::Double
    }
}

/// Integration at the precision requested in `opts`.
pub fn integrate(model: &ToyModel, b0: &[Complex64], t_end: f64, opts: &IntegrateOptions) -> Result<Trajectory, ToyError> {
    match opts.precision {
        Precision::Double => integrate_in::<f64>(model, b0, t_end, opts).map(|r| r.0),
        Precision::DoubleDouble => integrate_in::<DoubleDouble>(model, &from_c64(b0), t_end, opts).map(|r| r.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_is_invariant() {
        let m = ToyModel::new(6, 4.0);
        let mut b = vec![Complex64::new(0.0, 0.0); 6];
        b[2] = Complex64::new(0.8, 0.1);
        b[3] = Complex64::new(0.3, -0.5);
        let tr = integrate(&m, &b, 0.5, &IntegrateOptions::default()).unwrap();
        for s in &tr.states {
            for k in [0, 1, 4, 5] {
                assert_eq!(s[k], Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn time_reversal() {
        let m = ToyModel::new(4, 2.0);
        let b: Vec<Complex64> = (0..4).map(|k| Complex64::from_polar(0.5, 1.3 * k as f64)).collect();
        let opts = IntegrateOptions::default();
        let fwd = integrate(&m, &b, 0.7, &opts).unwrap();
        let back = integrate(&m, fwd.last(), -0.7, &opts).unwrap();
        let err = back.last().iter().zip(&b).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }
}
