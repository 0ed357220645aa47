//! Gragg–Bulirsch–Stoer extrapolation integrator, generic over the scalar type.
//!
//! Each step runs the modified midpoint rule with the step-number sequence
//! 2, 4, 6, … and extrapolates to zero stepsize with the Aitken–Neville scheme
//! in h². Order and step size are adapted by the work-per-unit-step heuristic of
//! Deuflhard. An optional drift guard rejects steps whose result moves a
//! monitored invariant too far from its initial value.

use thiserror::Error;

use super::real::Real;

pub trait OdeSystem<T: Real> {
    fn dim(&self) -> usize;
    fn rhs(&self, t: T, y: &[T], dy: &mut [T]);
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrationError {
    #[error("step size underflow at t = {t:.6e} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64, state: Vec<f64> },
    #[error("step budget of {steps} exhausted at t = {t:.6e}")]
    TooManySteps { t: f64, steps: usize },
    #[error("non-finite state at t = {t:.6e}")]
    NonFinite { t: f64, state: Vec<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

#[derive(Clone, Debug)]
pub struct ExtrapolationConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Highest extrapolation column.
    pub kmax: usize,
    pub h_init: f64,
    pub h_max: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl ExtrapolationConfig {
    pub fn new(rtol: f64, atol: f64) -> Self {
        ExtrapolationConfig { rtol, atol, kmax: 9, h_init: 1e-4, h_max: f64::INFINITY, h_min: 1e-300, max_steps: 5_000_000 }
    }

    /// Sensible defaults for a target precision.
    pub fn for_precision<T: Real>(rtol: f64) -> Self {
        let mut cfg = Self::new(rtol, 0.0);
        cfg.kmax = if T::EPS < 1e-20 { 13 } else { 9 };
        cfg
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

type Monitor<'a, T> = (&'a (dyn Fn(&[T]) -> f64 + Sync), f64);

pub struct Extrapolator<'a, T: Real> {
    cfg: ExtrapolationConfig,
    nseq: Vec<usize>,
    work: Vec<f64>,
    k: usize,
    h: f64,
    pub stats: StepStats,
    guard: Option<Monitor<'a, T>>,
    f0: Vec<T>,
    scratch: [Vec<T>; 3],
    rows: Vec<Vec<T>>,
    prev: Vec<Vec<T>>,
}

impl<'a, T: Real> Extrapolator<'a, T> {
    pub fn new(cfg: ExtrapolationConfig, dim: usize) -> Self {
        let kmax = cfg.kmax.max(3);
        let nseq: Vec<usize> = (0..=kmax).map(|j| 2 * (j + 1)).collect();
        let mut work = Vec::with_capacity(kmax + 1);
        let mut acc = 1.0;
        for &n in &nseq {
            acc += (n - 1) as f64;
            work.push(acc);
        }
        let h = cfg.h_init;
        let k = (kmax / 2).max(2);
        Extrapolator {
            cfg: ExtrapolationConfig { kmax, ..cfg },
            nseq,
            work,
            k,
            h,
            stats: StepStats::default(),
            guard: None,
            f0: vec![T::zero(); dim],
            scratch: [vec![T::zero(); dim], vec![T::zero(); dim], vec![T::zero(); dim]],
            rows: vec![vec![T::zero(); dim]; kmax + 1],
            prev: vec![vec![T::zero(); dim]; kmax + 1],
        }
    }

    /// Rejects any step after which `monitor(y) > tol`.
    pub fn with_drift_guard(mut self, monitor: &'a (dyn Fn(&[T]) -> f64 + Sync), tol: f64) -> Self {
        self.guard = Some((monitor, tol));
        self
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    fn midpoint<S: OdeSystem<T>>(&mut self, sys: &S, t: T, y: &[T], h: T, n: usize, out_row: usize) {
        let hs = h / T::from_i64(n as i64);
        let two_hs = hs + hs;
        let [z0, z1, f] = &mut self.scratch;
        for i in 0..y.len() {
            z0[i] = y[i];
            z1[i] = y[i] + hs * self.f0[i];
        }
        for m in 1..n {
            sys.rhs(t + hs * T::from_i64(m as i64), z1, f);
            for i in 0..y.len() {
                let z2 = z0[i] + two_hs * f[i];
                z0[i] = z1[i];
                z1[i] = z2;
            }
        }
        self.stats.rhs_evals += n - 1;
        self.rows[out_row].copy_from_slice(z1);
    }

    fn error(&self, y: &[T], a: &[T], b: &[T]) -> f64 {
        let mut err = 0.0f64;
        for i in 0..y.len() {
            let d = (a[i] - b[i]).to_f64().abs();
            if d == 0.0 {
                continue;
            }
            let sc = self.cfg.atol + self.cfg.rtol * y[i].to_f64().abs().max(a[i].to_f64().abs());
            if !d.is_finite() || sc == 0.0 {
                return f64::INFINITY;
            }
            err = err.max(d / sc);
        }
        err
    }

    /// Takes one accepted step from `t` towards `t_end` (never past it).
    pub fn step<S: OdeSystem<T>>(&mut self, sys: &S, t: &mut T, y: &mut [T], t_end: T) -> Result<(), IntegrationError> {
        let dim = y.len();
        let dir = if t_end >= *t { 1.0 } else { -1.0 };
        let remaining = (t_end - *t).to_f64().abs();
        sys.rhs(*t, y, &mut self.f0);
        self.stats.rhs_evals += 1;
        loop {
            let mut h = self.h.min(self.cfg.h_max);
            let clipped = h >= remaining;
            if clipped {
                h = remaining;
            }
            if h < self.cfg.h_min {
                return Err(IntegrationError::StepUnderflow { t: t.to_f64(), h, state: y.iter().map(|v| v.to_f64()).collect() });
            }
            let ht = if clipped { t_end - *t } else { T::from_f64(dir * h) };
            let kc = self.k;
            let top = (kc + 1).min(self.cfg.kmax);
            let mut hopt = vec![0.0; top + 1];
            let mut accepted_col = None;
            let mut last = 0;
            for j in 0..=top {
                last = j;
                self.midpoint(sys, *t, y, ht, self.nseq[j], j);
                // Aitken–Neville: rows[j] holds the raw midpoint value, rows[0..j] the previous diagonal.
                let mut cur = std::mem::take(&mut self.prev);
                cur[0].copy_from_slice(&self.rows[j]);
                for l in 1..=j {
                    let (a, b) = (self.nseq[j - l] as i64, self.nseq[j] as i64);
                    let fac = T::from_i64(a * a) / T::from_i64(b * b - a * a);
                    for i in 0..dim {
                        let a = cur[l - 1][i];
                        cur[l][i] = a + (a - self.rows[l - 1][i]) * fac;
                    }
                }
                for l in 0..=j {
                    self.rows[l].copy_from_slice(&cur[l]);
                }
                self.prev = cur;
                if j == 0 {
                    continue;
                }
                let err = self.error(y, &self.rows[j], &self.rows[j - 1]);
                let expo = 1.0 / (2 * j + 1) as f64;
                let fac = if err == 0.0 { 4.0 } else { (0.94 * (0.65 / err).powf(expo)).clamp(0.02, 4.0) };
                hopt[j] = h * fac;
                if j + 1 >= kc && err <= 1.0 {
                    accepted_col = Some(j);
                    break;
                }
            }
            let Some(ja) = accepted_col else {
                self.stats.rejected += 1;
                let kbest = (2..=last).min_by(|&a, &b| (self.work[a] / hopt[a]).total_cmp(&(self.work[b] / hopt[b]))).unwrap_or(2);
                self.k = kbest.clamp(2, self.cfg.kmax - 1);
                self.h = hopt[self.k.min(last)].min(0.5 * h);
                continue;
            };
            let ynew = &self.rows[ja];
            if ynew.iter().any(|v| !v.to_f64().is_finite()) {
                self.stats.rejected += 1;
                self.h = 0.25 * h;
                continue;
            }
            if let Some((monitor, tol)) = self.guard {
                if monitor(ynew) > tol {
                    self.stats.rejected += 1;
                    self.h = 0.5 * h;
                    continue;
                }
            }
            // Order and step proposal for the next step.
            let w = |j: usize| self.work[j] / hopt[j].max(1e-300);
            let mut knew = ja;
            if ja >= 2 && w(ja - 1) < 0.8 * w(ja) {
                knew = ja - 1;
            } else if ja + 1 <= self.cfg.kmax - 1 && (ja < 2 || w(ja) < 0.9 * w(ja - 1)) {
                knew = ja + 1;
            }
            knew = knew.clamp(2, self.cfg.kmax - 1);
            let hnext = if knew > ja { hopt[ja] * self.work[knew] / self.work[ja] } else { hopt[knew.min(ja)] };
            self.k = knew;
            self.h = if clipped { self.h.max(hnext) } else { hnext };
            y.copy_from_slice(ynew);
            *t = if clipped { t_end } else { *t + ht };
            self.stats.accepted += 1;
            return Ok(());
        }
    }

    /// Integrates to `t_end`, invoking `observer` after every accepted step.
    /// Returns the time reached (earlier than `t_end` if the observer stopped).
    pub fn integrate<S, F>(&mut self, sys: &S, t0: T, y: &mut [T], t_end: T, mut observer: F) -> Result<T, IntegrationError>
    where
        S: OdeSystem<T>,
        F: FnMut(T, &[T]) -> Flow,
    {
        let mut t = t0;
        let start = self.stats.accepted + self.stats.rejected;
        while t != t_end {
            if self.stats.accepted + self.stats.rejected - start > self.cfg.max_steps {
                return Err(IntegrationError::TooManySteps { t: t.to_f64(), steps: self.cfg.max_steps });
            }
            self.step(sys, &mut t, y, t_end)?;
            if y.iter().any(|v| !v.to_f64().is_finite()) {
                return Err(IntegrationError::NonFinite { t: t.to_f64(), state: y.iter().map(|v| v.to_f64()).collect() });
            }
            if observer(t, y) == Flow::Stop {
                break;
            }
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::dd::DoubleDouble;

    struct Oscillator;
    impl<T: Real> OdeSystem<T> for Oscillator {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _t: T, y: &[T], dy: &mut [T]) {
            dy[0] = y[1];
            dy[1] = -y[0];
        }
    }

    struct Decay;
    impl OdeSystem<f64> for Decay {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = -2.0 * t * y[0];
        }
    }

    #[test]
    fn harmonic_oscillator_double() {
        let mut y = [1.0, 0.0];
        let mut ig = Extrapolator::new(ExtrapolationConfig::new(1e-13, 1e-15), 2);
        ig.integrate(&Oscillator, 0.0, &mut y, 10.0, |_, _| Flow::Continue).unwrap();
        assert!((y[0] - 10f64.cos()).abs() < 1e-11);
        assert!((y[1] + 10f64.sin()).abs() < 1e-11);
    }

    #[test]
    fn time_dependent_and_backward() {
        let mut y = [1.0];
        let mut ig = Extrapolator::new(ExtrapolationConfig::new(1e-12, 0.0), 1);
        ig.integrate(&Decay, 0.0, &mut y, 2.0, |_, _| Flow::Continue).unwrap();
        assert!((y[0] - (-4.0f64).exp()).abs() < 1e-12 * 1.0);
        ig.integrate(&Decay, 2.0, &mut y, 0.0, |_, _| Flow::Continue).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_double_double() {
        let one = DoubleDouble::from_f64(1.0);
        let mut y = [one, DoubleDouble::from_f64(0.0)];
        let cfg = ExtrapolationConfig::for_precision::<DoubleDouble>(1e-27);
        let mut ig = Extrapolator::new(cfg, 2);
        let t_end = DoubleDouble::from_f64(3.0);
        ig.integrate(&Oscillator, DoubleDouble::from_f64(0.0), &mut y, t_end, |_, _| Flow::Continue).unwrap();
        let c = t_end.cos();
        assert!((y[0] - c).abs().to_f64() < 1e-25, "{}", (y[0] - c).to_f64());
    }

    #[test]
    fn drift_guard_counts_rejections() {
        let mut y = [1.0, 0.0];
        let monitor = |y: &[f64]| (y[0] * y[0] + y[1] * y[1] - 1.0).abs();
        let mut ig = Extrapolator::new(ExtrapolationConfig::new(1e-6, 1e-8), 2).with_drift_guard(&monitor, 1e-9);
        ig.integrate(&Oscillator, 0.0, &mut y, 5.0, |_, _| Flow::Continue).unwrap();
        assert!(monitor(&y) <= 1e-9);
    }
}
