//! The comparison between the Galerkin NLS and the resonant dynamics on a
//! generation set, and the Sobolev growth it produces.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::galerkin::{integrate_table, pack, unpack, Galerkin, InteractionTable, NlsOptions, NlsTrajectory, Term};
use super::multilinear::{multilinear_n, resonant_n};
use super::state::{sobolev_weight, FourierState};
use crate::numeric::{fit_slope, ExtrapolationConfig, Extrapolator, Flow, IntegrationError, OdeSystem};
use crate::resonance::GenerationSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error("horizon T = {t:.3e} exceeds B⁴ ln B = {limit:.3e} for B = {b:.3e}")]
    Regime { t: f64, b: f64, limit: f64 },
    #[error(transparent)]
    Integration(#[from] IntegrationError),
}

/// a_j(0) = b_i/λ for j in generation i, zero elsewhere.
pub fn build_initial_data(set: &GenerationSet, b0: &[Complex64], lambda: f64) -> FourierState {
    assert_eq!(b0.len(), set.n_generations(), "one toy amplitude per generation");
    let amps = (0..set.len()).map(|v| b0[set.generation_of(v) - 1] / lambda).collect();
    FourierState::new(set.points().to_vec(), amps)
}

/// Dilation factor m such that the data built on m·S has H^s norm δ.
pub fn data_dilation_for_size(set: &GenerationSet, b0: &[Complex64], lambda: f64, s: f64, delta: f64) -> f64 {
    (delta / build_initial_data(set, b0, lambda).sobolev_norm(s)).powf(1.0 / s)
}

/// Phase rate ν with β_j(t) = b_i(t)e^{iνt} for diagonal data on a generation
/// set with n points per generation and toy mass J.
pub fn toy_gauge_rate(n: usize, mass: f64) -> f64 {
    6.0 * (n * n) as f64 * mass * mass
}

/// The diagonal resonant state matching the toy state b at time t.
pub fn toy_to_resonant(set: &GenerationSet, b: &[Complex64], t: f64) -> FourierState {
    let mass: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    let rot = Complex64::from_polar(1.0, toy_gauge_rate(set.per_generation(), mass) * t);
    let mut a = build_initial_data(set, b, 1.0);
    a.amps.iter_mut().for_each(|z| *z *= rot);
    a
}

/// E(t) = −Σ_{ω₆≠0} g g g ḡ ḡ e^{iω₆t}, on the full arising support.
pub fn error_term(g: &FourierState, t: f64) -> FourierState {
    let mut full = multilinear_n(t, [g; 5], None);
    let res = resonant_n([g; 5], Some(&full.support));
    for (z, r) in full.amps.iter_mut().zip(&res.amps) {
        *z = -(*z - r);
    }
    full
}

/// Q = Σ|g_j(T)|²|j|^{2s} / Σ|g_j(0)|²|j|^{2s}.
pub fn growth_ratio(g0: &FourierState, g_t: &FourierState, s: f64) -> f64 {
    (g_t.sobolev_norm(s) / g0.sobolev_norm(s)).powi(2)
}

/// 𝔍_i = Σ_{j∈S_i}|j|^{2s}, i = 1..N.
pub fn generation_weights(set: &GenerationSet, s: f64) -> Vec<f64> {
    let mut w = vec![0.0; set.n_generations()];
    for (v, k) in set.points().iter().enumerate() {
        w[set.generation_of(v) - 1] += sobolev_weight(k, s);
    }
    w
}

/// Q for diagonal data expressed through the toy amplitudes.
pub fn toy_growth_ratio(weights: &[f64], b0: &[Complex64], b_t: &[Complex64]) -> f64 {
    let q = |b: &[Complex64]| b.iter().zip(weights).map(|(z, w)| z.norm_sqr() * w).sum::<f64>();
    q(b_t) / q(b0)
}

/// (1−ε)/(εΣ𝔍_i/𝔍_{N−2} + (1−ε)𝔍_3/𝔍_{N−2}).
pub fn growth_lower_bound(weights: &[f64], eps: f64) -> f64 {
    let n = weights.len();
    assert!(n >= 5, "the bound involves generations 3 and N−2");
    let top = weights[n - 3];
    let total: f64 = weights.iter().sum();
    (1.0 - eps) / (eps * total / top + (1.0 - eps) * weights[2] / top)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub lambdas: Vec<f64>,
    pub sigma: f64,
    /// Integration horizon T.
    pub horizon: f64,
    /// Sobolev exponent for the reported norms.
    pub s: f64,
    pub samples: usize,
    pub tol: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig { lambdas: vec![8.0, 16.0, 32.0], sigma: 0.5, horizon: 1e-3, s: 1.0, samples: 16, tol: 1e-12 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub lambda: f64,
    /// C(N) = sup_t λ‖g(t)‖₁, measured.
    pub c_n: f64,
    pub big_b: f64,
    pub sigma: f64,
    pub horizon: f64,
    pub times: Vec<f64>,
    pub error_l1: Vec<f64>,
    /// B^{−1−σ/2}.
    pub bound: f64,
    pub s: f64,
    pub sobolev_g: Vec<f64>,
    pub sobolev_a: Vec<f64>,
    pub growth_ratio: f64,
    pub g_l1_max: f64,
    /// ‖∫₀ᵀE‖₁ and the boundary term of one integration by parts.
    pub forcing_integral_l1: f64,
    pub leading_term_l1: f64,
    pub full_mass_drift: f64,
    pub full_momentum_drift: f64,
    pub resonant_mass_drift: f64,
    pub n_modes: usize,
    pub n_terms: usize,
    #[serde(skip)]
    pub full: NlsTrajectory,
    #[serde(skip)]
    pub resonant: NlsTrajectory,
}

impl ComparisonReport {
    pub fn final_error(&self) -> f64 {
        *self.error_l1.last().expect("at least one sample")
    }

    /// Recomputes ‖a(t_i) − g(t_i)‖₁ from the stored states.
    pub fn recompute_error(&self, i: usize) -> f64 {
        self.full.state(i).l1_distance(&self.resonant.state(i))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderReport {
    pub reports: Vec<ComparisonReport>,
    /// Slope of ln ‖a(T)−g(T)‖₁ against ln B.
    pub exponent: f64,
    /// λ⁵‖∫E‖₁ across the ladder.
    pub scaled_forcing: Vec<f64>,
}

/// ġ = iN_res(g) on the core jointly with İ = E(t, g) on the whole support.
struct ForcedSystem<'a> {
    resonant: &'a InteractionTable,
    forcing: &'a InteractionTable,
    core: usize,
}

impl OdeSystem<f64> for ForcedSystem<'_> {
    fn dim(&self) -> usize {
        2 * (self.core + self.forcing.len())
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let mut g = unpack(&y[..2 * self.core]);
        let mut out = vec![Complex64::new(0.0, 0.0); self.core];
        self.resonant.apply(t, &g, &mut out);
        for (k, z) in out.iter().enumerate() {
            dy[2 * k] = -z.im;
            dy[2 * k + 1] = z.re;
        }
        g.resize(self.forcing.len(), Complex64::new(0.0, 0.0));
        let mut e = vec![Complex64::new(0.0, 0.0); self.forcing.len()];
        self.forcing.apply(t, &g, &mut e);
        for (k, z) in e.iter().enumerate() {
            dy[2 * (self.core + k)] = -z.re;
            dy[2 * (self.core + k) + 1] = -z.im;
        }
    }
}

/// −Σ F(t)e^{iω₆t}/(iω₆) |₀ᵀ over the forcing terms, F = g g g ḡ ḡ.
fn leading_term(forcing: &InteractionTable, g0: &[Complex64], g_t: &[Complex64], t_end: f64) -> FourierState {
    let boundary = |g: &[Complex64], t: f64, term: &Term| -> Complex64 {
        let [i1, i2, i3, i4, i5] = term.inputs.map(|i| i as usize);
        let f = g[i1] * g[i2] * g[i3] * (g[i4] * g[i5]).conj() * term.mult;
        f * Complex64::from_polar(1.0, term.omega as f64 * t) / Complex64::new(0.0, term.omega as f64)
    };
    let amps = (0..forcing.len())
        .into_par_iter()
        .map(|o| forcing.terms_of(o).iter().map(|term| -(boundary(g_t, t_end, term) - boundary(g0, 0.0, term))).sum())
        .collect();
    FourierState::new(forcing.support.clone(), amps)
}

/// T ≤ B⁴ ln B.
fn regime(t: f64, big_b: f64) -> Result<(), ExperimentError> {
    let limit = big_b.powi(4) * big_b.ln();
    if !(big_b > 1.0) || t > limit {
        return Err(ExperimentError::Regime { t, b: big_b, limit });
    }
    Ok(())
}

/// One rung of the ladder: the shell-Galerkin NLS from a(0) = g(0) against
/// the resonant solution g on the generation set.
pub fn approximation_experiment(set: &GenerationSet, b0: &[Complex64], lambda: f64, cfg: &ExperimentConfig) -> Result<ComparisonReport, ExperimentError> {
    if !(cfg.sigma > 0.0 && cfg.sigma < 1.0) {
        return Err(ExperimentError::Invalid(format!("σ = {} outside (0, 1)", cfg.sigma)));
    }
    if !(lambda > 1.0 && cfg.horizon > 0.0) {
        return Err(ExperimentError::Invalid(format!("need λ > 1 and T > 0, got λ = {lambda}, T = {}", cfg.horizon)));
    }
    let g0 = build_initial_data(set, b0, lambda);
    regime(cfg.horizon, lambda * lambda * g0.l1())?;
    let core = g0.len();
    let shell = InteractionTable::build(Galerkin::Shell, &g0.support);
    let forcing = shell.filter(|_, t| t.inputs.iter().all(|&i| (i as usize) < core) && t.omega != 0);
    let resonant = InteractionTable::build(Galerkin::Resonant, &g0.support);

    // g and ∫E together; C(N) is checked against the regime before the full run.
    let samples = cfg.samples.max(1);
    let sys = ForcedSystem { resonant: &resonant, forcing: &forcing, core };
    let scale = g0.amps.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut ecfg = ExtrapolationConfig::new(cfg.tol, cfg.tol * scale);
    ecfg.h_init = cfg.horizon / 64.0;
    let mut ig = Extrapolator::<f64>::new(ecfg, sys.dim());
    let mut y = pack(&g0.amps);
    y.resize(sys.dim(), 0.0);
    let mut g_states = vec![g0.amps.clone()];
    let mut times = vec![0.0];
    let mut t = 0.0;
    for i in 1..=samples {
        let next = cfg.horizon * i as f64 / samples as f64;
        t = ig.integrate(&sys, t, &mut y, next, |_, _| Flow::Continue)?;
        times.push(t);
        g_states.push(unpack(&y[..2 * core]));
    }
    let integral = FourierState::new(forcing.support.clone(), unpack(&y[2 * core..]));
    let g_l1_max = g_states.iter().map(|g| g.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let c_n = lambda * g_l1_max;
    let big_b = c_n * lambda;
    regime(cfg.horizon, big_b)?;
    let mut g_t = g_states.last().unwrap().clone();
    let mut g_00 = g0.amps.clone();
    g_t.resize(forcing.len(), Complex64::new(0.0, 0.0));
    g_00.resize(forcing.len(), Complex64::new(0.0, 0.0));
    let leading = leading_term(&forcing, &g_00, &g_t, t);

    let full = integrate_table(&shell, &g0, cfg.horizon, &NlsOptions { tol: cfg.tol, samples, ..NlsOptions::default() })?;
    let masses: Vec<f64> = g_states.iter().map(|g| g.iter().map(|z| z.norm_sqr()).sum()).collect();
    let resonant_traj = NlsTrajectory {
        kind: Galerkin::Resonant,
        support: g0.support.clone(),
        times: times.clone(),
        momentum: g_states.iter().map(|g| FourierState::new(g0.support.clone(), g.clone()).momentum()).collect(),
        mass: masses.clone(),
        states: g_states,
        stats: ig.stats,
    };
    let error_l1: Vec<f64> = (0..times.len()).map(|i| full.state(i).l1_distance(&resonant_traj.state(i))).collect();
    let sobolev_g = (0..times.len()).map(|i| resonant_traj.state(i).sobolev_norm(cfg.s)).collect();
    let sobolev_a = (0..times.len()).map(|i| full.state(i).sobolev_norm(cfg.s)).collect();
    let growth = growth_ratio(&resonant_traj.state(0), &resonant_traj.last(), cfg.s);
    Ok(ComparisonReport {
        lambda,
        c_n,
        big_b,
        sigma: cfg.sigma,
        horizon: cfg.horizon,
        times,
        error_l1,
        bound: big_b.powf(-1.0 - cfg.sigma / 2.0),
        s: cfg.s,
        sobolev_g,
        sobolev_a,
        growth_ratio: growth,
        g_l1_max,
        forcing_integral_l1: integral.l1(),
        leading_term_l1: leading.l1(),
        full_mass_drift: full.mass_drift(),
        full_momentum_drift: full.momentum_drift(),
        resonant_mass_drift: resonant_traj.mass_drift(),
        n_modes: shell.len(),
        n_terms: shell.n_terms(),
        full,
        resonant: resonant_traj,
    })
}

/// The experiment across a λ ladder, run as independent jobs.
pub fn approximation_ladder(set: &GenerationSet, b0: &[Complex64], cfg: &ExperimentConfig) -> Result<LadderReport, ExperimentError> {
    if cfg.lambdas.len() < 2 {
        return Err(ExperimentError::Invalid("the ladder needs at least two values of λ".into()));
    }
    let reports = cfg.lambdas.par_iter().map(|&l| approximation_experiment(set, b0, l, cfg)).collect::<Result<Vec<_>, _>>()?;
    let lb: Vec<f64> = reports.iter().map(|r| r.big_b.ln()).collect();
    let le: Vec<f64> = reports.iter().map(|r| r.final_error().ln()).collect();
    let scaled_forcing = reports.iter().map(|r| r.lambda.powi(5) * r.forcing_integral_l1).collect();
    Ok(LadderReport { exponent: fit_slope(&lb, &le), scaled_forcing, reports })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_bound_on_a_synthetic_ladder() {
        let w = [1.0, 2.0, 4.0, 64.0, 1024.0, 4096.0];
        let eps = 0.1;
        let b0 = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0].map(|x: f64| Complex64::new(x, 0.0));
        let bt = [0.0, 0.0, 0.0, 0.0, 1.0, 0.0].map(|x: f64| Complex64::new(x, 0.0));
        let q = toy_growth_ratio(&w, &b0, &bt);
        assert_eq!(q, 256.0);
        assert!(q >= growth_lower_bound(&w, eps));
    }
}
