//! Shooting for slider solutions: orbits that shadow T_3 → T_4 → … → T_{N−2}.
//!
//! The initial datum sits near T_3 with a small component on the unstable ray
//! of mode 4 and tiny seeds in modes 5..N−2. While the orbit lingers at T_j
//! (4 ≤ j < N−2) it leaves either forward along mode j+1 or back along mode
//! j−1, the latter on one of two rays distinguished by the sign of c⁺_{j−1}.
//! The phase of mode j at t = 0 is bisected between the two backward branches
//! until the forward exit appears. Levels are tuned in order and re-tuned when
//! a later adjustment disturbs an earlier one. When a bracket collapses to the
//! working precision the whole search is repeated one rung up the ladder.

use num_complex::{Complex, Complex64};
use serde::Serialize;
use thiserror::Error;

use super::frame::{diagonalize_hyperbolic, to_local};
use crate::numeric::{DoubleDouble, ExtrapolationConfig, Extrapolator, Flow, Precision, Real, StepStats};
use crate::toy::{heteroclinic_angle, mass, pack, to_c64, unpack, ToyError, ToyModel, Trajectory};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SliderConfig {
    pub n_gen: usize,
    pub n: f64,
    /// Closeness required at the visited orbits.
    pub eps: f64,
    /// A hop into mode k completes when |b_k|² ≥ 1 − σ².
    pub sigma: f64,
    /// Initial amplitude of mode 4 on its unstable ray.
    pub delta: f64,
    /// Initial amplitude of modes 5..N−2.
    pub seed: f64,
    /// |c| at which the orbit is considered to have left a periodic orbit.
    pub exit_threshold: f64,
    pub tol: f64,
    pub precision: Precision,
    /// Longest allowed interval between consecutive hops (rescaled time).
    pub hop_time: f64,
    pub max_bisections: usize,
    /// Starting phase offsets of modes 4..N−2 (missing entries are 0).
    pub initial_phases: Vec<f64>,
}

impl SliderConfig {
    pub fn new(n_gen: usize, n: f64, eps: f64) -> Self {
        SliderConfig {
            n_gen,
            n,
            eps,
            sigma: 1e-2_f64.min(eps),
            delta: 1e-3_f64.min(eps),
            seed: 1e-6_f64.min(eps),
            exit_threshold: 0.1,
            tol: 1e-13,
            precision: Precision::Double,
            hop_time: 60.0,
            max_bisections: 240,
            initial_phases: vec![],
        }
    }

    fn validate(&self) -> Result<(), SliderError> {
        let bad = |m: String| Err(SliderError::Invalid(m));
        if self.n_gen < 6 {
            return bad(format!("N = {} < 6: sliders need modes 3..N−2 with N−2 ≥ 4", self.n_gen));
        }
        if !(self.n >= 2.0) {
            return bad(format!("n = {} < 2", self.n));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps = {} outside (0, 1)", self.eps));
        }
        for (name, v) in [("sigma", self.sigma), ("delta", self.delta), ("seed", self.seed)] {
            if !(v > 0.0 && v <= self.eps) {
                return bad(format!("{name} = {v} must lie in (0, eps]"));
            }
        }
        if !(self.tol > 0.0 && self.hop_time > 0.0) {
            return bad("tol and hop_time must be positive".into());
        }
        Ok(())
    }

    /// Modes carrying energy: 3..=N−2.
    fn last(&self) -> usize {
        self.n_gen - 2
    }

}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SliderError {
    #[error("invalid slider configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Integration(#[from] ToyError),
    /// The search could not resolve the forward branch at the highest precision.
    #[error("shooting failed after reaching T_{deepest} ({reason}); precision {precision:?}")]
    Failed { deepest: usize, reason: String, precision: Precision, bracket_width: f64 },
}

/// Passage through the neighbourhood of one periodic orbit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Visit {
    pub j: usize,
    /// First time with |b_j|² ≥ 1 − σ², if reached.
    pub arrived: Option<f64>,
    /// Direction of departure (true: towards j+1) and the sign of c⁺_{j−1} at that moment.
    pub departure: Option<(bool, i8)>,
}

#[derive(Clone, Debug)]
struct Run {
    /// Visits to T_4, T_5, … in order.
    visits: Vec<Visit>,
    finished: bool,
    trajectory: Option<Trajectory>,
}

enum Outcome {
    Good,
    /// Sign of the trailing unstable coordinate, if the orbit got close enough to tell.
    Bad(Option<i8>),
}

impl Run {
    /// Level e (departure from T_{4+e}) succeeds when the orbit then arrives at T_{5+e}.
    fn good(&self, level: usize) -> bool {
        self.visits.get(level + 1).is_some_and(|v| v.arrived.is_some())
    }

    fn failure(&self, levels: usize) -> Option<usize> {
        (0..levels).find(|&e| !self.good(e))
    }

    fn sign(&self, level: usize) -> Option<i8> {
        self.visits.get(level).and_then(|v| v.departure).map(|d| d.1)
    }
}

/// One line of the hop log.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HopRecord {
    pub hop: usize,
    pub from: usize,
    pub to: usize,
    pub time: f64,
    pub precision: String,
    /// Phase offset of mode `to` at t = 0 selected by the search.
    pub parameter: f64,
    pub bisections: usize,
    pub bracket_width: f64,
}

#[derive(Clone, Debug)]
pub struct SliderResult {
    pub config: SliderConfig,
    pub model: ToyModel,
    pub initial: Vec<Complex64>,
    /// Time T0 at which the orbit reaches T_{N−2}.
    pub final_time: f64,
    pub hops: Vec<HopRecord>,
    pub trajectory: Trajectory,
    pub precision: Precision,
}

fn initial_state<T: Real>(cfg: &SliderConfig, phases: &[DoubleDouble]) -> Vec<Complex<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut b = vec![zero; cfg.n_gen];
    let phi0 = heteroclinic_angle(cfg.n);
    let mut rest = T::zero();
    for (i, p) in phases.iter().enumerate() {
        let k = 4 + i;
        let (amp, base) = if k == 4 { (cfg.delta, phi0) } else { (cfg.seed, 0.0) };
        let angle = T::from_f64(base) + T::from_f64(p.hi) + T::from_f64(p.lo);
        let (s, c) = angle.sin_cos();
        let a = T::from_f64(amp);
        b[k - 1] = Complex::new(a * c, a * s);
        rest += a * a;
    }
    b[2] = Complex::new((T::one() - rest).sqrt(), T::zero());
    b
}

fn simulate<T: Real>(cfg: &SliderConfig, model: &ToyModel, phases: &[DoubleDouble], record: bool) -> Result<Run, SliderError> {
    let b0: Vec<Complex<T>> = initial_state(cfg, phases);
    let mut y = pack(&b0);
    let j0 = mass(&b0).to_f64();
    let monitor = move |y: &[T]| (mass(&unpack(y)).to_f64() - j0).abs() / j0;
    let mut ecfg = ExtrapolationConfig::for_precision::<T>(cfg.tol);
    ecfg.atol = cfg.tol * 1e-3;
    ecfg.h_max = 0.05;
    let mut ex = Extrapolator::new(ecfg, y.len()).with_drift_guard(&monitor, 1e-10_f64.max(cfg.tol));
    let mut run = Run { visits: vec![], finished: false, trajectory: None };
    let mut tr = Trajectory { times: vec![], states: vec![], mass: vec![], energy: vec![], stats: StepStats::default(), precision: precision_of::<T>() };
    let push = |tr: &mut Trajectory, t: f64, y: &[T]| {
        let b: Vec<Complex<T>> = unpack(y);
        tr.times.push(t);
        tr.mass.push(mass(&b).to_f64());
        tr.energy.push(model.hamiltonian(&b).to_f64());
        tr.states.push(to_c64(&b));
    };
    if record {
        push(&mut tr, 0.0, &y);
    }
    let last = cfg.last();
    let arrive = 1.0 - cfg.sigma * cfg.sigma;
    let near = 1.0 - cfg.exit_threshold * cfg.exit_threshold;
    // Orbit whose neighbourhood the state is in, the next one expected, and the last event time.
    let mut cur = Some(3);
    let mut next = 4;
    let mut since = 0.0;
    let t_max = cfg.hop_time * (cfg.n_gen as f64);
    ex.integrate(model, T::zero(), &mut y, T::from_f64(t_max), |t, y| {
        let t = t.to_f64();
        let b: Vec<Complex64> = to_c64(&unpack(y));
        if record {
            push(&mut tr, t, y);
        }
        match cur {
            Some(j) => {
                let p = b[j - 1].norm_sqr();
                if j >= 4 {
                    let v = run.visits.last_mut().expect("visit recorded on entry");
                    if v.arrived.is_none() && p >= arrive {
                        v.arrived = Some(t);
                        if j == last {
                            run.finished = true;
                            return Flow::Stop;
                        }
                    }
                }
                if p < near {
                    cur = None;
                    since = t;
                    if j >= 4 {
                        let forward = b[j].norm() >= b[j - 2].norm();
                        let plus = to_local(&b, j).map(|s| diagonalize_hyperbolic(s.mode(j - 1), cfg.n).plus).unwrap_or(0.0);
                        let v = run.visits.last_mut().expect("visit recorded on entry");
                        v.departure = Some((forward, if plus >= 0.0 { 1 } else { -1 }));
                        if !forward || v.arrived.is_none() || j == last {
                            return Flow::Stop;
                        }
                    }
                }
            }
            None => {
                if let Some(k) = (1..=b.len()).find(|&k| b[k - 1].norm_sqr() >= near) {
                    if k != next {
                        return Flow::Stop;
                    }
                    run.visits.push(Visit { j: k, arrived: None, departure: None });
                    cur = Some(k);
                    next += 1;
                    since = t;
                }
            }
        }
        if t - since > cfg.hop_time {
            return Flow::Stop;
        }
        Flow::Continue
    })
    .map_err(ToyError::from)?;
    if record {
        tr.stats = ex.stats;
        run.trajectory = Some(tr);
    }
    Ok(run)
}

fn precision_of<T: Real>() -> Precision {
    if T::EPS < 1e-20 {
        Precision::DoubleDouble
    } else {
        Precision::Double
    }
}

struct Search<'a> {
    cfg: &'a SliderConfig,
    model: ToyModel,
    precision: Precision,
    phases: Vec<DoubleDouble>,
    bisections: Vec<usize>,
    widths: Vec<f64>,
    evaluations: usize,
}

/// Bisection stopped because the bracket reached the working precision.
struct Collapsed {
    deepest: usize,
    width: f64,
}

enum Stop {
    Collapsed(Collapsed),
    Hard(SliderError),
}

impl From<SliderError> for Stop {
    fn from(e: SliderError) -> Self {
        Stop::Hard(e)
    }
}

impl Search<'_> {
    fn eval(&mut self) -> Result<Run, SliderError> {
        self.evaluations += 1;
        match self.precision {
            Precision::Double => simulate::<f64>(self.cfg, &self.model, &self.phases, false),
            Precision::DoubleDouble => simulate::<DoubleDouble>(self.cfg, &self.model, &self.phases, false),
        }
    }

    fn eps(&self) -> f64 {
        match self.precision {
            Precision::Double => f64::EPSILON,
            Precision::DoubleDouble => <DoubleDouble as Real>::EPS,
        }
    }

    /// Departures to control: from T_4, …, T_{N−3}.
    fn levels(&self) -> usize {
        self.cfg.n_gen - 6
    }

    fn failed(&self, deepest: usize, reason: &str) -> Stop {
        Stop::Hard(SliderError::Failed { deepest, reason: reason.into(), precision: self.precision, bracket_width: f64::NAN })
    }

    /// Runs with the levels below `level` repaired and reports on `level`.
    fn outcome(&mut self, level: usize, depth: usize) -> Result<Outcome, Stop> {
        for _ in 0..64 {
            let run = self.eval()?;
            match run.failure(self.levels()) {
                Some(k) if k < level => self.tune(k, depth + 1)?,
                Some(k) if k == level => return Ok(Outcome::Bad(run.sign(level))),
                _ => return Ok(Outcome::Good),
            }
        }
        Err(self.failed(4 + level, "lower levels keep failing"))
    }

    /// Adjusts the phase of mode 4+level until the orbit leaves T_{4+level} for T_{5+level}.
    fn tune(&mut self, level: usize, depth: usize) -> Result<(), Stop> {
        if depth > 4 * self.cfg.n_gen {
            return Err(self.failed(4 + level, "tuning recursion too deep"));
        }
        let centre = self.phases[level];
        let grid = 32;
        let offsets: Vec<f64> = if level == 0 {
            (0..=grid).map(|i| -0.5 + i as f64 / grid as f64).collect()
        } else {
            (0..=grid).map(|i| std::f64::consts::PI * (-1.0 + 2.0 * i as f64 / grid as f64)).collect()
        };
        // Scan for two neighbouring phases whose trailing coordinates have opposite signs.
        let mut prev: Option<(DoubleDouble, i8)> = None;
        let mut bracket = None;
        for off in offsets {
            self.phases[level] = centre + DoubleDouble::from_f64(off);
            match self.outcome(level, depth)? {
                Outcome::Good => return Ok(()),
                Outcome::Bad(Some(s)) => {
                    if let Some((p, q)) = prev {
                        if q != s {
                            bracket = Some((p, q, self.phases[level]));
                            break;
                        }
                    }
                    prev = Some((self.phases[level], s));
                }
                Outcome::Bad(None) => prev = None,
            }
        }
        let Some((mut lo, s_lo, mut hi)) = bracket else {
            self.phases[level] = centre;
            return Err(self.failed(4 + level, "no sign change of the trailing unstable coordinate"));
        };
        for _ in 0..self.cfg.max_bisections {
            let width = (hi - lo).abs().to_f64();
            self.widths[level] = width;
            self.bisections[level] += 1;
            if width <= 4.0 * self.eps() * lo.abs().to_f64().max(1.0) {
                return Err(Stop::Collapsed(Collapsed { deepest: 4 + level, width }));
            }
            let mid = (lo + hi) * DoubleDouble::from_f64(0.5);
            self.phases[level] = mid;
            match self.outcome(level, depth)? {
                Outcome::Good => return Ok(()),
                Outcome::Bad(Some(s)) if s == s_lo => lo = mid,
                Outcome::Bad(Some(_)) => hi = mid,
                Outcome::Bad(None) => return Err(self.failed(4 + level, "bisection left the neighbourhood of the orbit")),
            }
        }
        Err(Stop::Collapsed(Collapsed { deepest: 4 + level, width: (hi - lo).abs().to_f64() }))
    }

    fn solve(&mut self) -> Result<Run, Stop> {
        for _ in 0..16 * self.cfg.n_gen {
            let run = self.eval()?;
            match run.failure(self.levels()) {
                None if run.finished => return Ok(run),
                None => return Err(self.failed(3, "the first hop does not complete; adjust delta or the phase of mode 4")),
                Some(k) => self.tune(k, 0)?,
            }
        }
        Err(self.failed(3, "search did not settle"))
    }
}

/// Searches for a slider orbit and integrates it at the precision that succeeded.
pub fn slider_shoot(cfg: &SliderConfig) -> Result<SliderResult, SliderError> {
    cfg.validate()?;
    let model = ToyModel::new(cfg.n_gen, cfg.n).rescaled();
    let mut search = Search {
        cfg,
        model,
        precision: cfg.precision,
        phases: (0..cfg.last() - 3).map(|i| DoubleDouble::from_f64(cfg.initial_phases.get(i).copied().unwrap_or(0.0))).collect(),
        bisections: vec![0; cfg.last() - 3],
        widths: vec![0.0; cfg.last() - 3],
        evaluations: 0,
    };
    loop {
        match search.solve() {
            Ok(_) => break,
            Err(Stop::Hard(e)) => return Err(e),
            Err(Stop::Collapsed(c)) => match search.precision.escalate() {
                Some(p) => search.precision = p,
                None => {
                    return Err(SliderError::Failed { deepest: c.deepest, reason: "bracket collapsed at the highest precision".into(), precision: search.precision, bracket_width: c.width })
                }
            },
        }
    }
    let run = match search.precision {
        Precision::Double => simulate::<f64>(cfg, &model, &search.phases, true)?,
        Precision::DoubleDouble => simulate::<DoubleDouble>(cfg, &model, &search.phases, true)?,
    };
    let trajectory = run.trajectory.clone().expect("recorded run");
    let tag = search.precision.tag().to_string();
    let hops = run
        .visits
        .iter()
        .enumerate()
        .map(|(i, v)| HopRecord {
            hop: i + 1,
            from: v.j - 1,
            to: v.j,
            time: v.arrived.unwrap_or(f64::NAN),
            precision: tag.clone(),
            parameter: search.phases[i].to_f64(),
            bisections: search.bisections[i],
            bracket_width: search.widths[i],
        })
        .collect();
    Ok(SliderResult {
        config: cfg.clone(),
        model,
        initial: trajectory.states[0].clone(),
        final_time: *trajectory.times.last().expect("non-empty"),
        hops,
        trajectory,
        precision: search.precision,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SliderReport {
    pub initial_ok: bool,
    pub final_ok: bool,
    /// (j, t_j, |b_j(t_j)|) for j = 3..N−2.
    pub peaks: Vec<(usize, f64, f64)>,
    pub peaks_ok: bool,
    pub mass_drift: f64,
    pub ok: bool,
}

/// Checks the defining inequalities of a slider to closeness `eps`.
pub fn verify_slider(res: &SliderResult, eps: f64) -> SliderReport {
    let tr = &res.trajectory;
    let n_gen = res.config.n_gen;
    let last = n_gen - 2;
    let close = |b: &[Complex64], j: usize| b[j - 1].norm() >= 1.0 - eps && (1..=n_gen).all(|k| k == j || b[k - 1].norm() <= eps);
    let initial_ok = close(&tr.states[0], 3);
    let final_ok = close(tr.last(), last);
    let mut peaks = Vec::new();
    let mut from = 0;
    let mut peaks_ok = true;
    for j in 3..=last {
        match (from..tr.states.len()).find(|&i| tr.states[i][j - 1].norm() >= 1.0 - eps) {
            Some(i) => {
                peaks.push((j, tr.times[i], tr.states[i][j - 1].norm()));
                from = i + 1;
            }
            None => {
                peaks_ok = false;
                break;
            }
        }
    }
    let mass_drift = tr.mass_drift();
    SliderReport { initial_ok, final_ok, peaks_ok, ok: initial_ok && final_ok && peaks_ok && mass_drift <= 1e-8, peaks, mass_drift }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(slider_shoot(&SliderConfig::new(5, 4.0, 0.1)), Err(SliderError::Invalid(_))));
        assert!(matches!(slider_shoot(&SliderConfig::new(6, 4.0, 1.5)), Err(SliderError::Invalid(_))));
        let mut c = SliderConfig::new(6, 4.0, 0.1);
        c.sigma = 0.5;
        assert!(matches!(slider_shoot(&c), Err(SliderError::Invalid(_))));
    }

    #[test]
    fn single_hop_slider() {
        let cfg = SliderConfig::new(6, 4.0, 0.1);
        let res = slider_shoot(&cfg).unwrap();
        assert_eq!(res.hops.len(), 1);
        assert_eq!((res.hops[0].from, res.hops[0].to), (3, 4));
        let rep = verify_slider(&res, 0.1);
        assert!(rep.ok, "{rep:?}");
    }

    #[test]
    fn bisection_recovers_off_ray_start() {
        let mut cfg = SliderConfig::new(7, 4.0, 0.1);
        cfg.initial_phases = vec![0.2];
        let res = slider_shoot(&cfg).unwrap();
        assert_eq!(res.hops.len(), 2);
        assert!(res.hops[0].bisections > 0);
        assert!(res.hops[0].parameter.abs() < 0.1);
        assert!(verify_slider(&res, 0.1).ok);
    }
}
