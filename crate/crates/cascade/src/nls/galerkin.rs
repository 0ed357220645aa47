//! Galerkin truncations of the quintic NLS in the moving frame, −iȧ = N(t)(a,…,a).
//!
//! Interactions are stored once per unordered input pattern with their
//! multiplicity, grouped by output mode. The time-dependent phases e^{iω₆t}
//! are never formed per term: each mode is rotated by e^{i|k|²t} up front and
//! the output is rotated back by e^{−i|j|²t}.

use std::collections::{HashMap, HashSet};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::state::{index_of, FourierState};
use crate::numeric::{ExtrapolationConfig, Extrapolator, Flow, IntegrationError, OdeSystem, StepStats};
use crate::resonance::LatticePoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Galerkin {
    /// Every interaction with inputs and output on the given support.
    Exact,
    /// Only the ω₆ = 0 interactions on the given support.
    Resonant,
    /// The support S plus its convolution shell, keeping the interactions whose
    /// six frequencies (inputs and output) include at most one point outside S.
    Shell,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    /// j1, j2, j3 (holomorphic) and j4, j5 (conjugated), as mode indices.
    pub inputs: [u32; 5],
    pub mult: f64,
    pub omega: i64,
}

#[derive(Clone, Debug)]
pub struct InteractionTable {
    pub kind: Galerkin,
    pub support: Vec<LatticePoint>,
    /// Number of leading support points forming the core set S.
    pub core: usize,
    offsets: Vec<usize>,
    terms: Vec<Term>,
}

fn perms3(a: u32, b: u32, c: u32) -> f64 {
    match (a == b, b == c) {
        (true, true) => 1.0,
        (false, false) if a != c => 6.0,
        _ => 3.0,
    }
}

fn perms2(a: u32, b: u32) -> f64 {
    if a == b {
        1.0
    } else {
        2.0
    }
}

fn sorted3(mut v: [u32; 3]) -> [u32; 3] {
    v.sort_unstable();
    v
}

fn sorted2(mut v: [u32; 2]) -> [u32; 2] {
    v.sort_unstable();
    v
}

/// Unordered triples i ≤ j ≤ k of 0..n.
fn triples(n: u32) -> impl Iterator<Item = [u32; 3]> {
    (0..n).flat_map(move |i| (i..n).flat_map(move |j| (j..n).map(move |k| [i, j, k])))
}

fn pairs(n: u32) -> impl Iterator<Item = [u32; 2]> {
    (0..n).flat_map(move |i| (i..n).map(move |j| [i, j]))
}

impl InteractionTable {
    pub fn build(kind: Galerkin, support: &[LatticePoint]) -> Self {
        match kind {
            Galerkin::Exact => Self::on_support(kind, support, false),
            Galerkin::Resonant => Self::on_support(kind, support, true),
            Galerkin::Shell => Self::shell(support),
        }
    }

    fn on_support(kind: Galerkin, support: &[LatticePoint], resonant_only: bool) -> Self {
        let idx = index_of(support);
        let n = support.len() as u32;
        let p = |i: u32| &support[i as usize];
        let mut raw = Vec::new();
        let pair_list: Vec<[u32; 2]> = pairs(n).collect();
        for h in triples(n) {
            let (sx, sy) = (p(h[0]).x + p(h[1]).x + p(h[2]).x, p(h[0]).y + p(h[1]).y + p(h[2]).y);
            let w3 = p(h[0]).norm2 + p(h[1]).norm2 + p(h[2]).norm2;
            for c in &pair_list {
                let key = (sx - p(c[0]).x - p(c[1]).x, sy - p(c[0]).y - p(c[1]).y);
                let Some(&o) = idx.get(&key) else { continue };
                let omega = w3 - p(c[0]).norm2 - p(c[1]).norm2 - support[o].norm2;
                if resonant_only && omega != 0 {
                    continue;
                }
                raw.push((o, Term { inputs: [h[0], h[1], h[2], c[0], c[1]], mult: perms3(h[0], h[1], h[2]) * perms2(c[0], c[1]), omega }));
            }
        }
        Self::from_terms(kind, support.to_vec(), support.len(), raw)
    }

    fn shell(core: &[LatticePoint]) -> Self {
        let m = core.len() as u32;
        let pt = |k: (i64, i64)| LatticePoint::of(k.0, k.1);
        let core_idx = index_of(core);
        let mut support = core.to_vec();
        let mut outer: HashMap<(i64, i64), u32> = HashMap::new();
        let p = |s: &[LatticePoint], i: u32| s[i as usize].clone();
        let pair_list: Vec<[u32; 2]> = pairs(m).collect();
        let triple_list: Vec<[u32; 3]> = triples(m).collect();
        let mut raw = Vec::new();
        // All inputs in S; the output anywhere.
        let mut forcing = Vec::new();
        for h in &triple_list {
            for c in &pair_list {
                let (a, b, d) = (p(core, h[0]), p(core, h[1]), p(core, h[2]));
                let (e, f) = (p(core, c[0]), p(core, c[1]));
                let key = (a.x + b.x + d.x - e.x - f.x, a.y + b.y + d.y - e.y - f.y);
                let o = match core_idx.get(&key) {
                    Some(&o) => o as u32,
                    None => *outer.entry(key).or_insert_with(|| {
                        support.push(pt(key));
                        (support.len() - 1) as u32
                    }),
                };
                forcing.push((o, *h, *c));
            }
        }
        let w = |s: &[LatticePoint], i: u32| s[i as usize].norm2;
        for (o, h, c) in forcing {
            let omega = w(&support, h[0]) + w(&support, h[1]) + w(&support, h[2]) - w(&support, c[0]) - w(&support, c[1]) - w(&support, o);
            raw.push((o as usize, Term { inputs: [h[0], h[1], h[2], c[0], c[1]], mult: perms3(h[0], h[1], h[2]) * perms2(c[0], c[1]), omega }));
        }
        // Output in S with exactly one input in the shell.
        let shell_idx = &outer;
        let mut push = |o: u32, h: [u32; 3], c: [u32; 2]| {
            let (h, c) = (sorted3(h), sorted2(c));
            let omega = w(&support, h[0]) + w(&support, h[1]) + w(&support, h[2]) - w(&support, c[0]) - w(&support, c[1]) - w(&support, o);
            raw.push((o as usize, Term { inputs: [h[0], h[1], h[2], c[0], c[1]], mult: perms3(h[0], h[1], h[2]) * perms2(c[0], c[1]), omega }));
        };
        for o in 0..m {
            for c in &pair_list {
                for s in &pair_list {
                    // k = o + c4 + c5 − s1 − s2 in a holomorphic slot.
                    let (q, e, f, a, b) = (p(core, o), p(core, c[0]), p(core, c[1]), p(core, s[0]), p(core, s[1]));
                    let key = (q.x + e.x + f.x - a.x - b.x, q.y + e.y + f.y - a.y - b.y);
                    if let Some(&k) = shell_idx.get(&key) {
                        push(o, [k, s[0], s[1]], *c);
                    }
                }
            }
            for h in &triple_list {
                for s5 in 0..m {
                    // k = h1 + h2 + h3 − s5 − o in a conjugated slot.
                    let (a, b, d, e, q) = (p(core, h[0]), p(core, h[1]), p(core, h[2]), p(core, s5), p(core, o));
                    let key = (a.x + b.x + d.x - e.x - q.x, a.y + b.y + d.y - e.y - q.y);
                    if let Some(&k) = shell_idx.get(&key) {
                        push(o, *h, [k, s5]);
                    }
                }
            }
        }
        Self::from_terms(Galerkin::Shell, support, core.len(), raw)
    }

    fn from_terms(kind: Galerkin, support: Vec<LatticePoint>, core: usize, mut raw: Vec<(usize, Term)>) -> Self {
        raw.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.inputs.cmp(&b.1.inputs)));
        let outputs = raw.last().map_or(0, |r| r.0 + 1).max(support.len());
        let mut offsets = vec![0usize; outputs + 1];
        for (o, _) in &raw {
            offsets[o + 1] += 1;
        }
        for i in 0..outputs {
            offsets[i + 1] += offsets[i];
        }
        InteractionTable { kind, support, core, offsets, terms: raw.into_iter().map(|r| r.1).collect() }
    }

    /// The same support with only the terms satisfying `keep(output, term)`.
    pub fn filter(&self, keep: impl Fn(usize, &Term) -> bool) -> InteractionTable {
        let mut raw = Vec::new();
        for o in 0..self.len() {
            for term in self.terms_of(o) {
                if keep(o, term) {
                    raw.push((o, *term));
                }
            }
        }
        Self::from_terms(self.kind, self.support.clone(), self.core, raw)
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Number of stored (unordered) terms.
    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Number of ordered quintuples represented.
    pub fn n_ordered(&self) -> f64 {
        self.terms.iter().map(|t| t.mult).sum()
    }

    pub fn terms_of(&self, output: usize) -> &[Term] {
        &self.terms[self.offsets[output]..self.offsets[output + 1]]
    }

    pub fn is_resonant(&self) -> bool {
        self.terms.iter().all(|t| t.omega == 0)
    }

    /// (N(t)(a,…,a))_j for every support mode; `a` is indexed like `support`.
    pub fn apply(&self, t: f64, a: &[Complex64], out: &mut [Complex64]) {
        let rotate = !self.is_resonant_cached();
        let rot: Vec<Complex64> = if rotate {
            a.iter().zip(&self.support).map(|(z, k)| z * Complex64::from_polar(1.0, phase(k.norm2, t))).collect()
        } else {
            a.to_vec()
        };
        let conj: Vec<Complex64> = rot.iter().map(|z| z.conj()).collect();
        out.par_iter_mut().enumerate().for_each(|(o, slot)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for term in self.terms_of(o) {
                let [i1, i2, i3, i4, i5] = term.inputs.map(|i| i as usize);
                acc += rot[i1] * rot[i2] * rot[i3] * conj[i4] * conj[i5] * term.mult;
            }
            *slot = if rotate { acc * Complex64::from_polar(1.0, -phase(self.support[o].norm2, t)) } else { acc };
        });
    }

    fn is_resonant_cached(&self) -> bool {
        self.kind == Galerkin::Resonant
    }

    /// The support has no repeated points.
    pub fn closure_check(&self) -> bool {
        let set: HashSet<(i64, i64)> = self.support.iter().map(|k| (k.x, k.y)).collect();
        set.len() == self.support.len()
    }
}

fn phase(norm2: i64, t: f64) -> f64 {
    norm2 as f64 * t
}

/// The ODE ȧ = iN(t)(a,…,a) on the table's support, packed as (re, im) pairs.
pub struct NlsSystem<'a> {
    pub table: &'a InteractionTable,
}

impl OdeSystem<f64> for NlsSystem<'_> {
    fn dim(&self) -> usize {
        2 * self.table.len()
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let a = unpack(y);
        let mut n = vec![Complex64::new(0.0, 0.0); a.len()];
        self.table.apply(t, &a, &mut n);
        for (k, z) in n.iter().enumerate() {
            dy[2 * k] = -z.im;
            dy[2 * k + 1] = z.re;
        }
    }
}

pub fn pack(a: &[Complex64]) -> Vec<f64> {
    a.iter().flat_map(|z| [z.re, z.im]).collect()
}

pub fn unpack(y: &[f64]) -> Vec<Complex64> {
    y.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

#[derive(Clone, Debug)]
pub struct NlsTrajectory {
    pub kind: Galerkin,
    pub support: Vec<LatticePoint>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    /// L and M at each stored state.
    pub mass: Vec<f64>,
    pub momentum: Vec<(f64, f64)>,
    pub stats: StepStats,
}

impl NlsTrajectory {
    pub fn state(&self, i: usize) -> FourierState {
        FourierState::new(self.support.clone(), self.states[i].clone())
    }

    pub fn last(&self) -> FourierState {
        self.state(self.states.len() - 1)
    }

    pub fn mass_drift(&self) -> f64 {
        self.mass.iter().map(|l| (l - self.mass[0]).abs()).fold(0.0, f64::max)
    }

    pub fn momentum_drift(&self) -> f64 {
        let m0 = self.momentum[0];
        self.momentum.iter().map(|m| (m.0 - m0.0).abs().max((m.1 - m0.1).abs())).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct NlsOptions {
    pub tol: f64,
    /// Number of equal sampling intervals on [0, T].
    pub samples: usize,
    pub max_steps: usize,
}

impl Default for NlsOptions {
    fn default() -> Self {
        NlsOptions { tol: 1e-12, samples: 16, max_steps: 2_000_000 }
    }
}

/// Integrates from `a0` (on any support) through the table; amplitudes off
/// the table's support are dropped, missing ones start at zero.
pub fn integrate_table(table: &InteractionTable, a0: &FourierState, t_end: f64, opts: &NlsOptions) -> Result<NlsTrajectory, IntegrationError> {
    let idx = index_of(&table.support);
    let mut a = vec![Complex64::new(0.0, 0.0); table.len()];
    for (k, z) in a0.support.iter().zip(&a0.amps) {
        if let Some(&i) = idx.get(&(k.x, k.y)) {
            a[i] = *z;
        }
    }
    let scale = a0.amps.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let sys = NlsSystem { table };
    let mut cfg = ExtrapolationConfig::new(opts.tol, opts.tol * scale);
    cfg.max_steps = opts.max_steps;
    cfg.h_init = (t_end / 64.0).max(1e-12);
    let mut ig = Extrapolator::<f64>::new(cfg, 2 * table.len());
    let mut y = pack(&a);
    let mut traj = NlsTrajectory { kind: table.kind, support: table.support.clone(), times: vec![], states: vec![], mass: vec![], momentum: vec![], stats: StepStats::default() };
    let record = |t: f64, y: &[f64], tr: &mut NlsTrajectory| {
        let s = FourierState::new(table.support.clone(), unpack(y));
        tr.times.push(t);
        tr.mass.push(s.mass());
        tr.momentum.push(s.momentum());
        tr.states.push(s.amps);
    };
    record(0.0, &y, &mut traj);
    let samples = opts.samples.max(1);
    let mut t = 0.0;
    for i in 1..=samples {
        let t_next = t_end * i as f64 / samples as f64;
        t = ig.integrate(&sys, t, &mut y, t_next, |_, _| Flow::Continue)?;
        record(t, &y, &mut traj);
    }
    traj.stats = ig.stats;
    Ok(traj)
}

/// The Galerkin-truncated full system started from `a0`.
pub fn integrate_full_nls(a0: &FourierState, t_end: f64, galerkin: Galerkin, opts: &NlsOptions) -> Result<NlsTrajectory, IntegrationError> {
    let table = InteractionTable::build(galerkin, &a0.support);
    integrate_table(&table, a0, t_end, opts)
}

/// The resonant (ω₆ = 0) truncation on the support of `b0`.
pub fn integrate_resonant(b0: &FourierState, t_end: f64, opts: &NlsOptions) -> Result<NlsTrajectory, IntegrationError> {
    let table = InteractionTable::build(Galerkin::Resonant, &b0.support);
    integrate_table(&table, b0, t_end, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nls::multilinear::multilinear_n;

    fn sample() -> FourierState {
        let pts = vec![LatticePoint::of(0, 0), LatticePoint::of(1, 0), LatticePoint::of(0, 1), LatticePoint::of(1, 1), LatticePoint::of(-1, 2)];
        let amps = (0..pts.len()).map(|i| Complex64::from_polar(0.2 + 0.05 * i as f64, 0.7 * i as f64)).collect();
        FourierState::new(pts, amps)
    }

    #[test]
    fn exact_table_matches_direct_convolution() {
        let a = sample();
        let table = InteractionTable::build(Galerkin::Exact, &a.support);
        for &t in &[0.0, 0.37, 2.1] {
            let mut out = vec![Complex64::new(0.0, 0.0); a.len()];
            table.apply(t, &a.amps, &mut out);
            let direct = multilinear_n(t, [&a; 5], Some(&a.support));
            for (x, y) in out.iter().zip(&direct.amps) {
                assert!((x - y).norm() < 1e-13, "{x} vs {y}");
            }
        }
        assert_eq!(table.n_ordered(), ordered_count(&a.support));
    }

    fn ordered_count(s: &[LatticePoint]) -> f64 {
        let set: HashSet<(i64, i64)> = s.iter().map(|k| (k.x, k.y)).collect();
        let mut n = 0.0;
        for a in s {
            for b in s {
                for c in s {
                    for d in s {
                        for e in s {
                            if set.contains(&(a.x + b.x + c.x - d.x - e.x, a.y + b.y + c.y - d.y - e.y)) {
                                n += 1.0;
                            }
                        }
                    }
                }
            }
        }
        n
    }

    #[test]
    fn shell_forcing_equals_the_convolution_outside_the_core() {
        let a = sample();
        let table = InteractionTable::build(Galerkin::Shell, &a.support);
        assert!(table.closure_check());
        let mut full = vec![Complex64::new(0.0, 0.0); table.len()];
        let mut amps = a.amps.clone();
        amps.resize(table.len(), Complex64::new(0.0, 0.0));
        table.apply(0.4, &amps, &mut full);
        let direct = multilinear_n(0.4, [&a; 5], Some(&table.support));
        for (x, y) in full.iter().zip(&direct.amps) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn single_mode_rotates() {
        let a = FourierState::delta(LatticePoint::of(0, 0), Complex64::new(0.5, 0.0));
        for g in [Galerkin::Exact, Galerkin::Resonant] {
            let tr = integrate_full_nls(&a, 2.0, g, &NlsOptions::default()).unwrap();
            let z = tr.states.last().unwrap()[0];
            // ȧ = i|a|⁴a.
            let expect = Complex64::from_polar(0.5, 0.0625 * 2.0);
            assert!((z - expect).norm() < 1e-11, "{g:?}: {z}");
        }
    }
}
