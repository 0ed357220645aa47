//! Incoming, ricochet and outgoing targets around T_j and their weighted semi-metrics.

use num_complex::Complex64;
use serde::Serialize;

use super::frame::{diagonalize_hyperbolic, to_local, FrameError, LocalState};

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TargetKind {
    Incoming,
    Ricochet,
    Outgoing,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TargetSpec {
    pub kind: TargetKind,
    /// 1-based index of the periodic orbit.
    pub j: usize,
    pub n: f64,
    /// Arrival/departure amplitude σ.
    pub sigma: f64,
    /// Time scale T; larger T means tighter targets.
    pub big_t: f64,
    /// Radius r (r⁰, r⁺ for the other kinds).
    pub radius: f64,
    /// Exponent A in R = T^A.
    pub exponent: f64,
}

impl TargetSpec {
    pub fn threshold(&self) -> f64 {
        self.big_t.powf(self.exponent)
    }
}

/// One weighted term of the semi-metric.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Component {
    pub name: String,
    pub weight: f64,
    /// Unweighted distance from x to the nearest admissible value.
    pub residual: f64,
}

impl Component {
    pub fn weighted(&self) -> f64 {
        self.weight * self.residual
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TargetReport {
    pub components: Vec<Component>,
    pub distance: f64,
    pub threshold: f64,
    pub member: bool,
}

/// What the target prescribes for one group of coordinates.
enum Rule {
    /// Complex modes in the list vanish.
    Zero(Vec<usize>),
    /// Complex modes in the list lie in the ball of the given radius.
    Ball(Vec<usize>, f64),
    /// The real hyperbolic coordinate of a mode equals a value.
    Plus(usize, f64),
    Minus(usize, f64),
    /// |c⁺| of a mode is bounded.
    PlusBall(usize, f64),
}

fn residual(rule: &Rule, s: &LocalState, n: f64) -> f64 {
    let norm = |ks: &[usize]| ks.iter().map(|&k| s.mode(k).norm_sqr()).sum::<f64>().sqrt();
    match rule {
        Rule::Zero(ks) => norm(ks),
        Rule::Ball(ks, r) => (norm(ks) - r).max(0.0),
        Rule::Plus(k, v) => (diagonalize_hyperbolic(s.mode(*k), n).plus - v).abs(),
        Rule::Minus(k, v) => (diagonalize_hyperbolic(s.mode(*k), n).minus - v).abs(),
        Rule::PlusBall(k, r) => (diagonalize_hyperbolic(s.mode(*k), n).plus.abs() - r).max(0.0),
    }
}

fn rules(spec: &TargetSpec, n_gen: usize) -> Vec<(String, f64, Rule)> {
    let j = spec.j;
    let t = spec.big_t;
    let w = |m: f64| (m * SQRT3 * t).exp();
    let decay = |m: f64| spec.radius * (-m * SQRT3 * t).exp();
    let below = |top: usize| (1..=top).collect::<Vec<_>>();
    let above = |bottom: usize| (bottom..=n_gen).collect::<Vec<_>>();
    let has = |k: usize| k >= 1 && k <= n_gen && k != j;
    let mut out = Vec::new();
    let mut push = |name: String, weight: f64, rule: Rule| out.push((name, weight, rule));
    match spec.kind {
        TargetKind::Incoming => {
            if j >= 3 {
                push(format!("c_<={}", j - 2), w(2.0), Rule::Zero(below(j - 2)));
            }
            if j >= 2 {
                push(format!("c-_{}", j - 1), w(1.0), Rule::Minus(j - 1, spec.sigma));
                push(format!("c+_{}", j - 1), w(4.0), Rule::Plus(j - 1, 0.0));
            }
            if j < n_gen {
                push(format!("c_>={}", j + 1), w(3.0), Rule::Ball(above(j + 1), decay(2.0)));
            }
        }
        TargetKind::Ricochet => {
            if j >= 3 {
                push(format!("c_<={}", j - 2), w(2.0), Rule::Zero(below(j - 2)));
            }
            if has(j + 1) {
                push(format!("c+_{}", j + 1), w(2.0), Rule::PlusBall(j + 1, decay(1.0)));
                push(format!("c-_{}", j + 1), w(3.0), Rule::Minus(j + 1, 0.0));
            }
            if j >= 2 {
                push(format!("c-_{}", j - 1), w(1.0), Rule::Minus(j - 1, 0.0));
                push(format!("c+_{}", j - 1), w(3.0), Rule::Plus(j - 1, 0.0));
            }
            if j + 2 <= n_gen {
                push(format!("c_>={}", j + 2), w(3.0), Rule::Ball(above(j + 2), decay(2.0)));
            }
        }
        TargetKind::Outgoing => {
            if j >= 2 {
                push(format!("c_<={}", j - 1), w(2.0), Rule::Zero(below(j - 1)));
            }
            if has(j + 1) {
                push(format!("c-_{}", j + 1), w(4.0), Rule::Minus(j + 1, 0.0));
                push(format!("c+_{}", j + 1), w(1.0), Rule::Plus(j + 1, spec.sigma));
            }
            if j + 2 <= n_gen {
                push(format!("c_>={}", j + 2), w(3.0), Rule::Ball(above(j + 2), decay(2.0)));
            }
        }
    }
    out
}

/// Distance from a local state to the target in the weighted semi-metric.
pub fn target_distance(spec: &TargetSpec, s: &LocalState) -> TargetReport {
    assert_eq!(s.j, spec.j, "state is expressed around T_{}, target is at T_{}", s.j, spec.j);
    let n_gen = s.c.len() + 1;
    let components: Vec<Component> = rules(spec, n_gen)
        .into_iter()
        .map(|(name, weight, rule)| Component { name, weight, residual: residual(&rule, s, spec.n) })
        .collect();
    let distance = components.iter().map(Component::weighted).sum();
    let threshold = spec.threshold();
    TargetReport { components, distance, threshold, member: distance < threshold }
}

/// Membership of a full state b in the R-neighbourhood of the target.
pub fn target_membership(spec: &TargetSpec, b: &[Complex64]) -> Result<TargetReport, FrameError> {
    Ok(target_distance(spec, &to_local(b, spec.j)?))
}

#[cfg(test)]
mod tests {
    use super::super::frame::{from_local, undiagonalize, Hyperbolic};
    use super::*;

    fn spec(kind: TargetKind) -> TargetSpec {
        TargetSpec { kind, j: 3, n: 4.0, sigma: 1e-2, big_t: 2.0, radius: 1.0, exponent: 1.0 }
    }

    fn base(kind: TargetKind) -> LocalState {
        let mut c = vec![Complex64::new(0.0, 0.0); 5];
        let s = spec(kind);
        match kind {
            TargetKind::Incoming => c[1] = undiagonalize(Hyperbolic { plus: 0.0, minus: s.sigma }, s.n),
            TargetKind::Outgoing => c[2] = undiagonalize(Hyperbolic { plus: s.sigma, minus: 0.0 }, s.n),
            TargetKind::Ricochet => {}
        }
        LocalState { j: 3, mass: 1.0, theta: 0.3, c }
    }

    #[test]
    fn base_points_are_members() {
        for kind in [TargetKind::Incoming, TargetKind::Ricochet, TargetKind::Outgoing] {
            let r = target_distance(&spec(kind), &base(kind));
            assert!(r.member);
            assert!(r.distance < 1e-12, "{kind:?}: {r:?}");
        }
    }

    #[test]
    fn weights_scale_perturbations() {
        let s = spec(TargetKind::Incoming);
        let mut x = base(TargetKind::Incoming);
        let e = 1e-9;
        let h = diagonalize_hyperbolic(x.c[1], s.n);
        x.c[1] = undiagonalize(Hyperbolic { plus: h.plus + e, ..h }, s.n);
        let r = target_distance(&s, &x);
        let c = r.components.iter().find(|c| c.name == "c+_2").unwrap();
        let expect = (4.0 * SQRT3 * s.big_t).exp() * e;
        assert!((c.weighted() - expect).abs() < 1e-6 * expect);
        // Round trip through full coordinates.
        let b = from_local(&x).unwrap();
        let again = target_membership(&s, &b).unwrap();
        assert!((again.distance - r.distance).abs() < 1e-6 * r.distance);
    }

    #[test]
    fn far_state_is_not_member() {
        let s = spec(TargetKind::Outgoing);
        let mut x = base(TargetKind::Outgoing);
        x.c[0] = Complex64::new(0.1, 0.0);
        assert!(!target_distance(&s, &x).member);
    }
}
