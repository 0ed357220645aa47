//! The quintic multilinear operator N(t) by direct convolution.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::state::FourierState;
use crate::resonance::LatticePoint;

/// ω₆ = |j1|²+|j2|²+|j3|²−|j4|²−|j5|²−|j|².
pub fn omega6(k: [&LatticePoint; 5], j: &LatticePoint) -> i64 {
    k[0].norm2 + k[1].norm2 + k[2].norm2 - k[3].norm2 - k[4].norm2 - j.norm2
}

/// (N(t)(a,b,c,d,f))_j = Σ_{j1+j2+j3−j4−j5=j} a b c d̄ f̄ e^{iω₆t}.
///
/// With `output` the result is projected onto that support; otherwise it lives
/// on the full arising support, sorted lexicographically.
pub fn multilinear_n(t: f64, inputs: [&FourierState; 5], output: Option<&[LatticePoint]>) -> FourierState {
    let [a, b, c, d, f] = inputs;
    // Partial sums of the holomorphic triple.
    let mut abc: BTreeMap<(i64, i64), Vec<(i64, Complex64)>> = BTreeMap::new();
    for (ka, za) in a.support.iter().zip(&a.amps) {
        for (kb, zb) in b.support.iter().zip(&b.amps) {
            for (kc, zc) in c.support.iter().zip(&c.amps) {
                let key = (ka.x + kb.x + kc.x, ka.y + kb.y + kc.y);
                abc.entry(key).or_default().push((ka.norm2 + kb.norm2 + kc.norm2, za * zb * zc));
            }
        }
    }
    let mut df: BTreeMap<(i64, i64), Vec<(i64, Complex64)>> = BTreeMap::new();
    for (kd, zd) in d.support.iter().zip(&d.amps) {
        for (kf, zf) in f.support.iter().zip(&f.amps) {
            df.entry((kd.x + kf.x, kd.y + kf.y)).or_default().push((kd.norm2 + kf.norm2, (zd * zf).conj()));
        }
    }
    let targets: Vec<LatticePoint> = match output {
        Some(o) => o.to_vec(),
        None => {
            let mut set = std::collections::BTreeSet::new();
            for p in abc.keys() {
                for q in df.keys() {
                    set.insert((p.0 - q.0, p.1 - q.1));
                }
            }
            set.into_iter().map(|(x, y)| LatticePoint::of(x, y)).collect()
        }
    };
    let amps: Vec<Complex64> = targets
        .par_iter()
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (q, pairs) in &df {
                let Some(triples) = abc.get(&(j.x + q.0, j.y + q.1)) else { continue };
                for (w3, z3) in triples {
                    for (w2, z2) in pairs {
                        let w = w3 - w2 - j.norm2;
                        acc += z3 * z2 * Complex64::from_polar(1.0, w as f64 * t);
                    }
                }
            }
            acc
        })
        .collect();
    FourierState::new(targets, amps)
}

/// Only the ω₆ = 0 terms; independent of t.
pub fn resonant_n(inputs: [&FourierState; 5], output: Option<&[LatticePoint]>) -> FourierState {
    let [a, b, c, d, f] = inputs;
    let mut acc: BTreeMap<(i64, i64), Complex64> = BTreeMap::new();
    let allowed: Option<std::collections::HashSet<(i64, i64)>> = output.map(|o| o.iter().map(|k| (k.x, k.y)).collect());
    for (ka, za) in a.support.iter().zip(&a.amps) {
        for (kb, zb) in b.support.iter().zip(&b.amps) {
            for (kc, zc) in c.support.iter().zip(&c.amps) {
                for (kd, zd) in d.support.iter().zip(&d.amps) {
                    for (kf, zf) in f.support.iter().zip(&f.amps) {
                        let j = LatticePoint::of(ka.x + kb.x + kc.x - kd.x - kf.x, ka.y + kb.y + kc.y - kd.y - kf.y);
                        if omega6([ka, kb, kc, kd, kf], &j) != 0 {
                            continue;
                        }
                        if allowed.as_ref().is_some_and(|s| !s.contains(&(j.x, j.y))) {
                            continue;
                        }
                        *acc.entry((j.x, j.y)).or_default() += za * zb * zc * (zd * zf).conj();
                    }
                }
            }
        }
    }
    let support: Vec<LatticePoint> = match output {
        Some(o) => o.to_vec(),
        None => {
            let mut keys: Vec<_> = acc.keys().copied().collect();
            keys.sort();
            keys.into_iter().map(|(x, y)| LatticePoint::of(x, y)).collect()
        }
    };
    let amps = support.iter().map(|k| acc.get(&(k.x, k.y)).copied().unwrap_or_default()).collect();
    FourierState::new(support, amps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_mass_at_origin() {
        let a = FourierState::delta(LatticePoint::of(0, 0), Complex64::new(1.0, 0.0));
        let out = multilinear_n(0.7, [&a; 5], None);
        assert_eq!(out.support, vec![LatticePoint::of(0, 0)]);
        assert!((out.amps[0] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn single_mode_is_entirely_resonant() {
        let one = FourierState::delta(LatticePoint::of(2, -3), Complex64::new(0.5, 0.5));
        let full = multilinear_n(3.1, [&one; 5], None);
        let res = resonant_n([&one; 5], None);
        assert!((full.amps[0] - res.amps[0]).norm() < 1e-15);
    }
}
