//! Restricted resonant Hamiltonians: by enumeration, from the family structure, and
//! on the diagonal subspace.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use super::poly::{mass, rat, ratio, Monomial, PolynomialHamiltonian};
use crate::resonance::{is_complete, ExactInt, GenerationTable, LatticePoint, PlanarPoint};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HamiltonianError {
    #[error("set is not complete: {0} missing completions (first: {1})")]
    Incomplete(usize, String),
    #[error("monomial {0} is not gauge invariant")]
    NotGaugeInvariant(String),
    #[error("Hamiltonian is not real-valued")]
    NotReal,
}

/// Number of distinct orderings of a sorted triple.
fn orderings(t: &[usize; 3]) -> i64 {
    match (t[0] == t[1], t[1] == t[2]) {
        (true, true) => 1,
        (false, false) => 6,
        _ => 3,
    }
}

/// (1/3) Σ β_{j1}β_{j2}β_{j3}β̄_{j4}β̄_{j5}β̄_{j6} over ordered resonant sextuples in S.
///
/// Sorted triples are bucketed by (Σk, Σ|k|²); every ordered pair of triples in a
/// bucket is a resonance, contributing ord(M1)·ord(M2)/3.
pub fn restricted_hamiltonian<Z: ExactInt>(points: &[LatticePoint<Z>]) -> Result<PolynomialHamiltonian, HamiltonianError> {
    let rep = is_complete(points);
    if !rep.complete {
        return Err(HamiltonianError::Incomplete(rep.missing.len(), rep.missing[0].to_string()));
    }
    Ok(resonant_sum(points))
}

/// The same sum without the completeness precondition.
pub fn resonant_sum<Z: ExactInt>(points: &[LatticePoint<Z>]) -> PolynomialHamiltonian {
    let m = points.len();
    let mut buckets: HashMap<(Z, Z, Z), Vec<[usize; 3]>> = HashMap::new();
    for a in 0..m {
        for b in a..m {
            for c in b..m {
                let key = (
                    points[a].x.clone() + points[b].x.clone() + points[c].x.clone(),
                    points[a].y.clone() + points[b].y.clone() + points[c].y.clone(),
                    points[a].norm2.clone() + points[b].norm2.clone() + points[c].norm2.clone(),
                );
                buckets.entry(key).or_default().push([a, b, c]);
            }
        }
    }
    let mut h = PolynomialHamiltonian::zero();
    let third = ratio(1, 3);
    for triples in buckets.values() {
        for t1 in triples {
            for t2 in triples {
                let c = rat(orderings(t1) * orderings(t2)) * &third;
                h.add_term(Monomial::from_indices(t1, t2), c);
            }
        }
    }
    h
}

/// (1/3)(Σ|β_j|⁶ + 9Σ_{j≠k}|β_j|⁴|β_k|² + 36Σ_{j<k<m}|β_j|²|β_k|²|β_m|²) on variables 0..m.
pub fn action_hamiltonian(m: usize) -> PolynomialHamiltonian {
    let mut h = PolynomialHamiltonian::zero();
    let third = ratio(1, 3);
    for j in 0..m {
        h.add_term(Monomial::action(j, 3), third.clone());
        for k in 0..m {
            if k != j {
                h.add_term(Monomial::from_factors([(j, 2, 2), (k, 1, 1)]), rat(3));
            }
        }
        for k in j + 1..m {
            for l in k + 1..m {
                h.add_term(Monomial::from_factors([(j, 1, 1), (k, 1, 1), (l, 1, 1)]), rat(12));
            }
        }
    }
    h
}

/// The generation-set Hamiltonian assembled from the family table: action part,
/// family terms weighted by the masses, and the six-point terms across three generations.
pub fn generation_set_hamiltonian<P: PlanarPoint>(set: &GenerationTable<P>) -> PolynomialHamiltonian {
    let m = set.len();
    let mut h = action_hamiltonian(m);
    for j in 0..m {
        let g = set.generation_of(j);
        if g < set.n_generations() {
            let f = set.parent_family(j).expect("every non-final element is a parent");
            let sp = set.spouse(j).expect("spouse");
            let core = PolynomialHamiltonian::monomial(Monomial::from_indices(&[j, sp], &f.children), rat(3));
            let core = core.clone() + core.conj();
            let mut weight = PolynomialHamiltonian::zero();
            for k in 0..m {
                let c = if f.contains(k) { 1 } else { 2 };
                weight.add_term(Monomial::action(k, 1), rat(c));
            }
            h = h + core * weight;
        }
        if g >= 2 && g < set.n_generations() {
            let pf = set.child_family(j).expect("child family");
            let sib = set.sibling(j).expect("sibling");
            let sp = set.spouse(j).expect("spouse");
            let cf = set.parent_family(j).expect("parent family");
            let t = Monomial::from_indices(&[pf.parents[0], pf.parents[1], sp], &[sib, cf.children[0], cf.children[1]]);
            h.add_term(t.conj(), rat(12));
            h.add_term(t, rat(12));
        }
    }
    h
}

/// (3/n)·H|_D with β_k = b_{gen(k)}, and the same minus the Casimir 6n²J³.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalRestriction {
    pub full: PolynomialHamiltonian,
    pub reduced: PolynomialHamiltonian,
}

/// `generation[k]` is the 1-based generation of variable k; b_i becomes variable i−1.
pub fn diagonal_restriction(h: &PolynomialHamiltonian, generation: &[usize], n: usize) -> DiagonalRestriction {
    let full = h.substitute(|v| generation[v] - 1).scale(&ratio(3, n as i64));
    let n_gen = generation.iter().copied().max().unwrap_or(0);
    let j = mass(0..n_gen);
    let casimir = (j.clone() * j.clone() * j).scale(&rat(6 * (n * n) as i64));
    let reduced = full.clone() - casimir;
    DiagonalRestriction { full, reduced }
}

/// P_k = b_k² b̄_{k+1}² + b_{k+1}² b̄_k² on variables (k, k+1).
fn exchange(k: usize, l: usize) -> PolynomialHamiltonian {
    PolynomialHamiltonian::monomial(Monomial::from_factors([(k, 2, 0), (l, 0, 2)]), rat(1)) + PolynomialHamiltonian::monomial(Monomial::from_factors([(l, 2, 0), (k, 0, 2)]), rat(1))
}

/// 3h for the toy model on N modes with n elements per generation (variables 0..N).
pub fn toy_hamiltonian_3h(n_gen: usize, n: usize) -> PolynomialHamiltonian {
    let nn = n as i64;
    let mut h = PolynomialHamiltonian::zero();
    for k in 0..n_gen {
        h.add_term(Monomial::action(k, 3), rat(4));
    }
    let mut bracket = PolynomialHamiltonian::zero();
    for k in 0..n_gen {
        bracket.add_term(Monomial::action(k, 2), rat(1));
    }
    for k in 0..n_gen.saturating_sub(1) {
        bracket = bracket - exchange(k, k + 1).scale(&rat(2));
    }
    h = h - (mass(0..n_gen) * bracket).scale(&rat(9 * nn));
    for k in 0..n_gen.saturating_sub(1) {
        let w = PolynomialHamiltonian::monomial(Monomial::action(k, 1), rat(-18)) + PolynomialHamiltonian::monomial(Monomial::action(k + 1, 1), rat(-18));
        h = h + w * exchange(k, k + 1);
    }
    for k in 1..n_gen.saturating_sub(1) {
        h = h + PolynomialHamiltonian::monomial(Monomial::action(k, 1), rat(36)) * exchange(k - 1, k + 1);
    }
    h
}

/// 3h restricted to two adjacent modes (variables 0 and 1).
pub fn two_generation_3h(n: usize) -> PolynomialHamiltonian {
    toy_hamiltonian_3h(2, n)
}

pub fn is_zero_polynomial(h: &PolynomialHamiltonian) -> bool {
    h.terms().all(|(_, c)| c.is_zero())
}

/// Σ_k k_x|β_k|² and Σ_k k_y|β_k|².
pub fn momentum<Z: ExactInt>(points: &[LatticePoint<Z>]) -> (PolynomialHamiltonian, PolynomialHamiltonian) {
    let mut px = PolynomialHamiltonian::zero();
    let mut py = PolynomialHamiltonian::zero();
    for (v, p) in points.iter().enumerate() {
        px.add_term(Monomial::action(v, 1), BigRational::from_integer(p.x.to_bigint()));
        py.add_term(Monomial::action(v, 1), BigRational::from_integer(p.y.to_bigint()));
    }
    (px, py)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_toy() {
        let h = toy_hamiltonian_3h(1, 8);
        assert_eq!(h, PolynomialHamiltonian::monomial(Monomial::action(0, 3), rat(4 - 72)));
    }

    #[test]
    fn action_preserving_pair() {
        // Two distinct points never resonate nontrivially.
        let pts = [LatticePoint::of(1, 0), LatticePoint::of(0, 3)];
        let h = restricted_hamiltonian(&pts).unwrap();
        assert_eq!(h, action_hamiltonian(2));
    }

    #[test]
    fn incomplete_is_rejected() {
        let pts = [LatticePoint::of(0, 0), LatticePoint::of(2, 2), LatticePoint::of(2, 0)];
        assert!(matches!(restricted_hamiltonian(&pts), Err(HamiltonianError::Incomplete(..))));
    }
}
