//! Resonances, completeness and resonant vectors by exact enumeration.

use std::collections::{BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use thiserror::Error;

use super::lattice::{ExactInt, LatticePoint};
use super::vector::CoefficientVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResonanceKind {
    Trivial,
    Nontrivial,
    None,
}

fn sorted3<Z: ExactInt>(a: &LatticePoint<Z>, b: &LatticePoint<Z>, c: &LatticePoint<Z>) -> [LatticePoint<Z>; 3] {
    let mut t = [a.clone(), b.clone(), c.clone()];
    t.sort();
    t
}

/// Classifies a sextuple (k1, k2, k3; k4, k5, k6).
pub fn is_resonance<Z: ExactInt>(k: &[LatticePoint<Z>; 6]) -> ResonanceKind {
    let lhs = k[0].add(&k[1]).add(&k[2]);
    let rhs = k[3].add(&k[4]).add(&k[5]);
    let wl = k[0].norm2.clone() + k[1].norm2.clone() + k[2].norm2.clone();
    let wr = k[3].norm2.clone() + k[4].norm2.clone() + k[5].norm2.clone();
    if lhs != rhs || wl != wr {
        return ResonanceKind::None;
    }
    if sorted3(&k[0], &k[1], &k[2]) == sorted3(&k[3], &k[4], &k[5]) {
        ResonanceKind::Trivial
    } else {
        ResonanceKind::Nontrivial
    }
}

/// The k6 closing a resonance with the quintuple, when it exists.
pub fn complete_quintuple<Z: ExactInt>(q: &[LatticePoint<Z>; 5]) -> Option<LatticePoint<Z>> {
    let k6 = q[0].add(&q[1]).add(&q[2]).sub(&q[3]).sub(&q[4]);
    let w = q[0].norm2.clone() + q[1].norm2.clone() + q[2].norm2.clone() - q[3].norm2.clone() - q[4].norm2.clone();
    (w == k6.norm2).then_some(k6)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletenessReport<Z = i64> {
    pub complete: bool,
    /// Completions that fall outside the set, sorted and deduplicated.
    pub missing: Vec<LatticePoint<Z>>,
    pub quintuples_visited: u64,
}

fn distinct_points<Z: ExactInt>(points: &[LatticePoint<Z>]) -> Vec<LatticePoint<Z>> {
    let set: BTreeSet<_> = points.iter().cloned().collect();
    set.into_iter().collect()
}

/// Completeness by enumeration of sorted multisets {k1 ≤ k2 ≤ k3}, {k4 ≤ k5}.
///
/// Pairs are sorted by |k4|² + |k5|² so the inner loop stops as soon as the
/// required |k6|² would become negative.
pub fn is_complete<Z: ExactInt>(points: &[LatticePoint<Z>]) -> CompletenessReport<Z> {
    let pts = distinct_points(points);
    let m = pts.len();
    let members: HashSet<(Z, Z)> = pts.iter().map(|p| (p.x.clone(), p.y.clone())).collect();
    let mut pairs: Vec<(Z, Z, Z)> = Vec::with_capacity(m * (m + 1) / 2);
    for d in 0..m {
        for e in d..m {
            pairs.push((pts[d].x.clone() + pts[e].x.clone(), pts[d].y.clone() + pts[e].y.clone(), pts[d].norm2.clone() + pts[e].norm2.clone()));
        }
    }
    pairs.sort_by(|a, b| a.2.cmp(&b.2));
    let results: Vec<(BTreeSet<LatticePoint<Z>>, u64)> = (0..m)
        .into_par_iter()
        .map(|a| {
            let mut missing = BTreeSet::new();
            let mut visited = 0u64;
            for b in a..m {
                for c in b..m {
                    let tx = pts[a].x.clone() + pts[b].x.clone() + pts[c].x.clone();
                    let ty = pts[a].y.clone() + pts[b].y.clone() + pts[c].y.clone();
                    let tw = pts[a].norm2.clone() + pts[b].norm2.clone() + pts[c].norm2.clone();
                    for (px, py, pw) in &pairs {
                        if *pw > tw {
                            break;
                        }
                        visited += 1;
                        let dx = tx.clone() - px.clone();
                        let dy = ty.clone() - py.clone();
                        if dx.clone() * dx.clone() + dy.clone() * dy.clone() == tw.clone() - pw.clone() && !members.contains(&(dx.clone(), dy.clone())) {
                            missing.insert(LatticePoint::new(dx, dy));
                        }
                    }
                }
            }
            (missing, visited)
        })
        .collect();
    let mut missing = BTreeSet::new();
    let mut visited = 0;
    for (ms, v) in results {
        missing.extend(ms);
        visited += v;
    }
    CompletenessReport { complete: missing.is_empty(), missing: missing.into_iter().collect(), quintuples_visited: visited }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionPreservingError {
    #[error("set is not complete ({missing} missing completions)")]
    NotComplete { missing: usize },
}

/// `Ok(None)` if every internal resonance is trivial, `Ok(Some(witness))` otherwise.
pub fn nontrivial_resonance<Z: ExactInt>(points: &[LatticePoint<Z>]) -> Result<Option<[LatticePoint<Z>; 6]>, ActionPreservingError> {
    let rep = is_complete(points);
    if !rep.complete {
        return Err(ActionPreservingError::NotComplete { missing: rep.missing.len() });
    }
    let pts = distinct_points(points);
    let m = pts.len();
    let mut seen: HashMap<(Z, Z, Z), [usize; 3]> = HashMap::new();
    for a in 0..m {
        for b in a..m {
            for c in b..m {
                let key = (
                    pts[a].x.clone() + pts[b].x.clone() + pts[c].x.clone(),
                    pts[a].y.clone() + pts[b].y.clone() + pts[c].y.clone(),
                    pts[a].norm2.clone() + pts[b].norm2.clone() + pts[c].norm2.clone(),
                );
                if let Some(&[d, e, f]) = seen.get(&key) {
                    return Ok(Some([pts[a].clone(), pts[b].clone(), pts[c].clone(), pts[d].clone(), pts[e].clone(), pts[f].clone()]));
                }
                seen.insert(key, [a, b, c]);
            }
        }
    }
    Ok(None)
}

pub fn is_action_preserving<Z: ExactInt>(points: &[LatticePoint<Z>]) -> Result<bool, ActionPreservingError> {
    Ok(nontrivial_resonance(points)?.is_none())
}

/// Sparse nonnegative combinations of total weight `c` on distinct indices.
fn parts_of_total(m: usize, c: usize) -> Vec<Vec<(usize, i64)>> {
    let mut out = Vec::new();
    match c {
        1 => out.extend((0..m).map(|i| vec![(i, 1)])),
        2 => {
            out.extend((0..m).map(|i| vec![(i, 2)]));
            for i in 0..m {
                for j in i + 1..m {
                    out.push(vec![(i, 1), (j, 1)]);
                }
            }
        }
        3 => {
            out.extend((0..m).map(|i| vec![(i, 3)]));
            for i in 0..m {
                for j in 0..m {
                    if i != j {
                        out.push(vec![(i, 2), (j, 1)]);
                    }
                }
            }
            for i in 0..m {
                for j in i + 1..m {
                    for k in j + 1..m {
                        out.push(vec![(i, 1), (j, 1), (k, 1)]);
                    }
                }
            }
        }
        _ => unreachable!("parts of total weight above 3 are not needed"),
    }
    out
}

/// All resonant vectors with |λ| ≤ max_l1 (≤ 6), canonicalised up to sign and sorted.
///
/// A resonant λ splits into positive and negative parts with equal total weight
/// and equal lift sums Σ(v, |v|²); parts are bucketed by lift sum and paired.
pub fn enumerate_resonant_vectors<Z: ExactInt>(points: &[LatticePoint<Z>], max_l1: usize) -> Vec<CoefficientVector> {
    assert!(max_l1 <= 6, "resonant-vector enumeration is limited to |λ| ≤ 6");
    let m = points.len();
    let mut out = BTreeSet::new();
    for c in 1..=max_l1 / 2 {
        let parts = parts_of_total(m, c);
        let mut buckets: HashMap<(Z, Z, Z), Vec<usize>> = HashMap::new();
        for (k, part) in parts.iter().enumerate() {
            let v = CoefficientVector::from_pairs(part.iter().copied());
            buckets.entry(v.lift_sums(points)).or_default().push(k);
        }
        let mut keys: Vec<_> = buckets.into_values().filter(|b| b.len() > 1).collect();
        keys.sort();
        let found: Vec<BTreeSet<CoefficientVector>> = keys
            .par_iter()
            .map(|bucket| {
                let mut local = BTreeSet::new();
                for (x, &i) in bucket.iter().enumerate() {
                    for &j in &bucket[x + 1..] {
                        let (a, b) = (&parts[i], &parts[j]);
                        if a.iter().any(|(u, _)| b.iter().any(|(w, _)| u == w)) {
                            continue;
                        }
                        let lam = CoefficientVector::from_pairs(a.iter().copied().chain(b.iter().map(|&(w, k)| (w, -k))));
                        local.insert(lam.canonical());
                    }
                }
                local
            })
            .collect();
        for f in found {
            out.extend(f);
        }
    }
    out.into_iter().collect()
}
