//! Non-degeneracy certificate, resonant-vector classification and family-rank checks.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use super::genset::{Family, GenerationSet, StructuralError};
use super::lattice::{ExactInt, LatticePoint};
use super::search::{enumerate_resonant_vectors, is_complete};
use super::vector::CoefficientVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WitnessClass {
    Case1,
    Case2,
    Case3,
    Case4,
    Forbidden,
}

impl fmt::Display for WitnessClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessClass::Case1 => "case1",
            WitnessClass::Case2 => "case2",
            WitnessClass::Case3 => "case3",
            WitnessClass::Case4 => "case4",
            WitnessClass::Forbidden => "forbidden",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Nondegenerate,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NondegeneracyReport {
    pub status: Status,
    pub witnesses: Vec<(CoefficientVector, WitnessClass)>,
}

impl NondegeneracyReport {
    pub fn count(&self, class: WitnessClass) -> usize {
        self.witnesses.iter().filter(|(_, c)| *c == class).count()
    }

    pub fn forbidden(&self) -> impl Iterator<Item = &CoefficientVector> {
        self.witnesses.iter().filter(|(_, c)| *c == WitnessClass::Forbidden).map(|(v, _)| v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ResonantClass {
    Family,
    CF,
    Other,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("vector {0} is not resonant for the set")]
    NotResonant(String),
}

/// Lookup tables of family vectors, CF vectors and the |λ| = 5 shapes of cases 3 and 4.
pub struct ResonanceCatalog {
    families: Vec<Family>,
    family_vecs: HashMap<CoefficientVector, usize>,
    cf_vecs: HashMap<CoefficientVector, (usize, usize)>,
    case3: BTreeSet<CoefficientVector>,
    case4: BTreeSet<CoefficientVector>,
}

impl ResonanceCatalog {
    pub fn new(families: &[Family], n_points: usize) -> Self {
        let vecs: Vec<CoefficientVector> = families.iter().map(|f| f.vector()).collect();
        let family_vecs = vecs.iter().enumerate().map(|(i, v)| (v.canonical(), i)).collect();
        let mut cf_vecs = HashMap::new();
        for i in 0..families.len() {
            for j in i + 1..families.len() {
                if families[i].members().iter().any(|&v| families[j].contains(v)) {
                    let s = vecs[i].add(&vecs[j]);
                    if s.l1() <= 6 {
                        cf_vecs.insert(s.canonical(), (i, j));
                    }
                }
            }
        }
        let mut case3 = BTreeSet::new();
        for v in &vecs {
            for sv in [v.clone(), v.neg()] {
                for e in 0..n_points {
                    let w = sv.add(&CoefficientVector::indicator(e));
                    if w.l1() == 5 {
                        case3.insert(w);
                    }
                }
            }
        }
        let mut case4 = BTreeSet::new();
        for c in cf_vecs.keys() {
            for sc in [c.clone(), c.neg()] {
                for (e, coef) in sc.iter() {
                    if coef < 0 {
                        let w = sc.add(&CoefficientVector::indicator(e));
                        if w.l1() == 5 {
                            case4.insert(w);
                        }
                    }
                }
            }
        }
        ResonanceCatalog { families: families.to_vec(), family_vecs, cf_vecs, case3, case4 }
    }

    pub fn is_family_vector(&self, v: &CoefficientVector) -> Option<usize> {
        self.family_vecs.get(&v.canonical()).copied()
    }

    pub fn is_cf_vector(&self, v: &CoefficientVector) -> Option<(usize, usize)> {
        self.cf_vecs.get(&v.canonical()).copied()
    }

    /// Case analysis of a witness λ with Σλ = 1, |λ| ≤ 5 and vanishing quadratic defect.
    pub fn classify_witness(&self, lam: &CoefficientVector) -> WitnessClass {
        match lam.l1() {
            1 => WitnessClass::Case1,
            3 => {
                let pos: Vec<usize> = lam.iter().filter(|(_, c)| *c == 1).map(|(i, _)| i).collect();
                let neg: Vec<usize> = lam.iter().filter(|(_, c)| *c == -1).map(|(i, _)| i).collect();
                if pos.len() == 2 && neg.len() == 1 {
                    let ok = self.families.iter().any(|f| {
                        let same = |a: [usize; 2]| a.contains(&pos[0]) && a.contains(&pos[1]);
                        (same(f.parents) && f.children.contains(&neg[0])) || (same(f.children) && f.parents.contains(&neg[0]))
                    });
                    if ok {
                        return WitnessClass::Case2;
                    }
                }
                WitnessClass::Forbidden
            }
            5 if self.case3.contains(lam) => WitnessClass::Case3,
            5 if self.case4.contains(lam) => WitnessClass::Case4,
            _ => WitnessClass::Forbidden,
        }
    }
}

/// Descending coefficient patterns with Σ = 1 and l1 ∈ {1, 3, 5}.
const WITNESS_PATTERNS: &[&[i64]] = &[
    &[1],
    &[2, -1],
    &[1, 1, -1],
    &[3, -2],
    &[3, -1, -1],
    &[2, 1, -2],
    &[2, 1, -1, -1],
    &[1, 1, 1, -2],
    &[1, 1, 1, -1, -1],
];

struct Flat<Z> {
    x: Vec<Z>,
    y: Vec<Z>,
    w: Vec<Z>,
}

fn flatten<Z: ExactInt>(points: &[LatticePoint<Z>]) -> Flat<Z> {
    Flat { x: points.iter().map(|p| p.x.clone()).collect(), y: points.iter().map(|p| p.y.clone()).collect(), w: points.iter().map(|p| p.norm2.clone()).collect() }
}

#[allow(clippy::too_many_arguments)]
fn dfs<Z: ExactInt>(flat: &Flat<Z>, pat: &[i64], zs: &[Z], pos: usize, chosen: &mut Vec<usize>, sx: Z, sy: Z, sw: Z, out: &mut Vec<CoefficientVector>) {
    let m = flat.x.len();
    let start = if pos > 0 && pat[pos] == pat[pos - 1] { chosen[pos - 1] + 1 } else { 0 };
    let c = &zs[pos];
    let last = pos + 1 == pat.len();
    for v in start..m {
        if chosen.contains(&v) {
            continue;
        }
        let nx = sx.clone() + c.clone() * flat.x[v].clone();
        let ny = sy.clone() + c.clone() * flat.y[v].clone();
        let nw = sw.clone() + c.clone() * flat.w[v].clone();
        if last {
            if nw == nx.clone() * nx + ny.clone() * ny {
                chosen.push(v);
                out.push(CoefficientVector::from_pairs(chosen.iter().zip(pat).map(|(&i, &c)| (i, c))));
                chosen.pop();
            }
        } else {
            chosen.push(v);
            dfs(flat, pat, zs, pos + 1, chosen, nx, ny, nw, out);
            chosen.pop();
        }
    }
}

/// All λ with Σλ = 1, |λ| ≤ 5 and Σλ|v|² = |Σλv|², sorted.
pub fn defect_zero_vectors<Z: ExactInt>(points: &[LatticePoint<Z>]) -> Vec<CoefficientVector> {
    let flat = flatten(points);
    let m = points.len();
    let mut all: Vec<CoefficientVector> = WITNESS_PATTERNS
        .iter()
        .flat_map(|pat| {
            let zs: Vec<Z> = pat.iter().map(|&c| Z::from(c as i32)).collect();
            let flat = &flat;
            (0..m)
                .into_par_iter()
                .map(move |first| {
                    let mut out = Vec::new();
                    let mut chosen = vec![first];
                    let c = &zs[0];
                    let (sx, sy, sw) = (c.clone() * flat.x[first].clone(), c.clone() * flat.y[first].clone(), c.clone() * flat.w[first].clone());
                    if pat.len() == 1 {
                        if sw == sx.clone() * sx + sy.clone() * sy {
                            out.push(CoefficientVector::indicator(first));
                        }
                    } else {
                        dfs(flat, pat, &zs, 1, &mut chosen, sx, sy, sw, &mut out);
                    }
                    out
                })
                .collect::<Vec<_>>()
                .into_iter()
                .flatten()
                .collect::<Vec<_>>()
        })
        .collect();
    all.sort();
    all.dedup();
    all
}

/// Exhaustive non-degeneracy check over |λ| ≤ 5.
pub fn check_nondegeneracy<Z: ExactInt>(set: &GenerationSet<Z>) -> Result<NondegeneracyReport, StructuralError> {
    set.structural_check()?;
    let catalog = ResonanceCatalog::new(set.families(), set.len());
    let witnesses: Vec<_> = defect_zero_vectors(set.points()).into_iter().map(|w| {
        let c = catalog.classify_witness(&w);
        (w, c)
    }).collect();
    let status = if witnesses.iter().any(|(_, c)| *c == WitnessClass::Forbidden) { Status::Degenerate } else { Status::Nondegenerate };
    Ok(NondegeneracyReport { status, witnesses })
}

pub fn classify_resonant_vector<Z: ExactInt>(lam: &CoefficientVector, set: &GenerationSet<Z>) -> Result<ResonantClass, ClassifyError> {
    classify_with(lam, set.points(), &ResonanceCatalog::new(set.families(), set.len()))
}

pub fn classify_with<Z: ExactInt>(lam: &CoefficientVector, points: &[LatticePoint<Z>], catalog: &ResonanceCatalog) -> Result<ResonantClass, ClassifyError> {
    if lam.is_zero() || !lam.is_resonant(points) {
        return Err(ClassifyError::NotResonant(lam.to_string()));
    }
    Ok(if catalog.is_family_vector(lam).is_some() {
        ResonantClass::Family
    } else if catalog.is_cf_vector(lam).is_some() {
        ResonantClass::CF
    } else {
        ResonantClass::Other
    })
}

/// Verdict on one combination R_α = Σ α_i λ^{F_i}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmallSupportVerdict {
    /// Support larger than the bound; outside the scope of the check.
    Excluded,
    MultipleOfFamily,
    MultipleOfCF,
    Counterexample,
}

pub fn combination(families: &[Family], alpha: &[(usize, i64)]) -> CoefficientVector {
    alpha.iter().fold(CoefficientVector::new(), |acc, &(i, a)| acc.add(&families[i].vector().scale(a)))
}

pub fn classify_combination(catalog: &ResonanceCatalog, r: &CoefficientVector, max_support: usize) -> SmallSupportVerdict {
    if r.support_len() > max_support || r.is_zero() {
        return SmallSupportVerdict::Excluded;
    }
    let base = r.scale(1).canonical();
    let g = base.content();
    let prim = CoefficientVector::from_pairs(base.iter().map(|(i, c)| (i, c / g)));
    if catalog.is_family_vector(&prim).is_some() {
        SmallSupportVerdict::MultipleOfFamily
    } else if catalog.is_cf_vector(&prim).is_some() {
        SmallSupportVerdict::MultipleOfCF
    } else {
        SmallSupportVerdict::Counterexample
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SmallSupportReport {
    pub combinations_checked: usize,
    /// Combinations with support ≤ bound that are not multiples of a family or CF vector.
    pub counterexamples: Vec<(Vec<(usize, i64)>, CoefficientVector)>,
    /// Smallest support seen among combinations of three or more families.
    pub min_support_three_or_more: Option<usize>,
}

impl SmallSupportReport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Connected family subsets of size ≤ `max_families`, in the graph where two
/// families are adjacent when they share a member. Disconnected combinations
/// always have support ≥ 8: every component keeps its oldest parents and
/// youngest children.
fn connected_subsets(families: &[Family], max_families: usize) -> Vec<Vec<usize>> {
    let nf = families.len();
    let adj: Vec<Vec<usize>> = (0..nf).map(|i| (0..nf).filter(|&j| j != i && families[i].members().iter().any(|&v| families[j].contains(v))).collect()).collect();
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut frontier: Vec<Vec<usize>> = (0..nf).map(|i| vec![i]).collect();
    found.extend(frontier.iter().cloned());
    for _ in 1..max_families {
        let mut next = BTreeSet::new();
        for s in &frontier {
            for &i in s {
                for &j in &adj[i] {
                    if !s.contains(&j) {
                        let mut t = s.clone();
                        t.push(j);
                        t.sort_unstable();
                        if !found.contains(&t) {
                            next.insert(t);
                        }
                    }
                }
            }
        }
        found.extend(next.iter().cloned());
        frontier = next.into_iter().collect();
    }
    found.into_iter().collect()
}

/// Checks every R_α with 1 ≤ |α_i| ≤ 2 on connected subsets of up to
/// `max_families` families and support ≤ `max_support`.
pub fn verify_small_support_classification<Z: ExactInt>(set: &GenerationSet<Z>, max_support: usize, max_families: usize) -> SmallSupportReport {
    let fams = set.families();
    let catalog = ResonanceCatalog::new(fams, set.len());
    let mut report = SmallSupportReport::default();
    const COEFFS: [i64; 4] = [1, -1, 2, -2];
    for subset in connected_subsets(fams, max_families) {
        let k = subset.len();
        // The first coefficient is taken positive: R and −R are the same relation.
        let total = 2 * 4usize.pow(k as u32 - 1);
        for code in 0..total {
            let mut c = code;
            let mut alpha = Vec::with_capacity(k);
            for (pos, &f) in subset.iter().enumerate() {
                let a = if pos == 0 {
                    let a = [1, 2][c % 2];
                    c /= 2;
                    a
                } else {
                    let a = COEFFS[c % 4];
                    c /= 4;
                    a
                };
                alpha.push((f, a));
            }
            let r = combination(fams, &alpha);
            report.combinations_checked += 1;
            if k >= 3 {
                let s = r.support_len();
                report.min_support_three_or_more = Some(report.min_support_three_or_more.map_or(s, |m: usize| m.min(s)));
            }
            if classify_combination(&catalog, &r, max_support) == SmallSupportVerdict::Counterexample {
                report.counterexamples.push((alpha, r));
            }
        }
    }
    report
}

/// Rank over Q of a list of sparse vectors (exact elimination).
pub fn rank_of_vectors(vectors: &[CoefficientVector]) -> usize {
    let mut rows: Vec<BTreeMap<usize, BigRational>> =
        vectors.iter().map(|v| v.iter().map(|(i, c)| (i, BigRational::from_integer(BigInt::from(c)))).collect()).collect();
    let mut rank = 0;
    let mut r = 0;
    while r < rows.len() {
        let Some((&pivot_col, pivot_val)) = rows[r].iter().next().map(|(k, v)| (k, v.clone())) else {
            rows.swap_remove(r);
            continue;
        };
        let pivot_row = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k == r {
                continue;
            }
            if let Some(f) = row.get(&pivot_col).cloned() {
                let f = f / &pivot_val;
                for (col, val) in &pivot_row {
                    let e = row.entry(*col).or_insert_with(BigRational::zero);
                    *e -= &f * val;
                    if e.is_zero() {
                        row.remove(col);
                    }
                }
            }
        }
        rank += 1;
        r += 1;
    }
    rank
}

/// (full rank?, rank) for the family vectors of the set.
pub fn family_rank_check<Z: ExactInt>(set: &GenerationSet<Z>) -> (bool, usize) {
    let vecs: Vec<_> = set.families().iter().map(|f| f.vector()).collect();
    let rank = rank_of_vectors(&vecs);
    (rank == vecs.len(), rank)
}

/// Everything certify reports about a set.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub n_gen: usize,
    pub per_gen: usize,
    pub structural: Result<(), StructuralError>,
    pub complete: Option<bool>,
    pub missing: Vec<String>,
    pub nondegeneracy: Option<NondegeneracyReport>,
    pub resonant_vectors: Option<Vec<(CoefficientVector, ResonantClass)>>,
    pub family_rank: Option<(bool, usize)>,
    pub backend: &'static str,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.structural.is_ok()
            && self.complete == Some(true)
            && self.nondegeneracy.as_ref().is_some_and(|r| r.status == Status::Nondegenerate)
            && self.resonant_vectors.as_ref().is_some_and(|v| v.iter().all(|(_, c)| *c != ResonantClass::Other))
    }

    /// Key-value text with one witness per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "N = {}", self.n_gen);
        let _ = writeln!(out, "n = {}", self.per_gen);
        let _ = writeln!(out, "integer_backend = {}", self.backend);
        match &self.structural {
            Ok(()) => {
                let _ = writeln!(out, "structural = ok");
            }
            Err(e) => {
                let _ = writeln!(out, "structural = invalid");
                let _ = writeln!(out, "structural_error = {e}");
            }
        }
        if let Some(c) = self.complete {
            let _ = writeln!(out, "complete = {c}");
            for m in &self.missing {
                let _ = writeln!(out, "missing = {m}");
            }
        }
        if let Some((full, rank)) = self.family_rank {
            let _ = writeln!(out, "family_rank = {rank}");
            let _ = writeln!(out, "family_rank_full = {full}");
        }
        if let Some(nd) = &self.nondegeneracy {
            let _ = writeln!(out, "status = {}", if nd.status == Status::Nondegenerate { "nondegenerate" } else { "degenerate" });
            for class in [WitnessClass::Case1, WitnessClass::Case2, WitnessClass::Case3, WitnessClass::Case4, WitnessClass::Forbidden] {
                let _ = writeln!(out, "witnesses.{class} = {}", nd.count(class));
            }
            for (w, c) in &nd.witnesses {
                if *c != WitnessClass::Case1 {
                    let _ = writeln!(out, "witness = {c} : {w}");
                }
            }
        }
        if let Some(rv) = &self.resonant_vectors {
            let count = |k: ResonantClass| rv.iter().filter(|(_, c)| *c == k).count();
            let _ = writeln!(out, "resonant.family = {}", count(ResonantClass::Family));
            let _ = writeln!(out, "resonant.cf = {}", count(ResonantClass::CF));
            let _ = writeln!(out, "resonant.other = {}", count(ResonantClass::Other));
            for (v, c) in rv {
                let tag = match c {
                    ResonantClass::Family => "family",
                    ResonantClass::CF => "cf",
                    ResonantClass::Other => "other",
                };
                let _ = writeln!(out, "resonant = {tag} : {v}");
            }
        }
        let _ = writeln!(out, "certified = {}", self.passed());
        out
    }
}

fn certify_with<Z: ExactInt>(set: &GenerationSet<Z>, backend: &'static str) -> Certificate {
    let mut cert = Certificate {
        n_gen: set.n_generations(),
        per_gen: set.per_generation(),
        structural: set.structural_check(),
        complete: None,
        missing: vec![],
        nondegeneracy: None,
        resonant_vectors: None,
        family_rank: None,
        backend,
    };
    if cert.structural.is_err() {
        return cert;
    }
    let comp = is_complete(set.points());
    cert.complete = Some(comp.complete);
    cert.missing = comp.missing.iter().map(|p| p.to_string()).collect();
    cert.family_rank = Some(family_rank_check(set));
    cert.nondegeneracy = check_nondegeneracy(set).ok();
    let catalog = ResonanceCatalog::new(set.families(), set.len());
    cert.resonant_vectors = Some(
        enumerate_resonant_vectors(set.points(), 6)
            .into_iter()
            .map(|v| {
                let c = classify_with(&v, set.points(), &catalog).expect("enumerated vectors are resonant");
                (v, c)
            })
            .collect(),
    );
    cert
}

/// Full certificate, run on the narrowest integer backend that cannot overflow.
///
/// The widest intermediate is |Σλv|² with |λ| ≤ 6, bounded by 72·M² for
/// coordinates |x|, |y| ≤ M.
pub fn certify(set: &GenerationSet<BigInt>) -> Certificate {
    let bound = set.points().iter().map(|p| p.x.clone().abs().max(p.y.clone().abs())).max().unwrap_or_default();
    let b = bound.to_f64().unwrap_or(f64::INFINITY);
    if b * b * 100.0 < i64::MAX as f64 {
        certify_with(&set.convert::<i64>().expect("bounded"), "i64")
    } else if b * b * 100.0 < i128::MAX as f64 {
        certify_with(&set.convert::<i128>().expect("bounded"), "i128")
    } else {
        certify_with(set, "bigint")
    }
}

use num_traits::Signed as _;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resonance::genset::GenerationTable;

    fn rect_set() -> GenerationSet {
        let pts = vec![LatticePoint::of(0, 0), LatticePoint::of(2, 2), LatticePoint::of(2, 0), LatticePoint::of(0, 2)];
        GenerationTable::new(2, 2, pts, vec![1, 1, 2, 2], vec![Family::unchecked(1, [0, 1], [2, 3])]).unwrap()
    }

    #[test]
    fn single_family_certificate() {
        let set = rect_set();
        let rep = check_nondegeneracy(&set).unwrap();
        assert_eq!(rep.count(WitnessClass::Case1), 4);
        assert!(rep.count(WitnessClass::Case2) >= 1);
        // (0,0),(2,2) parents; (2,0) child: right angle at the child.
        let w = CoefficientVector::from_pairs([(0, 1), (1, 1), (2, -1)]);
        assert!(rep.witnesses.contains(&(w, WitnessClass::Case2)));
        // The square also has right angles at the parents.
        assert_eq!(rep.status, Status::Nondegenerate, "{:?}", rep.forbidden().collect::<Vec<_>>());
    }

    #[test]
    fn rank_examples() {
        let set = rect_set();
        assert_eq!(family_rank_check(&set), (true, 1));
        let v = set.families()[0].vector();
        assert_eq!(rank_of_vectors(&[v.clone(), v]), 1);
    }

    #[test]
    fn combination_verdicts() {
        let set = rect_set();
        let cat = ResonanceCatalog::new(set.families(), set.len());
        let r = combination(set.families(), &[(0, 2)]);
        assert_eq!(classify_combination(&cat, &r, 7), SmallSupportVerdict::MultipleOfFamily);
    }
}
