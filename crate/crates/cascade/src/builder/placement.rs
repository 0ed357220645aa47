//! Prototype embedding, chord placement on family circles and the perturbation search.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::model::CombinatorialModel;
use crate::resonance::{
    certify, defect_zero_vectors, Certificate, CoefficientVector, Family, LatticePoint, RationalGenerationSet, RationalPoint, ResonanceCatalog, StructuralError, WitnessClass,
};

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Coordinates for every element plus the chord direction used for each family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placement {
    pub points: Vec<RationalPoint>,
    /// Direction (x, y) of the chord through the first parent, per family; `None` when the
    /// parents coincide.
    pub angles: Vec<Option<(BigInt, BigInt)>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlacementError {
    #[error("diameter endpoints coincide")]
    CoincidentEndpoints,
    #[error("chord hits an endpoint of the diameter (degenerate rectangle)")]
    DegenerateChord,
    #[error("structure: {0}")]
    Structural(#[from] StructuralError),
    #[error("first-generation orthogonality cannot be met: {0}")]
    Orthogonality(String),
    #[error("search budget exhausted after {attempts} attempts; last failure: {witness}")]
    Budget { attempts: usize, witness: String, partial: Box<Option<Placement>> },
}

/// Iterated degenerate procreation: every family with nonzero parents has
/// orthogonal parents of equal length, and children 0 (digit 0) and p1+p2 (digit 1).
///
/// The last generation holds a single nonzero point (2^{N−1}, 0); every
/// generation above is obtained by splitting v into v(1+i)/2 and v(1−i)/2,
/// which keeps all coordinates integral.
pub fn prototype_embedding(model: &CombinatorialModel) -> Result<Placement, PlacementError> {
    let n = model.n_gen;
    let mut pts = vec![RationalPoint::zero(); model.len()];
    let all = model.per_gen - 1;
    pts[model.index(n, all)] = RationalPoint::new(BigRational::from_integer(BigInt::one() << (n - 1)), BigRational::zero());
    for g in (1..n).rev() {
        let bit = 1usize << (g - 1);
        let prefix = bit - 1;
        for label in (0..model.per_gen).filter(|l| l & prefix == prefix && l & bit != 0) {
            let v = pts[model.index(g + 1, label)].clone();
            if v.is_zero() {
                return Err(PlacementError::Orthogonality(format!("zero ancestor at generation {}", g + 1)));
            }
            let half = BigRational::new(1.into(), 2.into());
            let u = v.add(&v.perp()).scale(&half);
            let w = v.sub(&v.perp()).scale(&half);
            if !u.dot(&w).is_zero() {
                return Err(PlacementError::Orthogonality(format!("split at generation {g}")));
            }
            pts[model.index(g, label)] = u;
            pts[model.index(g, label & !bit)] = w;
        }
    }
    let angles = model
        .families
        .iter()
        .map(|f| {
            let (p1, c1) = (&pts[f.parents[0]], &pts[f.children[0]]);
            let d = c1.sub(p1);
            (!d.is_zero()).then(|| primitive_direction(&d))
        })
        .collect();
    Ok(Placement { points: pts, angles })
}

/// Integer direction proportional to a rational vector, reduced by its gcd, with x ≥ 0.
fn primitive_direction(d: &RationalPoint) -> (BigInt, BigInt) {
    let l = d.denominator_lcm();
    let x = (&d.x * BigRational::from_integer(l.clone())).to_integer();
    let y = (&d.y * BigRational::from_integer(l)).to_integer();
    let g = x.gcd(&y);
    let (x, y) = (x / &g, y / &g);
    if x.is_negative() || (x.is_zero() && y.is_negative()) {
        (-x, -y)
    } else {
        (x, y)
    }
}

/// Second intersection of the circle with diameter p1p2 and the line through p1 with direction d.
pub fn chord_point(p1: &RationalPoint, p2: &RationalPoint, d: &RationalPoint) -> Result<(RationalPoint, RationalPoint), PlacementError> {
    if p1 == p2 {
        return Err(PlacementError::CoincidentEndpoints);
    }
    let dd = d.norm2();
    if dd.is_zero() {
        return Err(PlacementError::DegenerateChord);
    }
    // Foot of the perpendicular from p2: the angle at c1 is right.
    let c1 = p1.add(&d.scale(&(d.dot(&p2.sub(p1)) / dd)));
    if &c1 == p1 || &c1 == p2 {
        return Err(PlacementError::DegenerateChord);
    }
    let c2 = p1.add(p2).sub(&c1);
    Ok((c1, c2))
}

/// Chord construction with slope `t`.
pub fn rational_circle_point(p1: &RationalPoint, p2: &RationalPoint, t: &BigRational) -> Result<(RationalPoint, RationalPoint), PlacementError> {
    chord_point(p1, p2, &RationalPoint::new(BigRational::one(), t.clone()))
}

/// F(ϑ) = K + 2R(B−A)⟨(A+B−1)p+q, e^{iϑ}⟩ for one coefficient choice (A, B, μ).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AngleConstraint {
    pub a: i64,
    pub b: i64,
    pub mu: CoefficientVector,
    pub k: BigRational,
    /// 2(B−A)((A+B−1)p + q).
    pub w: RationalPoint,
}

impl AngleConstraint {
    /// Value at the child position c1 = p + R e^{iϑ}.
    pub fn eval(&self, center: &RationalPoint, c1: &RationalPoint) -> BigRational {
        &self.k + self.w.dot(&c1.sub(center))
    }

    /// Constant in ϑ: handled by the formal-identity classification instead.
    pub fn is_formal(&self) -> bool {
        self.a == self.b || self.w.is_zero()
    }
}

/// Every (A, B, μ) with |A|+|B|+|μ| ≤ 5, A+B+Σμ = 1 and (A, B) ≠ (0, 0), with μ
/// supported on the indices of `fixed`.
pub fn angle_constraints(p1: &RationalPoint, p2: &RationalPoint, fixed: &[RationalPoint]) -> Vec<AngleConstraint> {
    let half = BigRational::new(1.into(), 2.into());
    let center = p1.add(p2).scale(&half);
    let r2 = p1.sub(&center).norm2();
    let pn = center.norm2();
    let mut out = Vec::new();
    let mut mus = Vec::new();
    for a in -5i64..=5 {
        for b in -5i64..=5 {
            let ab = a.abs() + b.abs();
            if ab == 0 || ab > 5 {
                continue;
            }
            mus.clear();
            enumerate_mu(fixed.len(), 0, 5 - ab, 1 - a - b, &mut Vec::new(), &mut mus);
            for mu in &mus {
                let (mut qv, mut cc) = (RationalPoint::zero(), BigRational::zero());
                for (i, c) in mu.iter() {
                    qv = qv.add(&fixed[i].scale(&q(c)));
                    cc += fixed[i].norm2() * q(c);
                }
                let s = center.scale(&q(a + b)).add(&qv);
                let k = q(a + b) * (&pn + &r2) + &cc - s.norm2() - q((a - b) * (a - b)) * &r2;
                let w = center.scale(&q(a + b - 1)).add(&qv).scale(&q(2 * (b - a)));
                out.push(AngleConstraint { a, b, mu: mu.clone(), k, w });
            }
        }
    }
    out
}

fn enumerate_mu(m: usize, start: usize, budget: i64, target: i64, cur: &mut Vec<(usize, i64)>, out: &mut Vec<CoefficientVector>) {
    if target.abs() <= budget && target == 0 {
        out.push(CoefficientVector::from_pairs(cur.iter().copied()));
    }
    if budget == 0 {
        return;
    }
    for i in start..m {
        for c in (-budget..=budget).filter(|&c| c != 0) {
            // The remaining budget must still be able to reach the target sum.
            if (target - c).abs() > budget - c.abs() {
                continue;
            }
            cur.push((i, c));
            enumerate_mu(m, i + 1, budget - c.abs(), target - c, cur, out);
            cur.pop();
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Rational chords with small-height directions (Stern–Brocot order).
    Chord,
    /// Integer lattice points on each family circle; the set is doubled whenever
    /// a circle centre is not integral.
    Lattice,
    /// Like `Lattice`, but the first generation is drawn at random from the box
    /// [−b, b]² and circle points are tried in random order. Produces sets with
    /// small coordinates.
    Compact(i64),
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "chord" => Ok(Strategy::Chord),
            "lattice" => Ok(Strategy::Lattice),
            _ => match s.strip_prefix("compact:").map(str::parse::<i64>) {
                Some(Ok(b)) if b > 0 => Ok(Strategy::Compact(b)),
                _ => Err(format!("unknown strategy `{s}` (expected chord, lattice or compact:B)")),
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct PerturbConfig {
    pub seed: u64,
    pub budget: usize,
    pub strategy: Strategy,
    /// Screen each candidate for new forbidden witnesses while at most this many points are placed.
    pub filter_limit: usize,
    /// Run the exhaustive certificate while the set has at most this many points.
    pub certify_limit: usize,
    /// Maximal direction height for chord candidates.
    pub max_height: i64,
    /// Angular window (radians) around the prototype direction.
    pub window: f64,
    /// Lattice strategy: scale applied to the prototype before perturbing.
    pub lattice_scale: i64,
    /// Lattice strategy: circles with r² above this only offer the square vertices.
    pub lattice_enum_r2: i128,
}

impl Default for PerturbConfig {
    fn default() -> Self {
        PerturbConfig {
            seed: 0,
            budget: 16,
            strategy: Strategy::Chord,
            filter_limit: 40,
            certify_limit: 200,
            max_height: 24,
            window: 0.35,
            lattice_scale: 64,
            lattice_enum_r2: 100_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PerturbOutcome {
    pub placement: Placement,
    pub set: RationalGenerationSet,
    pub attempts: usize,
    /// Exhaustive certificate when the set was small enough.
    pub certificate: Option<Certificate>,
}

fn min_distinct_distance(pts: &[RationalPoint]) -> f64 {
    let f: Vec<(f64, f64)> = pts.iter().map(|p| p.to_f64()).collect();
    let mut best = f64::INFINITY;
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            let d = ((f[i].0 - f[j].0).powi(2) + (f[i].1 - f[j].1).powi(2)).sqrt();
            if d > 1e-12 {
                best = best.min(d);
            }
        }
    }
    best
}

/// Largest power of two not exceeding x, as an exact rational.
fn pow2_below(x: f64) -> BigRational {
    let e = x.log2().floor() as i64;
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// Primitive integer directions of height ≤ h_max within `window` of `theta` (mod π),
/// ordered by height and then by angular distance.
fn candidate_directions(theta: f64, window: f64, h_max: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for h in 1..=h_max {
        let mut level = Vec::new();
        for x in 0..=h {
            for y in -h..=h {
                if x.max(y.abs()) != h || num_integer::gcd(x, y) != 1 || (x == 0 && y < 0) {
                    continue;
                }
                let a = (y as f64).atan2(x as f64);
                let mut d = (a - theta).rem_euclid(std::f64::consts::PI);
                d = d.min(std::f64::consts::PI - d);
                if d <= window {
                    level.push((d, x, y));
                }
            }
        }
        level.sort_by(|a, b| a.0.total_cmp(&b.0));
        out.extend(level.into_iter().map(|(_, x, y)| (x, y)));
    }
    out
}

/// The point on the circle with diameter p1p2 nearest the origin (the prototype's zero child).
fn nearest_to_origin(p1: (f64, f64), p2: (f64, f64)) -> (f64, f64) {
    let m = ((p1.0 + p2.0) / 2.0, (p1.1 + p2.1) / 2.0);
    let r = ((p1.0 - m.0).powi(2) + (p1.1 - m.1).powi(2)).sqrt();
    let nm = (m.0 * m.0 + m.1 * m.1).sqrt();
    if nm < 1e-300 {
        return (m.0 + r, m.1);
    }
    (m.0 - r * m.0 / nm, m.1 - r * m.1 / nm)
}

struct Attempt {
    pts: Vec<RationalPoint>,
    angles: Vec<Option<(BigInt, BigInt)>>,
}

/// First forbidden witness created by adding the children `c1`, `c2` of `current` to
/// the points placed so far; witnesses among older points were screened earlier.
fn new_forbidden_witness(pts: &[RationalPoint], placed: &[usize], done: &[Family], current: &Family, c1: &RationalPoint, c2: &RationalPoint) -> Option<CoefficientVector> {
    let mut local: HashMap<usize, usize> = HashMap::new();
    let mut coords: Vec<RationalPoint> = Vec::with_capacity(placed.len() + 2);
    for &g in placed {
        local.insert(g, coords.len());
        coords.push(pts[g].clone());
    }
    let (l1, l2) = (coords.len(), coords.len() + 1);
    local.insert(current.children[0], l1);
    local.insert(current.children[1], l2);
    coords.push(c1.clone());
    coords.push(c2.clone());
    let map = |f: &Family| Family::unchecked(f.age, f.parents.map(|v| local[&v]), f.children.map(|v| local[&v]));
    let fams: Vec<Family> = done.iter().chain(std::iter::once(current)).map(map).collect();
    let lcm = coords.iter().fold(BigInt::one(), |acc, p| acc.lcm(&p.denominator_lcm()));
    let scale = BigRational::from_integer(lcm);
    let lattice: Vec<LatticePoint<BigInt>> = coords.iter().map(|p| p.scale(&scale).to_lattice().expect("integral after dilation")).collect();
    let catalog = ResonanceCatalog::new(&fams, coords.len());
    let bound = lattice.iter().map(|p| p.max_abs_coord()).max().unwrap_or_default();
    let witnesses = if bound < BigInt::from(1_000_000_000_000_000i64) {
        let small: Vec<LatticePoint<i128>> = lattice.iter().map(|p| p.convert().expect("bounded")).collect();
        defect_zero_vectors(&small)
    } else {
        defect_zero_vectors(&lattice)
    };
    witnesses.into_iter().find(|w| (w.get(l1) != 0 || w.get(l2) != 0) && catalog.classify_witness(w) == WitnessClass::Forbidden)
}

fn integer_circle_points(m: (i128, i128), r2: i128, enum_limit: i128, p1: (i128, i128)) -> Vec<(i128, i128)> {
    if r2 > enum_limit {
        let d = (p1.0 - m.0, p1.1 - m.1);
        return vec![(m.0 - d.1, m.1 + d.0), (m.0 + d.1, m.1 - d.0)];
    }
    let r = (r2 as f64).sqrt().floor() as i128 + 1;
    let mut out = Vec::new();
    for dx in -r..=r {
        let rest = r2 - dx * dx;
        if rest < 0 {
            continue;
        }
        let dy = (rest as f64).sqrt().round() as i128;
        for dy in [dy - 1, dy, dy + 1].into_iter().filter(|&d| d >= 0 && d * d == rest) {
            out.push((m.0 + dx, m.1 + dy));
            if dy != 0 {
                out.push((m.0 + dx, m.1 - dy));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn to_i128(p: &RationalPoint) -> (i128, i128) {
    (p.x.to_integer().to_i128().expect("lattice coordinate fits i128"), p.y.to_integer().to_i128().expect("lattice coordinate fits i128"))
}

fn from_i128(p: (i128, i128)) -> RationalPoint {
    RationalPoint::new(BigRational::from_integer(p.0.into()), BigRational::from_integer(p.1.into()))
}

fn try_attempt(model: &CombinatorialModel, proto: &Placement, cfg: &PerturbConfig, attempt: usize) -> Result<Attempt, (String, Attempt)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(attempt as u64);
    let n = model.per_gen;
    let mut pts = vec![RationalPoint::zero(); model.len()];
    let mut angles = vec![None; model.families.len()];
    let first: Vec<RationalPoint> = (0..n).map(|l| proto.points[model.index(1, l)].clone()).collect();
    let dmin = min_distinct_distance(&first);
    let mut seen: HashSet<RationalPoint> = HashSet::new();
    match cfg.strategy {
        Strategy::Chord => {
            let radius = pow2_below(dmin / 8.0) / BigRational::from_integer(BigInt::one() << attempt.min(60));
            let den = 16i64;
            for l in 0..n {
                loop {
                    let (u, w) = (rng.gen_range(-den..=den), rng.gen_range(-den..=den));
                    let off = RationalPoint::new(&radius * BigRational::new(u.into(), den.into()), &radius * BigRational::new(w.into(), den.into()));
                    let p = first[l].add(&off);
                    if seen.insert(p.clone()) {
                        pts[model.index(1, l)] = p;
                        break;
                    }
                }
            }
        }
        Strategy::Compact(b) => {
            for l in 0..n {
                loop {
                    let mut p = RationalPoint::from_ints(rng.gen_range(-b..=b), rng.gen_range(-b..=b));
                    // Spouses share parity so that the first circle centres are integral.
                    if l & 1 == 1 {
                        let sp = to_i128(&pts[model.index(1, l - 1)]);
                        let (x, y) = to_i128(&p);
                        p = from_i128((x + (sp.0 - x).rem_euclid(2), y + (sp.1 - y).rem_euclid(2)));
                    }
                    if seen.insert(p.clone()) {
                        pts[model.index(1, l)] = p;
                        break;
                    }
                }
            }
        }
        Strategy::Lattice => {
            let scale = q(cfg.lattice_scale.max(1));
            let rho = ((dmin * cfg.lattice_scale as f64 / 8.0).floor() as i64).max(1) + attempt as i64 / 4;
            for l in 0..n {
                loop {
                    let off = RationalPoint::from_ints(rng.gen_range(-rho..=rho), rng.gen_range(-rho..=rho));
                    let p = first[l].scale(&scale).add(&off);
                    if seen.insert(p.clone()) {
                        pts[model.index(1, l)] = p;
                        break;
                    }
                }
            }
        }
    }
    let mut placed = n;
    let mut placed_list: Vec<usize> = (0..n).map(|l| model.index(1, l)).collect();
    let mut done: Vec<Family> = Vec::new();
    for age in 1..model.n_gen {
        if matches!(cfg.strategy, Strategy::Lattice | Strategy::Compact(_)) {
            let odd = model.families_of_age(age).any(|f| {
                let s = pts[f.parents[0]].add(&pts[f.parents[1]]);
                !(s.x.to_integer().is_even() && s.y.to_integer().is_even())
            });
            if odd {
                let two = q(2);
                for p in pts.iter_mut().take(placed) {
                    *p = p.scale(&two);
                }
                seen = pts[..placed].iter().cloned().collect();
            }
        }
        for (fi, f) in model.families.iter().enumerate().filter(|(_, f)| f.age == age) {
            let (p1, p2) = (pts[f.parents[0]].clone(), pts[f.parents[1]].clone());
            let use_filter = placed_list.len() + 2 <= cfg.filter_limit;
            let target = nearest_to_origin(p1.to_f64(), p2.to_f64());
            let mut chosen = None;
            let mut last_err = String::from("no candidate in window");
            let pts_ro = pts.clone();
            let mut consider = |c1: RationalPoint, c2: RationalPoint, seen: &HashSet<RationalPoint>| -> bool {
                if c1 == c2 || seen.contains(&c1) || seen.contains(&c2) {
                    last_err = format!("children of family {fi} collide with placed points");
                    return false;
                }
                if use_filter {
                    if let Some(w) = new_forbidden_witness(&pts_ro, &placed_list, &done, f, &c1, &c2) {
                        last_err = format!("family {fi}: forbidden witness {w}");
                        return false;
                    }
                }
                true
            };
            match cfg.strategy {
                Strategy::Chord => {
                    let (a, b) = (p1.to_f64(), target);
                    let theta = (b.1 - a.1).atan2(b.0 - a.0);
                    for (dx, dy) in candidate_directions(theta, cfg.window, cfg.max_height) {
                        let d = RationalPoint::from_ints(dx, dy);
                        let Ok((c1, c2)) = chord_point(&p1, &p2, &d) else { continue };
                        if consider(c1.clone(), c2.clone(), &seen) {
                            chosen = Some((c1, c2, Some((BigInt::from(dx), BigInt::from(dy)))));
                            break;
                        }
                    }
                }
                Strategy::Lattice | Strategy::Compact(_) => {
                    let (a, b) = (to_i128(&p1), to_i128(&p2));
                    let m = ((a.0 + b.0) / 2, (a.1 + b.1) / 2);
                    let r2 = (a.0 - m.0).pow(2) + (a.1 - m.1).pow(2);
                    let mut cands = integer_circle_points(m, r2, cfg.lattice_enum_r2, a);
                    cands.retain(|&c| c != a && c != b);
                    let t = target;
                    if let Strategy::Compact(_) = cfg.strategy {
                        cands.shuffle(&mut rng);
                    } else {
                        cands.sort_by(|u, v| {
                            let du = (u.0 as f64 - t.0).powi(2) + (u.1 as f64 - t.1).powi(2);
                            let dv = (v.0 as f64 - t.0).powi(2) + (v.1 as f64 - t.1).powi(2);
                            du.total_cmp(&dv).then(u.cmp(v))
                        });
                    }
                    for c in cands {
                        let c1 = from_i128(c);
                        let c2 = from_i128((2 * m.0 - c.0, 2 * m.1 - c.1));
                        if consider(c1.clone(), c2.clone(), &seen) {
                            let dir = primitive_direction(&c1.sub(&p1));
                            chosen = Some((c1, c2, Some(dir)));
                            break;
                        }
                    }
                }
            }
            let Some((c1, c2, dir)) = chosen else {
                return Err((last_err, Attempt { pts, angles }));
            };
            seen.insert(c1.clone());
            seen.insert(c2.clone());
            pts[f.children[0]] = c1;
            pts[f.children[1]] = c2;
            placed_list.extend(f.children);
            done.push(*f);
            angles[fi] = dir;
        }
        placed += n;
    }
    Ok(Attempt { pts, angles })
}

/// Searches for a non-degenerate placement near the prototype; deterministic in `cfg.seed`.
pub fn perturb_to_nondegenerate(model: &CombinatorialModel, cfg: &PerturbConfig) -> Result<PerturbOutcome, PlacementError> {
    let proto = prototype_embedding(model)?;
    let mut last = (String::from("no attempt made"), None);
    for attempt in 0..cfg.budget.max(1) {
        match try_attempt(model, &proto, cfg, attempt) {
            Err((why, partial)) => last = (why, Some(Placement { points: partial.pts, angles: partial.angles })),
            Ok(a) => {
                let placement = Placement { points: a.pts, angles: a.angles };
                let set = model.table(placement.points.clone())?;
                set.structural_check()?;
                let certificate = if set.len() <= cfg.certify_limit {
                    let (int_set, _) = set.dilate_to_integers(&BigInt::one());
                    let cert = certify(&int_set);
                    if !cert.passed() {
                        let witness = cert
                            .nondegeneracy
                            .as_ref()
                            .and_then(|r| r.forbidden().next().map(|w| format!("forbidden witness {w}")))
                            .unwrap_or_else(|| "certificate failed".into());
                        last = (witness, Some(placement));
                        continue;
                    }
                    Some(cert)
                } else {
                    None
                };
                return Ok(PerturbOutcome { placement, set, attempts: attempt + 1, certificate });
            }
        }
    }
    Err(PlacementError::Budget { attempts: cfg.budget.max(1), witness: last.0, partial: Box::new(last.1) })
}

/// Smallest multiple m of `base` with m·min_norm ≥ r, given min |v|² as a rational.
pub fn dilation_for_size(base: &BigInt, min_norm2: &BigRational, r: f64) -> BigInt {
    let mn = min_norm2.to_f64().unwrap_or(0.0).sqrt();
    if mn <= 0.0 || r <= 0.0 {
        return base.clone();
    }
    let b = base.to_f64().unwrap_or(f64::INFINITY);
    let k = (r / (mn * b)).ceil().max(1.0);
    let mut m = base * BigInt::from(k as u64);
    // Guard against rounding in the float estimate.
    let rr = BigRational::from_float(r * r).unwrap_or_else(BigRational::zero);
    while BigRational::from_integer(&m * &m) * min_norm2 < rr {
        m += base;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::model::build_combinatorial_model;

    fn rp(x: i64, y: i64) -> RationalPoint {
        RationalPoint::from_ints(x, y)
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn chord_examples() {
        let (c1, c2) = rational_circle_point(&rp(0, 0), &rp(2, 2), &q(0)).unwrap();
        assert_eq!((c1, c2), (rp(2, 0), rp(0, 2)));
        let (c1, c2) = rational_circle_point(&rp(0, 0), &rp(2, 2), &r(1, 2)).unwrap();
        assert_eq!(c1, RationalPoint::new(r(12, 5), r(6, 5)));
        assert_eq!(c2, RationalPoint::new(r(-2, 5), r(4, 5)));
        assert_eq!(c1.norm2() + c2.norm2(), q(8));
        assert_eq!(rational_circle_point(&rp(0, 0), &rp(2, 2), &q(1)), Err(PlacementError::DegenerateChord));
    }

    #[test]
    fn prototype_zero_counts() {
        let m = build_combinatorial_model(5).unwrap();
        let p = prototype_embedding(&m).unwrap();
        let zeros: Vec<usize> = (1..=5).map(|g| (0..16).filter(|&l| p.points[m.index(g, l)].is_zero()).count()).collect();
        assert_eq!(zeros, vec![0, 8, 12, 14, 15]);
        let t = m.table(p.points.clone()).unwrap();
        t.structural_check().unwrap();
    }

    #[test]
    fn constraint_formula_matches_direct_defect() {
        let p1 = rp(1, 0);
        let p2 = rp(3, 4);
        let fixed = vec![rp(-1, 2), rp(5, 1)];
        let (c1, c2) = rational_circle_point(&p1, &p2, &r(1, 3)).unwrap();
        let center = p1.add(&p2).scale(&r(1, 2));
        for c in angle_constraints(&p1, &p2, &fixed) {
            let mut qv = c1.scale(&q(c.a)).add(&c2.scale(&q(c.b)));
            let mut val = q(c.a) * c1.norm2() + q(c.b) * c2.norm2();
            for (i, k) in c.mu.iter() {
                qv = qv.add(&fixed[i].scale(&q(k)));
                val += q(k) * fixed[i].norm2();
            }
            assert_eq!(c.eval(&center, &c1), val - qv.norm2(), "{c:?}");
            assert_eq!(c.a + c.b + c.mu.sum(), 1);
            assert!(c.a.abs() + c.b.abs() + c.mu.l1() <= 5);
            if c.a == c.b {
                assert!(c.is_formal());
            }
        }
    }

    #[test]
    fn dilation_reaches_size() {
        let m = dilation_for_size(&BigInt::from(5), &r(4, 25), 100.0);
        assert_eq!(&m % BigInt::from(5), BigInt::zero());
        assert!(m.to_f64().unwrap() * 0.4 >= 100.0);
        assert_eq!(m, BigInt::from(250));
    }
}
