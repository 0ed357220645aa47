use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use super::lattice::{ExactInt, LatticePoint, RationalPoint};
use super::vector::CoefficientVector;

/// Two parents of generation `age` and two children of generation `age + 1`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Family {
    pub age: usize,
    pub parents: [usize; 2],
    pub children: [usize; 2],
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("family identities fail: v1+v2 != v3+v4 or |v1|²+|v2|² != |v3|²+|v4|²")]
    Identity,
    #[error("degenerate rectangle (repeated vertex)")]
    Degenerate,
}

impl Family {
    pub fn unchecked(age: usize, parents: [usize; 2], children: [usize; 2]) -> Self {
        Family { age, parents, children }
    }

    /// Validated constructor: both rectangle identities and non-degeneracy.
    pub fn new<P: PlanarPoint>(age: usize, parents: [usize; 2], children: [usize; 2], points: &[P]) -> Result<Self, FamilyError> {
        let f = Family { age, parents, children };
        if !f.identities_hold(points) {
            return Err(FamilyError::Identity);
        }
        if !f.is_nondegenerate(points) {
            return Err(FamilyError::Degenerate);
        }
        Ok(f)
    }

    pub fn members(&self) -> [usize; 4] {
        [self.parents[0], self.parents[1], self.children[0], self.children[1]]
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members().contains(&v)
    }

    pub fn identities_hold<P: PlanarPoint>(&self, points: &[P]) -> bool {
        let [a, b, c, d] = self.members().map(|i| &points[i]);
        P::family_identities(a, b, c, d)
    }

    pub fn is_nondegenerate<P: PlanarPoint>(&self, points: &[P]) -> bool {
        let [a, b, c, _] = self.members().map(|i| &points[i]);
        a != b && c != a && c != b
    }

    /// (λ^F, λ^{F_p}, λ^{F_c}) with λ^F = λ^{F_p} − λ^{F_c}.
    pub fn vectors(&self) -> (CoefficientVector, CoefficientVector, CoefficientVector) {
        let p = CoefficientVector::from_pairs([(self.parents[0], 1), (self.parents[1], 1)]);
        let c = CoefficientVector::from_pairs([(self.children[0], 1), (self.children[1], 1)]);
        (p.sub(&c), p, c)
    }

    pub fn vector(&self) -> CoefficientVector {
        self.vectors().0
    }
}

/// Free-function form of [`Family::vectors`].
pub fn family_vectors(f: &Family) -> (CoefficientVector, CoefficientVector, CoefficientVector) {
    f.vectors()
}

/// Point types a generation table can hold.
pub trait PlanarPoint: Clone + PartialEq + Eq + std::fmt::Debug {
    fn family_identities(a: &Self, b: &Self, c: &Self, d: &Self) -> bool;
}

impl<Z: ExactInt> PlanarPoint for LatticePoint<Z> {
    fn family_identities(a: &Self, b: &Self, c: &Self, d: &Self) -> bool {
        a.add(b) == c.add(d) && a.norm2.clone() + b.norm2.clone() == c.norm2.clone() + d.norm2.clone()
    }
}

impl PlanarPoint for RationalPoint {
    fn family_identities(a: &Self, b: &Self, c: &Self, d: &Self) -> bool {
        a.add(b) == c.add(d) && a.norm2() + b.norm2() == c.norm2() + d.norm2()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructuralError {
    #[error("malformed generation table: {0}")]
    Shape(String),
    #[error("element {v} belongs to {count} families of age {age} (expected exactly one)")]
    Membership { v: usize, age: usize, count: usize },
    #[error("element {v}: spouse and sibling coincide")]
    SpouseIsSibling { v: usize },
    #[error("family {index} violates the rectangle identities")]
    Identity { index: usize },
}

/// N generations of n points each, plus a family table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerationTable<P> {
    n_gen: usize,
    per_gen: usize,
    points: Vec<P>,
    generation: Vec<usize>,
    families: Vec<Family>,
}

pub type GenerationSet<Z = i64> = GenerationTable<LatticePoint<Z>>;
pub type RationalGenerationSet = GenerationTable<RationalPoint>;

impl<P: PlanarPoint> GenerationTable<P> {
    /// Assembles a table, checking only counts and index ranges. Generations are 1-based.
    pub fn new(n_gen: usize, per_gen: usize, points: Vec<P>, generation: Vec<usize>, families: Vec<Family>) -> Result<Self, StructuralError> {
        let shape = |m: String| Err(StructuralError::Shape(m));
        if n_gen < 1 || per_gen < 1 {
            return shape("N and n must be positive".into());
        }
        if points.len() != generation.len() || points.len() != n_gen * per_gen {
            return shape(format!("expected {} points, found {}", n_gen * per_gen, points.len()));
        }
        for g in 1..=n_gen {
            let c = generation.iter().filter(|&&x| x == g).count();
            if c != per_gen {
                return shape(format!("generation {g} has {c} points, expected {per_gen}"));
            }
        }
        for (k, f) in families.iter().enumerate() {
            if f.age < 1 || f.age >= n_gen {
                return shape(format!("family {k} has age {} outside 1..{}", f.age, n_gen - 1));
            }
            for &i in &f.members() {
                if i >= points.len() {
                    return shape(format!("family {k} references point {i}"));
                }
            }
            if f.parents.iter().any(|&i| generation[i] != f.age) || f.children.iter().any(|&i| generation[i] != f.age + 1) {
                return shape(format!("family {k}: parents must lie in generation {} and children in {}", f.age, f.age + 1));
            }
        }
        Ok(GenerationTable { n_gen, per_gen, points, generation, families })
    }

    pub fn n_generations(&self) -> usize {
        self.n_gen
    }

    pub fn per_generation(&self) -> usize {
        self.per_gen
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    /// 1-based generation of element `v`.
    pub fn generation_of(&self, v: usize) -> usize {
        self.generation[v]
    }

    pub fn generation_map(&self) -> &[usize] {
        &self.generation
    }

    pub fn generation(&self, g: usize) -> Vec<usize> {
        (0..self.points.len()).filter(|&v| self.generation[v] == g).collect()
    }

    /// Family in which `v` is a parent.
    pub fn parent_family(&self, v: usize) -> Option<&Family> {
        self.families.iter().find(|f| f.parents.contains(&v))
    }

    /// Family in which `v` is a child.
    pub fn child_family(&self, v: usize) -> Option<&Family> {
        self.families.iter().find(|f| f.children.contains(&v))
    }

    pub fn spouse(&self, v: usize) -> Option<usize> {
        self.parent_family(v).map(|f| if f.parents[0] == v { f.parents[1] } else { f.parents[0] })
    }

    pub fn sibling(&self, v: usize) -> Option<usize> {
        self.child_family(v).map(|f| if f.children[0] == v { f.children[1] } else { f.children[0] })
    }

    /// Conditions 1–3 of the generation-set definition plus the exact family identities.
    pub fn structural_check(&self) -> Result<(), StructuralError> {
        let npts = self.points.len();
        let mut as_parent = vec![0usize; npts];
        let mut as_child = vec![0usize; npts];
        for f in &self.families {
            if f.parents[0] == f.parents[1] || f.children[0] == f.children[1] {
                return Err(StructuralError::Shape(format!("family {f:?} repeats an index")));
            }
            for &p in &f.parents {
                as_parent[p] += 1;
            }
            for &c in &f.children {
                as_child[c] += 1;
            }
        }
        for v in 0..npts {
            let g = self.generation[v];
            if g < self.n_gen && as_parent[v] != 1 {
                return Err(StructuralError::Membership { v, age: g, count: as_parent[v] });
            }
            if g == self.n_gen && as_parent[v] != 0 {
                return Err(StructuralError::Membership { v, age: g, count: as_parent[v] });
            }
            if g > 1 && as_child[v] != 1 {
                return Err(StructuralError::Membership { v, age: g - 1, count: as_child[v] });
            }
            if g == 1 && as_child[v] != 0 {
                return Err(StructuralError::Membership { v, age: 0, count: as_child[v] });
            }
        }
        for v in 0..npts {
            let g = self.generation[v];
            if g >= 2 && g < self.n_gen && self.spouse(v) == self.sibling(v) {
                return Err(StructuralError::SpouseIsSibling { v });
            }
        }
        for (index, f) in self.families.iter().enumerate() {
            if !f.identities_hold(&self.points) {
                return Err(StructuralError::Identity { index });
            }
        }
        Ok(())
    }

    pub fn with_points<Q: PlanarPoint>(&self, points: Vec<Q>) -> GenerationTable<Q> {
        assert_eq!(points.len(), self.points.len());
        GenerationTable { n_gen: self.n_gen, per_gen: self.per_gen, points, generation: self.generation.clone(), families: self.families.clone() }
    }

    pub fn map_points<Q: PlanarPoint>(&self, f: impl Fn(&P) -> Q) -> GenerationTable<Q> {
        self.with_points(self.points.iter().map(f).collect())
    }
}

impl<Z: ExactInt> GenerationTable<LatticePoint<Z>> {
    pub fn convert<W: ExactInt>(&self) -> Option<GenerationSet<W>> {
        let pts: Option<Vec<_>> = self.points.iter().map(|p| p.convert::<W>()).collect();
        Some(self.with_points(pts?))
    }

    pub fn dilate(&self, m: &Z) -> Self {
        self.map_points(|p| p.scale(m))
    }

    /// Σ_{k ∈ S_g} |k|^{2s} for integer s, exactly.
    pub fn weight_exact(&self, g: usize, s: u32) -> BigInt {
        self.generation(g).iter().map(|&v| num_traits::pow(self.points[v].norm2.to_bigint(), s as usize)).sum()
    }

    pub fn to_rational(&self) -> RationalGenerationSet {
        self.map_points(RationalPoint::from_lattice)
    }
}

impl GenerationTable<RationalPoint> {
    /// Multiplies by `multiple` times the lcm of all denominators.
    pub fn dilate_to_integers(&self, multiple: &BigInt) -> (GenerationSet<BigInt>, BigInt) {
        let lcm = self.points.iter().fold(BigInt::one(), |acc, p| acc.lcm(&p.denominator_lcm()));
        let m = lcm * multiple;
        let mr = BigRational::from_integer(m.clone());
        let pts = self.points.iter().map(|p| p.scale(&mr).to_lattice().expect("lcm dilation is integral")).collect();
        (self.with_points(pts), m)
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.to_integer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn parse_rational(tok: &str) -> Result<BigRational, String> {
    let bad = || format!("bad coordinate `{tok}`");
    match tok.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.parse().map_err(|_| bad())?;
            let q: BigInt = q.parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(tok.parse().map_err(|_| bad())?)),
    }
}

/// Plain-text serialization: `N n`, then `gen x y` per point, then `age i1 i2 i3 i4` per family.
pub fn write_generation_set<P: PlanarPoint>(set: &GenerationTable<P>, coords: impl Fn(&P) -> (String, String)) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", set.n_gen, set.per_gen);
    for (p, g) in set.points.iter().zip(&set.generation) {
        let (x, y) = coords(p);
        let _ = writeln!(out, "{g} {x} {y}");
    }
    for f in &set.families {
        let _ = writeln!(out, "{} {} {} {} {}", f.age, f.parents[0], f.parents[1], f.children[0], f.children[1]);
    }
    out
}

pub fn lattice_set_to_text<Z: ExactInt>(set: &GenerationSet<Z>) -> String {
    write_generation_set(set, |p| (p.x.to_string(), p.y.to_string()))
}

pub fn rational_set_to_text(set: &RationalGenerationSet) -> String {
    write_generation_set(set, |p| (fmt_rational(&p.x), fmt_rational(&p.y)))
}

/// Parses the text format; coordinates may be integers or `p/q` rationals.
pub fn parse_generation_set(text: &str) -> Result<RationalGenerationSet, StructuralError> {
    let shape = |m: String| StructuralError::Shape(m);
    let mut lines = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| shape("empty input".into()))?;
    let hv: Vec<usize> = header.split_whitespace().map(|t| t.parse::<usize>()).collect::<Result<_, _>>().map_err(|_| shape(format!("bad header `{header}`")))?;
    let [n_gen, per_gen] = hv[..] else { return Err(shape(format!("bad header `{header}`"))) };
    let mut points = Vec::new();
    let mut generation = Vec::new();
    let mut families = Vec::new();
    for line in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.len() {
            3 if families.is_empty() => {
                let g: usize = toks[0].parse().map_err(|_| shape(format!("bad generation in `{line}`")))?;
                let x = parse_rational(toks[1]).map_err(shape)?;
                let y = parse_rational(toks[2]).map_err(shape)?;
                points.push(RationalPoint::new(x, y));
                generation.push(g);
            }
            5 => {
                let v: Vec<usize> = toks.iter().map(|t| t.parse::<usize>()).collect::<Result<_, _>>().map_err(|_| shape(format!("bad family line `{line}`")))?;
                families.push(Family::unchecked(v[0], [v[1], v[2]], [v[3], v[4]]));
            }
            _ => return Err(shape(format!("unrecognised line `{line}`"))),
        }
    }
    GenerationTable::new(n_gen, per_gen, points, generation, families)
}

/// Smallest |k| over the set, as an exact squared norm.
pub fn min_norm2<Z: ExactInt>(set: &GenerationSet<Z>) -> Z {
    set.points().iter().map(|p| p.norm2.clone()).min().unwrap_or_else(Z::zero)
}

/// Largest absolute coordinate, used to pick an integer backend.
pub fn coordinate_bound<Z: ExactInt>(set: &GenerationSet<Z>) -> BigInt {
    set.points().iter().map(|p| p.x.abs().max(p.y.abs()).to_bigint()).max().unwrap_or_default()
}

pub fn rational_is_integral(set: &RationalGenerationSet) -> bool {
    set.points().iter().all(|p| p.x.is_integer() && p.y.is_integer())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect() -> Vec<LatticePoint> {
        vec![LatticePoint::of(0, 0), LatticePoint::of(2, 2), LatticePoint::of(2, 0), LatticePoint::of(0, 2)]
    }

    #[test]
    fn family_construction() {
        let pts = rect();
        let f = Family::new(1, [0, 1], [2, 3], &pts).unwrap();
        let (l, p, c) = f.vectors();
        assert_eq!(l, CoefficientVector::from_pairs([(0, 1), (1, 1), (2, -1), (3, -1)]));
        assert_eq!((p.l1(), p.sum()), (2, 2));
        assert_eq!(l, p.sub(&c));
        assert_eq!(Family::new(1, [0, 2], [1, 3], &pts), Err(FamilyError::Identity));
        let degenerate = vec![LatticePoint::of(0, 0), LatticePoint::of(0, 0), LatticePoint::of(0, 0), LatticePoint::of(0, 0)];
        assert_eq!(Family::new(1, [0, 1], [2, 3], &degenerate), Err(FamilyError::Degenerate));
    }

    #[test]
    fn text_round_trip() {
        let set = GenerationTable::new(2, 2, rect(), vec![1, 1, 2, 2], vec![Family::unchecked(1, [0, 1], [2, 3])]).unwrap();
        set.structural_check().unwrap();
        let text = lattice_set_to_text(&set);
        let back = parse_generation_set(&text).unwrap();
        let (ints, m) = back.dilate_to_integers(&BigInt::one());
        assert_eq!(m, BigInt::one());
        assert_eq!(ints.convert::<i64>().unwrap(), set);
    }

    #[test]
    fn rational_coordinates_parse() {
        let text = "2 2\n1 0 0\n1 2 2\n2 12/5 6/5\n2 -2/5 4/5\n1 0 1 2 3\n";
        let set = parse_generation_set(text).unwrap();
        set.structural_check().unwrap();
        assert_eq!(rational_set_to_text(&set), text);
        let (ints, m) = set.dilate_to_integers(&BigInt::from(2));
        assert_eq!(m, BigInt::from(10));
        ints.structural_check().unwrap();
    }
}
