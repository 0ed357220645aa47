use std::collections::BTreeMap;
use std::fmt;

use super::lattice::{ExactInt, LatticePoint};

/// Sparse integer vector indexed by positions in a point set.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct CoefficientVector {
    entries: BTreeMap<usize, i64>,
}

impl CoefficientVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn indicator(i: usize) -> Self {
        Self::from_pairs([(i, 1)])
    }

    /// Builds a vector from (index, coefficient) pairs; repeated indices accumulate.
    pub fn from_pairs<I: IntoIterator<Item = (usize, i64)>>(pairs: I) -> Self {
        let mut v = Self::new();
        for (i, c) in pairs {
            v.add_at(i, c);
        }
        v
    }

    pub fn add_at(&mut self, i: usize, c: i64) {
        let e = self.entries.entry(i).or_insert(0);
        *e += c;
        if *e == 0 {
            self.entries.remove(&i);
        }
    }

    pub fn get(&self, i: usize) -> i64 {
        self.entries.get(&i).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.entries.iter().map(|(&i, &c)| (i, c))
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.keys().copied().collect()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn l1(&self) -> i64 {
        self.entries.values().map(|c| c.abs()).sum()
    }

    pub fn sum(&self) -> i64 {
        self.entries.values().sum()
    }

    pub fn neg(&self) -> Self {
        CoefficientVector { entries: self.entries.iter().map(|(&i, &c)| (i, -c)).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (i, c) in o.iter() {
            r.add_at(i, c);
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::new();
        }
        CoefficientVector { entries: self.entries.iter().map(|(&i, &c)| (i, c * k)).collect() }
    }

    /// gcd of the entries (0 for the zero vector).
    pub fn content(&self) -> i64 {
        self.entries.values().fold(0, |g, &c| num_integer::gcd(g, c))
    }

    /// Representative of {λ, −λ}: the smallest support index carries a positive coefficient.
    pub fn canonical(&self) -> Self {
        match self.entries.values().next() {
            Some(&c) if c < 0 => self.neg(),
            _ => self.clone(),
        }
    }

    /// Σ λ_i v_i and Σ λ_i |v_i|².
    pub fn lift_sums<Z: ExactInt>(&self, points: &[LatticePoint<Z>]) -> (Z, Z, Z) {
        let mut sx = Z::zero();
        let mut sy = Z::zero();
        let mut sw = Z::zero();
        for (i, c) in self.iter() {
            let c = Z::from(c as i32);
            let p = &points[i];
            sx = sx + c.clone() * p.x.clone();
            sy = sy + c.clone() * p.y.clone();
            sw = sw + c * p.norm2.clone();
        }
        (sx, sy, sw)
    }

    /// Resonant for the point set: Σλ = 0, Σλv = 0, Σλ|v|² = 0.
    pub fn is_resonant<Z: ExactInt>(&self, points: &[LatticePoint<Z>]) -> bool {
        if self.sum() != 0 {
            return false;
        }
        let (sx, sy, sw) = self.lift_sums(points);
        sx.is_zero() && sy.is_zero() && sw.is_zero()
    }

    /// Σλ_i|v_i|² − |Σλ_i v_i|².
    pub fn quadratic_defect<Z: ExactInt>(&self, points: &[LatticePoint<Z>]) -> Z {
        let (sx, sy, sw) = self.lift_sums(points);
        sw - (sx.clone() * sx + sy.clone() * sy)
    }
}

impl fmt::Display for CoefficientVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.iter() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{i}:{c:+}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for CoefficientVector {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let mut v = CoefficientVector::new();
        for tok in s.split_whitespace() {
            let (i, c) = tok.split_once(':').ok_or_else(|| format!("bad coefficient token `{tok}`"))?;
            let i: usize = i.parse().map_err(|_| format!("bad index in `{tok}`"))?;
            let c: i64 = c.trim_start_matches('+').parse().map_err(|_| format!("bad coefficient in `{tok}`"))?;
            v.add_at(i, c);
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_canonical() {
        let a = CoefficientVector::from_pairs([(3, -1), (5, 2)]);
        let b = CoefficientVector::from_pairs([(3, 1), (7, -1)]);
        assert_eq!(a.add(&b), CoefficientVector::from_pairs([(5, 2), (7, -1)]));
        assert_eq!(a.l1(), 3);
        assert_eq!(a.sum(), 1);
        assert_eq!(a.canonical(), a.neg());
        assert_eq!(a.neg().canonical(), a.neg());
        assert_eq!(a.scale(2).content(), 2);
        let parsed: CoefficientVector = a.to_string().parse().unwrap();
        assert_eq!(parsed, a);
    }

    #[test]
    fn rectangle_defect() {
        let pts = [LatticePoint::of(0, 0), LatticePoint::of(2, 2), LatticePoint::of(2, 0), LatticePoint::of(0, 2)];
        let lam = CoefficientVector::from_pairs([(0, 1), (1, 1), (2, -1), (3, -1)]);
        assert!(lam.is_resonant(&pts));
        // Two parents and a child: right angle at the child.
        let w = CoefficientVector::from_pairs([(0, 1), (1, 1), (2, -1)]);
        assert_eq!(w.quadratic_defect(&pts), 0);
    }
}
