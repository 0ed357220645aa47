use std::fmt::{self, Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Integer backend for exact lattice computations.
pub trait ExactInt: Clone + Ord + Hash + Debug + Display + Send + Sync + Integer + Signed + From<i32> + 'static {
    fn from_bigint(b: &BigInt) -> Option<Self>;
    fn to_bigint(&self) -> BigInt;
}

impl ExactInt for i64 {
    fn from_bigint(b: &BigInt) -> Option<Self> {
        b.to_i64()
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl ExactInt for i128 {
    fn from_bigint(b: &BigInt) -> Option<Self> {
        b.to_i128()
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl ExactInt for BigInt {
    fn from_bigint(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

/// A point of Z² with its squared norm cached. Ordered lexicographically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LatticePoint<Z = i64> {
    pub x: Z,
    pub y: Z,
    pub norm2: Z,
}

impl<Z: ExactInt> LatticePoint<Z> {
    pub fn new(x: Z, y: Z) -> Self {
        let norm2 = x.clone() * x.clone() + y.clone() * y.clone();
        LatticePoint { x, y, norm2 }
    }

    pub fn zero() -> Self {
        Self::new(Z::zero(), Z::zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.x.clone() + o.x.clone(), self.y.clone() + o.y.clone())
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.x.clone() - o.x.clone(), self.y.clone() - o.y.clone())
    }

    pub fn scale(&self, m: &Z) -> Self {
        Self::new(self.x.clone() * m.clone(), self.y.clone() * m.clone())
    }

    pub fn dot(&self, o: &Self) -> Z {
        self.x.clone() * o.x.clone() + self.y.clone() * o.y.clone()
    }

    /// Re-expresses the point in another integer backend, if it fits.
    pub fn convert<W: ExactInt>(&self) -> Option<LatticePoint<W>> {
        Some(LatticePoint::new(W::from_bigint(&self.x.to_bigint())?, W::from_bigint(&self.y.to_bigint())?))
    }

    pub fn max_abs_coord(&self) -> Z {
        self.x.abs().max(self.y.abs())
    }
}

impl LatticePoint<i64> {
    pub fn of(x: i64, y: i64) -> Self {
        Self::new(x, y)
    }
}

impl<Z: ExactInt> Display for LatticePoint<Z> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A point of Q² in exact arithmetic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RationalPoint {
    pub x: BigRational,
    pub y: BigRational,
}

impl RationalPoint {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        RationalPoint { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        RationalPoint { x: BigRational::from_integer(x.into()), y: BigRational::from_integer(y.into()) }
    }

    pub fn from_lattice<Z: ExactInt>(p: &LatticePoint<Z>) -> Self {
        RationalPoint { x: BigRational::from_integer(p.x.to_bigint()), y: BigRational::from_integer(p.y.to_bigint()) }
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn norm2(&self) -> BigRational {
        &self.x * &self.x + &self.y * &self.y
    }

    pub fn add(&self, o: &Self) -> Self {
        RationalPoint { x: &self.x + &o.x, y: &self.y + &o.y }
    }

    pub fn sub(&self, o: &Self) -> Self {
        RationalPoint { x: &self.x - &o.x, y: &self.y - &o.y }
    }

    pub fn scale(&self, m: &BigRational) -> Self {
        RationalPoint { x: &self.x * m, y: &self.y * m }
    }

    pub fn dot(&self, o: &Self) -> BigRational {
        &self.x * &o.x + &self.y * &o.y
    }

    /// Rotation by a quarter turn.
    pub fn perp(&self) -> Self {
        RationalPoint { x: -self.y.clone(), y: self.x.clone() }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64().unwrap_or(f64::NAN), self.y.to_f64().unwrap_or(f64::NAN))
    }

    /// `Some` when both coordinates are integers.
    pub fn to_lattice(&self) -> Option<LatticePoint<BigInt>> {
        (self.x.is_integer() && self.y.is_integer()).then(|| LatticePoint::new(self.x.to_integer(), self.y.to_integer()))
    }

    pub fn denominator_lcm(&self) -> BigInt {
        self.x.denom().lcm(self.y.denom())
    }
}

impl Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Largest absolute coordinate over a point set.
pub fn max_coordinate<Z: ExactInt>(points: &[LatticePoint<Z>]) -> BigInt {
    points.iter().map(|p| p.max_abs_coord().to_bigint()).max().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_are_exact() {
        let p = LatticePoint::of(3, -4);
        assert_eq!(p.norm2, 25);
        let big: LatticePoint<BigInt> = p.convert().unwrap();
        assert_eq!(big.norm2, BigInt::from(25));
    }

    #[test]
    fn lexicographic_order() {
        assert!(LatticePoint::of(0, 5) < LatticePoint::of(1, -5));
        assert!(LatticePoint::of(1, -5) < LatticePoint::of(1, 0));
    }

    #[test]
    fn rational_to_lattice() {
        let p = RationalPoint::new(BigRational::new(12.into(), 5.into()), BigRational::new(6.into(), 5.into()));
        assert!(p.to_lattice().is_none());
        assert_eq!(p.denominator_lcm(), BigInt::from(5));
        assert_eq!(p.scale(&BigRational::from_integer(5.into())).to_lattice().unwrap(), LatticePoint::new(BigInt::from(12), BigInt::from(6)));
    }
}
