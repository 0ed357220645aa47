//! Double-double arithmetic: an unevaluated sum `hi + lo` of two non-overlapping
//! `f64`s, giving roughly 31 significant decimal digits.
//!
//! The algorithms are the classical error-free transformations (Dekker, Knuth)
//! in the form popularised by the QD library.

use std::cmp::Ordering;
use std::fmt;
use std::num::ParseFloatError;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_traits::{Num, One, Zero};

#[derive(Clone, Copy, Debug, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

pub const DD_PI: DoubleDouble = DoubleDouble { hi: 3.141592653589793116e+00, lo: 1.224646799147353207e-16 };
pub const DD_LN2: DoubleDouble = DoubleDouble { hi: 6.931471805599452862e-01, lo: 2.319046813846299558e-17 };

impl DoubleDouble {
    pub const fn new(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    pub const fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    /// Exact sum of two doubles.
    pub fn from_sum(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        DoubleDouble { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        DoubleDouble { hi, lo }
    }

    fn sqr(self) -> Self {
        let (p, e) = two_prod(self.hi, self.hi);
        let (hi, lo) = quick_two_sum(p, e + 2.0 * self.hi * self.lo);
        DoubleDouble { hi, lo }
    }

    fn ldexp(self, k: i32) -> Self {
        let f = 2f64.powi(k);
        DoubleDouble { hi: self.hi * f, lo: self.lo * f }
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            let (h, l) = quick_two_sum(hi, self.lo.floor());
            DoubleDouble { hi: h, lo: l }
        } else {
            DoubleDouble { hi, lo: 0.0 }
        }
    }

    pub fn round(self) -> Self {
        (self + DoubleDouble::from_f64(0.5)).floor()
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Self::zero() } else { DoubleDouble::from_f64(f64::NAN) };
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let corr = (self - DoubleDouble::from_f64(ax).sqr()).hi * (x * 0.5);
        DoubleDouble::from_sum(ax, corr)
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return DoubleDouble::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Self::zero();
        }
        let k = (self.hi / DD_LN2.hi + 0.5).floor();
        let r = (self - DD_LN2.mul_f64(k)).ldexp(-9);
        // expm1 on the reduced argument, then undo the reduction by squaring.
        let mut term = r;
        let mut sum = r;
        let mut i = 2.0;
        loop {
            term = term * r / DoubleDouble::from_f64(i);
            sum += term;
            if term.hi.abs() <= 1e-33 * sum.hi.abs().max(1e-300) {
                break;
            }
            i += 1.0;
        }
        for _ in 0..9 {
            sum = sum.ldexp(1) + sum.sqr();
        }
        (sum + Self::one()).ldexp(k as i32)
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::from_f64(f64::NAN);
        }
        let x = DoubleDouble::from_f64(self.hi.ln());
        x + self * (-x).exp() - Self::one()
    }

    /// sin and cos of an argument already reduced to |t| ≤ π/4.
    fn sin_cos_reduced(t: Self) -> (Self, Self) {
        let t2 = t.sqr();
        let mut s = t;
        let mut term = t;
        let mut k = 1.0;
        while term.hi.abs() > 1e-34 {
            term = -(term * t2) / DoubleDouble::from_f64((k + 1.0) * (k + 2.0));
            s += term;
            k += 2.0;
        }
        let mut c = Self::one();
        let mut term = Self::one();
        let mut k = 0.0;
        while term.hi.abs() > 1e-34 {
            term = -(term * t2) / DoubleDouble::from_f64((k + 1.0) * (k + 2.0));
            c += term;
            k += 2.0;
        }
        (s, c)
    }

    pub fn sin_cos(self) -> (Self, Self) {
        let two_pi = DD_PI.ldexp(1);
        let z = (self / two_pi).round();
        let r = self - two_pi * z;
        let half_pi = DD_PI.ldexp(-1);
        let j = (r / half_pi).round();
        let t = r - half_pi * j;
        let (s, c) = Self::sin_cos_reduced(t);
        match (j.hi as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    pub fn sin(self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(self) -> Self {
        self.sin_cos().1
    }

    pub fn atan2(self, x: Self) -> Self {
        let y = self;
        if x.is_zero() && y.is_zero() {
            return Self::zero();
        }
        let mut theta = DoubleDouble::from_f64(y.hi.atan2(x.hi));
        let r = (x.sqr() + y.sqr()).sqrt();
        let (xx, yy) = (x / r, y / r);
        for _ in 0..2 {
            let (s, c) = theta.sin_cos();
            if xx.hi.abs() > yy.hi.abs() {
                theta += (yy - s) / c;
            } else {
                theta -= (xx - c) / s;
            }
        }
        theta
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
}

impl PartialEq for DoubleDouble {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            o => Some(o),
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * b.lo + self.lo * b.hi));
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::from_f64(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        let q = self / b;
        let q = if q.hi < 0.0 { -((-q).floor()) } else { q.floor() };
        self - b * q
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for DoubleDouble {
            fn $m(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    };
}
assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);
assign_op!(RemAssign, rem_assign, %);

impl Zero for DoubleDouble {
    fn zero() -> Self {
        DoubleDouble { hi: 0.0, lo: 0.0 }
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        DoubleDouble { hi: 1.0, lo: 0.0 }
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = ParseFloatError;
    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, ParseFloatError> {
        s.parse::<f64>().map(DoubleDouble::from_f64)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}{:+e}", self.hi, self.lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from a 200-bit mpmath evaluation, split as (hi, lo).
    fn close(x: DoubleDouble, hi: f64, lo: f64, tol: f64) -> bool {
        let d = (x - DoubleDouble::new(hi, lo)).to_f64().abs();
        d <= tol * hi.abs().max(1e-300)
    }

    #[test]
    fn division_keeps_low_word() {
        let third = DoubleDouble::one() / DoubleDouble::from_f64(3.0);
        assert!(close(third, 0.3333333333333333, 1.850371707708594e-17, 1e-31));
    }

    #[test]
    fn sqrt_exp_ln() {
        assert!(close(DoubleDouble::from_f64(2.0).sqrt(), 1.4142135623730951, -9.667293313452913e-17, 1e-31));
        assert!(close(DoubleDouble::from_f64(0.7).exp(), 2.0137527074704766, -2.0058243549764793e-16, 1e-30));
        assert!(close(DoubleDouble::from_f64(3.0).ln(), 1.0986122886681098, -9.07129723500153e-17, 1e-30));
    }

    #[test]
    fn trig() {
        assert!(close(DoubleDouble::from_f64(0.7).sin(), 0.644217687237691, 2.8740567927338755e-18, 1e-30));
        assert!(close(DoubleDouble::from_f64(1.3).cos(), 0.26749882862458735, 1.6094564897898917e-17, 1e-30));
        let a = DoubleDouble::from_f64(0.3).atan2(DoubleDouble::from_f64(0.8));
        assert!(close(a, 0.3587706702705722, 4.702664808066854e-19, 1e-30));
        let (s, c) = DoubleDouble::from_f64(10.0).sin_cos();
        assert!(((s * s + c * c) - DoubleDouble::one()).to_f64().abs() < 1e-30);
    }

    #[test]
    fn ordering_and_rem() {
        let a = DoubleDouble::from_sum(1.0, 1e-20);
        assert!(a > DoubleDouble::one());
        let r = DoubleDouble::from_f64(7.5) % DoubleDouble::from_f64(2.0);
        assert_eq!(r.to_f64(), 1.5);
    }
}
