use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_traits::{Num, NumAssign};

use super::dd::DoubleDouble;

/// Scalar field used by the integrators and vector fields.
pub trait Real:
    Copy + Send + Sync + PartialOrd + Debug + Display + Num + NumAssign + Neg<Output = Self> + 'static
{
    /// Short tag used in output headers.
    const TAG: &'static str;
    /// Unit roundoff.
    const EPS: f64;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn atan2(self, x: Self) -> Self;

    fn from_i64(k: i64) -> Self {
        Self::from_f64(k as f64)
    }

    fn maxv(self, o: Self) -> Self {
        if self >= o {
            self
        } else {
            o
        }
    }
}

impl Real for f64 {
    const TAG: &'static str = "f64";
    const EPS: f64 = f64::EPSILON;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
}

impl Real for DoubleDouble {
    const TAG: &'static str = "dd";
    const EPS: f64 = 4.93e-32;

    fn from_f64(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
    fn to_f64(self) -> f64 {
        DoubleDouble::to_f64(self)
    }
    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }
    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
    fn exp(self) -> Self {
        DoubleDouble::exp(self)
    }
    fn ln(self) -> Self {
        DoubleDouble::ln(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        DoubleDouble::sin_cos(self)
    }
    fn atan2(self, x: Self) -> Self {
        DoubleDouble::atan2(self, x)
    }
    fn from_i64(k: i64) -> Self {
        let hi = k as f64;
        let lo = (k - hi as i64) as f64;
        DoubleDouble::from_sum(hi, lo)
    }
}

/// Working precision selectable at run time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Precision {
    Double,
    DoubleDouble,
}

impl Precision {
    pub fn tag(self) -> &'static str {
        match self {
            Precision::Double => f64::TAG,
            Precision::DoubleDouble => DoubleDouble::TAG,
        }
    }

    /// Maps a requested number of decimal digits onto the ladder.
    pub fn for_digits(digits: u32) -> Option<Self> {
        match digits {
            0..=15 => Some(Precision::Double),
            16..=31 => Some(Precision::DoubleDouble),
            _ => None,
        }
    }

    pub fn escalate(self) -> Option<Self> {
        match self {
            Precision::Double => Some(Precision::DoubleDouble),
            Precision::DoubleDouble => None,
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "double" | "f64" => Ok(Precision::Double),
            "dd" | "double-double" => Ok(Precision::DoubleDouble),
            other => {
                let digits = other
                    .strip_prefix("extended:")
                    .or_else(|| other.strip_prefix("extended("))
                    .map(|d| d.trim_end_matches(')'))
                    .and_then(|d| d.parse::<u32>().ok())
                    .ok_or_else(|| format!("unknown precision `{other}`"))?;
                Precision::for_digits(digits)
                    .ok_or_else(|| format!("{digits} digits exceeds the double-double ceiling of 31"))
            }
        }
    }
}
