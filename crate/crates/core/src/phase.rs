//! Exact points of the circle group, stored as rational angles mod 1.

use std::fmt;
use std::iter::Product;
use std::ops::{Div, Mul, MulAssign};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// `exp(2πi·angle)` with `angle ∈ [0, 1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Phase(Rational64);

impl Phase {
    pub fn one() -> Self {
        Phase(Rational64::zero())
    }

    /// The phase with angle `num/den` (reduced mod 1).
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_angle(Rational64::new(num, den))
    }

    pub fn from_angle(angle: Rational64) -> Self {
        let frac = angle - angle.floor();
        Phase(frac)
    }

    /// `exp(2πi·j/k)`.
    pub fn root_of_unity(k: u32, j: i64) -> Self {
        Self::new(j, k as i64)
    }

    pub fn angle(&self) -> Rational64 {
        self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_zero()
    }

    pub fn conj(self) -> Self {
        Self::from_angle(-self.0)
    }

    pub fn pow(self, e: i64) -> Self {
        Self::from_angle(self.0 * e)
    }

    /// Smallest `k ≥ 1` with `self^k = 1`.
    pub fn order(&self) -> i64 {
        *self.0.denom()
    }

    pub fn to_complex(self) -> Complex64 {
        let theta = std::f64::consts::TAU * (*self.0.numer() as f64) / (*self.0.denom() as f64);
        Complex64::from_polar(1.0, theta)
    }

    /// Least common multiple of the orders of the given phases.
    pub fn common_order<'a>(phases: impl IntoIterator<Item = &'a Phase>) -> i64 {
        phases.into_iter().fold(1, |acc, p| acc.lcm(&p.order()))
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_angle(self.0 + rhs.0)
    }
}

impl MulAssign for Phase {
    fn mul_assign(&mut self, rhs: Phase) {
        *self = *self * rhs;
    }
}

impl Div for Phase {
    type Output = Phase;
    fn div(self, rhs: Phase) -> Phase {
        Phase::from_angle(self.0 - rhs.0)
    }
}

impl Product for Phase {
    fn product<I: Iterator<Item = Phase>>(iter: I) -> Phase {
        iter.fold(Phase::one(), |a, b| a * b)
    }
}

impl One for Phase {
    fn one() -> Self {
        Phase::one()
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e(2πi·{})", self.0)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Phase {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [*self.0.numer(), *self.0.denom()].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [num, den] = <[i64; 2]>::deserialize(d)?;
        if den == 0 {
            return Err(serde::de::Error::custom("zero denominator in phase"));
        }
        Ok(Phase::new(num, den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_mod_one() {
        let a = Phase::new(3, 4);
        let b = Phase::new(1, 2);
        assert_eq!(a * b, Phase::new(1, 4));
        assert_eq!(a.conj(), Phase::new(1, 4));
        assert_eq!(a / a, Phase::one());
        assert_eq!(Phase::new(-1, 3), Phase::new(2, 3));
        assert_eq!(a.pow(4), Phase::one());
        assert_eq!(a.order(), 4);
    }

    #[test]
    fn complex_lift() {
        let z = Phase::new(1, 4).to_complex();
        assert!((z - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn json_roundtrip() {
        let p = Phase::new(5, 6);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[5,6]");
        assert_eq!(serde_json::from_str::<Phase>(&s).unwrap(), p);
    }
}
