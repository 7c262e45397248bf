//! The tropical semiring `tℝ` and the exploded semiring `ℂ⟨tℝ⟩`.
//!
//! A tropical value is a formal power `t^x` with rational exponent;
//! multiplication adds exponents and addition takes the minimum. An exploded
//! value is a pair `c·t^x` with a Gaussian-rational coefficient. Addition
//! keeps the term of smallest exponent and merges coefficients on ties; it
//! never consults coefficient magnitude, so `0·t^x` values are legitimate
//! elements that remember their exponent. `t` is to be thought of as
//! infinitesimally small and positive, which fixes the order conventions.

use crate::arith::{gauss_to_string, rat_int, rat_to_string, Gaussian, Rat};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemiringError {
    #[error("value has negative exponent and lies outside the positive semiring")]
    NegativeExponent,
    #[error("comparison requires strictly positive real coefficients")]
    NotPositiveReal,
}

/// `t^x` in the tropical semiring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TropicalValue {
    exponent: Rat,
}

impl TropicalValue {
    pub fn new(exponent: Rat) -> TropicalValue {
        TropicalValue { exponent }
    }

    pub fn from_int(exponent: i64) -> TropicalValue {
        TropicalValue { exponent: rat_int(exponent) }
    }

    pub fn exponent(&self) -> &Rat {
        &self.exponent
    }

    /// Multiplicative identity `t^0`.
    pub fn one() -> TropicalValue {
        TropicalValue { exponent: Rat::zero() }
    }
}

impl Mul for TropicalValue {
    type Output = TropicalValue;
    fn mul(self, rhs: TropicalValue) -> TropicalValue {
        TropicalValue { exponent: self.exponent + rhs.exponent }
    }
}

impl Mul for &TropicalValue {
    type Output = TropicalValue;
    fn mul(self, rhs: &TropicalValue) -> TropicalValue {
        TropicalValue { exponent: self.exponent.clone() + &rhs.exponent }
    }
}

impl Add for TropicalValue {
    type Output = TropicalValue;
    fn add(self, rhs: TropicalValue) -> TropicalValue {
        TropicalValue { exponent: self.exponent.min(rhs.exponent) }
    }
}

impl Add for &TropicalValue {
    type Output = TropicalValue;
    fn add(self, rhs: &TropicalValue) -> TropicalValue {
        (self.clone()) + rhs.clone()
    }
}

/// The semiring order: `t` is infinitesimally small, so `t^x > t^y`
/// exactly when `x < y`.
impl PartialOrd for TropicalValue {
    fn partial_cmp(&self, other: &TropicalValue) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TropicalValue {
    fn cmp(&self, other: &TropicalValue) -> Ordering {
        other.exponent.cmp(&self.exponent)
    }
}

impl fmt::Display for TropicalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t^{}", rat_to_string(&self.exponent))
    }
}

/// `c·t^x` in the exploded semiring. No normalization is performed:
/// `(0, x)` and `(0, y)` are distinct values when `x ≠ y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplodedValue {
    coeff: Gaussian,
    exponent: Rat,
}

impl ExplodedValue {
    pub fn new(coeff: Gaussian, exponent: Rat) -> ExplodedValue {
        ExplodedValue { coeff, exponent }
    }

    /// Real integer coefficient and integer exponent.
    pub fn from_ints(coeff: i64, exponent: i64) -> ExplodedValue {
        ExplodedValue::new(crate::arith::gauss_int(coeff), rat_int(exponent))
    }

    pub fn coeff(&self) -> &Gaussian {
        &self.coeff
    }

    pub fn exponent(&self) -> &Rat {
        &self.exponent
    }

    /// Multiplicative identity `1·t^0`.
    pub fn one() -> ExplodedValue {
        ExplodedValue::new(Gaussian::one(), Rat::zero())
    }

    pub fn has_zero_coeff(&self) -> bool {
        self.coeff.re.is_zero() && self.coeff.im.is_zero()
    }

    /// The exponent-only shadow `⌊c·t^x⌋ = t^x`; a semiring homomorphism
    /// onto the tropical semiring.
    pub fn tropical_part(&self) -> TropicalValue {
        TropicalValue::new(self.exponent.clone())
    }

    /// The smooth part: `c` when `x = 0`, `0` when `x > 0`. Only defined on
    /// the positive semiring `ℂ⟨tℝ⁺⟩`.
    pub fn smooth_part(&self) -> Result<Gaussian, SemiringError> {
        if self.exponent.is_negative() {
            return Err(SemiringError::NegativeExponent);
        }
        if self.exponent.is_zero() {
            Ok(self.coeff.clone())
        } else {
            Ok(Gaussian::zero())
        }
    }

    /// The order on `(0,∞)tℝ`: values with larger exponent are smaller
    /// (infinitesimally so); on equal exponents coefficients decide. Only
    /// strictly positive real coefficients are comparable.
    pub fn cmp_positive(&self, other: &ExplodedValue) -> Result<Ordering, SemiringError> {
        for v in [self, other] {
            if !v.coeff.im.is_zero() || !v.coeff.re.is_positive() {
                return Err(SemiringError::NotPositiveReal);
            }
        }
        Ok(other
            .exponent
            .cmp(&self.exponent)
            .then_with(|| self.coeff.re.cmp(&other.coeff.re)))
    }
}

impl Mul for ExplodedValue {
    type Output = ExplodedValue;
    fn mul(self, rhs: ExplodedValue) -> ExplodedValue {
        ExplodedValue { coeff: self.coeff * rhs.coeff, exponent: self.exponent + rhs.exponent }
    }
}

impl Mul for &ExplodedValue {
    type Output = ExplodedValue;
    fn mul(self, rhs: &ExplodedValue) -> ExplodedValue {
        self.clone() * rhs.clone()
    }
}

impl Add for ExplodedValue {
    type Output = ExplodedValue;
    fn add(self, rhs: ExplodedValue) -> ExplodedValue {
        match self.exponent.cmp(&rhs.exponent) {
            Ordering::Less => self,
            Ordering::Greater => rhs,
            Ordering::Equal => {
                ExplodedValue { coeff: self.coeff + rhs.coeff, exponent: self.exponent }
            }
        }
    }
}

impl Add for &ExplodedValue {
    type Output = ExplodedValue;
    fn add(self, rhs: &ExplodedValue) -> ExplodedValue {
        self.clone() + rhs.clone()
    }
}

impl fmt::Display for ExplodedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = if self.coeff.im.is_zero() {
            gauss_to_string(&self.coeff)
        } else {
            format!("({})", gauss_to_string(&self.coeff))
        };
        write!(f, "{} t^{}", c, rat_to_string(&self.exponent))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{gauss_int, gauss_parts, rat};

    #[test]
    fn tropical_operations() {
        let t = TropicalValue::from_int;
        assert_eq!(t(1) * t(2), t(3));
        assert_eq!(TropicalValue::one() * TropicalValue::new(rat(5, 3)), TropicalValue::new(rat(5, 3)));
        assert_eq!(TropicalValue::new(rat(1, 2)) * TropicalValue::new(rat(-1, 2)), t(0));
        assert_eq!(t(1) + t(2), t(1));
        assert_eq!(t(7) + t(7), t(7));
        assert_eq!(t(-3) + t(0), t(-3));
        // t^1 is smaller than t^0 in the semiring order.
        assert!(t(1) < t(0));
    }

    #[test]
    fn exploded_multiplication() {
        let v = ExplodedValue::from_ints;
        assert_eq!(v(2, 1) * v(3, 2), v(6, 3));
        assert_eq!(ExplodedValue::one() * v(4, 2), v(4, 2));
        assert_eq!(v(0, 1) * v(5, 2), v(0, 3));
    }

    #[test]
    fn exploded_addition_case_split() {
        let v = ExplodedValue::from_ints;
        assert_eq!(v(3, 1) + v(5, 2), v(3, 1));
        assert_eq!(v(2, 0) + v(3, 0), v(5, 0));
        // Cancellation keeps the exponent.
        assert_eq!(v(1, 0) + v(-1, 0), v(0, 0));
        assert_ne!(v(0, 0), v(0, 1));
        // A zero coefficient still wins on smaller exponent.
        assert_eq!(v(0, 0) + v(1, 1), v(0, 0));
    }

    #[test]
    fn tropical_part_is_a_homomorphism() {
        let a = ExplodedValue::from_ints(1, 1);
        let b = ExplodedValue::from_ints(2, 3);
        let sum = &a + &b;
        assert_eq!(sum.tropical_part(), TropicalValue::from_int(1));
        assert_eq!(
            sum.tropical_part(),
            a.tropical_part() + b.tropical_part()
        );
        let prod = &a * &b;
        assert_eq!(prod.tropical_part(), a.tropical_part() * b.tropical_part());
    }

    #[test]
    fn smooth_part_cases() {
        assert_eq!(ExplodedValue::from_ints(5, 0).smooth_part().unwrap(), gauss_int(5));
        assert_eq!(ExplodedValue::from_ints(5, 2).smooth_part().unwrap(), gauss_int(0));
        assert_eq!(ExplodedValue::from_ints(0, 0).smooth_part().unwrap(), gauss_int(0));
        assert_eq!(
            ExplodedValue::from_ints(1, -1).smooth_part(),
            Err(SemiringError::NegativeExponent)
        );
    }

    #[test]
    fn positive_order() {
        let v = ExplodedValue::from_ints;
        // Larger exponent means smaller value.
        assert_eq!(v(5, 1).cmp_positive(&v(1, 0)).unwrap(), Ordering::Less);
        assert_eq!(v(1, 0).cmp_positive(&v(2, 0)).unwrap(), Ordering::Less);
        assert_eq!(v(3, 2).cmp_positive(&v(3, 2)).unwrap(), Ordering::Equal);
        assert_eq!(v(-1, 0).cmp_positive(&v(1, 0)), Err(SemiringError::NotPositiveReal));
        assert_eq!(
            ExplodedValue::new(gauss_parts(1, 1), rat_int(0)).cmp_positive(&v(1, 0)),
            Err(SemiringError::NotPositiveReal)
        );
        assert_eq!(v(0, 0).cmp_positive(&v(1, 0)), Err(SemiringError::NotPositiveReal));
    }

    #[test]
    fn display_forms() {
        assert_eq!(TropicalValue::new(rat(1, 2)).to_string(), "t^1/2");
        assert_eq!(ExplodedValue::from_ints(5, 2).to_string(), "5 t^2");
        let z = ExplodedValue::new(gauss_parts(1, 1), rat(1, 3));
        assert_eq!(z.to_string(), "(1+i) t^1/3");
    }
}
