//! Exact scalar arithmetic: big rationals and Gaussian rationals.
//!
//! Everything downstream (semiring values, polytope data, polynomial
//! coefficients) is built on these two types, so equality of computed
//! values is always decidable and bit-for-bit reproducible.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Exact rational number.
pub type Rat = BigRational;

/// Exact complex number with rational real and imaginary parts.
pub type Gaussian = Complex<Rat>;

/// `p/q` as a [`Rat`]. Panics on `q == 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    assert!(q != 0, "zero denominator");
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Integer as a [`Rat`].
pub fn rat_int(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

/// Gaussian rational from rational real and imaginary parts.
pub fn gaussian(re: Rat, im: Rat) -> Gaussian {
    Complex::new(re, im)
}

/// Real Gaussian rational from integers `p/q`.
pub fn gauss_rat(p: i64, q: i64) -> Gaussian {
    Complex::new(rat(p, q), Rat::zero())
}

/// Real Gaussian rational from an integer.
pub fn gauss_int(p: i64) -> Gaussian {
    Complex::new(rat_int(p), Rat::zero())
}

/// Gaussian rational from integer real and imaginary parts.
pub fn gauss_parts(re: i64, im: i64) -> Gaussian {
    Complex::new(rat_int(re), rat_int(im))
}

/// Exact inverse; `None` on zero.
pub fn gauss_inv(z: &Gaussian) -> Option<Gaussian> {
    let n = z.re.clone() * &z.re + z.im.clone() * &z.im;
    if n.is_zero() {
        return None;
    }
    Some(Complex::new(z.re.clone() / &n, -z.im.clone() / &n))
}

/// `z^k` for integer `k` (negative powers require `z != 0`).
pub fn gauss_pow(z: &Gaussian, k: i64) -> Option<Gaussian> {
    let base = if k < 0 { gauss_inv(z)? } else { z.clone() };
    let mut acc = Gaussian::one();
    for _ in 0..k.unsigned_abs() {
        acc *= &base;
    }
    Some(acc)
}

/// Squared magnitude `re^2 + im^2`, exact.
pub fn gauss_norm_sq(z: &Gaussian) -> Rat {
    z.re.clone() * &z.re + z.im.clone() * &z.im
}

/// Canonical text form of a rational: `p` when the denominator is 1,
/// otherwise `p/q` in lowest terms with the sign on the numerator.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text form of a Gaussian rational: `a`, `bi`, or `a+bi`/`a-bi`.
pub fn gauss_to_string(z: &Gaussian) -> String {
    if z.im.is_zero() {
        return rat_to_string(&z.re);
    }
    let im_part = if z.im.is_one() {
        "i".to_string()
    } else if (-z.im.clone()).is_one() {
        "-i".to_string()
    } else {
        format!("{}i", rat_to_string(&z.im))
    };
    if z.re.is_zero() {
        return im_part;
    }
    if z.im.is_negative() {
        format!("{}{}", rat_to_string(&z.re), im_part)
    } else {
        format!("{}+{}", rat_to_string(&z.re), im_part)
    }
}

/// Parse the canonical rational form `p` or `p/q`.
pub fn rat_from_str(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(Rat::from_integer),
        Some((p, q)) => {
            let p = p.trim().parse::<BigInt>().ok()?;
            let q = q.trim().parse::<BigInt>().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rat::new(p, q))
            }
        }
    }
}

/// Lossy conversion for rendering.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Lossy conversion for rendering and numeric estimation.
pub fn gauss_to_c64(z: &Gaussian) -> num_complex::Complex64 {
    num_complex::Complex64::new(rat_to_f64(&z.re), rat_to_f64(&z.im))
}

/// Wrapper that displays a rational in canonical form.
pub struct DisplayRat<'a>(pub &'a Rat);

impl fmt::Display for DisplayRat<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rat_to_string(self.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        for (p, q) in [(1, 2), (-3, 4), (7, 1), (0, 5), (-10, 3)] {
            let r = rat(p, q);
            assert_eq!(rat_from_str(&rat_to_string(&r)).unwrap(), r);
        }
    }

    #[test]
    fn gaussian_inverse() {
        let z = gauss_parts(3, -4);
        let w = gauss_inv(&z).unwrap();
        assert_eq!(z * w, Gaussian::one());
        assert!(gauss_inv(&gauss_int(0)).is_none());
    }

    #[test]
    fn gaussian_rendering() {
        assert_eq!(gauss_to_string(&gauss_int(5)), "5");
        assert_eq!(gauss_to_string(&gauss_parts(1, 1)), "1+i");
        assert_eq!(gauss_to_string(&gauss_parts(0, -2)), "-2i");
        assert_eq!(gauss_to_string(&gaussian(rat(1, 2), rat(-3, 2))), "1/2-3/2i");
    }

    #[test]
    fn integer_powers() {
        let z = gauss_parts(0, 1);
        assert_eq!(gauss_pow(&z, 2).unwrap(), gauss_int(-1));
        assert_eq!(gauss_pow(&z, -1).unwrap(), gauss_parts(0, -1));
    }
}
