//! Rational scalars and the quadratic ring Z[√2].

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Arbitrary-precision rational. `Ratio<BigInt>` keeps gcd-reduced form with
/// a positive denominator, which is exactly the invariant we need.
pub type Rat = Ratio<BigInt>;

/// Shorthand for an integer rational.
pub fn rat_int(n: i64) -> Rat {
    Ratio::from_integer(BigInt::from(n))
}

/// Shorthand for `p/q`.
pub fn rat(p: i64, q: i64) -> Rat {
    Ratio::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p"` or `"p/q"` into a rational. Used by the spec-file reader.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let p: BigInt = num
            .trim()
            .parse()
            .map_err(|_| format!("invalid numerator in {s:?}"))?;
        let q: BigInt = den
            .trim()
            .parse()
            .map_err(|_| format!("invalid denominator in {s:?}"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(Ratio::new(p, q))
    } else {
        let p: BigInt = s.parse().map_err(|_| format!("invalid integer {s:?}"))?;
        Ok(Ratio::from_integer(p))
    }
}

/// Formats a rational as `"p"` or `"p/q"`, inverse to [`parse_rat`].
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Reduces a rational into `[0, 1)` by subtracting its floor.
pub fn rat_mod_one(r: &Rat) -> Rat {
    r - r.floor()
}

/// Rounds to f64; fine for diagnostics, never used in decisions.
pub fn rat_to_f64(r: &Rat) -> f64 {
    let n = r.numer();
    let d = r.denom();
    // Exact when representable; otherwise splits into quotient plus remainder.
    let q = n / d;
    let rem = n - &q * d;
    let qf = q.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let remf = rem.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let df = d.to_string().parse::<f64>().unwrap_or(f64::NAN);
    qf + remf / df
}

/// An element a + b√2 of the ring Z[√2].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadInt {
    pub a: BigInt,
    pub b: BigInt,
}

impl QuadInt {
    pub fn new(a: i64, b: i64) -> Self {
        QuadInt {
            a: BigInt::from(a),
            b: BigInt::from(b),
        }
    }

    pub fn zero() -> Self {
        QuadInt::new(0, 0)
    }

    pub fn one() -> Self {
        QuadInt::new(1, 0)
    }

    pub fn sqrt2() -> Self {
        QuadInt::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Galois conjugate a + b√2 ↦ a − b√2.
    pub fn conj(&self) -> Self {
        QuadInt {
            a: self.a.clone(),
            b: -self.b.clone(),
        }
    }

    /// Field norm (a + b√2)(a − b√2) = a² − 2b².
    pub fn norm(&self) -> BigInt {
        &self.a * &self.a - BigInt::from(2) * &self.b * &self.b
    }

    /// Sign of a + b√2 as a real number, decided exactly.
    ///
    /// Compares a² against 2b² when the terms disagree in sign.
    pub fn signum(&self) -> i32 {
        use std::cmp::Ordering;
        let sa = num_sign(&self.a);
        let sb = num_sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // Opposite signs: |a| vs √2|b| decided by a² vs 2b².
        let a2 = &self.a * &self.a;
        let b2 = BigInt::from(2) * &self.b * &self.b;
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    /// Value as f64 for diagnostics.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_string().parse::<f64>().unwrap_or(f64::NAN);
        let b = self.b.to_string().parse::<f64>().unwrap_or(f64::NAN);
        a + b * std::f64::consts::SQRT_2
    }
}

fn num_sign(n: &BigInt) -> i32 {
    if n.is_zero() {
        0
    } else if n.is_positive() {
        1
    } else {
        -1
    }
}

impl fmt::Debug for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}√2", self.b)
        } else {
            write!(f, "{}+{}√2", self.a, self.b)
        }
    }
}

impl Add for &QuadInt {
    type Output = QuadInt;
    fn add(self, rhs: &QuadInt) -> QuadInt {
        QuadInt {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl Sub for &QuadInt {
    type Output = QuadInt;
    fn sub(self, rhs: &QuadInt) -> QuadInt {
        QuadInt {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
}

impl Mul for &QuadInt {
    type Output = QuadInt;
    fn mul(self, rhs: &QuadInt) -> QuadInt {
        // (a + b√2)(c + d√2) = ac + 2bd + (ad + bc)√2
        QuadInt {
            a: &self.a * &rhs.a + BigInt::from(2) * &self.b * &rhs.b,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
}

impl Neg for &QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt {
            a: -self.a.clone(),
            b: -self.b.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3", "-7", "1/2", "-22/7", "0"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(rat_to_string(&r), s);
        }
        assert_eq!(rat_to_string(&parse_rat("2/4").unwrap()), "1/2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn mod_one_lands_in_unit_interval() {
        let r = rat_mod_one(&rat(-7, 3));
        assert_eq!(r, rat(2, 3));
        assert_eq!(rat_mod_one(&rat_int(5)), rat_int(0));
    }

    #[test]
    fn quadint_ring_ops() {
        let x = QuadInt::new(1, 1); // 1 + √2
        let y = QuadInt::new(3, 2); // 3 + 2√2
        let p = &x * &y; // 3 + 4 + (2+3)√2 = 7 + 5√2
        assert_eq!(p, QuadInt::new(7, 5));
        // (3+2√2)(3-2√2) = 9 - 8 = 1: a unit.
        assert_eq!(y.norm(), BigInt::from(1));
    }

    #[test]
    fn quadint_sign_is_exact() {
        // 3 - 2√2 ≈ 0.17 > 0, -3 + 2√2 < 0, 2 - √2 > 0, 1 - √2 < 0.
        assert_eq!(QuadInt::new(3, -2).signum(), 1);
        assert_eq!(QuadInt::new(-3, 2).signum(), -1);
        assert_eq!(QuadInt::new(2, -1).signum(), 1);
        assert_eq!(QuadInt::new(1, -1).signum(), -1);
        assert_eq!(QuadInt::zero().signum(), 0);
    }
}
