//! Integer polynomials, ascending degree.

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};
use std::fmt;

/// coefficients[k] multiplies x^k; the leading coefficient is nonzero
/// unless the polynomial is zero.
#[derive(Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coefficients: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coefficients: Vec<BigInt>) -> Self {
        while coefficients.len() > 1 && coefficients.last().map_or(false, Zero::is_zero) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(BigInt::zero());
        }
        IntPolynomial { coefficients }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPolynomial::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// x^n − 1.
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut c = vec![BigInt::zero(); n + 1];
        c[0] = -BigInt::one();
        c[n] = BigInt::one();
        IntPolynomial::new(c)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.len() == 1 && self.coefficients[0].is_zero()
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn coeffs_i64(&self) -> Vec<i64> {
        self.coefficients
            .iter()
            .map(|c| c.to_string().parse().expect("coefficient fits i64"))
            .collect()
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        let x = BigInt::from(x);
        let mut acc = BigInt::zero();
        for c in self.coefficients.iter().rev() {
            acc = acc * &x + c;
        }
        acc
    }

    /// Integer roots by the rational root theorem: a monic integer
    /// polynomial has rational roots only at integer divisors of the
    /// constant term.
    pub fn integer_roots(&self) -> Vec<i64> {
        if self.is_zero() {
            return vec![];
        }
        let c0 = &self.coefficients[0];
        let mut roots = Vec::new();
        if c0.is_zero() {
            roots.push(0);
            // Divide out x and recurse.
            let shifted = IntPolynomial::new(self.coefficients[1..].to_vec());
            for r in shifted.integer_roots() {
                if !roots.contains(&r) {
                    roots.push(r);
                }
            }
            roots.sort_unstable();
            return roots;
        }
        let bound: i64 = match c0.abs().to_string().parse() {
            Ok(v) => v,
            Err(_) => return roots, // constant term too large: no small roots worth scanning
        };
        let mut candidates = Vec::new();
        let mut d = 1i64;
        while d.saturating_mul(d) <= bound && d <= 1_000_000 {
            if bound % d == 0 {
                candidates.push(d);
                candidates.push(bound / d);
            }
            d += 1;
        }
        for d in candidates {
            for cand in [d, -d] {
                if self.eval_i64(cand).is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
        roots.sort_unstable();
        roots
    }

    /// x^d · self(1/x): the reciprocal polynomial. Roots on the unit circle
    /// of a monic integer polynomial are shared with the reciprocal, so
    /// gcd(self, reciprocal) contains every cyclotomic factor with small
    /// coefficients throughout.
    pub fn reciprocal(&self) -> IntPolynomial {
        let mut c: Vec<BigInt> = self.coefficients.iter().rev().cloned().collect();
        if c.last().map_or(false, Signed::is_negative) {
            c = c.iter().map(|x| -x).collect();
        }
        IntPolynomial::new(c)
    }

    /// gcd(self, x^n − 1) for monic `self`, via x^n mod self computed by
    /// binary exponentiation in Q[x]/(self). Avoids materializing x^n − 1,
    /// whose degree can reach the torsion exponent. Coefficients of the
    /// modular power grow like λ^n for the largest root λ, so keep n to a
    /// few thousand.
    pub fn gcd_with_x_pow_minus_one(&self, n: usize) -> IntPolynomial {
        use crate::exact::rat::Rat;
        let d = self.degree();
        assert!(self.coefficients[d].is_one(), "monic polynomial required");
        if d == 0 {
            return IntPolynomial::from_i64(&[1]);
        }
        let modulus: Vec<Rat> = self.to_rational();
        let reduce = |p: &mut Vec<Rat>| {
            while p.len() > d {
                let top = p.pop().unwrap();
                if top.is_zero() {
                    continue;
                }
                let off = p.len() - d;
                for k in 0..d {
                    let sub = &top * &modulus[k];
                    p[off + k] = &p[off + k] - &sub;
                }
            }
        };
        let mul_mod = |a: &[Rat], b: &[Rat]| -> Vec<Rat> {
            let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
            for (i, ca) in a.iter().enumerate() {
                if ca.is_zero() {
                    continue;
                }
                for (j, cb) in b.iter().enumerate() {
                    if !cb.is_zero() {
                        out[i + j] = &out[i + j] + &(ca * cb);
                    }
                }
            }
            reduce(&mut out);
            out
        };
        // x^n mod self.
        let mut result = vec![Rat::one()];
        let mut base = vec![Rat::zero(), Rat::one()];
        reduce(&mut base);
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = mul_mod(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = mul_mod(&base, &base);
            }
        }
        // gcd(self, x^n − 1) = gcd(self, (x^n mod self) − 1).
        if result.is_empty() {
            result.push(Rat::zero());
        }
        result[0] = &result[0] - &Rat::one();
        let rem_int = from_rational_primitive(&result);
        if rem_int.is_zero() {
            return self.clone();
        }
        self.gcd(&rem_int)
    }

    /// Polynomial gcd over Q, returned with integer coefficients and
    /// positive leading coefficient (primitive part).
    pub fn gcd(&self, other: &IntPolynomial) -> IntPolynomial {
        let mut a = self.to_rational();
        let mut b = other.to_rational();
        while !b.iter().all(Zero::is_zero) {
            let r = poly_rem(&a, &b);
            a = b;
            b = r;
        }
        from_rational_primitive(&a)
    }

    fn to_rational(&self) -> Vec<crate::exact::rat::Rat> {
        self.coefficients
            .iter()
            .map(|c| crate::exact::rat::Rat::from_integer(c.clone()))
            .collect()
    }
}

fn poly_rem(
    a: &[crate::exact::rat::Rat],
    b: &[crate::exact::rat::Rat],
) -> Vec<crate::exact::rat::Rat> {
    use crate::exact::rat::Rat;
    let deg = |p: &[Rat]| p.iter().rposition(|c| !c.is_zero());
    let mut r = a.to_vec();
    let Some(db) = deg(b) else {
        return r;
    };
    let lead_b = b[db].clone();
    while let Some(dr) = deg(&r) {
        if dr < db {
            break;
        }
        let f = &r[dr] / &lead_b;
        for k in 0..=db {
            let sub = &f * &b[k];
            r[dr - db + k] = &r[dr - db + k] - &sub;
        }
    }
    r
}

fn from_rational_primitive(p: &[crate::exact::rat::Rat]) -> IntPolynomial {
    use num::bigint::BigInt;
    let mut denom_lcm = BigInt::one();
    for c in p {
        denom_lcm = denom_lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = p
        .iter()
        .map(|c| c.numer() * (&denom_lcm / c.denom()))
        .collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    let ints = if g.is_zero() {
        ints
    } else {
        ints.iter().map(|c| c / &g).collect()
    };
    let mut poly = IntPolynomial::new(ints);
    if poly.coefficients.last().map_or(false, Signed::is_negative) {
        poly = IntPolynomial::new(poly.coefficients.iter().map(|c| -c).collect());
    }
    poly
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}x"),
                _ => format!("{c}x^{k}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_roots_of_small_polys() {
        // (x-1)(x-2) = x^2 - 3x + 2
        let p = IntPolynomial::from_i64(&[2, -3, 1]);
        assert_eq!(p.integer_roots(), vec![1, 2]);
        // x^2 - 3x + 1: no integer roots
        let p = IntPolynomial::from_i64(&[1, -3, 1]);
        assert!(p.integer_roots().is_empty());
        // x^2(x+1)
        let p = IntPolynomial::from_i64(&[0, 0, 1, 1]);
        assert_eq!(p.integer_roots(), vec![-1, 0]);
    }

    #[test]
    fn gcd_extracts_the_cyclotomic_part() {
        // (x^2+1)(x^2-3x+1) against x^12 - 1: gcd is x^2 + 1.
        let a = IntPolynomial::from_i64(&[1, 0, 1]);
        let b = IntPolynomial::from_i64(&[1, -3, 1]);
        let prod_coeffs = mul(&a, &b);
        let g = prod_coeffs.gcd(&IntPolynomial::x_pow_minus_one(12));
        assert_eq!(g.coeffs_i64(), vec![1, 0, 1]);
        // Same answer through the modular-exponentiation route.
        let g = prod_coeffs.gcd_with_x_pow_minus_one(12);
        assert_eq!(g.coeffs_i64(), vec![1, 0, 1]);
        let g = prod_coeffs.gcd_with_x_pow_minus_one(120);
        assert_eq!(g.coeffs_i64(), vec![1, 0, 1]);
        // Both factors here are reciprocal-invariant (det-1 charpolys are
        // palindromic), so the reciprocal gcd keeps everything.
        let g = prod_coeffs.gcd(&prod_coeffs.reciprocal());
        assert_eq!(g.coeffs_i64(), prod_coeffs.coeffs_i64());
        // A Pisot-type factor is dropped by the reciprocal gcd.
        let mixed = mul(
            &IntPolynomial::from_i64(&[1, 0, 1]),
            &IntPolynomial::from_i64(&[-2, -1, 1]), // x^2 - x - 2 = (x-2)(x+1)
        );
        let g = mixed.gcd(&mixed.reciprocal());
        assert_eq!(g.coeffs_i64(), vec![1, 1, 1, 1]); // (x^2+1)(x+1)
    }

    fn mul(a: &IntPolynomial, b: &IntPolynomial) -> IntPolynomial {
        let mut out = vec![num::BigInt::from(0); a.degree() + b.degree() + 1];
        for (i, ca) in a.coefficients().iter().enumerate() {
            for (j, cb) in b.coefficients().iter().enumerate() {
                out[i + j] += ca * cb;
            }
        }
        IntPolynomial::new(out)
    }
}
