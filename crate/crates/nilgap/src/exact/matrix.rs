//! Dense matrices over Q with exact operations.

use super::poly::IntPolynomial;
use super::rat::{rat_int, Rat};
use super::ExactError;
use num::bigint::BigInt;
use num::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A rows×cols matrix with rational entries, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Rat>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rat>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        RatMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            entries: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rat::one();
        }
        m
    }

    /// Builds a matrix from integer rows; panics on ragged input.
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row.iter().map(|&v| rat_int(v)));
        }
        RatMatrix::new(r, c, entries)
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Rat {
        &mut self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[Rat]> {
        self.entries.chunks(self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.at(i, j).is_one()
                    } else {
                        self.at(i, j).is_zero()
                    }
                })
            })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Rat::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|e| e.denom().is_one())
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        t
    }

    pub fn trace(&self) -> Rat {
        (0..self.rows.min(self.cols))
            .map(|i| self.at(i, i).clone())
            .fold(Rat::zero(), |a, b| a + b)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.cols {
                    if !self.at(i, j).is_zero() && !v[j].is_zero() {
                        acc += self.at(i, j) * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    /// Exact determinant by fraction-free Gaussian elimination.
    pub fn det(&self) -> Result<Rat, ExactError> {
        if !self.is_square() {
            return Err(ExactError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.entries.clone();
        let mut det = Rat::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r * n + col].is_zero());
            let Some(p) = pivot else {
                return Ok(Rat::zero());
            };
            if p != col {
                for j in 0..n {
                    a.swap(p * n + j, col * n + j);
                }
                det = -det;
            }
            let pv = a[col * n + col].clone();
            det *= &pv;
            for r in col + 1..n {
                if a[r * n + col].is_zero() {
                    continue;
                }
                let f = &a[r * n + col] / &pv;
                for j in col..n {
                    let sub = &f * &a[col * n + j];
                    a[r * n + j] = &a[r * n + j] - &sub;
                }
            }
        }
        Ok(det)
    }

    /// Exact inverse via the adjugate; requires det ≠ 0. For unimodular
    /// integer matrices this keeps every intermediate integral.
    pub fn inverse(&self) -> Result<RatMatrix, ExactError> {
        if !self.is_square() {
            return Err(ExactError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let det = self.det()?;
        if det.is_zero() {
            return Err(ExactError::Singular);
        }
        let n = self.rows;
        let mut inv = RatMatrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                let minor = self.minor(j, i).det()?;
                let sign = if (i + j) % 2 == 0 {
                    Rat::one()
                } else {
                    -Rat::one()
                };
                *inv.at_mut(i, j) = sign * minor / &det;
            }
        }
        Ok(inv)
    }

    fn minor(&self, drop_row: usize, drop_col: usize) -> RatMatrix {
        let n = self.rows;
        let mut out = Vec::with_capacity((n - 1) * (n - 1));
        for i in 0..n {
            if i == drop_row {
                continue;
            }
            for j in 0..n {
                if j == drop_col {
                    continue;
                }
                out.push(self.at(i, j).clone());
            }
        }
        RatMatrix::new(n - 1, n - 1, out)
    }

    /// Matrix power by binary exponentiation; `k` may be negative for
    /// invertible matrices.
    pub fn pow(&self, k: i64) -> Result<RatMatrix, ExactError> {
        if !self.is_square() {
            return Err(ExactError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut base = if k < 0 {
            self.inverse()?
        } else {
            self.clone()
        };
        let mut e = k.unsigned_abs();
        let mut acc = RatMatrix::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// The dual-action matrix (g⁻¹)ᵗ.
    pub fn inverse_transpose(&self) -> Result<RatMatrix, ExactError> {
        Ok(self.inverse()?.transpose())
    }

    /// Commutator g h g⁻¹ h⁻¹.
    pub fn commutator(&self, other: &RatMatrix) -> Result<RatMatrix, ExactError> {
        Ok(&(self * other) * &(&self.inverse()? * &other.inverse()?))
    }

    /// Each entry forced to an integer; errors if any denominator is not 1.
    pub fn to_bigint_entries(&self) -> Result<Vec<BigInt>, ExactError> {
        self.entries
            .iter()
            .map(|e| {
                if e.denom().is_one() {
                    Ok(e.numer().clone())
                } else {
                    Err(ExactError::NotIntegral)
                }
            })
            .collect()
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{} ", self.at(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = RatMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if !b.is_zero() {
                        *out.at_mut(i, j) += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &RatMatrix {
    type Output = RatMatrix;
    fn add(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RatMatrix::new(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &RatMatrix {
    type Output = RatMatrix;
    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RatMatrix::new(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Neg for &RatMatrix {
    type Output = RatMatrix;
    fn neg(self) -> RatMatrix {
        RatMatrix::new(
            self.rows,
            self.cols,
            self.entries.iter().map(|a| -a.clone()).collect(),
        )
    }
}

/// Characteristic polynomial det(xI − m) of a square integer matrix.
///
/// Faddeev–LeVerrier: exact, no pivoting, monic of degree `dim`.
pub fn charpoly(m: &RatMatrix) -> Result<IntPolynomial, ExactError> {
    if !m.is_square() {
        return Err(ExactError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    if !m.is_integral() {
        return Err(ExactError::NotIntegral);
    }
    let n = m.rows;
    // c[n] = 1; M_1 = m; c_{n-k} = -tr(M_k)/k; M_{k+1} = m (M_k + c_{n-k} I).
    let mut coeffs = vec![Rat::zero(); n + 1];
    coeffs[n] = Rat::one();
    let mut mk = m.clone();
    for k in 1..=n {
        let c = -mk.trace() / rat_int(k as i64);
        coeffs[n - k] = c.clone();
        if k < n {
            let mut shifted = mk.clone();
            for i in 0..n {
                *shifted.at_mut(i, i) += &c;
            }
            mk = m * &shifted;
        }
    }
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| {
            debug_assert!(c.denom().is_one(), "charpoly of integer matrix is integral");
            c.numer().clone()
        })
        .collect();
    Ok(IntPolynomial::new(ints))
}

/// lcm{k : φ(k) ≤ d} for d = 1..=12. Any finite-order element of GL_d(Z)
/// has order dividing this value, because an order-k element needs the
/// φ(k)-dimensional cyclotomic factor to fit inside dimension d.
pub fn torsion_exponent(d: usize) -> u64 {
    const TABLE: [u64; 12] = [
        2, 12, 12, 120, 120, 2520, 2520, 5040, 5040, 55440, 55440, 720720,
    ];
    assert!(
        (1..=12).contains(&d),
        "torsion exponent table covers d <= 12"
    );
    TABLE[d - 1]
}

/// Decides whether every eigenvalue of `m` is a root of unity, exactly.
///
/// Requires m ∈ GL_d(Z) (integer entries, det ±1). With N = lcm{k : φ(k) ≤ d},
/// all eigenvalues are roots of unity iff (m^N − I)^d = 0: on the unit circle,
/// integer-polynomial eigenvalues are forced to be roots of unity (Kronecker),
/// and their orders divide N. A trace-growth prefilter rejects matrices with
/// an eigenvalue off the unit circle before the large power is formed.
pub fn all_eigenvalues_roots_of_unity(m: &RatMatrix) -> Result<bool, ExactError> {
    if !m.is_square() {
        return Err(ExactError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    if !m.is_integral() {
        return Err(ExactError::NotIntegral);
    }
    let det = m.det()?;
    if det.abs() != Rat::one() {
        return Err(ExactError::NotUnimodular {
            det: det.to_string(),
        });
    }
    let d = m.rows;
    // Prefilter: |tr(m^k)| ≤ d whenever all eigenvalues lie on the unit circle.
    let bound = rat_int(d as i64);
    let mut p = m.clone();
    for _ in 0..(3 * d).max(6) {
        if p.trace().abs() > bound {
            return Ok(false);
        }
        p = &p * m;
    }
    let n = torsion_exponent(d);
    let mn = m.pow(n as i64)?;
    let diff = &mn - &RatMatrix::identity(d);
    Ok(diff.pow(d as i64)?.is_zero())
}

/// If `m` has finite order, returns it; `None` for infinite order.
/// Order of a torsion element divides [`torsion_exponent`].
pub fn root_of_unity_exponent(m: &RatMatrix) -> Result<Option<u64>, ExactError> {
    let d = m.rows;
    let n = torsion_exponent(d);
    if !m.pow(n as i64)?.is_identity() {
        return Ok(None);
    }
    // Smallest divisor of N that works.
    let mut divisors: Vec<u64> = (1..=n).filter(|k| n % k == 0).collect();
    divisors.sort_unstable();
    for k in divisors {
        if m.pow(k as i64)?.is_identity() {
            return Ok(Some(k));
        }
    }
    unreachable!("m^N = I implies some divisor works");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::rat;

    fn m2(a: i64, b: i64, c: i64, d: i64) -> RatMatrix {
        RatMatrix::from_i64_rows(&[vec![a, b], vec![c, d]])
    }

    #[test]
    fn charpoly_small_cases() {
        // identity 2x2 -> x^2 - 2x + 1
        let p = charpoly(&RatMatrix::identity(2)).unwrap();
        assert_eq!(p.coeffs_i64(), vec![1, -2, 1]);
        // cat map -> x^2 - 3x + 1
        let p = charpoly(&m2(2, 1, 1, 1)).unwrap();
        assert_eq!(p.coeffs_i64(), vec![1, -3, 1]);
        // rotation -> x^2 + 1
        let p = charpoly(&m2(0, -1, 1, 0)).unwrap();
        assert_eq!(p.coeffs_i64(), vec![1, 0, 1]);
        // non-square rejected
        assert!(charpoly(&RatMatrix::zero(2, 3)).is_err());
    }

    #[test]
    fn roots_of_unity_examples() {
        assert!(all_eigenvalues_roots_of_unity(&m2(0, -1, 1, 0)).unwrap());
        assert!(!all_eigenvalues_roots_of_unity(&m2(2, 1, 1, 1)).unwrap());
        assert!(all_eigenvalues_roots_of_unity(&m2(1, 5, 0, 1)).unwrap());
        // char poly x^2-3x+1 has a real root > 1: sign at x=1 is -1, at x=3 is +1.
        let p = charpoly(&m2(2, 1, 1, 1)).unwrap();
        assert_eq!(p.eval_i64(1).to_string(), "-1");
        assert_eq!(p.eval_i64(3).to_string(), "1");
        // det 2 rejected
        assert!(all_eigenvalues_roots_of_unity(&m2(2, 0, 0, 1)).is_err());
    }

    #[test]
    fn order_of_torsion_elements() {
        assert_eq!(root_of_unity_exponent(&m2(0, -1, 1, 0)).unwrap(), Some(4));
        assert_eq!(root_of_unity_exponent(&m2(1, 1, 0, 1)).unwrap(), None);
        assert_eq!(root_of_unity_exponent(&m2(2, 1, 1, 1)).unwrap(), None);
        // order-6 element of SL_2(Z)
        assert_eq!(root_of_unity_exponent(&m2(1, -1, 1, 0)).unwrap(), Some(6));
    }

    #[test]
    fn order_eight_needs_the_full_torsion_exponent() {
        // Companion matrix of x^4 + 1: all eigenvalues are primitive 8th
        // roots of unity, so the d=4 exponent must be divisible by 8.
        let m = RatMatrix::from_i64_rows(&[
            vec![0, 0, 0, -1],
            vec![1, 0, 0, 0],
            vec![0, 1, 0, 0],
            vec![0, 0, 1, 0],
        ]);
        assert!(all_eigenvalues_roots_of_unity(&m).unwrap());
        assert_eq!(root_of_unity_exponent(&m).unwrap(), Some(8));
        assert_eq!(torsion_exponent(4) % 8, 0);
    }

    #[test]
    fn inverse_and_pow() {
        let g = m2(2, 1, 1, 1);
        let gi = g.inverse().unwrap();
        assert_eq!(gi, m2(1, -1, -1, 2));
        assert!((&g * &gi).is_identity());
        assert_eq!(g.pow(-2).unwrap(), &gi * &gi);
        assert!(g.pow(0).unwrap().is_identity());
    }

    #[test]
    fn det_with_rational_entries() {
        let m = RatMatrix::new(
            2,
            2,
            vec![rat(1, 2), rat(1, 3), rat(1, 4), rat(1, 5)],
        );
        assert_eq!(m.det().unwrap(), rat(1, 10) - rat(1, 12));
    }
}
