//! Integer lattice computations: Hermite and Smith normal forms,
//! integer kernels, saturation.
//!
//! Matrices here are `Vec<Vec<BigInt>>` row vectors; everything is exact.

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

pub type IntMat = Vec<Vec<BigInt>>;

pub fn int_mat_from_i64(rows: &[Vec<i64>]) -> IntMat {
    rows.iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect()
}

/// Row-style Hermite normal form together with the unimodular transform:
/// returns (H, U) with U·A = H, H in row echelon form with nonnegative
/// pivots and entries above a pivot reduced modulo it.
pub fn hermite_normal_form(a: &IntMat) -> (IntMat, IntMat) {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut h = a.clone();
    let mut u: IntMat = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..n {
        if pivot_row >= m {
            break;
        }
        // Euclid entries below pivot_row into a single nonzero at pivot_row.
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..m {
                if !h[r][col].is_zero() {
                    best = match best {
                        None => Some(r),
                        Some(b) => {
                            if h[r][col].abs() < h[b][col].abs() {
                                Some(r)
                            } else {
                                Some(b)
                            }
                        }
                    };
                }
            }
            let Some(b) = best else {
                break;
            };
            h.swap(pivot_row, b);
            u.swap(pivot_row, b);
            let mut reduced_any = false;
            let pv = h[pivot_row][col].clone();
            for r in pivot_row + 1..m {
                if h[r][col].is_zero() {
                    continue;
                }
                let q = div_floor_big(&h[r][col], &pv);
                if !q.is_zero() {
                    row_submul(&mut h, r, pivot_row, &q);
                    row_submul(&mut u, r, pivot_row, &q);
                }
                if !h[r][col].is_zero() {
                    reduced_any = true;
                }
            }
            if !reduced_any {
                break;
            }
        }
        if h[pivot_row][col].is_zero() {
            continue;
        }
        if h[pivot_row][col].is_negative() {
            row_negate(&mut h, pivot_row);
            row_negate(&mut u, pivot_row);
        }
        // Reduce entries above the pivot.
        let pv = h[pivot_row][col].clone();
        for r in 0..pivot_row {
            let q = div_floor_big(&h[r][col], &pv);
            if !q.is_zero() {
                row_submul(&mut h, r, pivot_row, &q);
                row_submul(&mut u, r, pivot_row, &q);
            }
        }
        pivot_row += 1;
    }
    (h, u)
}

fn div_floor_big(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn row_submul(m: &mut IntMat, dst: usize, src: usize, q: &BigInt) {
    let srow = m[src].clone();
    for (d, s) in m[dst].iter_mut().zip(srow.iter()) {
        *d -= q * s;
    }
}

fn row_negate(m: &mut IntMat, r: usize) {
    for v in m[r].iter_mut() {
        *v = -v.clone();
    }
}

/// Basis of the left kernel {x ∈ Z^m : x·A = 0}; the rows of U matching
/// zero rows of the HNF. Kernels of integer matrices are saturated.
pub fn integer_left_kernel(a: &IntMat) -> IntMat {
    let (h, u) = hermite_normal_form(a);
    h.iter()
        .zip(u)
        .filter(|(hr, _)| hr.iter().all(Zero::is_zero))
        .map(|(_, ur)| ur)
        .collect()
}

/// Basis of the right kernel {x ∈ Z^n : A·x = 0}, via the left kernel of Aᵗ.
pub fn integer_kernel(a: &IntMat) -> IntMat {
    integer_left_kernel(&transpose(a))
}

pub fn transpose(a: &IntMat) -> IntMat {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    (0..n)
        .map(|j| (0..m).map(|i| a[i][j].clone()).collect())
        .collect()
}

/// Smith normal form diagonal d_1 | d_2 | ... of an integer matrix.
pub fn smith_normal_form(a: &IntMat) -> Vec<BigInt> {
    let mut m = a.clone();
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut diag = Vec::new();
    let mut top = 0;
    while top < rows.min(cols) {
        // Find nonzero pivot in the bottom-right block.
        let mut found = None;
        'scan: for i in top..rows {
            for j in top..cols {
                if !m[i][j].is_zero() {
                    found = Some((i, j));
                    break 'scan;
                }
            }
        }
        let Some((pi, pj)) = found else {
            break;
        };
        m.swap(top, pi);
        for row in m.iter_mut() {
            row.swap(top, pj);
        }
        loop {
            // Clear column with row operations.
            let mut dirty = false;
            for i in top + 1..rows {
                if m[i][top].is_zero() {
                    continue;
                }
                if m[i][top].abs() < m[top][top].abs() || m[top][top].is_zero() {
                    m.swap(top, i);
                    dirty = true;
                }
                let q = div_floor_big(&m[i][top].clone(), &m[top][top].clone());
                if !q.is_zero() {
                    row_submul(&mut m, i, top, &q);
                }
                if !m[i][top].is_zero() {
                    dirty = true;
                }
            }
            // Clear row with column operations.
            for j in top + 1..cols {
                if m[top][j].is_zero() {
                    continue;
                }
                let q = div_floor_big(&m[top][j].clone(), &m[top][top].clone());
                if !q.is_zero() {
                    for i in 0..rows {
                        let s = m[i][top].clone();
                        m[i][j] -= &q * s;
                    }
                }
                if !m[top][j].is_zero() {
                    dirty = true;
                    // Move the smaller entry into pivot position.
                    for i in 0..rows {
                        let tmp = m[i][top].clone();
                        m[i][top] = m[i][j].clone();
                        m[i][j] = tmp;
                    }
                }
            }
            if !dirty {
                break;
            }
        }
        if m[top][top].is_negative() {
            row_negate(&mut m, top);
        }
        diag.push(m[top][top].clone());
        top += 1;
    }
    // Enforce the divisibility chain.
    let k = diag.len();
    for i in 0..k {
        for j in i + 1..k {
            let (a, b) = (diag[i].clone(), diag[j].clone());
            if a.is_zero() && b.is_zero() {
                continue;
            }
            let g = a.gcd(&b);
            let l = if g.is_zero() {
                BigInt::zero()
            } else {
                (&a * &b).abs() / &g
            };
            diag[i] = g;
            diag[j] = l;
        }
    }
    diag.retain(|d| !d.is_zero());
    diag
}

/// Extended gcd over a vector: returns (g, x) with Σ xᵢvᵢ = g = gcd(v).
pub fn extended_gcd_vector(v: &[BigInt]) -> (BigInt, Vec<BigInt>) {
    let n = v.len();
    let mut g = BigInt::zero();
    let mut coeffs = vec![BigInt::zero(); n];
    for (i, vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        if g.is_zero() {
            g = vi.abs();
            coeffs = vec![BigInt::zero(); n];
            coeffs[i] = if vi.is_negative() {
                -BigInt::one()
            } else {
                BigInt::one()
            };
            continue;
        }
        let e = g.extended_gcd(vi);
        // e.gcd = e.x * g + e.y * vi
        for c in coeffs.iter_mut() {
            *c *= &e.x;
        }
        coeffs[i] += &e.y;
        g = e.gcd;
    }
    (g, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_reduces_to_echelon() {
        let a = int_mat_from_i64(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let (h, u) = hermite_normal_form(&a);
        // U·A = H and H echelon.
        let prod = mat_mul(&u, &a);
        assert_eq!(prod, h);
        assert!(h[0][0] > BigInt::from(0));
    }

    #[test]
    fn kernel_is_exact() {
        // rows are dependent: r0 + r1 = r2
        let a = int_mat_from_i64(&[vec![1, 2], vec![3, 4], vec![4, 6]]);
        let k = integer_left_kernel(&a);
        assert_eq!(k.len(), 1);
        for row in &k {
            let combo: Vec<BigInt> = (0..2)
                .map(|j| (0..3).map(|i| &row[i] * &a[i][j]).sum())
                .collect();
            assert!(combo.iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn snf_divisibility() {
        let a = int_mat_from_i64(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let d = smith_normal_form(&a);
        for w in d.windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }
    }

    #[test]
    fn snf_of_primitive_basis_is_all_ones() {
        let a = int_mat_from_i64(&[vec![1, 0, 2], vec![0, 1, 5]]);
        let d = smith_normal_form(&a);
        assert_eq!(d, vec![BigInt::one(), BigInt::one()]);
    }

    #[test]
    fn gcd_certificate() {
        let v: Vec<BigInt> = [12, 18, 10].iter().map(|&x| BigInt::from(x)).collect();
        let (g, c) = extended_gcd_vector(&v);
        assert_eq!(g, BigInt::from(2));
        let check: BigInt = v.iter().zip(&c).map(|(a, b)| a * b).sum();
        assert_eq!(check, g);
    }

    fn mat_mul(a: &IntMat, b: &IntMat) -> IntMat {
        let n = b[0].len();
        a.iter()
            .map(|ar| {
                (0..n)
                    .map(|j| ar.iter().zip(b).map(|(x, br)| x * &br[j]).sum())
                    .collect()
            })
            .collect()
    }
}
