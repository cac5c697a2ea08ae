//! Rational subspaces of Q^d in reduced row-echelon form, with optional
//! saturated integer lattice bases for W ∩ Z^d.

use super::lattice::{integer_kernel, IntMat};
use super::matrix::RatMatrix;
use super::rat::Rat;
use super::ExactError;
use num::bigint::BigInt;
use num::{Integer, One, Zero};

/// A subspace W ⊆ Q^d. `basis` rows are in RREF with strictly increasing
/// pivots, which makes the representation canonical: two equal subspaces
/// compare equal. `lattice_basis`, when present, spans W ∩ Z^d exactly.
#[derive(Clone)]
pub struct Subspace {
    pub ambient_dim: usize,
    basis: Vec<Vec<Rat>>,
    pub lattice_basis: Option<IntMat>,
}

/// Equality is equality of subspaces; the optional lattice basis is
/// derived data and ignored.
impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim && self.basis == other.basis
    }
}

impl Eq for Subspace {}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subspace(dim {} of {})", self.dim(), self.ambient_dim)?;
        for b in &self.basis {
            write!(f, " [")?;
            for (j, x) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// Reduced row echelon form; returns the nonzero rows.
pub fn rref(rows: Vec<Vec<Rat>>) -> Vec<Vec<Rat>> {
    let mut a = rows;
    let ncols = a.first().map_or(0, Vec::len);
    let mut pivot_row = 0;
    for col in 0..ncols {
        if pivot_row >= a.len() {
            break;
        }
        let Some(p) = (pivot_row..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(pivot_row, p);
        let pv = a[pivot_row][col].clone();
        for x in a[pivot_row].iter_mut() {
            *x = &*x / &pv;
        }
        for r in 0..a.len() {
            if r != pivot_row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let prow = a[pivot_row].clone();
                for (x, p) in a[r].iter_mut().zip(prow.iter()) {
                    let sub = &f * p;
                    *x = &*x - &sub;
                }
            }
        }
        pivot_row += 1;
    }
    a.truncate(pivot_row);
    a
}

/// Right kernel {v : m·v = 0} over Q, as a list of basis vectors.
pub fn rational_kernel(m: &RatMatrix) -> Vec<Vec<Rat>> {
    let rows: Vec<Vec<Rat>> = m.rows_iter().map(<[Rat]>::to_vec).collect();
    let red = rref(rows);
    let n = m.cols;
    let mut pivots = Vec::new();
    for row in &red {
        if let Some(p) = row.iter().position(|x| !x.is_zero()) {
            pivots.push(p);
        }
    }
    let mut kernel = Vec::new();
    for free in 0..n {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); n];
        v[free] = Rat::one();
        for (row, &p) in red.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        kernel.push(v);
    }
    kernel
}

impl Subspace {
    /// The zero subspace.
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: vec![],
            lattice_basis: None,
        }
    }

    /// All of Q^d.
    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim)
            .map(|i| {
                let mut v = vec![Rat::zero(); ambient_dim];
                v[i] = Rat::one();
                v
            })
            .collect();
        Subspace {
            ambient_dim,
            basis,
            lattice_basis: None,
        }
    }

    /// Span of the given vectors.
    pub fn from_spanning(ambient_dim: usize, vectors: Vec<Vec<Rat>>) -> Self {
        for v in &vectors {
            assert_eq!(v.len(), ambient_dim, "vector in wrong ambient dimension");
        }
        Subspace {
            ambient_dim,
            basis: rref(vectors),
            lattice_basis: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    pub fn is_proper_nontrivial(&self) -> bool {
        !self.is_zero() && !self.is_full()
    }

    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.basis
    }

    fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|row| row.iter().position(|x| !x.is_zero()).expect("nonzero row"))
            .collect()
    }

    /// Coordinates of v in the RREF basis, or None if v ∉ W.
    pub fn coordinates(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        let pivots = self.pivots();
        let coords: Vec<Rat> = pivots.iter().map(|&p| v[p].clone()).collect();
        let mut recon = vec![Rat::zero(); self.ambient_dim];
        for (c, b) in coords.iter().zip(&self.basis) {
            for (r, x) in recon.iter_mut().zip(b) {
                *r += c * x;
            }
        }
        if recon.as_slice() == v {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains_vector(&self, v: &[Rat]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains_vector(v))
    }

    /// Constraint matrix C with W = {v : C·v = 0}; rows span W^⊥.
    pub fn constraints(&self) -> RatMatrix {
        if self.is_zero() {
            return RatMatrix::identity(self.ambient_dim);
        }
        let b = RatMatrix::new(
            self.basis.len(),
            self.ambient_dim,
            self.basis.iter().flatten().cloned().collect(),
        );
        let ker = rational_kernel(&b);
        RatMatrix::new(
            ker.len(),
            self.ambient_dim,
            ker.into_iter().flatten().collect(),
        )
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        let mut rows = self.basis.clone();
        rows.extend(other.basis.clone());
        Subspace::from_spanning(self.ambient_dim, rows)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        let c1 = self.constraints();
        let c2 = other.constraints();
        let mut rows: Vec<Rat> = Vec::new();
        rows.extend(c1.rows_iter().flatten().cloned());
        rows.extend(c2.rows_iter().flatten().cloned());
        let stacked = RatMatrix::new(
            c1.rows + c2.rows,
            self.ambient_dim,
            rows,
        );
        Subspace::from_spanning(self.ambient_dim, rational_kernel(&stacked))
    }

    /// Preimage g⁻¹(W) = {v : g·v ∈ W}.
    pub fn preimage(&self, g: &RatMatrix) -> Subspace {
        assert_eq!(g.cols, self.ambient_dim);
        if self.is_full() {
            return Subspace::full(self.ambient_dim);
        }
        let cg = &self.constraints() * g;
        Subspace::from_spanning(self.ambient_dim, rational_kernel(&cg))
    }

    /// Image g(W).
    pub fn image(&self, g: &RatMatrix) -> Subspace {
        let vecs = self.basis.iter().map(|b| g.apply(b)).collect();
        Subspace::from_spanning(self.ambient_dim, vecs)
    }

    pub fn is_invariant_under(&self, g: &RatMatrix) -> bool {
        self.basis.iter().all(|b| self.contains_vector(&g.apply(b)))
    }

    /// Fills in `lattice_basis` with a basis of W ∩ Z^d. The kernel of an
    /// integer matrix is saturated, so no extra correction step is needed.
    pub fn saturate(&mut self) {
        if self.is_zero() {
            self.lattice_basis = Some(vec![]);
            return;
        }
        let c = self.constraints();
        // Clear denominators row by row.
        let mut int_rows: IntMat = Vec::new();
        for row in c.rows_iter() {
            let mut denom_lcm = BigInt::one();
            for x in row {
                denom_lcm = denom_lcm.lcm(x.denom());
            }
            int_rows.push(
                row.iter()
                    .map(|x| x.numer() * (&denom_lcm / x.denom()))
                    .collect(),
            );
        }
        if int_rows.is_empty() {
            // Full space: standard basis.
            let d = self.ambient_dim;
            self.lattice_basis = Some(
                (0..d)
                    .map(|i| {
                        (0..d)
                            .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                            .collect()
                    })
                    .collect(),
            );
            return;
        }
        self.lattice_basis = Some(integer_kernel(&int_rows));
    }

    /// The orthogonal complement W^⊥ (standard inner product), saturated.
    pub fn orthogonal_complement(&self) -> Subspace {
        let mut out = if self.is_zero() {
            Subspace::full(self.ambient_dim)
        } else {
            let b = RatMatrix::new(
                self.basis.len(),
                self.ambient_dim,
                self.basis.iter().flatten().cloned().collect(),
            );
            Subspace::from_spanning(self.ambient_dim, rational_kernel(&b))
        };
        out.saturate();
        out
    }

    /// Lexicographic comparison used for deterministic tie-breaking:
    /// smaller dimension first, then lexicographically smaller basis.
    pub fn canonical_cmp(&self, other: &Subspace) -> std::cmp::Ordering {
        self.dim()
            .cmp(&other.dim())
            .then_with(|| self.basis.cmp(&other.basis))
    }
}

/// Matrix of m restricted to w, in w's basis. Uses the saturated
/// `lattice_basis` when present so integer matrices restrict to integer
/// matrices. Errors if w is not invariant under m.
pub fn restriction(m: &RatMatrix, w: &Subspace) -> Result<RatMatrix, ExactError> {
    if m.cols != w.ambient_dim {
        return Err(ExactError::DimensionMismatch {
            expected: w.ambient_dim,
            got: m.cols,
        });
    }
    let k = w.dim();
    if k == 0 {
        return Ok(RatMatrix::zero(0, 0));
    }
    match &w.lattice_basis {
        None => {
            let mut out = RatMatrix::zero(k, k);
            for (i, b) in w.basis().iter().enumerate() {
                let img = m.apply(b);
                let coords = w.coordinates(&img).ok_or(ExactError::NotInvariant)?;
                for (j, c) in coords.into_iter().enumerate() {
                    *out.at_mut(j, i) = c;
                }
            }
            Ok(out)
        }
        Some(lat) => {
            // Solve m·bᵢ = Σⱼ cⱼᵢ bⱼ in the lattice basis.
            let d = w.ambient_dim;
            let bmat = RatMatrix::new(
                d,
                k,
                (0..d)
                    .flat_map(|r| (0..k).map(move |c| (r, c)))
                    .map(|(r, c)| Rat::from_integer(lat[c][r].clone()))
                    .collect(),
            );
            let mut out = RatMatrix::zero(k, k);
            for i in 0..k {
                let b: Vec<Rat> = lat[i].iter().map(|x| Rat::from_integer(x.clone())).collect();
                let img = m.apply(&b);
                let coords = solve_columns(&bmat, &img).ok_or(ExactError::NotInvariant)?;
                for (j, c) in coords.into_iter().enumerate() {
                    *out.at_mut(j, i) = c;
                }
            }
            Ok(out)
        }
    }
}

/// Solves B·x = v exactly where B is d×k with independent columns;
/// returns None when v is outside the column space.
fn solve_columns(b: &RatMatrix, v: &[Rat]) -> Option<Vec<Rat>> {
    let d = b.rows;
    let k = b.cols;
    // Augment [B | v] and row reduce.
    let mut rows: Vec<Vec<Rat>> = (0..d)
        .map(|i| {
            let mut row: Vec<Rat> = (0..k).map(|j| b.at(i, j).clone()).collect();
            row.push(v[i].clone());
            row
        })
        .collect();
    rows = rref(rows);
    let mut x = vec![Rat::zero(); k];
    for row in &rows {
        let Some(p) = row.iter().position(|c| !c.is_zero()) else {
            continue;
        };
        if p == k {
            return None; // inconsistent row 0 ... 0 | c
        }
        x[p] = row[k].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::{rat, rat_int};

    fn vi(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn rref_canonicalizes() {
        let w1 = Subspace::from_spanning(3, vec![vi(&[2, 4, 0]), vi(&[1, 2, 1])]);
        let w2 = Subspace::from_spanning(3, vec![vi(&[1, 2, 0]), vi(&[0, 0, 1])]);
        assert_eq!(w1, w2);
        assert_eq!(w1.dim(), 2);
    }

    #[test]
    fn intersection_and_sum() {
        let w1 = Subspace::from_spanning(3, vec![vi(&[1, 0, 0]), vi(&[0, 1, 0])]);
        let w2 = Subspace::from_spanning(3, vec![vi(&[0, 1, 0]), vi(&[0, 0, 1])]);
        let cap = w1.intersect(&w2);
        assert_eq!(cap.dim(), 1);
        assert!(cap.contains_vector(&vi(&[0, 1, 0])));
        assert!(w1.sum(&w2).is_full());
    }

    #[test]
    fn preimage_under_shear() {
        let g = RatMatrix::from_i64_rows(&[vec![1, 1], vec![0, 1]]);
        let e1 = Subspace::from_spanning(2, vec![vi(&[1, 0])]);
        // g(v) ∈ span(e1) forces v2 = 0, so preimage is span(e1) again.
        assert_eq!(e1.preimage(&g), e1);
        assert!(e1.is_invariant_under(&g));
    }

    #[test]
    fn saturation_produces_primitive_bases() {
        use num::Signed;
        // W spanned by (1/2, 1/2): W ∩ Z^2 is generated by (1,1).
        let mut w = Subspace::from_spanning(2, vec![vec![rat(1, 2), rat(1, 2)]]);
        w.saturate();
        let lat = w.lattice_basis.as_ref().unwrap();
        assert_eq!(lat.len(), 1);
        assert_eq!(lat[0][0].abs(), num::BigInt::from(1u32));
        assert_eq!(lat[0][0], lat[0][1]);
    }

    #[test]
    fn restriction_examples() {
        // diag(2,3) restricted to span(e2) is [3].
        let m = RatMatrix::from_i64_rows(&[vec![2, 0], vec![0, 3]]);
        let w = Subspace::from_spanning(2, vec![vi(&[0, 1])]);
        let r = restriction(&m, &w).unwrap();
        assert_eq!(r.at(0, 0), &rat_int(3));
        // identity restricts to identity
        let id = RatMatrix::identity(2);
        assert!(restriction(&id, &w).unwrap().is_identity());
        // non-invariant subspace rejected: span(e1) under rotation
        let rot = RatMatrix::from_i64_rows(&[vec![0, -1], vec![1, 0]]);
        let e1 = Subspace::from_spanning(2, vec![vi(&[1, 0])]);
        assert!(restriction(&rot, &e1).is_err());
    }

    #[test]
    fn restriction_respects_products() {
        let a = RatMatrix::from_i64_rows(&[vec![1, 1], vec![0, 1]]);
        let b = RatMatrix::from_i64_rows(&[vec![1, 3], vec![0, 1]]);
        let e1 = Subspace::from_spanning(2, vec![vi(&[1, 0])]);
        let lhs = restriction(&(&a * &b), &e1).unwrap();
        let rhs = &restriction(&a, &e1).unwrap() * &restriction(&b, &e1).unwrap();
        assert_eq!(lhs, rhs);
    }
}
