//! Affine transformations of the torus R^d/Z^d and group specifications.

use crate::exact::rat::{rat_mod_one, Rat};
use crate::exact::{ExactError, RatMatrix};
use num::{One, Signed, Zero};

/// An affine map x ↦ γx + a with γ ∈ GL_d(Z) and a ∈ [0,1)^d.
#[derive(Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub matrix: RatMatrix,
    pub translation: Vec<Rat>,
}

impl AffineMap {
    /// Validates the GL_d(Z) and translation-range invariants.
    pub fn new(matrix: RatMatrix, translation: Vec<Rat>) -> Result<Self, ExactError> {
        if !matrix.is_square() {
            return Err(ExactError::NotSquare {
                rows: matrix.rows,
                cols: matrix.cols,
            });
        }
        if !matrix.is_integral() {
            return Err(ExactError::NotIntegral);
        }
        let det = matrix.det()?;
        if det.abs() != Rat::one() {
            return Err(ExactError::NotUnimodular {
                det: det.to_string(),
            });
        }
        if translation.len() != matrix.rows {
            return Err(ExactError::DimensionMismatch {
                expected: matrix.rows,
                got: translation.len(),
            });
        }
        let translation = translation.iter().map(rat_mod_one).collect();
        Ok(AffineMap {
            matrix,
            translation,
        })
    }

    pub fn automorphism(matrix: RatMatrix) -> Result<Self, ExactError> {
        let d = matrix.rows;
        AffineMap::new(matrix, vec![Rat::zero(); d])
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn is_automorphism(&self) -> bool {
        self.translation.iter().all(Zero::is_zero)
    }

    /// Composition (γ₁,a₁)(γ₂,a₂) = (γ₁γ₂, γ₁a₂ + a₁), translations mod 1.
    pub fn compose(&self, rhs: &AffineMap) -> AffineMap {
        let matrix = &self.matrix * &rhs.matrix;
        let moved = self.matrix.apply(&rhs.translation);
        let translation = moved
            .iter()
            .zip(&self.translation)
            .map(|(m, a)| rat_mod_one(&(m + a)))
            .collect();
        AffineMap {
            matrix,
            translation,
        }
    }

    /// Exact inverse (γ⁻¹, −γ⁻¹a mod 1).
    pub fn inverse(&self) -> Result<AffineMap, ExactError> {
        let inv = self.matrix.inverse()?;
        let translation = inv
            .apply(&self.translation)
            .iter()
            .map(|x| rat_mod_one(&-x.clone()))
            .collect();
        Ok(AffineMap {
            matrix: inv,
            translation,
        })
    }
}

impl std::fmt::Debug for AffineMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "AffineMap({:?}, t = {:?})", self.matrix, self.translation)
    }
}

/// The input object: dimension, affine generators, optional measure
/// weights over the symmetrized generator alphabet.
#[derive(Clone, Debug)]
pub struct AffineGroupSpec {
    pub dim: usize,
    pub generators: Vec<AffineMap>,
    pub weights: Option<Vec<Rat>>,
}

impl AffineGroupSpec {
    pub fn new(
        dim: usize,
        generators: Vec<AffineMap>,
        weights: Option<Vec<Rat>>,
    ) -> Result<Self, ExactError> {
        if generators.is_empty() {
            return Err(ExactError::Other("at least one generator required".into()));
        }
        for g in &generators {
            if g.dim() != dim {
                return Err(ExactError::DimensionMismatch {
                    expected: dim,
                    got: g.dim(),
                });
            }
        }
        if let Some(w) = &weights {
            if w.iter().any(Signed::is_negative) {
                return Err(ExactError::Other("weights must be nonnegative".into()));
            }
            let total: Rat = w.iter().fold(Rat::zero(), |a, b| a + b);
            if !total.is_one() {
                return Err(ExactError::Other(format!(
                    "weights sum to {total}, expected 1"
                )));
            }
        }
        Ok(AffineGroupSpec {
            dim,
            generators,
            weights,
        })
    }

    pub fn automorphism_part(&self) -> Vec<RatMatrix> {
        self.generators.iter().map(|g| g.matrix.clone()).collect()
    }

    pub fn is_automorphism_group(&self) -> bool {
        self.generators.iter().all(AffineMap::is_automorphism)
    }
}

/// Dual generators {(g⁻¹)ᵗ} acting on the character lattice Z^d.
pub fn dualize(spec: &AffineGroupSpec) -> Result<Vec<RatMatrix>, ExactError> {
    spec.generators
        .iter()
        .map(|g| g.matrix.inverse_transpose())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::{rat, rat_int};

    fn aut(rows: &[Vec<i64>]) -> AffineMap {
        AffineMap::automorphism(RatMatrix::from_i64_rows(rows)).unwrap()
    }

    #[test]
    fn dualize_examples() {
        let spec = AffineGroupSpec::new(2, vec![aut(&[vec![1, 0], vec![0, 1]])], None).unwrap();
        assert!(dualize(&spec).unwrap()[0].is_identity());

        // cat map: (g^{-1})^t = [[1,-1],[-1,2]]
        let spec = AffineGroupSpec::new(2, vec![aut(&[vec![2, 1], vec![1, 1]])], None).unwrap();
        let dual = dualize(&spec).unwrap();
        assert_eq!(
            dual[0],
            RatMatrix::from_i64_rows(&[vec![1, -1], vec![-1, 2]])
        );

        // the rotation is its own inverse-transpose
        let rot = aut(&[vec![0, -1], vec![1, 0]]);
        let spec = AffineGroupSpec::new(2, vec![rot.clone()], None).unwrap();
        assert_eq!(dualize(&spec).unwrap()[0], rot.matrix);
    }

    #[test]
    fn translations_reduced_mod_one() {
        let m = RatMatrix::identity(2);
        let a = AffineMap::new(m, vec![rat(3, 2), rat(-1, 4)]).unwrap();
        assert_eq!(a.translation, vec![rat(1, 2), rat(3, 4)]);
    }

    #[test]
    fn compose_and_inverse() {
        let g = AffineMap::new(
            RatMatrix::from_i64_rows(&[vec![1, 1], vec![0, 1]]),
            vec![rat(1, 3), rat_int(0)],
        )
        .unwrap();
        let gi = g.inverse().unwrap();
        let id = g.compose(&gi);
        assert!(id.matrix.is_identity());
        assert!(id.translation.iter().all(num::Zero::is_zero));
    }

    #[test]
    fn rejects_non_unimodular() {
        let m = RatMatrix::from_i64_rows(&[vec![2, 0], vec![0, 1]]);
        assert!(AffineMap::automorphism(m).is_err());
    }

    #[test]
    fn weights_must_sum_to_one() {
        let g = aut(&[vec![1, 0], vec![0, 1]]);
        let ok = AffineGroupSpec::new(2, vec![g.clone()], Some(vec![rat(1, 2), rat(1, 2)]));
        assert!(ok.is_ok());
        let bad = AffineGroupSpec::new(2, vec![g], Some(vec![rat(1, 2), rat(1, 3)]));
        assert!(bad.is_err());
    }
}
