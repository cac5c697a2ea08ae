//! The amenable core: the largest invariant subspace on which every tested
//! commutator has all eigenvalues of modulus one, together with the exact
//! certificate chain used to back NoGap verdicts.

use crate::exact::matrix::{all_eigenvalues_roots_of_unity, torsion_exponent, RatMatrix};
use crate::exact::subspace::{rational_kernel, Subspace};
use crate::exact::ExactError;
use serde::Serialize;

/// Nested commutator words of the generator alphabet up to `depth`:
/// depth 1 holds the pairwise commutators, deeper levels commute the
/// previous level against the alphabet (left-normed).
pub fn commutator_words(
    gens: &[RatMatrix],
    depth: usize,
) -> Result<Vec<RatMatrix>, ExactError> {
    let mut out: Vec<RatMatrix> = Vec::new();
    let mut level: Vec<RatMatrix> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        for (j, h) in gens.iter().enumerate() {
            if i < j {
                let c = g.commutator(h)?;
                if !c.is_identity() && !level.contains(&c) {
                    level.push(c);
                }
            }
        }
    }
    out.extend(level.iter().cloned());
    for _ in 1..depth {
        let mut next = Vec::new();
        for c in &level {
            for g in gens {
                let cc = c.commutator(g)?;
                if !cc.is_identity() && !out.contains(&cc) && !next.contains(&cc) {
                    next.push(cc);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        out.extend(next.iter().cloned());
        level = next;
        if out.len() > 64 {
            break;
        }
    }
    Ok(out)
}

/// Computes the amenable core: intersect, over the tested commutators c,
/// the generalized eigenspaces ker((c^N − I)^d) for unit-root eigenvalues,
/// then shrink to the largest subspace invariant under the whole group.
///
/// With no nontrivial commutators (abelian group) the condition is vacuous
/// and the core is the full space. Deeper tests only shrink the core.
pub fn amenable_core(gens_dual: &[RatMatrix], depth: usize) -> Result<Subspace, ExactError> {
    if depth == 0 {
        return Err(ExactError::ZeroBudget);
    }
    let d = gens_dual
        .first()
        .ok_or_else(|| ExactError::Other("no generators".into()))?
        .rows;
    let n = torsion_exponent(d) as i64;
    let commutators = commutator_words(gens_dual, depth)?;
    let mut w = Subspace::full(d);
    for c in &commutators {
        let power = c.pow(n)?;
        let shifted = &power - &RatMatrix::identity(d);
        let nilspace = shifted.pow(d as i64)?;
        let u = Subspace::from_spanning(d, rational_kernel(&nilspace));
        w = w.intersect(&u);
        if w.is_zero() {
            return Ok(w);
        }
    }
    crate::exact::largest_invariant_inside(&w, gens_dual)
}

/// Exact certificate that the group generated by the restricted matrices
/// is amenable, in the checkable forms the verdict pipeline relies on.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind")]
pub enum AmenabilityCertificate {
    /// All generators commute exactly.
    Abelian { generators: usize },
    /// Every tested commutator has all eigenvalues roots of unity, and the
    /// N-th powers of the tested commutators generate a unipotent group,
    /// verified by an exact fixed-space chain (Kolchin flag).
    UnipotentByFinite {
        commutators_tested: usize,
        torsion_exponent: u64,
        flag_dims: Vec<usize>,
    },
}

/// Attempts the amenability certificate for the restriction of the group
/// to a witness subspace. `restricted_gens` and `restricted_commutators`
/// are matrices in the witness coordinates.
pub fn certify_restriction_amenable(
    restricted_gens: &[RatMatrix],
    restricted_commutators: &[RatMatrix],
) -> Result<Option<AmenabilityCertificate>, ExactError> {
    let all_commute = restricted_gens.iter().enumerate().all(|(i, g)| {
        restricted_gens[i + 1..]
            .iter()
            .all(|h| &(g * h) == &(h * g))
    });
    if all_commute {
        return Ok(Some(AmenabilityCertificate::Abelian {
            generators: restricted_gens.len(),
        }));
    }
    let k = match restricted_gens.first() {
        Some(g) => g.rows,
        None => return Ok(None),
    };
    if k == 0 {
        return Ok(None);
    }
    let n = torsion_exponent(k);
    // Each tested commutator restricted to the witness must pass the exact
    // root-of-unity test.
    for c in restricted_commutators {
        if c.is_identity() {
            continue;
        }
        if !all_eigenvalues_roots_of_unity(c)? {
            return Ok(None);
        }
    }
    // Kolchin flag for the N-th powers: F_{j+1} = {v : (c^N − I)v ∈ F_j}.
    let nilparts: Vec<RatMatrix> = restricted_commutators
        .iter()
        .filter(|c| !c.is_identity())
        .map(|c| Ok(&c.pow(n as i64)? - &RatMatrix::identity(k)))
        .collect::<Result<_, ExactError>>()?;
    if nilparts.iter().all(RatMatrix::is_zero) {
        return Ok(Some(AmenabilityCertificate::UnipotentByFinite {
            commutators_tested: restricted_commutators.len(),
            torsion_exponent: n,
            flag_dims: vec![k],
        }));
    }
    let mut flag = Subspace::zero(k);
    let mut dims = Vec::new();
    loop {
        let mut next = Subspace::full(k);
        for m in &nilparts {
            next = next.intersect(&flag.preimage(m));
        }
        if next.dim() <= flag.dim() {
            return Ok(None); // chain stalled before exhausting the space
        }
        dims.push(next.dim());
        if next.is_full() {
            return Ok(Some(AmenabilityCertificate::UnipotentByFinite {
                commutators_tested: restricted_commutators.len(),
                torsion_exponent: n,
                flag_dims: dims,
            }));
        }
        flag = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_to_string;

    fn m(rows: &[Vec<i64>]) -> RatMatrix {
        RatMatrix::from_i64_rows(rows)
    }

    #[test]
    fn abelian_group_has_full_core() {
        let g = m(&[vec![2, 1], vec![1, 1]]);
        let h = g.pow(2).unwrap();
        let w = amenable_core(&[g, h], 3).unwrap();
        assert!(w.is_full());
    }

    #[test]
    fn sl2_core_is_zero() {
        let s = m(&[vec![0, -1], vec![1, 0]]);
        let t = m(&[vec![1, 1], vec![0, 1]]);
        // [S,T] is hyperbolic, so no nonzero subspace survives.
        let w = amenable_core(&[s, t], 3).unwrap();
        assert!(w.is_zero());
    }

    #[test]
    fn block_triangular_core_is_first_block() {
        // Upper block-triangular with commuting rotations on the e1-e2
        // block and S,T of SL2(Z) on the other: the core is span(e1,e2).
        let g1 = m(&[
            vec![0, -1, 1, 0],
            vec![1, 0, 0, 1],
            vec![0, 0, 0, -1],
            vec![0, 0, 1, 0],
        ]);
        let g2 = m(&[
            vec![0, -1, 0, 2],
            vec![1, 0, 1, 0],
            vec![0, 0, 1, 1],
            vec![0, 0, 0, 1],
        ]);
        let w = amenable_core(&[g1, g2], 3).unwrap();
        assert_eq!(w.dim(), 2);
        assert!(w
            .basis()
            .iter()
            .all(|v| v[2].to_string() == "0" && rat_to_string(&v[3]) == "0"));
    }

    #[test]
    fn monotone_in_depth() {
        let g1 = m(&[
            vec![0, -1, 1, 0],
            vec![1, 0, 0, 1],
            vec![0, 0, 0, -1],
            vec![0, 0, 1, 0],
        ]);
        let g2 = m(&[
            vec![0, -1, 0, 2],
            vec![1, 0, 1, 0],
            vec![0, 0, 1, 1],
            vec![0, 0, 0, 1],
        ]);
        let shallow = amenable_core(&[g1.clone(), g2.clone()], 1).unwrap();
        let deep = amenable_core(&[g1, g2], 3).unwrap();
        assert!(shallow.contains(&deep));
    }

    #[test]
    fn certificate_paths() {
        // abelian
        let g = m(&[vec![2, 1], vec![1, 1]]);
        let cert = certify_restriction_amenable(&[g.clone(), g.pow(3).unwrap()], &[]).unwrap();
        assert!(matches!(cert, Some(AmenabilityCertificate::Abelian { .. })));
        // unipotent commutators: Heisenberg-like shears in GL_3(Z)
        let a = m(&[vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let b = m(&[vec![1, 0, 0], vec![0, 1, 1], vec![0, 0, 1]]);
        let c = a.commutator(&b).unwrap();
        let cert = certify_restriction_amenable(&[a, b], &[c]).unwrap();
        assert!(matches!(
            cert,
            Some(AmenabilityCertificate::UnipotentByFinite { .. })
        ));
        // hyperbolic commutator: no certificate
        let s = m(&[vec![0, -1], vec![1, 0]]);
        let t = m(&[vec![1, 1], vec![0, 1]]);
        let c = s.commutator(&t).unwrap();
        let cert = certify_restriction_amenable(&[s, t], &[c]).unwrap();
        assert!(cert.is_none());
    }

    #[test]
    fn zero_depth_rejected() {
        let g = m(&[vec![1, 0], vec![0, 1]]);
        assert!(amenable_core(&[g], 0).is_err());
    }
}
