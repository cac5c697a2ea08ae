//! Ergodicity and mixing analysis on the dual lattice.
//!
//! The Koopman action on characters is δ_m ↦ e^{2πi⟨m,a⟩} δ_{σ_γ m} with
//! σ_γ = (γ⁻¹)ᵗ. A finite dual orbit carries an invariant vector iff the
//! phase exponents are consistent around every cycle of its Schreier
//! graph; with rational translations the exponents are rationals mod 1,
//! so the check is exact for every denominator.

use super::affine::{dualize, AffineGroupSpec};
use super::va::{word_ball, BallOptions};
use crate::exact::lattice::{integer_kernel, IntMat};
use crate::exact::matrix::root_of_unity_exponent;
use crate::exact::rat::{rat_mod_one, Rat};
use crate::exact::{ExactError, RatMatrix};
use num::{BigInt, One, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Determination {
    #[serde(rename = "yes")]
    Yes,
    #[serde(rename = "no")]
    No,
    #[serde(rename = "evidence-only")]
    EvidenceOnly,
}

/// A certified finite dual orbit, with the exact invariant vector when one
/// exists: values e^{2πi t} per point, stored as rational exponents t.
#[derive(Debug, Clone, Serialize)]
pub struct FiniteOrbit {
    pub points: Vec<Vec<i64>>,
    /// (point, phase exponent) pairs; None when the cycle phases obstruct
    /// an invariant vector.
    pub invariant_vector: Option<Vec<(Vec<i64>, String)>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErgodicityReport {
    pub ergodic: Determination,
    pub weakly_mixing: Determination,
    pub norm_bound: i64,
    pub finite_orbits: Vec<FiniteOrbit>,
    /// Filled by the caller when the spec is automorphism-only.
    pub strongly_mixing_evidence: Option<MixingReport>,
}

/// Certificate that the action is not strongly mixing.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind")]
pub enum NotMixingCertificate {
    /// The group itself is finite: coefficients cannot vanish at infinity.
    FiniteGroup { order: usize },
    /// An infinite-order element fixes a nonzero dual vector, so one
    /// matrix coefficient is 1 along an infinite set.
    FixedVector { word: Vec<usize>, vector: Vec<i64> },
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingReport {
    pub strongly_mixing: Determination,
    pub certificate: Option<NotMixingCertificate>,
    /// Largest fiber #{w in ball : σ_w m = m'} over sampled dual pairs,
    /// at half ball and at the full ball.
    pub max_fiber_half: usize,
    pub max_fiber_full: usize,
    pub ball_radius: usize,
    pub pairs_sampled: usize,
}

fn to_i64_vec(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter()
        .map(|x| x.to_string().parse::<i64>().ok())
        .collect()
}

/// Enumerates dual orbits of points with ‖m‖∞ ≤ `norm_bound` and analyzes
/// every certified-finite orbit for exact invariant vectors.
pub fn ergodicity_check(
    spec: &AffineGroupSpec,
    norm_bound: i64,
) -> Result<ErgodicityReport, ExactError> {
    if norm_bound < 1 {
        return Err(ExactError::ZeroBudget);
    }
    let d = spec.dim;
    let duals = dualize(spec)?;
    let dual_invs: Result<Vec<RatMatrix>, _> =
        duals.iter().map(RatMatrix::inverse).collect();
    let dual_invs = dual_invs?;
    // Orbit exploration stops when a point leaves the cap: the orbit is
    // then reported as escaping (not finite within certification range).
    let cap = norm_bound.saturating_mul(64).max(4096);
    let max_orbit = 4096usize;

    let mut visited: BTreeMap<Vec<i64>, bool> = BTreeMap::new();
    let mut finite_orbits = Vec::new();

    let mut points = enumerate_ball_points(d, norm_bound);
    points.sort();
    for start in points {
        if start.iter().all(|&x| x == 0) || visited.contains_key(&start) {
            continue;
        }
        let mut orbit: Vec<Vec<i64>> = vec![start.clone()];
        let mut idx: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
        idx.insert(start.clone(), 0);
        let mut frontier = vec![start.clone()];
        let mut escaped = false;
        while let Some(m) = frontier.pop() {
            for g in duals.iter().chain(dual_invs.iter()) {
                let img = apply_int(g, &m);
                if img.iter().any(|&x| x.abs() > cap) {
                    escaped = true;
                    continue;
                }
                if !idx.contains_key(&img) {
                    idx.insert(img.clone(), orbit.len());
                    orbit.push(img.clone());
                    frontier.push(img);
                }
            }
            if orbit.len() > max_orbit {
                escaped = true;
                break;
            }
        }
        for p in &orbit {
            visited.insert(p.clone(), !escaped);
        }
        if escaped {
            continue;
        }
        // Finite orbit certified: solve for the invariant phase exponents.
        let invariant = invariant_vector_on_orbit(spec, &duals, &orbit, &idx)?;
        orbit.sort();
        finite_orbits.push(FiniteOrbit {
            points: orbit,
            invariant_vector: invariant,
        });
    }

    let has_invariant = finite_orbits
        .iter()
        .any(|o| o.invariant_vector.is_some());
    let ergodic = if has_invariant {
        Determination::No
    } else {
        Determination::EvidenceOnly
    };
    let weakly_mixing = if finite_orbits.is_empty() {
        Determination::EvidenceOnly
    } else {
        // Any finite orbit spans a finite-dimensional invariant subspace.
        Determination::No
    };
    Ok(ErgodicityReport {
        ergodic,
        weakly_mixing,
        norm_bound,
        finite_orbits,
        strongly_mixing_evidence: None,
    })
}

fn enumerate_ball_points(d: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![-bound; d];
    loop {
        out.push(cur.clone());
        let mut i = 0;
        loop {
            if i == d {
                return out;
            }
            cur[i] += 1;
            if cur[i] <= bound {
                break;
            }
            cur[i] = -bound;
            i += 1;
        }
    }
}

fn apply_int(g: &RatMatrix, m: &[i64]) -> Vec<i64> {
    let v: Vec<Rat> = m.iter().map(|&x| Rat::from_integer(x.into())).collect();
    let img = g.apply(&v);
    img.iter()
        .map(|x| {
            debug_assert!(x.denom().is_one());
            x.numer().to_string().parse::<i64>().expect("fits i64")
        })
        .collect()
}

/// Assigns phase exponents along a spanning tree and checks consistency on
/// every edge: t(σ_g m) ≡ t(m) + ⟨m, a_g⟩ (mod 1). All arithmetic is in Q,
/// exact for every rational translation denominator.
fn invariant_vector_on_orbit(
    spec: &AffineGroupSpec,
    duals: &[RatMatrix],
    orbit: &[Vec<i64>],
    idx: &BTreeMap<Vec<i64>, usize>,
) -> Result<Option<Vec<(Vec<i64>, String)>>, ExactError> {
    let n = orbit.len();
    let mut exponent: Vec<Option<Rat>> = vec![None; n];
    exponent[0] = Some(Rat::zero());
    let mut stack = vec![0usize];
    while let Some(i) = stack.pop() {
        let t = exponent[i].clone().expect("assigned before push");
        for (g, gd) in spec.generators.iter().zip(duals) {
            let img = apply_int(gd, &orbit[i]);
            let Some(&j) = idx.get(&img) else { continue };
            let phase: Rat = orbit[i]
                .iter()
                .zip(&g.translation)
                .map(|(&mi, ai)| Rat::from_integer(mi.into()) * ai)
                .fold(Rat::zero(), |a, b| a + b);
            let tj = rat_mod_one(&(&t + &phase));
            match &exponent[j] {
                None => {
                    exponent[j] = Some(tj);
                    stack.push(j);
                }
                Some(prev) => {
                    if *prev != tj {
                        return Ok(None); // cycle obstruction
                    }
                }
            }
        }
    }
    if exponent.iter().any(Option::is_none) {
        // Orbit graph disconnected under forward edges alone; treat the
        // components separately by seeding the first unassigned point.
        // Forward edges of a finite orbit are permutations, so this only
        // happens when the group action splits the orbit set we built via
        // inverses too; fall back to no-claim.
        return Ok(None);
    }
    // Verification pass over every generator edge.
    for (g, gd) in spec.generators.iter().zip(duals) {
        for i in 0..n {
            let img = apply_int(gd, &orbit[i]);
            let Some(&j) = idx.get(&img) else {
                return Ok(None);
            };
            let phase: Rat = orbit[i]
                .iter()
                .zip(&g.translation)
                .map(|(&mi, ai)| Rat::from_integer(mi.into()) * ai)
                .fold(Rat::zero(), |a, b| a + b);
            let lhs = exponent[j].clone().unwrap();
            let rhs = rat_mod_one(&(exponent[i].clone().unwrap() + phase));
            if lhs != rhs {
                return Ok(None);
            }
        }
    }
    Ok(Some(
        orbit
            .iter()
            .zip(&exponent)
            .map(|(p, t)| {
                (
                    p.clone(),
                    crate::exact::rat_to_string(t.as_ref().unwrap()),
                )
            })
            .collect(),
    ))
}

/// Fiber statistics and non-mixing certificates for automorphism-only
/// groups.
pub fn mixing_evidence(
    spec: &AffineGroupSpec,
    ball: usize,
    norm_bound: i64,
) -> Result<MixingReport, ExactError> {
    if !spec.is_automorphism_group() {
        return Err(ExactError::Other(
            "mixing analysis requires an automorphism-only spec (no translations)".into(),
        ));
    }
    if ball == 0 || norm_bound < 1 {
        return Err(ExactError::ZeroBudget);
    }
    let duals = dualize(spec)?;
    let alphabet = crate::exact::invariant::signed_alphabet(&duals)?;
    let (ball_elems, closed) = word_ball(
        &alphabet,
        BallOptions {
            radius: ball,
            max_elements: 2000,
        },
    );
    if closed {
        return Ok(MixingReport {
            strongly_mixing: Determination::No,
            certificate: Some(NotMixingCertificate::FiniteGroup {
                order: ball_elems.len(),
            }),
            max_fiber_half: ball_elems.len(),
            max_fiber_full: ball_elems.len(),
            ball_radius: ball,
            pairs_sampled: 0,
        });
    }
    // Infinite-order elements with a fixed dual vector.
    for (m, word) in ball_elems.iter().skip(1) {
        let diff = m - &RatMatrix::identity(m.rows);
        let ints = diff.to_bigint_entries()?;
        let rows: IntMat = ints.chunks(m.rows).map(<[BigInt]>::to_vec).collect();
        let ker = integer_kernel(&rows);
        if ker.is_empty() {
            continue;
        }
        if root_of_unity_exponent(m)?.is_some() {
            continue; // finite order: fixed vectors do not obstruct mixing by themselves
        }
        if let Some(v) = to_i64_vec(&ker[0]) {
            return Ok(MixingReport {
                strongly_mixing: Determination::No,
                certificate: Some(NotMixingCertificate::FixedVector {
                    word: word.clone(),
                    vector: v,
                }),
                max_fiber_half: 0,
                max_fiber_full: 0,
                ball_radius: ball,
                pairs_sampled: 0,
            });
        }
    }
    // Fiber counts over sampled pairs at half and full radius.
    let sample_bound = norm_bound.min(4);
    let points = enumerate_ball_points(spec.dim, sample_bound);
    let count_fibers = |elems: &[(RatMatrix, Vec<usize>)]| -> usize {
        let mut counts: BTreeMap<(Vec<i64>, Vec<i64>), usize> = BTreeMap::new();
        for (w, _) in elems {
            for m in &points {
                if m.iter().all(|&x| x == 0) {
                    continue;
                }
                let img = apply_int(w, m);
                *counts.entry((m.clone(), img)).or_insert(0) += 1;
            }
        }
        counts.values().copied().max().unwrap_or(0)
    };
    let (half_elems, _) = word_ball(
        &alphabet,
        BallOptions {
            radius: ball / 2,
            max_elements: 2000,
        },
    );
    let max_fiber_half = count_fibers(&half_elems);
    let max_fiber_full = count_fibers(&ball_elems);
    let nonzero_points = points.len().saturating_sub(1);
    Ok(MixingReport {
        strongly_mixing: Determination::EvidenceOnly,
        certificate: None,
        max_fiber_half,
        max_fiber_full,
        ball_radius: ball,
        pairs_sampled: nonzero_points * nonzero_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::rat;
    use crate::torus::affine::AffineMap;

    fn aut_spec(mats: &[Vec<Vec<i64>>]) -> AffineGroupSpec {
        let dim = mats[0].len();
        let gens = mats
            .iter()
            .map(|m| AffineMap::automorphism(RatMatrix::from_i64_rows(m)).unwrap())
            .collect();
        AffineGroupSpec::new(dim, gens, None).unwrap()
    }

    #[test]
    fn shear_is_not_ergodic_with_exact_witness() {
        let spec = aut_spec(&[vec![vec![1, 1], vec![0, 1]]]);
        let rep = ergodicity_check(&spec, 3).unwrap();
        assert_eq!(rep.ergodic, Determination::No);
        assert_eq!(rep.weakly_mixing, Determination::No);
        // The dual fixes (m1, m2) with m1 = 0; some finite orbit must be a
        // fixed point carrying a constant invariant vector.
        assert!(rep
            .finite_orbits
            .iter()
            .any(|o| o.points.len() == 1 && o.invariant_vector.is_some()));
    }

    #[test]
    fn cat_map_has_no_finite_orbit_up_to_50() {
        let spec = aut_spec(&[vec![vec![2, 1], vec![1, 1]]]);
        let rep = ergodicity_check(&spec, 50).unwrap();
        assert!(rep.finite_orbits.is_empty());
        assert_eq!(rep.ergodic, Determination::EvidenceOnly);
        assert_eq!(rep.weakly_mixing, Determination::EvidenceOnly);
    }

    #[test]
    fn rational_rotation_is_not_ergodic() {
        let id = RatMatrix::identity(2);
        let g = AffineMap::new(id, vec![rat(1, 3), rat(0, 1)]).unwrap();
        let spec = AffineGroupSpec::new(2, vec![g], None).unwrap();
        let rep = ergodicity_check(&spec, 3).unwrap();
        assert_eq!(rep.ergodic, Determination::No);
        // m = (3, 0) has phase exponent 3·(1/3) ≡ 0: invariant vector.
        assert!(rep.finite_orbits.iter().any(|o| o.invariant_vector.is_some()));
    }

    #[test]
    fn irrational_rotation_dual_points_obstructed_or_not() {
        // translation 1/2: m = (1,0) picks up phase 1/2, no invariant
        // vector on that orbit; m = (2,0) has phase 1 ≡ 0, invariant.
        let id = RatMatrix::identity(2);
        let g = AffineMap::new(id, vec![rat(1, 2), rat(0, 1)]).unwrap();
        let spec = AffineGroupSpec::new(2, vec![g], None).unwrap();
        let rep = ergodicity_check(&spec, 2).unwrap();
        let one_zero = rep
            .finite_orbits
            .iter()
            .find(|o| o.points == vec![vec![1, 0]])
            .unwrap();
        assert!(one_zero.invariant_vector.is_none());
        let two_zero = rep
            .finite_orbits
            .iter()
            .find(|o| o.points == vec![vec![2, 0]])
            .unwrap();
        assert!(two_zero.invariant_vector.is_some());
    }

    #[test]
    fn finite_rotation_group_is_not_mixing() {
        let spec = aut_spec(&[vec![vec![0, -1], vec![1, 0]]]);
        let rep = mixing_evidence(&spec, 6, 4).unwrap();
        assert_eq!(rep.strongly_mixing, Determination::No);
        assert!(matches!(
            rep.certificate,
            Some(NotMixingCertificate::FiniteGroup { .. })
        ));
    }

    #[test]
    fn shear_fixed_vector_blocks_mixing() {
        let spec = aut_spec(&[vec![vec![1, 1], vec![0, 1]]]);
        let rep = mixing_evidence(&spec, 4, 4).unwrap();
        assert_eq!(rep.strongly_mixing, Determination::No);
        assert!(matches!(
            rep.certificate,
            Some(NotMixingCertificate::FixedVector { .. })
        ));
    }

    #[test]
    fn cat_map_fibers_stay_bounded() {
        let spec = aut_spec(&[vec![vec![2, 1], vec![1, 1]]]);
        let rep = mixing_evidence(&spec, 8, 4).unwrap();
        assert_eq!(rep.strongly_mixing, Determination::EvidenceOnly);
        assert!(rep.max_fiber_full <= 1);
        assert!(rep.max_fiber_half <= rep.max_fiber_full);
    }

    #[test]
    fn affine_parts_rejected_for_mixing() {
        let id = RatMatrix::identity(2);
        let g = AffineMap::new(id, vec![rat(1, 2), rat(0, 1)]).unwrap();
        let spec = AffineGroupSpec::new(2, vec![g], None).unwrap();
        assert!(mixing_evidence(&spec, 4, 4).is_err());
    }
}
