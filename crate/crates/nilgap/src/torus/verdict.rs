//! The spectral gap verdict pipeline.
//!
//! NoGap answers carry an exactly verified witness: an invariant rational
//! subspace of the dual with an amenability or virtual-abelianness
//! certificate for the restricted group, plus the dual lattice of the
//! factor torus. Gap answers carry a Q-irreducibility certificate and a
//! refutation of virtual abelianness. Everything else is Unknown, with
//! the evidence log explaining which budgets ran out.

use super::affine::{dualize, AffineGroupSpec};
use super::core::{amenable_core, certify_restriction_amenable, commutator_words};
use super::va::{virtually_abelian, VaAnswer, VaCertificate};
use crate::exact::invariant::{
    minimal_invariant_subspaces, SearchBudget, SearchCompleteness,
};
use crate::exact::lattice::IntMat;
use crate::exact::subspace::restriction;
use crate::exact::{ExactError, RatMatrix, Subspace};
use serde::Serialize;

/// Tunable limits for the decision pipeline.
#[derive(Debug, Clone, Copy)]
pub struct Budgets {
    /// Nested commutator depth for the amenable core.
    pub commutator_depth: usize,
    /// Word-ball radius for the virtually-abelian search.
    pub group_ball: usize,
    /// Budget for the invariant-subspace search.
    pub search: SearchBudget,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            commutator_depth: 3,
            group_ball: 6,
            search: SearchBudget::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictKind {
    Gap,
    NoGap,
    Unknown,
}

/// Witness for a NoGap verdict: the invariant rational subspace W for the
/// dual group, its saturated lattice, the dual lattice W^⊥ ∩ Z^d of the
/// factor torus, and the certificate for the restricted group.
#[derive(Debug, Clone)]
pub struct Witness {
    pub subspace: Subspace,
    pub factor_lattice: IntMat,
    pub certificate: WitnessCertificate,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind")]
pub enum WitnessCertificate {
    Amenable {
        certificate: super::core::AmenabilityCertificate,
    },
    VirtuallyAbelian {
        certificate: VaCertificate,
    },
}

/// Structured evidence entry: which test fired and what it concluded.
#[derive(Debug, Clone, Serialize)]
pub struct EvidenceItem {
    pub step: String,
    pub outcome: String,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub witness: Option<Witness>,
    pub evidence: Vec<EvidenceItem>,
}

fn ev(steps: &mut Vec<EvidenceItem>, step: &str, outcome: &str, detail: String) {
    steps.push(EvidenceItem {
        step: step.to_string(),
        outcome: outcome.to_string(),
        detail,
    });
}

/// Decides the spectral gap property of the affine action described by
/// `spec`. Pipeline: dualize; amenable core with certificate; whole-group
/// virtual abelianness; minimal invariant subspaces with per-witness
/// virtual abelianness; Gap only with a Q-irreducibility certificate plus
/// a refutation of virtual abelianness; otherwise Unknown.
pub fn spectral_gap_verdict(
    spec: &AffineGroupSpec,
    budgets: &Budgets,
) -> Result<Verdict, ExactError> {
    let mut evidence = Vec::new();
    let duals = dualize(spec)?;
    ev(
        &mut evidence,
        "dualize",
        "ok",
        format!("{} dual generators, dimension {}", duals.len(), spec.dim),
    );

    // Step 2: amenable core.
    let core = amenable_core(&duals, budgets.commutator_depth)?;
    ev(
        &mut evidence,
        "amenable_core",
        if core.is_zero() { "trivial" } else { "nontrivial" },
        format!(
            "depth {}, core dimension {}",
            budgets.commutator_depth,
            core.dim()
        ),
    );
    if !core.is_zero() {
        if let Some(witness) =
            witness_from_core(&duals, &core, budgets.commutator_depth, &mut evidence)?
        {
            ev(
                &mut evidence,
                "verdict",
                "NoGap",
                "amenable restriction on the core witness; amenable factors never have a spectral gap"
                    .into(),
            );
            return Ok(Verdict {
                kind: VerdictKind::NoGap,
                witness: Some(witness),
                evidence,
            });
        }
    }

    // Step 3: virtual abelianness of the whole dual group (full-space
    // witness when yes).
    let va_full = virtually_abelian(&duals, budgets.group_ball)?;
    match &va_full {
        VaAnswer::Yes { certificate } => {
            ev(
                &mut evidence,
                "virtually_abelian(full)",
                "yes",
                format!("{certificate:?}"),
            );
            let mut w = Subspace::full(spec.dim);
            w.saturate();
            let factor_lattice = w
                .orthogonal_complement()
                .lattice_basis
                .unwrap_or_default();
            ev(
                &mut evidence,
                "verdict",
                "NoGap",
                "virtually abelian automorphism image with full-space witness".into(),
            );
            return Ok(Verdict {
                kind: VerdictKind::NoGap,
                witness: Some(Witness {
                    subspace: w,
                    factor_lattice,
                    certificate: WitnessCertificate::VirtuallyAbelian {
                        certificate: certificate.clone(),
                    },
                }),
                evidence,
            });
        }
        VaAnswer::No { certificate } => ev(
            &mut evidence,
            "virtually_abelian(full)",
            "no",
            format!(
                "free subsemigroup: words {:?} and {:?}, power {}",
                certificate.x_word, certificate.y_word, certificate.power
            ),
        ),
        VaAnswer::Unknown => ev(
            &mut evidence,
            "virtually_abelian(full)",
            "unknown",
            format!("ball radius {}", budgets.group_ball),
        ),
    }

    // Step 4: minimal invariant subspaces of the dual; a virtually abelian
    // restriction on any of them gives NoGap.
    let search = minimal_invariant_subspaces(&duals, budgets.search)?;
    ev(
        &mut evidence,
        "minimal_invariant_subspaces",
        match &search.completeness {
            SearchCompleteness::Exhausted { .. } => "exhausted",
            SearchCompleteness::Budget => "budget",
        },
        format!("{} proper invariant subspaces found", search.subspaces.len()),
    );
    for w in &search.subspaces {
        let restricted: Result<Vec<RatMatrix>, ExactError> =
            duals.iter().map(|g| restriction(g, w)).collect();
        let restricted = restricted?;
        let va_w = virtually_abelian(&restricted, budgets.group_ball)?;
        ev(
            &mut evidence,
            "virtually_abelian(restriction)",
            if va_w.is_yes() { "yes" } else { "no/unknown" },
            format!("witness dimension {}", w.dim()),
        );
        if let VaAnswer::Yes { certificate } = va_w {
            let factor_lattice = w
                .orthogonal_complement()
                .lattice_basis
                .unwrap_or_default();
            ev(
                &mut evidence,
                "verdict",
                "NoGap",
                "virtually abelian restriction on an invariant rational subspace".into(),
            );
            return Ok(Verdict {
                kind: VerdictKind::NoGap,
                witness: Some(Witness {
                    subspace: w.clone(),
                    factor_lattice,
                    certificate: WitnessCertificate::VirtuallyAbelian { certificate },
                }),
                evidence,
            });
        }
    }

    // Step 5: Gap needs certified irreducibility and a certified
    // refutation of virtual abelianness.
    if let SearchCompleteness::Exhausted { certificate } = &search.completeness {
        if va_full.is_no() {
            ev(
                &mut evidence,
                "verdict",
                "Gap",
                format!(
                    "Q-irreducibility certificate ({certificate:?}) and non-virtually-abelian \
                     image: no invariant factor torus with amenable projection exists, which is \
                     equivalent to the spectral gap property (no-gap ⇔ amenable factor ⇔ \
                     virtually abelian factor)"
                ),
            );
            return Ok(Verdict {
                kind: VerdictKind::Gap,
                witness: None,
                evidence,
            });
        }
    }

    ev(
        &mut evidence,
        "verdict",
        "Unknown",
        "budgets exhausted without certificate in either direction".into(),
    );
    Ok(Verdict {
        kind: VerdictKind::Unknown,
        witness: None,
        evidence,
    })
}

/// Builds the NoGap witness from a nontrivial amenable core: saturates the
/// core, restricts generators and tested commutators to it, and verifies
/// the amenability certificate.
fn witness_from_core(
    duals: &[RatMatrix],
    core: &Subspace,
    depth: usize,
    evidence: &mut Vec<EvidenceItem>,
) -> Result<Option<Witness>, ExactError> {
    let mut w = core.clone();
    w.saturate();
    let restricted: Result<Vec<RatMatrix>, ExactError> =
        duals.iter().map(|g| restriction(g, &w)).collect();
    let restricted = match restricted {
        Ok(r) => r,
        Err(_) => {
            ev(
                evidence,
                "core_witness",
                "failed",
                "core not invariant after saturation (unexpected)".into(),
            );
            return Ok(None);
        }
    };
    let commutators = commutator_words(duals, depth)?;
    let restricted_comms: Result<Vec<RatMatrix>, ExactError> = commutators
        .iter()
        .map(|c| restriction(c, &w))
        .collect();
    let restricted_comms = match restricted_comms {
        Ok(r) => r,
        Err(_) => {
            ev(
                evidence,
                "core_witness",
                "failed",
                "a tested commutator does not preserve the core".into(),
            );
            return Ok(None);
        }
    };
    match certify_restriction_amenable(&restricted, &restricted_comms)? {
        Some(cert) => {
            ev(
                evidence,
                "amenability_certificate",
                "ok",
                format!("{cert:?}"),
            );
            let factor_lattice = w
                .orthogonal_complement()
                .lattice_basis
                .unwrap_or_default();
            Ok(Some(Witness {
                subspace: w,
                factor_lattice,
                certificate: WitnessCertificate::Amenable { certificate: cert },
            }))
        }
        None => {
            ev(
                evidence,
                "amenability_certificate",
                "failed",
                "restricted commutators did not certify as unipotent-by-finite".into(),
            );
            Ok(None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::rat_int;
    use crate::exact::Rat;
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
    fn single_hyperbolic_is_nogap_with_full_witness() {
        let spec = aut_spec(&[vec![vec![2, 1], vec![1, 1]]]);
        let v = spectral_gap_verdict(&spec, &Budgets::default()).unwrap();
        assert_eq!(v.kind, VerdictKind::NoGap);
        let w = v.witness.unwrap();
        assert!(w.subspace.is_full());
    }

    #[test]
    fn sl2z_generators_have_gap() {
        let spec = aut_spec(&[
            vec![vec![0, -1], vec![1, 0]],
            vec![vec![1, 1], vec![0, 1]],
        ]);
        let v = spectral_gap_verdict(&spec, &Budgets::default()).unwrap();
        assert_eq!(v.kind, VerdictKind::Gap);
        assert!(v.witness.is_none());
    }

    #[test]
    fn verdict_is_conjugation_invariant() {
        let q = RatMatrix::from_i64_rows(&[vec![1, 1], vec![0, 1]]);
        let conj = |m: &RatMatrix| &(&q * m) * &q.inverse().unwrap();
        let base = [
            vec![vec![0, -1], vec![1, 0]],
            vec![vec![1, 1], vec![0, 1]],
        ];
        let spec = aut_spec(&base);
        let gens2: Vec<AffineMap> = spec
            .generators
            .iter()
            .map(|g| AffineMap::automorphism(conj(&g.matrix)).unwrap())
            .collect();
        let spec2 = AffineGroupSpec::new(2, gens2, None).unwrap();
        let v1 = spectral_gap_verdict(&spec, &Budgets::default()).unwrap();
        let v2 = spectral_gap_verdict(&spec2, &Budgets::default()).unwrap();
        assert_eq!(v1.kind, v2.kind);
    }

    #[test]
    fn translations_do_not_change_the_kind() {
        // The verdict depends on the automorphism part only.
        let m = RatMatrix::from_i64_rows(&[vec![2, 1], vec![1, 1]]);
        let g = AffineMap::new(m, vec![Rat::new(1.into(), 3.into()), rat_int(0)]).unwrap();
        let spec = AffineGroupSpec::new(2, vec![g], None).unwrap();
        let v = spectral_gap_verdict(&spec, &Budgets::default()).unwrap();
        assert_eq!(v.kind, VerdictKind::NoGap);
    }
}
