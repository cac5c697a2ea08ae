//! Invariant subspaces of matrix groups: spin closures, largest invariant
//! subspaces, and the budgeted search for minimal invariant rational
//! subspaces with irreducibility certificates.

use super::matrix::{charpoly, torsion_exponent, RatMatrix};
use super::modp::{modp_irreducible, ModMat, ModpOutcome};
use super::poly::IntPolynomial;
use super::rat::Rat;
use super::subspace::{rational_kernel, Subspace};
use super::ExactError;
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Smallest subspace containing `seed` and invariant under every
/// generator. Stabilizes in at most d rounds.
pub fn spin(
    seed: &[Vec<Rat>],
    gens: &[RatMatrix],
) -> Result<Subspace, ExactError> {
    let d = ambient(gens)?;
    for v in seed {
        if v.len() != d {
            return Err(ExactError::DimensionMismatch {
                expected: d,
                got: v.len(),
            });
        }
    }
    let mut w = Subspace::from_spanning(d, seed.to_vec());
    loop {
        let mut next = w.clone();
        for g in gens {
            next = next.sum(&w.image(g));
        }
        if next.dim() == w.dim() {
            return Ok(w);
        }
        w = next;
    }
}

/// Largest subspace U ⊆ w with g(U) ⊆ U for all generators: the decreasing
/// fixed point of U ↦ U ∩ ⋂ g⁻¹(U), reached in at most d steps.
pub fn largest_invariant_inside(
    w: &Subspace,
    gens: &[RatMatrix],
) -> Result<Subspace, ExactError> {
    let d = ambient(gens)?;
    if w.ambient_dim != d {
        return Err(ExactError::DimensionMismatch {
            expected: d,
            got: w.ambient_dim,
        });
    }
    let mut u = w.clone();
    loop {
        let mut next = u.clone();
        for g in gens {
            next = next.intersect(&u.preimage(g));
        }
        if next.dim() == u.dim() {
            return Ok(u);
        }
        u = next;
    }
}

fn ambient(gens: &[RatMatrix]) -> Result<usize, ExactError> {
    let first = gens
        .first()
        .ok_or_else(|| ExactError::Other("no generators".into()))?;
    if !first.is_square() {
        return Err(ExactError::NotSquare {
            rows: first.rows,
            cols: first.cols,
        });
    }
    let d = first.rows;
    for g in gens {
        if g.rows != d || g.cols != d {
            return Err(ExactError::DimensionMismatch {
                expected: d,
                got: g.rows,
            });
        }
    }
    Ok(d)
}

/// Completeness of an invariant-subspace search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum SearchCompleteness {
    /// A certificate proves there is no proper nontrivial invariant
    /// rational subspace at all.
    Exhausted { certificate: IrreducibilityCertificate },
    /// The word budget ran out; the list may be incomplete.
    Budget,
}

/// Proof object behind an `Exhausted` answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum IrreducibilityCertificate {
    /// d² group words span the full matrix algebra (Burnside): the module
    /// is absolutely irreducible.
    BurnsideSpan { words_spanning: usize },
    /// The reduction mod `prime` is an irreducible F_p-module (meataxe with
    /// exhaustive kernel-line spins). A proper invariant rational subspace
    /// would reduce to a proper invariant subspace mod every prime, so this
    /// is a proof of Q-irreducibility.
    ModPrime { prime: u64, singular_nullity: usize },
}

/// Result of [`minimal_invariant_subspaces`].
#[derive(Debug, Clone)]
pub struct InvariantSearch {
    /// Proper nontrivial invariant rational subspaces, saturated, each
    /// minimal among those found, canonically ordered.
    pub subspaces: Vec<Subspace>,
    pub completeness: SearchCompleteness,
}

/// Search budget. `word_len` bounds the breadth-first word enumeration;
/// `random_words` adds seeded random products on top.
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub word_len: usize,
    pub random_words: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            word_len: 4,
            random_words: 24,
            seed: 0x6e696c67,
        }
    }
}

/// Finds proper nontrivial invariant rational subspaces of the group
/// generated by `gens`, or certifies that none exist.
///
/// Candidates come from kernels of p(w) for words w: integer eigenvalue
/// kernels (rational root theorem on the characteristic polynomial),
/// unit-root kernels via gcd(χ_w, x^N − 1), and kernels of singular
/// elements of the enveloping algebra. Each candidate contributes both its
/// spin closure and the largest invariant subspace it contains.
pub fn minimal_invariant_subspaces(
    gens: &[RatMatrix],
    budget: SearchBudget,
) -> Result<InvariantSearch, ExactError> {
    if budget.word_len == 0 {
        return Err(ExactError::ZeroBudget);
    }
    let d = ambient(gens)?;
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);

    let alphabet = signed_alphabet(gens)?;
    let words = enumerate_words(&alphabet, budget.word_len, budget.random_words, &mut rng);

    let mut found: Vec<Subspace> = Vec::new();
    let consider = |w: Subspace, found: &mut Vec<Subspace>| {
        if w.is_proper_nontrivial() && !found.contains(&w) {
            found.push(w);
        }
    };

    for w in &words {
        // Integer eigenvalue kernels and their generalized versions.
        let chi = charpoly(w)?;
        for root in chi.integer_roots() {
            let shifted = w - &scalar(d, root);
            for m in [shifted.clone(), shifted.pow(d as i64)?] {
                for cand in kernel_candidates(&m, gens)? {
                    consider(cand, &mut found);
                }
            }
        }
        // Reciprocal-pair part of the spectrum (contains every cyclotomic
        // factor) with small coefficients throughout.
        let g = chi.gcd(&chi.reciprocal());
        if g.degree() > 0 && g.degree() < d {
            let gm = eval_poly(&g, w);
            for cand in kernel_candidates(&gm, gens)? {
                consider(cand, &mut found);
            }
        }
        // Fixed spaces of small powers: order-k eigenvalue parts.
        for k in [1i64, 2, 3, 4, 6, 8, 12] {
            if torsion_exponent(d) % (k as u64) != 0 {
                continue;
            }
            let fixed = &w.pow(k)? - &RatMatrix::identity(d);
            for cand in kernel_candidates(&fixed, gens)? {
                consider(cand, &mut found);
            }
        }
    }

    // Enveloping algebra over Q; also powers the Burnside certificate.
    let algebra = algebra_basis(gens, &words);
    if found.is_empty() {
        for _ in 0..12 {
            let v: Vec<Rat> = (0..d)
                .map(|_| Rat::from_integer(rng.gen_range(-4i64..=4).into()))
                .collect();
            if v.iter().all(Zero::is_zero) {
                continue;
            }
            if let Some(a) = singular_algebra_element(&algebra, &v, d) {
                for cand in kernel_candidates(&a, gens)? {
                    consider(cand, &mut found);
                }
            }
        }
    }

    // Keep minimal elements only, saturated, canonical order.
    let mut minimal: Vec<Subspace> = Vec::new();
    'outer: for w in &found {
        for other in &found {
            if other.dim() < w.dim() && w.contains(other) {
                continue 'outer;
            }
        }
        let mut w = w.clone();
        w.saturate();
        if !minimal.contains(&w) {
            minimal.push(w);
        }
    }
    minimal.sort_by(|a, b| a.canonical_cmp(b));

    if !minimal.is_empty() {
        return Ok(InvariantSearch {
            subspaces: minimal,
            completeness: SearchCompleteness::Budget,
        });
    }

    // Certificates of irreducibility.
    if algebra.len() == d * d {
        return Ok(InvariantSearch {
            subspaces: vec![],
            completeness: SearchCompleteness::Exhausted {
                certificate: IrreducibilityCertificate::BurnsideSpan {
                    words_spanning: d * d,
                },
            },
        });
    }
    for p in [5u64, 11, 13, 29, 37, 53] {
        let mods: Result<Vec<ModMat>, ExactError> = gens
            .iter()
            .map(|g| {
                let ints = g.to_bigint_entries()?;
                let rows: Vec<Vec<num::BigInt>> =
                    ints.chunks(d).map(<[num::BigInt]>::to_vec).collect();
                Ok(ModMat::from_bigint_rows(&rows, p))
            })
            .collect();
        let Ok(mods) = mods else { break };
        match modp_irreducible(&mods, p, &mut rng) {
            ModpOutcome::Irreducible {
                prime,
                singular_nullity,
            } => {
                return Ok(InvariantSearch {
                    subspaces: vec![],
                    completeness: SearchCompleteness::Exhausted {
                        certificate: IrreducibilityCertificate::ModPrime {
                            prime,
                            singular_nullity,
                        },
                    },
                });
            }
            ModpOutcome::ReducibleModP | ModpOutcome::Inconclusive => continue,
        }
    }

    Ok(InvariantSearch {
        subspaces: vec![],
        completeness: SearchCompleteness::Budget,
    })
}

/// Generators plus exact inverses.
pub fn signed_alphabet(gens: &[RatMatrix]) -> Result<Vec<RatMatrix>, ExactError> {
    let mut out = Vec::with_capacity(gens.len() * 2);
    for g in gens {
        out.push(g.clone());
        let inv = g.inverse()?;
        if !out.contains(&inv) {
            out.push(inv);
        }
    }
    Ok(out)
}

fn enumerate_words(
    alphabet: &[RatMatrix],
    max_len: usize,
    random_extra: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<RatMatrix> {
    let d = alphabet[0].rows;
    let mut seen: Vec<RatMatrix> = vec![RatMatrix::identity(d)];
    let mut frontier = seen.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for a in alphabet {
                let prod = a * w;
                if !seen.contains(&prod) {
                    seen.push(prod.clone());
                    next.push(prod);
                }
            }
        }
        frontier = next;
        if seen.len() > 400 {
            break;
        }
    }
    for _ in 0..random_extra {
        let len = rng.gen_range(2..=(2 * max_len.max(2)));
        let mut w = RatMatrix::identity(d);
        for _ in 0..len {
            let a = &alphabet[rng.gen_range(0..alphabet.len())];
            w = a * &w;
        }
        if !seen.contains(&w) {
            seen.push(w);
        }
    }
    seen
}

fn scalar(d: usize, lambda: i64) -> RatMatrix {
    let mut m = RatMatrix::zero(d, d);
    for i in 0..d {
        *m.at_mut(i, i) = Rat::from_integer(lambda.into());
    }
    m
}

fn eval_poly(p: &IntPolynomial, m: &RatMatrix) -> RatMatrix {
    let d = m.rows;
    let mut acc = RatMatrix::zero(d, d);
    for c in p.coefficients().iter().rev() {
        acc = &(&acc * m)
            + &{
                let mut s = RatMatrix::zero(d, d);
                for i in 0..d {
                    *s.at_mut(i, i) = Rat::from_integer(c.clone());
                }
                s
            };
    }
    acc
}

/// Both closure directions for a kernel candidate: the spin (smallest
/// invariant subspace containing it) and the largest invariant subspace
/// inside it.
fn kernel_candidates(
    m: &RatMatrix,
    gens: &[RatMatrix],
) -> Result<Vec<Subspace>, ExactError> {
    let ker = rational_kernel(m);
    if ker.is_empty() {
        return Ok(vec![]);
    }
    let d = m.rows;
    let mut out = Vec::new();
    let kspace = Subspace::from_spanning(d, ker.clone());
    out.push(largest_invariant_inside(&kspace, gens)?);
    for v in &ker {
        out.push(spin(std::slice::from_ref(v), gens)?);
    }
    out.push(spin(&ker, gens)?);
    Ok(out)
}

/// Echelon basis of the enveloping algebra spanned by the given words,
/// as matrices.
fn algebra_basis(gens: &[RatMatrix], words: &[RatMatrix]) -> Vec<RatMatrix> {
    let d = gens[0].rows;
    let mut basis_vecs: Vec<Vec<Rat>> = Vec::new();
    let mut basis_mats: Vec<RatMatrix> = Vec::new();
    let add = |m: &RatMatrix, vecs: &mut Vec<Vec<Rat>>, mats: &mut Vec<RatMatrix>| {
        let flat: Vec<Rat> = m.rows_iter().flatten().cloned().collect();
        let mut rows = vecs.clone();
        rows.push(flat);
        let red = super::subspace::rref(rows);
        if red.len() > vecs.len() {
            *vecs = red;
            mats.push(m.clone());
            true
        } else {
            false
        }
    };
    for w in words {
        add(w, &mut basis_vecs, &mut basis_mats);
        if basis_vecs.len() == d * d {
            return basis_mats;
        }
    }
    // Close under left multiplication by generators so the span is an
    // honest algebra basis even when the word list was thin.
    let mut frontier = basis_mats.clone();
    while !frontier.is_empty() && basis_vecs.len() < d * d {
        let mut next = Vec::new();
        for w in &frontier {
            for g in gens {
                let prod = g * w;
                if add(&prod, &mut basis_vecs, &mut basis_mats) {
                    next.push(prod);
                }
            }
        }
        frontier = next;
    }
    basis_mats
}

/// Finds a singular element a = Σ cᵢ aᵢ of the algebra with a·v = 0,
/// by exact linear solve; None when only the zero combination works.
fn singular_algebra_element(
    algebra: &[RatMatrix],
    v: &[Rat],
    d: usize,
) -> Option<RatMatrix> {
    let m = algebra.len();
    if m == 0 {
        return None;
    }
    // Rows: [aᵢ·v ; e_i] over Q; echelon rows with vanished head give combos.
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m);
    for (i, a) in algebra.iter().enumerate() {
        let mut r = a.apply(v);
        let mut tag = vec![Rat::zero(); m];
        tag[i] = Rat::one();
        r.extend(tag);
        rows.push(r);
    }
    let red = super::subspace::rref(rows);
    for row in &red {
        if row[..d].iter().all(Zero::is_zero) {
            let combo = &row[d..];
            if combo.iter().all(Zero::is_zero) {
                continue;
            }
            let mut acc = RatMatrix::zero(d, d);
            for (c, a) in combo.iter().zip(algebra) {
                if !c.is_zero() {
                    for i in 0..d {
                        for j in 0..d {
                            *acc.at_mut(i, j) += c * a.at(i, j);
                        }
                    }
                }
            }
            if !acc.is_zero() {
                return Some(acc);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::rat_int;

    fn vi(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    fn e(i: usize, d: usize) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); d];
        v[i] = Rat::one();
        v
    }

    #[test]
    fn spin_identity_and_rotation() {
        let id = RatMatrix::identity(2);
        let w = spin(&[e(0, 2)], &[id]).unwrap();
        assert_eq!(w.dim(), 1);
        let rot = RatMatrix::from_i64_rows(&[vec![0, -1], vec![1, 0]]);
        let w = spin(&[e(0, 2)], &[rot]).unwrap();
        assert!(w.is_full());
    }

    #[test]
    fn spin_of_mixed_vector_under_nonsimilar_blocks() {
        // diag(A, B) with A = cat map, B = rotation: brute-force closure of
        // e1+e3 must reach the full space.
        let g = RatMatrix::from_i64_rows(&[
            vec![2, 1, 0, 0],
            vec![1, 1, 0, 0],
            vec![0, 0, 0, -1],
            vec![0, 0, 1, 0],
        ]);
        let seed = vec![vi(&[1, 0, 1, 0])];
        let w = spin(&seed, &[g]).unwrap();
        assert!(w.is_full());
    }

    #[test]
    fn largest_invariant_examples() {
        // transpose-shear moves e1: largest invariant inside span(e1) is 0.
        let g = RatMatrix::from_i64_rows(&[vec![1, 0], vec![1, 1]]);
        let e1 = Subspace::from_spanning(2, vec![e(0, 2)]);
        assert!(largest_invariant_inside(&e1, &[g]).unwrap().is_zero());
        // shear fixes e1.
        let g = RatMatrix::from_i64_rows(&[vec![1, 1], vec![0, 1]]);
        let w = largest_invariant_inside(&e1, &[g.clone()]).unwrap();
        assert_eq!(w, e1);
        // full space stays full for invertibles.
        let full = Subspace::full(2);
        assert!(largest_invariant_inside(&full, &[g]).unwrap().is_full());
    }

    #[test]
    fn spin_then_largest_inside_is_idempotent() {
        let gens = vec![
            RatMatrix::from_i64_rows(&[vec![1, 1], vec![0, 1]]),
            RatMatrix::from_i64_rows(&[vec![1, 0], vec![0, -1]]),
        ];
        let w = spin(&[e(0, 2)], &gens).unwrap();
        let u = largest_invariant_inside(&w, &gens).unwrap();
        assert_eq!(u, w);
    }

    #[test]
    fn block_triangular_has_invariant_line() {
        // Both generators fix the e1 axis; the rotation block keeps the
        // rest irreducible over Q.
        let g = RatMatrix::from_i64_rows(&[vec![1, 0, 0], vec![0, 0, -1], vec![0, 1, 0]]);
        let h = RatMatrix::from_i64_rows(&[vec![1, 0, 0], vec![0, 1, 1], vec![0, 0, 1]]);
        let res = minimal_invariant_subspaces(&[g, h], SearchBudget::default()).unwrap();
        assert!(!res.subspaces.is_empty());
        let e1 = Subspace::from_spanning(3, vec![e(0, 3)]);
        assert!(res.subspaces.iter().any(|w| w == &e1));
    }

    #[test]
    fn sl2z_is_exhausted_irreducible() {
        let s = RatMatrix::from_i64_rows(&[vec![0, -1], vec![1, 0]]);
        let t = RatMatrix::from_i64_rows(&[vec![1, 1], vec![0, 1]]);
        let res = minimal_invariant_subspaces(&[s, t], SearchBudget::default()).unwrap();
        assert!(res.subspaces.is_empty());
        assert!(matches!(
            res.completeness,
            SearchCompleteness::Exhausted {
                certificate: IrreducibilityCertificate::BurnsideSpan { .. }
            }
        ));
    }

    #[test]
    fn zero_budget_rejected() {
        let s = RatMatrix::identity(2);
        let budget = SearchBudget {
            word_len: 0,
            ..Default::default()
        };
        assert!(minimal_invariant_subspaces(&[s], budget).is_err());
    }
}
