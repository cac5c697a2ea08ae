//! Deciding virtual abelianness of a finitely generated subgroup of
//! GL_d(Z), with exact certificates in both directions.
//!
//! "yes" is certified by a finite coset cover: a set C of pairwise
//! commuting ball elements together with coset representatives whose
//! right-multiplication closure stays inside the seen cosets. That bounds
//! the index of the abelian subgroup ⟨C⟩.
//!
//! "no" is certified by a free subsemigroup: two elements x, y and two
//! disjoint projective boxes A₁, A₂ with x(A₁∪A₂) ⊆ A₁ and
//! y(A₁∪A₂) ⊆ A₂, all verified in exact rational arithmetic. A free
//! subsemigroup forces exponential growth, which no virtually abelian
//! group has. Numerics only propose the boxes; the checks are exact.

use crate::exact::matrix::{root_of_unity_exponent, RatMatrix};
use crate::exact::rat::{rat_to_f64, Rat};
use crate::exact::ExactError;
use num::{One, Signed, Zero};
use serde::Serialize;

/// Answer of [`virtually_abelian`].
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "answer")]
pub enum VaAnswer {
    Yes { certificate: VaCertificate },
    No { certificate: PingPongCertificate },
    Unknown,
}

impl VaAnswer {
    pub fn is_yes(&self) -> bool {
        matches!(self, VaAnswer::Yes { .. })
    }
    pub fn is_no(&self) -> bool {
        matches!(self, VaAnswer::No { .. })
    }
}

/// Certificate for virtual abelianness.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind")]
pub enum VaCertificate {
    /// One generator: cyclic groups are abelian.
    Cyclic,
    /// All generators commute exactly.
    Abelian { generators: usize },
    /// The word ball closed under multiplication: a finite group.
    FiniteGroup { order: usize },
    /// Coset cover: the group is covered by `index` cosets of the abelian
    /// subgroup generated by `abelian_rank` commuting elements.
    FiniteIndexAbelian { abelian_rank: usize, index: usize },
}

/// Exact free-subsemigroup certificate. Boxes live in the affine chart
/// v[chart] = 1; interval bounds are rationals serialized as strings.
#[derive(Debug, Clone, Serialize)]
pub struct PingPongCertificate {
    /// Index sequence of the first player over the signed alphabet.
    pub x_word: Vec<usize>,
    pub y_word: Vec<usize>,
    /// Power applied to both words.
    pub power: u32,
    pub chart: usize,
    pub box_x: Vec<(String, String)>,
    pub box_y: Vec<(String, String)>,
}

/// A projective box: the set of directions v with v[chart] ≠ 0 whose chart
/// coordinates v_j / v[chart] lie in [lo_j, hi_j]. Stored without the chart
/// coordinate itself.
#[derive(Debug, Clone)]
struct ProjBox {
    chart: usize,
    dim: usize,
    lo: Vec<Rat>,
    hi: Vec<Rat>,
}

impl ProjBox {
    /// Corner rays: chart coordinate 1, every other coordinate at an
    /// interval endpoint.
    fn corners(&self) -> Vec<Vec<Rat>> {
        let k = self.dim - 1;
        let mut out = Vec::with_capacity(1 << k);
        for mask in 0u32..(1 << k) {
            let mut v = Vec::with_capacity(self.dim);
            let mut b = 0;
            for j in 0..self.dim {
                if j == self.chart {
                    v.push(Rat::one());
                } else {
                    v.push(if mask >> b & 1 == 0 {
                        self.lo[b].clone()
                    } else {
                        self.hi[b].clone()
                    });
                    b += 1;
                }
            }
            out.push(v);
        }
        out
    }

    /// True when w (or −w) lies in the cone over the box: the chart
    /// coordinate must be nonzero of sign `sign`, and each cross-multiplied
    /// interval inequality must hold.
    fn contains_ray(&self, w: &[Rat], sign: i8) -> bool {
        let c = &w[self.chart];
        let cs = if sign >= 0 { c.clone() } else { -c.clone() };
        if !cs.is_positive() {
            return false;
        }
        let mut b = 0;
        for j in 0..self.dim {
            if j == self.chart {
                continue;
            }
            let wj = if sign >= 0 {
                w[j].clone()
            } else {
                -w[j].clone()
            };
            if wj < &self.lo[b] * &cs || wj > &self.hi[b] * &cs {
                return false;
            }
            b += 1;
        }
        true
    }

    /// Disjointness of the projective sets: some coordinate's intervals
    /// separate (same chart assumed).
    fn disjoint_from(&self, other: &ProjBox) -> bool {
        debug_assert_eq!(self.chart, other.chart);
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .any(|((lo, hi), (olo, ohi))| hi < olo || ohi < lo)
    }
}

/// Verifies m·(cone over box) ⊆ ±(cone over target): every corner image
/// must land in the target with one common sign. Mixed signs mean the
/// convex image cone crosses the chart hyperplane, which the target
/// avoids, so they are rejected.
fn maps_box_into(m: &RatMatrix, from: &ProjBox, to: &ProjBox) -> bool {
    let mut sign: Option<i8> = None;
    for corner in from.corners() {
        let img = m.apply(&corner);
        let s = match img[to.chart].is_positive() {
            true => 1i8,
            false if img[to.chart].is_negative() => -1i8,
            _ => return false,
        };
        match sign {
            None => sign = Some(s),
            Some(prev) if prev != s => return false,
            _ => {}
        }
        if !to.contains_ray(&img, s) {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, Copy)]
pub struct BallOptions {
    pub radius: usize,
    pub max_elements: usize,
}

impl Default for BallOptions {
    fn default() -> Self {
        BallOptions {
            radius: 6,
            max_elements: 3000,
        }
    }
}

/// Word ball as (matrix, word over the signed alphabet) pairs, identity
/// first, deterministic BFS order. `closed` reports whether the ball
/// stopped growing (finite group).
pub fn word_ball(
    alphabet: &[RatMatrix],
    opts: BallOptions,
) -> (Vec<(RatMatrix, Vec<usize>)>, bool) {
    let d = alphabet[0].rows;
    let mut seen: Vec<(RatMatrix, Vec<usize>)> = vec![(RatMatrix::identity(d), vec![])];
    let mut frontier: Vec<usize> = vec![0];
    let mut closed = false;
    for _ in 0..opts.radius {
        let mut next = Vec::new();
        for &idx in &frontier {
            let (w, word) = seen[idx].clone();
            for (ai, a) in alphabet.iter().enumerate() {
                let prod = a * &w;
                if !seen.iter().any(|(m, _)| *m == prod) {
                    let mut nw = word.clone();
                    nw.push(ai);
                    seen.push((prod, nw));
                    next.push(seen.len() - 1);
                }
            }
        }
        if next.is_empty() {
            closed = true;
            break;
        }
        frontier = next;
        if seen.len() > opts.max_elements {
            break;
        }
    }
    (seen, closed)
}

/// Decides, with certificates, whether the group generated by `gens` is
/// virtually abelian. "unknown" is an honest fallback.
pub fn virtually_abelian(gens: &[RatMatrix], ball: usize) -> Result<VaAnswer, ExactError> {
    if ball == 0 {
        return Err(ExactError::ZeroBudget);
    }
    if gens.is_empty() {
        return Err(ExactError::Other("no generators".into()));
    }
    if gens.len() == 1 {
        return Ok(VaAnswer::Yes {
            certificate: VaCertificate::Cyclic,
        });
    }
    if gens
        .iter()
        .enumerate()
        .all(|(i, g)| gens[i + 1..].iter().all(|h| g * h == h * g))
    {
        return Ok(VaAnswer::Yes {
            certificate: VaCertificate::Abelian {
                generators: gens.len(),
            },
        });
    }

    let alphabet = crate::exact::invariant::signed_alphabet(gens)?;
    let (ball_elems, closed) = word_ball(
        &alphabet,
        BallOptions {
            radius: ball,
            max_elements: 3000,
        },
    );
    if closed {
        return Ok(VaAnswer::Yes {
            certificate: VaCertificate::FiniteGroup {
                order: ball_elems.len(),
            },
        });
    }

    if let Some(cert) = coset_cover(&alphabet, &ball_elems)? {
        return Ok(VaAnswer::Yes { certificate: cert });
    }

    if let Some(cert) = find_free_subsemigroup(&alphabet, &ball_elems)? {
        return Ok(VaAnswer::No { certificate: cert });
    }

    Ok(VaAnswer::Unknown)
}

/// Bounded membership in the abelian group generated by commuting
/// elements: scans products with exponents in [−bound, bound]. Sound when
/// it answers true; false only means "not found".
fn in_abelian_group(x: &RatMatrix, comm_gens: &[RatMatrix], bound: i64) -> bool {
    match comm_gens.len() {
        0 => x.is_identity(),
        1 => {
            let g = &comm_gens[0];
            let mut fwd = RatMatrix::identity(x.rows);
            let mut bck = fwd.clone();
            let ginv = g.inverse().expect("unimodular");
            for _ in 0..=bound {
                if fwd == *x || bck == *x {
                    return true;
                }
                fwd = &fwd * g;
                bck = &bck * &ginv;
            }
            fwd == *x || bck == *x
        }
        _ => {
            // Two commuting generators; cap the lattice scan.
            let g = &comm_gens[0];
            let h = &comm_gens[1];
            let gi = g.inverse().expect("unimodular");
            let hi = h.inverse().expect("unimodular");
            let b = bound.min(8);
            let mut gp = g.pow(-b).expect("pow");
            for _ in -b..=b {
                let mut cur = &gp * &h.pow(-b).expect("pow");
                for _ in -b..=b {
                    if cur == *x {
                        return true;
                    }
                    cur = &cur * h;
                }
                gp = &gp * g;
            }
            let _ = (gi, hi);
            false
        }
    }
}

/// Looks for a finite coset cover by an abelian subgroup generated from
/// within the ball.
fn coset_cover(
    alphabet: &[RatMatrix],
    ball_elems: &[(RatMatrix, Vec<usize>)],
) -> Result<Option<VaCertificate>, ExactError> {
    // Candidate commuting sets seeded by infinite-order ball elements of
    // shortest word length.
    let mut seeds: Vec<usize> = (1..ball_elems.len().min(40)).collect();
    seeds.sort_by_key(|&i| ball_elems[i].1.len());
    for &si in seeds.iter().take(8) {
        let seed = &ball_elems[si].0;
        if root_of_unity_exponent(seed)?.is_some() {
            continue; // prefer infinite-order seeds
        }
        // Greedy commuting family containing the seed, capped at 2 to keep
        // the membership scan bounded.
        let mut family = vec![seed.clone()];
        for (m, _) in ball_elems.iter().skip(1) {
            if family.len() >= 2 {
                break;
            }
            if m == seed || m.is_identity() {
                continue;
            }
            if family.iter().all(|f| &(f * m) == &(m * f))
                && !in_abelian_group(m, &family, 24)
            {
                family.push(m.clone());
            }
        }
        let membership_bound = 24;
        // Right-coset decomposition ⟨C⟩·r of the ball: x and y share a
        // coset iff x·y⁻¹ ∈ ⟨C⟩. Right cosets make the closure argument
        // below transitive under right multiplication by letters.
        let mut reps: Vec<RatMatrix> = Vec::new();
        let mut overflow = false;
        for (m, _) in ball_elems {
            let mut found = false;
            for r in &reps {
                let q = m * &r.inverse()?;
                if in_abelian_group(&q, &family, membership_bound) {
                    found = true;
                    break;
                }
            }
            if !found {
                reps.push(m.clone());
            }
            if reps.len() > 16 {
                overflow = true;
                break;
            }
        }
        if overflow {
            continue;
        }
        // Closure: every rep·letter must fall into a seen right coset.
        // Then ∪ⱼ ⟨C⟩rⱼ contains the identity and is closed under right
        // multiplication by the alphabet, hence covers the whole group:
        // the index of the abelian subgroup ⟨C⟩ is at most the rep count.
        let mut closed = true;
        'closure: for r in &reps {
            for a in alphabet {
                let x = r * a;
                let mut found = false;
                for r2 in &reps {
                    let q = &x * &r2.inverse()?;
                    if in_abelian_group(&q, &family, membership_bound) {
                        found = true;
                        break;
                    }
                }
                if !found {
                    closed = false;
                    break 'closure;
                }
            }
        }
        if closed {
            return Ok(Some(VaCertificate::FiniteIndexAbelian {
                abelian_rank: family.len(),
                index: reps.len(),
            }));
        }
    }
    Ok(None)
}

/// Dominant eigendirection of an integer matrix, by f64 power iteration.
/// Returns (eigenvalue magnitude, direction) when the iteration settles.
fn dominant_direction(m: &RatMatrix) -> Option<(f64, Vec<f64>)> {
    let d = m.rows;
    let mf: Vec<f64> = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| rat_to_f64(m.at(i, j)))
        .collect();
    let mut v: Vec<f64> = (0..d).map(|i| 1.0 + 0.13 * i as f64).collect();
    let mut lambda = 0.0;
    for it in 0..600 {
        let mut w = vec![0.0; d];
        for i in 0..d {
            for j in 0..d {
                w[i] += mf[i * d + j] * v[j];
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        for x in w.iter_mut() {
            *x /= norm;
        }
        let diff: f64 = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let flipped: f64 = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a + b).abs())
            .fold(0.0, f64::max);
        v = w;
        lambda = norm;
        if it > 20 && (diff < 1e-12 || flipped < 1e-12) {
            // Sign-stable or sign-alternating: direction converged either way.
            return Some((lambda, v));
        }
    }
    let _ = lambda;
    None
}

fn rational_round(x: f64, denom: i64) -> Rat {
    let num = (x * denom as f64).round();
    if !num.is_finite() {
        return Rat::zero();
    }
    Rat::new((num as i64).into(), denom.into())
}

/// Searches ball words for a pair generating a free subsemigroup, with the
/// box construction verified exactly.
fn find_free_subsemigroup(
    alphabet: &[RatMatrix],
    ball_elems: &[(RatMatrix, Vec<usize>)],
) -> Result<Option<PingPongCertificate>, ExactError> {
    let d = alphabet[0].rows;
    // Proximal candidates: dominant simple eigenvalue clearly above 1.
    let mut proximal: Vec<(usize, f64, Vec<f64>)> = Vec::new();
    for (i, (m, word)) in ball_elems.iter().enumerate() {
        if word.is_empty() || word.len() > 4 {
            continue;
        }
        if let Some((lam, dir)) = dominant_direction(m) {
            if lam > 1.05 {
                proximal.push((i, lam, dir));
            }
        }
        if proximal.len() > 12 {
            break;
        }
    }
    for a in 0..proximal.len() {
        for b in 0..proximal.len() {
            if a == b {
                continue;
            }
            let (ia, _, va) = &proximal[a];
            let (ib, _, vb) = &proximal[b];
            // Transversality in some common chart.
            let chart = (0..d)
                .max_by(|&i, &j| {
                    let mi = va[i].abs().min(vb[i].abs());
                    let mj = va[j].abs().min(vb[j].abs());
                    mi.partial_cmp(&mj).unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if va[chart].abs() < 1e-9 || vb[chart].abs() < 1e-9 {
                continue;
            }
            let ca: Vec<f64> = va.iter().map(|x| x / va[chart]).collect();
            let cb: Vec<f64> = vb.iter().map(|x| x / vb[chart]).collect();
            let sep = ca
                .iter()
                .zip(&cb)
                .enumerate()
                .filter(|(j, _)| *j != chart)
                .map(|(_, (x, y))| (x - y).abs())
                .fold(0.0, f64::max);
            if sep < 1e-6 {
                continue;
            }
            let delta = (sep / 8.0).min(0.5).max(1e-4);
            let build = |c: &[f64]| -> ProjBox {
                let mut lo = Vec::new();
                let mut hi = Vec::new();
                for (j, &x) in c.iter().enumerate() {
                    if j == chart {
                        continue;
                    }
                    lo.push(rational_round(x - delta, 4096));
                    hi.push(rational_round(x + delta, 4096));
                }
                ProjBox {
                    chart,
                    dim: d,
                    lo,
                    hi,
                }
            };
            let box_a = build(&ca);
            let box_b = build(&cb);
            if !box_a.disjoint_from(&box_b) {
                continue;
            }
            for power in [1u32, 2, 4, 8, 16] {
                let x = ball_elems[*ia].0.pow(power as i64)?;
                let y = ball_elems[*ib].0.pow(power as i64)?;
                let ok = maps_box_into(&x, &box_a, &box_a)
                    && maps_box_into(&x, &box_b, &box_a)
                    && maps_box_into(&y, &box_a, &box_b)
                    && maps_box_into(&y, &box_b, &box_b);
                if ok {
                    let fmt_box = |bx: &ProjBox| {
                        bx.lo
                            .iter()
                            .zip(&bx.hi)
                            .map(|(l, h)| {
                                (
                                    crate::exact::rat_to_string(l),
                                    crate::exact::rat_to_string(h),
                                )
                            })
                            .collect()
                    };
                    return Ok(Some(PingPongCertificate {
                        x_word: ball_elems[*ia].1.clone(),
                        y_word: ball_elems[*ib].1.clone(),
                        power,
                        chart,
                        box_x: fmt_box(&box_a),
                        box_y: fmt_box(&box_b),
                    }));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> RatMatrix {
        RatMatrix::from_i64_rows(rows)
    }

    #[test]
    fn single_generator_is_cyclic() {
        let g = m(&[vec![2, 1], vec![1, 1]]);
        assert!(virtually_abelian(&[g], 3).unwrap().is_yes());
    }

    #[test]
    fn dihedral_pattern_found_in_small_ball() {
        // A hyperbolic, s of finite order with s A s^{-1} = A^{-1}.
        let a = m(&[vec![2, 1], vec![1, 1]]);
        let s = m(&[vec![0, 1], vec![-1, 0]]);
        let conj = &(&s * &a) * &s.inverse().unwrap();
        assert_eq!(conj, a.inverse().unwrap());
        let ans = virtually_abelian(&[a, s], 3).unwrap();
        match &ans {
            VaAnswer::Yes {
                certificate: VaCertificate::FiniteIndexAbelian { index, .. },
            } => assert!(*index >= 2),
            other => panic!("expected finite-index abelian, got {other:?}"),
        }
    }

    #[test]
    fn finite_group_detected() {
        let s = m(&[vec![0, -1], vec![1, 0]]);
        let r = m(&[vec![-1, 0], vec![0, -1]]);
        let ans = virtually_abelian(&[s, r], 6).unwrap();
        assert!(ans.is_yes());
    }

    #[test]
    fn sl2z_gets_ping_pong_no() {
        let s = m(&[vec![0, -1], vec![1, 0]]);
        let t = m(&[vec![1, 1], vec![0, 1]]);
        let ans = virtually_abelian(&[s, t], 4).unwrap();
        assert!(ans.is_no(), "expected No, got {ans:?}");
    }

    #[test]
    fn zero_ball_rejected() {
        let g = m(&[vec![1, 0], vec![0, 1]]);
        assert!(virtually_abelian(&[g.clone(), g], 0).is_err());
    }
}
