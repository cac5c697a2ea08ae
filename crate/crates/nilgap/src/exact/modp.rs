//! Matrices over F_p and an exact irreducibility certificate.
//!
//! The certificate chain for Q-irreducibility needs a test that works when
//! the enveloping algebra is a proper simple algebra (where no d² group
//! words can span M_d(Q)). Reduction mod p provides one: a proper nonzero
//! invariant rational subspace W has a saturated basis of W ∩ Z^d, whose
//! reduction mod any prime is a proper nonzero invariant subspace of F_p^d.
//! So F_p-irreducibility at a single prime certifies Q-irreducibility.
//!
//! F_p-irreducibility itself is decided by Norton's criterion: for a
//! singular element a of the enveloping algebra, every proper submodule
//! either meets ker(a) or its annihilator meets ker(aᵗ); spinning every
//! line of both kernels is a finite, exact check.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Dense matrix over F_p, row-major, entries in [0, p).
#[derive(Clone, PartialEq, Eq)]
pub struct ModMat {
    pub n: usize,
    pub p: u64,
    e: Vec<u64>,
}

impl ModMat {
    pub fn zero(n: usize, p: u64) -> Self {
        ModMat {
            n,
            p,
            e: vec![0; n * n],
        }
    }

    pub fn identity(n: usize, p: u64) -> Self {
        let mut m = ModMat::zero(n, p);
        for i in 0..n {
            m.e[i * n + i] = 1;
        }
        m
    }

    pub fn from_bigint_rows(rows: &[Vec<num::BigInt>], p: u64) -> Self {
        use num::bigint::Sign;
        let n = rows.len();
        let mut m = ModMat::zero(n, p);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n);
            for (j, v) in row.iter().enumerate() {
                let r = (v.magnitude() % p).to_u64_digits();
                let r = if r.is_empty() { 0 } else { r[0] };
                m.e[i * n + j] = if v.sign() == Sign::Minus && r != 0 {
                    p - r
                } else {
                    r
                };
            }
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> u64 {
        self.e[i * self.n + j]
    }

    pub fn mul(&self, rhs: &ModMat) -> ModMat {
        let n = self.n;
        let p = self.p;
        let mut out = ModMat::zero(n, p);
        for i in 0..n {
            for k in 0..n {
                let a = self.e[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.e[k * n + j];
                    if b != 0 {
                        out.e[i * n + j] = (out.e[i * n + j] + a * b) % p;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> ModMat {
        let n = self.n;
        let mut out = ModMat::zero(n, self.p);
        for i in 0..n {
            for j in 0..n {
                out.e[j * n + i] = self.e[i * n + j];
            }
        }
        out
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let mut acc = 0u64;
                for j in 0..n {
                    acc = (acc + self.e[i * n + j] * v[j]) % self.p;
                }
                acc
            })
            .collect()
    }

    pub fn as_vec(&self) -> &[u64] {
        &self.e
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat: p prime.
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    acc
}

/// Row-reduces vectors over F_p, in place semantics: returns an echelon
/// basis of the span.
pub fn echelon(vectors: Vec<Vec<u64>>, p: u64) -> Vec<Vec<u64>> {
    let mut basis: Vec<Vec<u64>> = Vec::new();
    for mut v in vectors {
        for b in &basis {
            let lead = b.iter().position(|&x| x != 0).unwrap();
            if v[lead] != 0 {
                let f = v[lead];
                for (x, y) in v.iter_mut().zip(b) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        if v.iter().any(|&x| x != 0) {
            let lead = v.iter().position(|&x| x != 0).unwrap();
            let inv = inv_mod(v[lead], p);
            for x in v.iter_mut() {
                *x = *x * inv % p;
            }
            // Back-substitute into existing rows.
            for b in basis.iter_mut() {
                if b[lead] != 0 {
                    let f = b[lead];
                    for (x, y) in b.iter_mut().zip(&v) {
                        *x = (*x + (p - f) * y) % p;
                    }
                }
            }
            basis.push(v);
            basis.sort_by_key(|b| b.iter().position(|&x| x != 0).unwrap());
        }
    }
    basis
}

/// Kernel basis of a ModMat.
pub fn kernel(m: &ModMat) -> Vec<Vec<u64>> {
    let n = m.n;
    let p = m.p;
    let rows: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| m.at(i, j)).collect()).collect();
    let red = echelon(rows, p);
    let pivots: Vec<usize> = red
        .iter()
        .map(|r| r.iter().position(|&x| x != 0).unwrap())
        .collect();
    let mut out = Vec::new();
    for free in 0..n {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![0u64; n];
        v[free] = 1;
        for (row, &piv) in red.iter().zip(&pivots) {
            v[piv] = (p - row[free] % p) % p;
        }
        out.push(v);
    }
    out
}

/// Spin of a vector under a set of matrices: the smallest invariant
/// subspace containing it. Returns an echelon basis.
pub fn spin_vector(v: &[u64], gens: &[ModMat], p: u64) -> Vec<Vec<u64>> {
    let mut basis = echelon(vec![v.to_vec()], p);
    let mut frontier = basis.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for w in &frontier {
            for g in gens {
                let img = g.apply(w);
                let before = basis.len();
                basis = echelon(
                    basis.iter().cloned().chain(std::iter::once(img.clone())).collect(),
                    p,
                );
                if basis.len() > before {
                    next.push(img);
                }
            }
        }
        frontier = next;
    }
    basis
}

/// Enumerates representatives of the 1-dimensional subspaces of the span
/// of `basis` (projective points), for the exhaustive Norton check.
fn projective_lines(basis: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let k = basis.len();
    let n = basis.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    // First nonzero coordinate (in the combination space) equal to 1.
    let mut combo = vec![0u64; k];
    fn rec(
        i: usize,
        started: bool,
        combo: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
        basis: &[Vec<u64>],
        n: usize,
        p: u64,
    ) {
        let k = combo.len();
        if i == k {
            if started {
                let mut v = vec![0u64; n];
                for (c, b) in combo.iter().zip(basis) {
                    if *c != 0 {
                        for (x, y) in v.iter_mut().zip(b) {
                            *x = (*x + c * y) % p;
                        }
                    }
                }
                out.push(v);
            }
            return;
        }
        if !started {
            // This coordinate is the first nonzero one: value 1.
            combo[i] = 1;
            rec(i + 1, true, combo, out, basis, n, p);
            combo[i] = 0;
            // Or it stays zero.
            rec(i + 1, false, combo, out, basis, n, p);
        } else {
            for c in 0..p {
                combo[i] = c;
                rec(i + 1, true, combo, out, basis, n, p);
            }
            combo[i] = 0;
        }
    }
    rec(0, false, &mut combo, &mut out, basis, n, p);
    out
}

/// Outcome of the mod-p irreducibility test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModpOutcome {
    /// F_p^d is irreducible under the reductions: certifies Q-irreducibility.
    Irreducible { prime: u64, singular_nullity: usize },
    /// A proper invariant subspace mod p was seen (says nothing over Q).
    ReducibleModP,
    /// No singular algebra element was found within the attempt budget.
    Inconclusive,
}

/// Norton/meataxe irreducibility test for the module F_p^d over the algebra
/// generated by `gens`. Exhaustive over kernel lines, hence a proof when it
/// answers `Irreducible`.
pub fn modp_irreducible(gens: &[ModMat], p: u64, rng: &mut ChaCha8Rng) -> ModpOutcome {
    let n = match gens.first() {
        Some(g) => g.n,
        None => return ModpOutcome::Inconclusive,
    };
    // Enveloping algebra basis by word closure.
    let mut alg: Vec<ModMat> = vec![ModMat::identity(n, p)];
    let mut alg_ech = echelon(vec![alg[0].as_vec().to_vec()], p);
    let mut frontier = alg.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for w in &frontier {
            for g in gens {
                let prod = g.mul(w);
                let before = alg_ech.len();
                alg_ech = echelon(
                    alg_ech
                        .iter()
                        .cloned()
                        .chain(std::iter::once(prod.as_vec().to_vec()))
                        .collect(),
                    p,
                );
                if alg_ech.len() > before {
                    alg.push(prod.clone());
                    next.push(prod);
                }
            }
        }
        frontier = next;
    }
    let m = alg.len();
    let gens_t: Vec<ModMat> = gens.iter().map(ModMat::transpose).collect();

    for _attempt in 0..24 {
        // Random target vector; solve Σ cᵢ aᵢ v = 0 for (cᵢ).
        let v: Vec<u64> = (0..n).map(|_| rng.gen_range(0..p)).collect();
        if v.iter().all(|&x| x == 0) {
            continue;
        }
        // Build the n×m system whose columns are aᵢ·v.
        let cols: Vec<Vec<u64>> = alg.iter().map(|a| a.apply(&v)).collect();
        let system = {
            // as a ModMat-like structure: solve over F_p by echelon of
            // the transposed system with coefficient tracking.
            let mut rows: Vec<Vec<u64>> = Vec::with_capacity(m);
            for (i, col) in cols.iter().enumerate() {
                // row = [col ; e_i] so the echelon tracks combinations
                let mut r = col.clone();
                let mut tag = vec![0u64; m];
                tag[i] = 1;
                r.extend(tag);
                rows.push(r);
            }
            echelon(rows, p)
        };
        // Combination rows whose first n coordinates vanished give kernel combos.
        let mut singular: Option<ModMat> = None;
        for row in &system {
            if row[..n].iter().all(|&x| x == 0) {
                let combo = &row[n..];
                let mut a = ModMat::zero(n, p);
                for (c, basis_m) in combo.iter().zip(&alg) {
                    if *c != 0 {
                        for (x, y) in a.e.iter_mut().zip(basis_m.as_vec()) {
                            *x = (*x + c * y) % p;
                        }
                    }
                }
                if a.as_vec().iter().any(|&x| x != 0) {
                    singular = Some(a);
                    break;
                }
            }
        }
        let Some(a) = singular else { continue };
        let ker = kernel(&a);
        if ker.is_empty() {
            continue;
        }
        // Don't enumerate huge kernels.
        if ker.len() > 4 {
            continue;
        }
        let mut all_spin_full = true;
        for line in projective_lines(&ker, p) {
            if spin_vector(&line, gens, p).len() < n {
                return ModpOutcome::ReducibleModP;
            }
        }
        let at = a.transpose();
        let ker_t = kernel(&at);
        for line in projective_lines(&ker_t, p) {
            if spin_vector(&line, &gens_t, p).len() < n {
                all_spin_full = false;
                break;
            }
        }
        if all_spin_full {
            return ModpOutcome::Irreducible {
                prime: p,
                singular_nullity: ker.len(),
            };
        }
        // Transposed side saw a proper submodule of the dual: the module
        // itself is reducible mod p (it has a proper quotient).
        return ModpOutcome::ReducibleModP;
    }
    ModpOutcome::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn mm(rows: &[&[i64]], p: u64) -> ModMat {
        let big: Vec<Vec<num::BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| num::BigInt::from(v)).collect())
            .collect();
        ModMat::from_bigint_rows(&big, p)
    }

    #[test]
    fn sl2_is_irreducible_mod_5() {
        let s = mm(&[&[0, -1], &[1, 0]], 5);
        let t = mm(&[&[1, 1], &[0, 1]], 5);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let out = modp_irreducible(&[s, t], 5, &mut rng);
        assert!(matches!(out, ModpOutcome::Irreducible { .. }), "{out:?}");
    }

    #[test]
    fn shear_is_reducible_mod_5() {
        let t = mm(&[&[1, 1], &[0, 1]], 5);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let out = modp_irreducible(&[t], 5, &mut rng);
        assert!(matches!(
            out,
            ModpOutcome::ReducibleModP | ModpOutcome::Inconclusive
        ));
    }

    #[test]
    fn kernel_and_spin() {
        let a = mm(&[&[1, 2], &[2, 4]], 5);
        let k = kernel(&a);
        assert_eq!(k.len(), 1);
        let img = a.apply(&k[0]);
        assert!(img.iter().all(|&x| x == 0));
    }
}
