//! Lattices K with pL ⊆ K ⊆ (1/p)L, even integral, whose elementary divisors
//! relative to L are 1/p and p, each j times.
//!
//! Each K arises from a totally isotropic j-subspace C̄ of L/pL: K ∩ L is the
//! preimage of C̄^⊥, and K adds (1/p)e_a for lifts e_a = c_a + p·w_a of a
//! basis of C̄. Integrality fixes the symmetric part of the matrix of the
//! w_a against a dual basis and leaves the alternating part free, so every
//! C̄ yields p^{j(j−1)/2} lattices.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fq::linalg::{self, reduce};
use crate::fq::isotropic_subspaces;
use crate::lattice::intmat::{self, IMat};
use crate::lattice::{character_at, mod_p_space, IntegralLattice};

use super::max_neighbor_index;

/// Cap on the number of j-subspaces scanned.
pub const SUBSPACE_LIMIT: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NeighborLattice {
    /// Hermite basis of pK in coordinates of L.
    pub frame: IMat,
    pub j: usize,
    /// Gram matrix of K in the basis `frame / p`.
    pub gram: IMat,
    /// Reduced basis of the isotropic subspace the lattice was built from.
    pub seed: Vec<Vec<u64>>,
}

impl NeighborLattice {
    pub fn lattice(&self) -> Result<IntegralLattice> {
        IntegralLattice::new(self.gram.clone())
    }
}

pub fn enumerate_kj(l: &IntegralLattice, p: u64, j: usize) -> Result<Vec<NeighborLattice>> {
    let chi = character_at(l, p)?;
    let k = l.k();
    if j > max_neighbor_index(k, chi) {
        return Err(Error::IndexOutOfRange(format!("j = {j} for k = {k} and χ(p) = {chi}")));
    }
    let a = l.gram();
    let m = a.len();
    let pi = p as i64;
    if j == 0 {
        let frame: IMat = (0..m).map(|r| (0..m).map(|c| if r == c { pi } else { 0 }).collect()).collect();
        return Ok(vec![NeighborLattice { frame, j, gram: a.clone(), seed: Vec::new() }]);
    }
    let v = mod_p_space(l, p)?;
    let mut out: BTreeMap<IMat, NeighborLattice> = BTreeMap::new();
    for seed in isotropic_subspaces(&v, j, SUBSPACE_LIMIT)? {
        let c: Vec<Vec<i64>> = seed.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
        let dual = dual_vectors(a, &seed, p);
        let perp = v.orthogonal_complement(&seed);
        let mut base_gens: Vec<Vec<i64>> =
            perp.basis().iter().map(|b| b.iter().map(|&x| pi * x as i64).collect()).collect();
        for i in 0..m {
            let mut e = vec![0i64; m];
            e[i] = pi * pi;
            base_gens.push(e);
        }
        // forced entries of S: diagonal and S_ab + S_ba
        let mut s = vec![vec![0i64; j]; j];
        for x in 0..j {
            let qa = intmat::bilinear(a, &c[x], &c[x]) / 2;
            debug_assert_eq!(qa % pi, 0);
            s[x][x] = (-(qa / pi)).rem_euclid(pi);
        }
        let pairs: Vec<(usize, usize)> = (0..j).flat_map(|x| (x + 1..j).map(move |y| (x, y))).collect();
        linalg::for_each_vector(pairs.len(), p, |free| {
            for (&(x, y), &f) in pairs.iter().zip(free) {
                let bxy = intmat::bilinear(a, &c[x], &c[y]);
                s[x][y] = f as i64;
                s[y][x] = (-(bxy / pi) - f as i64).rem_euclid(pi);
            }
            let mut gens = base_gens.clone();
            for x in 0..j {
                let mut e = c[x].clone();
                for (y, d) in dual.iter().enumerate() {
                    for (ei, di) in e.iter_mut().zip(d) {
                        *ei += pi * s[x][y] * di;
                    }
                }
                gens.push(e);
            }
            let frame = intmat::hermite_of_columns(&gens, m).expect("contains p²L");
            if !out.contains_key(&frame) {
                let gram = scaled_gram(a, &frame, pi * pi).expect("construction yields an even integral lattice");
                out.insert(frame.clone(), NeighborLattice { frame, j, gram, seed: seed.clone() });
            }
            true
        });
    }
    let list: Vec<NeighborLattice> = out.into_values().collect();
    for kl in &list {
        let sm = intmat::smith(&kl.frame);
        let ones = sm.diag.iter().filter(|d| d.abs() == 1).count();
        let tops = sm.diag.iter().filter(|d| d.abs() == pi * pi).count();
        assert!(ones == j && tops == j, "neighbour with wrong elementary divisors");
    }
    Ok(list)
}

/// Integer vectors `d_b` with `B(c_a, d_b) ≡ δ_ab (mod p)`.
fn dual_vectors(a: &IMat, seed: &[Vec<u64>], p: u64) -> Vec<Vec<i64>> {
    let m = a.len();
    // columns of the j×m matrix with rows (A c_a) mod p
    let ac: Vec<Vec<u64>> = seed
        .iter()
        .map(|c| (0..m).map(|i| reduce((0..m).map(|t| a[i][t] * c[t] as i64).sum(), p)).collect())
        .collect();
    let cols: Vec<Vec<u64>> = (0..m).map(|i| ac.iter().map(|row| row[i]).collect()).collect();
    (0..seed.len())
        .map(|b| {
            let e = linalg::unit(seed.len(), b);
            let d = linalg::coordinates(&cols, &e, p).expect("the form is regular mod p");
            d.into_iter().map(|x| x as i64).collect()
        })
        .collect()
}

fn scaled_gram(a: &IMat, h: &IMat, d: i64) -> Option<IMat> {
    let g = intmat::congruent(a, h);
    let n = g.len();
    let mut out = intmat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if g[i][j] % d != 0 {
                return None;
            }
            out[i][j] = g[i][j] / d;
        }
        if out[i][i] % 2 != 0 {
            return None;
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::phi_general;
    use crate::lattice::named;
    use crate::qanalog::{p_pow, Rational};

    fn expected(l: &IntegralLattice, p: u64, j: usize) -> Rational {
        p_pow(p, (j * (j.saturating_sub(1)) / 2) as i64) * phi_general(&mod_p_space(l, p).unwrap(), j)
    }

    #[test]
    fn counts_match_isotropic_subspaces() {
        for (name, p, jmax) in [("diag22", 5u64, 1usize), ("D4", 3, 2), ("D4", 5, 2), ("A1A1A2", 5, 1)] {
            let l = named(name).unwrap();
            for j in 1..=jmax {
                let ks = enumerate_kj(&l, p, j).unwrap();
                assert_eq!(Rational::from_integer(ks.len().into()), expected(&l, p, j), "{name} p={p} j={j}");
                for kl in &ks {
                    let kl2 = kl.lattice().unwrap();
                    assert_eq!(kl2.det(), l.det());
                    assert_eq!(kl2.level(), l.level());
                }
            }
        }
    }

    #[test]
    fn range_guard() {
        let l = named("diag22").unwrap();
        assert!(matches!(enumerate_kj(&l, 5, 2), Err(Error::IndexOutOfRange(_))));
        // χ(3) = −1 for diag(2,2): only j < k = 1
        assert!(matches!(enumerate_kj(&l, 3, 1), Err(Error::IndexOutOfRange(_))));
        assert_eq!(enumerate_kj(&l, 3, 0).unwrap().len(), 1);
    }

    #[test]
    fn diag22_neighbours() {
        // two isotropic lines of x² + y² over F_5, one lattice each
        let ks = enumerate_kj(&named("diag22").unwrap(), 5, 1).unwrap();
        assert_eq!(ks.len(), 2);
    }
}
