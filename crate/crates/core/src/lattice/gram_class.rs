//! Canonical representatives of GL_n(Z)-classes of even positive
//! semidefinite forms.
//!
//! The kernel is split off first, so a class is `blockdiag(T0, 0)` with `T0`
//! positive definite. For `T0` we search every basis whose norms are
//! successively minimal (each vector is a shortest one extending the previous
//! ones to a primitive system) and keep the one whose diagonal, then
//! off-diagonal entries in column order, are lexicographically least.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::enumerate::{count_representations, short_vectors};
use super::intmat::{self, IMat};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GramClass {
    n: usize,
    rank: usize,
    rep: IMat,
}

impl GramClass {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rep(&self) -> &IMat {
        &self.rep
    }

    pub fn trace(&self) -> i64 {
        intmat::trace(&self.rep)
    }

    pub fn zero(n: usize) -> Self {
        GramClass { n, rank: 0, rep: intmat::zeros(n, n) }
    }

    /// The positive definite block.
    pub fn definite_part(&self) -> IMat {
        self.rep[..self.rank].iter().map(|r| r[..self.rank].to_vec()).collect()
    }

    /// Order of the automorphism group of the definite part (1 for zero).
    pub fn aut_order(&self) -> u64 {
        if self.rank == 0 {
            1
        } else {
            aut_order(&self.definite_part())
        }
    }
}

impl Ord for GramClass {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then(self.trace().cmp(&other.trace()))
            .then_with(|| self.rep.cmp(&other.rep))
    }
}

impl PartialOrd for GramClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn validate_form(t: &IMat) -> Result<()> {
    if t.is_empty() || !intmat::is_even_symmetric(t) {
        return Err(Error::InvalidMatrix("form must be square, symmetric, even".into()));
    }
    Ok(())
}

/// Canonical class of an even positive semidefinite form.
pub fn canonicalize(t: &IMat) -> Result<GramClass> {
    validate_form(t)?;
    let n = t.len();
    let (u, rank) = intmat::column_kernel_split(t);
    let u1: IMat = u.iter().map(|r| r[..rank].to_vec()).collect();
    let t0 = intmat::congruent(t, &u1);
    if rank > 0 && !intmat::is_positive_definite(&t0) {
        return Err(Error::InvalidMatrix("form is not positive semidefinite".into()));
    }
    let canon = if rank == 0 { Vec::new() } else { canonical_definite(&t0) };
    let mut rep = intmat::zeros(n, n);
    for i in 0..rank {
        rep[i][..rank].copy_from_slice(&canon[i]);
    }
    Ok(GramClass { n, rank, rep })
}

/// A pairwise-reduced basis, used only to get an initial norm bound.
fn pair_reduce(t: &IMat) -> IMat {
    let n = t.len();
    let mut g = intmat::identity(n);
    let mut cur = t.clone();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                // b_j -= k b_i with k = round(B(b_i,b_j)/Q(b_i))
                let (bij, qi) = (cur[i][j], cur[i][i]);
                let k = (2 * bij + qi).div_euclid(2 * qi);
                if k != 0 && (cur[j][j] - 2 * k * bij + k * k * qi) < cur[j][j] {
                    for r in g.iter_mut() {
                        r[j] -= k * r[i];
                    }
                    cur = intmat::congruent(t, &g);
                    changed = true;
                }
            }
        }
        if !changed {
            return cur;
        }
    }
}

fn upper_key(t: &IMat) -> Key {
    let r = t.len();
    let diag = (0..r).map(|i| t[i][i]).collect();
    let off = (1..r).flat_map(|j| (0..j).map(move |i| (i, j))).map(|(i, j)| t[i][j]).collect();
    (diag, off)
}

/// Whether the columns extend to a basis of Z^r: gcd of maximal minors is 1.
fn primitive(cols: &[&Vec<i64>], r: usize) -> bool {
    let k = cols.len();
    let mut g = BigInt::zero();
    let mut rows: Vec<usize> = (0..k).collect();
    loop {
        let sub: IMat = rows.iter().map(|&i| cols.iter().map(|c| c[i]).collect()).collect();
        g = num_integer::Integer::gcd(&g, &intmat::det(&sub));
        if g.is_one() {
            return true;
        }
        // next k-subset of 0..r
        let mut i = k;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if rows[i] < r - k + i {
                rows[i] += 1;
                for j in i + 1..k {
                    rows[j] = rows[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// (diagonal, upper off-diagonal) of a candidate Gram matrix.
type Key = (Vec<i64>, Vec<i64>);

struct Search<'a> {
    t: &'a IMat,
    vecs: Vec<(Vec<i64>, i64)>,
    prefix: Vec<usize>,
    best: Option<(Key, Vec<usize>)>,
    exhausted: bool,
}

impl Search<'_> {
    fn rec(&mut self) {
        let r = self.t.len();
        let i = self.prefix.len();
        if i == r {
            let basis = intmat::from_columns(&self.prefix.iter().map(|&k| self.vecs[k].0.clone()).collect::<Vec<_>>(), r);
            let key = upper_key(&intmat::congruent(self.t, &basis));
            if self.best.as_ref().is_none_or(|(b, _)| key < *b) {
                self.best = Some((key, self.prefix.clone()));
            }
            return;
        }
        let mut min_norm = None;
        let mut cands = Vec::new();
        for (k, (v, q)) in self.vecs.iter().enumerate() {
            if min_norm.is_some_and(|m| *q > m) {
                break;
            }
            let mut cols: Vec<&Vec<i64>> = self.prefix.iter().map(|&j| &self.vecs[j].0).collect();
            cols.push(v);
            if primitive(&cols, r) {
                min_norm = Some(*q);
                cands.push(k);
            }
        }
        let Some(m) = min_norm else {
            self.exhausted = true;
            return;
        };
        if let Some(((bd, _), _)) = &self.best {
            let mut partial: Vec<i64> = self.prefix.iter().map(|&j| self.vecs[j].1).collect();
            partial.push(m);
            if partial.as_slice() > &bd[..=i] {
                return;
            }
        }
        for k in cands {
            self.prefix.push(k);
            self.rec();
            self.prefix.pop();
            if self.exhausted {
                return;
            }
        }
    }
}

fn canonical_definite(t0: &IMat) -> IMat {
    let r = t0.len();
    let reduced = pair_reduce(t0);
    let mut bound = (0..r).map(|i| reduced[i][i]).max().unwrap_or(0);
    loop {
        let mut vecs = short_vectors(t0, bound);
        vecs.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        let mut s = Search { t: t0, vecs, prefix: Vec::new(), best: None, exhausted: false };
        s.rec();
        if !s.exhausted {
            let (_, idx) = s.best.expect("a basis always exists");
            let cols: Vec<Vec<i64>> = idx.iter().map(|&k| s.vecs[k].0.clone()).collect();
            return intmat::congruent(t0, &intmat::from_columns(&cols, r));
        }
        bound *= 2;
    }
}

/// Order of `{G ∈ GL_r(Z) : ᵗG T G = T}` for positive definite `T`.
pub fn aut_order(t: &IMat) -> u64 {
    count_representations(t, t)
}

/// Necessary conditions met by every canonical representative: each basis
/// vector is no longer than its translates by ±1 combinations of earlier ones.
fn greedy_reduced(t: &IMat) -> bool {
    let r = t.len();
    for k in 1..r {
        let mut s = vec![-1i64; k];
        loop {
            let mut x = vec![0i64; r];
            x[..k].copy_from_slice(&s);
            x[k] = 1;
            if intmat::bilinear(t, &x, &x) < t[k][k] {
                return false;
            }
            let mut i = 0;
            while i < k && s[i] == 1 {
                s[i] = -1;
                i += 1;
            }
            if i == k {
                break;
            }
            s[i] += 1;
        }
    }
    true
}

/// Every class of even positive semidefinite n×n forms with trace ≤ bound,
/// in canonical order.
pub fn enumerate_classes(n: usize, bound: i64) -> Vec<GramClass> {
    let mut out = std::collections::BTreeSet::new();
    out.insert(GramClass::zero(n));
    for r in 1..=n {
        let mut t = intmat::zeros(r, r);
        fill_diag(&mut t, 0, 2, bound, &mut |t0: &IMat| {
            if greedy_reduced(t0) && intmat::is_positive_definite(t0) {
                let mut full = intmat::zeros(n, n);
                for i in 0..r {
                    full[i][..r].copy_from_slice(&t0[i]);
                }
                let c = canonicalize(&full).expect("reduced forms are valid");
                if c.trace() <= bound {
                    out.insert(c);
                }
            }
        });
    }
    out.into_iter().collect()
}

fn fill_diag(t: &mut IMat, i: usize, min: i64, budget: i64, f: &mut dyn FnMut(&IMat)) {
    let r = t.len();
    if i == r {
        fill_off(t, 1, 0, f);
        return;
    }
    let mut a = min;
    while a * (r - i) as i64 <= budget {
        t[i][i] = a;
        fill_diag(t, i + 1, a, budget - a, f);
        a += 2;
    }
}

fn fill_off(t: &mut IMat, j: usize, i: usize, f: &mut dyn FnMut(&IMat)) {
    let r = t.len();
    if j >= r {
        f(t);
        return;
    }
    if i == j {
        fill_off(t, j + 1, 0, f);
        return;
    }
    let lim = t[i][i] / 2;
    for v in -lim..=lim {
        t[i][j] = v;
        t[j][i] = v;
        fill_off(t, j, i + 1, f);
    }
    t[i][j] = 0;
    t[j][i] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_flip_same_class() {
        let a = canonicalize(&vec![vec![2, 1], vec![1, 2]]).unwrap();
        let b = canonicalize(&vec![vec![2, -1], vec![-1, 2]]).unwrap();
        assert_eq!(a, b);
        assert_eq!(canonicalize(&a.rep().clone()).unwrap(), a);
    }

    #[test]
    fn zero_and_distinct() {
        let z = canonicalize(&intmat::zeros(2, 2)).unwrap();
        assert_eq!(z.rank(), 0);
        assert_eq!(z, GramClass::zero(2));
        let a = canonicalize(&vec![vec![4, 2], vec![2, 4]]).unwrap();
        let b = canonicalize(&vec![vec![4, 0], vec![0, 12]]).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn singular_split() {
        let c = canonicalize(&vec![vec![2, 2], vec![2, 2]]).unwrap();
        assert_eq!(c.rank(), 1);
        assert_eq!(c.rep(), &vec![vec![2, 0], vec![0, 0]]);
        assert!(canonicalize(&vec![vec![2, 3], vec![3, 2]]).is_err());
    }

    #[test]
    fn automorphisms() {
        assert_eq!(aut_order(&vec![vec![2]]), 2);
        assert_eq!(aut_order(&vec![vec![2, 1], vec![1, 2]]), 12);
        assert_eq!(aut_order(&vec![vec![2, 0], vec![0, 4]]), 4);
    }

    #[test]
    fn inventory_degree_one() {
        let c = enumerate_classes(1, 8);
        let traces: Vec<i64> = c.iter().map(GramClass::trace).collect();
        assert_eq!(traces, vec![0, 2, 4, 6, 8]);
    }

    #[test]
    fn inventory_degree_two_small() {
        // 0, (2), (4), [2 0;0 0]-type singular only via rank: rank1 (2),(4);
        // rank 2 with trace 4: [[2,1],[1,2]] and [[2,0],[0,2]]
        let c = enumerate_classes(2, 4);
        assert_eq!(c.len(), 1 + 2 + 2);
    }
}
