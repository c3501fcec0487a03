//! Exact short-vector enumeration and representation counting.
//!
//! Enumeration is Fincke–Pohst over an exact LDLᵗ factorisation; integer
//! ranges come from integer square roots and each candidate is filtered
//! exactly, so nothing depends on floating point.

use std::collections::BTreeMap;

use num_integer::Roots;
use num_rational::Ratio;

use super::intmat::{bilinear, IMat};

type R = Ratio<i128>;

/// `Q(x) = Σ_i d_i (x_i + Σ_{j>i} l_ij x_j)²`, stored as (d, l).
struct Ldl {
    d: Vec<R>,
    l: Vec<Vec<R>>,
}

fn ldl(a: &IMat) -> Ldl {
    let n = a.len();
    let mut m: Vec<Vec<R>> = a.iter().map(|r| r.iter().map(|&x| R::from_integer(x as i128)).collect()).collect();
    let mut d = vec![R::from_integer(0); n];
    let mut l = vec![vec![R::from_integer(0); n]; n];
    for i in 0..n {
        d[i] = m[i][i];
        assert!(d[i] > R::from_integer(0), "Gram matrix is not positive definite");
        for j in i + 1..n {
            l[i][j] = m[i][j] / d[i];
        }
        for j in i + 1..n {
            for k in i + 1..n {
                m[j][k] = m[j][k] - l[i][j] * m[i][k];
            }
        }
    }
    Ldl { d, l }
}

fn floor(x: R) -> i128 {
    x.floor().to_integer()
}

/// Every nonzero `x` with `xᵗ A x ≤ bound`, each with its norm. Both `x` and
/// `-x` are listed.
pub fn short_vectors(a: &IMat, bound: i64) -> Vec<(Vec<i64>, i64)> {
    let n = a.len();
    let mut out = Vec::new();
    if n == 0 || bound <= 0 {
        return out;
    }
    let f = ldl(a);
    let mut x = vec![0i64; n];
    rec(a, &f, n, R::from_integer(bound as i128), &mut x, &mut out);
    out
}

fn rec(a: &IMat, f: &Ldl, level: usize, remaining: R, x: &mut Vec<i64>, out: &mut Vec<(Vec<i64>, i64)>) {
    // coordinate i only depends on x_{>i}, so fix x_{n-1} first
    let i = level - 1;
    let mut c = R::from_integer(0);
    for j in i + 1..x.len() {
        c += f.l[i][j] * R::from_integer(x[j] as i128);
    }
    let di = f.d[i];
    let lim = remaining / di;
    let s = floor(lim).max(0).sqrt();
    let lo = floor(-c) - s - 1;
    let hi = floor(-c) + s + 2;
    for v in lo..=hi {
        let t = R::from_integer(v) + c;
        let used = di * t * t;
        if used > remaining {
            continue;
        }
        x[i] = v as i64;
        if i == 0 {
            if x.iter().any(|&e| e != 0) {
                out.push((x.clone(), bilinear(a, x, x)));
            }
        } else {
            rec(a, f, level - 1, remaining - used, x, out);
        }
    }
    x[i] = 0;
}

/// Vectors of a lattice grouped by norm, up to a bound.
#[derive(Debug, Clone)]
pub struct Shells {
    gram: IMat,
    bound: i64,
    by_norm: BTreeMap<i64, Vec<Vec<i64>>>,
}

impl Shells {
    pub fn new(gram: &IMat, bound: i64) -> Self {
        let mut by_norm: BTreeMap<i64, Vec<Vec<i64>>> = BTreeMap::new();
        for (v, q) in short_vectors(gram, bound) {
            by_norm.entry(q).or_default().push(v);
        }
        for vs in by_norm.values_mut() {
            vs.sort();
        }
        Shells { gram: gram.clone(), bound, by_norm }
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn gram(&self) -> &IMat {
        &self.gram
    }

    /// Vectors of norm exactly `m` (the zero vector for m = 0).
    pub fn shell(&self, m: i64) -> Vec<Vec<i64>> {
        assert!(m <= self.bound, "shell {m} beyond enumerated bound {}", self.bound);
        if m == 0 {
            return vec![vec![0; self.gram.len()]];
        }
        self.by_norm.get(&m).cloned().unwrap_or_default()
    }

    pub fn shell_ref(&self, m: i64) -> Option<&[Vec<i64>]> {
        self.by_norm.get(&m).map(Vec::as_slice)
    }

    /// Number of integer matrices C with `ᵗC A C = t`, by choosing columns
    /// shell by shell and checking inner products against earlier columns.
    pub fn count_representations(&self, t: &IMat) -> u64 {
        let n = t.len();
        if (0..n).any(|i| t[i][i] > self.bound) {
            panic!("representation count needs shells up to {}", (0..n).map(|i| t[i][i]).max().unwrap_or(0));
        }
        let zero = vec![0i64; self.gram.len()];
        let zero_shell = [zero];
        let shells: Vec<&[Vec<i64>]> = (0..n)
            .map(|i| {
                if t[i][i] == 0 {
                    &zero_shell[..]
                } else {
                    self.shell_ref(t[i][i]).unwrap_or(&[])
                }
            })
            .collect();
        let mut chosen: Vec<&Vec<i64>> = Vec::with_capacity(n);
        self.count_rec(t, &shells, &mut chosen)
    }

    fn count_rec<'a>(&self, t: &IMat, shells: &[&'a [Vec<i64>]], chosen: &mut Vec<&'a Vec<i64>>) -> u64 {
        let i = chosen.len();
        if i == t.len() {
            return 1;
        }
        // precompute A·c for earlier columns
        let ac: Vec<Vec<i64>> = chosen
            .iter()
            .map(|c| self.gram.iter().map(|row| row.iter().zip(c.iter()).map(|(a, b)| a * b).sum()).collect())
            .collect();
        let mut total = 0;
        for v in shells[i] {
            let ok = ac
                .iter()
                .enumerate()
                .all(|(j, w)| v.iter().zip(w).map(|(a, b)| a * b).sum::<i64>() == t[j][i]);
            if ok {
                chosen.push(v);
                total += self.count_rec(t, shells, chosen);
                chosen.pop();
            }
        }
        total
    }
}

impl Shells {
    /// Calls `f` with the columns of every C satisfying `ᵗC A C = t`.
    pub fn for_each_representation(&self, t: &IMat, f: &mut dyn FnMut(&[&Vec<i64>])) {
        let n = t.len();
        assert!((0..n).all(|i| t[i][i] <= self.bound), "shells do not reach the target diagonal");
        let zero_shell = [vec![0i64; self.gram.len()]];
        let shells: Vec<&[Vec<i64>]> = (0..n)
            .map(|i| if t[i][i] == 0 { &zero_shell[..] } else { self.shell_ref(t[i][i]).unwrap_or(&[]) })
            .collect();
        let mut chosen = Vec::with_capacity(n);
        self.visit_rec(t, &shells, &mut chosen, f);
    }

    fn visit_rec<'a>(
        &self,
        t: &IMat,
        shells: &[&'a [Vec<i64>]],
        chosen: &mut Vec<&'a Vec<i64>>,
        f: &mut dyn FnMut(&[&Vec<i64>]),
    ) {
        let i = chosen.len();
        if i == t.len() {
            f(chosen);
            return;
        }
        for v in shells[i] {
            if chosen.iter().enumerate().all(|(j, c)| bilinear(&self.gram, c, v) == t[j][i]) {
                chosen.push(v);
                self.visit_rec(t, shells, chosen, f);
                chosen.pop();
            }
        }
    }
}

/// `r(A, T)` for a single target; builds the needed shells on the fly.
pub fn count_representations(a: &IMat, t: &IMat) -> u64 {
    let bound = (0..t.len()).map(|i| t[i][i]).max().unwrap_or(0);
    Shells::new(a, bound).count_representations(t)
}
