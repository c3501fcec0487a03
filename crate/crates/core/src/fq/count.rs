//! Counting totally isotropic subspaces: closed forms and exhaustive search.

use num_traits::Zero;

use super::linalg::{inv, is_square};
use super::{decompose, FqQuadSpace, Residual, WittDecomposition};
use crate::error::{Error, Result};
use crate::qanalog::{beta, delta, p_pow, sign, Rational};

/// Closed-form φ_ℓ of a regular class.
pub fn phi_regular(class: &WittDecomposition, ell: usize, p: u64) -> Rational {
    assert!(class.is_regular(), "phi_regular needs a regular class, got {class:?}");
    let l = ell as u32;
    let h = class.hyp_count as i64;
    match class.residual {
        Residual::Zero => beta(p, h, l) * delta(p, h - 1, l),
        Residual::AnisoPlane => beta(p, h, l) * delta(p, h + 1, l),
        Residual::Line => beta(p, h, l) * delta(p, h, l),
    }
}

/// φ_ℓ of any class: `Σ_a β(r,a) p^{(ℓ-a)(r-a)} φ_{ℓ-a}(regular part)`.
pub fn phi_of_class(class: &WittDecomposition, ell: usize, p: u64) -> Rational {
    let r = class.rad_dim;
    let reg = WittDecomposition { rad_dim: 0, ..*class };
    (0..=r.min(ell))
        .map(|a| {
            beta(p, r as i64, a as u32)
                * p_pow(p, ((ell - a) * (r - a)) as i64)
                * phi_regular(&reg, ell - a, p)
        })
        .sum()
}

pub fn phi_general(v: &FqQuadSpace, ell: usize) -> Rational {
    phi_of_class(&decompose(v), ell, v.p())
}

/// Lists every totally isotropic ℓ-subspace by its reduced echelon basis.
/// Refuses with `TooLarge` past `limit` candidate subspaces.
pub fn isotropic_subspaces(v: &FqQuadSpace, ell: usize, limit: u64) -> Result<Vec<Vec<Vec<u64>>>> {
    let (n, p) = (v.dim(), v.p());
    if ell > n {
        return Ok(Vec::new());
    }
    let total = crate::qanalog::beta(p, n as i64, ell as u32);
    if total > Rational::from_integer(limit.into()) {
        return Err(Error::TooLarge(format!("{total} subspaces of dimension {ell} in F_{p}^{n}")));
    }
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(ell);
    pivot_sets(n, ell, 0, &mut pivots, &mut |piv| {
        let mut rows = Vec::with_capacity(ell);
        fill_rows(v, piv, &mut rows, &mut out);
    });
    Ok(out)
}

fn pivot_sets(n: usize, ell: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if cur.len() == ell {
        f(cur);
        return;
    }
    for c in start..n {
        cur.push(c);
        pivot_sets(n, ell, c + 1, cur, f);
        cur.pop();
    }
}

fn fill_rows(v: &FqQuadSpace, piv: &[usize], rows: &mut Vec<Vec<u64>>, out: &mut Vec<Vec<Vec<u64>>>) {
    let (n, p) = (v.dim(), v.p());
    let i = rows.len();
    if i == piv.len() {
        out.push(rows.clone());
        return;
    }
    let free: Vec<usize> = (piv[i] + 1..n).filter(|c| !piv.contains(c)).collect();
    let mut row = vec![0u64; n];
    row[piv[i]] = 1;
    super::linalg::for_each_vector(free.len(), p, |vals| {
        for (&c, &x) in free.iter().zip(vals) {
            row[c] = x;
        }
        if v.q(&row) == 0 && rows.iter().all(|r| v.b(r, &row) == 0) {
            rows.push(row.clone());
            fill_rows(v, piv, rows, out);
            rows.pop();
        }
        true
    });
}

/// Work limit for [`phi_brute`], counted in candidate rows examined.
pub const BRUTE_BUDGET: u64 = 400_000_000;

/// Counts totally isotropic ℓ-subspaces by walking reduced echelon bases.
///
/// Rows are chosen from the bottom up; each new row must be isotropic and
/// orthogonal to the rows below it, and those orthogonality conditions are
/// solved linearly rather than filtered, which keeps the search small.
pub fn phi_brute(v: &FqQuadSpace, ell: usize) -> Result<u64> {
    phi_brute_budget(v, ell, BRUTE_BUDGET)
}

pub fn phi_brute_budget(v: &FqQuadSpace, ell: usize, budget: u64) -> Result<u64> {
    if ell == 0 {
        return Ok(1);
    }
    if ell > v.dim() {
        return Ok(0);
    }
    let n = v.dim();
    if n > MAXN {
        return Err(Error::TooLarge(format!("dimension {n} exceeds {MAXN}")));
    }
    let mut coeffs = [[0u64; MAXN]; MAXN];
    let mut bil = [[0u64; MAXN]; MAXN];
    let m = v.bilinear_matrix();
    for i in 0..n {
        for j in 0..n {
            coeffs[i][j] = v.coeff(i, j);
            bil[i][j] = m[i][j];
        }
    }
    let mut search = Search {
        n,
        p: v.p(),
        coeffs,
        bil,
        brows: Vec::new(),
        pivots: Vec::new(),
        work: 0,
        budget,
    };
    search.descend(ell, n)
}

const MAXN: usize = 16;

/// Number of x in F_p with `a x² + b x + c = 0`.
fn roots(a: u64, b: u64, c: u64, p: u64) -> u64 {
    if a == 0 {
        return if b != 0 { 1 } else if c == 0 { p } else { 0 };
    }
    if p == 2 {
        return (0..2).filter(|&x| (a * x + b * x + c).is_multiple_of(2)).count() as u64;
    }
    let disc = (b * b + 4 * (p - a) % p * c) % p;
    if disc == 0 {
        1
    } else if is_square(disc, p) {
        2
    } else {
        0
    }
}
type Vector = [u64; MAXN];

struct Search {
    n: usize,
    p: u64,
    coeffs: [[u64; MAXN]; MAXN],
    bil: [[u64; MAXN]; MAXN],
    // B-matrix times each placed row, so B(x, row) is a dot product
    brows: Vec<Vector>,
    pivots: Vec<usize>,
    work: u64,
    budget: u64,
}

impl Search {
    fn q(&self, x: &Vector) -> u64 {
        let mut acc = 0;
        for i in 0..self.n {
            if x[i] == 0 {
                continue;
            }
            let mut row = 0;
            for j in i..self.n {
                row += self.coeffs[i][j] * x[j];
            }
            acc += x[i] * (row % self.p);
        }
        acc % self.p
    }

    fn times_b(&self, x: &Vector) -> Vector {
        let mut out = [0; MAXN];
        for (j, o) in out.iter_mut().enumerate().take(self.n) {
            *o = (0..self.n).map(|i| self.bil[j][i] * x[i]).sum::<u64>() % self.p;
        }
        out
    }

    fn dot(&self, x: &Vector, y: &Vector) -> u64 {
        (0..self.n).map(|i| x[i] * y[i]).sum::<u64>() % self.p
    }

    /// `remaining` rows still to place, all with pivot column `< limit`.
    fn descend(&mut self, remaining: usize, limit: usize) -> Result<u64> {
        let (n, p) = (self.n, self.p);
        let mut total = 0;
        for c in (remaining - 1..limit).rev() {
            let mut free = [0usize; MAXN];
            let mut f = 0;
            for j in c + 1..n {
                if !self.pivots.contains(&j) {
                    free[f] = j;
                    f += 1;
                }
            }
            // orthogonality to placed rows: Σ_t z_t (Mr)_{free[t]} = -(Mr)_c
            let e = self.brows.len();
            let mut sys = [[0u64; MAXN + 1]; MAXN];
            for (r, w) in self.brows.iter().enumerate() {
                for t in 0..f {
                    sys[r][t] = w[free[t]];
                }
                sys[r][f] = (p - w[c]) % p;
            }
            let mut pcol = [0usize; MAXN];
            let mut rank = 0;
            let mut consistent = true;
            for col in 0..=f {
                let Some(pr) = (rank..e).find(|&r| sys[r][col] != 0) else {
                    continue;
                };
                if col == f {
                    consistent = false;
                    break;
                }
                sys.swap(rank, pr);
                let iv = inv(sys[rank][col], p);
                for x in sys[rank][..=f].iter_mut() {
                    *x = *x * iv % p;
                }
                for r in 0..e {
                    if r != rank && sys[r][col] != 0 {
                        let m = p - sys[r][col];
                        for t in 0..=f {
                            sys[r][t] = (sys[r][t] + m * sys[rank][t]) % p;
                        }
                    }
                }
                pcol[rank] = col;
                rank += 1;
            }
            if !consistent {
                continue;
            }
            let mut base: Vector = [0; MAXN];
            base[c] = 1;
            for r in 0..rank {
                base[free[pcol[r]]] = sys[r][f];
            }
            let mut ker = [[0u64; MAXN]; MAXN];
            let mut m = 0;
            for t in (0..f).filter(|t| !pcol[..rank].contains(t)) {
                ker[m][free[t]] = 1;
                for r in 0..rank {
                    ker[m][free[pcol[r]]] = (p - sys[r][t]) % p;
                }
                m += 1;
            }
            let states = (p as u128).pow(m as u32);
            self.work = self.work.saturating_add(states.min(u64::MAX as u128) as u64);
            if self.work > self.budget {
                return Err(Error::TooLarge(format!(
                    "isotropic subspace search exceeded {} candidate rows",
                    self.budget
                )));
            }
            let mut bker = [[0u64; MAXN]; MAXN];
            let mut qker = [0u64; MAXN];
            for i in 0..m {
                bker[i] = self.times_b(&ker[i]);
                qker[i] = self.q(&ker[i]);
            }
            let mut qrow = self.q(&base);
            // d[i] = B(row, ker[i]); g[i][j] = B(ker[i], ker[j])
            let mut d = [0u64; MAXN];
            let mut g = [[0u64; MAXN]; MAXN];
            for i in 0..m {
                d[i] = self.dot(&base, &bker[i]);
                for j in 0..m {
                    g[i][j] = self.dot(&ker[i], &bker[j]);
                }
            }
            // at the last level the final kernel direction is solved as a
            // one-variable quadratic instead of being walked
            let leaf = remaining == 1 && m > 0;
            let walk = if leaf { m - 1 } else { m };
            let mut row = base;
            let mut digits = [0u64; MAXN];
            loop {
                if leaf {
                    total += roots(qker[m - 1], d[m - 1], qrow, p);
                } else if qrow == 0 {
                    if remaining == 1 {
                        total += 1;
                    } else {
                        let br = self.times_b(&row);
                        self.brows.push(br);
                        self.pivots.push(c);
                        let sub_total = self.descend(remaining - 1, c);
                        self.brows.pop();
                        self.pivots.pop();
                        total += sub_total?;
                    }
                }
                // odometer step: every digit that changes moves row by +ker[i]
                let mut i = 0;
                while i < walk {
                    qrow = (qrow + d[i] + qker[i]) % p;
                    for j in 0..m {
                        d[j] = (d[j] + g[i][j]) % p;
                    }
                    if remaining > 1 {
                        for (x, k) in row.iter_mut().zip(&ker[i]).take(n) {
                            *x = (*x + k) % p;
                        }
                    }
                    digits[i] += 1;
                    if digits[i] < p {
                        break;
                    }
                    digits[i] = 0;
                    i += 1;
                }
                if i == walk {
                    break;
                }
            }
        }
        Ok(total)
    }
}

/// Number of ℓ-subspaces of F_p^n, for guarding exhaustive work elsewhere.
pub fn subspace_count(n: usize, ell: usize, p: u64) -> Rational {
    beta(p, n as i64, ell as u32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReductionVariant {
    /// φ_ℓ(U ⊥ H^t)
    A,
    /// φ_ℓ(U ⊥ H^t ⊥ A)
    B,
}

/// Right-hand side of the reduction formulas expressing φ_ℓ(U ⊥ H^t) and
/// φ_ℓ(U ⊥ H^t ⊥ A) through φ_r(U), r ≤ ℓ.
pub fn reduction_rhs(u: &WittDecomposition, t: i64, ell: usize, p: u64, variant: ReductionVariant) -> Result<Rational> {
    match variant {
        ReductionVariant::A => u.with_hyperbolic(t)?,
        ReductionVariant::B => u.with_aniso().with_hyperbolic(t)?,
    };
    let d = u.dim() as i64;
    let l = ell as i64;
    let mut total = Rational::zero();
    for r in 0..=ell {
        let ri = r as i64;
        let k = (ell - r) as u32;
        let phi = phi_of_class(u, r, p);
        if phi.is_zero() {
            continue;
        }
        total += match variant {
            ReductionVariant::A => {
                p_pow(p, ri * (t - l + ri)) * delta(p, d - 1 + t - ri, k) * beta(p, t, k) * phi
            }
            ReductionVariant::B => {
                sign(ri) * p_pow(p, ri * (t + 1 - l + ri)) * beta(p, d + t - ri, k) * delta(p, t + 1, k) * phi
            }
        };
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qanalog::rat;

    fn h(p: u64, n: usize) -> FqQuadSpace {
        FqQuadSpace::hyperbolic(p, n)
    }

    #[test]
    fn regular_examples() {
        let hyp1 = WittDecomposition::new(0, 1, Residual::Zero);
        for p in [2, 3, 5] {
            assert_eq!(phi_regular(&hyp1, 1, p), rat(2));
            assert_eq!(phi_regular(&hyp1, 0, p), rat(1));
        }
        let a = WittDecomposition::new(0, 0, Residual::AnisoPlane);
        assert_eq!(phi_regular(&a, 1, 2), rat(0));
        assert_eq!(phi_regular(&WittDecomposition::new(0, 2, Residual::Zero), 2, 3), rat(8));
    }

    #[test]
    fn brute_examples() {
        assert_eq!(phi_brute(&h(2, 1), 1).unwrap(), 2);
        assert_eq!(phi_brute(&h(3, 2), 2).unwrap(), 8);
        assert_eq!(phi_brute(&FqQuadSpace::anisotropic_plane(5), 0).unwrap(), 1);
        let ha = h(3, 1).orthogonal_sum(&FqQuadSpace::anisotropic_plane(3));
        assert_eq!(phi_brute(&ha, 1).unwrap(), 10);
        assert_eq!(phi_brute(&FqQuadSpace::zero(2, 2), 1).unwrap(), 3);
        let zh = FqQuadSpace::zero(2, 1).orthogonal_sum(&h(2, 1));
        assert_eq!(phi_brute(&zh, 1).unwrap(), 5);
        assert_eq!(phi_general(&zh, 1), rat(5));
    }

    #[test]
    fn brute_budget_trips() {
        assert!(matches!(phi_brute_budget(&h(3, 4), 2, 10), Err(Error::TooLarge(_))));
    }

    #[test]
    fn reduction_examples() {
        let hyp1 = WittDecomposition::new(0, 1, Residual::Zero);
        assert_eq!(reduction_rhs(&hyp1, 1, 1, 2, ReductionVariant::A).unwrap(), rat(9));
        let zero = WittDecomposition::new(0, 0, Residual::Zero);
        assert_eq!(reduction_rhs(&zero, 0, 1, 2, ReductionVariant::B).unwrap(), rat(0));
        for l in 0..3 {
            assert_eq!(reduction_rhs(&hyp1, 0, l, 3, ReductionVariant::A).unwrap(), phi_of_class(&hyp1, l, 3));
        }
        assert!(matches!(
            reduction_rhs(&zero, -1, 1, 2, ReductionVariant::A),
            Err(Error::UndefinedComposition(_))
        ));
    }

    #[test]
    fn beta_counts_subspaces() {
        // every subspace of a zero form is totally isotropic
        assert_eq!(rat(phi_brute(&FqQuadSpace::zero(2, 6), 3).unwrap() as i64), beta(2, 6, 3));
        assert_eq!(subspace_count(6, 3, 2), rat(1395));
    }

    #[test]
    fn listing_matches_count() {
        for p in [2u64, 3, 5] {
            for class in WittDecomposition::all(4, 1) {
                let v = FqQuadSpace::from_class(p, &class);
                for ell in 0..=3 {
                    let list = isotropic_subspaces(&v, ell, 1 << 20).unwrap();
                    assert_eq!(list.len() as u64, phi_brute(&v, ell).unwrap(), "{class:?} ℓ={ell} p={p}");
                    assert!(list.iter().all(|b| v.is_totally_isotropic(b)));
                }
            }
        }
        assert!(isotropic_subspaces(&h(2, 10), 5, 1000).is_err());
    }
}
