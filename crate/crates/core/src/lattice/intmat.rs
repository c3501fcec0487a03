//! Small dense integer matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::qanalog::Rational;

pub type IMat = Vec<Vec<i64>>;

pub fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn zeros(r: usize, c: usize) -> IMat {
    vec![vec![0; c]; r]
}

pub fn transpose(m: &IMat) -> IMat {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

pub fn mul(a: &IMat, b: &IMat) -> IMat {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let s: i128 = (0..inner).map(|k| row[k] as i128 * b[k][j] as i128).sum();
                    i64::try_from(s).expect("integer matrix product overflow")
                })
                .collect()
        })
        .collect()
}

/// `ᵗG T G`
pub fn congruent(t: &IMat, g: &IMat) -> IMat {
    mul(&transpose(g), &mul(t, g))
}

pub fn column(m: &IMat, j: usize) -> Vec<i64> {
    m.iter().map(|r| r[j]).collect()
}

pub fn columns(m: &IMat) -> Vec<Vec<i64>> {
    (0..m.first().map_or(0, |r| r.len())).map(|j| column(m, j)).collect()
}

pub fn from_columns(cols: &[Vec<i64>], rows: usize) -> IMat {
    (0..rows).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

pub fn trace(m: &IMat) -> i64 {
    (0..m.len()).map(|i| m[i][i]).sum()
}

pub fn is_symmetric(m: &IMat) -> bool {
    let n = m.len();
    m.iter().all(|r| r.len() == n) && (0..n).all(|i| (0..i).all(|j| m[i][j] == m[j][i]))
}

pub fn is_even_symmetric(m: &IMat) -> bool {
    is_symmetric(m) && (0..m.len()).all(|i| m[i][i] % 2 == 0)
}

/// `xᵗ A y`
pub fn bilinear(a: &IMat, x: &[i64], y: &[i64]) -> i64 {
    let mut s: i128 = 0;
    for i in 0..x.len() {
        if x[i] == 0 {
            continue;
        }
        for j in 0..y.len() {
            s += x[i] as i128 * a[i][j] as i128 * y[j] as i128;
        }
    }
    i64::try_from(s).expect("bilinear form overflow")
}

/// Exact determinant via fraction-free elimination.
pub fn det(m: &IMat) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(s) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    a[n - 1][n - 1].clone() * sign
}

pub fn det_i64(m: &IMat) -> i64 {
    i64::try_from(det(m)).expect("determinant overflow")
}

pub fn is_positive_definite(m: &IMat) -> bool {
    is_symmetric(m)
        && (1..=m.len()).all(|k| {
            let minor: IMat = m[..k].iter().map(|r| r[..k].to_vec()).collect();
            det(&minor).is_positive()
        })
}

/// Inverse over Q, or `None` for a singular matrix.
pub fn inverse_rational(m: &IMat) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<Rational> = r.iter().map(|&x| Rational::from_integer(x.into())).collect();
            row.extend((0..n).map(|j| Rational::from_integer(i64::from(i == j).into())));
            row
        })
        .collect();
    for c in 0..n {
        let pr = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, pr);
        let piv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x = &*x / &piv;
        }
        let prow = a[c].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != c && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x = &*x - &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Smith form `P·M·Q = D` of a square matrix, returning `(P⁻¹, D, Q)` so that
/// `M = P⁻¹ D Q⁻¹`; columns of `P⁻¹` form a basis adapted to the image.
pub struct Smith {
    pub left_inv: IMat,
    pub diag: Vec<i64>,
    pub right: IMat,
}

pub fn smith(m: &IMat) -> Smith {
    let n = m.len();
    let mut a = m.clone();
    let mut pinv = identity(n);
    let mut q = identity(n);
    for k in 0..n {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in k..n {
                for j in k..n {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                break;
            };
            row_swap(&mut a, &mut pinv, k, bi);
            col_swap(&mut a, &mut q, k, bj);
            let mut clean = true;
            for i in k + 1..n {
                let f = a[i][k] / a[k][k];
                if f != 0 {
                    row_add(&mut a, &mut pinv, i, k, -f);
                }
                clean &= a[i][k] == 0;
            }
            for j in k + 1..n {
                let f = a[k][j] / a[k][k];
                if f != 0 {
                    col_add(&mut a, &mut q, j, k, -f);
                }
                clean &= a[k][j] == 0;
            }
            if !clean {
                continue;
            }
            // divisibility: fold a non-multiple into row k and retry
            let d = a[k][k];
            if let Some((i, _)) = (k + 1..n)
                .flat_map(|i| (k + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| a[i][j] % d != 0)
            {
                row_add(&mut a, &mut pinv, k, i, 1);
                continue;
            }
            break;
        }
        if a[k][k] < 0 {
            for x in a[k].iter_mut() {
                *x = -*x;
            }
            for r in pinv.iter_mut() {
                r[k] = -r[k];
            }
        }
    }
    Smith { left_inv: pinv, diag: (0..n).map(|i| a[i][i]).collect(), right: q }
}

// Row operations on `a` are mirrored on `pinv` as inverse column operations.
fn row_swap(a: &mut IMat, pinv: &mut IMat, i: usize, j: usize) {
    a.swap(i, j);
    for r in pinv.iter_mut() {
        r.swap(i, j);
    }
}

fn row_add(a: &mut IMat, pinv: &mut IMat, i: usize, j: usize, f: i64) {
    // row_i += f row_j   ⇒   col_j(P⁻¹) -= f col_i(P⁻¹)
    let rj = a[j].clone();
    for (x, y) in a[i].iter_mut().zip(&rj) {
        *x += f * y;
    }
    for r in pinv.iter_mut() {
        r[j] -= f * r[i];
    }
}

fn col_swap(a: &mut IMat, q: &mut IMat, i: usize, j: usize) {
    for r in a.iter_mut() {
        r.swap(i, j);
    }
    for r in q.iter_mut() {
        r.swap(i, j);
    }
}

fn col_add(a: &mut IMat, q: &mut IMat, i: usize, j: usize, f: i64) {
    for r in a.iter_mut() {
        r[i] += f * r[j];
    }
    for r in q.iter_mut() {
        r[i] += f * r[j];
    }
}

/// Unimodular `U` with `M·U = [B | 0]`, the zero block spanning ker M.
/// Returns `(U, rank)`.
pub fn column_kernel_split(m: &IMat) -> (IMat, usize) {
    let rows = m.len();
    let n = m.first().map_or(0, |r| r.len());
    let mut a = m.clone();
    let mut u = identity(n);
    let mut rank = 0;
    for i in 0..rows {
        if rank == n {
            break;
        }
        // gcd-reduce row i across columns rank..n into column `rank`
        loop {
            let nz: Vec<usize> = (rank..n).filter(|&j| a[i][j] != 0).collect();
            if nz.len() <= 1 {
                if let Some(&j) = nz.first() {
                    col_swap(&mut a, &mut u, rank, j);
                    rank += 1;
                }
                break;
            }
            let piv = *nz.iter().min_by_key(|&&j| a[i][j].abs()).expect("nonempty");
            for &j in &nz {
                if j != piv {
                    let f = a[i][j] / a[i][piv];
                    col_add(&mut a, &mut u, j, piv, -f);
                }
            }
        }
    }
    (u, rank)
}

/// Upper triangular column Hermite basis (`0 ≤ h_ij < h_ii`) of the
/// full-rank lattice spanned by `gens` in Zⁿ.
pub fn hermite_of_columns(gens: &[Vec<i64>], n: usize) -> Result<IMat> {
    let mut cols: Vec<Vec<i64>> = gens.iter().filter(|g| g.iter().any(|&x| x != 0)).cloned().collect();
    let mut h = zeros(n, n);
    for i in (0..n).rev() {
        // combine every column with a nonzero entry in row i into one pivot
        loop {
            let nz: Vec<usize> = (0..cols.len()).filter(|&c| cols[c][i] != 0).collect();
            if nz.len() <= 1 {
                let Some(&c) = nz.first() else {
                    return Err(Error::InvalidMatrix("generators do not span a full-rank lattice".into()));
                };
                let mut piv = cols.swap_remove(c);
                if piv[i] < 0 {
                    piv.iter_mut().for_each(|x| *x = -*x);
                }
                for (r, row) in h.iter_mut().enumerate() {
                    row[i] = piv[r];
                }
                break;
            }
            let piv = *nz.iter().min_by_key(|&&c| cols[c][i].abs()).expect("nonempty");
            for &c in &nz {
                if c != piv {
                    let f = cols[c][i].div_euclid(cols[piv][i]);
                    let pv = cols[piv].clone();
                    for (x, y) in cols[c].iter_mut().zip(&pv) {
                        *x -= f * y;
                    }
                }
            }
            cols.retain(|g| g.iter().any(|&x| x != 0));
        }
    }
    for j in 0..n {
        for i in (0..j).rev() {
            let f = h[i][j].div_euclid(h[i][i]);
            if f != 0 {
                for r in 0..=i {
                    h[r][j] -= f * h[r][i];
                }
            }
        }
    }
    Ok(h)
}

/// Column Hermite bases `H` (upper triangular, `0 ≤ h_ij < h_ii`) of every
/// lattice `M` with `bound·Zⁿ ⊆ M ⊆ Zⁿ`, where diagonal entries range over
/// `diag_choices` (each dividing `bound`).
pub fn hermite_between(n: usize, diag_choices: &[i64], bound: i64) -> Vec<IMat> {
    let mut out = Vec::new();
    let mut h = zeros(n, n);
    fill_hermite(&mut h, 0, diag_choices, bound, &mut out);
    out
}

fn fill_hermite(h: &mut IMat, col: usize, diag: &[i64], bound: i64, out: &mut Vec<IMat>) {
    let n = h.len();
    if col == n {
        if contains_scaled_identity(h, bound) {
            out.push(h.clone());
        }
        return;
    }
    for &d in diag {
        h[col][col] = d;
        fill_offdiag(h, col, 0, diag, bound, out);
    }
    h[col][col] = 0;
}

fn fill_offdiag(h: &mut IMat, col: usize, row: usize, diag: &[i64], bound: i64, out: &mut Vec<IMat>) {
    if row == col {
        fill_hermite(h, col + 1, diag, bound, out);
        return;
    }
    for v in 0..h[row][row] {
        h[row][col] = v;
        fill_offdiag(h, col, row + 1, diag, bound, out);
    }
    h[row][col] = 0;
}

/// Whether `bound·e_j ∈ H·Zⁿ` for all j, by back substitution.
pub fn contains_scaled_identity(h: &IMat, bound: i64) -> bool {
    let n = h.len();
    (0..n).all(|j| {
        let mut target: Vec<i64> = (0..n).map(|i| if i == j { bound } else { 0 }).collect();
        for i in (0..n).rev() {
            if target[i] % h[i][i] != 0 {
                return false;
            }
            let c = target[i] / h[i][i];
            for (r, t) in target.iter_mut().enumerate().take(i + 1) {
                *t -= c * h[r][i];
            }
        }
        true
    })
}

pub fn gcd_all(xs: impl IntoIterator<Item = i64>) -> i64 {
    xs.into_iter().fold(0, |g, x| g.gcd(&x))
}

pub fn parse_matrix(text: &str) -> Result<IMat> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let n: usize = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad dimension line: {e}")))?;
    if n == 0 || n > 64 {
        return Err(Error::Parse(format!("unsupported dimension {n}")));
    }
    let mut m = Vec::with_capacity(n);
    for i in 0..n {
        let line = lines.next().ok_or_else(|| Error::Parse(format!("missing row {}", i + 1)))?;
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|e| Error::Parse(format!("row {}: `{t}`: {e}", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != n {
            return Err(Error::Parse(format!("row {} has {} entries, expected {n}", i + 1, row.len())));
        }
        if row.iter().any(|x| x.unsigned_abs() > 1 << 40) {
            return Err(Error::Parse(format!("row {}: entry too large", i + 1)));
        }
        m.push(row);
    }
    if let Some(extra) = lines.next() {
        return Err(Error::Parse(format!("trailing content `{extra}`")));
    }
    Ok(m)
}

pub fn format_matrix(m: &IMat) -> String {
    let mut s = format!("{}\n", m.len());
    for r in m {
        s.push_str(&r.iter().map(i64::to_string).collect::<Vec<_>>().join(" "));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant() {
        assert_eq!(det(&vec![vec![2, 1], vec![1, 2]]), BigInt::from(3));
        assert_eq!(det(&vec![vec![0, 1], vec![1, 0]]), BigInt::from(-1));
        assert_eq!(det(&vec![vec![1, 2], vec![2, 4]]), BigInt::zero());
    }

    #[test]
    fn smith_reconstructs() {
        let m = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = smith(&m);
        assert_eq!(s.diag, vec![2, 6, 12]);
        let d: IMat = (0..3).map(|i| (0..3).map(|j| if i == j { s.diag[i] } else { 0 }).collect()).collect();
        // M Q = P⁻¹ D
        assert_eq!(mul(&m, &s.right), mul(&s.left_inv, &d));
        assert_eq!(det(&s.left_inv).abs(), BigInt::from(1));
    }

    #[test]
    fn kernel_split() {
        let t = vec![vec![2, 2], vec![2, 2]];
        let (u, r) = column_kernel_split(&t);
        assert_eq!(r, 1);
        let tu = mul(&t, &u);
        assert!(tu.iter().all(|row| row[1] == 0));
        assert_eq!(det(&u).abs(), BigInt::from(1));
    }

    #[test]
    fn subgroups_of_z4_squared() {
        assert_eq!(hermite_between(2, &[1, 2, 4], 4).len(), 15);
        assert_eq!(hermite_between(1, &[1, 3, 9], 9).len(), 3);
        // p² + 3p + 5 subgroups of (Z/p²)² in general
        assert_eq!(hermite_between(2, &[1, 3, 9], 9).len(), 9 + 9 + 5);
    }

    #[test]
    fn matrix_text_round_trip() {
        let m = vec![vec![2, 1], vec![1, 2]];
        assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
        assert!(parse_matrix("2\n1 2\n").is_err());
        assert!(parse_matrix("1\n2 3\n").is_err());
        assert!(parse_matrix("x").is_err());
    }

    #[test]
    fn hermite_of_generators_matches_enumeration() {
        for h in hermite_between(2, &[1, 3, 9], 9) {
            let mut gens = columns(&h);
            gens.push(vec![9, 0]);
            gens.push(vec![0, 9]);
            gens.push(vec![2 * h[0][0] + 5 * h[0][1], 5 * h[1][1]]);
            assert_eq!(hermite_of_columns(&gens, 2).unwrap(), h);
        }
        assert!(hermite_of_columns(&[vec![1, 0]], 2).is_err());
    }
}
