//! Dense linear algebra over F_p with vectors stored as `Vec<u64>` in `[0, p)`.

pub fn add(a: u64, b: u64, p: u64) -> u64 {
    (a + b) % p
}

pub fn sub(a: u64, b: u64, p: u64) -> u64 {
    (a + p - b % p) % p
}

pub fn mul(a: u64, b: u64, p: u64) -> u64 {
    (a * b) % p
}

pub fn pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, a, p);
        }
        a = mul(a, a, p);
        e >>= 1;
    }
    acc
}

/// Inverse of a nonzero element; p is prime.
pub fn inv(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow(a, p - 2, p)
}

pub fn reduce(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

/// Euler's criterion; 0 counts as a square.
pub fn is_square(a: u64, p: u64) -> bool {
    let a = a % p;
    p == 2 || a == 0 || pow(a, (p - 1) / 2, p) == 1
}

pub fn first_nonsquare(p: u64) -> u64 {
    (1..p).find(|&a| !is_square(a, p)).unwrap_or(1)
}

pub fn axpy(y: &mut [u64], a: u64, x: &[u64], p: u64) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = (*yi + a * xi) % p;
    }
}

pub fn scale(x: &mut [u64], a: u64, p: u64) {
    for xi in x.iter_mut() {
        *xi = (*xi * a) % p;
    }
}

pub fn unit(n: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Reduced row echelon form in place; zero rows are dropped. Returns pivot columns.
pub fn rref(rows: &mut Vec<Vec<u64>>, p: u64) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let iv = inv(rows[r][c], p);
        scale(&mut rows[r], iv, p);
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = p - row[c];
                axpy(row, f, &pivot_row, p);
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank(rows: &[Vec<u64>], p: u64) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, p).len()
}

/// Basis of `{x : rows · x = 0}` for vectors of length `ncols`.
pub fn kernel(rows: &[Vec<u64>], ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, p);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = unit(ncols, free);
        for (row, &pc) in m.iter().zip(&pivots) {
            v[pc] = sub(0, row[free], p);
        }
        basis.push(v);
    }
    basis
}

/// Standard basis vectors completing `basis` to a basis of F_p^n.
pub fn complete_basis(basis: &[Vec<u64>], n: usize, p: u64) -> Vec<Vec<u64>> {
    let mut acc = basis.to_vec();
    let mut extra = Vec::new();
    for i in 0..n {
        let e = unit(n, i);
        acc.push(e.clone());
        if rank(&acc, p) == acc.len() {
            extra.push(e);
        } else {
            acc.pop();
        }
    }
    extra
}

/// Solves `Σ c_i basis_i = v`; `None` when `v` is outside the span.
pub fn coordinates(basis: &[Vec<u64>], v: &[u64], p: u64) -> Option<Vec<u64>> {
    let k = basis.len();
    let n = v.len();
    // columns are basis vectors, augmented by v
    let mut rows: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut row: Vec<u64> = basis.iter().map(|b| b[i]).collect();
            row.push(v[i] % p);
            row
        })
        .collect();
    let pivots = rref(&mut rows, p);
    if pivots.contains(&k) {
        return None;
    }
    let mut c = vec![0; k];
    for (row, &pc) in rows.iter().zip(&pivots) {
        c[pc] = row[k];
    }
    Some(c)
}

pub fn combine(basis: &[Vec<u64>], coeffs: &[u64], n: usize, p: u64) -> Vec<u64> {
    let mut v = vec![0; n];
    for (b, &c) in basis.iter().zip(coeffs) {
        axpy(&mut v, c, b, p);
    }
    v
}

/// Calls `f` on every vector of F_p^n (n small), in little-endian counting order.
pub fn for_each_vector(n: usize, p: u64, mut f: impl FnMut(&[u64]) -> bool) {
    let mut v = vec![0u64; n];
    loop {
        if !f(&v) {
            return;
        }
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            v[i] += 1;
            if v[i] == p {
                v[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_dimension() {
        let rows = vec![vec![1, 2, 0, 1], vec![2, 4, 0, 2]];
        let k = kernel(&rows, 4, 5);
        assert_eq!(k.len(), 3);
        for v in &k {
            let dot: u64 = rows[0].iter().zip(v).map(|(a, b)| a * b).sum::<u64>() % 5;
            assert_eq!(dot, 0);
        }
    }

    #[test]
    fn coordinates_round_trip() {
        let basis = vec![vec![1, 1, 0], vec![0, 1, 1]];
        let v = combine(&basis, &[2, 1], 3, 3);
        assert_eq!(coordinates(&basis, &v, 3), Some(vec![2, 1]));
        assert_eq!(coordinates(&basis, &[1, 0, 0], 3), None);
    }

    #[test]
    fn squares_mod_7() {
        let sq: Vec<u64> = (1..7).filter(|&a| is_square(a, 7)).collect();
        assert_eq!(sq, vec![1, 2, 4]);
        assert_eq!(first_nonsquare(7), 3);
    }
}
