//! Radical, isotropic vectors, hyperbolic splitting and the Witt class.

use super::linalg::{self, complete_basis, inv, is_square, kernel, sub};
use super::{FqQuadSpace, Residual, Subspace, WittDecomposition};
use crate::error::{Error, Result};

/// `rad V = {x : B(x,V) = 0, q(x) = 0}`.
pub fn radical(v: &FqQuadSpace) -> Subspace {
    let p = v.p();
    let n = v.dim();
    let ker = kernel(&v.bilinear_matrix(), n, p);
    // On ker B the form is additive (p = 2) or identically zero (p odd, since
    // q(x) = B(x,x)/2), so the radical is the kernel of a linear functional.
    let Some(pivot) = ker.iter().position(|x| v.q(x) != 0) else {
        return Subspace::span(p, n, ker);
    };
    debug_assert_eq!(p, 2);
    let x0 = ker[pivot].clone();
    let rad = ker
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != pivot)
        .map(|(_, x)| {
            let mut y = x.clone();
            linalg::axpy(&mut y, v.q(x), &x0, p);
            y
        })
        .collect();
    Subspace::span(p, n, rad)
}

/// A nonzero isotropic vector. For dim ≥ 3 one always exists inside the span
/// of the first three coordinates (a ternary quadratic form over a finite
/// field has a nontrivial zero), so the search is cheap.
pub fn find_isotropic(v: &FqQuadSpace) -> Result<Vec<u64>> {
    let n = v.dim();
    let d = n.min(3);
    let mut found = None;
    linalg::for_each_vector(d, v.p(), |c| {
        if c.iter().all(|&x| x == 0) {
            return true;
        }
        let mut x = vec![0; n];
        x[..d].copy_from_slice(c);
        if v.q(&x) == 0 {
            found = Some(x);
            false
        } else {
            true
        }
    });
    found.ok_or(Error::AnisotropicSpace)
}

/// Given an isotropic `x` outside the B-kernel, returns `(x, y, complement)`
/// with `q(y) = 0`, `B(x,y) = 1` and the complement orthogonal to both.
pub fn split_hyperbolic(v: &FqQuadSpace, x: &[u64]) -> Result<(Vec<u64>, Vec<u64>, Subspace)> {
    let p = v.p();
    let n = v.dim();
    if v.q(x) != 0 {
        return Err(Error::InvalidMatrix("vector is not isotropic".into()));
    }
    let Some(i) = (0..n).find(|&i| v.b(x, &linalg::unit(n, i)) != 0) else {
        return Err(Error::NotRegular);
    };
    let mut y = linalg::unit(n, i);
    let s = inv(v.b(x, &y), p);
    linalg::scale(&mut y, s, p);
    // y' = y - q(y) x
    let qy = v.q(&y);
    linalg::axpy(&mut y, sub(0, qy, p), x, p);
    debug_assert_eq!(v.q(&y), 0);
    debug_assert_eq!(v.b(x, &y), 1);
    let comp = v.orthogonal_complement(&[x.to_vec(), y.clone()]);
    Ok((x.to_vec(), y, comp))
}

/// Projection `z - B(z,y)x - B(z,x)y` onto the complement of the plane (x,y).
pub fn project_off_plane(v: &FqQuadSpace, x: &[u64], y: &[u64], z: &[u64]) -> Vec<u64> {
    let p = v.p();
    let mut w = z.to_vec();
    linalg::axpy(&mut w, sub(0, v.b(z, y), p), x, p);
    linalg::axpy(&mut w, sub(0, v.b(z, x), p), y, p);
    w
}

/// For a regular plane over F_2: a basis with `q(x) = B(x,y) = 1`.
pub fn plane_normal_basis(v: &FqQuadSpace) -> Result<(Vec<u64>, Vec<u64>)> {
    if v.dim() != 2 || !v.is_regular() {
        return Err(Error::NotRegular);
    }
    let mut out = None;
    linalg::for_each_vector(2, v.p(), |x| {
        if v.q(x) != 1 {
            return true;
        }
        linalg::for_each_vector(2, v.p(), |y| {
            if v.b(x, y) == 1 {
                out = Some((x.to_vec(), y.to_vec()));
                false
            } else {
                true
            }
        });
        out.is_none()
    });
    out.ok_or(Error::NotRegular)
}

/// Whether a regular plane is hyperbolic.
pub fn plane_is_hyperbolic(v: &FqQuadSpace) -> Result<bool> {
    let p = v.p();
    if p == 2 {
        let (_, y) = plane_normal_basis(v)?;
        // H = {γ² + γ} = {0} over F_2
        Ok(v.q(&y) == 0)
    } else {
        if v.dim() != 2 {
            return Err(Error::NotRegular);
        }
        let m = v.bilinear_matrix();
        let det = (m[0][0] * m[1][1] + p * p - m[0][1] * m[1][0] % p) % p;
        if det == 0 {
            return Err(Error::NotRegular);
        }
        Ok(is_square(sub(0, det, p), p))
    }
}

fn decompose_regular(v: &FqQuadSpace) -> Result<(usize, Residual)> {
    let mut hyp = 0;
    let mut cur = v.clone();
    while cur.dim() >= 3 {
        let x = find_isotropic(&cur)?;
        let (_, _, comp) = split_hyperbolic(&cur, &x)?;
        cur = cur.restrict(comp.basis());
        hyp += 1;
    }
    let residual = match cur.dim() {
        0 => Residual::Zero,
        1 => Residual::Line,
        _ => {
            if plane_is_hyperbolic(&cur)? {
                hyp += 1;
                Residual::Zero
            } else {
                Residual::AnisoPlane
            }
        }
    };
    Ok((hyp, residual))
}

/// Witt class of an arbitrary space: split off the radical, then peel
/// hyperbolic planes until at most a plane remains.
pub fn decompose(v: &FqQuadSpace) -> WittDecomposition {
    let rad = radical(v);
    let comp = complete_basis(rad.basis(), v.dim(), v.p());
    let w = v.restrict(&comp);
    let (hyp_count, residual) =
        decompose_regular(&w).expect("a complement of the radical is regular");
    WittDecomposition { rad_dim: rad.dim(), hyp_count, residual }
}

/// Witt class of the literal orthogonal complement of `u` in a regular,
/// even-dimensional `v`.
pub fn complement_class(v: &FqQuadSpace, u: &Subspace) -> Result<WittDecomposition> {
    check_regular_even(v)?;
    let perp = v.orthogonal_complement(u.basis());
    Ok(decompose(&v.restrict(perp.basis())))
}

/// `class(U) ⊥ H^{l-d}` when `v` is hyperbolic (dim 2l, d = dim U), else
/// `class(U) ⊥ A ⊥ H^{l-d-1}`.
pub fn predicted_complement_class(v: &FqQuadSpace, u: &Subspace) -> Result<WittDecomposition> {
    check_regular_even(v)?;
    let l = (v.dim() / 2) as i64;
    let d = u.dim() as i64;
    let cu = decompose(&v.restrict(u.basis()));
    if decompose(v).is_hyperbolic() {
        cu.with_hyperbolic(l - d)
    } else {
        cu.with_aniso().with_hyperbolic(l - d - 1)
    }
}

fn check_regular_even(v: &FqQuadSpace) -> Result<()> {
    if !v.is_regular() {
        return Err(Error::NotRegular);
    }
    if !v.dim().is_multiple_of(2) {
        return Err(Error::OddDimension);
    }
    Ok(())
}
