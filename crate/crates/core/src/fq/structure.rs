//! Constructive splitting results used to certify the Witt classification,
//! with characteristic 2 as the main concern.

use super::linalg::{self, coordinates, for_each_vector};
use super::witt::{plane_is_hyperbolic, project_off_plane, split_hyperbolic};
use super::{FqQuadSpace, Subspace};
use crate::error::{Error, Result};
use crate::qanalog::{delta, mu, p_pow, Rational};

/// For an anisotropic vector `v` of a regular, isotropic, even-dimensional
/// space: a vector `w` with `span(v, w)` a hyperbolic plane, together with
/// the orthogonal complement `V'` of that plane.
pub fn anisotropic_split(v: &FqQuadSpace, x: &[u64]) -> Result<(Vec<u64>, Subspace)> {
    if v.q(x) == 0 {
        return Err(Error::InvalidMatrix("vector is isotropic".into()));
    }
    let mut found = None;
    for_each_vector(v.dim(), v.p(), |w| {
        if v.b(x, w) == 0 {
            return true;
        }
        let plane = v.restrict(&[x.to_vec(), w.to_vec()]);
        if plane_is_hyperbolic(&plane) == Ok(true) {
            found = Some(w.to_vec());
            false
        } else {
            true
        }
    });
    let w = found.ok_or(Error::AnisotropicSpace)?;
    let comp = v.orthogonal_complement(&[x.to_vec(), w.clone()]);
    Ok((w, comp))
}

/// Given a totally isotropic `r` (independent vectors), returns `r'` with
/// `span(r) ⊕ span(r')` hyperbolic of dimension `2·|r|`. Follows the
/// induction: pair the first vector, move the rest into the complement.
pub fn hyperbolic_mate(v: &FqQuadSpace, r: &[Vec<u64>]) -> Result<Vec<Vec<u64>>> {
    if r.is_empty() {
        return Ok(Vec::new());
    }
    if !v.is_totally_isotropic(r) {
        return Err(Error::InvalidMatrix("subspace is not totally isotropic".into()));
    }
    let x = &r[0];
    let (_, y, comp) = split_hyperbolic(v, x)?;
    let sub = v.restrict(comp.basis());
    let rest = r[1..]
        .iter()
        .map(|ri| {
            let moved = project_off_plane(v, x, &y, ri);
            coordinates(comp.basis(), &moved, v.p()).ok_or(Error::NotRegular)
        })
        .collect::<Result<Vec<_>>>()?;
    let inner = hyperbolic_mate(&sub, &rest)?;
    let mut out = vec![y];
    out.extend(inner.iter().map(|c| linalg::combine(comp.basis(), c, v.dim(), v.p())));
    Ok(out)
}

/// The map `u ↦ u + B(u,z) y` carrying `U` onto the complement of
/// `span(x + z, y)` when `V = span(x,y) ⊥ U` with `(x,y)` hyperbolic, `z ∈ U`.
pub fn shear_isometry(v: &FqQuadSpace, y: &[u64], z: &[u64], u: &[u64]) -> Vec<u64> {
    let mut out = u.to_vec();
    linalg::axpy(&mut out, v.b(u, z), y, v.p());
    out
}

/// Number of ordered, linearly independent, pairwise orthogonal isotropic
/// ℓ-tuples in a regular space of the given dimension and type.
pub fn ordered_isotropic_tuples(dim: usize, hyperbolic: bool, ell: usize, p: u64) -> Rational {
    let l = ell as u32;
    let scale = p_pow(p, (ell * ell.saturating_sub(1) / 2) as i64);
    let t = (dim / 2) as i64;
    if dim % 2 == 1 {
        scale * mu(p, t, l) * delta(p, t, l)
    } else if hyperbolic {
        scale * mu(p, t, l) * delta(p, t - 1, l)
    } else {
        scale * delta(p, t, l) * mu(p, t - 1, l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::{decompose, Residual, WittDecomposition};

    #[test]
    fn mate_in_h2() {
        let v = FqQuadSpace::hyperbolic(2, 2);
        let r = vec![vec![1, 0, 0, 0], vec![0, 0, 1, 0]];
        let m = hyperbolic_mate(&v, &r).unwrap();
        let mut all = r.clone();
        all.extend(m);
        assert_eq!(decompose(&v.restrict(&all)), WittDecomposition::new(0, 2, Residual::Zero));
    }

    #[test]
    fn aniso_vector_split() {
        let v = FqQuadSpace::hyperbolic(2, 1).orthogonal_sum(&FqQuadSpace::anisotropic_plane(2));
        let x = vec![0, 0, 1, 0];
        let (w, comp) = anisotropic_split(&v, &x).unwrap();
        assert_eq!(v.b(&x, &w), 1);
        assert_eq!(comp.dim(), 2);
    }
}
