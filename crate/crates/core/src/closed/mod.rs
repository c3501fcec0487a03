//! Closed formulas for the coefficients of θ(L)|T̃_j(p²) and of neighbour
//! sums, the eigenvalues they imply, and harnesses checking them against the
//! direct operator action.

pub mod kj;
pub mod verify;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fq::linalg::{self, reduce};
use crate::fq::{decompose, phi_of_class, FqQuadSpace, Subspace, WittDecomposition};
use crate::lattice::intmat::{self, IMat};
use crate::lattice::IntegralLattice;
use crate::qanalog::{beta_i, delta, delta_i, mu, mu_i, p_pow, sign, Rational};

pub use kj::{enumerate_kj, NeighborLattice};

/// Shape of Ω ⊆ (1/p)L: `Ω = (1/p)Ω₀ ⊕ Ω₁ ⊕ pΩ₂` with `Ω₀ ⊕ Ω₁` primitive
/// modulo p, plus the quadratic space `Ω₁/pΩ₁`.
#[derive(Debug, Clone)]
pub struct OmegaProfile {
    pub r0: usize,
    pub r1: usize,
    pub r2: usize,
    pub omega1_bar: FqQuadSpace,
}

impl OmegaProfile {
    pub fn key(&self) -> ProfileKey {
        ProfileKey { r0: self.r0, r1: self.r1, r2: self.r2, class: decompose(&self.omega1_bar) }
    }
}

/// Everything the closed formulas depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ProfileKey {
    pub r0: usize,
    pub r1: usize,
    pub r2: usize,
    pub class: WittDecomposition,
}

/// Profile of Ω given by `y`, whose columns are `p·ω_i` in coordinates of L.
/// Ω must be even integral.
pub fn omega_profile(l: &IntegralLattice, y: &IMat, p: u64) -> Result<OmegaProfile> {
    let a = l.gram();
    let m = a.len();
    if y.len() != m || y.iter().any(|r| r.len() != y[0].len()) {
        return Err(Error::InvalidMatrix("frame must have one row per basis vector of L".into()));
    }
    let n = y[0].len();
    let g = intmat::congruent(a, y);
    let pp = (p * p) as i64;
    if (0..n).any(|i| (0..n).any(|j| g[i][j] % pp != 0) || (g[i][i] / pp) % 2 != 0) {
        return Err(Error::InvalidMatrix("Ω is not even integral".into()));
    }
    let cols = intmat::columns(y);
    let ybar: Vec<Vec<u64>> = cols.iter().map(|c| c.iter().map(|&x| reduce(x, p)).collect()).collect();
    let omega0 = Subspace::span(p, m, ybar.clone());
    let r0 = omega0.dim();
    // Ω ∩ L is generated by pΩ and by Σ g_i ω_i for g in the kernel of y mod p
    let rows: Vec<Vec<u64>> = (0..m).map(|r| (0..n).map(|c| ybar[c][r]).collect()).collect();
    let mut gens = ybar;
    for g in linalg::kernel(&rows, n, p) {
        let v: Vec<i64> = (0..m)
            .map(|r| {
                let s: i64 = (0..n).map(|c| y[r][c] * g[c] as i64).sum();
                debug_assert_eq!(s % p as i64, 0);
                s / p as i64
            })
            .collect();
        gens.push(v.iter().map(|&x| reduce(x, p)).collect());
    }
    let v = Subspace::span(p, m, gens);
    let r1 = v.dim() - r0;
    // a complement of Ω̄₀ inside V; Ω̄₀ lies in the radical, so any works
    let coords: Vec<Vec<u64>> = omega0
        .basis()
        .iter()
        .map(|b| linalg::coordinates(v.basis(), b, p).expect("Ω̄₀ ⊆ V"))
        .collect();
    let extra = linalg::complete_basis(&coords, v.dim(), p);
    let comp: Vec<Vec<u64>> = extra.iter().map(|c| linalg::combine(v.basis(), c, m, p)).collect();
    let space = FqQuadSpace::from_even_gram(p, a)?;
    Ok(OmegaProfile { r0, r1, r2: n - r0 - r1, omega1_bar: space.restrict(&comp) })
}

/// [`omega_profile`] for a basis of Ω given by rational coordinates.
pub fn omega_profile_rational(l: &IntegralLattice, basis: &[Vec<Rational>], p: u64) -> Result<OmegaProfile> {
    let m = l.rank();
    if basis.is_empty() || basis.iter().any(|b| b.len() != m) {
        return Err(Error::InvalidMatrix("basis vectors must have one coordinate per basis vector of L".into()));
    }
    let pr = Rational::from_integer(p.into());
    let mut y = intmat::zeros(m, basis.len());
    for (c, b) in basis.iter().enumerate() {
        for (r, x) in b.iter().enumerate() {
            let s = x * &pr;
            if !s.is_integer() {
                return Err(Error::NotInOverlattice);
            }
            y[r][c] = crate::qanalog::to_i128(&s).and_then(|v| i64::try_from(v).ok()).ok_or(Error::NotInOverlattice)?;
        }
    }
    omega_profile(l, &y, p)
}

/// The two readings of the last term of the exponent E′.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EPrimeVariant {
    /// `t(t+1)/2`
    Plus,
    /// `t(t−1)/2`
    Minus,
}

impl EPrimeVariant {
    pub fn label(self) -> &'static str {
        match self {
            EPrimeVariant::Plus => "t(t+1)/2",
            EPrimeVariant::Minus => "t(t-1)/2",
        }
    }
}

/// Weight, degree, prime and character for the closed formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FormulaContext {
    pub k: usize,
    pub n: usize,
    pub p: u64,
    pub chi: i8,
}

/// Closed form of the Ω-coefficient of θ(L)|T̃_j(p²).
pub fn c_tilde_closed(key: &ProfileKey, ctx: &FormulaContext, j: usize, variant: EPrimeVariant) -> Rational {
    let (r0, r1, r2) = (key.r0 as i64, key.r1 as i64, key.r2 as i64);
    let (k, n, j) = (ctx.k as i64, ctx.n as i64, j as i64);
    let p = ctx.p;
    let mut acc = Rational::zero();
    for ell in 0..=(j - r0) {
        let phi = phi_of_class(&key.class, ell as usize, p);
        if phi.is_zero() {
            continue;
        }
        for t in 0..=(j - r0 - ell) {
            let last = match variant {
                EPrimeVariant::Plus => t * (t + 1) / 2,
                EPrimeVariant::Minus => t * (t - 1) / 2,
            };
            let e = ell * (k - r0 - r1) + ell * (ell - 1) / 2 + t * (k - n) + last;
            let tail = beta_i(p, n - r0 - ell - t, j - r0 - ell - t);
            let body = if ctx.chi == 1 {
                delta_i(p, k - r0 - ell - 1, t) * beta_i(p, r2, t)
            } else {
                sign(ell) * beta_i(p, k - r0 - ell - 1, t) * mu_i(p, r2, t)
            };
            acc += p_pow(p, e) * &phi * body * tail;
        }
    }
    acc
}

/// Largest j for which the neighbour construction applies.
pub fn max_neighbor_index(k: usize, chi: i8) -> usize {
    if chi == 1 {
        k
    } else {
        k.saturating_sub(1)
    }
}

/// Closed form of the Ω-coefficient of Σ θ(K_j). `j = 0` gives θ(L).
pub fn b_j_closed(key: &ProfileKey, ctx: &FormulaContext, j: usize) -> Result<Rational> {
    if j > max_neighbor_index(ctx.k, ctx.chi) {
        return Err(Error::IndexOutOfRange(format!("j = {j} for k = {} and χ(p) = {}", ctx.k, ctx.chi)));
    }
    let (r0, r1) = (key.r0 as i64, key.r1 as i64);
    let (k, j) = (ctx.k as i64, j as i64);
    let p = ctx.p;
    if j < r0 {
        return Ok(Rational::zero());
    }
    let mut acc = Rational::zero();
    for ell in 0..=(j - r0) {
        let phi = phi_of_class(&key.class, ell as usize, p);
        if phi.is_zero() {
            continue;
        }
        let s = j - r0 - ell;
        let body = if ctx.chi == 1 {
            delta_i(p, k - r0 - ell - 1, s) * beta_i(p, k - r0 - r1, s)
        } else {
            sign(ell) * beta_i(p, k - r0 - ell - 1, s) * delta_i(p, k - r0 - r1, s)
        };
        acc += p_pow(p, ell * (k - j - r1 + ell)) * phi * body;
    }
    Ok(p_pow(p, (j - r0) * (j - r0 - 1) / 2) * acc)
}

/// `v_q(j)`, the weights of the neighbour sums in the expansion of T'_j.
pub fn v_q(ctx: &FormulaContext, j: usize, q: usize) -> Rational {
    let (k, n, j, q_) = (ctx.k as i64, ctx.n as i64, j as i64, q as i64);
    let p = ctx.p;
    let (a, b) = (k - n + q_ - 1, k - j + q_ - 1);
    if ctx.chi == 1 {
        sign(q_) * crate::qanalog::beta(p, a, q as u32) * delta(p, b, q as u32)
    } else {
        sign(q_) * delta(p, a, q as u32) * crate::qanalog::beta(p, b, q as u32)
    }
}

/// Eigenvalue of T'_j(p²) on the genus theta series.
pub fn eigenvalue_lambda_j(p: u64, k: usize, n: usize, j: usize, chi: i8) -> Result<Rational> {
    if j > max_neighbor_index(k, chi) {
        return Err(Error::IndexOutOfRange(format!("j = {j} for k = {k} and χ(p) = {chi}")));
    }
    let (k_, n_, j_) = (k as i64, n as i64, j as i64);
    let front = p_pow(p, j_ * (k_ - n_) + j_ * (j_ - 1) / 2) * crate::qanalog::beta(p, n_, j as u32);
    Ok(if chi == 1 { front * delta(p, k_ - 1, j as u32) } else { front * mu(p, k_ - 1, j as u32) })
}

/// Eigenvalue of T(p)² on the genus theta series.
pub fn eigenvalue_tp_squared(p: u64, k: usize, n: usize, chi: i8) -> Rational {
    let f = if chi == 1 { delta(p, k as i64 - 1, n as u32) } else { mu(p, k as i64 - 1, n as u32) };
    &f * &f
}

/// Proportionality factor of T(p) between genus theta series.
pub fn eigenvalue_tp(p: u64, k: usize, n: usize) -> Rational {
    delta(p, k as i64 - 1, n as u32)
}

#[cfg(test)]
mod tests;
