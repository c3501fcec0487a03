//! Coefficient-level action of T(p), T̃_j(p²), T'_j(p²) and T(p)² on
//! truncated Fourier expansions.
//!
//! An output coefficient at Λ is a finite sum over lattices Ω squeezed between
//! pΛ and (1/p)Λ. Those are enumerated once per (n, p) as Hermite bases `H`
//! of `M = pΩ`, with `p²Zⁿ ⊆ M ⊆ Zⁿ`, so `Gram(Ω) = ᵗH T H / p²`.

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{CoefficientSource, FourierMap, SeriesMeta};
use crate::fq::{phi_brute, FqQuadSpace};
use crate::lattice::gram_class::{canonicalize, enumerate_classes, GramClass};
use crate::lattice::intmat::{self, IMat};
use crate::lattice::kronecker;
use crate::qanalog::{beta, p_pow, rat, require_prime, sign, Rational};

pub const MAX_DEGREE: usize = 3;

/// Invariant-factor multiplicities of Ω relative to Λ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Mults {
    pub inv_p: usize,
    pub one: usize,
    pub p: usize,
}

/// One Ω with `pΛ ⊆ Ω ⊆ (1/p)Λ`, stored through the Hermite basis of pΩ.
#[derive(Debug, Clone)]
pub struct Frame {
    pub h: IMat,
    pub mults: Mults,
    /// Vectors of Λ spanning `(Λ∩Ω)/p(Λ+Ω)`.
    pub quotient_basis: Vec<Vec<i64>>,
}

impl Frame {
    fn new(h: IMat, p: i64) -> Self {
        let s = intmat::smith(&h);
        let mut mults = Mults { inv_p: 0, one: 0, p: 0 };
        let mut quotient_basis = Vec::new();
        for (i, &d) in s.diag.iter().enumerate() {
            match d.abs() {
                1 => mults.inv_p += 1,
                x if x == p => {
                    mults.one += 1;
                    quotient_basis.push(intmat::column(&s.left_inv, i));
                }
                _ => mults.p += 1,
            }
        }
        Frame { h, mults, quotient_basis }
    }

    /// `[Ω : pΛ] = p^e`.
    pub fn index_exponent(&self) -> usize {
        2 * self.mults.inv_p + self.mults.one
    }
}

/// Ω together with its class when its form is even integral.
#[derive(Debug, Clone)]
pub struct IntermediateLattice {
    pub frame: Frame,
    pub gram_class: Option<GramClass>,
}

/// Every frame for degree n at p, independent of Λ.
pub fn frames(n: usize, p: u64) -> Result<Vec<Frame>> {
    if n > MAX_DEGREE {
        return Err(Error::DegreeTooLarge(n));
    }
    require_prime(p)?;
    let p = p as i64;
    Ok(intmat::hermite_between(n, &[1, p, p * p], p * p).into_iter().map(|h| Frame::new(h, p)).collect())
}

/// `ᵗHTH / d` as an even integral form, if it is one.
fn scaled_form(t: &IMat, h: &IMat, d: i64) -> Option<IMat> {
    let g = intmat::congruent(t, h);
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

pub fn enumerate_between(lambda: &IMat, p: u64) -> Result<Vec<IntermediateLattice>> {
    intmat::is_even_symmetric(lambda)
        .then_some(())
        .ok_or_else(|| Error::InvalidMatrix("Λ must be even symmetric".into()))?;
    let pp = (p * p) as i64;
    Ok(frames(lambda.len(), p)?
        .into_iter()
        .map(|f| {
            let gram_class = scaled_form(lambda, &f.h, pp).map(|g| canonicalize(&g).expect("scaled even form"));
            IntermediateLattice { frame: f, gram_class }
        })
        .collect())
}

/// Totally isotropic subspaces of codimension n−j in `(Λ∩Ω)/p(Λ+Ω)`.
pub fn alpha_j(lambda: &IMat, frame: &Frame, p: u64, j: usize) -> Result<u64> {
    let n = lambda.len();
    let dim = frame.mults.one;
    if n - j > dim {
        return Ok(0);
    }
    let space = FqQuadSpace::from_even_gram(p, lambda)?;
    let basis: Vec<Vec<u64>> = frame
        .quotient_basis
        .iter()
        .map(|v| v.iter().map(|&x| crate::fq::linalg::reduce(x, p)).collect())
        .collect();
    phi_brute(&space.restrict(&basis), dim - (n - j))
}

/// Weight, character value and prime for one application.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HeckeContext {
    pub n: usize,
    pub k: usize,
    pub p: u64,
    pub chi: i8,
}

impl HeckeContext {
    pub fn new(n: usize, meta: &SeriesMeta, p: u64) -> Result<Self> {
        require_prime(p)?;
        if let Some(level) = meta.level {
            if level % p == 0 {
                return Err(Error::DividesLevel { p, level });
            }
        }
        let disc = meta
            .character_discriminant
            .ok_or(Error::MissingParameter("character discriminant"))?;
        let chi = kronecker(disc, p);
        if chi == 0 {
            return Err(Error::DividesLevel { p, level: meta.level.unwrap_or(0) });
        }
        Ok(HeckeContext { n, k: meta.k, p, chi })
    }

    pub fn of(src: &dyn CoefficientSource, p: u64) -> Result<Self> {
        Self::new(src.degree(), &src.meta(), p)
    }

    fn chi_pow(&self, e: i64) -> Rational {
        if self.chi == 1 || e % 2 == 0 {
            rat(1)
        } else {
            rat(-1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "j")]
pub enum OpKind {
    Tp,
    Ttilde(usize),
    Tprime(usize),
    TpSquared,
}

/// Which expansion evaluates T(p)².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SquareRoute {
    /// T(p) applied twice.
    Iterated,
    /// The combination `Σ (−1)^{n−j} p^{…} T̃_j`.
    Expansion,
    /// The same combination with `χ(p)^{n−j}` as the sign.
    CharacterSigned,
}

fn check_bound(src: &dyn CoefficientSource, factor: i64, out_bound: i64) -> Result<()> {
    if out_bound < 0 {
        return Err(Error::InvalidMatrix("negative trace bound".into()));
    }
    match src.available_bound() {
        Some(av) if av < factor * out_bound => Err(Error::InsufficientBound { needed: factor * out_bound, available: av }),
        _ => Ok(()),
    }
}

/// Largest output bound a finite input supports for a given scale factor.
pub fn default_out_bound(src: &dyn CoefficientSource, factor: i64) -> Result<i64> {
    src.available_bound()
        .map(|b| b / factor)
        .ok_or(Error::MissingParameter("bound"))
}

fn build(
    src: &dyn CoefficientSource,
    ctx: &HeckeContext,
    out_bound: i64,
    coeff: impl Fn(&GramClass) -> Result<Rational> + Sync,
) -> Result<FourierMap> {
    let entries = enumerate_classes(ctx.n, out_bound)
        .into_par_iter()
        .map(|c| coeff(&c).map(|v| (c, v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FourierMap::from_entries(ctx.n, src.meta(), out_bound, entries).with_p_context(ctx.p))
}

/// `F | T(p)` on every class with trace ≤ `out_bound`.
pub fn apply_tp(src: &dyn CoefficientSource, p: u64, out_bound: i64) -> Result<FourierMap> {
    let ctx = HeckeContext::of(src, p)?;
    check_bound(src, p as i64, out_bound)?;
    let (n, k) = (ctx.n as i64, ctx.k as i64);
    // pΛ ⊆ Ω ⊆ Λ: Ω = H'Zⁿ with Hermite diagonal in {1, p}
    let pi = p as i64;
    let sub: Vec<(IMat, i64, i64)> = intmat::hermite_between(ctx.n, &[1, pi], pi)
        .into_iter()
        .map(|h| {
            let m1 = (0..ctx.n).filter(|&i| h[i][i] == 1).count() as i64;
            (h, m1, n - m1)
        })
        .collect();
    build(src, &ctx, out_bound, |lam| {
        let mut acc = Rational::zero();
        for (h, m1, mp) in &sub {
            let Some(g) = scaled_form(lam.rep(), h, pi) else { continue };
            let c = src.coefficient(&canonicalize(&g)?)?;
            if c.is_zero() {
                continue;
            }
            let e = m1 * k + mp * (mp + 1) / 2 - n * (n + 1) / 2;
            acc += ctx.chi_pow(*m1) * p_pow(p, e) * c;
        }
        Ok(acc)
    })
}

/// Exponent `E_j(Λ,Ω)`.
pub fn e_j(m: Mults, k: usize, n: usize, j: usize) -> i64 {
    let (a, b, c) = (m.inv_p as i64, m.one as i64, m.p as i64);
    let (k, n, j) = (k as i64, n as i64, j as i64);
    let mj = b - n + j;
    k * (a - c + j) + c * (c + b + 1) + mj * (mj + 1) / 2 - j * (n + 1)
}

/// The same exponent through the multiplicities of Λ inside Ω,
/// `m₀ = mult(1/p)` and `m₂ = mult(p)`, which swap the roles of 1/p and p.
pub fn e_j_dual(m: Mults, k: usize, n: usize, j: usize) -> i64 {
    let (m0, m2) = (m.p as i64, m.inv_p as i64);
    let (k, n, j) = (k as i64, n as i64, j as i64);
    let x = j - m0 - m2;
    k * (j - m0 + m2) + m0 * (n - m2 + 1) + x * (x + 1) / 2 - j * (n + 1)
}

fn ttilde_coefficient(
    src: &dyn CoefficientSource,
    ctx: &HeckeContext,
    frames: &[Frame],
    lam: &GramClass,
    j: usize,
) -> Result<Rational> {
    let pp = (ctx.p * ctx.p) as i64;
    let mut acc = Rational::zero();
    for f in frames {
        let Some(g) = scaled_form(lam.rep(), &f.h, pp) else { continue };
        let c = src.coefficient(&canonicalize(&g)?)?;
        if c.is_zero() {
            continue;
        }
        let a = alpha_j(lam.rep(), f, ctx.p, j)?;
        if a == 0 {
            continue;
        }
        let s = ctx.chi_pow(j as i64 - ctx.n as i64 + f.index_exponent() as i64);
        acc += s * p_pow(ctx.p, e_j(f.mults, ctx.k, ctx.n, j)) * rat(a as i64) * c;
    }
    Ok(acc)
}

fn check_j(n: usize, j: usize, allow_zero: bool) -> Result<()> {
    if j > n || (j == 0 && !allow_zero) {
        return Err(Error::IndexOutOfRange(format!("j = {j} for degree {n}")));
    }
    Ok(())
}

/// `F | T̃_j(p²)`; `j = 0` is the identity.
pub fn apply_ttilde(src: &dyn CoefficientSource, p: u64, j: usize, out_bound: i64) -> Result<FourierMap> {
    let ctx = HeckeContext::of(src, p)?;
    check_j(ctx.n, j, true)?;
    check_bound(src, (p * p) as i64, out_bound)?;
    if j == 0 {
        return build(src, &ctx, out_bound, |c| src.coefficient(c));
    }
    let fr = frames(ctx.n, p)?;
    build(src, &ctx, out_bound, |lam| ttilde_coefficient(src, &ctx, &fr, lam, j))
}

/// `u_q(j)`, the coefficients writing T'_j through the T̃_{j−q}.
pub fn u_q(p: u64, n: usize, j: usize, q: usize) -> Rational {
    let q_ = q as i64;
    sign(q_) * p_pow(p, q_ * (q_ - 1) / 2) * beta(p, n as i64 - j as i64 + q_, q as u32)
}

/// Evaluates `Σ w_i · F|T̃_{j_i}` in one pass over the frames.
pub fn apply_ttilde_combination(
    src: &dyn CoefficientSource,
    p: u64,
    terms: &[(usize, Rational)],
    out_bound: i64,
) -> Result<FourierMap> {
    let ctx = HeckeContext::of(src, p)?;
    for (j, _) in terms {
        check_j(ctx.n, *j, true)?;
    }
    check_bound(src, (p * p) as i64, out_bound)?;
    let fr = frames(ctx.n, p)?;
    build(src, &ctx, out_bound, |lam| {
        let mut acc = Rational::zero();
        for (j, w) in terms {
            if w.is_zero() {
                continue;
            }
            let v = if *j == 0 { src.coefficient(lam)? } else { ttilde_coefficient(src, &ctx, &fr, lam, *j)? };
            acc += w * v;
        }
        Ok(acc)
    })
}

/// `F | T'_j(p²) = Σ_q u_q(j) F | T̃_{j−q}(p²)`.
pub fn apply_tprime(src: &dyn CoefficientSource, p: u64, j: usize, out_bound: i64) -> Result<FourierMap> {
    let n = src.degree();
    check_j(n, j, true)?;
    let terms: Vec<(usize, Rational)> = (0..=j).map(|q| (j - q, u_q(p, n, j, q))).collect();
    apply_ttilde_combination(src, p, &terms, out_bound)
}

/// Coefficients of the T̃_j in the expansion of T(p)², with sign
/// `s^{n−j}` (s = −1 for the usual expansion).
pub fn tp_squared_terms(p: u64, n: usize, k: usize, s: i8) -> Vec<(usize, Rational)> {
    let (n_, k_) = (n as i64, k as i64);
    (0..=n)
        .map(|j| {
            let j_ = j as i64;
            let e = k_ * (n_ - j_) + j_ * (j_ + 1) / 2 - n_ * (n_ + 1) / 2;
            let sg = if s == 1 { rat(1) } else { sign(n_ - j_) };
            (j, sg * p_pow(p, e))
        })
        .collect()
}

/// `F | T(p)²` along either route.
pub fn apply_tp_squared(src: &dyn CoefficientSource, p: u64, out_bound: i64, route: SquareRoute) -> Result<FourierMap> {
    match route {
        SquareRoute::Iterated => {
            check_bound(src, (p * p) as i64, out_bound)?;
            let once = apply_tp(src, p, p as i64 * out_bound)?;
            apply_tp(&once, p, out_bound)
        }
        SquareRoute::Expansion => {
            let terms = tp_squared_terms(p, src.degree(), src.meta().k, -1);
            apply_ttilde_combination(src, p, &terms, out_bound)
        }
        SquareRoute::CharacterSigned => {
            let chi = HeckeContext::of(src, p)?.chi;
            let terms = tp_squared_terms(p, src.degree(), src.meta().k, chi);
            apply_ttilde_combination(src, p, &terms, out_bound)
        }
    }
}

pub fn apply(src: &dyn CoefficientSource, p: u64, op: OpKind, out_bound: i64) -> Result<FourierMap> {
    match op {
        OpKind::Tp => apply_tp(src, p, out_bound),
        OpKind::Ttilde(j) => {
            check_j(src.degree(), j, false)?;
            apply_ttilde(src, p, j, out_bound)
        }
        OpKind::Tprime(j) => {
            check_j(src.degree(), j, false)?;
            apply_tprime(src, p, j, out_bound)
        }
        OpKind::TpSquared => apply_tp_squared(src, p, out_bound, SquareRoute::Iterated),
    }
}

/// Trace scale factor of an operator: output bound = input bound / factor.
pub fn bound_factor(p: u64, op: OpKind) -> i64 {
    match op {
        OpKind::Tp => p as i64,
        _ => (p * p) as i64,
    }
}

/// The two sides of the identities relating the T̃ and T' families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OperatorIdentity {
    /// T̃_r = Σ_q β(n−q, r−q) T'_q.
    TildeFromPrime { r: usize },
    /// T̃ beyond the isotropic range is a combination of lower T̃.
    TildeRecursion { a: usize },
}

/// `w_q(a)` for the recursion above the isotropic range.
pub fn w_q(p: u64, n: usize, k: usize, a: usize, q: usize, chi: i8) -> Rational {
    let (n, k, a, q) = (n as i64, k as i64, a as i64, q as i64);
    let top = if chi == 1 { n - k + q } else { n - k + 1 + q };
    sign(q) * p_pow(p, q * (q + 1) / 2) * beta(p, a + q - 1, q as u32) * beta(p, top, (a + q) as u32)
}

/// Both sides of an operator identity on `src`, truncated at `out_bound`.
pub fn operator_identity_sides(
    src: &dyn CoefficientSource,
    p: u64,
    id: OperatorIdentity,
    out_bound: i64,
) -> Result<(FourierMap, FourierMap)> {
    let ctx = HeckeContext::of(src, p)?;
    let n = ctx.n;
    match id {
        OperatorIdentity::TildeFromPrime { r } => {
            check_j(n, r, false)?;
            let lhs = apply_ttilde(src, p, r, out_bound)?;
            // expand each T'_q through the T̃ so the right side is one pass
            let mut terms = vec![Rational::zero(); r + 1];
            for q in 0..=r {
                let b = beta(p, (n - q) as i64, (r - q) as u32);
                for s in 0..=q {
                    terms[q - s] += &b * u_q(p, n, q, s);
                }
            }
            let terms: Vec<(usize, Rational)> = terms.into_iter().enumerate().collect();
            let rhs = apply_ttilde_combination(src, p, &terms, out_bound)?;
            Ok((lhs, rhs))
        }
        OperatorIdentity::TildeRecursion { a } => {
            let k = ctx.k;
            let base = if ctx.chi == 1 { k } else { k.checked_sub(1).ok_or(Error::IndexOutOfRange("k = 0".into()))? };
            if a == 0 || base + a > n {
                return Err(Error::IndexOutOfRange(format!("a = {a} with k = {k}, n = {n}")));
            }
            let lhs = apply_ttilde(src, p, base + a, out_bound)?;
            let terms: Vec<(usize, Rational)> =
                (0..=base).map(|q| (base - q, w_q(p, n, k, a, q, ctx.chi))).collect();
            let rhs = apply_ttilde_combination(src, p, &terms, out_bound)?;
            Ok((lhs, rhs))
        }
    }
}

pub fn operator_identity_check(src: &dyn CoefficientSource, p: u64, id: OperatorIdentity, out_bound: i64) -> Result<bool> {
    let (l, r) = operator_identity_sides(src, p, id, out_bound)?;
    Ok(l.agrees_with(&r))
}
