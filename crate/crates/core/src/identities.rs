//! Parameter-grid suites checking the counting formulas, the q-analog
//! identities and the characteristic 2 structure results exactly.
//!
//! Every suite returns its rows in a fixed order; a row holds when both sides
//! render to the same string. Suites that only involve δ, μ and β evaluate
//! them through a [`QFunctions`] so a broken implementation can be detected.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fq::linalg::{self, for_each_vector, rank};
use crate::fq::structure::{anisotropic_split, hyperbolic_mate, shear_isometry};
use crate::fq::witt::{plane_is_hyperbolic, split_hyperbolic};
use crate::fq::{
    complement_class, decompose, find_isotropic, isotropic_subspaces, phi_brute, phi_general, phi_regular,
    predicted_complement_class, reduction_rhs, FqQuadSpace, ReductionVariant, Residual, Subspace, WittDecomposition,
};
use crate::qsums::{q_sum_closed, q_sum_with, Form, Params, Variant};
use crate::qanalog::{fmt_rational, p_pow, sign, QFunctions, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityRow {
    pub identity: &'static str,
    pub params: String,
    pub lhs: String,
    pub rhs: String,
}

impl IdentityRow {
    fn new(identity: &'static str, params: String, lhs: impl ToString, rhs: impl ToString) -> Self {
        IdentityRow { identity, params, lhs: lhs.to_string(), rhs: rhs.to_string() }
    }

    fn exact(identity: &'static str, params: String, lhs: &Rational, rhs: &Rational) -> Self {
        Self::new(identity, params, fmt_rational(lhs), fmt_rational(rhs))
    }

    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    /// Closed-form isotropic subspace counts against enumeration.
    Phi,
    /// The four alternating sums against their closed forms.
    QSums,
    /// Pascal, swap, multiplicativity and negative-argument identities.
    Auxiliary,
    /// φ of `U ⊥ H^t` (and `⊥ A`) through φ of `U`.
    Reduction,
    /// Characteristic 2 splitting and cancellation results.
    Structure,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Phi, Suite::QSums, Suite::Auxiliary, Suite::Reduction, Suite::Structure];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Phi => "phi",
            Suite::QSums => "qsums",
            Suite::Auxiliary => "auxiliary",
            Suite::Reduction => "reduction",
            Suite::Structure => "structure",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.name() == s)
    }
}

pub fn run(suite: Suite, f: &dyn QFunctions) -> Result<Vec<IdentityRow>> {
    match suite {
        Suite::Phi => phi_suite(),
        Suite::QSums => Ok(qsums_suite(f)),
        Suite::Auxiliary => Ok(auxiliary_suite(f)),
        Suite::Reduction => reduction_suite(),
        Suite::Structure => structure_suite(STRUCTURE_SAMPLES),
    }
}

/// Compact label of a form: rows of the upper triangle, `;`-separated.
pub fn form_label(v: &FqQuadSpace) -> String {
    let rows: Vec<String> = (0..v.dim())
        .map(|i| (i..v.dim()).map(|j| v.coeff(i, j).to_string()).collect::<Vec<_>>().join(""))
        .collect();
    format!("p={} q={}", v.p(), rows.join(";"))
}

fn class_label(c: &WittDecomposition) -> String {
    let res = match c.residual {
        Residual::Zero => "0",
        Residual::Line => "line",
        Residual::AnisoPlane => "A",
    };
    format!("rad{}+H{}+{}", c.rad_dim, c.hyp_count, res)
}

/// Every form of dimension `dim` over F_p, in lexicographic coefficient order.
pub fn all_forms(p: u64, dim: usize) -> Vec<FqQuadSpace> {
    let slots: Vec<(usize, usize)> = (0..dim).flat_map(|i| (i..dim).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for_each_vector(slots.len(), p, |c| {
        let mut m = vec![vec![0i64; dim]; dim];
        for (&(i, j), &x) in slots.iter().zip(c) {
            m[i][j] = x as i64;
        }
        out.push(FqQuadSpace::new(p, &m).expect("p is prime"));
        true
    });
    out
}

pub fn random_form(p: u64, dim: usize, rng: &mut impl Rng) -> FqQuadSpace {
    let m: Vec<Vec<i64>> = (0..dim)
        .map(|i| (0..dim).map(|j| if j >= i { rng.gen_range(0..p) as i64 } else { 0 }).collect())
        .collect();
    FqQuadSpace::new(p, &m).expect("p is prime")
}

fn random_vector(p: u64, dim: usize, rng: &mut impl Rng) -> Vec<u64> {
    (0..dim).map(|_| rng.gen_range(0..p)).collect()
}

/// The same form written in a random basis.
pub fn scramble(v: &FqQuadSpace, rng: &mut impl Rng) -> FqQuadSpace {
    loop {
        let cols: Vec<Vec<u64>> = (0..v.dim()).map(|_| random_vector(v.p(), v.dim(), rng)).collect();
        if rank(&cols, v.p()) == v.dim() {
            return v.restrict(&cols);
        }
    }
}

fn flatten(parts: Result<Vec<Vec<IdentityRow>>>) -> Result<Vec<IdentityRow>> {
    Ok(parts?.into_iter().flatten().collect())
}

// ---- φ counts -------------------------------------------------------------

const PHI_PRIMES: [u64; 3] = [2, 3, 5];
const MAX_ELL: usize = 3;

fn phi_suite() -> Result<Vec<IdentityRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut spaces = Vec::new();
    for p in PHI_PRIMES {
        for class in WittDecomposition::all(6, 2) {
            let v = FqQuadSpace::from_class(p, &class);
            let w = scramble(&v, &mut rng);
            spaces.push(v);
            spaces.push(w);
        }
    }
    for (p, dmax) in [(2u64, 4usize), (3, 3), (5, 2)] {
        for d in 1..=dmax {
            spaces.extend(all_forms(p, d));
        }
    }
    flatten(spaces.par_iter().map(phi_rows).collect())
}

fn phi_rows(v: &FqQuadSpace) -> Result<Vec<IdentityRow>> {
    let class = decompose(v);
    let label = format!("{} class={}", form_label(v), class_label(&class));
    let mut rows = Vec::new();
    for ell in 0..=MAX_ELL.min(v.dim()) {
        let brute = Rational::from_integer(phi_brute(v, ell)?.into());
        let params = format!("{label} l={ell}");
        if class.is_regular() {
            rows.push(IdentityRow::exact("phi-regular", params.clone(), &phi_regular(&class, ell, v.p()), &brute));
        }
        rows.push(IdentityRow::exact("phi-general", params, &phi_general(v, ell), &brute));
    }
    Ok(rows)
}

// ---- q-analog sums and identities -----------------------------------------

const Q_PRIMES: [u64; 3] = [2, 3, 5];

fn qsums_suite(f: &dyn QFunctions) -> Vec<IdentityRow> {
    let mut rows = Vec::new();
    for p in Q_PRIMES {
        for m in 1..=5u32 {
            let mut push = |name: &'static str, variant, params: Params, form| {
                let lhs = q_sum_with(f, p, variant, params, form).expect("parameters supplied");
                let rhs = q_sum_closed(p, variant, params).expect("parameters supplied");
                let label = format!(
                    "p={p} m={m}{}{}{}",
                    params.a.map(|a| format!(" a={a}")).unwrap_or_default(),
                    params.b.map(|b| format!(" b={b}")).unwrap_or_default(),
                    params.y.map(|y| format!(" y={y}")).unwrap_or_default(),
                );
                rows.push(IdentityRow::exact(name, label, &lhs, &rhs));
            };
            for y in -3..=5 {
                push("qsum-a", Variant::A, Params { m, y: Some(y), ..Default::default() }, Form::Main);
            }
            for a in 1..=4 {
                for y in -3..=5 {
                    let pr = Params { m, a: Some(a), y: Some(y), ..Default::default() };
                    push("qsum-b", Variant::B, pr, Form::Main);
                    push("qsum-c", Variant::C, pr, Form::Main);
                    push("qsum-c-beta-form", Variant::C, pr, Form::Alternate);
                }
                for b in 1..=4 {
                    let pr = Params { m, a: Some(a), b: Some(b), ..Default::default() };
                    push("qsum-d", Variant::D, pr, Form::Main);
                    push("qsum-d-delta-form", Variant::D, pr, Form::Alternate);
                }
            }
        }
    }
    rows
}

fn auxiliary_suite(f: &dyn QFunctions) -> Vec<IdentityRow> {
    let mut rows = Vec::new();
    for p in Q_PRIMES {
        for m in 1..=5i64 {
            for q in 1..m as u32 {
                let rhs = p_pow(p, q as i64) * f.beta(p, m - 1, q) + f.beta(p, m - 1, q - 1);
                rows.push(IdentityRow::exact("pascal", format!("p={p} m={m} q={q}"), &f.beta(p, m, q), &rhs));
            }
        }
        for m in 0..=5i64 {
            for m2 in 0..=5i64 {
                for r in 0..=5u32 {
                    let lhs = f.beta(p, m, r) * f.mu(p, m2, r);
                    let rhs = f.beta(p, m2, r) * f.mu(p, m, r);
                    rows.push(IdentityRow::exact("swap", format!("p={p} m={m} m'={m2} r={r}"), &lhs, &rhs));
                }
            }
        }
        for t in 1..=3i64 {
            for r in 0..=5u32 {
                let ri = r as i64;
                let rhs = sign(ri) * p_pow(p, -ri * t - ri * (ri - 1) / 2) * f.beta(p, t + ri - 1, r);
                rows.push(IdentityRow::exact("negative-beta", format!("p={p} t={t} r={r}"), &f.beta(p, -t, r), &rhs));
            }
        }
        for m in -3..=5i64 {
            for r in 0..=4u32 {
                for r2 in 0..=4u32 {
                    let params = format!("p={p} m={m} r={r} r'={r2}");
                    let shifted = m - r2 as i64;
                    let lhs = f.delta(p, m, r + r2);
                    let rhs = f.delta(p, m, r2) * f.delta(p, shifted, r);
                    rows.push(IdentityRow::exact("delta-multiplicative", params.clone(), &lhs, &rhs));
                    let lhs = f.mu(p, m, r + r2);
                    let rhs = f.mu(p, m, r2) * f.mu(p, shifted, r);
                    rows.push(IdentityRow::exact("mu-multiplicative", params, &lhs, &rhs));
                }
            }
        }
    }
    rows
}

// ---- reduction formulas ---------------------------------------------------

fn reduction_suite() -> Result<Vec<IdentityRow>> {
    let mut jobs = Vec::new();
    for p in [2u64, 3] {
        for u in WittDecomposition::all(4, 4) {
            for t in -2..=2i64 {
                for variant in [ReductionVariant::A, ReductionVariant::B] {
                    let target = match variant {
                        ReductionVariant::A => u.with_hyperbolic(t),
                        ReductionVariant::B => u.with_aniso().with_hyperbolic(t),
                    };
                    // negative t only where U actually splits off the planes
                    if let Ok(target) = target {
                        jobs.push((p, u, t, variant, target));
                    }
                }
            }
        }
    }
    let parts = jobs
        .par_iter()
        .map(|&(p, u, t, variant, target)| {
            let v = FqQuadSpace::from_class(p, &target);
            (0..=MAX_ELL)
                .map(|ell| {
                    let lhs = Rational::from_integer(phi_brute(&v, ell)?.into());
                    let rhs = reduction_rhs(&u, t, ell, p, variant)?;
                    let name = match variant {
                        ReductionVariant::A => "reduction-a",
                        ReductionVariant::B => "reduction-b",
                    };
                    let params = format!("p={p} U={} t={t} l={ell}", class_label(&u));
                    Ok(IdentityRow::exact(name, params, &lhs, &rhs))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect();
    flatten(parts)
}

// ---- characteristic 2 structure -------------------------------------------

/// Random spaces of dimension 5 and 6 checked beyond the exhaustive range.
pub const STRUCTURE_SAMPLES: usize = 10_000;
const EXHAUSTIVE_DIM: usize = 4;

/// Runs the structure checks over every form over F_2 of dimension at most 4
/// and `samples` random forms of dimension 5 and 6.
pub fn structure_suite(samples: usize) -> Result<Vec<IdentityRow>> {
    let mut jobs: Vec<(FqQuadSpace, bool, u64)> = Vec::new();
    for d in 1..=EXHAUSTIVE_DIM {
        for v in all_forms(2, d) {
            jobs.push((v, true, jobs.len() as u64));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for i in 0..samples {
        let d = if i % 2 == 0 { 5 } else { 6 };
        let v = random_form(2, d, &mut rng);
        jobs.push((v, false, jobs.len() as u64));
    }
    let mut rows = plane_sum_rows();
    rows.extend(flatten(jobs.par_iter().map(|(v, exhaustive, seed)| structure_rows(v, *exhaustive, *seed)).collect())?);
    Ok(rows)
}

fn span_dim(vs: &[Vec<u64>], p: u64) -> usize {
    if vs.is_empty() {
        0
    } else {
        rank(vs, p)
    }
}

fn nonzero_vectors(v: &FqQuadSpace) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for_each_vector(v.dim(), v.p(), |x| {
        if x.iter().any(|&c| c != 0) {
            out.push(x.to_vec());
        }
        true
    });
    out
}

/// `A ⊥ A ≅ H ⊥ H`, both by classification in random bases and by the
/// explicit pair of hyperbolic planes.
fn plane_sum_rows() -> Vec<IdentityRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let aa = FqQuadSpace::anisotropic_plane(2).orthogonal_sum(&FqQuadSpace::anisotropic_plane(2));
    let h2 = WittDecomposition::new(0, 2, Residual::Zero);
    let mut rows = Vec::new();
    for i in 0..20 {
        let w = scramble(&aa, &mut rng);
        rows.push(IdentityRow::new(
            "aniso-pair-is-hyperbolic",
            format!("basis={i} {}", form_label(&w)),
            class_label(&decompose(&w)),
            class_label(&h2),
        ));
    }
    // with normal bases (x,y), (x',y') of the two copies, U = (x+x', y) and U' = (x', y+y')
    let (xx, y, x2, yy) = (vec![1, 0, 1, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 1, 0, 1]);
    let u = aa.restrict(&[xx.clone(), y.clone()]);
    let u2 = aa.restrict(&[x2.clone(), yy.clone()]);
    let both = plane_is_hyperbolic(&u) == Ok(true) && plane_is_hyperbolic(&u2) == Ok(true);
    let orth = [&xx, &y].iter().all(|a| aa.b(a, &x2) == 0 && aa.b(a, &yy) == 0);
    rows.push(IdentityRow::new(
        "aniso-pair-explicit-planes",
        form_label(&aa),
        format!("hyperbolic={both} orthogonal={orth}"),
        "hyperbolic=true orthogonal=true",
    ));
    rows
}

fn structure_rows(v: &FqQuadSpace, exhaustive: bool, seed: u64) -> Result<Vec<IdentityRow>> {
    let p = v.p();
    let n = v.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let class = decompose(v);
    let label = form_label(v);
    let mut rows = Vec::new();
    let row = |rows: &mut Vec<IdentityRow>, id: &'static str, lhs: String, rhs: &str| {
        rows.push(IdentityRow::new(id, label.clone(), lhs, rhs));
    };

    rows.push(IdentityRow::new("witt-dimension", label.clone(), class.dim(), n));

    // adding a hyperbolic plane adds exactly one to the hyperbolic count
    if n <= EXHAUSTIVE_DIM {
        let hv = FqQuadSpace::hyperbolic(p, 1).orthogonal_sum(v);
        rows.push(IdentityRow::new(
            "hyperbolic-cancellation-class",
            label.clone(),
            class_label(&decompose(&hv)),
            class_label(&class.with_hyperbolic(1)?),
        ));
        if class.is_regular() && n.is_multiple_of(2) {
            let av = FqQuadSpace::anisotropic_plane(p).orthogonal_sum(v);
            let flipped = decompose(&av);
            rows.push(IdentityRow::new(
                "aniso-cancellation-class",
                label.clone(),
                format!("regular={} hyperbolic={}", flipped.is_regular(), flipped.is_hyperbolic()),
                format!("regular=true hyperbolic={}", !class.is_hyperbolic()),
            ));
        }
    }

    // two orthogonal vectors never span a regular plane
    if exhaustive {
        let vs = nonzero_vectors(v);
        let mut bad = 0;
        for (i, x) in vs.iter().enumerate() {
            for y in &vs[i + 1..] {
                if v.b(x, y) == 0 && v.restrict(&[x.clone(), y.clone()]).is_regular() {
                    bad += 1;
                }
            }
        }
        row(&mut rows, "orthogonal-pair-not-regular", bad.to_string(), "0");
    }

    if !class.is_regular() {
        return Ok(rows);
    }

    for ell in 0..=MAX_ELL.min(n) {
        let brute = Rational::from_integer(phi_brute(v, ell)?.into());
        rows.push(IdentityRow::exact("isotropic-count-closed-form", format!("{label} l={ell}"), &phi_regular(&class, ell, p), &brute));
    }

    if n == 2 {
        // every normal basis q(x) = B(x,y) = 1 gives the same verdict q(y) ∈ {γ²+γ} = {0}
        let mut verdicts = std::collections::BTreeSet::new();
        let vs = nonzero_vectors(v);
        for x in vs.iter().filter(|x| v.q(x) == 1) {
            for y in vs.iter().filter(|y| v.b(x, y) == 1) {
                verdicts.insert(v.q(y) == 0);
            }
        }
        row(&mut rows, "plane-normal-basis", format!("{verdicts:?}"), &format!("{{{}}}", class.is_hyperbolic()));
    }

    let iso = match find_isotropic(v) {
        Ok(x) => Some(x),
        Err(Error::AnisotropicSpace) => None,
        Err(e) => return Err(e),
    };
    if n >= 3 {
        let ok = iso.as_ref().is_some_and(|x| v.q(x) == 0 && x.iter().any(|&c| c != 0));
        row(&mut rows, "isotropic-vector-exists", ok.to_string(), "true");
    }

    if let Some(x) = &iso {
        let (_, y, comp) = split_hyperbolic(v, x)?;
        let sub = v.restrict(comp.basis());
        let mut all = comp.basis().to_vec();
        all.push(x.clone());
        all.push(y.clone());
        let lhs = format!(
            "q(y)={} B={} codim={} regular={} spans={}",
            v.q(&y),
            v.b(x, &y),
            n - comp.dim(),
            sub.is_regular(),
            span_dim(&all, p) == n
        );
        row(&mut rows, "hyperbolic-plane-splits", lhs, "q(y)=0 B=1 codim=2 regular=true spans=true");

        // the complement of a hyperbolic plane does not depend on the plane
        let expect = class_label(&class.with_hyperbolic(-1)?);
        let other = nonzero_vectors(v).into_iter().rfind(|z| v.q(z) == 0).expect("x is isotropic");
        let (_, _, comp2) = split_hyperbolic(v, &other)?;
        let got = format!(
            "{} {}",
            class_label(&decompose(&sub)),
            class_label(&decompose(&v.restrict(comp2.basis())))
        );
        row(&mut rows, "hyperbolic-cancellation", got, &format!("{expect} {expect}"));

        // the shear u -> u + B(u,z) y carries the complement onto that of (x+z, y)
        if comp.dim() > 0 {
            let coeffs = random_vector(p, comp.dim(), &mut rng);
            let z = linalg::combine(comp.basis(), &coeffs, n, p);
            let mut xz = x.clone();
            linalg::axpy(&mut xz, 1, &z, p);
            let images: Vec<Vec<u64>> = comp.basis().iter().map(|u| shear_isometry(v, &y, &z, u)).collect();
            let isometric = v.restrict(&images) == sub;
            let orth = images.iter().all(|s| v.b(s, &xz) == 0 && v.b(s, &y) == 0);
            let lhs = format!("isometric={isometric} orthogonal={orth} injective={}", span_dim(&images, p) == comp.dim());
            row(&mut rows, "shear-isometry", lhs, "isometric=true orthogonal=true injective=true");
        }

        // anisotropic vectors of an isotropic even-dimensional space
        if n.is_multiple_of(2) {
            let aniso: Vec<Vec<u64>> = nonzero_vectors(v).into_iter().filter(|z| v.q(z) != 0).collect();
            let picks: Vec<&Vec<u64>> = if exhaustive || aniso.len() <= 3 {
                aniso.iter().collect()
            } else {
                (0..3).map(|_| &aniso[rng.gen_range(0..aniso.len())]).collect()
            };
            for a in picks {
                let (w, vp) = anisotropic_split(v, a)?;
                let plane = v.restrict(&[a.clone(), w.clone()]);
                let hyp = plane_is_hyperbolic(&plane) == Ok(true);
                let vp_orth = vp.basis().iter().all(|u| v.b(u, a) == 0 && v.b(u, &w) == 0);
                let perp = v.orthogonal_complement(std::slice::from_ref(a));
                let mut sum = vp.basis().to_vec();
                sum.push(a.clone());
                let sum_space = Subspace::span(p, n, sum.clone());
                let equal = sum_space.dim() == perp.dim() && perp.basis().iter().all(|u| sum_space.contains(u));
                let lhs = format!("hyperbolic={hyp} complement_dim={} orthogonal={vp_orth} perp_split={equal}", vp.dim());
                let rhs = format!("hyperbolic=true complement_dim={} orthogonal=true perp_split=true", n - 2);
                rows.push(IdentityRow::new("aniso-vector-split", format!("{label} v={a:?}"), lhs, rhs));
            }
        }
    }

    // an anisotropic plane splits off with the complementary type
    if n >= 2 {
        if let Some((a, b)) = find_aniso_plane(v, exhaustive, &mut rng) {
            let comp = v.orthogonal_complement(&[a.clone(), b.clone()]);
            let sub = v.restrict(comp.basis());
            let sc = decompose(&sub);
            let lhs = format!("dim={} regular={} hyperbolic={}", sub.dim(), sc.is_regular(), n.is_multiple_of(2) && sc.is_hyperbolic());
            let rhs = format!("dim={} regular=true hyperbolic={}", n - 2, n.is_multiple_of(2) && !class.is_hyperbolic());
            rows.push(IdentityRow::new("aniso-plane-splits", format!("{label} W={a:?},{b:?}"), lhs, rhs));
        }
    }

    // totally isotropic subspaces extend to hyperbolic spaces
    for r in 1..=2.min(n / 2) {
        let list = isotropic_subspaces(v, r, 1 << 16)?;
        let picks: Vec<&Vec<Vec<u64>>> = if exhaustive || list.len() <= 2 {
            list.iter().collect()
        } else {
            (0..2).map(|_| &list[rng.gen_range(0..list.len())]).collect()
        };
        for rb in picks {
            let mate = hyperbolic_mate(v, rb)?;
            let mut all = rb.clone();
            all.extend(mate);
            let got = decompose(&v.restrict(&all));
            rows.push(IdentityRow::new(
                "isotropic-mate",
                format!("{label} R={rb:?}"),
                class_label(&got),
                class_label(&WittDecomposition::new(0, r, Residual::Zero)),
            ));
        }
    }

    // the class of U^⊥ in a regular even-dimensional space
    if n.is_multiple_of(2) {
        for d in 0..=n {
            let u = Subspace::span(p, n, (0..d).map(|_| random_vector(p, n, &mut rng)).collect());
            let got = complement_class(v, &u)?;
            let want = match predicted_complement_class(v, &u) {
                Ok(c) => class_label(&c),
                Err(e) => e.to_string(),
            };
            rows.push(IdentityRow::new("complement-class", format!("{label} U={:?}", u.basis()), class_label(&got), want));
        }
    }
    Ok(rows)
}

fn find_aniso_plane(v: &FqQuadSpace, exhaustive: bool, rng: &mut impl Rng) -> Option<(Vec<u64>, Vec<u64>)> {
    let vs = nonzero_vectors(v);
    let is_aniso = |a: &Vec<u64>, b: &Vec<u64>| {
        let w = v.restrict(&[a.clone(), b.clone()]);
        w.is_regular() && plane_is_hyperbolic(&w) == Ok(false)
    };
    if !exhaustive {
        for _ in 0..64 {
            let a = &vs[rng.gen_range(0..vs.len())];
            let b = &vs[rng.gen_range(0..vs.len())];
            if is_aniso(a, b) {
                return Some((a.clone(), b.clone()));
            }
        }
    }
    for (i, a) in vs.iter().enumerate() {
        for b in &vs[i + 1..] {
            if is_aniso(a, b) {
                return Some((a.clone(), b.clone()));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qanalog::Exact;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::parse(s.name()), Some(s));
        }
        assert_eq!(Suite::parse("nope"), None);
    }

    #[test]
    fn form_enumeration_sizes() {
        assert_eq!(all_forms(2, 2).len(), 8);
        assert_eq!(all_forms(3, 2).len(), 27);
        assert_eq!(form_label(&FqQuadSpace::hyperbolic(2, 1)), "p=2 q=01;0");
    }

    #[test]
    fn scrambled_forms_keep_their_class() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [2, 3, 5] {
            for c in WittDecomposition::all(5, 2) {
                let v = FqQuadSpace::from_class(p, &c);
                assert_eq!(decompose(&scramble(&v, &mut rng)), c);
            }
        }
    }

    #[test]
    fn q_analog_suites_hold() {
        for s in [Suite::QSums, Suite::Auxiliary] {
            let rows = run(s, &Exact).unwrap();
            assert!(rows.len() > 100);
            let bad: Vec<_> = rows.iter().filter(|r| !r.holds()).take(5).collect();
            assert!(bad.is_empty(), "{bad:?}");
        }
    }

    #[test]
    fn structure_small_sample() {
        let rows = structure_suite(40).unwrap();
        let bad: Vec<_> = rows.iter().filter(|r| !r.holds()).take(5).collect();
        assert!(bad.is_empty(), "{bad:?}");
        for id in ["isotropic-mate", "aniso-vector-split", "plane-normal-basis", "complement-class", "shear-isometry"] {
            assert!(rows.iter().any(|r| r.identity == id), "{id}");
        }
    }
}
