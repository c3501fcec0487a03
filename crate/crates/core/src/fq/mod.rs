//! Quadratic spaces over the prime field F_p, including p = 2.
//!
//! A space stores the coefficients of a quadratic polynomial
//! `q(x) = Σ_{i≤j} c_ij x_i x_j`; the bilinear form is always the polarization
//! `B(x,y) = q(x+y) - q(x) - q(y)`. The same storage serves every prime.

pub mod count;
pub mod linalg;
pub mod structure;
pub mod witt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qanalog::is_prime;
use linalg::{reduce, rref};

pub use count::{isotropic_subspaces, phi_brute, phi_general, phi_of_class, phi_regular, reduction_rhs, ReductionVariant};
pub use witt::{complement_class, decompose, find_isotropic, predicted_complement_class, radical, split_hyperbolic};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FqQuadSpace {
    p: u64,
    dim: usize,
    // upper triangular; entries below the diagonal are always 0
    coeffs: Vec<Vec<u64>>,
}

impl FqQuadSpace {
    /// Builds the form `Σ_{i,j} m_ij x_i x_j` from any square matrix; the lower
    /// triangle is folded onto the upper one.
    pub fn new(p: u64, matrix: &[Vec<i64>]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let dim = matrix.len();
        if matrix.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidMatrix("coefficient matrix is not square".into()));
        }
        let mut coeffs = vec![vec![0u64; dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                coeffs[a][b] = (coeffs[a][b] + reduce(matrix[i][j], p)) % p;
            }
        }
        Ok(FqQuadSpace { p, dim, coeffs })
    }

    /// The form `Q(x)/2` of an even integral Gram matrix, reduced mod p.
    ///
    /// At p = 2 this is the form `Q'`; at odd p it differs from `Q mod p` by the
    /// unit 1/2, which changes neither isotropy nor the Witt class.
    pub fn from_even_gram(p: u64, gram: &[Vec<i64>]) -> Result<Self> {
        let n = gram.len();
        if gram.iter().enumerate().any(|(i, r)| r.len() != n || r[i] % 2 != 0) {
            return Err(Error::InvalidMatrix("Gram matrix must be square with even diagonal".into()));
        }
        let m: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.cmp(&j) {
                        std::cmp::Ordering::Equal => gram[i][i] / 2,
                        std::cmp::Ordering::Less => gram[i][j],
                        std::cmp::Ordering::Greater => 0,
                    })
                    .collect()
            })
            .collect();
        Self::new(p, &m)
    }

    pub fn zero(p: u64, dim: usize) -> Self {
        FqQuadSpace { p, dim, coeffs: vec![vec![0; dim]; dim] }
    }

    /// `H^h`, each plane carrying `x_1 x_2`.
    pub fn hyperbolic(p: u64, h: usize) -> Self {
        let mut s = Self::zero(p, 2 * h);
        for i in 0..h {
            s.coeffs[2 * i][2 * i + 1] = 1;
        }
        s
    }

    /// The anisotropic plane: `x² + xy + y²` at p = 2, `x² - εy²` otherwise.
    pub fn anisotropic_plane(p: u64) -> Self {
        let mut s = Self::zero(p, 2);
        if p == 2 {
            s.coeffs = vec![vec![1, 1], vec![0, 1]];
        } else {
            s.coeffs = vec![vec![1, 0], vec![0, p - linalg::first_nonsquare(p)]];
        }
        s
    }

    /// The regular line `x²`.
    pub fn line(p: u64) -> Self {
        FqQuadSpace { p, dim: 1, coeffs: vec![vec![1]] }
    }

    /// A standard space in the given Witt class.
    pub fn from_class(p: u64, class: &WittDecomposition) -> Self {
        let mut s = Self::zero(p, class.rad_dim).orthogonal_sum(&Self::hyperbolic(p, class.hyp_count));
        match class.residual {
            Residual::Zero => {}
            Residual::Line => s = s.orthogonal_sum(&Self::line(p)),
            Residual::AnisoPlane => s = s.orthogonal_sum(&Self::anisotropic_plane(p)),
        }
        s
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, i: usize, j: usize) -> u64 {
        if i <= j {
            self.coeffs[i][j]
        } else {
            0
        }
    }

    pub fn q(&self, x: &[u64]) -> u64 {
        let p = self.p;
        let mut acc = 0;
        for i in 0..self.dim {
            if x[i] == 0 {
                continue;
            }
            let mut row = 0;
            for j in i..self.dim {
                row = (row + self.coeffs[i][j] * x[j]) % p;
            }
            acc = (acc + x[i] * row) % p;
        }
        acc
    }

    /// Matrix of the polarization B: `M_ii = 2c_ii`, `M_ij = c_ij`.
    pub fn bilinear_matrix(&self) -> Vec<Vec<u64>> {
        let p = self.p;
        let mut m = vec![vec![0; self.dim]; self.dim];
        for i in 0..self.dim {
            m[i][i] = 2 * self.coeffs[i][i] % p;
            for j in i + 1..self.dim {
                m[i][j] = self.coeffs[i][j];
                m[j][i] = self.coeffs[i][j];
            }
        }
        m
    }

    pub fn b(&self, x: &[u64], y: &[u64]) -> u64 {
        let p = self.p;
        let mut acc = 0;
        for i in 0..self.dim {
            if x[i] == 0 {
                continue;
            }
            let mut row = 2 * self.coeffs[i][i] * y[i];
            for j in 0..self.dim {
                if j < i {
                    row += self.coeffs[j][i] * y[j];
                } else if j > i {
                    row += self.coeffs[i][j] * y[j];
                }
            }
            acc = (acc + x[i] * (row % p)) % p;
        }
        acc
    }

    /// The form pulled back along `basis` (vectors in this space's coordinates).
    pub fn restrict(&self, basis: &[Vec<u64>]) -> Self {
        let p = self.p;
        let d = basis.len();
        let mut coeffs = vec![vec![0; d]; d];
        for i in 0..d {
            coeffs[i][i] = self.q(&basis[i]);
            for j in i + 1..d {
                coeffs[i][j] = self.b(&basis[i], &basis[j]);
            }
        }
        FqQuadSpace { p, dim: d, coeffs }
    }

    pub fn orthogonal_sum(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "orthogonal sum of spaces over different fields");
        let d = self.dim + other.dim;
        let mut coeffs = vec![vec![0; d]; d];
        for i in 0..self.dim {
            coeffs[i][i..self.dim].copy_from_slice(&self.coeffs[i][i..]);
        }
        for i in 0..other.dim {
            let o = self.dim;
            coeffs[o + i][o + i..].copy_from_slice(&other.coeffs[i][i..]);
        }
        FqQuadSpace { p: self.p, dim: d, coeffs }
    }

    pub fn is_regular(&self) -> bool {
        radical(self).dim() == 0
    }

    /// Whether every vector of the span of `basis` has q = 0.
    pub fn is_totally_isotropic(&self, basis: &[Vec<u64>]) -> bool {
        basis.iter().enumerate().all(|(i, u)| {
            self.q(u) == 0 && basis[i + 1..].iter().all(|v| self.b(u, v) == 0)
        })
    }

    /// Basis of `{x : B(x, s) = 0 for all s in basis}`.
    pub fn orthogonal_complement(&self, basis: &[Vec<u64>]) -> Subspace {
        let m = self.bilinear_matrix();
        let rows: Vec<Vec<u64>> = basis
            .iter()
            .map(|s| (0..self.dim).map(|j| (0..self.dim).map(|i| s[i] * m[i][j]).sum::<u64>() % self.p).collect())
            .collect();
        Subspace::span(self.p, self.dim, linalg::kernel(&rows, self.dim, self.p))
    }
}

/// A subspace of F_p^n, held by its reduced row echelon basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    p: u64,
    ambient_dim: usize,
    basis: Vec<Vec<u64>>,
}

impl Subspace {
    pub fn span(p: u64, ambient_dim: usize, vectors: Vec<Vec<u64>>) -> Self {
        let mut basis: Vec<Vec<u64>> = vectors.into_iter().map(|v| v.into_iter().map(|x| x % p).collect()).collect();
        if !basis.is_empty() {
            rref(&mut basis, p);
        }
        Subspace { p, ambient_dim, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        linalg::coordinates(&self.basis, v, self.p).is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Residual {
    Zero,
    Line,
    AnisoPlane,
}

impl Residual {
    pub fn dim(self) -> usize {
        match self {
            Residual::Zero => 0,
            Residual::Line => 1,
            Residual::AnisoPlane => 2,
        }
    }
}

/// `V ≅ rad ⊥ H^hyp_count ⊥ residual`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WittDecomposition {
    pub rad_dim: usize,
    pub hyp_count: usize,
    pub residual: Residual,
}

impl WittDecomposition {
    pub fn new(rad_dim: usize, hyp_count: usize, residual: Residual) -> Self {
        WittDecomposition { rad_dim, hyp_count, residual }
    }

    pub fn dim(&self) -> usize {
        self.rad_dim + 2 * self.hyp_count + self.residual.dim()
    }

    pub fn is_regular(&self) -> bool {
        self.rad_dim == 0
    }

    /// Regular, even dimensional and with no anisotropic residue.
    pub fn is_hyperbolic(&self) -> bool {
        self.rad_dim == 0 && self.residual == Residual::Zero
    }

    /// The class of `V ⊥ H^t`; negative `t` cancels planes and is defined only
    /// when enough of them are present.
    pub fn with_hyperbolic(&self, t: i64) -> Result<Self> {
        let h = self.hyp_count as i64 + t;
        if h < 0 {
            return Err(Error::UndefinedComposition(format!(
                "cannot cancel {} hyperbolic planes from {:?}",
                -t, self
            )));
        }
        Ok(WittDecomposition { hyp_count: h as usize, ..*self })
    }

    /// The class of `V ⊥ A`, using `A ⊥ A ≅ H ⊥ H` and `line ⊥ A ≅ H ⊥ line`.
    pub fn with_aniso(&self) -> Self {
        match self.residual {
            Residual::Zero => WittDecomposition { residual: Residual::AnisoPlane, ..*self },
            Residual::AnisoPlane => WittDecomposition { hyp_count: self.hyp_count + 2, residual: Residual::Zero, ..*self },
            Residual::Line => WittDecomposition { hyp_count: self.hyp_count + 1, ..*self },
        }
    }

    /// Every class of dimension at most `max_dim` with radical at most `max_rad`.
    pub fn all(max_dim: usize, max_rad: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for rad_dim in 0..=max_rad.min(max_dim) {
            for hyp_count in 0..=max_dim / 2 {
                for residual in [Residual::Zero, Residual::Line, Residual::AnisoPlane] {
                    let c = WittDecomposition { rad_dim, hyp_count, residual };
                    if c.dim() <= max_dim {
                        out.push(c);
                    }
                }
            }
        }
        out
    }
}
