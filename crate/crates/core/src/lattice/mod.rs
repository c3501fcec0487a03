//! Even positive definite lattices, their theta series and the classes of
//! even semidefinite forms that index Fourier coefficients.

pub mod enumerate;
pub mod gram_class;
pub mod intmat;
pub mod theta;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::fq::{decompose, FqQuadSpace, Residual};
use crate::qanalog::{is_prime, Rational};
pub use enumerate::{count_representations, short_vectors, Shells};
pub use gram_class::{aut_order, canonicalize, enumerate_classes, GramClass};
use intmat::IMat;
pub use theta::{theta_coefficients, ThetaSeries};

/// An even integral positive definite lattice of rank 2k, given by its Gram
/// matrix `A` (so `Q(x) = xᵗAx`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralLattice {
    gram: IMat,
    level: u64,
    det: i64,
}

impl IntegralLattice {
    pub fn new(gram: IMat) -> Result<Self> {
        if gram.is_empty() || !intmat::is_even_symmetric(&gram) {
            return Err(Error::InvalidMatrix("Gram matrix must be symmetric with even diagonal".into()));
        }
        if !gram.len().is_multiple_of(2) {
            return Err(Error::InvalidMatrix(format!("rank {} is odd", gram.len())));
        }
        if !intmat::is_positive_definite(&gram) {
            return Err(Error::InvalidMatrix("Gram matrix is not positive definite".into()));
        }
        let det = i64::try_from(intmat::det(&gram)).map_err(|_| Error::InvalidMatrix("determinant overflows i64".into()))?;
        let level = compute_level(&gram).ok_or_else(|| Error::InvalidMatrix("level overflows u64".into()))?;
        Ok(IntegralLattice { gram, level, det })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(intmat::parse_matrix(text)?)
    }

    pub fn gram(&self) -> &IMat {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    /// Half the rank; also the weight of the theta series.
    pub fn k(&self) -> usize {
        self.gram.len() / 2
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn det(&self) -> i64 {
        self.det
    }

    /// `(-1)^k det A`, the discriminant of the quadratic character.
    pub fn character_discriminant(&self) -> i64 {
        if self.k().is_multiple_of(2) {
            self.det
        } else {
            -self.det
        }
    }

    /// The same lattice in another basis, `ᵗG A G`.
    pub fn transformed(&self, g: &IMat) -> Result<Self> {
        Self::new(intmat::congruent(&self.gram, g))
    }

    pub fn orthogonal_sum(&self, other: &Self) -> Result<Self> {
        let n = self.rank() + other.rank();
        let mut g = intmat::zeros(n, n);
        for i in 0..self.rank() {
            g[i][..self.rank()].copy_from_slice(&self.gram[i]);
        }
        for i in 0..other.rank() {
            g[self.rank() + i][self.rank()..].copy_from_slice(&other.gram[i]);
        }
        Self::new(g)
    }
}

/// Smallest N with N·A⁻¹ integral and of even diagonal.
fn compute_level(gram: &IMat) -> Option<u64> {
    let inv = intmat::inverse_rational(gram).expect("positive definite matrices are invertible");
    let n = gram.len();
    let mut level = BigInt::one();
    for i in 0..n {
        for j in 0..n {
            let x: Rational = if i == j { &inv[i][j] / Rational::from_integer(2.into()) } else { inv[i][j].clone() };
            level = level.lcm(x.denom());
        }
    }
    level.to_u64()
}

pub fn level(l: &IntegralLattice) -> u64 {
    l.level()
}

/// `L/pL` with the induced form (Q/2 mod p).
pub fn mod_p_space(l: &IntegralLattice, p: u64) -> Result<FqQuadSpace> {
    FqQuadSpace::from_even_gram(p, l.gram())
}

/// χ(p) = +1 iff L/pL is hyperbolic.
pub fn character_at(l: &IntegralLattice, p: u64) -> Result<i8> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if l.level().is_multiple_of(p) {
        return Err(Error::DividesLevel { p, level: l.level() });
    }
    let c = decompose(&mod_p_space(l, p)?);
    Ok(if c.rad_dim == 0 && c.hyp_count == l.k() && c.residual == Residual::Zero { 1 } else { -1 })
}

/// Kronecker symbol (a/p) for a prime p.
pub fn kronecker(a: i64, p: u64) -> i8 {
    if p == 2 {
        return match a.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        0
    } else if crate::fq::linalg::is_square(r, p) {
        1
    } else {
        -1
    }
}

pub fn e8_gram() -> IMat {
    // Cartan matrix of E8 (Bourbaki labelling)
    let mut g = intmat::zeros(8, 8);
    for i in 0..8 {
        g[i][i] = 2;
    }
    let edges = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)];
    for (a, b) in edges {
        g[a][b] = -1;
        g[b][a] = -1;
    }
    g
}

pub fn d4_gram() -> IMat {
    vec![vec![2, -1, 0, 0], vec![-1, 2, -1, -1], vec![0, -1, 2, 0], vec![0, -1, 0, 2]]
}

pub fn a2_gram() -> IMat {
    vec![vec![2, 1], vec![1, 2]]
}

pub fn diag_gram(entries: &[i64]) -> IMat {
    let n = entries.len();
    (0..n).map(|i| (0..n).map(|j| if i == j { entries[i] } else { 0 }).collect()).collect()
}

/// Named lattices used throughout the tests and the CLI.
pub fn named(name: &str) -> Option<IntegralLattice> {
    let g = match name {
        "E8" | "e8" => e8_gram(),
        "D4" | "d4" => d4_gram(),
        "A2" | "a2" => a2_gram(),
        "A1A1" | "diag22" => diag_gram(&[2, 2]),
        "A1A1A2" => {
            let mut g = diag_gram(&[2, 2, 2, 2]);
            g[2][3] = 1;
            g[3][2] = 1;
            g
        }
        _ => return None,
    };
    IntegralLattice::new(g).ok()
}

pub fn abs_det(l: &IntegralLattice) -> i64 {
    l.det().abs()
}
