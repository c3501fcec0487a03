//! The q-analog products δ, μ, β evaluated exactly at a concrete prime.
//!
//! All three accept any integer `m`; negative arguments produce factors like
//! `p^{-2} - 1`, so values are rationals.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `p^e` for any integer exponent.
pub fn p_pow(p: u64, e: i64) -> Rational {
    let base = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from_integer(base)
    } else {
        Rational::new(BigInt::one(), base)
    }
}

/// `(-1)^e`
pub fn sign(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        rat(1)
    } else {
        rat(-1)
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Delta,
    Mu,
    Beta,
}

type Cache = Mutex<HashMap<(Kind, u64, i64, u32), Rational>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn memo(kind: Kind, p: u64, m: i64, r: u32, f: impl FnOnce() -> Rational) -> Rational {
    let key = (kind, p, m, r);
    if let Some(v) = cache().lock().expect("q-analog cache poisoned").get(&key) {
        return v.clone();
    }
    let v = f();
    cache()
        .lock()
        .expect("q-analog cache poisoned")
        .insert(key, v.clone());
    v
}

fn product(p: u64, m: i64, r: u32, shift: i64) -> Rational {
    (0..r as i64).fold(rat(1), |acc, i| acc * (p_pow(p, m - i) + rat(shift)))
}

/// δ(m,r) = ∏_{i<r} (p^{m-i} + 1)
pub fn delta(p: u64, m: i64, r: u32) -> Rational {
    memo(Kind::Delta, p, m, r, || product(p, m, r, 1))
}

/// μ(m,r) = ∏_{i<r} (p^{m-i} - 1)
pub fn mu(p: u64, m: i64, r: u32) -> Rational {
    memo(Kind::Mu, p, m, r, || product(p, m, r, -1))
}

/// β(m,r) = μ(m,r)/μ(r,r); the Gaussian binomial when 0 ≤ r ≤ m.
pub fn beta(p: u64, m: i64, r: u32) -> Rational {
    memo(Kind::Beta, p, m, r, || product(p, m, r, -1) / product(p, r as i64, r, -1))
}

/// Like [`beta`] but with a signed lower index; negative `r` gives 0.
pub fn beta_i(p: u64, m: i64, r: i64) -> Rational {
    if r < 0 {
        Rational::zero()
    } else {
        beta(p, m, r as u32)
    }
}

pub fn delta_i(p: u64, m: i64, r: i64) -> Rational {
    if r < 0 {
        Rational::zero()
    } else {
        delta(p, m, r as u32)
    }
}

pub fn mu_i(p: u64, m: i64, r: i64) -> Rational {
    if r < 0 {
        Rational::zero()
    } else {
        mu(p, m, r as u32)
    }
}

/// Access to δ/μ/β through a trait object so that verification harnesses can
/// be pointed at an alternative (for instance deliberately broken) implementation.
pub trait QFunctions: Sync {
    fn delta(&self, p: u64, m: i64, r: u32) -> Rational;
    fn mu(&self, p: u64, m: i64, r: u32) -> Rational;
    fn beta(&self, p: u64, m: i64, r: u32) -> Rational;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Exact;

impl QFunctions for Exact {
    fn delta(&self, p: u64, m: i64, r: u32) -> Rational {
        delta(p, m, r)
    }
    fn mu(&self, p: u64, m: i64, r: u32) -> Rational {
        mu(p, m, r)
    }
    fn beta(&self, p: u64, m: i64, r: u32) -> Rational {
        beta(p, m, r)
    }
}

/// Renders a rational as `num/den`, or just `num` when integral.
pub fn fmt_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("bad rational `{s}`: {e}")))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Rational::new(parse_int(n)?, d))
        }
    }
}

/// Exact conversion of an integral rational to i128, if it fits.
pub fn to_i128(x: &Rational) -> Option<i128> {
    if !x.is_integer() {
        return None;
    }
    let n = x.numer();
    if n.abs() > BigInt::from(i128::MAX) {
        return None;
    }
    n.to_string().parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn spot_values() {
        assert_eq!(delta(3, 2, 0), rat(1));
        assert_eq!(delta(2, 3, 1), rat(9));
        assert_eq!(delta(3, 1, 2), rat(8));
        assert_eq!(mu(2, 0, 1), rat(0));
        assert_eq!(mu(3, 4, 2), rat(2080));
        assert_eq!(mu(2, -1, 1), r(-1, 2));
        assert_eq!(beta(3, 4, 2), rat(130));
        assert_eq!(beta(5, 1, 2), rat(0));
    }

    #[test]
    fn negative_arguments_are_exact() {
        // (2^-1 + 1)(2^-2 + 1) = 3/2 * 5/4
        assert_eq!(delta(2, -1, 2), r(15, 8));
        assert_eq!(beta(3, -1, 1), r(-2, 3) / rat(2));
    }

    #[test]
    fn rational_round_trip() {
        for s in ["0", "-7", "3/4", "-15/8"] {
            assert_eq!(fmt_rational(&parse_rational(s).unwrap()), s);
        }
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
