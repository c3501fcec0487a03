//! Four alternating q-binomial sums and their closed forms.
//!
//! [`lemma42_sum`] evaluates the defining sums term by term so it can serve as
//! an oracle for [`q_sum_closed`]. Variant `D` is evaluated with the
//! exponent `q(q-1)/2`; the `q(q+1)/2` reading does not match the closed form.

use crate::error::{Error, Result};
use crate::qanalog::{p_pow, sign, Exact, QFunctions, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    A,
    B,
    C,
    D,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Params {
    pub a: Option<i64>,
    pub b: Option<i64>,
    pub m: u32,
    pub y: Option<i64>,
}

impl Params {
    fn need_a(&self) -> Result<i64> {
        self.a.ok_or(Error::MissingParameter("a"))
    }
    fn need_b(&self) -> Result<i64> {
        self.b.ok_or(Error::MissingParameter("b"))
    }
    fn need_y(&self) -> Result<i64> {
        self.y.ok_or(Error::MissingParameter("y"))
    }
}

/// Which auxiliary form of a sum to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// The sum named `S` in the statement.
    Main,
    /// (c): the β-form sum, scaled by μ(m,m). (d): the δ-form sum.
    Alternate,
}

pub fn lemma42_sum(p: u64, variant: Variant, params: Params) -> Result<Rational> {
    q_sum_with(&Exact, p, variant, params, Form::Main)
}

pub fn q_sum_with(
    f: &dyn QFunctions,
    p: u64,
    variant: Variant,
    params: Params,
    form: Form,
) -> Result<Rational> {
    let m = params.m;
    if m == 0 {
        return Err(Error::IndexOutOfRange("m must be positive".into()));
    }
    let mi = m as i64;
    let mut total = Rational::from_integer(0.into());
    match variant {
        Variant::A => {
            let y = params.need_y()?;
            for q in 0..=m {
                let qi = q as i64;
                total += sign(qi) * p_pow(p, qi * (qi - 1) / 2 + qi * y) * f.beta(p, mi, q);
            }
        }
        Variant::B => {
            let (a, y) = (params.need_a()?, params.need_y()?);
            for q in 0..=m {
                let qi = q as i64;
                total += sign(qi)
                    * p_pow(p, qi * (qi + 1) / 2 + qi * (y - mi))
                    * f.delta(p, a - 1 + qi, q)
                    * f.delta(p, a + y, m - q)
                    * f.beta(p, mi, q);
            }
        }
        Variant::C => {
            let (a, y) = (params.need_a()?, params.need_y()?);
            for q in 0..=m {
                let qi = q as i64;
                let w = sign(qi) * p_pow(p, qi * (qi + 1) / 2 + qi * (y - mi));
                total += match form {
                    Form::Main => {
                        w * f.mu(p, a - 1 + qi, q) * f.mu(p, a + y, m - q) * f.beta(p, mi, q)
                    }
                    Form::Alternate => w * f.beta(p, a - 1 + qi, q) * f.beta(p, a + y, m - q),
                };
            }
            if form == Form::Alternate {
                total *= f.mu(p, mi, m);
            }
        }
        Variant::D => {
            let (a, b) = (params.need_a()?, params.need_b()?);
            for q in 0..=m {
                let qi = q as i64;
                let w = sign(qi) * p_pow(p, qi * (qi - 1) / 2) * f.beta(p, mi, q);
                total += match form {
                    Form::Main => w * f.mu(p, a + mi - qi, m - q) * f.mu(p, b, q),
                    Form::Alternate => w * f.delta(p, a + mi - qi, m - q) * f.delta(p, b, q),
                };
            }
        }
    }
    Ok(total)
}

/// The closed form each sum is claimed to equal.
pub fn q_sum_closed(p: u64, variant: Variant, params: Params) -> Result<Rational> {
    let f = Exact;
    let m = params.m;
    let mi = m as i64;
    Ok(match variant {
        Variant::A => sign(mi) * f.mu(p, params.need_y()? + mi - 1, m),
        Variant::B => {
            params.need_a()?;
            sign(mi) * f.mu(p, params.need_y()?, m)
        }
        Variant::C => {
            params.need_a()?;
            f.mu(p, params.need_y()?, m)
        }
        Variant::D => {
            let (a, b) = (params.need_a()?, params.need_b()?);
            sign(mi) * p_pow(p, a * mi + mi * (mi + 1) / 2) * f.mu(p, b - a - 1, m)
        }
    })
}

/// Variant `D` evaluated with the exponent `q(q+1)/2` as it is sometimes
/// printed. Kept so tests can document that this reading is false.
pub fn q_sum_d_plus_reading(p: u64, a: i64, b: i64, m: u32) -> Rational {
    let f = Exact;
    let mi = m as i64;
    (0..=m)
        .map(|q| {
            let qi = q as i64;
            sign(qi)
                * p_pow(p, qi * (qi + 1) / 2)
                * f.mu(p, a + mi - qi, m - q)
                * f.mu(p, b, q)
                * f.beta(p, mi, q)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qanalog::rat;

    #[test]
    fn small_examples() {
        let a = |m, y| Params { m, y: Some(y), ..Default::default() };
        assert_eq!(lemma42_sum(2, Variant::A, a(1, 0)).unwrap(), rat(0));
        assert_eq!(lemma42_sum(3, Variant::A, a(2, 1)).unwrap(), rat(16));
        let d = Params { a: Some(1), b: Some(3), m: 2, y: None };
        // μ(1,2) = (2-1)(1-1) = 0
        assert_eq!(lemma42_sum(2, Variant::D, d).unwrap(), rat(0));
        assert_eq!(q_sum_closed(2, Variant::D, d).unwrap(), rat(0));
    }

    #[test]
    fn missing_parameters() {
        let p = Params { m: 2, ..Default::default() };
        assert_eq!(lemma42_sum(2, Variant::A, p), Err(Error::MissingParameter("y")));
        assert_eq!(
            lemma42_sum(2, Variant::B, Params { y: Some(1), ..p }),
            Err(Error::MissingParameter("a"))
        );
        assert_eq!(
            lemma42_sum(2, Variant::D, Params { a: Some(1), ..p }),
            Err(Error::MissingParameter("b"))
        );
    }
}
