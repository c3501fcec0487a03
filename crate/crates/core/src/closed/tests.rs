use super::verify::*;
use super::*;
use crate::fq::Residual;
use crate::hecke::{self, SquareRoute};
use crate::lattice::{named, ThetaSeries};
use crate::qanalog::rat;

fn ctx(k: usize, n: usize, p: u64, chi: i8) -> FormulaContext {
    FormulaContext { k, n, p, chi }
}

fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

#[test]
fn eigenvalue_arithmetic() {
    // λ_1(9) for weight 2, degree 1: 3·β(1,1)·δ(1,1) = 3·1·4
    assert_eq!(eigenvalue_lambda_j(3, 2, 1, 1, 1).unwrap(), rat(12));
    assert_eq!(eigenvalue_tp(2, 4, 1), rat(9));
    assert_eq!(eigenvalue_tp_squared(3, 2, 1, 1), rat(16));
    for n in 1..=2 {
        assert_eq!(eigenvalue_tp_squared(2, 1, n, -1), rat(0));
    }
    // j = 2 > k = 1 with χ = +1 is outside the range
    assert!(matches!(eigenvalue_lambda_j(5, 1, 2, 2, 1), Err(Error::IndexOutOfRange(_))));
    assert!(matches!(eigenvalue_lambda_j(2, 1, 1, 1, -1), Err(Error::IndexOutOfRange(_))));
    assert_eq!(max_neighbor_index(2, 1), 2);
    assert_eq!(max_neighbor_index(2, -1), 1);
}

#[test]
fn neighbor_closed_form_trivial_profile() {
    // r0 = j leaves only the ℓ = 0 term, which is 1
    for (k, chi) in [(2, 1), (3, -1)] {
        for j in 0..=max_neighbor_index(k, chi) {
            let key = ProfileKey { r0: j, r1: 0, r2: 1, class: WittDecomposition::new(0, 0, Residual::Zero) };
            assert_eq!(b_j_closed(&key, &ctx(k, j + 1, 3, chi), j).unwrap(), rat(1));
        }
    }
    let key = ProfileKey { r0: 2, r1: 0, r2: 0, class: WittDecomposition::new(0, 0, Residual::Zero) };
    assert_eq!(b_j_closed(&key, &ctx(2, 2, 3, 1), 1).unwrap(), rat(0));
    assert!(b_j_closed(&key, &ctx(2, 2, 3, 1), 3).is_err());
}

#[test]
fn e_prime_readings_agree_below_two() {
    // the readings differ only through t(t±1)/2, so they agree when j - r0 = 0
    let key = ProfileKey { r0: 1, r1: 1, r2: 0, class: WittDecomposition::new(0, 0, Residual::Line) };
    let c = ctx(2, 2, 3, 1);
    assert_eq!(c_tilde_closed(&key, &c, 1, EPrimeVariant::Plus), c_tilde_closed(&key, &c, 1, EPrimeVariant::Minus));
}

#[test]
fn profiles_of_simple_frames() {
    let l = named("diag22").unwrap();
    let p = 5;
    let whole = omega_profile(&l, &vec![vec![5, 0], vec![0, 5]], p).unwrap();
    assert_eq!((whole.r0, whole.r1, whole.r2), (0, 2, 0));
    assert_eq!(whole.key().class, decompose(&FqQuadSpace::from_even_gram(p, l.gram()).unwrap()));
    let scaled = omega_profile(&l, &vec![vec![25, 0], vec![0, 25]], p).unwrap();
    assert_eq!((scaled.r0, scaled.r1, scaled.r2), (0, 0, 2));
    // (3,4)/5 has norm 2 in diag(2,2)
    let short = omega_profile(&l, &vec![vec![3], vec![4]], p).unwrap();
    assert_eq!((short.r0, short.r1, short.r2), (1, 0, 0));
    let via_rational = omega_profile_rational(&l, &[vec![frac(3, 5), frac(4, 5)]], p).unwrap();
    assert_eq!(via_rational.key(), short.key());
    assert!(matches!(omega_profile_rational(&l, &[vec![frac(1, 25), rat(0)]], p), Err(Error::NotInOverlattice)));
    assert!(matches!(omega_profile(&l, &vec![vec![1], vec![0]], p), Err(Error::InvalidMatrix(_))));
}

#[test]
fn ttilde_closed_form_picks_minus_reading() {
    // χ(5) = +1: the zero class has r2 = 1 and t = 1 separates the readings
    let l = named("diag22").unwrap();
    let r = verify_ttilde_closed(&l, 5, 1, 1, 4).unwrap();
    assert!(r.ok, "{:?}", r.notes);
    assert_eq!(r.e_prime_variant.as_deref(), Some(EPrimeVariant::Minus.label()));
    assert!(r.notes.iter().any(|n| n.contains("t(t+1)/2: fails")), "{:?}", r.notes);
}

#[test]
fn neighbour_sum_degree_one() {
    let l = named("diag22").unwrap();
    let r = verify_neighbor_closed(&l, 5, 1, 1, 4).unwrap();
    assert!(r.ok);
    assert!(r.mismatches().next().is_none());
}

#[test]
fn character_signed_expansion_matches_square() {
    // for χ(p) = +1 the sign χ(p)^{n-j} reproduces T(p)², (-1)^{n-j} does not
    let l = named("diag22").unwrap();
    let th = ThetaSeries::new(&l, 2);
    let iterated = hecke::apply_tp_squared(&th, 5, 4, SquareRoute::Iterated).unwrap();
    let signed = hecke::apply_tp_squared(&th, 5, 4, SquareRoute::CharacterSigned).unwrap();
    let plain = hecke::apply_tp_squared(&th, 5, 4, SquareRoute::Expansion).unwrap();
    assert!(iterated.agrees_with(&signed));
    assert!(!iterated.agrees_with(&plain));
}

#[test]
fn genus_series_rejects_mixed_genera() {
    let g = [(named("diag22").unwrap(), rat(1)), (named("A2").unwrap(), rat(1))];
    assert!(matches!(GenusSeries::new(&g, 1), Err(Error::MixedGenus(_))));
}

#[test]
fn report_json_is_stable() {
    let l = named("A2").unwrap();
    let r = verify_vanishing(&l, 2, 1, 1, 4).unwrap();
    assert!(r.ok);
    assert_eq!(r.to_json(), verify_vanishing(&l, 2, 1, 1, 4).unwrap().to_json());
    assert!(r.to_json().contains("\"anchor\""));
}
