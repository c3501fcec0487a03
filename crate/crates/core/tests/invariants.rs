use proptest::prelude::*;
use theta_hecke::fq::witt::decompose;
use theta_hecke::hecke::{self, OpKind};
use theta_hecke::lattice::enumerate::count_representations;
use theta_hecke::lattice::gram_class::{canonicalize, enumerate_classes};
use theta_hecke::lattice::intmat::{congruent, format_matrix, identity, parse_matrix, IMat};
use theta_hecke::lattice::{character_at, mod_p_space, named, IntegralLattice, ThetaSeries};
use theta_hecke::{CoefficientSource, FourierMap, Rational};

/// Elementary column operations: (i, j, c, kind) with kind 0 add, 1 swap, 2 negate.
fn unimodular(n: usize, ops: &[(usize, usize, i64, u8)]) -> IMat {
    let mut u = identity(n);
    for &(i, j, c, kind) in ops {
        let (i, j) = (i % n, j % n);
        match kind {
            0 if i != j => (0..n).for_each(|r| u[r][j] += c * u[r][i]),
            1 => (0..n).for_each(|r| u[r].swap(i, j)),
            _ => (0..n).for_each(|r| u[r][i] = -u[r][i]),
        }
    }
    u
}

fn ops() -> impl Strategy<Value = Vec<(usize, usize, i64, u8)>> {
    prop::collection::vec((0usize..8, 0usize..8, -2i64..=2, 0u8..3), 0..16)
}

fn small_classes() -> Vec<IMat> {
    let mut v: Vec<IMat> = Vec::new();
    for (n, b) in [(1, 6), (2, 6), (3, 4)] {
        v.extend(enumerate_classes(n, b).into_iter().map(|c| c.rep().clone()));
    }
    v
}

fn lattices() -> Vec<IntegralLattice> {
    ["A2", "diag22", "D4", "A1A1A2"].iter().map(|n| named(n).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_a_class_invariant(idx in 0usize..1000, ops in ops()) {
        let classes = small_classes();
        let t = &classes[idx % classes.len()];
        let c = canonicalize(t).unwrap();
        let moved = congruent(t, &unimodular(t.len(), &ops));
        prop_assert_eq!(canonicalize(&moved).unwrap(), c.clone());
        prop_assert_eq!(canonicalize(c.rep()).unwrap(), c);
    }

    #[test]
    fn representation_numbers_are_class_invariant(li in 0usize..4, idx in 0usize..1000, ops in ops()) {
        let l = &lattices()[li];
        let ts: Vec<IMat> = enumerate_classes(2, 6).into_iter().map(|c| c.rep().clone()).collect();
        let t = &ts[idx % ts.len()];
        let moved = congruent(t, &unimodular(2, &ops));
        prop_assert_eq!(count_representations(l.gram(), t), count_representations(l.gram(), &moved));
    }

    #[test]
    fn lattice_invariants_survive_base_change(li in 0usize..4, ops in ops()) {
        let l = &lattices()[li];
        let m = l.transformed(&unimodular(l.rank(), &ops)).unwrap();
        for p in [3u64, 5, 7] {
            if l.level().is_multiple_of(p) {
                continue;
            }
            prop_assert_eq!(character_at(l, p).unwrap(), character_at(&m, p).unwrap());
            prop_assert_eq!(decompose(&mod_p_space(l, p).unwrap()), decompose(&mod_p_space(&m, p).unwrap()));
        }
        prop_assert_eq!(l.det(), m.det());
        prop_assert_eq!(l.level(), m.level());
    }

    #[test]
    fn matrix_text_round_trips(entries in prop::collection::vec(-50i64..50, 1..=16)) {
        let n = (entries.len() as f64).sqrt() as usize;
        let m: IMat = (0..n).map(|i| entries[i * n..(i + 1) * n].to_vec()).collect();
        prop_assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
    }
}

fn random_map(n: usize, bound: i64, meta: &theta_hecke::SeriesMeta, vals: &[i64]) -> FourierMap {
    let classes = enumerate_classes(n, bound);
    let entries = classes.into_iter().enumerate().map(|(i, c)| (c, Rational::new(vals[i % vals.len()].into(), (1 + i as i64 % 3).into())));
    FourierMap::from_entries(n, meta.clone(), bound, entries)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn operators_are_linear(
        f in prop::collection::vec(-9i64..9, 1..12),
        g in prop::collection::vec(-9i64..9, 1..12),
        a in -3i64..=3,
        b in 1i64..=4,
        n in 1usize..=2,
    ) {
        let meta = ThetaSeries::new(&named("D4").unwrap(), n).meta();
        let p = 3;
        let out = 2;
        let bound = 9 * out;
        let (fm, gm) = (random_map(n, bound, &meta, &f), random_map(n, bound, &meta, &g));
        let (ra, rb) = (Rational::from_integer(a.into()), Rational::new(1.into(), b.into()));
        let combo = fm.scaled(&ra).add_scaled(&gm, &rb).unwrap();
        let mut kinds = vec![OpKind::Tp, OpKind::TpSquared];
        for j in 1..=n {
            kinds.push(OpKind::Ttilde(j));
            kinds.push(OpKind::Tprime(j));
        }
        for kind in kinds {
            let lhs = hecke::apply(&combo, p, kind, out).unwrap();
            let rhs = hecke::apply(&fm, p, kind, out).unwrap().scaled(&ra)
                .add_scaled(&hecke::apply(&gm, p, kind, out).unwrap(), &rb).unwrap();
            prop_assert!(lhs.agrees_with(&rhs), "{kind:?}");
        }
    }
}

#[test]
fn fourier_json_round_trips() {
    let th = ThetaSeries::new(&named("D4").unwrap(), 2);
    let m = FourierMap::materialise(&th, 6).unwrap().with_p_context(3);
    let back = FourierMap::from_json(&m.to_json()).unwrap();
    assert_eq!(back, m);
    assert_eq!(back.to_json(), m.to_json());
}

#[test]
fn theta_matches_known_counts() {
    // r(E8, 2) = 240 and r(D4, 2) = 24
    let e8 = ThetaSeries::new(&named("E8").unwrap(), 1);
    let d4 = ThetaSeries::new(&named("D4").unwrap(), 1);
    assert_eq!(e8.count(&vec![vec![2]]).unwrap(), 240);
    assert_eq!(e8.count(&vec![vec![4]]).unwrap(), 2160);
    assert_eq!(d4.count(&vec![vec![2]]).unwrap(), 24);
    assert_eq!(d4.count(&vec![vec![4]]).unwrap(), 24);
    // degree two: pairs of roots with inner product 1 in A2
    let a2 = ThetaSeries::new(&named("A2").unwrap(), 2);
    assert_eq!(a2.count(&vec![vec![2, 1], vec![1, 2]]).unwrap(), 12);
}

#[test]
fn from_json_rejects_garbage() {
    for bad in ["", "{}", "[1,2]", r#"{"n":1,"k":2,"trace_bound":2,"records":[{"class_gram":[[3]],"coefficient":"1/1"}]}"#] {
        assert!(FourierMap::from_json(bad).is_err(), "{bad}");
    }
}
