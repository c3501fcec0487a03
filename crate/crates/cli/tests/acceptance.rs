//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion.
//!
//! Two sub-checks are known to be false for diag(2,2) at p = 5 (χ = +1, k = 1,
//! degree 2): the vanishing of T'_2(25) and the T~ recursion above the isotropic
//! range. They are reported as FAIL. The test pins them to the measured
//! counterexample (θ|T'_2(25) = 12/25·θ) so a change in either direction is noticed.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use theta_hecke::closed::verify::{
    verify_commutation, verify_eigenform, verify_operator_identity, verify_ttilde_closed, verify_vanishing, EigenMode,
    Report,
};
use theta_hecke::closed::eigenvalue_lambda_j;
use theta_hecke::hecke::{self, OperatorIdentity};
use theta_hecke::identities::{self, Suite, STRUCTURE_SAMPLES};
use theta_hecke::lattice::gram_class::{canonicalize, enumerate_classes};
use theta_hecke::lattice::intmat::{congruent, format_matrix, identity, IMat};
use theta_hecke::lattice::{character_at, named, IntegralLattice, ThetaSeries};
use theta_hecke::qanalog::{rat, Exact};
use theta_hecke::Rational;

struct Check {
    label: String,
    ok: bool,
    /// Verdict established by analysis; differs from `true` only for the known counterexamples.
    expected: bool,
}

type Plan = (usize, &'static str, Duration, fn() -> Vec<Check>);

struct Criterion {
    id: usize,
    title: &'static str,
    budget: Duration,
    checks: Vec<Check>,
    elapsed: Duration,
}

impl Criterion {
    fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.ok) && self.elapsed <= self.budget
    }
}

fn check(label: impl Into<String>, ok: bool) -> Check {
    Check { label: label.into(), ok, expected: true }
}

fn known_false(label: impl Into<String>, ok: bool) -> Check {
    Check { label: label.into(), ok, expected: false }
}

fn lattice(name: &str) -> IntegralLattice {
    named(name).unwrap()
}

fn report_check(label: String, r: &Report) -> Check {
    let bad = r.mismatches().count();
    check(format!("{label}: {} classes, {bad} mismatches", r.rows.len()), r.ok)
}

fn suite(s: Suite) -> Vec<Check> {
    let rows = identities::run(s, &Exact).unwrap();
    let bad = rows.iter().filter(|r| !r.holds()).count();
    vec![check(format!("{}: {} rows, {bad} violations", s.name(), rows.len()), bad == 0 && !rows.is_empty())]
}

fn phi_count() -> Vec<Check> {
    suite(Suite::Phi)
}

fn q_identities() -> Vec<Check> {
    let mut out = suite(Suite::QSums);
    out.extend(suite(Suite::Auxiliary));
    out
}

fn reduction() -> Vec<Check> {
    suite(Suite::Reduction)
}

fn structure() -> Vec<Check> {
    let rows = identities::structure_suite(STRUCTURE_SAMPLES).unwrap();
    let bad = rows.iter().filter(|r| !r.holds()).count();
    vec![check(format!("structure: {} rows ({STRUCTURE_SAMPLES} random spaces), {bad} violations", rows.len()), bad == 0)]
}

fn dual_path() -> Vec<Check> {
    let mut out = Vec::new();
    for name in ["diag22", "D4"] {
        let l = lattice(name);
        for p in [3, 5] {
            for n in 1..=2 {
                for j in 1..=n {
                    let r = verify_ttilde_closed(&l, p, n, j, 8).unwrap();
                    let variant = r.e_prime_variant.clone().unwrap_or_default();
                    let label = format!("{name} p={p} n={n} j={j} E'={variant} [{}]", r.notes.join("; "));
                    out.push(report_check(label, &r));
                }
            }
        }
    }
    out
}

fn commutation() -> Vec<Check> {
    let mut out = Vec::new();
    let mut cases = vec![("diag22", 5, 1, 1), ("diag22", 5, 2, 1)];
    for n in 1..=2 {
        for j in 1..=n {
            cases.push(("D4", 3, n, j));
        }
    }
    let mixed = lattice("A1A1A2");
    let chi = character_at(&mixed, 5).unwrap();
    out.push(check(format!("diag(2,2)+A2 at p=5: chi = {chi}, k = {}", mixed.k()), chi == -1 && mixed.k() == 2));
    cases.push(("A1A1A2", 5, 1, 1));
    for (name, p, n, j) in cases {
        let r = verify_commutation(&lattice(name), p, j, n, 4).unwrap();
        out.push(report_check(format!("{name} p={p} n={n} j={j}"), &r));
    }
    out
}

fn eigen_tprime() -> Vec<Check> {
    let d4 = lattice("D4");
    let mut out = vec![check("lambda_1(9) = 12 at k=2 n=1", eigenvalue_lambda_j(3, 2, 1, 1, 1).unwrap() == rat(12))];
    for n in 1..=2 {
        for j in 1..=n {
            let r = verify_eigenform(&[(d4.clone(), rat(1))], 3, EigenMode::Tprime(j), n, 4).unwrap();
            let lambda = eigenvalue_lambda_j(3, 2, n, j, 1).unwrap();
            out.push(report_check(format!("D4 T'_{j}(9) n={n} lambda={lambda}"), &r));
        }
    }
    out
}

fn vanishing() -> Vec<Check> {
    let mut out = Vec::new();
    let d = lattice("diag22");
    let r = verify_vanishing(&d, 5, 2, 2, 4).unwrap();
    out.push(known_false(format!("diag22 T'_2(25) n=2 = 0: {} of {} classes nonzero", r.mismatches().count(), r.rows.len()), r.ok));
    // the measured image, so the counterexample itself is checked exactly
    let th = ThetaSeries::new(&d, 2);
    let image = hecke::apply_tprime(&th, 5, 2, 4).unwrap();
    let base = theta_hecke::FourierMap::materialise(&th, 4).unwrap();
    let ratio = Rational::new(12.into(), 25.into());
    out.push(check("diag22 T'_2(25) n=2 equals 12/25 theta", image.agrees_with(&base.scaled(&ratio))));
    let a2 = lattice("A2");
    for n in 1..=2 {
        for j in 1..=n {
            let r = verify_vanishing(&a2, 2, j, n, 4).unwrap();
            out.push(report_check(format!("A2 T'_{j}(4) n={n} = 0"), &r));
        }
    }
    out
}

fn tp_eigen() -> Vec<Check> {
    let one = |name: &str| vec![(lattice(name), rat(1))];
    let mut out = Vec::new();
    let r = verify_eigenform(&one("E8"), 2, EigenMode::Tp, 1, 8).unwrap();
    out.push(report_check("E8 T(2) = 9 theta n=1".into(), &r));
    let r = verify_eigenform(&one("D4"), 3, EigenMode::TpSquared, 1, 4).unwrap();
    out.push(report_check("D4 T(3)^2 = 16 theta n=1".into(), &r));
    for n in 1..=2 {
        let r = verify_eigenform(&one("A2"), 2, EigenMode::TpSquared, n, 4).unwrap();
        let routes = r.notes.first().cloned().unwrap_or_default();
        out.push(report_check(format!("A2 T(2)^2 = 0 n={n} [{routes}]"), &r));
    }
    out
}

fn operator_identities() -> Vec<Check> {
    let mut out = Vec::new();
    let r = verify_operator_identity(&lattice("diag22"), 5, 2, OperatorIdentity::TildeRecursion { a: 1 }, 4).unwrap();
    out.push(known_false(
        format!("diag22 p=5 n=2 a=1 recursion: {} of {} classes differ", r.mismatches().count(), r.rows.len()),
        r.ok,
    ));
    for rr in 1..=2 {
        let r = verify_operator_identity(&lattice("D4"), 3, 2, OperatorIdentity::TildeFromPrime { r: rr }, 4).unwrap();
        out.push(report_check(format!("D4 p=3 n=2 r={rr} T~ from T'"), &r));
    }
    out
}

fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> IMat {
    let mut u = identity(n);
    if n == 1 {
        if rng.gen_bool(0.5) {
            u[0][0] = -1;
        }
        return u;
    }
    for _ in 0..6 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c: i64 = rng.gen_range(-2..=2);
        match rng.gen_range(0..3) {
            0 => (0..n).for_each(|r| u[r][j] += c * u[r][i]),
            1 => (0..n).for_each(|r| u[r].swap(i, j)),
            _ => (0..n).for_each(|r| u[r][i] = -u[r][i]),
        }
    }
    u
}

fn run_cli(dir: &std::path::Path, args: &[&str]) -> Vec<u8> {
    let o = Command::new(env!("CARGO_BIN_EXE_theta-hecke")).current_dir(dir).args(args).output().unwrap();
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o.stdout
}

fn determinism() -> Vec<Check> {
    let mut out = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    for name in ["D4", "diag22"] {
        std::fs::write(dir.path().join(format!("{name}.txt")), format_matrix(lattice(name).gram())).unwrap();
    }
    let runs: [&[&str]; 4] = [
        &["theta", "--lattice", "D4.txt", "--n", "2", "--bound", "6"],
        &["hecke-apply", "--lattice", "D4.txt", "--p", "3", "--n", "2", "--op", "tprime", "--j", "2", "--bound", "4"],
        &["verify", "--theorem", "ttilde-closed", "--lattice", "diag22.txt", "--p", "5", "--n", "2", "--j", "1"],
        &["phi-count", "--lattice", "D4.txt", "--p", "3", "--j", "2"],
    ];
    for args in runs {
        let a = run_cli(dir.path(), args);
        let b = run_cli(dir.path(), args);
        out.push(check(format!("{} byte-identical ({} bytes)", args[0], a.len()), a == b && !a.is_empty()));
    }

    let mut inventory: Vec<IMat> = Vec::new();
    for (n, bound) in [(1, 12), (2, 10), (3, 8), (4, 6)] {
        inventory.extend(enumerate_classes(n, bound).into_iter().map(|c| c.rep().clone()));
    }
    for name in ["A2", "diag22", "D4", "A1A1A2"] {
        inventory.push(lattice(name).gram().clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e7a);
    let mut failures = 0;
    for t in &inventory {
        let c = canonicalize(t).unwrap();
        let again = canonicalize(c.rep()).unwrap();
        if again != c {
            failures += 1;
        }
        for _ in 0..20 {
            let u = random_unimodular(t.len(), &mut rng);
            if canonicalize(&congruent(t, &u)).unwrap() != c {
                failures += 1;
            }
        }
    }
    out.push(check(format!("canonicalize: {} classes x 20 transforms, {failures} failures", inventory.len()), failures == 0));
    out
}

fn main() {
    let min = |m: u64| Duration::from_secs(60 * m);
    let plan: Vec<Plan> = vec![
        (1, "phi-count oracle", min(5), phi_count),
        (2, "q-analogue identities", min(1), q_identities),
        (3, "reduction counts", min(5), reduction),
        (4, "char-2 structure suite", min(5), structure),
        (5, "dual-path T~ closed form", min(15), dual_path),
        (6, "commutation with neighbour sums", min(20), commutation),
        (7, "T'_j eigenvalues on D4", min(20), eigen_tprime),
        (8, "T'_j vanishing", min(20), vanishing),
        (9, "T(p) and T(p)^2 eigenvalues", min(20), tp_eigen),
        (10, "operator identities", min(20), operator_identities),
        (11, "determinism", min(20), determinism),
    ];
    let mut results = Vec::new();
    for (id, title, budget, f) in plan {
        let start = Instant::now();
        let checks = f();
        results.push(Criterion { id, title, budget, checks, elapsed: start.elapsed() });
    }

    println!();
    for c in &results {
        println!("{} criterion {:>2}: {} ({:.1?})", if c.pass() { "PASS" } else { "FAIL" }, c.id, c.title, c.elapsed);
        for k in &c.checks {
            let tag = match (k.ok, k.expected) {
                (true, _) => "ok  ",
                (false, false) => "FALSE (known counterexample)",
                (false, true) => "FAIL",
            };
            println!("    {tag} {}", k.label);
        }
    }

    let surprises: Vec<String> = results
        .iter()
        .flat_map(|c| c.checks.iter().filter(|k| k.ok != k.expected).map(move |k| format!("criterion {}: {}", c.id, k.label)))
        .collect();
    assert!(surprises.is_empty(), "unexpected verdicts: {surprises:#?}");
    for c in &results {
        assert!(c.elapsed <= c.budget, "criterion {} over budget: {:?}", c.id, c.elapsed);
    }
    let failed: Vec<usize> = results.iter().filter(|c| !c.pass()).map(|c| c.id).collect();
    assert_eq!(failed, vec![8, 10]);
}
