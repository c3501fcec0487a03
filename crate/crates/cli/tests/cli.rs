use std::path::PathBuf;
use std::process::{Command, Output};

use clap::Parser;
use tempfile::TempDir;
use theta_hecke::lattice::intmat::format_matrix;
use theta_hecke::lattice::{a2_gram, d4_gram, diag_gram, e8_gram};
use theta_hecke::qanalog::{self, Exact, QFunctions};
use theta_hecke::{FourierMap, Rational};
use theta_hecke_cli::{run, Cli, Outcome};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_theta-hecke"))
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Fixture { dir: tempfile::tempdir().unwrap() };
        f.write("e8.txt", &format_matrix(&e8_gram()));
        f.write("d4.txt", &format_matrix(&d4_gram()));
        f.write("a2.txt", &format_matrix(&a2_gram()));
        f.write("diag22.txt", &format_matrix(&diag_gram(&[2, 2])));
        f.write("bad.txt", "2\n2 1\n");
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) {
        std::fs::write(self.path(name), text).unwrap();
    }

    fn run(&self, args: &[&str]) -> Output {
        bin().current_dir(self.dir.path()).args(args).output().unwrap()
    }

    fn read(&self, name: &str) -> String {
        std::fs::read_to_string(self.path(name)).unwrap()
    }
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn coefficient(m: &FourierMap, t: Vec<Vec<i64>>) -> Rational {
    m.at(&t).unwrap()
}

#[test]
fn theta_of_e8() {
    let f = Fixture::new();
    let o = f.run(&["theta", "--lattice", "e8.txt", "--n", "1", "--bound", "4", "--out", "e8.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = FourierMap::from_json(&f.read("e8.json")).unwrap();
    assert_eq!(m.len(), 3);
    assert_eq!(coefficient(&m, vec![vec![0]]), Rational::from_integer(1.into()));
    assert_eq!(coefficient(&m, vec![vec![2]]), Rational::from_integer(240.into()));
    assert_eq!(coefficient(&m, vec![vec![4]]), Rational::from_integer(2160.into()));
}

#[test]
fn theta_bound_zero_is_the_zero_class() {
    let f = Fixture::new();
    let o = f.run(&["theta", "--lattice", "d4.txt", "--n", "2", "--bound", "0", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "trace,class_gram,coefficient\n0,0 0;0 0,1/1\n");
}

#[test]
fn malformed_matrix_writes_nothing() {
    let f = Fixture::new();
    let o = f.run(&["theta", "--lattice", "bad.txt", "--bound", "4", "--out", "x.json"]);
    assert_eq!(code(&o), 2);
    assert!(!f.path("x.json").exists());
    let o = f.run(&["theta", "--lattice", "missing.txt", "--bound", "4", "--out", "x.json"]);
    assert_eq!(code(&o), 2);
    assert!(!f.path("x.json").exists());
}

#[test]
fn usage_errors_exit_two() {
    let f = Fixture::new();
    for args in [
        vec!["verify", "--theorem", "nonsense", "--lattice", "d4.txt", "--p", "3"],
        vec!["verify", "--theorem", "commutation", "--lattice", "d4.txt", "--p", "4", "--j", "1"],
        vec!["verify", "--theorem", "commutation", "--lattice", "d4.txt", "--p", "3"],
        vec!["hecke-apply", "--lattice", "d4.txt", "--p", "2", "--op", "tp"],
        vec!["theta", "--lattice", "d4.txt", "--bound", "-1"],
        vec!["theta", "--lattice", "d4.txt", "--unknown-flag"],
        vec!["identity-check", "--theorem", "nope"],
    ] {
        let o = f.run(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn commutation_report() {
    let f = Fixture::new();
    let o = f.run(&["verify", "--theorem", "commutation", "--lattice", "d4.txt", "--p", "3", "--n", "1", "--j", "1", "--out", "r.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&f.read("r.json")).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["params"]["p"], 3);
    assert!(v["anchor"].as_str().unwrap().contains("neighbour"));
}

#[test]
fn vanishing_for_a2() {
    let f = Fixture::new();
    let o = f.run(&["verify", "--theorem", "vanishing", "--lattice", "a2.txt", "--p", "2", "--n", "1", "--j", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn eigenvalue_range_guard() {
    let f = Fixture::new();
    let o = f.run(&["verify", "--theorem", "eigen-tprime", "--lattice", "diag22.txt", "--p", "5", "--n", "2", "--j", "2"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn report_written_on_failure() {
    // the recursion fails for diag(2,2) at p = 5 in degree 2
    let f = Fixture::new();
    let o = f.run(&[
        "verify", "--theorem", "tilde-recursion", "--lattice", "diag22.txt", "--p", "5", "--n", "2", "--a", "1", "--out", "r.csv",
    ]);
    assert_eq!(code(&o), 1);
    let text = f.read("r.csv");
    assert!(text.contains("# ok=false"));
    assert!(text.lines().any(|l| l.starts_with("0 0;0 0,")));
}

#[test]
fn eigenform_with_weights() {
    let f = Fixture::new();
    let o = f.run(&["verify", "--theorem", "eigen-tp", "--lattice", "e8.txt@1/2", "--p", "2", "--n", "1", "--bound", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = f.run(&["verify", "--theorem", "eigen-tp", "--lattice", "e8.txt@x", "--p", "2"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn hecke_apply_records_prime() {
    let f = Fixture::new();
    let o = f.run(&["hecke-apply", "--lattice", "d4.txt", "--p", "3", "--n", "1", "--op", "tp", "--bound", "2", "--out", "h.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = FourierMap::from_json(&f.read("h.json")).unwrap();
    assert_eq!(m.p_context(), Some(3));
    // θ(D4)|T(3) = δ(1,1)·θ(D4) = 4·θ(D4)
    assert_eq!(coefficient(&m, vec![vec![2]]), Rational::from_integer(96.into()));
}

#[test]
fn witt_and_phi_count() {
    let f = Fixture::new();
    let o = f.run(&["witt", "--lattice", "a2.txt", "--p", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["residual"], "aniso_plane");
    assert_eq!(v["character"], -1);
    let o = f.run(&["phi-count", "--lattice", "d4.txt", "--p", "3", "--j", "1"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["counts"][0]["closed"], "16/1");
    assert_eq!(v["counts"][0]["brute"], "16/1");
}

#[test]
fn identity_check_csv() {
    let f = Fixture::new();
    let o = f.run(&["identity-check", "--theorem", "auxiliary", "--out", "id.csv"]);
    assert_eq!(code(&o), 0);
    let text = f.read("id.csv");
    assert!(text.starts_with("suite,identity,params,lhs,rhs,holds\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

/// β off by one wherever it is nonzero.
struct BrokenBeta;

impl QFunctions for BrokenBeta {
    fn delta(&self, p: u64, m: i64, r: u32) -> Rational {
        qanalog::delta(p, m, r)
    }
    fn mu(&self, p: u64, m: i64, r: u32) -> Rational {
        qanalog::mu(p, m, r)
    }
    fn beta(&self, p: u64, m: i64, r: u32) -> Rational {
        let b = qanalog::beta(p, m, r);
        if b == Rational::from_integer(0.into()) {
            b
        } else {
            b + Rational::from_integer(1.into())
        }
    }
}

#[test]
fn corrupted_beta_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ids.csv");
    for suite in ["qsums", "auxiliary"] {
        let args = ["theta-hecke", "identity-check", "--theorem", suite, "--out", out.to_str().unwrap()];
        assert_eq!(run(Cli::parse_from(args), &BrokenBeta).unwrap(), Outcome::Fail, "{suite}");
        assert!(std::fs::read_to_string(&out).unwrap().contains(",false"));
        assert_eq!(run(Cli::parse_from(args), &Exact).unwrap(), Outcome::Pass, "{suite}");
    }
}

fn same_bytes(f: &Fixture, args: &[&str], out: &str, threads: Option<&str>) -> String {
    let mut cmd = bin();
    cmd.current_dir(f.dir.path()).args(args).args(["--out", out]);
    if let Some(t) = threads {
        cmd.env("THETA_HECKE_THREADS", t);
    }
    let o = cmd.output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    f.read(out)
}

#[test]
fn repeated_runs_are_byte_identical() {
    let f = Fixture::new();
    let cases: [&[&str]; 3] = [
        &["theta", "--lattice", "d4.txt", "--n", "2", "--bound", "6"],
        &["hecke-apply", "--lattice", "d4.txt", "--p", "3", "--n", "2", "--op", "ttilde", "--j", "1", "--bound", "4"],
        &["verify", "--theorem", "ttilde-closed", "--lattice", "diag22.txt", "--p", "5", "--n", "1", "--j", "1"],
    ];
    for args in cases {
        let a = same_bytes(&f, args, "a.json", None);
        let b = same_bytes(&f, args, "b.json", None);
        let c = same_bytes(&f, args, "c.json", Some("1"));
        assert_eq!(a, b, "{args:?}");
        assert_eq!(a, c, "{args:?}");
    }
}

#[test]
fn bad_thread_hint_is_ignored() {
    let f = Fixture::new();
    let o = bin()
        .current_dir(f.dir.path())
        .args(["theta", "--lattice", "a2.txt", "--bound", "2"])
        .env("THETA_HECKE_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("ignoring"));
}
