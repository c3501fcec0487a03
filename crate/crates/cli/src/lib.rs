//! Batch front end: theta coefficients, Hecke images, theorem reports and the
//! identity suites, written as deterministic JSON or CSV.
//!
//! Exit codes: 0 success, 1 an identity or report failed, 2 bad usage or input.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use theta_hecke::closed::verify::{self, EigenMode, Report};
use theta_hecke::fourier::rational_string;
use theta_hecke::fq::{decompose, phi_brute, phi_general, Residual};
use theta_hecke::hecke::{self, OpKind, OperatorIdentity, SquareRoute};
use theta_hecke::identities::{self, IdentityRow, Suite};
use theta_hecke::lattice::{character_at, mod_p_space, IntegralLattice, ThetaSeries};
use theta_hecke::qanalog::{parse_rational, require_prime, QFunctions};
use theta_hecke::{FourierMap, Rational};

pub const THREADS_VAR: &str = "THETA_HECKE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "theta-hecke", version, about = "Exact theta series and Hecke operator coefficients")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fourier coefficients of the degree-n theta series of a lattice.
    Theta(RunArgs),
    /// Apply T(p), T~_j(p^2), T'_j(p^2) or T(p)^2 to a theta series.
    HeckeApply(RunArgs),
    /// Check a theorem on concrete lattices and write a report.
    Verify(RunArgs),
    /// Run the exact identity suites over their parameter grids.
    IdentityCheck(RunArgs),
    /// Count totally isotropic subspaces of L/pL.
    PhiCount(RunArgs),
    /// Witt decomposition of L/pL.
    Witt(RunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Gram matrix file; `path@weight` sets a genus weight. Repeatable.
    #[arg(long)]
    pub lattice: Vec<String>,
    /// Prime not dividing the level.
    #[arg(long)]
    pub p: Option<u64>,
    /// Degree of the theta series (default 1).
    #[arg(long)]
    pub n: Option<usize>,
    /// Operator index; for phi-count, the subspace dimension.
    #[arg(long)]
    pub j: Option<usize>,
    /// Offset above the isotropic range for tilde-recursion.
    #[arg(long)]
    pub a: Option<usize>,
    /// Largest trace of an output class (default 4).
    #[arg(long)]
    pub bound: Option<i64>,
    #[arg(long, value_enum)]
    pub op: Option<Op>,
    /// Theorem (verify) or suite (identity-check) name.
    #[arg(long)]
    pub theorem: Option<String>,
    /// Output file; stdout when absent. Nothing is written on error.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Defaults to the extension of --out, then to the command's usual format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Op {
    Tp,
    Ttilde,
    Tprime,
    /// T(p) applied twice.
    Tp2,
    /// T(p)^2 through the T~ expansion.
    Tp2Expansion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Input { path: String, source: theta_hecke::Error },
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error(transparent)]
    Engine(#[from] theta_hecke::Error),
}

/// Whether the checks a command performed all held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_ok(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
        }
    }
}

pub const USAGE_EXIT: i32 = 2;

/// Theorem names accepted by `verify`.
pub const THEOREMS: [&str; 9] = [
    "ttilde-closed",
    "neighbor-closed",
    "commutation",
    "eigen-tprime",
    "eigen-tp",
    "eigen-tp-squared",
    "vanishing",
    "tilde-recursion",
    "tilde-from-prime",
];

/// Sizes the global thread pool from [`THREADS_VAR`] when it holds a positive
/// integer. Anything else is ignored with a warning.
pub fn configure_threads() {
    let Ok(v) = std::env::var(THREADS_VAR) else { return };
    match v.trim().parse::<usize>() {
        Ok(t) if t > 0 => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
        }
        _ => eprintln!("warning: ignoring {THREADS_VAR}={v:?}"),
    }
}

pub fn run(cli: Cli, f: &dyn QFunctions) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Theta(a) => cmd_theta(&a),
        Command::HeckeApply(a) => cmd_hecke_apply(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::IdentityCheck(a) => cmd_identity_check(&a, f),
        Command::PhiCount(a) => cmd_phi_count(&a),
        Command::Witt(a) => cmd_witt(&a),
    }
}

impl RunArgs {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or_else(|| match self.out.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            _ => default,
        })
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required")))
}

fn prime(args: &RunArgs) -> Result<u64, CliError> {
    let p = need(args.p, "p")?;
    require_prime(p).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(p)
}

fn bound(args: &RunArgs, default: i64) -> Result<i64, CliError> {
    let b = args.bound.unwrap_or(default);
    if b < 0 {
        return Err(CliError::Usage("--bound must be non-negative".into()));
    }
    Ok(b)
}

fn degree(args: &RunArgs) -> Result<usize, CliError> {
    let n = args.n.unwrap_or(1);
    if n == 0 || n > hecke::MAX_DEGREE {
        return Err(CliError::Usage(format!("--n must lie in 1..={}", hecke::MAX_DEGREE)));
    }
    Ok(n)
}

fn split_weight(spec: &str) -> Result<(&str, Rational), CliError> {
    match spec.rsplit_once('@') {
        Some((path, w)) => {
            let w = parse_rational(w).map_err(|e| CliError::Usage(format!("weight in `{spec}`: {e}")))?;
            Ok((path, w))
        }
        None => Ok((spec, Rational::from_integer(1.into()))),
    }
}

fn read_lattice(path: &str) -> Result<IntegralLattice, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
    IntegralLattice::parse(&text).map_err(|source| CliError::Input { path: path.into(), source })
}

fn single_lattice(args: &RunArgs) -> Result<IntegralLattice, CliError> {
    match args.lattice.as_slice() {
        [one] => read_lattice(split_weight(one)?.0),
        [] => Err(CliError::Usage("--lattice is required".into())),
        _ => Err(CliError::Usage("this command takes a single --lattice".into())),
    }
}

fn genus(args: &RunArgs) -> Result<Vec<(IntegralLattice, Rational)>, CliError> {
    if args.lattice.is_empty() {
        return Err(CliError::Usage("--lattice is required".into()));
    }
    args.lattice
        .iter()
        .map(|s| {
            let (path, w) = split_weight(s)?;
            Ok((read_lattice(path)?, w))
        })
        .collect()
}

/// Writes to `--out`, or to stdout when it is absent.
fn emit(args: &RunArgs, text: &str) -> Result<(), CliError> {
    match &args.out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write { path: path.display().to_string(), source })
}

fn render_map(m: &FourierMap, format: Format) -> String {
    match format {
        Format::Json => m.to_json(),
        Format::Csv => m.to_csv(),
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data serialises") + "\n"
}

fn cmd_theta(args: &RunArgs) -> Result<Outcome, CliError> {
    let l = single_lattice(args)?;
    let n = degree(args)?;
    let b = bound(args, 4)?;
    let m = FourierMap::materialise(&ThetaSeries::new(&l, n), b)?;
    emit(args, &render_map(&m, args.format_or(Format::Json)))?;
    Ok(Outcome::Pass)
}

fn cmd_hecke_apply(args: &RunArgs) -> Result<Outcome, CliError> {
    let l = single_lattice(args)?;
    let p = prime(args)?;
    let n = degree(args)?;
    let b = bound(args, 4)?;
    let src = ThetaSeries::new(&l, n);
    let out = match need(args.op, "op")? {
        Op::Tp => hecke::apply(&src, p, OpKind::Tp, b)?,
        Op::Ttilde => hecke::apply(&src, p, OpKind::Ttilde(need(args.j, "j")?), b)?,
        Op::Tprime => hecke::apply(&src, p, OpKind::Tprime(need(args.j, "j")?), b)?,
        Op::Tp2 => hecke::apply_tp_squared(&src, p, b, SquareRoute::Iterated)?,
        Op::Tp2Expansion => hecke::apply_tp_squared(&src, p, b, SquareRoute::Expansion)?,
    };
    emit(args, &render_map(&out.with_p_context(p), args.format_or(Format::Json)))?;
    Ok(Outcome::Pass)
}

fn report_csv(r: &Report) -> String {
    let mut s = format!("# {}\n# ok={}\n", r.anchor, r.ok);
    if let Some(v) = &r.e_prime_variant {
        let _ = writeln!(s, "# e_prime={v}");
    }
    for n in &r.notes {
        let _ = writeln!(s, "# {n}");
    }
    s.push_str("class_gram,lhs,rhs,delta\n");
    for row in &r.rows {
        let g: Vec<String> = row
            .class_gram
            .iter()
            .map(|x| x.iter().map(i64::to_string).collect::<Vec<_>>().join(" "))
            .collect();
        let _ = writeln!(s, "{},{},{},{}", g.join(";"), row.lhs, row.rhs, row.delta);
    }
    s
}

fn cmd_verify(args: &RunArgs) -> Result<Outcome, CliError> {
    let theorem = args.theorem.as_deref().ok_or_else(|| CliError::Usage("--theorem is required".into()))?;
    if !THEOREMS.contains(&theorem) {
        return Err(CliError::Usage(format!("unknown theorem `{theorem}`; expected one of {}", THEOREMS.join(", "))));
    }
    let p = prime(args)?;
    let n = degree(args)?;
    let b = bound(args, 4)?;
    let report = match theorem {
        "eigen-tprime" => verify::verify_eigenform(&genus(args)?, p, EigenMode::Tprime(need(args.j, "j")?), n, b)?,
        "eigen-tp" => verify::verify_eigenform(&genus(args)?, p, EigenMode::Tp, n, b)?,
        "eigen-tp-squared" => verify::verify_eigenform(&genus(args)?, p, EigenMode::TpSquared, n, b)?,
        _ => {
            let l = single_lattice(args)?;
            match theorem {
                "ttilde-closed" => verify::verify_ttilde_closed(&l, p, n, need(args.j, "j")?, b)?,
                "neighbor-closed" => verify::verify_neighbor_closed(&l, p, n, need(args.j, "j")?, b)?,
                "commutation" => verify::verify_commutation(&l, p, need(args.j, "j")?, n, b)?,
                "vanishing" => verify::verify_vanishing(&l, p, need(args.j, "j")?, n, b)?,
                "tilde-recursion" => {
                    verify::verify_operator_identity(&l, p, n, OperatorIdentity::TildeRecursion { a: need(args.a, "a")? }, b)?
                }
                _ => verify::verify_operator_identity(&l, p, n, OperatorIdentity::TildeFromPrime { r: need(args.j, "j")? }, b)?,
            }
        }
    };
    let text = match args.format_or(Format::Json) {
        Format::Json => report.to_json(),
        Format::Csv => report_csv(&report),
    };
    emit(args, &text)?;
    for row in report.mismatches().take(100) {
        eprintln!("mismatch at {:?}: {} vs {} (delta {})", row.class_gram, row.lhs, row.rhs, row.delta);
    }
    Ok(Outcome::from_ok(report.ok))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn rows_csv(rows: &[(&'static str, IdentityRow)]) -> String {
    let mut s = String::from("suite,identity,params,lhs,rhs,holds\n");
    for (suite, r) in rows {
        let _ = writeln!(
            s,
            "{suite},{},{},{},{},{}",
            r.identity,
            csv_field(&r.params),
            csv_field(&r.lhs),
            csv_field(&r.rhs),
            r.holds()
        );
    }
    s
}

#[derive(Serialize)]
struct SuiteJson<'a> {
    suite: &'static str,
    checked: usize,
    violations: usize,
    rows: Vec<&'a IdentityRow>,
}

fn cmd_identity_check(args: &RunArgs, f: &dyn QFunctions) -> Result<Outcome, CliError> {
    let format = args.format_or(Format::Csv);
    let suites: Vec<Suite> = match args.theorem.as_deref() {
        None | Some("all") => Suite::ALL.to_vec(),
        Some(name) => vec![Suite::parse(name).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            CliError::Usage(format!("unknown suite `{name}`; expected all, {}", names.join(", ")))
        })?],
    };
    let mut all = Vec::new();
    for s in suites {
        all.extend(identities::run(s, f)?.into_iter().map(|r| (s.name(), r)));
    }
    let bad: Vec<&(&str, IdentityRow)> = all.iter().filter(|(_, r)| !r.holds()).collect();
    let text = match format {
        Format::Csv => rows_csv(&all),
        Format::Json => {
            let mut docs = Vec::new();
            for s in Suite::ALL {
                let rows: Vec<&IdentityRow> = all.iter().filter(|(n, _)| *n == s.name()).map(|(_, r)| r).collect();
                if !rows.is_empty() {
                    let violations = rows.iter().filter(|r| !r.holds()).count();
                    docs.push(SuiteJson { suite: s.name(), checked: rows.len(), violations, rows });
                }
            }
            json(&docs)
        }
    };
    emit(args, &text)?;
    for (suite, r) in bad.iter().take(100) {
        eprintln!("violation {suite}/{} [{}]: {} != {}", r.identity, r.params, r.lhs, r.rhs);
    }
    eprintln!("{} identities checked, {} violations", all.len(), bad.len());
    Ok(Outcome::from_ok(bad.is_empty()))
}

fn residual_name(r: Residual) -> &'static str {
    match r {
        Residual::Zero => "zero",
        Residual::Line => "line",
        Residual::AnisoPlane => "aniso_plane",
    }
}

#[derive(Serialize)]
struct PhiRecord {
    ell: usize,
    closed: String,
    brute: Option<String>,
}

#[derive(Serialize)]
struct PhiDoc {
    p: u64,
    dim: usize,
    rad_dim: usize,
    hyp_count: usize,
    residual: &'static str,
    counts: Vec<PhiRecord>,
}

fn cmd_phi_count(args: &RunArgs) -> Result<Outcome, CliError> {
    let l = single_lattice(args)?;
    let p = prime(args)?;
    let v = mod_p_space(&l, p)?;
    let class = decompose(&v);
    let ells: Vec<usize> = match args.j {
        Some(j) => vec![j],
        None => (0..=v.dim() / 2).collect(),
    };
    let mut ok = true;
    let mut counts = Vec::new();
    for ell in ells {
        let closed = phi_general(&v, ell);
        let brute = match phi_brute(&v, ell) {
            Ok(b) => Some(Rational::from_integer(b.into())),
            Err(theta_hecke::Error::TooLarge(_)) => None,
            Err(e) => return Err(e.into()),
        };
        ok &= brute.as_ref().is_none_or(|b| *b == closed);
        counts.push(PhiRecord { ell, closed: rational_string(&closed), brute: brute.as_ref().map(rational_string) });
    }
    let doc = PhiDoc {
        p,
        dim: v.dim(),
        rad_dim: class.rad_dim,
        hyp_count: class.hyp_count,
        residual: residual_name(class.residual),
        counts,
    };
    let text = match args.format_or(Format::Json) {
        Format::Json => json(&doc),
        Format::Csv => {
            let mut s = String::from("ell,closed,brute\n");
            for c in &doc.counts {
                let _ = writeln!(s, "{},{},{}", c.ell, c.closed, c.brute.as_deref().unwrap_or(""));
            }
            s
        }
    };
    emit(args, &text)?;
    Ok(Outcome::from_ok(ok))
}

#[derive(Serialize)]
struct WittDoc {
    p: u64,
    dim: usize,
    rad_dim: usize,
    hyp_count: usize,
    residual: &'static str,
    hyperbolic: bool,
    level: u64,
    character: Option<i8>,
}

fn cmd_witt(args: &RunArgs) -> Result<Outcome, CliError> {
    let l = single_lattice(args)?;
    let p = prime(args)?;
    let v = mod_p_space(&l, p)?;
    let class = decompose(&v);
    let doc = WittDoc {
        p,
        dim: v.dim(),
        rad_dim: class.rad_dim,
        hyp_count: class.hyp_count,
        residual: residual_name(class.residual),
        hyperbolic: class.is_hyperbolic(),
        level: l.level(),
        character: character_at(&l, p).ok(),
    };
    let text = match args.format_or(Format::Json) {
        Format::Json => json(&doc),
        Format::Csv => format!(
            "p,dim,rad_dim,hyp_count,residual,hyperbolic,level,character\n{},{},{},{},{},{},{},{}\n",
            doc.p,
            doc.dim,
            doc.rad_dim,
            doc.hyp_count,
            doc.residual,
            doc.hyperbolic,
            doc.level,
            doc.character.map(|c| c.to_string()).unwrap_or_default()
        ),
    };
    emit(args, &text)?;
    Ok(Outcome::Pass)
}
