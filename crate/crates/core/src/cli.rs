//! The `genpos` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::cases::{
    classify_exact_overlap, classify_one_point, wsp_witness_search, ExactOverlapParams, OnePointParams,
    WitnessKind,
};
use crate::certify::{
    empirical_displacement_check, disjointness_certificate, translation_bound_single, translation_bound_ssc,
    DisjointnessRequest,
};
use crate::error::{GenposError, Result};
use crate::family::FamilyDescriptor;
use crate::ifs::{IFSystem, RatioVector, Word};
use crate::moran::{solve_dimension_equation, DimensionEquation, Term};
use crate::report::{case_csv, sweep_csv, sweep_summary, to_canonical_json, witness_csv};
use crate::separation::{check_pair_with, check_ssc, exceptional_set_sweep, SeparationOptions, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "genpos", version, about = "Separation and exceptional-set bounds for parametrized self-similar systems")]
pub struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the Moran equation (or a weighted dimension equation).
    Moran(MoranArgs),
    /// Piece-disjointness certificate for a family and two words.
    Certify(CertifyArgs),
    /// Exceptional-set bounds for translated copies of a ratio vector.
    Translation(TranslationArgs),
    /// Empirical check of the displacement bound on a family.
    Displacement(DisplacementArgs),
    /// Decide whether two pieces of a system are disjoint.
    Separate(SeparateArgs),
    /// Grid sweep of a family's parameter box.
    Sweep(SweepArgs),
    /// The exact-overlap and one-point families.
    #[command(subcommand)]
    Case(CaseCommand),
    /// Search for maps of the difference set close to the identity.
    WspWitness(WitnessArgs),
}

#[derive(Debug, Args)]
pub struct MoranArgs {
    /// Contraction ratios, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ratios: Vec<f64>,
    /// Coefficients of a weighted equation `Σ c_i r_i^s = target`.
    #[arg(long, value_delimiter = ',')]
    pub coefficients: Option<Vec<f64>>,
    /// Right-hand side of the weighted equation (default 1).
    #[arg(long)]
    pub target: Option<f64>,
    /// Search bracket `lo,hi` for the weighted equation (default `0,1`).
    #[arg(long, value_delimiter = ',')]
    pub bracket: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Family descriptor JSON.
    #[arg(long)]
    pub family: PathBuf,
    /// 1-based word, comma separated (e.g. `1,3`).
    #[arg(long)]
    pub j: Word,
    /// 1-based word, comma separated (e.g. `1,3`).
    #[arg(long)]
    pub k: Word,
    /// Anti-Lipschitz constant of the `j` piece; derived when omitted.
    #[arg(long)]
    pub cj: Option<f64>,
    /// Lipschitz constant of the `k` piece; derived when omitted.
    #[arg(long)]
    pub ck: Option<f64>,
    /// Upper bound on the contraction of the `j` word over the domain.
    #[arg(long)]
    pub rj_bound: Option<f64>,
    /// Upper bound on the contraction of the `k` word over the domain.
    #[arg(long)]
    pub rk_bound: Option<f64>,
    /// Dimension of the parameter domain; defaults to its number of free axes.
    #[arg(long)]
    pub dim_d: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TranslationArgs {
    /// Contraction ratios, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ratios: Vec<f64>,
    /// Ambient dimension.
    #[arg(long)]
    pub n: usize,
    /// With `--m`: only these two pieces; without: the whole system.
    #[arg(long, requires = "m")]
    pub k: Option<usize>,
    /// Second piece index (1-based).
    #[arg(long, requires = "k")]
    pub m: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DisplacementArgs {
    /// Family descriptor JSON.
    #[arg(long)]
    pub family: PathBuf,
    /// Number of random (parameter pair, address) samples.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Truncation depth of the sampled addresses.
    #[arg(long, default_value_t = 30)]
    pub depth: usize,
}

#[derive(Debug, Args)]
pub struct SeparateArgs {
    /// System descriptor JSON.
    #[arg(long)]
    pub system: PathBuf,
    /// 1-based word, comma separated (e.g. `1,3`).
    #[arg(long, required_unless_present = "ssc")]
    pub j: Option<Word>,
    /// 1-based word, comma separated (e.g. `1,3`).
    #[arg(long, required_unless_present = "ssc")]
    pub k: Option<Word>,
    /// Check every pair of first-level pieces.
    #[arg(long, conflicts_with_all = ["j", "k"])]
    pub ssc: bool,
    /// Stop refining once both boxes are smaller than this.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Maximum refinement depth.
    #[arg(long, default_value_t = 24)]
    pub depth: usize,
    /// Only report disjoint when the certified gap exceeds this.
    #[arg(long, default_value_t = 0.0)]
    pub min_gap: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Family descriptor JSON.
    #[arg(long)]
    pub family: PathBuf,
    /// 1-based word, comma separated (e.g. `1,3`).
    #[arg(long)]
    pub j: Word,
    /// 1-based word, comma separated (e.g. `1,3`).
    #[arg(long)]
    pub k: Word,
    /// Cells per free parameter axis.
    #[arg(long, default_value_t = 100)]
    pub cells: usize,
    /// Refinement tolerance per cell.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Maximum refinement depth per cell.
    #[arg(long, default_value_t = 16)]
    pub depth: usize,
    /// With `--format csv`, also write the JSON summary here.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CaseLimits {
    /// Largest exponent m, n examined.
    #[arg(long, default_value_t = 4)]
    pub max_mn: usize,
    /// Maximum refinement depth per pair.
    #[arg(long, default_value_t = 20)]
    pub depth: usize,
    /// Refinement tolerance per pair.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum CaseCommand {
    /// Classify the pairs `(1^m, 2^n)` of the exact-overlap system at `(t, b)`.
    ExactOverlap {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        b: f64,
        #[command(flatten)]
        limits: CaseLimits,
    },
    /// Classify the pairs of the one-point system at `(p, q, r)`.
    OnePoint {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        r: f64,
        #[command(flatten)]
        limits: CaseLimits,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WitnessFamily {
    ExactOverlap,
    OnePoint,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    /// Family; `--t --b` for exact-overlap, `--p --q --r` for one-point.
    #[arg(long, value_enum)]
    pub kind: WitnessFamily,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Stop once a witness is this close to the identity.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Largest exponent tried.
    #[arg(long, default_value_t = 200)]
    pub max_exp: usize,
}

/// What a command produced: the text to emit, whether the property was
/// established, and an optional second artifact.
struct Outcome {
    text: String,
    success: bool,
    note: &'static str,
    extra: Option<(PathBuf, String)>,
}

impl Outcome {
    fn new(text: String, success: bool, note: &'static str) -> Self {
        Self { text, success, note, extra: None }
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| GenposError::domain(path.display().to_string(), e.to_string()))
}

fn require(field: &str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| GenposError::domain(field, "is required for this kind"))
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(GenposError::domain(field, "must be positive"))
    }
}

fn at_least_one(field: &str, v: usize) -> Result<()> {
    if v >= 1 {
        Ok(())
    } else {
        Err(GenposError::domain(field, "must be at least 1"))
    }
}

fn json_only(format: Format, command: &str) -> Result<()> {
    match format {
        Format::Json => Ok(()),
        Format::Csv => Err(GenposError::domain("format", format!("csv is not available for {command}"))),
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Moran(a) => {
            json_only(cli.format, "moran")?;
            let coefficients = a.coefficients.clone().unwrap_or_else(|| vec![1.0; a.ratios.len()]);
            if coefficients.len() != a.ratios.len() {
                return Err(GenposError::domain("coefficients", "must match the number of ratios"));
            }
            let root = if a.coefficients.is_none() && a.target.is_none() && a.bracket.is_none() {
                crate::moran::similarity_root(&RatioVector::new(a.ratios.clone())?)
            } else {
                let terms = coefficients
                    .iter()
                    .zip(&a.ratios)
                    .map(|(&coefficient, &base)| Term { coefficient, base })
                    .collect();
                let eq = DimensionEquation::new(terms, a.target.unwrap_or(1.0))?;
                let bracket = match a.bracket.as_deref() {
                    None => (0.0, 1.0),
                    Some(&[lo, hi]) => (lo, hi),
                    Some(_) => return Err(GenposError::domain("bracket", "expected two values lo,hi")),
                };
                solve_dimension_equation(&eq, bracket)?
            };
            Ok(Outcome::new(to_canonical_json(&root)?, true, ""))
        }
        Command::Certify(a) => {
            json_only(cli.format, "certify")?;
            let fam = FamilyDescriptor::from_json(&read(&a.family)?)?;
            let mut req = DisjointnessRequest::derived(&fam, a.j.clone(), a.k.clone())?;
            if let Some(cj) = a.cj {
                req.cj = cj;
            }
            if let Some(ck) = a.ck {
                req.ck = ck;
            }
            req.rj_bound = a.rj_bound;
            req.rk_bound = a.rk_bound;
            req.dim_d = a.dim_d;
            let cert = disjointness_certificate(&fam, &req)?;
            Ok(Outcome::new(to_canonical_json(&cert)?, cert.holds, "certificate does not hold"))
        }
        Command::Translation(a) => {
            json_only(cli.format, "translation")?;
            let r = RatioVector::new(a.ratios.clone())?;
            let cert = match (a.k, a.m) {
                (Some(k), Some(m)) => translation_bound_single(&r, k, m, a.n)?,
                _ => translation_bound_ssc(&r, a.n)?,
            };
            Ok(Outcome::new(to_canonical_json(&cert)?, cert.holds, "certificate does not hold"))
        }
        Command::Displacement(a) => {
            json_only(cli.format, "displacement")?;
            let fam = FamilyDescriptor::from_json(&read(&a.family)?)?;
            let rep = empirical_displacement_check(&fam, a.samples, a.depth, cli.seed)?;
            Ok(Outcome::new(to_canonical_json(&rep)?, rep.passed, "displacement bound violated"))
        }
        Command::Separate(a) => {
            json_only(cli.format, "separate")?;
            let system = IFSystem::from_json(&read(&a.system)?)?;
            positive("tol", a.tol)?;
            if a.ssc {
                let rep = check_ssc(&system, a.tol, a.depth)?;
                return Ok(Outcome::new(to_canonical_json(&rep)?, rep.holds, "strong separation undecided"));
            }
            let (Some(j), Some(k)) = (&a.j, &a.k) else {
                return Err(GenposError::domain("j", "--j and --k are required"));
            };
            let mut opts = SeparationOptions::new(a.tol, a.depth);
            opts.min_gap = a.min_gap;
            let v = check_pair_with(&system, j, k, &opts)?;
            let ok = v.status == Status::Disjoint;
            Ok(Outcome::new(to_canonical_json(&v)?, ok, "pieces undecided"))
        }
        Command::Sweep(a) => {
            positive("tol", a.tol)?;
            at_least_one("cells", a.cells)?;
            let fam = FamilyDescriptor::from_json(&read(&a.family)?)?;
            let rep = exceptional_set_sweep(&fam, &a.j, &a.k, a.cells, a.tol, a.depth)?;
            let mut out = match cli.format {
                Format::Json => Outcome::new(to_canonical_json(&rep)?, true, ""),
                Format::Csv => Outcome::new(sweep_csv(&rep), true, ""),
            };
            if let (Format::Csv, Some(path)) = (cli.format, &a.summary) {
                out.extra = Some((path.clone(), to_canonical_json(&sweep_summary(&rep))?));
            }
            Ok(out)
        }
        Command::Case(c) => {
            let (rep, limits) = match c {
                CaseCommand::ExactOverlap { t, b, limits } => {
                    let params = ExactOverlapParams::new(*t, *b)?;
                    at_least_one("max_mn", limits.max_mn)?;
                    positive("tol", limits.tol)?;
                    (classify_exact_overlap(&params, limits.max_mn, limits.tol, limits.depth)?, limits)
                }
                CaseCommand::OnePoint { p, q, r, limits } => {
                    let params = OnePointParams::new(*p, *q, *r)?;
                    positive("tol", limits.tol)?;
                    (classify_one_point(&params, limits.max_mn, limits.tol, limits.depth)?, limits)
                }
            };
            let _ = limits;
            let text = match cli.format {
                Format::Json => to_canonical_json(&rep)?,
                Format::Csv => case_csv(&rep),
            };
            Ok(Outcome::new(text, rep.verified, "some exponent pairs are undecided"))
        }
        Command::WspWitness(a) => {
            let kind = match a.kind {
                WitnessFamily::ExactOverlap => WitnessKind::ExactOverlap(ExactOverlapParams::new(
                    require("t", a.t)?,
                    require("b", a.b)?,
                )?),
                WitnessFamily::OnePoint => WitnessKind::OnePoint(OnePointParams::new(
                    require("p", a.p)?,
                    require("q", a.q)?,
                    require("r", a.r)?,
                )?),
            };
            let seq = wsp_witness_search(&kind, a.tol, a.max_exp)?;
            let text = match cli.format {
                Format::Json => to_canonical_json(&json!({ "search": seq, "kind": kind }))?,
                Format::Csv => witness_csv(&seq),
            };
            Ok(Outcome::new(text, seq.reached_tol, "exponent cap reached before the tolerance"))
        }
    }
}

fn emit(path: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> std::result::Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("out: cannot write {}: {e}", p.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| format!("out: {e}")),
    }
}

/// Runs the command line and returns the process exit code: 0 on success,
/// 1 when the computation finished but the property was not established,
/// 2 on input errors.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let line = text.lines().next().unwrap_or("invalid arguments");
                let _ = writeln!(stderr, "{line}");
            }
            return code;
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.to_string().replace('\n', " "));
            return 2;
        }
    };
    if let Err(msg) = emit(&cli.out, &outcome.text, stdout) {
        let _ = writeln!(stderr, "error: {msg}");
        return 2;
    }
    if let Some((path, text)) = &outcome.extra {
        if let Err(msg) = emit(&Some(path.clone()), text, stdout) {
            let _ = writeln!(stderr, "error: {}", msg.replacen("out", "summary", 1));
            return 2;
        }
    }
    if outcome.success {
        0
    } else {
        let _ = writeln!(stderr, "{}", outcome.note);
        1
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
