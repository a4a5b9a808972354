//! Command-line front end. Every subcommand produces a JSON report with the
//! keys `command`, `verdict`, `scope`, `inputs`, `details`, `bases`,
//! `dimensions`, `residuals` and `seconds`. Exit codes: 0 when every verdict
//! passes, 1 when one fails, 2 on usage or input errors.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::exact::{Gq, Var};
use crate::expr::{load_problem, matrf_grid, parse_expr};
use crate::kdv::{verify_kdv_example, PotentialForm};
use crate::operators::{check_left_eigen, check_right_eigen};
use crate::presentations::{
    check_relations, find_generators, surjectivity_check, AssignmentDoc, GeneratorAssignment, PresentationError, PresentationSpec,
    SearchOptions,
};
use crate::prolate::{run_prolate, write_modes_csv, ProlateConfig};
use crate::solver::{eigen_slice, stabilize_default, Side, SliceMode};
use crate::theorems::{validate_theorem, ExampleId, EX2_RELAXED_ENTRY};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "BISPECTRAL_THREADS";

const EXACT_SCOPE: &str = "exact arithmetic over Q(i); algebra statements are verified for truncations up to the stated degrees and operator bounds only, not for all degrees";
const NUMERIC_SCOPE: &str = "binary64 numerics at the stated basis size and quadrature order";

#[derive(Debug, Parser)]
#[command(name = "bispectral", version, about = "Exact checks of matrix bispectral triples and their eigenvalue algebras")]
pub struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check Lψ = ψF and ψB = θψ for a problem file.
    VerifyTriple { file: PathBuf },
    /// Compute a truncated eigenvalue algebra of a problem file.
    SolveAlgebra {
        file: PathBuf,
        #[arg(long, default_value = "theta")]
        side: String,
        #[arg(long, allow_hyphen_values = true)]
        degree: Option<i64>,
        /// `members` or `truncations`.
        #[arg(long)]
        mode: Option<String>,
        /// Fixed operator order; without it (and without one in the file)
        /// the default schedule is run until the slice stabilizes.
        #[arg(long)]
        op_order: Option<usize>,
        #[arg(long)]
        num_deg: Option<usize>,
    },
    /// Compare the solver's algebra with a bundled example's description.
    CheckTheorem {
        #[arg(long)]
        example: String,
        #[arg(long, allow_hyphen_values = true)]
        degree: Option<i64>,
    },
    /// Check relations, membership and surjectivity of a generator assignment.
    CheckPresentation {
        #[arg(long)]
        example: String,
        #[arg(long)]
        assignment: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        degree: Option<i64>,
        /// Use the description with the degree-4 (3,2) entry free (ex2).
        #[arg(long)]
        relaxed: bool,
    },
    /// Search for generators satisfying a presentation.
    FindGenerators {
        #[arg(long)]
        example: String,
        #[arg(long, default_value_t = 2)]
        d_search: usize,
        #[arg(long, default_value_t = 2)]
        support: usize,
        /// Surjectivity degree; defaults to d_search + 2.
        #[arg(long)]
        check_degree: Option<usize>,
        #[arg(long, default_value_t = 16)]
        max: usize,
        #[arg(long)]
        relaxed: bool,
    },
    /// Build the tail eigenfunction of L₂ and test (B₂, x⁴ − 4t₃x).
    SynthKdv {
        /// Exact rational or Gaussian rational, e.g. `1`, `-1/2`, `1+2i`.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        t3: String,
        /// `tau` or `displayed`.
        #[arg(long, default_value = "tau")]
        form: String,
    },
    /// Sinc kernel versus prolate operator in the Legendre basis.
    Prolate {
        #[arg(long = "T", default_value = "1")]
        t: String,
        /// Accepts a trailing `pi`, e.g. `2.5pi`.
        #[arg(long = "W", default_value = "2.5pi")]
        w: String,
        #[arg(long, default_value_t = 40)]
        modes: usize,
        #[arg(long, default_value_t = 200)]
        quad: usize,
        /// Also write the Legendre coefficients of every mode as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub verdict: String,
    pub scope: String,
    pub inputs: Value,
    pub details: Value,
    pub bases: Value,
    pub dimensions: Value,
    pub residuals: Value,
    pub seconds: f64,
}

impl Report {
    fn new(command: &str, pass: bool, scope: &str, inputs: Value) -> Self {
        Self {
            command: command.into(),
            verdict: if pass { "pass" } else { "fail" }.into(),
            scope: scope.into(),
            inputs,
            details: json!({}),
            bases: json!({}),
            dimensions: json!({}),
            residuals: json!({}),
            seconds: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }
}

/// Usage or input error, reported with exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn degree(d: Option<i64>, default: usize) -> Result<usize, InputError> {
    match d {
        None => Ok(default),
        Some(d) if d < 0 => Err(InputError("degree must be nonnegative".into())),
        Some(d) => Ok(d as usize),
    }
}

fn side(text: &str) -> Result<Side, InputError> {
    match text {
        "theta" => Ok(Side::Theta),
        "f" => Ok(Side::F),
        other => Err(InputError(format!("unknown side `{other}` (expected theta or f)"))),
    }
}

fn parse_real(text: &str) -> Result<f64, InputError> {
    let bad = || InputError(format!("not a number: `{text}`"));
    let t = text.trim();
    match t.strip_suffix("pi") {
        Some("") => Ok(std::f64::consts::PI),
        Some(head) => Ok(head.trim_end_matches('*').parse::<f64>().map_err(|_| bad())? * std::f64::consts::PI),
        None => t.parse().map_err(|_| bad()),
    }
}

fn parse_gaussian(text: &str) -> Result<Gq, InputError> {
    if let Ok(g) = text.parse::<Gq>() {
        return Ok(g);
    }
    let r = parse_expr(text, &Default::default()).map_err(|e| InputError(format!("t3: {e}")))?;
    r.num()
        .constant_term()
        .filter(|_| r.is_polynomial() && r.num().degree_in(Var::X).unwrap_or(0) == 0 && r.num().degree_in(Var::Z).unwrap_or(0) == 0)
        .ok_or_else(|| InputError(format!("t3 must be a constant, got `{text}`")))
}

/// Runs one parsed invocation.
pub fn execute(cmd: &Command) -> Result<Report, InputError> {
    let start = Instant::now();
    let mut report = match cmd {
        Command::VerifyTriple { file } => verify_triple(file)?,
        Command::SolveAlgebra { file, side: s, degree: d, mode, op_order, num_deg } => {
            solve_algebra(file, side(s)?, *d, mode.as_deref(), *op_order, *num_deg)?
        }
        Command::CheckTheorem { example, degree: d } => {
            let id: ExampleId = example.parse()?;
            let d = degree(*d, id.default_degree())?;
            let r = validate_theorem(id, d)?;
            let mut rep = Report::new("check-theorem", r.holds(), EXACT_SCOPE, json!({"example": id, "degree": d}));
            rep.dimensions = json!({
                "solver": r.solver_dims,
                "description": r.literal.gamma_dims,
                "description_relaxed": r.relaxed.as_ref().map(|c| c.gamma_dims.clone()),
            });
            rep.details = to_value(&r);
            rep
        }
        Command::CheckPresentation { example, assignment, degree: d, relaxed } => check_presentation(example, assignment, *d, *relaxed)?,
        Command::FindGenerators { example, d_search, support, check_degree, max, relaxed } => {
            let id: ExampleId = example.parse()?;
            let gamma = if *relaxed { id.gamma().relaxed(EX2_RELAXED_ENTRY) } else { id.gamma() };
            let opts = SearchOptions {
                d_search: *d_search,
                support: *support,
                check_degree: check_degree.unwrap_or(d_search + 2),
                max_survivors: *max,
            };
            let inputs = json!({"example": id, "relaxed": relaxed, "d_search": d_search, "support": support, "check_degree": opts.check_degree, "max": max});
            match find_generators(&PresentationSpec::catalog(id), &gamma, &opts) {
                Ok(r) => {
                    let mut rep = Report::new("find-generators", !r.survivors.is_empty(), EXACT_SCOPE, inputs);
                    rep.bases = json!({"survivors": r.survivors});
                    rep.residuals = json!({"partial": r.partial});
                    rep.details = to_value(&r);
                    rep
                }
                Err(PresentationError::NoCandidate) => {
                    let mut rep = Report::new("find-generators", false, EXACT_SCOPE, inputs);
                    rep.details = json!({"error": "no candidate found"});
                    rep
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::SynthKdv { t3, form } => {
            let t3 = parse_gaussian(t3)?;
            let form = match form.as_str() {
                "tau" => PotentialForm::Tau,
                "displayed" => PotentialForm::Displayed,
                other => return Err(InputError(format!("unknown form `{other}` (expected tau or displayed)"))),
            };
            let r = verify_kdv_example(&t3, form)?;
            let pass = r.conventions.iter().all(|c| c.eigen_holds == Some(true) && c.gamma.is_some()) && !r.verifying_conventions().is_empty();
            let mut rep = Report::new("synth-kdv", pass, EXACT_SCOPE, json!({"t3": t3.to_string(), "form": form}));
            rep.bases = r.conventions.iter().map(|c| (c.convention.label().to_string(), to_value(&c.slice))).collect();
            rep.dimensions = r.conventions.iter().map(|c| (c.convention.label().to_string(), to_value(&c.slice.as_ref().map(|s| s.dimension)))).collect();
            rep.residuals = r.conventions.iter().map(|c| (c.convention.label().to_string(), to_value(&c.pair_residual))).collect();
            rep.details = to_value(&r);
            rep
        }
        Command::Prolate { t, w, modes, quad, csv } => {
            let cfg = ProlateConfig::new(parse_real(t)?, parse_real(w)?, *modes, *quad)?;
            let r = run_prolate(&cfg)?;
            if let Some(path) = csv {
                let f = std::fs::File::create(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
                write_modes_csv(&r.modes, f)?;
            }
            let pass = r.commutator_residual <= 1e-8
                && r.max_cross_residual_leading <= 1e-6
                && (r.shannon_count as f64 - r.shannon.round()).abs() <= 1.0;
            let mut rep = Report::new("prolate", pass, NUMERIC_SCOPE, to_value(&cfg));
            rep.residuals = json!({
                "commutator": r.commutator_residual,
                "max_cross_leading_half": r.max_cross_residual_leading,
                "quadrature_change": r.quadrature_change,
            });
            rep.dimensions = json!({"modes": cfg.n_modes, "shannon_number": r.shannon, "shannon_count": r.shannon_count});
            rep.details = to_value(&r);
            rep
        }
    };
    report.seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn verify_triple(file: &PathBuf) -> Result<Report, InputError> {
    let p = load_problem(file)?;
    let left = match (&p.left_op, &p.f) {
        (Some(l), Some(f)) => Some(check_left_eigen(l, &p.psi, f)?),
        _ => None,
    };
    let right = match (&p.right_op, &p.theta) {
        (Some(b), Some(t)) => Some(check_right_eigen(&p.psi, b, t)?),
        _ => None,
    };
    if left.is_none() && right.is_none() {
        return Err(InputError(format!("{}: needs left_op with f, or right_op with theta", file.display())));
    }
    let pass = left.iter().chain(&right).all(|v| v.holds);
    let inputs = json!({"file": file.display().to_string(), "description": p.description, "n": p.n, "convention": p.convention()});
    let mut rep = Report::new("verify-triple", pass, EXACT_SCOPE, inputs);
    let witness = |v: &crate::operators::Verdict| v.witness.as_ref().map(|(i, j, e)| json!({"row": i, "col": j, "entry": e.to_string()}));
    rep.details = json!({
        "left_holds": left.as_ref().map(|v| v.holds),
        "right_holds": right.as_ref().map(|v| v.holds),
        "left_witness": left.as_ref().and_then(witness),
        "right_witness": right.as_ref().and_then(witness),
    });
    rep.residuals = json!({
        "left": left.as_ref().map(|v| matrf_grid(&v.residual)),
        "right": right.as_ref().map(|v| matrf_grid(&v.residual)),
    });
    Ok(rep)
}

fn solve_algebra(
    file: &PathBuf,
    side: Side,
    d: Option<i64>,
    mode: Option<&str>,
    op_order: Option<usize>,
    num_deg: Option<usize>,
) -> Result<Report, InputError> {
    let mut p = load_problem(file)?;
    let d = degree(d, p.bounds.degree.unwrap_or(3))?;
    p.bounds.degree = Some(d);
    if let Some(m) = mode {
        p.bounds.mode = Some(match m {
            "members" => SliceMode::Members,
            "truncations" => SliceMode::Truncations,
            other => return Err(InputError(format!("unknown mode `{other}` (expected members or truncations)"))),
        });
    }
    if op_order.is_some() {
        p.bounds.op_order = op_order;
    }
    if num_deg.is_some() {
        p.bounds.num_deg = num_deg;
    }
    let (bounds, mode) = p.ansatz_bounds(side, d)?;
    let inputs = json!({"file": file.display().to_string(), "side": side, "degree": d, "mode": mode, "bounds": p.bounds});
    let (slice, details) = if p.bounds.op_order.is_some() {
        let (slice, stats) = eigen_slice(&p.psi, side, &bounds)?;
        (slice, json!({"schedule": "fixed", "stats": stats}))
    } else {
        let (slice, conv) = stabilize_default(&p.psi, side, d, mode, &p.basis)?;
        (slice, json!({"schedule": "default", "convergence": conv}))
    };
    let unital = slice.identity_member();
    let mut rep = Report::new("solve-algebra", unital, EXACT_SCOPE, inputs);
    rep.details = details;
    rep.details["identity_member"] = json!(unital);
    rep.dimensions = json!({"profile": slice.dimension_profile(), "dimension": slice.dim()});
    rep.bases = to_value(&slice.serialize());
    Ok(rep)
}

fn check_presentation(example: &str, path: &PathBuf, d: Option<i64>, relaxed: bool) -> Result<Report, InputError> {
    let id: ExampleId = example.parse()?;
    let gamma = if relaxed { id.gamma().relaxed(EX2_RELAXED_ENTRY) } else { id.gamma() };
    let d = degree(d, gamma.threshold + 2)?;
    let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let doc: AssignmentDoc = serde_json::from_str(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let a = GeneratorAssignment::from_doc(&doc)?;
    let spec = PresentationSpec::catalog(id);
    let relations = check_relations(&spec, &a)?;
    let membership: Vec<(String, bool)> = a
        .values
        .iter()
        .map(|(name, p)| gamma.membership(p).map(|m| (name.clone(), m.holds)))
        .collect::<Result<_, _>>()?;
    let surj = surjectivity_check(&gamma, &a, d);
    let pass = relations.iter().all(|r| r.zero) && membership.iter().all(|(_, ok)| *ok) && surj.equal;
    let mut rep = Report::new("check-presentation", pass, EXACT_SCOPE, json!({"example": id, "relaxed": relaxed, "degree": d, "assignment": doc}));
    rep.residuals = to_value(&relations);
    rep.dimensions = json!({"generated": surj.generated_dims, "target": surj.target_dims});
    rep.details = json!({
        "relations_hold": relations.iter().all(|r| r.zero),
        "membership": membership.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<String, Value>>(),
        "surjective": surj.equal,
        "missing": surj.missing,
        "injectivity": "not checked",
    });
    Ok(rep)
}

fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        // an already-initialized global pool keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses `args`, runs the command, writes the report and returns the exit
/// code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("usage error"));
            return 2;
        }
    };
    init_threads();
    let report = match execute(&cli.command) {
        Ok(r) => r,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("error: {}: {e}", path.display());
                return 2;
            }
        }
        None => println!("{text}"),
    }
    if report.passed() {
        0
    } else {
        1
    }
}
