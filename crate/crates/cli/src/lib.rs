//! Command-line front end for `blockalg`.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage or input errors.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use blockalg::halfder::{check_map, classify};
use blockalg::homlie::{hom_jacobi_check, MapExpr};
use blockalg::scalar::ParamField;
use blockalg::specdsl::{builtin_algebra, parse_spec, print_spec};
use blockalg::tpverify::{
    builtin_tp, left_mult_map, verify_associative, verify_supercommutative_grading, verify_transposed_leibniz,
    ProductTable, TpStructure,
};
use blockalg::{Algebra, AlgebraSpec, Parity, QMode, RatFunc, Rational, VerificationReport, Violation, Window};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "blockalg", version, about = "Exact computations on the Block algebra B(q) and superalgebra S(q)")]
pub struct Cli {
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print nothing; report through the exit code only.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct AlgebraArgs {
    /// Built-in algebra: B or S.
    #[arg(long, conflicts_with = "spec")]
    pub algebra: Option<String>,
    /// Path to a .alg file.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check antisymmetry and the Jacobi identity on a window.
    VerifyAlgebra {
        #[command(flatten)]
        algebra: AlgebraArgs,
        /// "generic" or an exact rational such as 3 or -7/2.
        #[arg(long, allow_hyphen_values = true)]
        q: QMode,
        #[arg(long, default_value = "3x3")]
        window: Window,
    },
    /// Stabilized ½-(super)derivations over a range of degrees.
    Classify {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long, allow_hyphen_values = true)]
        q: QMode,
        #[arg(long, default_value = "even")]
        shift: Parity,
        /// Degree bounds "R,S" (|r| <= R, |s| <= S); defaults to the smallest window.
        #[arg(long, value_parser = parse_bounds)]
        bounds: Option<(i64, i64)>,
        /// Nested window ladder, e.g. 3x3,4x4,5x5.
        #[arg(long, value_delimiter = ',')]
        windows: Option<Vec<Window>>,
        /// Exit 1 unless the total stable dimension equals this value.
        #[arg(long)]
        expect: Option<usize>,
    },
    /// Check the transposed Poisson axioms for a product.
    VerifyTp {
        #[arg(long, conflicts_with = "json", required_unless_present = "json")]
        structure: Option<TpStructure>,
        /// Product table in the report JSON format.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Built-in algebra; inferred from the product when omitted.
        #[arg(long)]
        algebra: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        q: QMode,
        #[arg(long, default_value = "3x3")]
        window: Window,
    },
    /// Check the Hom-Jacobi identity for a combination of named maps.
    HomCheck {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long, allow_hyphen_values = true)]
        q: QMode,
        /// e.g. "id + alpha", "gamma", "shift".
        #[arg(long)]
        map: MapExpr,
        #[arg(long, default_value = "3x3")]
        window: Window,
    },
    /// Parse a .alg file and print its rules and canonical form.
    ParseSpec {
        #[command(flatten)]
        algebra: AlgebraArgs,
    },
}

fn parse_bounds(s: &str) -> Result<(i64, i64), String> {
    let bad = || format!("expected R,S with non-negative integers, got {s:?}");
    let (r, t) = s.split_once(',').ok_or_else(bad)?;
    let r: i64 = r.trim().parse().map_err(|_| bad())?;
    let t: i64 = t.trim().parse().map_err(|_| bad())?;
    if r < 0 || t < 0 {
        return Err(bad());
    }
    Ok((r, t))
}

/// What a run produced: exit code plus the text for stdout and stderr.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
pub struct CliError(String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CliError {}

fn fail(e: impl fmt::Display) -> CliError {
    CliError(e.to_string())
}

/// A finished command: its JSON report and whether every check passed.
#[derive(Clone, Debug)]
pub struct Report {
    pub json: serde_json::Value,
    pub pass: bool,
    pub message: Option<String>,
}

impl Report {
    fn new(value: impl Serialize, pass: bool) -> Result<Self, CliError> {
        Ok(Report { json: serde_json::to_value(value).map_err(fail)?, pass, message: None })
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn load_builtin(name: &str) -> Result<AlgebraSpec, CliError> {
    builtin_algebra(name).map_err(fail)
}

impl AlgebraArgs {
    fn load(&self) -> Result<AlgebraSpec, CliError> {
        match (&self.algebra, &self.spec) {
            (Some(name), None) => load_builtin(name),
            (None, Some(path)) => parse_spec(&read(path)?).map_err(|e| CliError(format!("{}: {e}", path.display()))),
            _ => Err(CliError("give exactly one of --algebra or --spec".into())),
        }
    }
}

macro_rules! dispatch {
    ($mode:expr, $f:ident ( $($arg:expr),* )) => {
        match $mode {
            QMode::Generic => $f::<RatFunc>($($arg),*),
            QMode::Fixed(_) => $f::<Rational>($($arg),*),
        }
    };
}

fn algebra<F: ParamField>(spec: &AlgebraSpec, mode: &QMode) -> Result<Algebra<F>, CliError> {
    Algebra::new(spec, mode).map_err(fail)
}

#[derive(Serialize)]
struct AlgebraReport {
    algebra: String,
    q: QMode,
    window: Window,
    antisymmetry: VerificationReport,
    jacobi: VerificationReport,
    pass: bool,
}

fn verify_algebra<F: ParamField>(spec: &AlgebraSpec, mode: &QMode, w: &Window) -> Result<Report, CliError> {
    let alg: Algebra<F> = algebra(spec, mode)?;
    let antisymmetry = alg.verify_antisymmetry(w).map_err(fail)?;
    let jacobi = alg.verify_jacobi(w).map_err(fail)?;
    let pass = antisymmetry.pass && jacobi.pass;
    Report::new(AlgebraReport { algebra: spec.name.clone(), q: mode.clone(), window: *w, antisymmetry, jacobi, pass }, pass)
}

/// Window ladder used by `classify` when `--windows` is not given.
pub fn default_ladder(is_super: bool, shift: Parity) -> Vec<Window> {
    let ladder = match (is_super, shift) {
        (false, _) => "4x6,5x7",
        (true, Parity::Even) => "3x3,4x4,5x5",
        (true, Parity::Odd) => "4x7,5x8",
    };
    ladder.split(',').map(|w| w.parse().expect("valid ladder")).collect()
}

fn run_classify<F: ParamField>(
    spec: &AlgebraSpec,
    mode: &QMode,
    shift: Parity,
    bounds: Option<(i64, i64)>,
    windows: &[Window],
    expect: Option<usize>,
) -> Result<Report, CliError> {
    let alg: Algebra<F> = algebra(spec, mode)?;
    let small = windows.first().ok_or_else(|| CliError("empty window ladder".into()))?;
    let bounds = bounds.unwrap_or((small.m_max, small.i_max));
    let report = classify(&alg, shift, bounds, windows).map_err(fail)?;
    let (pass, message) = match expect {
        Some(n) if n != report.total_dim => (false, Some(format!("expected total dimension {n}, got {}", report.total_dim))),
        _ => (true, None),
    };
    let mut out = Report::new(&report, pass)?;
    out.message = message;
    Ok(out)
}

#[derive(Serialize)]
struct TpReport {
    structure: String,
    algebra: String,
    q: QMode,
    window: Window,
    grading: VerificationReport,
    associativity: VerificationReport,
    transposed_leibniz: VerificationReport,
    left_multiplication: VerificationReport,
    pass: bool,
}

/// Every left multiplication by a support element must be a ½-(super)derivation.
fn left_multiplications<F: ParamField>(alg: &Algebra<F>, prod: &ProductTable<F>, w: &Window) -> Result<VerificationReport, CliError> {
    let mut parts = Vec::new();
    for z in prod.support() {
        match left_mult_map(prod, &z, w) {
            Ok(map) => parts.push(check_map(alg, &map, w).map_err(fail)?),
            Err(e) => parts.push(VerificationReport {
                checked: 1,
                violations: vec![Violation { indices: vec![z], lhs: e.to_string(), rhs: "homogeneous".into() }],
                truncated: 0,
                pass: false,
                notes: Vec::new(),
            }),
        }
    }
    Ok(VerificationReport::combine(parts))
}

fn verify_tp<F: ParamField>(
    label: &str,
    spec: &AlgebraSpec,
    prod: Result<ProductTable<F>, CliError>,
    mode: &QMode,
    w: &Window,
) -> Result<Report, CliError> {
    let prod = prod?;
    let alg: Algebra<F> = algebra(spec, mode)?;
    let grading = verify_supercommutative_grading(&prod);
    let associativity = verify_associative(&prod, w);
    let transposed_leibniz = verify_transposed_leibniz(&alg, &prod, w).map_err(fail)?;
    let left_multiplication = left_multiplications(&alg, &prod, w)?;
    let pass = grading.pass && associativity.pass && transposed_leibniz.pass && left_multiplication.pass;
    Report::new(
        TpReport {
            structure: label.to_string(),
            algebra: spec.name.clone(),
            q: mode.clone(),
            window: *w,
            grading,
            associativity,
            transposed_leibniz,
            left_multiplication,
            pass,
        },
        pass,
    )
}

fn builtin_product<F: ParamField>(s: TpStructure, mode: &QMode) -> Result<ProductTable<F>, CliError> {
    builtin_tp(s, mode).map_err(fail)
}

fn json_product<F: ParamField>(text: &str) -> Result<ProductTable<F>, CliError> {
    ProductTable::from_json_str(text).map_err(fail)
}

fn hom_check<F: ParamField>(spec: &AlgebraSpec, mode: &QMode, map: &MapExpr, w: &Window) -> Result<Report, CliError> {
    let alg: Algebra<F> = algebra(spec, mode)?;
    let phi = map.build::<F>(mode, w, spec.is_super).map_err(fail)?;
    let report = hom_jacobi_check(&alg, &phi, w).map_err(fail)?;
    let pass = report.pass;
    Report::new(report, pass)
}

#[derive(Serialize)]
struct RuleJson {
    left: Parity,
    right: Parity,
    symmetry: &'static str,
    coefficient: String,
}

#[derive(Serialize)]
struct SpecJson {
    algebra: String,
    #[serde(rename = "super")]
    is_super: bool,
    rules: Vec<RuleJson>,
    canonical: String,
}

fn spec_json(spec: &AlgebraSpec) -> SpecJson {
    SpecJson {
        algebra: spec.name.clone(),
        is_super: spec.is_super,
        rules: spec
            .rules
            .iter()
            .map(|r| RuleJson { left: r.left, right: r.right, symmetry: r.symmetry.name(), coefficient: r.coefficient.to_string() })
            .collect(),
        canonical: print_spec(spec),
    }
}

/// Runs a parsed command.
pub fn execute(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::VerifyAlgebra { algebra, q, window } => {
            let spec = algebra.load()?;
            dispatch!(q, verify_algebra(&spec, q, window))
        }
        Command::Classify { algebra, q, shift, bounds, windows, expect } => {
            let spec = algebra.load()?;
            let ladder = windows.clone().unwrap_or_else(|| default_ladder(spec.is_super, *shift));
            dispatch!(q, run_classify(&spec, q, *shift, *bounds, &ladder, *expect))
        }
        Command::VerifyTp { structure, json, algebra, q, window } => {
            let (label, is_super, text) = match (structure, json) {
                (Some(s), _) => (s.name().to_string(), matches!(s, TpStructure::SuperFull | TpStructure::SuperEven), None),
                (None, Some(path)) => {
                    let text = read(path)?;
                    let head: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
                    let is_super = head.get("super").and_then(|v| v.as_bool()).unwrap_or(false);
                    (path.display().to_string(), is_super, Some(text))
                }
                (None, None) => return Err(CliError("give --structure or --json".into())),
            };
            let spec = load_builtin(algebra.as_deref().unwrap_or(if is_super { "S" } else { "B" }))?;
            match (structure, text) {
                (Some(s), _) => dispatch!(q, verify_tp(&label, &spec, builtin_product(*s, q), q, window)),
                (None, Some(text)) => dispatch!(q, verify_tp(&label, &spec, json_product(&text), q, window)),
                (None, None) => unreachable!("checked above"),
            }
        }
        Command::HomCheck { algebra, q, map, window } => {
            let spec = algebra.load()?;
            dispatch!(q, hom_check(&spec, q, map, window))
        }
        Command::ParseSpec { algebra } => {
            let spec = algebra.load()?;
            Report::new(spec_json(&spec), true)
        }
    }
}

/// Parses arguments, runs the command and renders output, without touching the process.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            };
        }
    };
    let report = match execute(&cli.command) {
        Ok(r) => r,
        Err(e) => return Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {e}\n") },
    };
    let mut text = serde_json::to_string_pretty(&report.json).expect("JSON values serialize");
    text.push('\n');
    let mut stderr = report.message.map(|m| format!("{m}\n")).unwrap_or_default();
    let mut stdout = String::new();
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                return Outcome { code: EXIT_USAGE, stdout, stderr: format!("error: {}: {e}\n", path.display()) };
            }
        }
        None if !cli.quiet => stdout = text,
        None => {}
    }
    if cli.quiet {
        stderr.clear();
    }
    Outcome { code: if report.pass { EXIT_PASS } else { EXIT_FAIL }, stdout, stderr }
}
