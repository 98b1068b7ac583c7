//! Command-line front end for the lattice computations.

pub mod dsl;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use enriques_core::decompose::{extremal_decompose, isotropic_decompose, ten_frame};
use enriques_core::invariants::{case_classify, generic_gonality, min_pairing_isotropic, mu_capped};
use enriques_core::oracle::parity_check;
use enriques_core::verify::{run_sweep, Check, SweepSpec};
use enriques_core::{EnriquesLattice, Error};

use dsl::DslError;
use report::{Classification, ErrorReport, GengonSummary, InputClass, ReportDocument, ReportResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_OVERFLOW: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "enriques", version, about = "Gonality invariants of classes in U ⊕ E8(-1)")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Worker threads for verify and oracle-check (0 = all cores).
    #[arg(long, default_value_t = 0, global = true)]
    pub threads: usize,
    /// Sampling seed; changes evaluation order and oracle anchors only.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ExprArg {
    /// Class expression, e.g. "let E1,E2 = isotropic(E1.E2=1); 3*E1 + 5*E2".
    pub expr: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// φ, μ, gengon, tags and the mingon interval.
    Invariants(ExprArg),
    Phi(ExprArg),
    Mu {
        expr: String,
        /// Largest B·L searched (default 2φ + 2).
        #[arg(long)]
        cap: Option<i64>,
    },
    Gengon(ExprArg),
    Classify(ExprArg),
    /// Write L as a combination of isotropic classes.
    Decompose(ExprArg),
    /// Ten isotropic classes F with F·D = 3 summing to 3D.
    TenFrame(ExprArg),
    /// Witnesses for L² = φ² or L² = φ² + φ - 2.
    Extremal(ExprArg),
    /// Check the gonality statements on every class in a coordinate box.
    Verify {
        #[arg(long)]
        radius: i64,
        /// Comma separated checks, or `all`.
        #[arg(long, default_value = "all")]
        checks: String,
        #[arg(long)]
        max_l2: Option<i64>,
        /// Skip the explicit type and table constructions.
        #[arg(long)]
        no_fixtures: bool,
    },
    /// Compare the enumerator with the brute-force box search.
    OracleCheck {
        #[arg(long)]
        radius: i64,
        #[arg(long, default_value_t = 50)]
        anchors: usize,
    },
}

/// What a run prints and returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub document: Option<ReportDocument>,
}

enum Failure {
    Dsl(DslError),
    Core(Error),
}

impl From<DslError> for Failure {
    fn from(e: DslError) -> Self {
        match e {
            DslError::Lattice(e) => Failure::Core(e),
            other => Failure::Dsl(other),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Dsl(_) => EXIT_INPUT,
            Failure::Core(Error::TheoremViolation(_) | Error::DecompositionNotFound(_)) => EXIT_VIOLATION,
            Failure::Core(Error::Overflow(_)) => EXIT_OVERFLOW,
            Failure::Core(_) => EXIT_INPUT,
        }
    }

    fn report(&self) -> ErrorReport {
        let kind = match self.code() {
            EXIT_VIOLATION => "theorem_violation",
            EXIT_OVERFLOW => "overflow",
            _ => "input",
        };
        let message = match self {
            Failure::Dsl(e) => e.to_string(),
            Failure::Core(e) => e.to_string(),
        };
        ErrorReport {
            kind: kind.into(),
            message,
        }
    }
}

fn input(lat: &EnriquesLattice, expr: &str) -> Result<InputClass, Failure> {
    let class = dsl::resolve(lat, expr)?;
    Ok(InputClass {
        expression: expr.to_string(),
        class,
        l_squared: lat.norm(&class),
    })
}

fn evaluate(cli: &Cli, lat: &EnriquesLattice) -> Result<(Vec<InputClass>, ReportResult, i32), Failure> {
    let one = |expr: &str| -> Result<(InputClass, enriques_core::LatticeClass), Failure> {
        let i = input(lat, expr)?;
        let c = i.class;
        Ok((i, c))
    };
    let (inputs, result) = match &cli.command {
        Command::Invariants(a) => {
            let (i, l) = one(&a.expr)?;
            (vec![i], ReportResult::Invariants(generic_gonality(lat, &l)?))
        }
        Command::Phi(a) => {
            let (i, l) = one(&a.expr)?;
            (vec![i], ReportResult::Phi(min_pairing_isotropic(lat, &l)?))
        }
        Command::Mu { expr, cap } => {
            let (i, l) = one(expr)?;
            (vec![i], ReportResult::Mu(mu_capped(lat, &l, *cap)?))
        }
        Command::Gengon(a) => {
            let (i, l) = one(&a.expr)?;
            let r = generic_gonality(lat, &l)?;
            let g = GengonSummary {
                gengon: r.gengon,
                two_phi: 2 * r.phi.value,
                mu: r.mu.value,
                mu_exact: r.mu.is_exact(),
                quarter_bound: r.quarter_bound,
                case_tag: r.case_tag,
            };
            (vec![i], ReportResult::Gengon(g))
        }
        Command::Classify(a) => {
            let (i, l) = one(&a.expr)?;
            let (case_tag, type_tag) = case_classify(lat, &l)?;
            let phi = min_pairing_isotropic(lat, &l)?.value;
            let c = Classification {
                l_squared: i.l_squared,
                phi,
                case_tag,
                type_tag,
            };
            (vec![i], ReportResult::Classify(c))
        }
        Command::Decompose(a) => {
            let (i, l) = one(&a.expr)?;
            (vec![i], ReportResult::Decompose(isotropic_decompose(lat, &l)?))
        }
        Command::TenFrame(a) => {
            let (i, l) = one(&a.expr)?;
            (vec![i], ReportResult::TenFrame(ten_frame(lat, &l)?))
        }
        Command::Extremal(a) => {
            let (i, l) = one(&a.expr)?;
            (vec![i], ReportResult::Extremal(extremal_decompose(lat, &l)?))
        }
        Command::Verify {
            radius,
            checks,
            max_l2,
            no_fixtures,
        } => {
            let spec = SweepSpec {
                radius: *radius,
                max_l2: *max_l2,
                checks: Check::parse_list(checks)?,
                inject_fixtures: !no_fixtures,
                threads: cli.threads,
                seed: cli.seed,
            };
            let r = run_sweep(lat, &spec)?;
            let code = if r.total_failures() > 0 { EXIT_VIOLATION } else { EXIT_OK };
            return Ok((Vec::new(), ReportResult::Verify(r), code));
        }
        Command::OracleCheck { radius, anchors } => {
            let r = parity_check(lat, *radius, *anchors, cli.seed.unwrap_or(0), cli.threads)?;
            let code = if r.discrepancies.is_empty() { EXIT_OK } else { EXIT_VIOLATION };
            return Ok((Vec::new(), ReportResult::OracleCheck(r), code));
        }
    };
    Ok((inputs, result, EXIT_OK))
}

fn render(cli: &Cli, doc: &ReportDocument) -> String {
    match cli.format {
        Format::Json => {
            let mut s = doc.to_json();
            s.push('\n');
            s
        }
        Format::Text => doc.to_text(),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == EXIT_OK { (text, String::new()) } else { (String::new(), text) };
            return Outcome {
                code,
                stdout,
                stderr,
                document: None,
            };
        }
    };
    let command: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let lat = EnriquesLattice::standard();
    let (doc, code, stderr) = match evaluate(&cli, lat) {
        Ok((inputs, result, code)) => {
            let doc = ReportDocument::new(command, inputs, result);
            let note = match code {
                EXIT_VIOLATION => "counterexamples found\n".to_string(),
                _ => String::new(),
            };
            (doc, code, note)
        }
        Err(f) => {
            let err = f.report();
            let msg = format!("error: {}\n", err.message);
            (ReportDocument::new(command, Vec::new(), ReportResult::Error(err)), f.code(), msg)
        }
    };
    let mut stdout = match (&doc.result, cli.format) {
        (ReportResult::Error(_), Format::Text) => String::new(),
        _ => render(&cli, &doc),
    };
    let mut stderr = stderr;
    if let Some(path) = &cli.output {
        if let Err(e) = std::fs::write(path, render(&cli, &doc)) {
            stderr.push_str(&format!("error: cannot write {}: {e}\n", path.display()));
            stdout.clear();
            return Outcome {
                code: EXIT_INPUT,
                stdout,
                stderr,
                document: Some(doc),
            };
        }
    }
    Outcome {
        code,
        stdout,
        stderr,
        document: Some(doc),
    }
}
