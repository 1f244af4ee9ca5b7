//! Command-line front end.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::bratteli::{tripled_substitution, StationaryOrderedDiagram};
use crate::corpus::DEFAULT_SEED;
use crate::kgroup::report::{kgroup_report, Int, ReportOptions};
use crate::kgroup::{check_preconditions, classical_dimension_group, KGroupError, PERIODICITY_WINDOW};
use crate::substitution::{parse_substitution, ParseError, Periodicity, Substitution};
use crate::verify::{run_verification, VerifyError, VerifyOptions};

#[derive(Debug, Parser)]
#[command(name = "subk0", version, about = "Dimension groups of primitive substitutions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Level span for interval constraints and path checks (1..=8).
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=8))]
    pub levels: u8,
    /// Largest number of incidence steps tried for absorption (1..=16).
    #[arg(long = "max-k", global = true, default_value_t = 8, value_parser = clap::value_parser!(u8).range(1..=16))]
    pub max_k: u8,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for the randomized checks of `verify`.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Alphabet, incidence matrix, primitivity, properness, aperiodicity.
    Info { input: PathBuf },
    /// The 3-block alphabet and substitution.
    Triple { input: PathBuf },
    /// K⁰ group through the 3-block substitution (JSON report by default).
    Kgroup { input: PathBuf },
    /// Dimension group of the plain incidence limit.
    Classical { input: PathBuf },
    /// Runs every verification check.
    Verify { input: PathBuf },
    /// Graphviz rendering of the diagram.
    ExportDot {
        input: PathBuf,
        /// Export the tripled diagram instead.
        #[arg(long)]
        triple: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Info,
    Triple,
    Kgroup,
    Classical,
    Verify,
    ExportDot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub input_path: PathBuf,
    pub levels: usize,
    pub max_k: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub triple: bool,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        let (command, input_path, triple) = match cli.command {
            Command::Info { input } => (CommandKind::Info, input, false),
            Command::Triple { input } => (CommandKind::Triple, input, false),
            Command::Kgroup { input } => (CommandKind::Kgroup, input, false),
            Command::Classical { input } => (CommandKind::Classical, input, false),
            Command::Verify { input } => (CommandKind::Verify, input, false),
            Command::ExportDot { input, triple } => (CommandKind::ExportDot, input, triple),
        };
        let default = match command {
            CommandKind::Kgroup => Format::Json,
            CommandKind::ExportDot => Format::Dot,
            _ => Format::Text,
        };
        RunConfig {
            command,
            input_path,
            levels: cli.levels.into(),
            max_k: cli.max_k.into(),
            output: cli.out,
            format: cli.format.unwrap_or(default),
            seed: cli.seed,
            triple,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Precondition(String),
    #[error("format {0:?} is not available for this command")]
    Format(Format),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Precondition(_) => 2,
            _ => 1,
        }
    }
}

impl From<KGroupError> for CliError {
    fn from(e: KGroupError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::KGroup(k) => k.into(),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

/// Rendered artifact plus exit status (0, or 3 when a cap cut a
/// computation short and the output is partial).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    pub text: String,
    pub exit_code: i32,
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("value serializes") + "\n"
}

pub fn run(config: &RunConfig) -> Result<RunOutput, CliError> {
    let text = std::fs::read_to_string(&config.input_path)
        .map_err(|source| CliError::Read { path: config.input_path.clone(), source })?;
    let s = parse_substitution(&text)?;
    let output = render(config, &s)?;
    if let Some(path) = &config.output {
        std::fs::write(path, &output.text).map_err(|source| CliError::Write { path: path.clone(), source })?;
    }
    Ok(output)
}

fn ok(text: String) -> Result<RunOutput, CliError> {
    Ok(RunOutput { text, exit_code: 0 })
}

fn render(config: &RunConfig, s: &Substitution) -> Result<RunOutput, CliError> {
    match (config.command, config.format) {
        (CommandKind::ExportDot, Format::Dot) => {}
        (CommandKind::ExportDot, f) | (_, f @ Format::Dot) => return Err(CliError::Format(f)),
        _ => {}
    }
    match config.command {
        CommandKind::Info => {
            check_preconditions(s)?;
            info(config, s)
        }
        CommandKind::Triple => {
            check_preconditions(s)?;
            triple(config, s)
        }
        CommandKind::Kgroup => {
            let opts = ReportOptions { levels: config.levels, max_k: config.max_k, ..Default::default() };
            let report = kgroup_report(s, opts)?;
            let text = if config.format == Format::Json { report.to_json() } else { report.to_text() };
            Ok(RunOutput { text, exit_code: if report.cap_exceeded() { 3 } else { 0 } })
        }
        CommandKind::Classical => classical(config, s),
        CommandKind::Verify => {
            let opts = VerifyOptions { levels: config.levels, max_k: config.max_k, seed: config.seed };
            let report = run_verification(s, opts)?;
            let text = if config.format == Format::Json { report.to_json() } else { report.to_text() };
            let capped = report.checks.iter().any(|c| {
                c.status == crate::verify::CheckStatus::Fail && matches!(c.name, "absorption" | "b_stabilized")
            });
            Ok(RunOutput { text, exit_code: if capped { 3 } else { 0 } })
        }
        CommandKind::ExportDot => {
            if !s.is_primitive() {
                return Err(KGroupError::NotPrimitive.into());
            }
            let d = if config.triple {
                StationaryOrderedDiagram::from_substitution(&tripled_substitution(s).substitution)
            } else {
                StationaryOrderedDiagram::from_substitution(s)
            };
            ok(d.to_dot(config.levels))
        }
    }
}

#[derive(Serialize)]
struct InfoReport {
    alphabet: Vec<String>,
    rules: Vec<String>,
    incidence_matrix: Vec<Vec<Int>>,
    primitive: bool,
    proper: bool,
    properly_ordered_diagram: bool,
    aperiodicity: String,
}

fn periodicity_text(p: Periodicity) -> String {
    match p {
        Periodicity::Aperiodic => "aperiodic".into(),
        Periodicity::Periodic(n) => format!("periodic (least period {n})"),
        Periodicity::Unknown => "unknown".into(),
    }
}

fn info(config: &RunConfig, s: &Substitution) -> Result<RunOutput, CliError> {
    let m = s.incidence_matrix().0;
    let report = InfoReport {
        alphabet: s.alphabet().symbols().to_vec(),
        rules: s.to_file_format().lines().map(str::to_string).collect(),
        incidence_matrix: m.row_vecs().into_iter().map(|r| r.into_iter().map(Int).collect()).collect(),
        primitive: s.is_primitive(),
        proper: s.is_proper(),
        properly_ordered_diagram: StationaryOrderedDiagram::from_substitution(s).proper_order().is_proper(),
        aperiodicity: periodicity_text(s.periodicity(PERIODICITY_WINDOW)),
    };
    if config.format == Format::Json {
        return ok(json(&report));
    }
    let mut out = String::new();
    let _ = writeln!(out, "alphabet: {}", report.alphabet.join(" "));
    for r in &report.rules {
        let _ = writeln!(out, "  {r}");
    }
    let _ = write!(out, "incidence matrix (entry a,b counts a in σ(b)):\n{m}");
    let _ = writeln!(out, "primitive: {}", report.primitive);
    let _ = writeln!(out, "proper: {}", report.proper);
    let _ = writeln!(out, "properly ordered diagram: {}", report.properly_ordered_diagram);
    let _ = writeln!(out, "aperiodicity: {}", report.aperiodicity);
    ok(out)
}

#[derive(Serialize)]
struct TripleReport {
    triples: Vec<String>,
    rules: Vec<TripleRule>,
}

#[derive(Serialize)]
struct TripleRule {
    letter: String,
    image: Vec<String>,
}

fn triple(config: &RunConfig, s: &Substitution) -> Result<RunOutput, CliError> {
    let q = tripled_substitution(s).substitution;
    let a = q.alphabet();
    if config.format == Format::Json {
        let report = TripleReport {
            triples: a.symbols().to_vec(),
            rules: a
                .letters()
                .map(|t| TripleRule {
                    letter: a.symbol(t).to_string(),
                    image: q.image(t).iter().map(|&l| a.symbol(l).to_string()).collect(),
                })
                .collect(),
        };
        return ok(json(&report));
    }
    let mut out = format!("3-blocks ({}): {}\n", a.len(), a.symbols().join(" "));
    out.push_str(&q.to_file_format());
    ok(out)
}

#[derive(Serialize)]
struct ClassicalReport {
    alphabet: Vec<String>,
    stable_rank: usize,
    torsion: Vec<Int>,
    char_poly: String,
    stable_matrix: Vec<Vec<Int>>,
    perron_eigenvalue: Option<f64>,
}

fn classical(config: &RunConfig, s: &Substitution) -> Result<RunOutput, CliError> {
    let g = classical_dimension_group(s)?;
    let report = ClassicalReport {
        alphabet: s.alphabet().symbols().to_vec(),
        stable_rank: g.stable_rank,
        torsion: g.stable_torsion.iter().cloned().map(Int).collect(),
        char_poly: g.stable_matrix.char_poly().to_string(),
        stable_matrix: g.stable_matrix.row_vecs().into_iter().map(|r| r.into_iter().map(Int).collect()).collect(),
        perron_eigenvalue: g.perron.as_ref().map(|p| p.eigenvalue),
    };
    if config.format == Format::Json {
        return ok(json(&report));
    }
    let mut out = String::new();
    let _ = writeln!(out, "{}", g.invariants());
    let _ = write!(out, "stable matrix:\n{}", g.stable_matrix);
    if let Some(p) = report.perron_eigenvalue {
        let _ = writeln!(out, "Perron eigenvalue: {p}");
    }
    ok(out)
}
