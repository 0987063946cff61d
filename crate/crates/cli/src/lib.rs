//! Command-line front end: computes twists, coassociators and crystal bases
//! and writes them as JSON documents or aligned tables.
//!
//! Exit codes: 0 success, 1 verification failure, 2 degenerate or
//! unsupported sector, 3 input error.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use dktwist::linops::{self, DenseMatrix};
use dktwist::verify::{self, VerificationReport};
use dktwist::{coassoc, twist, Error as CoreError, QParam, SeriesSpec};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable holding the tolerance multiplier (≥ 1).
pub const TOL_ENV: &str = "DKTWIST_TOL";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_DEGENERATE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    Input(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                CoreError::InvalidSpec(_)
                | CoreError::InvalidQ(_)
                | CoreError::InvalidTolerance(_)
                | CoreError::IndexOutOfRange { .. } => EXIT_INPUT,
                CoreError::DegenerateSector { .. }
                | CoreError::UnsupportedAtZero
                | CoreError::SignAmbiguity { .. }
                | CoreError::LimitNotConverged { .. }
                | CoreError::ZeroDenominatorOrder { .. } => EXIT_DEGENERATE,
                _ => EXIT_VERIFY,
            },
            CliError::Input(_) | CliError::Io { .. } => EXIT_INPUT,
            CliError::Verification(_) => EXIT_VERIFY,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// A matrix with its provenance. Entries are row-major decimal strings
/// with 17 significant digits, which round-trip every `f64` exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputDocument {
    pub schema_version: u32,
    pub spec: String,
    pub q_from: String,
    pub q_to: String,
    pub dim: usize,
    pub label_order: Vec<String>,
    pub matrix: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<VerificationReport>,
}

pub fn format_entry(x: f64) -> String {
    format!("{x:.16e}")
}

impl OutputDocument {
    pub fn new(spec: &SeriesSpec, q_from: f64, q_to: f64, labels: Vec<String>, m: &DenseMatrix) -> Self {
        let dim = m.nrows();
        let mut matrix = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                matrix.push(format_entry(m[(r, c)]));
            }
        }
        OutputDocument {
            schema_version: SCHEMA_VERSION,
            spec: spec.to_string(),
            q_from: q_from.to_string(),
            q_to: q_to.to_string(),
            dim,
            label_order: labels,
            matrix,
            checks: None,
        }
    }

    pub fn from_f(f: &twist::FMatrix) -> Self {
        let labels = f.label_order.iter().map(|l| l.to_string()).collect();
        OutputDocument::new(&f.spec, f.q_from.value(), f.q_to.value(), labels, &f.matrix)
    }

    pub fn matrix_values(&self) -> CliResult<DenseMatrix> {
        let data = self
            .matrix
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| CliError::Input(format!("matrix entry `{s}` is not a number")))
            })
            .collect::<CliResult<Vec<f64>>>()?;
        Ok(linops::dense_from_row_major(self.dim, &data)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes") + "\n"
    }

    pub fn from_json(s: &str) -> CliResult<Self> {
        serde_json::from_str(s).map_err(|e| CliError::Input(format!("malformed document: {e}")))
    }

    pub fn to_table(&self) -> CliResult<String> {
        let m = self.matrix_values()?;
        let width = self.label_order.iter().map(|l| l.chars().count()).max().unwrap_or(0);
        let mut out = format!("{}  q_from {}  q_to {}  dim {}\n", self.spec, self.q_from, self.q_to, self.dim);
        for (r, label) in self.label_order.iter().enumerate() {
            out.push_str(&format!("{label:<width$}"));
            for c in 0..self.dim {
                out.push_str(&format!(" {:>10.6}", m[(r, c)]));
            }
            out.push('\n');
        }
        if let Some(report) = &self.checks {
            out.push_str(&report_table(report));
        }
        Ok(out)
    }
}

/// A sequence of `F^{[q_k 1]}` with the largest two-path composition
/// residual over consecutive grid points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub schema_version: u32,
    pub spec: String,
    pub documents: Vec<OutputDocument>,
    pub composition_residual: f64,
    pub tolerance: f64,
}

pub fn report_table(report: &VerificationReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!("{verdict} {:<40} {:>12.3e} <= {:.1e}\n", c.name, c.residual, c.tolerance));
    }
    out.push_str(if report.overall { "overall PASS\n" } else { "overall FAIL\n" });
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "dktwist", version, about = "Drinfel'd twist matrices for the classical series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Twist matrix F^{[q from]} on V ⊗ V.
    F {
        spec: String,
        #[arg(long)]
        q: String,
        #[arg(long, default_value = "1")]
        from: String,
        /// Attach the identity suite at q.
        #[arg(long)]
        checks: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the identity suite on a comma-separated grid of q values.
    Verify {
        spec: String,
        #[arg(long = "q-grid")]
        q_grid: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Crystal basis; row k holds the vector with label k.
    Crystal {
        spec: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coassociator on V ⊗ V ⊗ V.
    Phi {
        spec: String,
        #[arg(long)]
        q: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// F^{[q 1]} on a geometric grid with the composition residual.
    Sweep {
        spec: String,
        #[arg(long = "q-start")]
        q_start: String,
        #[arg(long = "q-end")]
        q_end: String,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn parse_spec(s: &str) -> CliResult<SeriesSpec> {
    Ok(s.parse::<SeriesSpec>()?)
}

pub fn parse_q(s: &str) -> CliResult<QParam> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::Input(format!("`{s}` is not a decimal number")))?;
    Ok(QParam::new(v)?)
}

pub fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let grid = s
        .split(',')
        .map(|t| parse_q(t).map(|q| q.value()))
        .collect::<CliResult<Vec<f64>>>()?;
    if grid.is_empty() {
        return Err(CliError::Input("empty q grid".into()));
    }
    Ok(grid)
}

/// Tolerance multiplier from the environment value, 1 when unset.
pub fn parse_tol(env: Option<&str>) -> CliResult<f64> {
    let Some(s) = env else { return Ok(1.0) };
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 1.0 => Ok(v),
        _ => Err(CliError::Input(format!("{TOL_ENV}={s}: expected a number >= 1"))),
    }
}

/// Writes via a temporary sibling file and a rename.
fn write_atomic(path: &Path, content: &str) -> CliResult<()> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, content).map_err(io_err)?;
    std::fs::rename(&tmp, path).map_err(io_err)
}

fn emit(content: &str, out: &Option<PathBuf>, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(path) => write_atomic(path, content),
        None => stdout.write_all(content.as_bytes()).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn render(doc: &OutputDocument, format: Format) -> CliResult<String> {
    match format {
        Format::Json => Ok(doc.to_json()),
        Format::Table => doc.to_table(),
    }
}

fn product_labels(n: usize, legs: usize) -> Vec<String> {
    let shape = linops::LegShape::uniform(n, legs);
    (0..shape.total())
        .map(|i| {
            shape
                .split(i)
                .iter()
                .map(|k| format!("e{}", k + 1))
                .collect::<Vec<_>>()
                .join("⊗")
        })
        .collect()
}

fn cmd_f(spec: &str, q: &str, from: &str, checks: bool, tol: f64) -> CliResult<OutputDocument> {
    let spec = parse_spec(spec)?;
    let (q, from) = (parse_q(q)?, parse_q(from)?);
    let f = twist::f_interval(&spec, q, from)?;
    let mut doc = OutputDocument::from_f(&f);
    if checks {
        let report = verify::run_suite_scaled(&spec, &[q.value()], tol)?;
        doc.checks = Some(report);
    }
    Ok(doc)
}

fn cmd_crystal(spec: &str) -> CliResult<OutputDocument> {
    let spec = parse_spec(spec)?;
    let basis = twist::crystal_basis(&spec)?;
    let labels = basis.labels.iter().map(|l| l.to_string()).collect();
    Ok(OutputDocument::new(&spec, 0.0, 0.0, labels, &basis.matrix().transpose()))
}

/// One line per crystal vector: `label = ±e_i⊗e_j`.
fn crystal_table(spec: &str) -> CliResult<String> {
    let spec = parse_spec(spec)?;
    let basis = twist::crystal_basis(&spec)?;
    let n = spec.n();
    let width = basis.labels.iter().map(|l| l.to_string().chars().count()).max().unwrap_or(0);
    let mut out = format!("{spec} crystal basis\n");
    for (label, v) in basis.labels.iter().zip(&basis.vectors) {
        let (idx, x) = v
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .expect("non-empty vector");
        let sign = if *x < 0.0 { "-" } else { "+" };
        out.push_str(&format!(
            "{:<width$} = {sign}e{}⊗e{}\n",
            label.to_string(),
            idx / n + 1,
            idx % n + 1
        ));
    }
    Ok(out)
}

fn cmd_phi(spec: &str, q: &str) -> CliResult<OutputDocument> {
    let spec = parse_spec(spec)?;
    let q = parse_q(q)?;
    let phi = coassoc::phi(&spec, q)?;
    let labels = product_labels(spec.n(), 3);
    Ok(OutputDocument::new(&spec, q.value(), q.value(), labels, &phi.matrix))
}

fn cmd_sweep(spec: &str, start: &str, end: &str, steps: usize, tol: f64) -> CliResult<SweepDocument> {
    let spec = parse_spec(spec)?;
    let (a, b) = (parse_q(start)?, parse_q(end)?);
    if a.value() <= 0.0 || b.value() <= 0.0 {
        return Err(CliError::Input("sweep endpoints must be positive".into()));
    }
    if steps < 2 {
        return Err(CliError::Input("sweep needs at least 2 steps".into()));
    }
    let (la, lb) = (a.value().ln(), b.value().ln());
    let grid: Vec<f64> = (0..steps)
        .map(|k| match k {
            0 => a.value(),
            k if k == steps - 1 => b.value(),
            k => (la + (lb - la) * k as f64 / (steps - 1) as f64).exp(),
        })
        .collect();
    let fs = grid
        .iter()
        .map(|&x| twist::f_interval(&spec, QParam::new(x)?, QParam::ONE))
        .collect::<Result<Vec<_>, CoreError>>()?;
    let mut worst: f64 = 0.0;
    for w in grid.windows(2) {
        let (q0, q1) = (QParam::new(w[0])?, QParam::new(w[1])?);
        worst = worst.max(verify::check_composition(&spec, QParam::ONE, q0, q1)?);
    }
    Ok(SweepDocument {
        schema_version: SCHEMA_VERSION,
        spec: spec.to_string(),
        documents: fs.iter().map(OutputDocument::from_f).collect(),
        composition_residual: worst,
        tolerance: verify::PAIR_TOL * tol,
    })
}

fn dispatch(cli: Cli, tol_env: Option<&str>, stdout: &mut dyn Write) -> CliResult<()> {
    let tol = parse_tol(tol_env)?;
    match cli.command {
        Command::F {
            spec,
            q,
            from,
            checks,
            format,
            out,
        } => {
            let doc = cmd_f(&spec, &q, &from, checks, tol)?;
            emit(&render(&doc, format)?, &out, stdout)?;
            if let Some(report) = &doc.checks {
                if !report.overall {
                    return Err(CliError::Verification(format!("{} check(s) failed", report.failures().count())));
                }
            }
            Ok(())
        }
        Command::Verify {
            spec,
            q_grid,
            format,
            out,
        } => {
            let s = parse_spec(&spec)?;
            let grid = parse_grid(&q_grid)?;
            let report = verify::run_suite_scaled(&s, &grid, tol)?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
                Format::Table => report_table(&report),
            };
            emit(&text, &out, stdout)?;
            report_outcome(&report)
        }
        Command::Crystal { spec, format, out } => {
            let text = match format {
                Format::Json => cmd_crystal(&spec)?.to_json(),
                Format::Table => crystal_table(&spec)?,
            };
            emit(&text, &out, stdout)
        }
        Command::Phi { spec, q, format, out } => {
            let doc = cmd_phi(&spec, &q)?;
            emit(&render(&doc, format)?, &out, stdout)
        }
        Command::Sweep {
            spec,
            q_start,
            q_end,
            steps,
            out,
        } => {
            let doc = cmd_sweep(&spec, &q_start, &q_end, steps, tol)?;
            let text = serde_json::to_string_pretty(&doc).expect("sweep serializes") + "\n";
            emit(&text, &out, stdout)?;
            if doc.composition_residual > doc.tolerance {
                return Err(CliError::Verification(format!(
                    "composition residual {:e} exceeds {:e}",
                    doc.composition_residual, doc.tolerance
                )));
            }
            Ok(())
        }
    }
}

/// `Ok` when every check passed.
pub fn report_outcome(report: &VerificationReport) -> CliResult<()> {
    if report.overall {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        Err(CliError::Verification(names.join(", ")))
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Diagnostics go to `stderr`.
pub fn run<I, T>(args: I, tol_env: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli, tol_env, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
