//! Batch driver for the weighted isoperimetric checks: reads a TOML
//! manifest, runs the requested checks, sweeps and searches, and writes
//! JSON-lines or CSV reports and profile tables.

pub mod manifest;
pub mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use weighted_iso::verify::{minimize_deficit, sweep};
use weighted_iso::{ProfileKind, Status, Verifier};

pub use manifest::{Action, Check, Manifest, ManifestError};
pub use output::{Format, Num, Record, Sink};

/// Exit code when every check passes.
pub const EXIT_OK: u8 = 0;
/// Exit code when some inequality or identity check fails.
pub const EXIT_FAILED: u8 = 1;
/// Exit code for configuration errors, hypothesis violations and checks
/// that could not be evaluated.
pub const EXIT_CONFIG: u8 = 2;

/// A failure that maps to [`EXIT_CONFIG`].
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Reads and validates a manifest; errors are prefixed with `path:line:column`.
pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("{}: cannot read manifest: {e}", path.display())))?;
    Manifest::parse(&text).map_err(|e| {
        let msg = match e.line {
            0 => format!("{}: {}", path.display(), e.message),
            line => format!("{}:{line}:{}: {}", path.display(), e.column, e.message),
        };
        ConfigError(msg).into()
    })
}

pub fn verifier(manifest: &Manifest) -> Result<Verifier> {
    let v = Verifier::new(
        manifest.manifold.clone(),
        manifest.density.clone(),
        manifest.rule.clone(),
    )
    .map_err(|e| ConfigError(e.to_string()))?;
    Ok(v.with_tolerances(manifest.tolerances)
        .with_error_estimate(manifest.error_estimate)
        .with_oracle(manifest.oracle))
}

/// Evaluates every check of the manifest, in manifest order.
pub fn records(manifest: &Manifest) -> Result<Vec<Record>> {
    let v = verifier(manifest)?;
    let mut out = Vec::new();
    for check in &manifest.checks {
        let generator = manifest
            .generator
            .as_ref()
            .expect("validated manifests with checks have a surface");
        match &check.action {
            Action::Single => out.push(Record::new(&manifest.hash, v.check(check.case, generator))),
            Action::Sweep { parameter, values } => out.extend(
                sweep(&v, check.case, generator, parameter, values)
                    .into_iter()
                    .map(|r| Record::new(&manifest.hash, r)),
            ),
            Action::Search {
                budget,
                modes,
                start,
            } => {
                let res = minimize_deficit(&v, check.case, modes, start, *budget)
                    .map_err(|e| ConfigError(e.to_string()))?;
                let mut rec =
                    Record::new(&manifest.hash, v.check(check.case, &res.generator(modes)));
                rec.search = Some(output::SearchOut {
                    budget: *budget,
                    evaluations: res.evaluations,
                    failed_evaluations: res.trace.iter().filter(|t| t.error.is_some()).count(),
                    modes: modes.clone(),
                    start: start.iter().copied().map(Num).collect(),
                    best: res.best.iter().copied().map(Num).collect(),
                });
                out.push(rec);
            }
        }
    }
    Ok(out)
}

/// `0` if every record passes, `2` if any is an error or has a failed
/// hypothesis, else `1` if any fails.
pub fn exit_code(records: &[Record]) -> u8 {
    if records
        .iter()
        .any(|r| matches!(r.status, Status::Error | Status::HypothesisViolated))
    {
        EXIT_CONFIG
    } else if records.iter().any(|r| !r.pass) {
        EXIT_FAILED
    } else {
        EXIT_OK
    }
}

fn open_out(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        None => Box::new(BufWriter::new(io::stdout().lock())),
        Some(p) if p == Path::new("-") => Box::new(BufWriter::new(io::stdout().lock())),
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            ConfigError(format!("{}: cannot write output: {e}", p.display()))
        })?)),
    })
}

/// The `run` subcommand; returns the process exit code.
pub fn run(manifest: &Path, out: Option<&Path>, format: Format) -> Result<u8> {
    let m = load_manifest(manifest)?;
    let recs = records(&m)?;
    let mut sink = Sink::new(open_out(out)?, format)?;
    for r in &recs {
        sink.write(r)?;
    }
    sink.finish().context("writing reports")?;
    Ok(exit_code(&recs))
}

/// The `table` subcommand: writes `t,F,G` for every table node.
pub fn table(kind: &str, manifest: &Path, out: Option<&Path>) -> Result<u8> {
    let kind: ProfileKind = kind
        .parse()
        .map_err(|e: weighted_iso::Error| ConfigError(e.to_string()))?;
    let m = load_manifest(manifest)?;
    let v = verifier(&m)?;
    let profile = v
        .profile(kind)
        .map_err(|e| ConfigError(format!("{kind} table: {e}")))?;
    let mut w = csv::Writer::from_writer(open_out(out)?);
    w.write_record(["t", "F", "G"])?;
    for (t, f, g) in profile.rows() {
        w.write_record([Num(t).text(), Num(f).text(), Num(g).text()])?;
    }
    w.flush().context("writing table")?;
    Ok(EXIT_OK)
}

/// Parsed command line.
#[derive(Debug, clap::Parser)]
#[command(
    name = "wiso",
    version,
    about = "Numerical checks of weighted isoperimetric inequalities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Subcommand)]
pub enum Command {
    /// Run the checks of a manifest.
    Run {
        #[arg(long)]
        manifest: PathBuf,
        /// Output file; standard output when omitted or `-`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
    },
    /// Write the `(t, F(t), G(t))` table of a profile function as CSV.
    Table {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Cli {
    /// Runs the command; configuration errors are reported on stderr and
    /// turned into exit code 2.
    pub fn execute(self) -> u8 {
        let result = match self.command {
            Command::Run {
                manifest,
                out,
                format,
            } => run(&manifest, out.as_deref(), format),
            Command::Table {
                kind,
                manifest,
                out,
            } => table(&kind, &manifest, out.as_deref()),
        };
        match result {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e:#}");
                EXIT_CONFIG
            }
        }
    }
}
