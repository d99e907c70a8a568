use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lgfano_core::critical::{self, ProbeConfig};
use lgfano_core::hessian;
use lgfano_core::numeric::DecimalComplex;
use lgfano_core::periods;
use lgfano_core::report::{self, CorpusStatus};
use lgfano_core::spectrum;
use lgfano_core::{CiModel, OutputFormat, Precision, RunConfig};

#[derive(Parser)]
#[command(name = "lgfano", version, about = "Checks for Givental-type LG models of Fano complete intersections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline for one model.
    Report {
        descriptor: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Full pipeline for every descriptor in a file.
    Corpus {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Models computed concurrently.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Invariants and the Laurent polynomial f_X.
    Model {
        descriptor: String,
        #[arg(long, env = "LGFANO_PRECISION", default_value_t = 256, value_parser = parse_precision)]
        precision: u32,
    },
    /// Constant terms of f_X^m against the closed form.
    Periods {
        descriptor: String,
        #[arg(long, default_value_t = 12)]
        terms: usize,
        #[arg(long, default_value_t = periods::DEFAULT_TERM_CAP)]
        term_cap: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Symmetric critical points and random probing.
    Critical {
        descriptor: String,
        #[command(flatten)]
        probe: ProbeArgs,
    },
    /// ODP certification at the symmetric critical points.
    Hessian {
        descriptor: String,
        #[arg(long, env = "LGFANO_PRECISION", default_value_t = 256, value_parser = parse_precision)]
        precision: u32,
    },
    /// c_1 spectrum on the h-subring matched to the symmetric critical values.
    Spectrum {
        descriptor: String,
        #[arg(long, env = "LGFANO_PRECISION", default_value_t = 256, value_parser = parse_precision)]
        precision: u32,
    },
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long, env = "LGFANO_PRECISION", default_value_t = 256, value_parser = parse_precision)]
    precision: u32,
    #[arg(long, default_value_t = 200)]
    probes: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    probe: ProbeArgs,
    /// Highest period order m.
    #[arg(long, default_value_t = 12)]
    terms: usize,
    #[arg(long, default_value_t = periods::DEFAULT_TERM_CAP)]
    term_cap: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Include wall-clock timings in JSON.
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Markdown,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
            Format::Markdown => OutputFormat::Markdown,
        }
    }
}

fn parse_precision(s: &str) -> Result<u32, String> {
    let bits: u32 = s.parse().map_err(|_| format!("`{s}` is not a bit count"))?;
    Precision::new(bits).map(|p| p.bits()).map_err(|e| e.to_string())
}

impl RunArgs {
    fn config(&self, descriptor: &str) -> RunConfig {
        RunConfig {
            descriptor: descriptor.to_string(),
            precision: Precision::new(self.probe.precision).expect("validated by clap"),
            period_order: self.terms,
            probes: self.probe.probes,
            seed: self.probe.seed,
            term_cap: self.term_cap,
            timings: self.timings,
            ..RunConfig::default()
        }
    }
}

const DIGITS: usize = 40;

/// Failure class for the exit status.
enum Outcome {
    Ok,
    VerdictFailed,
}

fn parse_model(descriptor: &str) -> std::result::Result<CiModel, lgfano_core::ModelError> {
    descriptor.parse()
}

/// Write to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(s: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(s.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    emit(&(serde_json::to_string_pretty(v)? + "\n"))
}

#[derive(Serialize)]
struct ModelJson {
    schema_version: u32,
    model: String,
    degrees: Vec<u32>,
    ambient: u32,
    dim: u32,
    index: u32,
    dconst: String,
    expected_critical_values: Vec<DecimalComplex>,
    expected_exceptional_count: u32,
    h1nm1: Option<String>,
    baseline_only: bool,
    variables: Vec<String>,
    laurent_polynomial: String,
}

#[derive(Serialize)]
struct CriticalJson {
    schema_version: u32,
    model: String,
    symmetric_points: Vec<critical::CriticalPointJson>,
    probe_stats: critical::ProbeStats,
    probed_points: Vec<critical::CriticalPointJson>,
}

#[derive(Serialize)]
struct StageJson<T> {
    schema_version: u32,
    model: String,
    #[serde(flatten)]
    body: T,
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Report { descriptor, run } => {
            let model = parse_model(&descriptor)?;
            let cfg = run.config(&descriptor);
            let rep = report::run_model(&model, &cfg)?;
            emit(&rep.render(run.format.into()))?;
            Ok(if rep.any_hard_fail() { Outcome::VerdictFailed } else { Outcome::Ok })
        }
        Command::Corpus { file, run, workers } => {
            let text = std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let rep = report::run_corpus(&text, &run.config(""), workers)?;
            emit(&rep.render(run.format.into()))?;
            match rep.status() {
                CorpusStatus::Pass => Ok(Outcome::Ok),
                CorpusStatus::Fail => Ok(Outcome::VerdictFailed),
                CorpusStatus::ValidationError => Err(Validation(format!(
                    "{} invalid corpus line(s)",
                    rep.errors.len()
                ))
                .into()),
            }
        }
        Command::Model { descriptor, precision } => {
            let model = parse_model(&descriptor)?;
            let prec = Precision::new(precision)?;
            let inv = model.invariants(prec);
            print_json(&ModelJson {
                schema_version: report::SCHEMA_VERSION,
                model: model.to_string(),
                degrees: model.degrees().to_vec(),
                ambient: model.ambient(),
                dim: inv.dim,
                index: inv.index,
                dconst: inv.dconst.to_string(),
                expected_critical_values: inv
                    .expected_critical_values
                    .iter()
                    .map(|z| DecimalComplex::new(z, DIGITS))
                    .collect(),
                expected_exceptional_count: inv.expected_exceptional_count,
                h1nm1: inv.h1nm1.map(|h| h.to_string()),
                baseline_only: model.is_baseline(),
                variables: model.var_names().to_vec(),
                laurent_polynomial: model.build_givental().to_string(),
            })?;
            Ok(Outcome::Ok)
        }
        Command::Periods { descriptor, terms, term_cap, format } => {
            let model = parse_model(&descriptor)?;
            let rep = periods::compare_periods(&model, terms, term_cap)?;
            match format {
                Format::Csv => emit(&rep.to_csv())?,
                Format::Markdown => {
                    let mut md = String::from("| m | constant_term | closed_form | equal |\n|---|---|---|---|\n");
                    for r in rep.rows() {
                        md += &format!("| {} | {} | {} | {} |\n", r.m, r.constant_term, r.closed_form, r.equal);
                    }
                    emit(&md)?
                }
                Format::Json => {
                    #[derive(Serialize)]
                    struct Body {
                        matched: bool,
                        divisibility_and_integrality: bool,
                        rows: Vec<periods::PeriodRow>,
                    }
                    print_json(&StageJson {
                        schema_version: report::SCHEMA_VERSION,
                        model: model.to_string(),
                        body: Body {
                            matched: rep.matched,
                            divisibility_and_integrality: rep.divisibility_and_integrality_hold(),
                            rows: rep.rows(),
                        },
                    })?
                }
            }
            Ok(if rep.matched { Outcome::Ok } else { Outcome::VerdictFailed })
        }
        Command::Critical { descriptor, probe } => {
            let model = parse_model(&descriptor)?;
            let cfg = ProbeConfig {
                seed: probe.seed,
                trials: probe.probes,
                precision: Precision::new(probe.precision)?,
                ..ProbeConfig::default()
            };
            let sym = critical::symmetric_critical_points(&model, cfg.precision, &cfg.tolerances)?;
            let mut res = critical::probe_random(&model, &cfg);
            critical::assign_branches(&model, &mut res.points, cfg.precision, &cfg.tolerances);
            print_json(&CriticalJson {
                schema_version: report::SCHEMA_VERSION,
                model: model.to_string(),
                symmetric_points: sym.iter().map(|p| p.to_json(DIGITS)).collect(),
                probe_stats: res.stats,
                probed_points: res.points.iter().map(|p| p.to_json(DIGITS)).collect(),
            })?;
            Ok(Outcome::Ok)
        }
        Command::Hessian { descriptor, precision } => {
            let model = parse_model(&descriptor)?;
            let prec = Precision::new(precision)?;
            let tol = critical::Tolerances::default();
            let reps = critical::symmetric_critical_points(&model, prec, &tol)?
                .iter()
                .map(|p| hessian::certify_odp(&model, p, prec, &tol).map(|h| h.to_json(DIGITS)))
                .collect::<Result<Vec<_>, _>>()?;
            let ok = reps.iter().all(|h| h.certified);
            print_json(&StageJson {
                schema_version: report::SCHEMA_VERSION,
                model: model.to_string(),
                body: serde_json::json!({ "points": reps }),
            })?;
            Ok(if ok { Outcome::Ok } else { Outcome::VerdictFailed })
        }
        Command::Spectrum { descriptor, precision } => {
            let model = parse_model(&descriptor)?;
            let prec = Precision::new(precision)?;
            let tol = critical::Tolerances::default();
            let values: Vec<_> = critical::symmetric_critical_points(&model, prec, &tol)?
                .into_iter()
                .map(|p| p.value)
                .collect();
            let rep = spectrum::match_spectrum(&model, &values, tol.value_match, prec);
            print_json(&StageJson {
                schema_version: report::SCHEMA_VERSION,
                model: model.to_string(),
                body: rep.to_json(&model, DIGITS),
            })?;
            Ok(if rep.matched && rep.char_poly_exact { Outcome::Ok } else { Outcome::VerdictFailed })
        }
    }
}

/// Input rejected before any computation.
#[derive(Debug)]
struct Validation(String);

impl std::fmt::Display for Validation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Validation {}

fn is_validation(e: &anyhow::Error) -> bool {
    e.downcast_ref::<Validation>().is_some()
        || e.downcast_ref::<lgfano_core::ModelError>().is_some()
        || e.downcast_ref::<lgfano_core::numeric::PrecisionError>().is_some()
        || matches!(
            e.downcast_ref::<report::ReportError>(),
            Some(report::ReportError::Model(_) | report::ReportError::Config(_))
        )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::VerdictFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_validation(&e) { 2 } else { 1 })
        }
    }
}
