//! End-to-end pipeline per model and corpus runner with JSON, CSV and
//! markdown renderers.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use rug::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::critical::{
    self, Classification, CriticalError, CriticalPointJson, CriticalPointRecord, ProbeConfig, ProbeStats,
    Tolerances,
};
use crate::hessian::{self, ConventionMatch, HessianError, HessianReport, HessianReportJson};
use crate::model::{CiModel, ModelError};
use crate::numeric::{self, DecimalComplex, Precision};
use crate::periods::{self, PeriodError, PeriodRow};
use crate::spectrum::{self, SpectrumReport, SpectrumReportJson};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Critical(#[from] CriticalError),
    #[error(transparent)]
    Hessian(#[from] HessianError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    Markdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub descriptor: String,
    pub precision: Precision,
    pub period_order: usize,
    pub probes: usize,
    pub seed: u64,
    pub term_cap: usize,
    pub newton_max_iter: usize,
    pub tolerances: Tolerances,
    pub cluster_radius: f64,
    /// Significant digits for decimal strings in JSON.
    pub digits: usize,
    /// Wall-clock timings make output run-dependent, so they are opt-in.
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            descriptor: String::new(),
            precision: Precision::default(),
            period_order: 12,
            probes: 200,
            seed: 42,
            term_cap: periods::DEFAULT_TERM_CAP,
            newton_max_iter: 200,
            tolerances: Tolerances::default(),
            cluster_radius: critical::DEFAULT_CLUSTER_RADIUS,
            digits: 40,
            timings: false,
        }
    }
}

impl RunConfig {
    pub fn for_model(descriptor: &str) -> Self {
        RunConfig {
            descriptor: descriptor.to_string(),
            ..Default::default()
        }
    }

    pub fn probe_config(&self) -> ProbeConfig {
        ProbeConfig {
            seed: self.seed,
            trials: self.probes,
            precision: self.precision,
            newton_max_iter: self.newton_max_iter,
            tolerances: self.tolerances,
            ..ProbeConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Pass,
    Fail,
    /// Supported by probing only; not a proof.
    EvidenceOnly,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub detail: String,
}

impl Verdict {
    fn new(status: VerdictStatus, detail: impl Into<String>) -> Self {
        Verdict {
            status,
            detail: detail.into(),
        }
    }

    fn pass_fail(ok: bool, detail: impl Into<String>) -> Self {
        Self::new(if ok { VerdictStatus::Pass } else { VerdictStatus::Fail }, detail)
    }

    pub fn is_hard_fail(&self) -> bool {
        self.status == VerdictStatus::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub theorem_count: Verdict,
    pub critical_values: Verdict,
    pub odp: Verdict,
    pub spectrum: Verdict,
    pub periods: Verdict,
}

impl Verdicts {
    pub fn all(&self) -> [(&'static str, &Verdict); 5] {
        [
            ("theorem_count", &self.theorem_count),
            ("critical_values", &self.critical_values),
            ("odp", &self.odp),
            ("spectrum", &self.spectrum),
            ("periods", &self.periods),
        ]
    }

    pub fn any_hard_fail(&self) -> bool {
        self.all().iter().any(|(_, v)| v.is_hard_fail())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub periods_ms: f64,
    pub critical_ms: f64,
    pub hessian_ms: f64,
    pub spectrum_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone)]
pub struct PeriodOutcome {
    pub requested_order: usize,
    /// Highest order actually compared.
    pub order_checked: usize,
    pub report: periods::PeriodReport,
    pub capped: bool,
}

#[derive(Debug, Clone)]
pub struct FullReport {
    pub config: RunConfig,
    pub model: CiModel,
    pub baseline_only: bool,
    pub h1nm1: Option<rug::Integer>,
    pub periods: PeriodOutcome,
    pub symmetric_points: Vec<CriticalPointRecord>,
    pub probe_stats: ProbeStats,
    /// Probed nonzero-value points that coincide with a symmetric point, per branch.
    pub probe_hits: Vec<usize>,
    /// Probed nonzero-value points away from every symmetric point.
    pub extra_points: Vec<CriticalPointRecord>,
    pub near_zero_count: usize,
    pub near_zero_clusters: usize,
    pub hessians: Vec<HessianReport>,
    pub spectrum: SpectrumReport,
    pub verdicts: Verdicts,
    pub timings: Timings,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn run_periods(model: &CiModel, order: usize, cap: usize) -> PeriodOutcome {
    match periods::compare_periods(model, order, cap) {
        Ok(report) => PeriodOutcome {
            requested_order: order,
            order_checked: order,
            report,
            capped: false,
        },
        Err(PeriodError::TermCap { order: failed, .. }) => {
            let reached = failed.saturating_sub(1).min(order);
            let report = periods::compare_periods(model, reached, cap).expect("lower order fits under the cap");
            PeriodOutcome {
                requested_order: order,
                order_checked: reached,
                report,
                capped: true,
            }
        }
    }
}

/// Run every stage for one model.
pub fn run_report(config: &RunConfig) -> Result<FullReport, ReportError> {
    let model: CiModel = config.descriptor.parse()?;
    run_model(&model, config)
}

pub fn run_model(model: &CiModel, config: &RunConfig) -> Result<FullReport, ReportError> {
    let prec = config.precision;
    let tol = config.tolerances;
    let total = Instant::now();

    let t = Instant::now();
    let periods = run_periods(model, config.period_order, config.term_cap);
    let periods_ms = ms(t);

    let t = Instant::now();
    let symmetric_points = critical::symmetric_critical_points(model, prec, &tol)?;
    let probe = critical::probe_random(model, &config.probe_config());
    let value_tol = tol.value_tolerance(model, prec);
    let mut part = critical::classify(&probe.points, &value_tol);
    critical::assign_branches(model, &mut part.nonzero, prec, &tol);
    let dedup = numeric::float(prec, tol.dedup);
    let mut probe_hits = vec![0usize; symmetric_points.len()];
    let mut extra_points = Vec::new();
    for p in &part.nonzero {
        match symmetric_points.iter().position(|s| s.max_distance(p) < dedup) {
            Some(i) => probe_hits[i] += 1,
            None => extra_points.push(p.clone()),
        }
    }
    let near_zero_clusters = critical::cluster_count(&part.near_zero, config.cluster_radius);
    let critical_ms = ms(t);

    let t = Instant::now();
    let located: Vec<&CriticalPointRecord> = symmetric_points.iter().chain(&extra_points).collect();
    let hessians = located
        .iter()
        .map(|p| hessian::certify_odp(model, p, prec, &tol))
        .collect::<Result<Vec<_>, _>>()?;
    let hessian_ms = ms(t);

    let t = Instant::now();
    let values: Vec<_> = located.iter().map(|p| p.value.clone()).collect();
    let spectrum = spectrum::match_spectrum(model, &values, tol.value_match, prec);
    let spectrum_ms = ms(t);

    let verdicts = verdicts(model, &symmetric_points, &extra_points, &probe_hits, &hessians, &spectrum, &periods);
    Ok(FullReport {
        config: config.clone(),
        model: model.clone(),
        baseline_only: model.is_baseline(),
        h1nm1: model.hodge_h1nm1().ok(),
        periods,
        symmetric_points,
        probe_stats: probe.stats,
        probe_hits,
        extra_points,
        near_zero_count: part.near_zero.len(),
        near_zero_clusters,
        hessians,
        spectrum,
        verdicts,
        timings: Timings {
            periods_ms,
            critical_ms,
            hessian_ms,
            spectrum_ms,
            total_ms: ms(total),
        },
    })
}

fn verdicts(
    model: &CiModel,
    symmetric: &[CriticalPointRecord],
    extras: &[CriticalPointRecord],
    hits: &[usize],
    hessians: &[HessianReport],
    spectrum: &SpectrumReport,
    periods: &PeriodOutcome,
) -> Verdicts {
    let ix = model.index() as usize;
    let nonzero_symmetric = symmetric
        .iter()
        .filter(|p| p.classification == Classification::NonzeroValue)
        .count();
    let refound = hits.iter().filter(|&&h| h > 0).count();
    let theorem_count = if nonzero_symmetric != ix || !extras.is_empty() {
        Verdict::new(
            VerdictStatus::Fail,
            format!(
                "{nonzero_symmetric} symmetric nonzero-value points (expected {ix}); {} extra from probing",
                extras.len()
            ),
        )
    } else {
        Verdict::new(
            VerdictStatus::EvidenceOnly,
            format!("{ix} nonzero-value points; probing found no extras and re-found {refound} of {ix}"),
        )
    };

    let mut branches: Vec<Option<u32>> = symmetric.iter().map(|p| p.branch).collect();
    branches.sort();
    let want: Vec<Option<u32>> = (0..model.index()).map(Some).collect();
    let values_ok = branches == want && extras.is_empty();
    let critical_values = Verdict::pass_fail(
        values_ok,
        format!("{} of {ix} branches matched within relative tolerance", branches.iter().flatten().count()),
    );

    let n = model.dim() as usize;
    let odp_ok = !hessians.is_empty()
        && hessians.iter().all(|h| {
            h.certified && h.chart_low_order_vanishes && h.block_factors.nondegenerate()
        });
    let ranks: Vec<String> = hessians.iter().map(|h| h.rank.to_string()).collect();
    let odp = Verdict::pass_fail(odp_ok, format!("Hessian ranks [{}] of {n}", ranks.join(", ")));

    let err = spectrum
        .max_pairing_error
        .as_ref()
        .map(|e| e.to_f64())
        .unwrap_or(f64::NAN);
    let spectrum_v = Verdict::pass_fail(
        spectrum.matched && spectrum.char_poly_exact,
        format!("max pairing error {err:.3e}; {}", spectrum.note),
    );

    let p = &periods.report;
    let periods_ok = p.matched && p.divisibility_and_integrality_hold();
    let periods_v = if !periods_ok {
        Verdict::new(
            VerdictStatus::Fail,
            format!("first mismatch at m = {}", p.first_mismatch.map_or("-".to_string(), |m| m.to_string())),
        )
    } else if periods.capped {
        Verdict::new(
            VerdictStatus::Skipped,
            format!("skipped at order {} (term cap); matched below", periods.order_checked + 1),
        )
    } else {
        Verdict::new(VerdictStatus::Pass, format!("matched for m <= {}", periods.order_checked))
    };

    Verdicts {
        theorem_count,
        critical_values,
        odp,
        spectrum: spectrum_v,
        periods: periods_v,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantsJson {
    pub dim: u32,
    pub index: u32,
    pub dconst: String,
    pub codim: usize,
    pub expected_critical_values: Vec<DecimalComplex>,
    pub h1nm1: Option<String>,
    pub baseline_only: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodsJson {
    pub requested_order: usize,
    pub order_checked: usize,
    pub capped: bool,
    pub matched: bool,
    pub divisibility_and_integrality: bool,
    pub rows: Vec<PeriodRowJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodRowJson {
    pub m: usize,
    pub constant_term: String,
    pub closed_form: String,
    pub equal: bool,
}

impl From<PeriodRow> for PeriodRowJson {
    fn from(r: PeriodRow) -> Self {
        PeriodRowJson {
            m: r.m,
            constant_term: r.constant_term,
            closed_form: r.closed_form,
            equal: r.equal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalJson {
    pub symmetric_points: Vec<CriticalPointJson>,
    pub probe_stats: ProbeStats,
    pub probe_hits: Vec<usize>,
    pub extra_points: Vec<CriticalPointJson>,
    pub near_zero_count: usize,
    pub near_zero_clusters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullReportJson {
    pub schema_version: u32,
    pub model: String,
    pub config: RunConfig,
    pub invariants: InvariantsJson,
    pub periods: PeriodsJson,
    pub critical: CriticalJson,
    pub hessian: Vec<HessianReportJson>,
    pub chart_convention: ConventionMatch,
    pub spectrum: SpectrumReportJson,
    pub verdicts: Verdicts,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings: Option<Timings>,
}

impl FullReport {
    pub fn any_hard_fail(&self) -> bool {
        self.verdicts.any_hard_fail()
    }

    /// Convention match of the chart quadratic form; identical for every point.
    pub fn chart_convention(&self) -> ConventionMatch {
        self.hessians.first().map(|h| h.convention_match).unwrap_or_default()
    }

    pub fn to_json(&self) -> FullReportJson {
        let digits = self.config.digits;
        let prec = self.config.precision;
        let p = &self.periods.report;
        FullReportJson {
            schema_version: SCHEMA_VERSION,
            model: self.model.to_string(),
            config: self.config.clone(),
            invariants: InvariantsJson {
                dim: self.model.dim(),
                index: self.model.index(),
                dconst: self.model.dconst().to_string(),
                codim: self.model.codim(),
                expected_critical_values: self
                    .model
                    .expected_critical_values(prec)
                    .iter()
                    .map(|z| DecimalComplex::new(z, digits))
                    .collect(),
                h1nm1: self.h1nm1.as_ref().map(|h| h.to_string()),
                baseline_only: self.baseline_only,
            },
            periods: PeriodsJson {
                requested_order: self.periods.requested_order,
                order_checked: self.periods.order_checked,
                capped: self.periods.capped,
                matched: p.matched,
                divisibility_and_integrality: p.divisibility_and_integrality_hold(),
                rows: p.rows().into_iter().map(PeriodRowJson::from).collect(),
            },
            critical: CriticalJson {
                symmetric_points: self.symmetric_points.iter().map(|r| r.to_json(digits)).collect(),
                probe_stats: self.probe_stats.clone(),
                probe_hits: self.probe_hits.clone(),
                extra_points: self.extra_points.iter().map(|r| r.to_json(digits)).collect(),
                near_zero_count: self.near_zero_count,
                near_zero_clusters: self.near_zero_clusters,
            },
            hessian: self.hessians.iter().map(|h| h.to_json(digits)).collect(),
            chart_convention: self.chart_convention(),
            spectrum: self.spectrum.to_json(&self.model, digits),
            verdicts: self.verdicts.clone(),
            timings: self.config.timings.then(|| self.timings.clone()),
        }
    }

    pub fn table_row(&self) -> TableRow {
        let located: Vec<_> = self.symmetric_points.iter().chain(&self.extra_points).collect();
        TableRow {
            model: self.model.to_string(),
            dim: self.model.dim(),
            index: self.model.index(),
            dconst: self.model.dconst().to_string(),
            critical_values: located.iter().map(|p| short_complex(&p.value)).collect::<Vec<_>>().join("; "),
            hessian_ranks: self.hessians.iter().map(|h| h.rank.to_string()).collect::<Vec<_>>().join(" "),
            spectrum_error: self
                .spectrum
                .max_pairing_error
                .as_ref()
                .map_or("-".to_string(), |e| format!("{:.2e}", e.to_f64())),
            period_order: self.periods.order_checked,
            verdicts: self.verdicts.all().map(|(_, v)| v.status),
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => to_json_string(&self.to_json()),
            OutputFormat::Csv => render_csv(&[Row::Report(self.table_row())]),
            OutputFormat::Markdown => render_markdown(&[Row::Report(self.table_row())]),
        }
    }
}

fn to_json_string<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

/// Compact decimal form of a complex number, for tables.
pub fn short_complex(z: &Complex) -> String {
    let (re, im) = (z.real().to_f64(), z.imag().to_f64());
    let snap = |x: f64| if x.abs() < 1e-12 * (1.0 + re.abs().max(im.abs())) { 0.0 } else { x };
    let (re, im) = (snap(re), snap(im));
    let fmt = |x: f64| {
        let s = format!("{x:.9}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s == "-0" { "0".to_string() } else { s }
    };
    match (re == 0.0, im == 0.0) {
        (_, true) => fmt(re),
        (true, false) => format!("{}i", fmt(im)),
        (false, false) if im < 0.0 => format!("{}-{}i", fmt(re), fmt(-im)),
        _ => format!("{}+{}i", fmt(re), fmt(im)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub model: String,
    pub dim: u32,
    pub index: u32,
    pub dconst: String,
    pub critical_values: String,
    pub hessian_ranks: String,
    pub spectrum_error: String,
    pub period_order: usize,
    pub verdicts: [VerdictStatus; 5],
}

#[derive(Debug, Clone, PartialEq)]
pub enum Row {
    Report(TableRow),
    Error { line: usize, descriptor: String, error: String },
}

fn status_str(s: VerdictStatus) -> &'static str {
    match s {
        VerdictStatus::Pass => "pass",
        VerdictStatus::Fail => "fail",
        VerdictStatus::EvidenceOnly => "evidence_only",
        VerdictStatus::Skipped => "skipped",
    }
}

const COLUMNS: [&str; 13] = [
    "model",
    "n",
    "i_X",
    "d",
    "critical_values",
    "hessian_ranks",
    "spectrum_error",
    "period_order",
    "theorem_count",
    "critical_values_verdict",
    "odp",
    "spectrum",
    "periods",
];

fn row_cells(row: &Row) -> Vec<String> {
    match row {
        Row::Report(r) => {
            let mut v = vec![
                r.model.clone(),
                r.dim.to_string(),
                r.index.to_string(),
                r.dconst.clone(),
                r.critical_values.clone(),
                r.hessian_ranks.clone(),
                r.spectrum_error.clone(),
                r.period_order.to_string(),
            ];
            v.extend(r.verdicts.iter().map(|s| status_str(*s).to_string()));
            v
        }
        Row::Error { line, descriptor, error } => {
            let mut v = vec![String::new(); COLUMNS.len()];
            v[0] = descriptor.clone();
            v[8] = format!("error (line {line}): {error}");
            v
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_csv(rows: &[Row]) -> String {
    let mut out = COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = row_cells(r).iter().map(|c| csv_field(c)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn render_markdown(rows: &[Row]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", COLUMNS.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(COLUMNS.len()));
    for r in rows {
        let cells: Vec<String> = row_cells(r).iter().map(|c| c.replace('|', "\\|")).collect();
        let _ = writeln!(out, "| {} |", cells.join(" | "));
    }
    out
}

#[derive(Debug, Clone)]
pub struct CorpusLine {
    pub line: usize,
    pub descriptor: String,
    pub parsed: Result<CiModel, ModelError>,
}

/// One descriptor per line; blank lines and `#` comments are skipped.
pub fn parse_corpus(text: &str) -> Vec<CorpusLine> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let s = raw.split('#').next().unwrap_or("").trim();
            (!s.is_empty()).then(|| CorpusLine {
                line: i + 1,
                descriptor: s.to_string(),
                parsed: s.parse(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusErrorJson {
    pub line: usize,
    pub descriptor: String,
    pub error: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusStatus {
    Pass,
    Fail,
    ValidationError,
}

#[derive(Debug)]
pub struct CorpusReport {
    pub reports: Vec<FullReport>,
    pub errors: Vec<CorpusErrorJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReportJson {
    pub schema_version: u32,
    pub status: CorpusStatus,
    pub errors: Vec<CorpusErrorJson>,
    pub reports: Vec<FullReportJson>,
}

impl CorpusReport {
    pub fn status(&self) -> CorpusStatus {
        if !self.errors.is_empty() {
            CorpusStatus::ValidationError
        } else if self.reports.iter().any(|r| r.any_hard_fail()) {
            CorpusStatus::Fail
        } else {
            CorpusStatus::Pass
        }
    }

    /// 0 all pass, 1 a hard verdict failed, 2 validation error.
    pub fn exit_code(&self) -> i32 {
        exit_code(self.status())
    }

    pub fn to_json(&self) -> CorpusReportJson {
        CorpusReportJson {
            schema_version: SCHEMA_VERSION,
            status: self.status(),
            errors: self.errors.clone(),
            reports: self.reports.iter().map(FullReport::to_json).collect(),
        }
    }

    pub fn rows(&self) -> Vec<Row> {
        let mut rows: Vec<Row> = self.reports.iter().map(|r| Row::Report(r.table_row())).collect();
        rows.extend(self.errors.iter().map(|e| Row::Error {
            line: e.line,
            descriptor: e.descriptor.clone(),
            error: e.error.clone(),
        }));
        rows
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => to_json_string(&self.to_json()),
            OutputFormat::Csv => render_csv(&self.rows()),
            OutputFormat::Markdown => render_markdown(&self.rows()),
        }
    }
}

pub fn exit_code(status: CorpusStatus) -> i32 {
    match status {
        CorpusStatus::Pass => 0,
        CorpusStatus::Fail => 1,
        CorpusStatus::ValidationError => 2,
    }
}

/// Parse everything first; any invalid line aborts before computation.
/// Valid entries then run concurrently on `workers` threads, reported in
/// corpus order.
pub fn run_corpus(text: &str, base: &RunConfig, workers: usize) -> Result<CorpusReport, ReportError> {
    let lines = parse_corpus(text);
    let errors: Vec<CorpusErrorJson> = lines
        .iter()
        .filter_map(|l| {
            l.parsed.as_ref().err().map(|e| CorpusErrorJson {
                line: l.line,
                descriptor: l.descriptor.clone(),
                error: e.to_string(),
            })
        })
        .collect();
    if !errors.is_empty() {
        return Ok(CorpusReport {
            reports: Vec::new(),
            errors,
        });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| ReportError::Config(e.to_string()))?;
    let reports = pool.install(|| {
        lines
            .par_iter()
            .map(|l| {
                let model = l.parsed.as_ref().expect("validated above");
                let cfg = RunConfig {
                    descriptor: l.descriptor.clone(),
                    ..base.clone()
                };
                run_model(model, &cfg)
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(CorpusReport {
        reports,
        errors: Vec::new(),
    })
}
