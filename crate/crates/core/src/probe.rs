//! Ray scans `t ↦ tφ` through the Bers embedding and their reports.
//!
//! Every record composes the other modules: the B-norm gate, the Schwarz
//! equation solve, the Grunsky certificate of the solution's germ, the
//! self-intersection test of boundary samples and the Schwarzian round-trip
//! residual. Failures are kept per record and never abort a scan.
//!
//! A scan is a search tool: a scan that finds no starlikeness violation on
//! a handful of rays does not show that none exists.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beltrami::Convention;
use crate::grunsky::{
    grunsky_from_map, univalence_certificate, Certificate, PowerConfig, DEFAULT_SLACK,
};
use crate::ode::{
    germ_at_infinity, injectivity_test, schwarzian_roundtrip, Injectivity, MapBoundarySamples,
    SchwarzSolution, SolverConfig,
};
use crate::polygon::{circular_polygon_schwarzian, PolygonError, PolygonSpec};
use crate::scalar::Cx;
use crate::schwarzian::{
    bnorm_grid, schwarzian_of_series, univalence_gate, Domain, Evaluate, Gate, GridConfig,
    HyperbolicNorm, RationalSchwarzian, SchwarzianError, SchwarzianSource, SeriesAtInfinity,
    NECESSITY_BOUND,
};
use crate::series::{ExteriorSeries, SeriesError};

#[derive(Debug, Error)]
pub enum JobError {
    #[error("cannot read job file {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed job: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid job: {0}")]
    Invalid(String),
    #[error("invalid generator: {0}")]
    Polygon(#[from] PolygonError),
    #[error("invalid generator: {0}")]
    Schwarzian(#[from] SchwarzianError),
    #[error("invalid generator: {0}")]
    Series(#[from] SeriesError),
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no records to report")]
    Empty,
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Source of the Schwarzian `φ` driving the ray.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// Schwarzian of a polygon's exterior map.
    Polygon { polygon: PolygonSpec },
    /// `Σ c_j/(z - a_j)² + Σ c'_j/(z - a_j)`; complex numbers as `[re, im]`.
    Rational {
        poles: Vec<[f64; 2]>,
        quadratic: Vec<[f64; 2]>,
        residue: Vec<[f64; 2]>,
    },
    /// Schwarzian of the germ `z + b_0 + b_1/z + … + b_K z^{-K}`, given as
    /// `[b_0, …, b_K]`.
    Germ { coefficients: Vec<[f64; 2]> },
}

/// Job file contents. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub generator: GeneratorSpec,
    /// Ray parameters, positive and strictly increasing.
    pub t: Vec<f64>,
    /// Grunsky truncation `N`.
    #[serde(default = "defaults::order")]
    pub order: usize,
    /// Germ order `K`, at least `2N`.
    #[serde(default = "defaults::germ_order")]
    pub germ_order: usize,
    /// Sample radii, each above 1.
    #[serde(default = "defaults::rho")]
    pub rho: Vec<f64>,
    /// Boundary samples per radius.
    #[serde(default = "defaults::samples")]
    pub samples: usize,
    #[serde(default)]
    pub convention: Convention,
    #[serde(default = "defaults::slack")]
    pub slack: f64,
    /// Taylor tail tolerance of the ODE continuation.
    #[serde(default = "defaults::tolerance")]
    pub tolerance: f64,
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    /// Output directory.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

mod defaults {
    pub fn order() -> usize {
        64
    }
    pub fn germ_order() -> usize {
        256
    }
    pub fn rho() -> Vec<f64> {
        vec![1.05]
    }
    pub fn samples() -> usize {
        1024
    }
    pub fn slack() -> f64 {
        super::DEFAULT_SLACK
    }
    pub fn tolerance() -> f64 {
        1e-10
    }
    pub fn seed() -> u64 {
        0x5eed_0001
    }
}

/// Documented parameter bounds.
pub const MAX_ORDER: usize = 512;
pub const MAX_GERM_ORDER: usize = 4096;
pub const MAX_SAMPLES: usize = 1 << 20;

impl JobSpec {
    pub fn from_json(text: &str) -> Result<Self, JobError> {
        let job: JobSpec = serde_json::from_str(text)?;
        job.validate()?;
        Ok(job)
    }

    pub fn from_path(path: &Path) -> Result<Self, JobError> {
        let text = fs::read_to_string(path).map_err(|source| JobError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), JobError> {
        let bad = |m: String| Err(JobError::Invalid(m));
        if self.t.is_empty() {
            return bad("t-grid is empty".into());
        }
        if self.t.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return bad("t values must be finite and positive".into());
        }
        if self.t.windows(2).any(|w| w[0] >= w[1]) {
            return bad("t values must be strictly increasing".into());
        }
        if !(1..=MAX_ORDER).contains(&self.order) {
            return bad(format!("order must be in 1..={MAX_ORDER}"));
        }
        if self.germ_order < 2 * self.order || self.germ_order > MAX_GERM_ORDER {
            return bad(format!("germ_order must be in 2*order..={MAX_GERM_ORDER}"));
        }
        if self.rho.is_empty() || self.rho.iter().any(|r| !(r.is_finite() && *r > 1.0)) {
            return bad("rho values must be finite and above 1".into());
        }
        if !(crate::ode::MIN_SAMPLES..=MAX_SAMPLES).contains(&self.samples) {
            return bad(format!(
                "samples must be in {}..={MAX_SAMPLES}",
                crate::ode::MIN_SAMPLES
            ));
        }
        if !(self.slack.is_finite() && self.slack > 0.0) {
            return bad("slack must be positive".into());
        }
        if !(self.tolerance > 0.0 && self.tolerance <= 1e-3) {
            return bad("tolerance must be in (0, 1e-3]".into());
        }
        if let GeneratorSpec::Germ { coefficients } = &self.generator {
            if coefficients.len() < 2 {
                return bad("germ needs coefficients b_0 and b_1 at least".into());
            }
        }
        Ok(())
    }

    /// Builds the Schwarzian `φ` of the generator.
    pub fn source(&self) -> Result<Source, JobError> {
        let cx = |p: &[f64; 2]| Complex64::new(p[0], p[1]);
        let cxs = |v: &[[f64; 2]]| v.iter().map(cx).collect::<Vec<_>>();
        Ok(match &self.generator {
            GeneratorSpec::Polygon { polygon } => {
                Source::Rational(circular_polygon_schwarzian(polygon)?)
            }
            GeneratorSpec::Rational {
                poles,
                quadratic,
                residue,
            } => {
                let r = RationalSchwarzian::new(cxs(poles), cxs(quadratic), cxs(residue))?;
                r.check_exterior_admissible()?;
                Source::Rational(r)
            }
            GeneratorSpec::Germ { coefficients } => {
                let f = ExteriorSeries::new(cxs(coefficients))?;
                Source::Series(schwarzian_of_series(&f)?)
            }
        })
    }

    pub fn polygon(&self) -> Option<&PolygonSpec> {
        match &self.generator {
            GeneratorSpec::Polygon { polygon } => Some(polygon),
            _ => None,
        }
    }
}

/// A Schwarzian from any generator.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Rational(RationalSchwarzian<f64>),
    Series(SeriesAtInfinity<f64>),
}

impl Evaluate<f64> for Source {
    fn eval(&self, z: Complex64) -> Option<Complex64> {
        match self {
            Source::Rational(r) => r.eval(z),
            Source::Series(s) => s.eval(z),
        }
    }
}

impl SchwarzianSource<f64> for Source {
    fn expansion_at_infinity(&self, order: usize) -> Vec<Complex64> {
        match self {
            Source::Rational(r) => r.expansion_at_infinity(order),
            Source::Series(s) => s.expansion_at_infinity(order),
        }
    }

    fn exact_order(&self) -> Option<usize> {
        match self {
            Source::Rational(r) => r.exact_order(),
            Source::Series(s) => s.exact_order(),
        }
    }

    fn taylor_at(&self, z0: Complex64, scale: f64, order: usize) -> Vec<Complex64> {
        match self {
            Source::Rational(r) => r.taylor_at(z0, scale, order),
            Source::Series(s) => s.taylor_at(z0, scale, order),
        }
    }

    fn singular_distance(&self, z: Complex64) -> f64 {
        match self {
            Source::Rational(r) => r.singular_distance(z),
            Source::Series(s) => s.singular_distance(z),
        }
    }

    fn check_exterior_admissible(&self) -> Result<(), SchwarzianError> {
        match self {
            Source::Rational(r) => r.check_exterior_admissible(),
            Source::Series(s) => s.check_exterior_admissible(),
        }
    }

    fn describe(&self) -> String {
        match self {
            Source::Rational(r) => r.describe(),
            Source::Series(s) => s.describe(),
        }
    }
}

/// Numerical settings of a scan, derived from a job.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub order: usize,
    pub germ_order: usize,
    pub rho: Vec<f64>,
    pub samples: usize,
    pub slack: f64,
    pub solver: SolverConfig<f64>,
    pub power: PowerConfig<f64>,
    pub grid: GridConfig,
    /// Radius and point count of the Schwarzian round-trip check.
    pub residual_radius: f64,
    pub residual_points: usize,
}

impl ScanConfig {
    pub fn from_job(job: &JobSpec) -> Self {
        Self {
            order: job.order,
            germ_order: job.germ_order,
            rho: job.rho.clone(),
            samples: job.samples,
            slack: job.slack,
            solver: SolverConfig {
                tolerance: job.tolerance,
                ..SolverConfig::default()
            },
            power: PowerConfig {
                seed: job.seed,
                ..PowerConfig::default()
            },
            grid: GridConfig::default(),
            residual_radius: 2.0,
            residual_points: 64,
        }
    }
}

/// Certificate column of a record.
#[derive(Debug, Clone, PartialEq)]
pub enum RecordCertificate {
    Grunsky(Certificate<f64>),
    /// `|t|·‖φ‖ > 6`: not univalent, nothing else computed.
    NonUnivalentByNorm,
    Failed,
}

impl RecordCertificate {
    pub fn as_str(&self) -> &'static str {
        match self {
            RecordCertificate::Grunsky(c) => c.as_str(),
            RecordCertificate::NonUnivalentByNorm => "non-univalent-by-norm",
            RecordCertificate::Failed => "error",
        }
    }

    pub fn is_non_univalent(&self) -> bool {
        match self {
            RecordCertificate::Grunsky(c) => c.is_non_univalent(),
            RecordCertificate::NonUnivalentByNorm => true,
            RecordCertificate::Failed => false,
        }
    }
}

/// Self-intersection verdict at one radius.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectivityCheck {
    pub rho: f64,
    pub samples: usize,
    pub verdict: Injectivity<f64>,
}

/// Marks a Grunsky violation whose boundary samples still look injective.
pub const SAMPLING_TOO_COARSE: &str = "sampling-too-coarse";

/// One point `tφ` of the ray.
#[derive(Debug, Clone, PartialEq)]
pub struct RayScanRecord {
    pub t: f64,
    /// `|t|·‖φ‖`, exterior grid norm.
    pub bnorm: f64,
    pub gate: Gate,
    pub grunsky_norm: Option<f64>,
    pub order: usize,
    pub certificate: RecordCertificate,
    pub injectivity: Vec<InjectivityCheck>,
    pub residual: Option<f64>,
    pub curves: Vec<MapBoundarySamples<f64>>,
    pub annotation: Option<&'static str>,
    pub errors: Vec<String>,
}

impl RayScanRecord {
    pub fn failed(&self) -> bool {
        !self.errors.is_empty()
    }

    pub fn all_injective(&self) -> bool {
        !self.injectivity.is_empty() && self.injectivity.iter().all(|c| c.verdict.is_injective())
    }

    /// Every computed check agrees with univalence of `w_t`.
    pub fn consistent_with_univalence(&self) -> bool {
        !self.failed()
            && self.gate != Gate::NonUnivalentByNorm
            && matches!(
                self.certificate,
                RecordCertificate::Grunsky(Certificate::Inconclusive { .. })
            )
            && self.all_injective()
    }

    /// The deciding radius: the smallest one with a crossing, otherwise the
    /// smallest one checked.
    pub fn deciding_check(&self) -> Option<&InjectivityCheck> {
        let by_rho = |a: &&InjectivityCheck, b: &&InjectivityCheck| a.rho.total_cmp(&b.rho);
        self.injectivity
            .iter()
            .filter(|c| !c.verdict.is_injective())
            .min_by(by_rho)
            .or_else(|| self.injectivity.iter().min_by(by_rho))
    }
}

/// Records in `t` order plus the scan-level witness flag.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub records: Vec<RayScanRecord>,
    /// `(t₁, t₂)`, `t₁ < t₂`, with a certified non-univalent map at `t₁` and
    /// a map consistent with univalence at `t₂`.
    pub witness: Option<(f64, f64)>,
}

impl ScanReport {
    pub fn any_failed(&self) -> bool {
        self.records.iter().any(RayScanRecord::failed)
    }
}

/// Values within `slack` (relative) plus the grid error of the necessity
/// bound stay in the indeterminate band.
pub fn scan_gate(bnorm: f64, error: f64, slack: f64) -> Gate {
    match univalence_gate(bnorm) {
        Gate::NonUnivalentByNorm if bnorm - error.abs() <= NECESSITY_BOUND * (1.0 + slack) => {
            Gate::IndeterminateBand
        }
        g => g,
    }
}

fn scan_one<S: SchwarzianSource<f64> + ?Sized>(
    phi: &S,
    phi_norm: &HyperbolicNorm<f64>,
    t: f64,
    cfg: &ScanConfig,
) -> RayScanRecord {
    let bnorm = t.abs() * phi_norm.value;
    let gate = scan_gate(bnorm, t.abs() * phi_norm.grid_error, cfg.slack);
    let mut rec = RayScanRecord {
        t,
        bnorm,
        gate,
        grunsky_norm: None,
        order: cfg.order,
        certificate: RecordCertificate::Failed,
        injectivity: Vec::new(),
        residual: None,
        curves: Vec::new(),
        annotation: None,
        errors: Vec::new(),
    };
    if gate == Gate::NonUnivalentByNorm {
        rec.certificate = RecordCertificate::NonUnivalentByNorm;
        return rec;
    }
    let solution = match SchwarzSolution::new(phi, Cx::new(t, 0.0), cfg.solver.clone()) {
        Ok(s) => s,
        Err(e) => {
            rec.errors.push(format!("solve: {e}"));
            return rec;
        }
    };

    let certificate = germ_at_infinity(&solution, cfg.germ_order)
        .map_err(|e| e.to_string())
        .and_then(|germ| grunsky_from_map(&germ, cfg.order).map_err(|e| e.to_string()))
        .and_then(|alpha| {
            univalence_certificate(&alpha.matrix(), cfg.slack, &cfg.power)
                .map_err(|e| e.to_string())
        });
    match certificate {
        Ok(c) => {
            rec.grunsky_norm = Some(c.norm());
            rec.certificate = RecordCertificate::Grunsky(c);
        }
        Err(e) => rec.errors.push(format!("grunsky: {e}")),
    }

    for &rho in &cfg.rho {
        match solution.sample_circle(rho, cfg.samples) {
            Ok(curve) => {
                match injectivity_test(&curve) {
                    Ok(verdict) => rec.injectivity.push(InjectivityCheck {
                        rho,
                        samples: cfg.samples,
                        verdict,
                    }),
                    Err(e) => rec.errors.push(format!("injectivity at rho = {rho}: {e}")),
                }
                rec.curves.push(curve);
            }
            Err(e) => rec.errors.push(format!("sampling at rho = {rho}: {e}")),
        }
    }

    match schwarzian_roundtrip(&solution, cfg.residual_radius, cfg.residual_points) {
        Ok(r) => rec.residual = Some(r),
        Err(e) => rec.errors.push(format!("round-trip: {e}")),
    }

    if rec.certificate.is_non_univalent() && rec.all_injective() {
        rec.annotation = Some(SAMPLING_TOO_COARSE);
    }
    rec
}

/// Scans the ray with each `t` computed independently, in parallel; records
/// come back in `t` order.
pub fn run_ray_scan<S: SchwarzianSource<f64> + ?Sized>(
    phi: &S,
    ts: &[f64],
    cfg: &ScanConfig,
) -> Result<ScanReport, SchwarzianError> {
    let phi_norm = bnorm_grid(phi, Domain::Exterior, &cfg.grid)?;
    let records: Vec<RayScanRecord> = ts
        .par_iter()
        .map(|&t| scan_one(phi, &phi_norm, t, cfg))
        .collect();
    let mut witness = None;
    'outer: for (i, a) in records.iter().enumerate() {
        if !a.certificate.is_non_univalent() {
            continue;
        }
        for b in &records[i + 1..] {
            if b.consistent_with_univalence() {
                witness = Some((a.t, b.t));
                break 'outer;
            }
        }
    }
    Ok(ScanReport { records, witness })
}

/// Runs the scan described by a job file.
pub fn run_job(job: &JobSpec) -> Result<ScanReport, JobError> {
    let phi = job.source()?;
    Ok(run_ray_scan(&phi, &job.t, &ScanConfig::from_job(job))?)
}

/// Report formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Svg,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "svg" => Ok(ReportFormat::Svg),
            other => Err(format!("unknown format `{other}` (expected csv or svg)")),
        }
    }
}

/// CSV header of scan reports.
pub const CSV_COLUMNS: [&str; 9] = [
    "t",
    "bnorm",
    "gate",
    "grunsky_norm",
    "N",
    "certificate",
    "injectivity",
    "rho",
    "residual",
];

/// 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// The scan table as CSV text.
pub fn render_csv(records: &[RayScanRecord]) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for r in records {
        let check = r.deciding_check();
        let mut injectivity = match check {
            None => String::new(),
            Some(c) if c.verdict.is_injective() => "injective".to_string(),
            Some(_) => "self-intersecting".to_string(),
        };
        if let Some(a) = r.annotation {
            injectivity.push(';');
            injectivity.push_str(a);
        }
        let certificate = if r.failed() && matches!(r.certificate, RecordCertificate::Failed) {
            "error"
        } else {
            r.certificate.as_str()
        };
        let fields = [
            fmt_float(r.t),
            fmt_float(r.bnorm),
            r.gate.as_str().to_string(),
            fmt_opt(r.grunsky_norm),
            r.order.to_string(),
            certificate.to_string(),
            injectivity,
            fmt_opt(check.map(|c| c.rho)),
            fmt_opt(r.residual),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Boundary samples as CSV rows `(θ, Re w, Im w)`.
pub fn render_samples_csv(samples: &MapBoundarySamples<f64>) -> String {
    let mut out = String::from("theta,re_w,im_w\n");
    for (k, w) in samples.samples.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_float(samples.theta(k)),
            fmt_float(w.re),
            fmt_float(w.im)
        );
    }
    out
}

const PALETTE: [&str; 6] = [
    "#1b6ca8", "#d1495b", "#2e8b57", "#edae49", "#6a4c93", "#00798c",
];

/// Image curves of every record (left) and the Grunsky norm against `t`
/// (right).
pub fn render_svg(records: &[RayScanRecord]) -> String {
    let (w, h, pad) = (960.0, 480.0, 30.0);
    let panel = h - 2.0 * pad;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );

    let curves: Vec<(usize, &MapBoundarySamples<f64>)> = records
        .iter()
        .enumerate()
        .filter_map(|(i, r)| {
            r.curves
                .iter()
                .min_by(|a, b| a.rho.total_cmp(&b.rho))
                .map(|c| (i, c))
        })
        .collect();
    let extent = curves
        .iter()
        .flat_map(|(_, c)| c.samples.iter())
        .map(|z| z.re.abs().max(z.im.abs()))
        .fold(1e-9, f64::max);
    let sx = |x: f64| pad + panel / 2.0 + x / extent * panel / 2.0;
    let sy = |y: f64| pad + panel / 2.0 - y / extent * panel / 2.0;
    for (i, c) in &curves {
        let mut d = String::new();
        for (k, z) in c.samples.iter().enumerate() {
            let _ = write!(
                d,
                "{}{:.3},{:.3} ",
                if k == 0 { "M" } else { "L" },
                sx(z.re),
                sy(z.im)
            );
        }
        d.push('Z');
        let _ = writeln!(
            svg,
            "<path d=\"{d}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1\"><title>t = {}</title></path>",
            PALETTE[i % PALETTE.len()],
            records[*i].t
        );
    }

    let x0 = w / 2.0 + pad;
    let width = w / 2.0 - 2.0 * pad;
    let _ = writeln!(
        svg,
        "<rect x=\"{x0}\" y=\"{pad}\" width=\"{width}\" height=\"{panel}\" fill=\"none\" stroke=\"#888\"/>"
    );
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| r.grunsky_norm.map(|k| (r.t, k)))
        .collect();
    if !pts.is_empty() {
        let t_max = pts.iter().map(|p| p.0).fold(1e-9, f64::max);
        let k_max = pts.iter().map(|p| p.1).fold(1.0, f64::max);
        let px = |t: f64| x0 + t / t_max * width;
        let py = |k: f64| pad + panel - k / k_max * panel;
        let line: Vec<String> = pts
            .iter()
            .map(|&(t, k)| format!("{:.3},{:.3}", px(t), py(k)))
            .collect();
        let _ = writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#1b6ca8\" stroke-width=\"2\"/>",
            line.join(" ")
        );
        for &(t, k) in &pts {
            let _ = writeln!(
                svg,
                "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" fill=\"#d1495b\"/>",
                px(t),
                py(k)
            );
        }
        let _ = writeln!(
            svg,
            "<line x1=\"{x0}\" y1=\"{y:.3}\" x2=\"{x1}\" y2=\"{y:.3}\" stroke=\"#888\" stroke-dasharray=\"4 4\"/>",
            x1 = x0 + width,
            y = py(1.0)
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{x0}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">Grunsky norm vs t</text>",
        pad - 8.0
    );
    svg.push_str("</svg>\n");
    svg
}

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf, ReportError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| ReportError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(&path, contents).map_err(|source| ReportError::Write {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes `scan.csv` or `scan.svg` into `dir`.
pub fn emit_report(
    records: &[RayScanRecord],
    format: ReportFormat,
    dir: &Path,
) -> Result<PathBuf, ReportError> {
    if records.is_empty() {
        return Err(ReportError::Empty);
    }
    match format {
        ReportFormat::Csv => write_file(dir.join("scan.csv"), &render_csv(records)),
        ReportFormat::Svg => write_file(dir.join("scan.svg"), &render_svg(records)),
    }
}

/// Writes boundary samples as `(θ, Re w, Im w)` CSV.
pub fn write_samples_csv(
    samples: &MapBoundarySamples<f64>,
    path: &Path,
) -> Result<PathBuf, ReportError> {
    write_file(path.to_path_buf(), &render_samples_csv(samples))
}
