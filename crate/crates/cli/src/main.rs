//! `bers-probe`: command-line front end for ray scans in the Bers embedding.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use bers_probe::beltrami::{
    a1sq_lower_bound, extremality_lower_bound, Convention, HarmonicBeltrami, TrialBasis,
};
use bers_probe::grunsky::{grunsky_from_map, univalence_certificate, Certificate};
use bers_probe::ode::{germ_at_infinity, schwarzian_roundtrip, SchwarzSolution};
use bers_probe::polygon::{regular_ngon_exterior_map, werner_value, PolygonSpec};
use bers_probe::probe::{
    emit_report, fmt_float, run_ray_scan, scan_gate, write_samples_csv, JobError, JobSpec,
    ReportFormat, ScanConfig, Source,
};
use bers_probe::schwarzian::{
    bnorm_grid, bnorm_rational_boundary, Domain, SchwarzianSource, AW_RADIUS,
};
use clap::{Parser, Subcommand};
use num_complex::Complex64;

const AFTER_HELP: &str = "\
JOB FILE
  A single JSON document; unknown keys are rejected. Example:
    {\"generator\": {\"kind\": \"polygon\", \"polygon\": {\"family\": \"regular\", \"n\": 4}},
     \"t\": [0.25, 0.5, 1.0], \"order\": 64, \"germ_order\": 256,
     \"rho\": [1.05], \"samples\": 1024, \"convention\": \"paper\"}
  Generators: polygon (regular n or explicit prevertices/angles), rational
  (poles, quadratic, residue as [re, im] pairs), germ (coefficients b_0..b_K).
  Optional keys: slack, tolerance, seed, out. See README.md.

SCAN CSV COLUMNS (in this order)
  t             ray parameter
  bnorm         |t|·||phi||, exterior hyperbolic sup norm
  gate          inside-aw-ball | indeterminate-band | certified-nonunivalent-by-norm
  grunsky_norm  largest singular value of the N x N Grunsky block of w_t
  N             Grunsky truncation
  certificate   non-univalent | inconclusive | non-univalent-by-norm | error
  injectivity   injective | self-intersecting, with ';sampling-too-coarse'
                when the Grunsky certificate disagrees with the samples
  rho           sampling radius that decided the injectivity verdict
  residual      max |S_w - t phi| on |z| = 2
  Floats carry 17 significant digits. Empty fields were not computed.

EXIT CODES
  0 success, 2 invalid job, 3 numerical failure in at least one record
  (records are still written), 1 other errors such as unwritable output.

A scan searches for starlikeness violations along the given ray. Finding
none at desk scale does not show that the ray, or the space, is starlike.";

#[derive(Debug, Parser)]
#[command(name = "bers-probe", version, about = "Probe univalence along rays t·phi in the Bers embedding", after_long_help = AFTER_HELP)]
struct Cli {
    /// Job file (JSON).
    #[arg(long, global = true)]
    job: Option<PathBuf>,
    /// Grunsky truncation N.
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Germ order K (at least 2N).
    #[arg(long = "germ-order", global = true)]
    germ_order: Option<usize>,
    /// Sampling radii, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    rho: Option<Vec<f64>>,
    /// Boundary samples per radius.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format for `scan`.
    #[arg(long, global = true, default_value = "csv")]
    format: ReportFormat,
    /// Ahlfors-Weill coefficient convention.
    #[arg(long, global = true)]
    convention: Option<Convention>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hyperbolic norm of phi and the univalence gate at each t.
    Bnorm,
    /// Truncated Grunsky norm and certificate of w_t at each t.
    Grunsky,
    /// Boundary samples of w_t as (theta, Re w, Im w) CSV files.
    Solve,
    /// Ahlfors-Weill coefficient norms and extremality lower bounds.
    Aw,
    /// The polygon value 1 - alpha next to the computed Grunsky bound.
    Werner,
    /// Full ray scan with report.
    Scan,
}

enum Failure {
    Job(anyhow::Error),
    Numerical,
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn load_job(cli: &Cli) -> Result<JobSpec, JobError> {
    let path = cli
        .job
        .as_deref()
        .ok_or_else(|| JobError::Invalid("--job <path> is required".into()))?;
    let mut job = JobSpec::from_path(path)?;
    if let Some(n) = cli.order {
        job.order = n;
    }
    if let Some(k) = cli.germ_order {
        job.germ_order = k;
    }
    if let Some(rho) = &cli.rho {
        job.rho = rho.clone();
    }
    if let Some(m) = cli.samples {
        job.samples = m;
    }
    if let Some(c) = cli.convention {
        job.convention = c;
    }
    if let Some(out) = &cli.out {
        job.out = Some(out.clone());
    }
    job.validate()?;
    Ok(job)
}

fn out_dir(job: &JobSpec) -> PathBuf {
    job.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn solution<'a>(
    phi: &'a Source,
    t: f64,
    cfg: &ScanConfig,
) -> Result<SchwarzSolution<'a, f64, Source>> {
    SchwarzSolution::new(phi, Complex64::new(t, 0.0), cfg.solver.clone())
        .with_context(|| format!("solve at t = {t}"))
}

fn cmd_bnorm(job: &JobSpec, phi: &Source, cfg: &ScanConfig) -> Result<bool> {
    let norm = bnorm_grid(phi, Domain::Exterior, &cfg.grid)?;
    println!("phi: {}", phi.describe());
    println!(
        "grid norm: {} (refinement gain {})",
        fmt_float(norm.value),
        fmt_float(norm.grid_error)
    );
    if let Source::Rational(r) = phi {
        println!(
            "boundary formula: {}",
            fmt_float(bnorm_rational_boundary(r, Domain::Exterior).value)
        );
    }
    println!("t,bnorm,gate");
    for &t in &job.t {
        let v = t * norm.value;
        println!(
            "{},{},{}",
            fmt_float(t),
            fmt_float(v),
            scan_gate(v, t * norm.grid_error, cfg.slack).as_str()
        );
    }
    Ok(true)
}

fn cmd_grunsky(job: &JobSpec, phi: &Source, cfg: &ScanConfig) -> Result<bool> {
    let mut ok = true;
    println!("t,grunsky_norm,N,certificate,witness_form");
    for &t in &job.t {
        let result = solution(phi, t, cfg).and_then(|sol| {
            let germ = germ_at_infinity(&sol, cfg.germ_order)?;
            let alpha = grunsky_from_map(&germ, cfg.order)?;
            Ok(univalence_certificate(
                &alpha.matrix(),
                cfg.slack,
                &cfg.power,
            )?)
        });
        match result {
            Ok(c) => {
                let form = match &c {
                    Certificate::NonUnivalent { form, .. } => fmt_float(*form),
                    Certificate::Inconclusive { .. } => String::new(),
                };
                println!(
                    "{},{},{},{},{form}",
                    fmt_float(t),
                    fmt_float(c.norm()),
                    cfg.order,
                    c.as_str()
                );
            }
            Err(e) => {
                ok = false;
                eprintln!("t = {t}: {e:#}");
                println!("{},,{},error,", fmt_float(t), cfg.order);
            }
        }
    }
    Ok(ok)
}

fn cmd_solve(job: &JobSpec, phi: &Source, cfg: &ScanConfig) -> Result<bool> {
    let dir = out_dir(job);
    let mut ok = true;
    for &t in &job.t {
        let sol = match solution(phi, t, cfg) {
            Ok(s) => s,
            Err(e) => {
                ok = false;
                eprintln!("{e:#}");
                continue;
            }
        };
        match schwarzian_roundtrip(&sol, cfg.residual_radius, cfg.residual_points) {
            Ok(r) => println!("t = {t}: round-trip residual {}", fmt_float(r)),
            Err(e) => {
                ok = false;
                eprintln!("t = {t}: round-trip: {e}");
            }
        }
        for &rho in &cfg.rho {
            match sol.sample_circle(rho, cfg.samples) {
                Ok(s) => {
                    let path = dir.join(format!("solve_t{t}_rho{rho}.csv"));
                    let path = write_samples_csv(&s, &path)?;
                    println!("t = {t}, rho = {rho}: {}", path.display());
                }
                Err(e) => {
                    ok = false;
                    eprintln!("t = {t}, rho = {rho}: {e}");
                }
            }
        }
    }
    Ok(ok)
}

fn cmd_aw(job: &JobSpec, phi: &Source, cfg: &ScanConfig) -> Result<bool> {
    let norm = bnorm_grid(phi, Domain::Exterior, &cfg.grid)?;
    let basis = TrialBasis::<f64>::monomials(24)?;
    let mut ok = true;
    println!("convention: {}", job.convention);
    println!("t,nu_sup,full_bound,square_bound");
    for &t in &job.t {
        let nu = match HarmonicBeltrami::with_norm(
            phi,
            Complex64::new(t, 0.0),
            job.convention,
            norm.clone(),
            AW_RADIUS,
        ) {
            Ok(nu) => nu,
            Err(e) => {
                println!("{},,,", fmt_float(t));
                eprintln!("t = {t}: {e}");
                continue;
            }
        };
        let row = (|| -> Result<String> {
            let sup = nu.sup_norm(&cfg.grid)?.value;
            let full = extremality_lower_bound(&nu, &basis)?.value;
            let sq = a1sq_lower_bound(&nu, &basis)?.value;
            Ok(format!(
                "{},{},{},{}",
                fmt_float(t),
                fmt_float(sup),
                fmt_float(full),
                fmt_float(sq)
            ))
        })();
        match row {
            Ok(r) => println!("{r}"),
            Err(e) => {
                ok = false;
                eprintln!("t = {t}: {e:#}");
            }
        }
    }
    Ok(ok)
}

fn cmd_werner(job: &JobSpec, phi: &Source, cfg: &ScanConfig) -> Result<bool> {
    let polygon = job
        .polygon()
        .context("`werner` needs a polygon generator")?;
    let value = werner_value::<f64>(polygon)?;
    let germ = match polygon {
        PolygonSpec::Regular { n } => regular_ngon_exterior_map::<f64>(*n, cfg.germ_order)?,
        PolygonSpec::Explicit { .. } => {
            germ_at_infinity(&solution(phi, 1.0, cfg)?, cfg.germ_order)?
        }
    };
    let alpha = grunsky_from_map(&germ, cfg.order)?;
    let c = univalence_certificate(&alpha.matrix(), cfg.slack, &cfg.power)?;
    println!("1 - alpha: {}", fmt_float(value));
    println!("grunsky norm (N = {}): {}", cfg.order, fmt_float(c.norm()));
    println!("the truncated norm is a lower bound; the two are reported side by side");
    Ok(true)
}

fn cmd_scan(job: &JobSpec, phi: &Source, cfg: &ScanConfig, format: ReportFormat) -> Result<bool> {
    let report = run_ray_scan(phi, &job.t, cfg)?;
    let path = emit_report(&report.records, format, &out_dir(job))?;
    for r in &report.records {
        for e in &r.errors {
            eprintln!("t = {}: {e}", r.t);
        }
    }
    println!("report: {}", path.display());
    match report.witness {
        Some((t1, t2)) => println!("starlikeness violation witness: t1 = {t1}, t2 = {t2}"),
        None => println!("no starlikeness violation witness on this grid"),
    }
    Ok(!report.any_failed())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let job = load_job(cli).map_err(|e| Failure::Job(e.into()))?;
    let phi = job.source().map_err(|e| Failure::Job(e.into()))?;
    let cfg = ScanConfig::from_job(&job);
    let ok = match cli.command {
        Command::Bnorm => cmd_bnorm(&job, &phi, &cfg),
        Command::Grunsky => cmd_grunsky(&job, &phi, &cfg),
        Command::Solve => cmd_solve(&job, &phi, &cfg),
        Command::Aw => cmd_aw(&job, &phi, &cfg),
        Command::Werner => cmd_werner(&job, &phi, &cfg),
        Command::Scan => cmd_scan(&job, &phi, &cfg, cli.format),
    }?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Numerical)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Job(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical) => {
            eprintln!("error: numerical failure in at least one record");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
