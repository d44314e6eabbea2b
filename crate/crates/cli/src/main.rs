//! Command-line interface: mesh generation and export, verification reports,
//! parameter scans, and derived-constant tables.
//!
//! Exit codes: 0 success / verification pass, 1 verification failure,
//! 2 usage or parameter error.

mod config;
mod csv5;
mod obj;
mod sampled;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{FormatOpt, RunConfig, SchemeOpt, TrivialOpt};
use csv5::Row;
use rayon::prelude::*;
use s3r_core::{
    derive_constants, verify_surface, FamilySurface, FdConfig, GridSpec, Immersion, JetScheme,
    SurfaceInfo, SurfaceParams, Tolerances, TrivialKind, TrivialSurface, VerificationReport,
    VerifyOptions,
};
use sampled::SampledImmersion;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "s3r",
    version,
    about = "Minimal constant-angle surfaces in the sphere-line product: generate, verify, scan, tabulate"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample an immersion on a grid and export it (csv5 or obj).
    Generate(Flags),
    /// Run the verification suite and emit a JSON report.
    Verify(Flags),
    /// Sweep the parameter rectangle and tabulate constants and residuals.
    Scan(Flags),
    /// Print the derived constants for one parameter choice.
    Table(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Flat key=value config file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Constant angle in radians (or degrees with --degrees); scan accepts a
    /// comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Family frequency parameter.
    #[arg(long, allow_hyphen_values = true)]
    nu1: Option<String>,
    /// Samples per axis as NX,NY.
    #[arg(long)]
    grid: Option<String>,
    /// Parameter rectangle as X0,X1,Y0,Y1.
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// Derivative scheme: analytic|dual|fd.
    #[arg(long)]
    scheme: Option<String>,
    /// Tolerance for analytic-derivative checks.
    #[arg(long, allow_hyphen_values = true)]
    tol_analytic: Option<String>,
    /// Tolerance for finite-difference checks.
    #[arg(long, allow_hyphen_values = true)]
    tol_fd: Option<String>,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv5|obj|json.
    #[arg(long)]
    format: Option<String>,
    /// Stereographic pole index 1..=4.
    #[arg(long)]
    pole: Option<String>,
    /// Trivial surface: great-sphere|clifford-torus|great-circle-cylinder.
    #[arg(long)]
    trivial: Option<String>,
    /// Slice level for the trivial kinds that carry one.
    #[arg(long, allow_hyphen_values = true)]
    level: Option<String>,
    /// Verify a previously exported csv5 mesh (finite differences only).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Number of nu1 samples per theta in a scan (endpoints included).
    #[arg(long)]
    nu1_count: Option<String>,
    /// Interpret angle inputs as degrees.
    #[arg(long)]
    degrees: bool,
    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
}

fn resolve(flags: &Flags) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &flags.config {
        cfg.load_file(path)?;
    }
    let pairs: [(&str, &Option<String>); 12] = [
        ("theta", &flags.theta),
        ("nu1", &flags.nu1),
        ("grid", &flags.grid),
        ("range", &flags.range),
        ("scheme", &flags.scheme),
        ("tol_analytic", &flags.tol_analytic),
        ("tol_fd", &flags.tol_fd),
        ("format", &flags.format),
        ("pole", &flags.pole),
        ("trivial", &flags.trivial),
        ("level", &flags.level),
        ("nu1_count", &flags.nu1_count),
    ];
    for (key, value) in pairs {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if let Some(out) = &flags.out {
        cfg.out = Some(out.clone());
    }
    if let Some(input) = &flags.input {
        cfg.input = Some(input.clone());
    }
    if flags.degrees {
        cfg.set("degrees", "true")?;
    }
    cfg.apply_degrees();
    Ok(cfg)
}

fn write_output(cfg: &RunConfig, bytes: &[u8]) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, bytes)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn single_theta(cfg: &RunConfig) -> Result<f64> {
    match cfg.theta.as_slice() {
        [t] => Ok(*t),
        [] => bail!("missing --theta"),
        _ => bail!("this subcommand takes a single --theta value"),
    }
}

fn family_surface(cfg: &RunConfig) -> Result<(SurfaceParams<f64>, FamilySurface<f64>)> {
    let theta = single_theta(cfg)?;
    let nu1 = cfg.nu1.ok_or_else(|| anyhow::anyhow!("missing --nu1"))?;
    let params = SurfaceParams::new(theta, nu1)?;
    Ok((params, FamilySurface::new(params)?))
}

fn trivial_kind(sel: TrivialOpt, level: f64) -> TrivialKind<f64> {
    match sel {
        TrivialOpt::GreatSphere => TrivialKind::GreatSphereSlice { level },
        TrivialOpt::CliffordTorus => TrivialKind::CliffordTorusSlice { level },
        TrivialOpt::GreatCircleCylinder => TrivialKind::GreatCircleCylinder,
    }
}

fn jet_scheme(s: SchemeOpt) -> JetScheme {
    match s {
        SchemeOpt::Analytic => JetScheme::Analytic,
        SchemeOpt::Dual => JetScheme::DualForward,
        SchemeOpt::Fd => JetScheme::FiniteDifference,
    }
}

fn sample_rows(f: &dyn Fn(f64, f64) -> [f64; 5], cfg: &RunConfig) -> Vec<Row> {
    let (nx, ny) = cfg.grid;
    let (x0, x1, y0, y1) = cfg.range;
    let dx = (x1 - x0) / (nx - 1).max(1) as f64;
    let dy = (y1 - y0) / (ny - 1).max(1) as f64;
    let mut rows = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let x = x0 + dx * i as f64;
            let y = y0 + dy * j as f64;
            rows.push(Row { x, y, f: f(x, y) });
        }
    }
    rows
}

fn cmd_generate(cfg: &RunConfig) -> Result<u8> {
    let eval: Box<dyn Fn(f64, f64) -> [f64; 5]> = match (cfg.trivial, cfg.nu1) {
        (Some(sel), _) => {
            let surf = TrivialSurface::new(trivial_kind(sel, cfg.level))?;
            Box::new(move |x, y| surf.eval(x, y).0)
        }
        (None, Some(_)) => {
            let (_, surf) = family_surface(cfg)?;
            Box::new(move |x, y| surf.eval(x, y).0)
        }
        (None, None) => bail!("generate needs either --theta/--nu1 or --trivial"),
    };
    let rows = sample_rows(&eval, cfg);
    let mut buf = Vec::new();
    match cfg.format.unwrap_or(FormatOpt::Csv5) {
        FormatOpt::Csv5 => csv5::write_rows(&mut buf, &rows)?,
        FormatOpt::Obj => obj::write_obj(&mut buf, &rows, cfg.grid.0, cfg.grid.1, cfg.pole)?,
        FormatOpt::Json => bail!("generate emits csv5 or obj, not json"),
    }
    write_output(cfg, &buf)?;
    Ok(0)
}

/// JSON report envelope: toolkit version and the full effective
/// configuration ride along for reproducibility.
#[derive(Serialize)]
struct ReportEnvelope<'a> {
    toolkit_version: &'static str,
    config: &'a BTreeMap<String, String>,
    report: &'a VerificationReport<f64>,
}

fn emit_report(cfg: &RunConfig, report: &VerificationReport<f64>) -> Result<u8> {
    let pairs = cfg.as_pairs();
    let envelope = ReportEnvelope {
        toolkit_version: s3r_core::VERSION,
        config: &pairs,
        report,
    };
    let mut text = serde_json::to_string_pretty(&envelope)?;
    text.push('\n');
    write_output(cfg, text.as_bytes())?;
    Ok(if report.overall_pass { 0 } else { 1 })
}

fn tolerances(cfg: &RunConfig) -> Tolerances<f64> {
    Tolerances {
        analytic: cfg.tol_analytic,
        fd: cfg.tol_fd,
        ..Tolerances::default()
    }
}

fn cmd_verify(cfg: &RunConfig) -> Result<u8> {
    if let Some(path) = &cfg.input {
        if cfg.trivial.is_some() || !cfg.theta.is_empty() {
            bail!("--input excludes --theta/--nu1/--trivial");
        }
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        let mesh = csv5::Mesh::from_rows(&csv5::parse(&text)?)?;
        let surf = SampledImmersion::new(mesh)?;
        let (nx, ny) = (surf.nx(), surf.ny());
        if nx < 11 || ny < 11 {
            bail!("mesh verification needs at least 11x11 samples, got {nx}x{ny}");
        }
        if (surf.hx() - surf.hy()).abs() > 1e-9 * surf.hx() {
            bail!("mesh verification requires equal x and y spacing");
        }
        // every stencil (jets, gridded fields, curvature) stays on stored
        // nodes: steps equal the spacing, boundary trimmed accordingly
        let trim = 4usize;
        let grid = GridSpec::new(
            nx - 2 * trim,
            ny - 2 * trim,
            surf.x(trim),
            surf.x(nx - 1 - trim),
            surf.y(trim),
            surf.y(ny - 1 - trim),
        )?;
        let opts = VerifyOptions {
            grid,
            scheme: JetScheme::FiniteDifference,
            fd: FdConfig::grid_locked(surf.hx()),
            tolerances: tolerances(cfg),
            curvature_step: Some(surf.hx()),
            curvature_margin: trim,
        };
        let report = verify_surface(&surf, &SurfaceInfo::Unknown, &opts);
        return emit_report(cfg, &report);
    }

    let grid = {
        let (nx, ny) = cfg.grid;
        let (x0, x1, y0, y1) = cfg.range;
        GridSpec::new(nx, ny, x0, x1, y0, y1)?
    };
    let mut opts = VerifyOptions::new(grid);
    opts.scheme = jet_scheme(cfg.scheme);
    opts.tolerances = tolerances(cfg);

    let report = match cfg.trivial {
        Some(sel) => {
            let kind = trivial_kind(sel, cfg.level);
            let surf = TrivialSurface::new(kind)?;
            verify_surface(&surf, &SurfaceInfo::Trivial(kind), &opts)
        }
        None => {
            let (params, surf) = family_surface(cfg)?;
            verify_surface(&surf, &SurfaceInfo::Family(params), &opts)
        }
    };
    emit_report(cfg, &report)
}

/// One scan row: parameters, derived constants, grouped residual maxima.
struct ScanRow {
    theta: f64,
    nu1: f64,
    constants: s3r_core::DerivedConstants<f64>,
    groups: Vec<f64>,
    pass: bool,
}

const SCAN_GROUPS: [(&str, &[&str]); 10] = [
    ("on_manifold", &["on_manifold"]),
    ("frame", &["frame_orthonormality"]),
    ("angle", &["angle_constancy"]),
    ("minimality", &["minimality"]),
    (
        "shape",
        &["shape_axi_zero", "beta_constancy", "beta_identity", "metric_identity"],
    ),
    ("flatness", &["flatness"]),
    (
        "structure",
        &[
            "gauss_relation",
            "codazzi_ricci_a",
            "codazzi_ricci_b",
            "gauss_relation_edge",
            "codazzi_ricci_a_edge",
            "codazzi_ricci_b_edge",
        ],
    ),
    (
        "pmc",
        &[
            "pmc_lambda_x",
            "pmc_trace_x",
            "pmc_lambda_y",
            "pmc_trace_y",
            "pmc_lambda_x_edge",
            "pmc_trace_x_edge",
            "pmc_lambda_y_edge",
            "pmc_trace_y_edge",
        ],
    ),
    (
        "pde",
        &[
            "sys_fxx",
            "sys_fxy",
            "sys_fyy",
            "sys_eta_x",
            "sys_eta_y",
            "sys_fourth_x",
            "sys_fourth_y",
            "sys_xi_tangent",
            "sys_fifth_coord",
        ],
    ),
    ("roundtrip", &["frequency_roundtrip"]),
];

fn scan_row(
    theta: f64,
    nu1: f64,
    grid: GridSpec<f64>,
    scheme: JetScheme,
    tol: Tolerances<f64>,
) -> Result<ScanRow> {
    let params = SurfaceParams::new(theta, nu1)?;
    let constants = derive_constants(&params)?;
    let surf = FamilySurface::new(params)?;
    let mut opts = VerifyOptions::new(grid);
    opts.scheme = scheme;
    opts.tolerances = tol;
    let report = verify_surface(&surf, &SurfaceInfo::Family(params), &opts);
    let groups = SCAN_GROUPS
        .iter()
        .map(|(_, names)| {
            names
                .iter()
                .filter_map(|n| report.check(n).and_then(|c| c.max_residual))
                .fold(0.0f64, f64::max)
        })
        .collect();
    Ok(ScanRow { theta, nu1, constants, groups, pass: report.overall_pass })
}

fn cmd_scan(cfg: &RunConfig) -> Result<u8> {
    if cfg.theta.is_empty() {
        bail!("scan needs --theta (one value or a comma-separated list)");
    }
    let grid = {
        let (nx, ny) = cfg.grid;
        let (x0, x1, y0, y1) = cfg.range;
        GridSpec::new(nx, ny, x0, x1, y0, y1)?
    };
    let scheme = jet_scheme(cfg.scheme);
    let tol = tolerances(cfg);

    // deterministic (theta, nu1) enumeration with exact interval endpoints
    let mut jobs = Vec::new();
    for &theta in &cfg.theta {
        let hi = (1.0 + theta.cos().powi(2)).sqrt();
        let n = cfg.nu1_count;
        for k in 0..n {
            let nu1 = if k == 0 {
                1.0
            } else if k == n - 1 {
                hi
            } else {
                1.0 + (hi - 1.0) * k as f64 / (n - 1) as f64
            };
            jobs.push((theta, nu1));
        }
    }
    let rows: Result<Vec<ScanRow>> = jobs
        .par_iter()
        .map(|&(theta, nu1)| scan_row(theta, nu1, grid, scheme, tol))
        .collect();
    let rows = rows?;

    let mut out = String::new();
    out.push_str("theta,nu1,nu2,mu1,mu2,c1,c2,beta1p,beta2p");
    for (name, _) in SCAN_GROUPS {
        out.push(',');
        out.push_str(name);
    }
    out.push_str(",pass\n");
    for r in rows {
        let k = &r.constants;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}",
            csv5::fmt_f64(r.theta),
            csv5::fmt_f64(r.nu1),
            csv5::fmt_f64(k.nu2),
            csv5::fmt_f64(k.mu1),
            csv5::fmt_f64(k.mu2),
            csv5::fmt_f64(k.c1),
            csv5::fmt_f64(k.c2),
            csv5::fmt_f64(k.beta1p),
            csv5::fmt_f64(k.beta2p),
        ));
        for g in &r.groups {
            out.push_str(&format!(",{g:.3e}"));
        }
        out.push_str(&format!(",{}\n", r.pass));
    }
    write_output(cfg, out.as_bytes())?;
    Ok(0)
}

fn cmd_table(cfg: &RunConfig) -> Result<u8> {
    let (params, _) = family_surface(cfg)?;
    let k = derive_constants(&params)?;
    let mut out = String::new();
    for (name, v) in [
        ("theta", params.theta),
        ("nu1", params.nu1),
        ("nu2", k.nu2),
        ("mu1", k.mu1),
        ("mu2", k.mu2),
        ("c1", k.c1),
        ("c2", k.c2),
        ("beta1p", k.beta1p),
        ("beta2p", k.beta2p),
    ] {
        out.push_str(&format!("{name} = {}\n", csv5::fmt_f64(v)));
    }
    write_output(cfg, out.as_bytes())?;
    Ok(0)
}

fn run() -> Result<u8> {
    let cli = Cli::parse();
    let (flags, run_fn): (&Flags, fn(&RunConfig) -> Result<u8>) = match &cli.cmd {
        Cmd::Generate(f) => (f, cmd_generate),
        Cmd::Verify(f) => (f, cmd_verify),
        Cmd::Scan(f) => (f, cmd_scan),
        Cmd::Table(f) => (f, cmd_table),
    };
    let cfg = resolve(flags)?;
    if flags.print_config {
        let mut out = String::new();
        for (k, v) in cfg.as_pairs() {
            out.push_str(&format!("{k}={v}\n"));
        }
        std::io::stdout().write_all(out.as_bytes())?;
        return Ok(0);
    }
    run_fn(&cfg)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
