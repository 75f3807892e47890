use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use serde_json::{json, Value};

use semiq_core::evolution::{rates, HamiltonianSystem};
use semiq_core::geometries::builtin;
use semiq_core::geometry::GeometryData;
use semiq_core::report::config::parse_config;
use semiq_core::report::{default_tolerance, emit_report, run_suite_with, Format, RunOptions, SuiteResult, SUITES};
use semiq_core::semiquant::{commutator, nabla_q, qgrad, star, wedge1};
use semiq_core::{parse, LambdaScalar, QTensor, Tensor};

const REPORT_DIR_VAR: &str = "SEMIQ_REPORT_DIR";

#[derive(Parser)]
#[command(name = "semiq", version, about = "First-order semiquantisation checks on a coordinate chart")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Json,
    Text,
}

impl From<Fmt> for Format {
    fn from(f: Fmt) -> Self {
        match f {
            Fmt::Json => Format::Json,
            Fmt::Text => Format::Text,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Star,
    Wedge,
    #[value(name = "nablaQ", alias = "nablaq")]
    NablaQ,
    Commutator,
}

#[derive(clap::Args)]
struct GeoArgs {
    /// Built-in geometry (flat, cpn, torsion, torsion-const) or a JSON config path.
    #[arg(long = "geometry")]
    geometry: String,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Numerical value of λ is i·L.
    #[arg(long = "lambda-im")]
    lambda_im: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run verification suites and emit a report.
    Check {
        geometry: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long = "lambda-im")]
        lambda_im: Option<f64>,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
        /// Suite name, or `all` for every suite that applies.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Fmt::Json)]
        format: Fmt,
        /// Record wall time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Evaluate one semiquantised operation at a point.
    Eval {
        #[arg(value_enum)]
        op: Op,
        #[command(flatten)]
        geo: GeoArgs,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        at: String,
    },
    /// Instantaneous evolution rates under a Hamiltonian.
    Evolve {
        #[command(flatten)]
        geo: GeoArgs,
        #[arg(long = "H")]
        h: String,
        #[arg(long)]
        a: String,
        /// One or more points, separated by `;`.
        #[arg(long)]
        at: String,
    },
}

struct Loaded {
    geo: GeometryData<f64>,
    seed: Option<u64>,
}

fn load_geometry(name: &str, n: usize, lambda_im: Option<f64>) -> Result<Loaded> {
    let path = Path::new(name);
    let mut loaded = if name.ends_with(".json") || path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {name}"))?;
        let cfg = parse_config(&text).with_context(|| format!("in {name}"))?;
        Loaded {
            geo: cfg.build().with_context(|| format!("in {name}"))?,
            seed: cfg.seed,
        }
    } else {
        Loaded {
            geo: builtin(name, n, lambda_im.unwrap_or(1.0))?,
            seed: None,
        }
    };
    if let Some(l) = lambda_im {
        loaded.geo = loaded.geo.with_lambda_value(Complex::new(0.0, l));
    }
    Ok(loaded)
}

fn parse_point(text: &str, dim: usize) -> Result<Vec<f64>> {
    let p: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad coordinate `{s}`")))
        .collect::<Result<_>>()?;
    if p.len() != dim {
        bail!("point has {} coordinates, chart dimension is {dim}", p.len());
    }
    Ok(p)
}

fn cplx(z: Complex<f64>) -> Value {
    json!([z.re, z.im])
}

fn tensor_json(t: &Tensor<f64>) -> Value {
    Value::Array(t.values().into_iter().map(cplx).collect())
}

fn qtensor_json(geo: &GeometryData<f64>, x: &QTensor<f64>) -> Value {
    let at_lambda: Vec<Value> = x
        .c0
        .values()
        .into_iter()
        .zip(x.c1.values())
        .map(|(a, b)| cplx(geo.evaluate_lambda(LambdaScalar::new(a, b))))
        .collect();
    json!({
        "rank": x.rank(),
        "classical": tensor_json(&x.c0),
        "lambda": tensor_json(&x.c1),
        "at_lambda": at_lambda,
    })
}

// a closed pipe downstream is not an error worth a panic
fn out(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_json(v: &Value) {
    out(&format!("{}\n", serde_json::to_string_pretty(v).expect("serialisable")));
}

fn write_atomic(path: &Path, body: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, body).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn report_path(explicit: Option<PathBuf>) -> Option<PathBuf> {
    match (explicit, std::env::var_os(REPORT_DIR_VAR)) {
        (Some(p), Some(dir)) if p.is_relative() => Some(PathBuf::from(dir).join(p)),
        (Some(p), _) => Some(p),
        (None, _) => None,
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    geometry: &str,
    n: usize,
    lambda_im: Option<f64>,
    points: usize,
    seed: Option<u64>,
    tol: Option<f64>,
    suite: &str,
    report: Option<PathBuf>,
    format: Format,
    timing: bool,
) -> Result<bool> {
    let loaded = load_geometry(geometry, n, lambda_im)?;
    let geo = &loaded.geo;
    let seed = seed.or(loaded.seed).unwrap_or(42);
    let tol = tol.unwrap_or_else(|| default_tolerance(geo));
    let opts = RunOptions { timing };
    let suites: Vec<&str> = if suite == "all" {
        SUITES
            .iter()
            .copied()
            .filter(|s| *s != "cpn-catalogue" || geo.id.starts_with("cpn-"))
            .collect()
    } else {
        vec![suite]
    };
    let results: Vec<SuiteResult> = suites
        .iter()
        .map(|s| run_suite_with(s, geo, points, seed, tol, opts))
        .collect::<Result<_, _>>()?;
    let body = match (format, results.as_slice()) {
        (_, [one]) => emit_report(one, format),
        (Format::Json, many) => {
            let mut s = serde_json::to_string_pretty(many)?;
            s.push('\n');
            s
        }
        (Format::Text, many) => many
            .iter()
            .map(|r| emit_report(r, format))
            .collect::<Vec<_>>()
            .join("\n"),
    };
    match report_path(report) {
        Some(p) => write_atomic(&p, &body)?,
        None => out(&body),
    }
    let ok = results.iter().all(SuiteResult::passed);
    if !ok {
        for r in &results {
            for c in r.failing() {
                eprintln!("FAIL {}/{}", r.suite, c.id);
            }
        }
    }
    Ok(ok)
}

fn cmd_eval(op: Op, g: &GeoArgs, a: &str, b: Option<&str>, at: &str) -> Result<()> {
    let loaded = load_geometry(&g.geometry, g.n, g.lambda_im)?;
    let geo = &loaded.geo;
    let d = geo.dim();
    let point = parse_point(at, d)?;
    let pg = geo.at(&point)?;
    let scalar = |e: &str| -> Result<QTensor<f64>> {
        let j = parse(e, d)?.eval_jet(&point)?;
        Ok(QTensor::scalar(j, semiq_core::Jet::zero(d)))
    };
    let qa = scalar(a)?;
    let need_b = || -> Result<QTensor<f64>> {
        match b {
            Some(b) => scalar(b),
            None => bail!("--b is required for this operation"),
        }
    };
    let (name, out) = match op {
        Op::Star => ("star", star(&pg, &qa, &need_b()?)),
        Op::Commutator => ("commutator", commutator(&pg, &qa, &need_b()?)),
        Op::Wedge => ("wedge", wedge1(&pg, &qgrad(&qa), &qgrad(&need_b()?))),
        Op::NablaQ => ("nablaQ", nabla_q(&pg, &qgrad(&qa))),
    };
    print_json(&json!({
        "op": name,
        "geometry": geo.id,
        "point": point,
        "lambda_value": cplx(geo.lambda_value),
        "result": qtensor_json(geo, &out),
    }));
    Ok(())
}

fn cmd_evolve(g: &GeoArgs, h: &str, a: &str, at: &str) -> Result<()> {
    let loaded = load_geometry(&g.geometry, g.n, g.lambda_im)?;
    let geo = std::sync::Arc::new(loaded.geo);
    let d = geo.dim();
    let sys = HamiltonianSystem::new(geo.clone(), std::sync::Arc::new(parse(h, d)?));
    let a = parse(a, d)?;
    let mut rows = Vec::new();
    for p in at.split(';').filter(|s| !s.trim().is_empty()) {
        let r = rates(&sys, &a, &parse_point(p, d)?)?;
        rows.push(json!({
            "point": r.point,
            "flow": r.flow.into_iter().map(cplx).collect::<Vec<_>>(),
            "a_dot": cplx(r.a_dot),
            "da_dot": r.da_dot.into_iter().map(cplx).collect::<Vec<_>>(),
            "defect": r.defect.into_iter().map(cplx).collect::<Vec<_>>(),
        }));
    }
    print_json(&json!({ "geometry": geo.id, "H": h, "rates": rows }));
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Check {
            geometry,
            n,
            lambda_im,
            points,
            seed,
            tol,
            suite,
            report,
            format,
            timing,
        } => cmd_check(&geometry, n, lambda_im, points, seed, tol, &suite, report, format.into(), timing),
        Cmd::Eval { op, geo, a, b, at } => cmd_eval(op, &geo, &a, b.as_deref(), &at).map(|_| true),
        Cmd::Evolve { geo, h, a, at } => cmd_evolve(&geo, &h, &a, &at).map(|_| true),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
