//! Verification suites and their reports.

pub mod config;

use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::evolution::{evolution_defect, evolve, evolve_oneform};
use crate::geometries::catalogue::{cpn_check_residual, CPN_CHECKS};
use crate::geometries::cpn_frame;
use crate::geometry::{compat_residuals, DerivativeMode, GeometryData, PointGeometry};
use crate::jet::Jet;
use crate::semiquant::*;
use crate::tensor::{QTensor, Tensor};
use crate::Error;

pub const SUITES: &[&str] = &["classical-compat", "dga", "metric", "qlc", "cpn-catalogue", "evolution"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// `None` when the residual is not finite.
    pub classical: Option<f64>,
    pub lambda: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: String,
    pub geometry: String,
    pub seed: u64,
    pub points: usize,
    pub checks: Vec<CheckRecord>,
    pub elapsed_ms: u64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failing(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(Error::Config(format!("unknown format `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Record wall time; off by default so reports are reproducible.
    pub timing: bool,
}

/// Default tolerance for a geometry's derivative provider.
pub fn default_tolerance(geo: &GeometryData<f64>) -> f64 {
    match geo.mode {
        DerivativeMode::Analytic => 1e-9,
        DerivativeMode::Jet => 1e-6,
    }
}

type Residual = (f64, f64);
type PointChecks = Vec<(&'static str, Residual)>;

fn classical(r: f64) -> Residual {
    (r, 0.0)
}

/// Random polynomial of degree 3 in the chart coordinates.
pub fn random_polynomial(pg: &PointGeometry<f64>, rng: &mut ChaCha8Rng) -> Jet<f64> {
    let x = pg.coords();
    let d = pg.dim();
    let mut f = Jet::constant(d, Complex::new(rng.gen_range(-1.0..1.0), 0.0));
    for i in 0..d {
        f = &f + &x[i].scale_real(rng.gen_range(-1.0..1.0));
        for j in i..d {
            f = &f + &x[i].mul_jet(&x[j]).scale_real(rng.gen_range(-1.0..1.0));
        }
    }
    let (a, b, c) = (rng.gen_range(0..d), rng.gen_range(0..d), rng.gen_range(0..d));
    &f + &x[a].mul_jet(&x[b]).mul_jet(&x[c]).scale_real(rng.gen_range(-1.0..1.0))
}

fn qfun(pg: &PointGeometry<f64>, rng: &mut ChaCha8Rng) -> QTensor<f64> {
    let a1 = random_polynomial(pg, rng).scale(Complex::new(0.0, 0.5));
    QTensor::scalar(random_polynomial(pg, rng), a1)
}

fn qform(pg: &PointGeometry<f64>, rng: &mut ChaCha8Rng) -> QTensor<f64> {
    let d = pg.dim();
    let c0 = Tensor::from_fn(d, 1, |_| random_polynomial(pg, rng));
    let c1 = Tensor::from_fn(d, 1, |_| random_polynomial(pg, rng).scale(Complex::new(0.0, 0.3)));
    QTensor::new(c0, c1)
}

fn classical_compat(pg: &PointGeometry<f64>, _: &mut ChaCha8Rng) -> Result<PointChecks, Error> {
    let c = compat_residuals(pg);
    Ok(vec![
        ("t1", classical(c.t1.max_abs())),
        ("t2", classical(c.t2.max_abs())),
        ("nabla-g", classical(c.mg.max_abs())),
    ])
}

fn dga(pg: &PointGeometry<f64>, rng: &mut ChaCha8Rng) -> Result<PointChecks, Error> {
    let (a, b, c) = (qfun(pg, rng), qfun(pg, rng), qfun(pg, rng));
    let xi = qform(pg, rng);
    let l = |a: &QTensor<f64>, x: &QTensor<f64>| act(pg, a, x, Side::Left);
    let r = |x: &QTensor<f64>, a: &QTensor<f64>| act(pg, a, x, Side::Right);
    let st = |a: &QTensor<f64>, b: &QTensor<f64>| star(pg, a, b);
    let assoc = st(&st(&a, &b), &c).max_diff(&st(&a, &st(&b, &c)));
    let dl = qgrad(&st(&a, &b)).max_diff(&(&r(&qgrad(&a), &b) + &l(&a, &qgrad(&b))));
    let d_adb = l(&a, &qgrad(&b)).map(ext_d).max_diff(&wedge1(pg, &qgrad(&a), &qgrad(&b)));
    let left = l(&a, &l(&b, &xi)).max_diff(&l(&st(&a, &b), &xi));
    let bimod = r(&l(&a, &xi), &b).max_diff(&l(&a, &r(&xi, &b)));
    let nl = nabla_q(pg, &l(&a, &xi))
        .max_diff(&(&tensor1(pg, &qgrad(&a), &xi) + &l(&a, &nabla_q(pg, &xi))));
    Ok(vec![
        ("associator", assoc),
        ("d-leibniz", dl),
        ("d-of-a-db", d_adb),
        ("left-action", left),
        ("bimodule", bimod),
        ("nablaq-leibniz", nl),
    ])
}

fn metric(pg: &PointGeometry<f64>, _: &mut ChaCha8Rng) -> Result<PointChecks, Error> {
    let g = QTensor::classical(pg.g.clone());
    let ric = ricci_coeffs(pg);
    let routes = ric.max_diff(&ricci_via_h(pg));
    let wq = wedge1_rank2(pg, &g_q_section(pg)).max_diff(&QTensor::lambda_times(ric));
    Ok(vec![
        ("ricci-routes", classical(routes)),
        ("gq-q-inverse", q_map(pg, &g, QDirection::Inverse).max_diff(&g_q_coeffs(pg))),
        ("wedge-gq", wq),
        ("wedge-g1", wedge1_rank2(pg, &g1_section(pg)).max_abs()),
        ("nablaq-gq", nabla_q_rank2(pg, &g).max_abs()),
    ])
}

fn qlc(pg: &PointGeometry<f64>, _: &mut ChaCha8Rng) -> Result<PointChecks, Error> {
    Ok(vec![("qlc", classical(qlc_residual(pg).max_abs()))])
}

fn evolution(pg: &PointGeometry<f64>, rng: &mut ChaCha8Rng) -> Result<PointChecks, Error> {
    let (a, b, h) = (
        random_polynomial(pg, rng),
        random_polynomial(pg, rng),
        random_polynomial(pg, rng),
    );
    let split = evolve_oneform(pg, &grad(&a), &h)
        .max_diff(&(&grad(&evolve(pg, &a, &h)) + &evolution_defect(pg, &a, &h)));
    let der = (&evolve(pg, &a.mul_jet(&b), &h)
        - &(&a.mul_jet(&evolve(pg, &b, &h)) + &b.mul_jet(&evolve(pg, &a, &h))))
        .max_abs();
    let d = pg.dim();
    let cobasis = (0..d)
        .map(|k| evolve_oneform(pg, &Tensor::basis(d, k), &h).max_abs())
        .fold(0.0, f64::max);
    let mut out = vec![("oneform-split", classical(split)), ("derivation", classical(der))];
    if pg.gamma.max_abs() == 0.0 {
        out.push(("cobasis-invariant", classical(cobasis)));
    }
    Ok(out)
}

fn run_points<F>(
    geo: &GeometryData<f64>,
    points: usize,
    seed: u64,
    f: F,
) -> Result<Vec<PointChecks>, Error>
where
    F: Fn(&GeometryData<f64>, &[f64], &mut ChaCha8Rng) -> Result<PointChecks, Error> + Sync,
{
    let pts = geo.sample_points(points, seed);
    pts.par_iter()
        .enumerate()
        .map(|(k, p)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64 + 1);
            f(geo, p, &mut rng)
        })
        .collect()
}

fn pointwise(
    f: fn(&PointGeometry<f64>, &mut ChaCha8Rng) -> Result<PointChecks, Error>,
) -> impl Fn(&GeometryData<f64>, &[f64], &mut ChaCha8Rng) -> Result<PointChecks, Error> + Sync {
    move |geo, p, rng| f(&geo.at(p)?, rng)
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Merge per-point residuals into records, keeping first-seen check order.
fn assemble(per_point: Vec<PointChecks>, tol: f64) -> Vec<CheckRecord> {
    let mut order: Vec<&'static str> = Vec::new();
    let mut worst: Vec<Residual> = Vec::new();
    for checks in per_point {
        for (id, (c0, c1)) in checks {
            let k = match order.iter().position(|o| *o == id) {
                Some(k) => k,
                None => {
                    order.push(id);
                    worst.push((0.0, 0.0));
                    order.len() - 1
                }
            };
            // NaN must stick
            let w = &mut worst[k];
            w.0 = if c0.is_nan() || w.0.is_nan() { f64::NAN } else { w.0.max(c0) };
            w.1 = if c1.is_nan() || w.1.is_nan() { f64::NAN } else { w.1.max(c1) };
        }
    }
    order
        .into_iter()
        .zip(worst)
        .map(|(id, (c0, c1))| CheckRecord {
            id: id.to_string(),
            classical: finite(c0),
            lambda: finite(c1),
            tolerance: tol,
            pass: c0 <= tol && c1 <= tol,
        })
        .collect()
}

pub fn run_suite(
    suite: &str,
    geo: &GeometryData<f64>,
    points: usize,
    seed: u64,
    tol: f64,
) -> Result<SuiteResult, Error> {
    run_suite_with(suite, geo, points, seed, tol, RunOptions::default())
}

pub fn run_suite_with(
    suite: &str,
    geo: &GeometryData<f64>,
    points: usize,
    seed: u64,
    tol: f64,
    opts: RunOptions,
) -> Result<SuiteResult, Error> {
    let start = Instant::now();
    let per_point = match suite {
        "classical-compat" => run_points(geo, points, seed, pointwise(classical_compat))?,
        "dga" => run_points(geo, points, seed, pointwise(dga))?,
        "metric" => run_points(geo, points, seed, pointwise(metric))?,
        "qlc" => run_points(geo, points, seed, pointwise(qlc))?,
        "evolution" => run_points(geo, points, seed, pointwise(evolution))?,
        "cpn-catalogue" => {
            if !geo.id.starts_with("cpn-") {
                return Err(Error::UnknownGeometry(format!(
                    "{} (cpn-catalogue needs a cpn geometry)",
                    geo.id
                )));
            }
            run_points(geo, points, seed, |geo, p, _| {
                let pg = geo.at(p)?;
                let fr = cpn_frame(geo, p)?;
                CPN_CHECKS
                    .iter()
                    .map(|id| Ok((*id, classical(cpn_check_residual(id, &pg, &fr)?))))
                    .collect()
            })?
        }
        _ => return Err(Error::UnknownSuite(suite.to_string())),
    };
    let elapsed_ms = if opts.timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    Ok(SuiteResult {
        suite: suite.to_string(),
        geometry: geo.id.clone(),
        seed,
        points,
        checks: assemble(per_point, tol),
        elapsed_ms,
    })
}

fn fmt_res(x: Option<f64>) -> String {
    x.map_or_else(|| "non-finite".into(), |v| format!("{v:.3e}"))
}

pub fn emit_report(r: &SuiteResult, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report serialises");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "suite {}  geometry {}  points {}  seed {}",
                r.suite, r.geometry, r.points, r.seed
            );
            let _ = writeln!(s, "{:<22} {:>12} {:>12} {:>10}  result", "check", "classical", "lambda", "tol");
            for c in &r.checks {
                let _ = writeln!(
                    s,
                    "{:<22} {:>12} {:>12} {:>10.1e}  {}",
                    c.id,
                    fmt_res(c.classical),
                    fmt_res(c.lambda),
                    c.tolerance,
                    if c.pass { "PASS" } else { "FAIL" }
                );
            }
            let failing: Vec<&str> = r.failing().map(|c| c.id.as_str()).collect();
            if failing.is_empty() {
                let _ = writeln!(s, "all {} checks passed", r.checks.len());
            } else {
                let _ = writeln!(s, "failing: {}", failing.join(", "));
            }
            if r.elapsed_ms > 0 {
                let _ = writeln!(s, "elapsed {} ms", r.elapsed_ms);
            }
            s
        }
    }
}
