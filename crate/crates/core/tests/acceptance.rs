//! Acceptance criteria 1-11, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the verdict lines are always shown.
//! The process fails when the set of failing criteria differs from
//! `KNOWN_BLOCKED`, i.e. on any regression and on any blocked criterion
//! that starts passing (the block list must then be revisited).

use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use semiq_core::evolution::*;
use semiq_core::geometries::{cpn_frame, make_cpn, make_flat, make_torsion_example, CpnChart};
use semiq_core::geometry::{christoffel, curvature, invert, GeometryData, PointGeometry};
use semiq_core::report::{emit_report, random_polynomial, run_suite, Format};
use semiq_core::semiquant::*;
use semiq_core::{parse, Jet, QTensor, Tensor};

/// Criteria that fail for documented reasons (sign conflict in the
/// closed-form Ricci/g1 displays; qlc-null torsion example).
const KNOWN_BLOCKED: &[u32] = &[4, 6, 7];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn pts(geo: &GeometryData<f64>, count: usize, seed: u64) -> Vec<PointGeometry<f64>> {
    geo.sample_points(count, seed)
        .par_iter()
        .map(|p| geo.at(p).unwrap())
        .collect()
}

fn worst(v: (f64, f64)) -> f64 {
    v.0.max(v.1)
}

fn max_over<F>(p: &[PointGeometry<f64>], f: F) -> f64
where
    F: Fn(&PointGeometry<f64>) -> f64 + Sync + Send,
{
    p.par_iter().map(f).reduce(|| 0.0, f64::max)
}

fn c1_flat_exactness() -> Verdict {
    let hbar = 0.7;
    let mut worst_comm = 0.0f64;
    let mut worst_zero = 0.0f64;
    for n in 1..=2 {
        let geo = make_flat(n, hbar).unwrap();
        let d = 2 * n;
        for pg in pts(&geo, 20, 1) {
            let x = pg.coords();
            let s = |j: &Jet<f64>| QTensor::scalar(j.clone(), Jet::zero(d));
            for i in 0..n {
                for j in 0..n {
                    let c = commutator(&pg, &s(&x[i]), &s(&x[n + j]));
                    let val = geo.evaluate_lambda(c.at(&[]));
                    let want = Complex::new(0.0, if i == j { hbar } else { 0.0 });
                    worst_comm = worst_comm.max((val - want).norm());
                }
            }
            let mut z = h_family(&pg).iter().map(Tensor::max_abs).fold(0.0, f64::max);
            z = z.max(ricci_coeffs(&pg).max_abs()).max(ricci_via_h(&pg).max_abs());
            z = z.max(g_q_coeffs(&pg).c1.max_abs()).max(g1_coeffs(&pg).c1.max_abs());
            for k in 0..d {
                z = z.max(worst(nabla_q(&pg, &basis(d, k)).max_abs()));
            }
            worst_zero = worst_zero.max(z);
        }
    }
    verdict(
        worst_comm <= 1e-14 && worst_zero <= 1e-14,
        format!("[q,p] dev {worst_comm:.1e}, H/R/gQ/nablaQ max {worst_zero:.1e} (tol 1e-14)"),
    )
}

fn c2_concordance() -> Verdict {
    let mut w = 0.0f64;
    for n in 1..=3 {
        let geo = make_cpn::<f64>(n).unwrap();
        let r = geo
            .sample_points(100, 2)
            .par_iter()
            .map(|p| {
                let cf = CpnChart::new(n, p).unwrap().closed_forms();
                let ginv = invert(&cf.g, p).unwrap();
                let gam = christoffel(&cf.g, &ginv);
                gam.max_diff(&cf.gamma).max(curvature(&gam).max_diff(&cf.riemann))
            })
            .reduce(|| 0.0, f64::max);
        w = w.max(r);
    }
    verdict(w <= 1e-9, format!("Gamma/R max dev {w:.1e} over n=1..3 x 100 points (tol 1e-9)"))
}

fn c3_compat() -> Verdict {
    let mut w = 0.0f64;
    let mut ok = true;
    for n in 1..=3 {
        let r = run_suite("classical-compat", &make_cpn(n).unwrap(), 100, 3, 1e-9).unwrap();
        ok &= r.passed();
        for c in &r.checks {
            w = w.max(c.classical.unwrap_or(f64::INFINITY));
        }
    }
    verdict(ok, format!("T1/T2/nabla g max {w:.1e} over n=1..3 x 100 points (tol 1e-9)"))
}

fn c4_ricci() -> Verdict {
    let (mut routes, mut display) = (0.0f64, 0.0f64);
    for n in 1..=3 {
        let geo = make_cpn::<f64>(n).unwrap();
        for p in geo.sample_points(20, 4) {
            let pg = geo.at(&p).unwrap();
            let fr = cpn_frame(&geo, &p).unwrap();
            let r = ricci_coeffs(&pg);
            routes = routes.max(r.max_diff(&ricci_via_h(&pg)));
            display = display.max(r.max_diff(&fr.varpi.scale_real(-0.5 * (n as f64 + 1.0))));
        }
    }
    verdict(
        routes <= 1e-10 && display <= 1e-8,
        format!(
            "routes agree to {routes:.1e} (tol 1e-10); vs -(n+1)/2 varpi dev {display:.2e} (tol 1e-8)"
        ),
    )
}

fn c5_quantum_metric() -> Verdict {
    let (mut wq, mut w1, mut ng) = (0.0f64, 0.0f64, 0.0f64);
    for n in 1..=3 {
        let p = pts(&make_cpn(n).unwrap(), 10, 5);
        wq = wq.max(max_over(&p, |pg| {
            worst(wedge1_rank2(pg, &g_q_section(pg)).max_diff(&QTensor::lambda_times(ricci_coeffs(pg))))
        }));
        w1 = w1.max(max_over(&p, |pg| worst(wedge1_rank2(pg, &g1_section(pg)).max_abs())));
        ng = ng.max(max_over(&p, |pg| {
            worst(nabla_q_rank2(pg, &QTensor::classical(pg.g.clone())).max_abs())
        }));
    }
    verdict(
        wq <= 1e-9 && w1 <= 1e-9 && ng <= 1e-8,
        format!("wedge gQ - lambda R {wq:.1e}, wedge g1 {w1:.1e} (tol 1e-9); nablaQ gQ {ng:.1e} (tol 1e-8)"),
    )
}

fn c6_qlc() -> Verdict {
    let mut cp = 0.0f64;
    for n in 1..=3 {
        let p = pts(&make_cpn(n).unwrap(), 100, 6);
        cp = cp.max(max_over(&p, |pg| qlc_residual(pg).max_abs()));
    }
    let tor = pts(&make_torsion_example(None), 50, 7);
    let t = max_over(&tor, |pg| qlc_residual(pg).max_abs());
    verdict(
        cp <= 1e-8 && t > 1e-3,
        format!("CP^n residual {cp:.1e} (tol 1e-8); torsion example residual {t:.1e} (need > 1e-3)"),
    )
}

fn c7_catalogue() -> Verdict {
    let mut failing = Vec::new();
    let mut w_pass = 0.0f64;
    for n in 1..=2 {
        let r = run_suite("cpn-catalogue", &make_cpn(n).unwrap(), 50, 8, 1e-8).unwrap();
        for c in &r.checks {
            if c.pass {
                w_pass = w_pass.max(c.classical.unwrap());
            } else {
                failing.push(format!("{}@n={n} ({:.2e})", c.id, c.classical.unwrap_or(f64::NAN)));
            }
        }
    }
    let detail = if failing.is_empty() {
        format!("all checks within {w_pass:.1e} (tol 1e-8)")
    } else {
        format!("passing checks within {w_pass:.1e}; failing: {}", failing.join(", "))
    };
    verdict(failing.is_empty(), detail)
}

fn c8_dga() -> Verdict {
    let (mut assoc, mut leib) = (0.0f64, 0.0f64);
    for geo in [make_flat(2, 1.0).unwrap(), make_cpn(2).unwrap()] {
        let p = geo.sample_points(100, 9);
        let r: Vec<(f64, f64)> = p
            .par_iter()
            .enumerate()
            .map(|(k, x)| {
                let pg = geo.at(x).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(900 + k as u64);
                let mut f = || {
                    let a1 = random_polynomial(&pg, &mut rng).scale(Complex::new(0.0, 0.5));
                    QTensor::scalar(random_polynomial(&pg, &mut rng), a1)
                };
                let (a, b, c) = (f(), f(), f());
                let st = |u: &QTensor<f64>, v: &QTensor<f64>| star(&pg, u, v);
                let e1 = worst(st(&st(&a, &b), &c).max_diff(&st(&a, &st(&b, &c))));
                let rhs = &act(&pg, &b, &qgrad(&a), Side::Right) + &act(&pg, &a, &qgrad(&b), Side::Left);
                let e2 = worst(qgrad(&st(&a, &b)).max_diff(&rhs));
                (e1, e2)
            })
            .collect();
        for (e1, e2) in r {
            assoc = assoc.max(e1);
            leib = leib.max(e2);
        }
    }
    verdict(
        assoc <= 1e-10 && leib <= 1e-10,
        format!("associator {assoc:.1e}, quantum Leibniz {leib:.1e} over 2 x 100 triples (tol 1e-10)"),
    )
}

fn c9_evolution() -> Verdict {
    let geo = Arc::new(make_flat::<f64>(2, 1.0).unwrap());
    let mut disp = 0.0f64;
    let mut cob = 0.0f64;
    for (m, v) in [(1.0, "q1^2/2 + q2^2/2"), (2.5, "q1^4 - 3*q1*q2^2"), (0.7, "q1^3*q2 + 2*q2 - q1^2*q2^2/5")] {
        let sys = HamiltonianSystem::canonical(geo.clone(), m, v).unwrap();
        let vx = sys.potential.clone().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for pg in pts(&geo, 20, 10) {
            let h = sys.h_at(&pg.point).unwrap();
            let a = random_polynomial(&pg, &mut rng);
            let lhs = evolution_defect(&pg, &a, &h);
            let rhs = canonical_defect_display(&a, &vx.eval_jet(&pg.point).unwrap(), m);
            disp = disp.max(lhs.max_diff(&rhs));
            for k in 0..4 {
                cob = cob.max(evolve_oneform(&pg, &Tensor::basis(4, k), &h).max_abs());
            }
        }
    }
    verdict(
        disp <= 1e-12 && cob == 0.0,
        format!("defect vs display {disp:.1e} (tol 1e-12); cobasis drift {cob:e} (exact)"),
    )
}

#[derive(Clone, Debug)]
enum Node {
    C(f64),
    X(usize),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    /// `a / (c + b²)`
    Div(Box<Node>, Box<Node>, f64),
    Pow(Box<Node>, i32),
    Neg(Box<Node>),
}

impl Node {
    fn random(r: &mut ChaCha8Rng, depth: u32) -> Node {
        if depth == 0 || r.gen_bool(0.2) {
            return if r.gen_bool(0.5) {
                Node::C((r.gen_range(-20..=20) as f64) / 8.0)
            } else {
                Node::X(r.gen_range(0..3))
            };
        }
        let op = r.gen_range(0..7);
        let a = Box::new(Node::random(r, depth - 1));
        let b = Box::new(Node::random(r, depth - 1));
        match op {
            0 => Node::Add(a, b),
            1 => Node::Sub(a, b),
            2 | 3 => Node::Mul(a, b),
            4 => Node::Div(a, b, r.gen_range(0.5..2.0)),
            5 => Node::Pow(a, r.gen_range(0..=3)),
            _ => Node::Neg(a),
        }
    }

    fn text(&self) -> String {
        match self {
            Node::C(c) => format!("{c:?}"),
            Node::X(k) => format!("x{}", k + 1),
            Node::Add(a, b) => format!("({} + {})", a.text(), b.text()),
            Node::Sub(a, b) => format!("({} - {})", a.text(), b.text()),
            Node::Mul(a, b) => format!("{} * {}", a.text(), b.text()),
            Node::Div(a, b, c) => format!("({}) / ({c:?} + ({})^2)", a.text(), b.text()),
            Node::Pow(a, k) => format!("({})^{k}", a.text()),
            Node::Neg(a) => format!("-({})", a.text()),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Node::C(c) => *c,
            Node::X(k) => x[*k],
            Node::Add(a, b) => a.eval(x) + b.eval(x),
            Node::Sub(a, b) => a.eval(x) - b.eval(x),
            Node::Mul(a, b) => a.eval(x) * b.eval(x),
            Node::Div(a, b, c) => a.eval(x) / (c + b.eval(x).powi(2)),
            Node::Pow(a, k) => a.eval(x).powi(*k),
            Node::Neg(a) => -a.eval(x),
        }
    }
}

fn c10_parser() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut ev, mut fd1, mut fd2) = (0.0f64, 0.0f64, 0.0f64);
    let mut count = 0;
    while count < 100 {
        let node = Node::random(&mut rng, 4);
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let direct = node.eval(&x);
        if !direct.is_finite() || direct.abs() > 1e3 {
            continue;
        }
        count += 1;
        let expr = match parse(&node.text(), 3) {
            Ok(e) => e,
            Err(e) => return verdict(false, format!("parse failed on `{}`: {e}", node.text())),
        };
        let j = expr.eval_jet(&x).unwrap();
        ev = ev.max((j.value() - Complex::new(direct, 0.0)).norm());
        for k in 0..3 {
            let at = |h: f64| {
                let mut y = x.clone();
                y[k] += h;
                node.eval(&y)
            };
            let h = 1e-5;
            let d1 = (at(h) - at(-h)) / (2.0 * h);
            fd1 = fd1.max((j.d1(k).re - d1).abs());
            let h = 1e-3;
            let d2 = (-at(2.0 * h) + 16.0 * at(h) - 30.0 * at(0.0) + 16.0 * at(-h) - at(-2.0 * h))
                / (12.0 * h * h);
            fd2 = fd2.max((j.d2(k, k).re - d2).abs());
        }
    }
    verdict(
        ev <= 1e-12 && fd1 <= 1e-7 && fd2 <= 1e-7,
        format!("value {ev:.1e} (tol 1e-12); d1 {fd1:.1e}, d2 {fd2:.1e} vs finite differences (tol 1e-7)"),
    )
}

fn c11_determinism() -> Verdict {
    let runs = |seed: u64| -> Vec<String> {
        [("dga", make_cpn(1).unwrap()), ("metric", make_cpn(2).unwrap()), ("evolution", make_flat(2, 1.0).unwrap())]
            .iter()
            .map(|(s, g)| emit_report(&run_suite(s, g, 12, seed, 1e-9).unwrap(), Format::Json))
            .collect()
    };
    let (a, b) = (runs(77), runs(77));
    let differ = runs(78) != a;
    verdict(
        a == b && differ,
        format!("3 suites re-run byte-identical: {}; different seed changes output: {differ}", a == b),
    )
}

fn main() {
    let start = Instant::now();
    let criteria: Vec<(u32, &str, fn() -> Verdict)> = vec![
        (1, "flat phase space exactness", c1_flat_exactness),
        (2, "CP^n classical concordance", c2_concordance),
        (3, "classical compatibility", c3_compat),
        (4, "generalized Ricci", c4_ricci),
        (5, "quantum metric", c5_quantum_metric),
        (6, "quantum Levi-Civita condition", c6_qlc),
        (7, "CP^n complex-coordinate catalogue", c7_catalogue),
        (8, "DGA properties", c8_dga),
        (9, "evolution identities", c9_evolution),
        (10, "parser fidelity", c10_parser),
        (11, "determinism", c11_determinism),
    ];
    let mut failed = Vec::new();
    for (k, name, f) in criteria {
        let t = Instant::now();
        let v = f();
        println!(
            "{} criterion {k:>2} {name}: {} [{:.1}s]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t.elapsed().as_secs_f64()
        );
        if !v.pass {
            failed.push(k);
        }
    }
    let total = start.elapsed().as_secs_f64();
    println!("total {total:.1}s (budget 60s)");
    let mut ok = true;
    if failed != KNOWN_BLOCKED {
        println!("failing set {failed:?} differs from the recorded blocked set {KNOWN_BLOCKED:?}");
        ok = false;
    } else {
        println!("failing criteria {failed:?} match the recorded blocked set");
    }
    if total > 60.0 {
        println!("over the time budget");
        ok = false;
    }
    if !ok {
        std::process::exit(1);
    }
}
