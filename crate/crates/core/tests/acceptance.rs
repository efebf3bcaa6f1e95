//! Acceptance suite: one PASS/FAIL line per criterion with pinned tolerances
//! and time budgets. Every criterion runs even when an earlier one fails; the
//! test fails at the end if any criterion failed.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lg_core::arrangement::{self, Arrangement};
use lg_core::critical::{self, find_critical_points, SearchBox};
use lg_core::expr::VarNames;
use lg_core::factorization::{self, MatrixFactorization};
use lg_core::koszul::koszul_cohomology_dims;
use lg_core::poly::{jacobi_quotient, FrameSpec, Poly};
use lg_core::theta::{self, ThetaSeriesParams};

const TABLE_TOL: f64 = 1e-3;
const ORIGIN_TOL: f64 = 1e-8;
const CRITICAL_NEWTON_TOL: f64 = 1e-10;
const CRITICAL_GRID: usize = 5;
const CRITICAL_BOX: f64 = 3.0;
const QUASI_TOL: f64 = 1e-10;
const ZERO_TOL: f64 = 1e-12;
const W_TILDE_TOL: f64 = 1e-8;
const CHART_TOL: f64 = 1e-8;
const JACOBI_CAP: usize = 64;

struct Outcome {
    passed: bool,
    detail: String,
}

fn check(id: u32, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = budget.is_none_or(|b| elapsed < b);
    let passed = out.passed && in_time;
    let budget_note = budget.map_or(String::new(), |b| format!(" budget {:.0?}", b));
    println!(
        "{} criterion {id}: {} [{:.3?}{budget_note}{}]",
        if passed { "PASS" } else { "FAIL" },
        out.detail,
        elapsed,
        if in_time { "" } else { ", over budget" }
    );
    passed
}

fn p(s: &str, n: usize) -> Poly {
    Poly::parse(s, &VarNames::indexed(n)).unwrap()
}

fn binomials(d: u64) -> Vec<u64> {
    (0..=d).map(|k| (0..k).fold(1, |acc, i| acc * (d - i) / (i + 1))).collect()
}

fn c1() -> Outcome {
    let arr = Arrangement::coordinate_and_braid(3);
    let got = arrangement::poincare_polynomial(&arr);
    Outcome { passed: got == vec![1, 6, 11, 6], detail: format!("P(t) coefficients {got:?}, expected [1, 6, 11, 6]") }
}

fn c2() -> Outcome {
    let mut bad = Vec::new();
    for d in 1..=6usize {
        let arr = Arrangement::boolean(d);
        let poincare = arrangement::poincare_polynomial(&arr);
        let h2 = arrangement::h2_rank(&arr).rank;
        if poincare != binomials(d as u64) || h2 != (d * (d - 1) / 2) as u64 {
            bad.push(format!("d={d}: P={poincare:?} h2={h2}"));
        }
    }
    Outcome {
        passed: bad.is_empty(),
        detail: if bad.is_empty() { "Boolean d=1..6: P = (1+t)^d, h2 = d(d-1)/2".into() } else { bad.join("; ") },
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn r(re: f64) -> Complex64 {
    c(re, 0.0)
}

fn table_points(n: u32) -> Vec<[Complex64; 3]> {
    match n {
        1 => vec![
            [r(0.512), r(-0.505), r(1.957)],
            [r(2.048), r(-2.114), r(2.017)],
            [c(0.450, 0.985), c(-0.241, -0.613), c(-0.848, 0.747)],
        ],
        2 => vec![
            [r(-0.435), r(-0.109), r(2.314)],
            [r(-0.385), r(0.315), r(0.207)],
            [r(0.604), r(-0.553), r(1.960)],
            [c(-0.338, -0.599), c(0.056, 0.370), c(0.050, 0.678)],
        ],
        3 => vec![[r(0.658), r(-0.583), r(1.963)], [c(0.112, -0.298), c(-0.075, 0.122), c(-0.089, 0.121)]],
        _ => unreachable!(),
    }
}

/// Largest deviation over the real and imaginary parts of all coordinates.
fn componentwise(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.re - y.re).abs().max((x.im - y.im).abs())).fold(0.0, f64::max)
}

fn c3() -> Outcome {
    let budget = Duration::from_secs(30);
    let mut passed = true;
    let mut lines = Vec::new();
    for n in 1..=3 {
        let start = Instant::now();
        let out = c3_single(n);
        let elapsed = start.elapsed();
        passed &= out.passed && elapsed < budget;
        lines.push(format!("{} ({elapsed:.1?}, budget 30s)", out.detail));
    }
    Outcome { passed, detail: lines.join(" | ") }
}

fn c3_single(n: u32) -> Outcome {
    let sys = critical::exponential_surface_system(n);
    let found = find_critical_points(&sys.system, &SearchBox::square(CRITICAL_BOX), CRITICAL_GRID, CRITICAL_NEWTON_TOL);
    let mut notes = Vec::new();
    let mut passed = true;
    for t in table_points(n) {
        let best = found.iter().map(|q| componentwise(&q.coordinates, &t)).fold(f64::INFINITY, f64::min);
        if best > TABLE_TOL {
            passed = false;
            notes.push(format!("missing {:?} (nearest {best:.3e})", t.map(|z| (z.re, z.im))));
        }
    }
    let origin = found.iter().any(|q| q.coordinates.iter().all(|z| z.norm() < ORIGIN_TOL));
    if !origin {
        passed = false;
        notes.push("origin not found".into());
    }
    Outcome {
        passed,
        detail: format!(
            "n={n}: {} solutions in box, {} table points{}",
            found.len(),
            table_points(n).len(),
            if notes.is_empty() { ", all within 1e-3, origin found".to_string() } else { format!("; {}", notes.join("; ")) }
        ),
    }
}

fn c4() -> Outcome {
    let mut bad = Vec::new();
    let mut count = 0;
    for n in 1..=5u32 {
        for k in 0..=n + 1 {
            let mf = factorization::quiver_factorization(n, k).unwrap();
            let rep = factorization::verify_factorization(&mf).unwrap();
            count += 1;
            if !(rep.verdict && rep.ab_residual.is_zero() && rep.ba_residual.is_zero()) {
                bad.push(format!("(n={n},k={k})"));
            }
        }
    }
    Outcome {
        passed: bad.is_empty(),
        detail: if bad.is_empty() { format!("{count} quiver factorizations with zero residual") } else { bad.join(" ") },
    }
}

fn jac_dim(w: &Poly, frame: &FrameSpec) -> Option<usize> {
    jacobi_quotient(w, frame, JACOBI_CAP).ok()?.1.dimension()
}

fn c5() -> Outcome {
    let mut bad = Vec::new();
    for n in 1..=8usize {
        let d = jac_dim(&p(&format!("x1^{}", n + 1), 1), &FrameSpec::Affine);
        if d != Some(n) {
            bad.push(format!("z^{}: {d:?}", n + 1));
        }
    }
    for n in 1..=5usize {
        let d = jac_dim(&p(&format!("x1^{} + x2*x3", n + 1), 3), &FrameSpec::Affine);
        if d != Some(n) {
            bad.push(format!("x1^{}+x2x3: {d:?}", n + 1));
        }
    }
    let f = p("x1*x2*x3 - 1", 3);
    let torus = jac_dim(&p("x1 + x2 + x3", 3), &FrameSpec::Hypersurface(f));
    let names = VarNames::indexed(3);
    let fe = critical::parse_expr("x1*x2*x3 - 1", &names).unwrap();
    let we = critical::parse_expr("x1 + x2 + x3", &names).unwrap();
    let sys = critical::critical_system(&fe, &we, 3).unwrap();
    let oracle = find_critical_points(&sys.system, &SearchBox::square(1.5), 3, CRITICAL_NEWTON_TOL).len();
    if torus != Some(3) || oracle != 3 {
        bad.push(format!("torus mirror: Groebner {torus:?}, multistart {oracle}, expected 3"));
    }
    Outcome {
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            "z^(n+1) n=1..8, x1^(n+1)+x2x3 n=1..5, torus mirror = 3 (multistart agrees)".into()
        } else {
            bad.join("; ")
        },
    }
}

fn c6() -> Outcome {
    let suite: [(&str, usize); 8] = [
        ("x1^4", 1),
        ("x1^2 + x2^2", 2),
        ("x1^3 + x2^3", 2),
        ("x1^2*x2 + x2^3", 2),
        ("x1^3 + x2^4", 2),
        ("x1^3 + x2*x3", 3),
        ("x1^2 + x2^2 + x3^2", 3),
        ("x1^3 + x2^3 + x3^3", 3),
    ];
    let mut bad = Vec::new();
    for (text, n) in suite {
        let w = p(text, n);
        let d = w.total_degree().unwrap();
        let caps = [2 * d, 2 * d + 1, 2 * d + 2];
        let rep = koszul_cohomology_dims(&w, &caps).unwrap();
        let jac = jac_dim(&w, &FrameSpec::Affine);
        let ok = match &rep.stable_dims {
            Some(dims) => {
                let (neg, zero) = dims.split_at(dims.len() - 1);
                neg.iter().all(|&x| x == 0) && Some(zero[0]) == jac
            }
            None => false,
        };
        if !ok {
            bad.push(format!("{text}: {:?} vs Jacobi {jac:?}", rep.stable_dims));
        }
    }
    Outcome {
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{} potentials: negative positions 0, position 0 = Jacobi dimension", suite.len())
        } else {
            bad.join("; ")
        },
    }
}

fn c7() -> Outcome {
    let z = |e: u32| p("x1", 1).pow(e);
    let cases = [("W=z^2, a=(z,z)", z(1), z(1)), ("W=z^3, a=(z,z^2)", z(1), z(2))];
    let mut passed = true;
    let mut notes = Vec::new();
    for (label, u, v) in cases {
        let mf: MatrixFactorization = factorization::elementary_factorization(&u, &v).unwrap();
        match factorization::disk_algebra_dims(&mf, &factorization::DEFAULT_CAPS) {
            Ok(rep) => {
                passed &= rep.verdict;
                notes.push(format!("{label}: predicted {} direct {}", rep.predicted, rep.direct));
            }
            Err(e) => {
                passed = false;
                notes.push(format!("{label}: {e}"));
            }
        }
    }
    Outcome { passed, detail: notes.join("; ") }
}

fn c8() -> Outcome {
    let params = ThetaSeriesParams::default();
    let report = theta::theta_check(100, W_TILDE_TOL, 1, &params).unwrap();
    let get = |k: &str| report.identities[k].max_residual;
    let quasi = get("theta_quasi_period_i").max(get("theta_period_1"));
    let zero = get("theta_zero");
    let w_period = get("w_tilde_period_z1").max(get("w_tilde_period_z2"));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pts = theta::random_torus_points(&mut rng, 50, 0.5);
    let chart = theta::verify_theta_factorization(&pts, CHART_TOL, &params).unwrap().max_deviation;
    let passed = quasi < QUASI_TOL && zero < ZERO_TOL && w_period < W_TILDE_TOL && chart < CHART_TOL;
    Outcome {
        passed,
        detail: format!(
            "quasi-periodicity {quasi:.2e} (<1e-10, 100 pts), zero {zero:.2e} (<1e-12), W~ periodicity {w_period:.2e} (<1e-8), chart {chart:.2e} (<1e-8, 50 pts)"
        ),
    }
}

fn c9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut bad = Vec::new();
    for i in 0..25 {
        let d = rng.gen_range(1..=4);
        let arr = arrangement::random_arrangement(&mut rng, d, 6);
        let os = arrangement::os_ranks(&arr);
        let poincare = arrangement::poincare_polynomial(&arr);
        if os != poincare {
            bad.push(format!("#{i}: os {os:?} vs mobius {poincare:?}"));
        }
    }
    Outcome {
        passed: bad.is_empty(),
        detail: if bad.is_empty() { "25 random arrangements (d<=4, <=6 forms): OS ranks = Mobius".into() } else { bad.join("; ") },
    }
}

#[test]
fn acceptance_suite() {
    let second = Some(Duration::from_secs(1));
    let mut results = vec![check(1, second, c1), check(2, second, c2)];
    results.push(check(3, None, c3));
    results.push(check(4, second, c4));
    results.push(check(5, None, c5));
    results.push(check(6, None, c6));
    results.push(check(7, None, c7));
    results.push(check(8, second, c8));
    results.push(check(9, None, c9));
    let failed = results.iter().filter(|&&ok| !ok).count();
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
