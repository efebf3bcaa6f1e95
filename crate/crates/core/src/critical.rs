//! Critical-locus equations of a superpotential restricted to a hypersurface
//! or complete intersection, and a multistart Gauss-Newton solver for them.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::expr::{parse_expr, Const, ExpPoly, VarNames};

/// Iteration bound used by [`find_critical_points`].
pub const MULTISTART_MAX_ITER: usize = 60;

/// Newton iterates leaving this max-norm ball are declared divergent.
pub const DIVERGENCE_RADIUS: f64 = 1e3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriticalError {
    #[error("need at least 2 ambient variables, got {0}")]
    TooFewVariables(usize),
    #[error("expression uses variable index {index} but the system has {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("tangent generator has {found} components, expected {expected}")]
    FieldLength { expected: usize, found: usize },
    #[error("seed has {found} coordinates, system has {expected} variables")]
    SeedLength { expected: usize, found: usize },
}

fn check_vars(e: &ExpPoly, nvars: usize) -> Result<(), CriticalError> {
    match e.max_var() {
        Some(index) if index >= nvars => Err(CriticalError::VariableOutOfRange { index, nvars }),
        _ => Ok(()),
    }
}

/// A vector field `v_ij = (∂_j f) e_i − (∂_i f) e_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentField {
    pub i: usize,
    pub j: usize,
    pub components: Vec<ExpPoly>,
}

/// The `N(N−1)/2` generators `v_ij`, `i < j`, of the tangent sheaf of `f = 0`.
pub fn tangent_generators_hypersurface(f: &ExpPoly, nvars: usize) -> Result<Vec<TangentField>, CriticalError> {
    if nvars < 2 {
        return Err(CriticalError::TooFewVariables(nvars));
    }
    check_vars(f, nvars)?;
    let grad: Vec<ExpPoly> = (0..nvars).map(|k| f.derivative(k)).collect();
    let mut out = Vec::new();
    for i in 0..nvars {
        for j in i + 1..nvars {
            let mut components = vec![ExpPoly::zero(); nvars];
            components[i] = grad[j].clone();
            components[j] = ExpPoly::neg(grad[i].clone());
            out.push(TangentField { i, j, components });
        }
    }
    Ok(out)
}

/// `Σ_k v^k ∂_k g`, simplified.
pub fn directional_derivative(field: &[ExpPoly], g: &ExpPoly) -> ExpPoly {
    let terms = field
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(k, v)| ExpPoly::Product(vec![v.clone(), g.derivative(k)]))
        .collect();
    ExpPoly::Sum(terms).simplify()
}

/// Square or overdetermined system of entire functions together with its
/// symbolic Jacobian.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPolySystem {
    nvars: usize,
    equations: Vec<ExpPoly>,
    jacobian: Vec<Vec<ExpPoly>>,
}

impl ExpPolySystem {
    pub fn new(nvars: usize, equations: Vec<ExpPoly>) -> Result<Self, CriticalError> {
        for e in &equations {
            check_vars(e, nvars)?;
        }
        let jacobian = equations
            .iter()
            .map(|e| (0..nvars).map(|k| e.derivative(k)).collect())
            .collect();
        Ok(ExpPolySystem { nvars, equations, jacobian })
    }

    /// Parses equations sharing one variable list inferred from their text.
    pub fn parse(texts: &[&str], names: Option<&VarNames>) -> Result<(Self, VarNames), crate::expr::ParseError> {
        let names = names.cloned().unwrap_or_else(|| VarNames::infer(texts.iter().copied()));
        let eqs = texts.iter().map(|t| parse_expr(t, &names)).collect::<Result<Vec<_>, _>>()?;
        let sys = ExpPolySystem::new(names.len(), eqs).expect("parser only produces known variables");
        Ok((sys, names))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn equations(&self) -> &[ExpPoly] {
        &self.equations
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn eval(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.equations.iter().map(|e| e.eval(x)).collect()
    }

    pub fn residual(&self, x: &[Complex64]) -> f64 {
        self.eval(x).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn jacobian_at(&self, x: &[Complex64]) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.equations.len(), self.nvars, |r, c| self.jacobian[r][c].eval(x))
    }

    /// The same system with equations reordered by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        ExpPolySystem {
            nvars: self.nvars,
            equations: perm.iter().map(|&i| self.equations[i].clone()).collect(),
            jacobian: perm.iter().map(|&i| self.jacobian[i].clone()).collect(),
        }
    }
}

/// Critical-locus equations together with a flag for systems whose
/// tangential rows vanish identically.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalSystem {
    pub system: ExpPolySystem,
    pub degenerate: bool,
}

fn assemble(nvars: usize, constraints: Vec<ExpPoly>, rows: Vec<ExpPoly>) -> Result<CriticalSystem, CriticalError> {
    let degenerate = rows.iter().all(ExpPoly::is_identically_zero);
    let mut eqs = constraints;
    eqs.extend(rows);
    Ok(CriticalSystem { system: ExpPolySystem::new(nvars, eqs)?, degenerate })
}

/// `f = 0` together with `∂_i W ∂_j f − ∂_j W ∂_i f = 0` for `i < j`.
pub fn critical_system(f: &ExpPoly, w: &ExpPoly, nvars: usize) -> Result<CriticalSystem, CriticalError> {
    check_vars(w, nvars)?;
    let fields = tangent_generators_hypersurface(f, nvars)?;
    let rows = fields
        .iter()
        .map(|v| directional_derivative(&v.components, w))
        .collect();
    assemble(nvars, vec![f.clone()], rows)
}

/// `f_1 = … = f_m = 0` together with `∂_v W = 0` for each supplied tangent
/// generator `v`.
pub fn critical_system_ci(
    equations: &[ExpPoly],
    fields: &[Vec<ExpPoly>],
    w: &ExpPoly,
    nvars: usize,
) -> Result<CriticalSystem, CriticalError> {
    check_vars(w, nvars)?;
    for v in fields {
        if v.len() != nvars {
            return Err(CriticalError::FieldLength { expected: nvars, found: v.len() });
        }
    }
    let rows = fields.iter().map(|v| directional_derivative(v, w)).collect();
    assemble(nvars, equations.to_vec(), rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub coordinates: Vec<Complex64>,
    pub residual: f64,
    /// Heuristic from the observed convergence rate: 1 for quadratic
    /// convergence, `round(1/(1−ρ))` for linear rate `ρ`.
    pub multiplicity_hint: u32,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceReason {
    SingularJacobian,
    MaxIterations,
    NonFinite,
    Escaped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Divergence {
    pub reason: DivergenceReason,
    pub iterations: usize,
    pub residual: f64,
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// One Gauss-Newton step `J^H J δ = −J^H F` at `x`.
fn step(sys: &ExpPolySystem, x: &[Complex64], fx: &[Complex64]) -> Option<Vec<Complex64>> {
    let j = sys.jacobian_at(x);
    let jh = j.adjoint();
    let lhs = &jh * &j;
    let rhs = -(&jh * DVector::from_column_slice(fx));
    let delta = lhs.lu().solve(&rhs)?;
    delta.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then(|| delta.iter().copied().collect())
}

fn multiplicity_hint(steps: &[f64]) -> u32 {
    let useful: Vec<f64> = steps.iter().copied().filter(|s| *s > 1e-13).collect();
    if useful.len() < 3 {
        return 1;
    }
    let n = useful.len();
    let r1 = useful[n - 1] / useful[n - 2];
    let r2 = useful[n - 2] / useful[n - 3];
    if r1 > 0.2 && r2 > 0.2 && r1 < 1.0 {
        ((1.0 / (1.0 - r1)).round() as u32).max(2)
    } else {
        1
    }
}

/// Gauss-Newton with the holomorphic Jacobian. On success the residual
/// max-norm is below `tol`; a few extra polishing steps are taken while they
/// keep reducing the residual.
pub fn newton_solve(
    sys: &ExpPolySystem,
    seed: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<Result<CriticalPoint, Divergence>, CriticalError> {
    if seed.len() != sys.nvars() {
        return Err(CriticalError::SeedLength { expected: sys.nvars(), found: seed.len() });
    }
    Ok(newton_core(sys, seed, tol, max_iter))
}

fn newton_core(sys: &ExpPolySystem, seed: &[Complex64], tol: f64, max_iter: usize) -> Result<CriticalPoint, Divergence> {
    let mut x = seed.to_vec();
    let mut steps = Vec::new();
    let mut fx = sys.eval(&x);
    let mut res = max_norm(&fx);
    let fail = |reason, iterations, residual| Err(Divergence { reason, iterations, residual });
    for it in 0..=max_iter {
        if !res.is_finite() {
            return fail(DivergenceReason::NonFinite, it, res);
        }
        if res < tol {
            for _ in 0..3 {
                let Some(d) = step(sys, &x, &fx) else { break };
                let cand: Vec<Complex64> = x.iter().zip(&d).map(|(a, b)| a + b).collect();
                let cf = sys.eval(&cand);
                let cr = max_norm(&cf);
                if !(cr < res) {
                    break;
                }
                (x, fx, res) = (cand, cf, cr);
            }
            return Ok(CriticalPoint {
                coordinates: x,
                residual: res,
                multiplicity_hint: multiplicity_hint(&steps),
                iterations: it,
            });
        }
        if it == max_iter {
            break;
        }
        let Some(d) = step(sys, &x, &fx) else {
            return fail(DivergenceReason::SingularJacobian, it, res);
        };
        steps.push(max_norm(&d));
        for (a, b) in x.iter_mut().zip(&d) {
            *a += b;
        }
        if max_norm(&x) > DIVERGENCE_RADIUS {
            return fail(DivergenceReason::Escaped, it + 1, res);
        }
        fx = sys.eval(&x);
        res = max_norm(&fx);
    }
    fail(DivergenceReason::MaxIterations, max_iter, res)
}

/// Rectangle `re × im` applied to every coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub re: [f64; 2],
    pub im: [f64; 2],
}

impl SearchBox {
    pub fn real(lo: f64, hi: f64) -> Self {
        SearchBox { re: [lo, hi], im: [0.0, 0.0] }
    }

    pub fn square(r: f64) -> Self {
        SearchBox { re: [-r, r], im: [-r, r] }
    }

    /// Membership with an absolute margin on every side.
    pub fn contains(&self, x: &[Complex64], margin: f64) -> bool {
        x.iter().all(|z| {
            self.re[0] - margin <= z.re
                && z.re <= self.re[1] + margin
                && self.im[0] - margin <= z.im
                && z.im <= self.im[1] + margin
        })
    }

    pub fn contains_origin(&self) -> bool {
        self.re[0] <= 0.0 && 0.0 <= self.re[1] && self.im[0] <= 0.0 && 0.0 <= self.im[1]
    }

    fn axis(range: [f64; 2], grid: usize) -> Vec<f64> {
        if range[0] == range[1] || grid <= 1 {
            return vec![(range[0] + range[1]) / 2.0];
        }
        (0..grid)
            .map(|k| range[0] + (range[1] - range[0]) * k as f64 / (grid - 1) as f64)
            .collect()
    }

    /// Grid of `grid` points per real axis on each coordinate.
    pub fn seeds(&self, nvars: usize, grid: usize) -> Vec<Vec<Complex64>> {
        let re = Self::axis(self.re, grid);
        let im = Self::axis(self.im, grid);
        let values: Vec<Complex64> =
            re.iter().flat_map(|&a| im.iter().map(move |&b| Complex64::new(a, b))).collect();
        let mut out: Vec<Vec<Complex64>> = vec![Vec::new()];
        for _ in 0..nvars {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out
    }
}

/// Lexicographic order on `(re, im)` of successive coordinates.
pub fn lex_cmp(a: &[Complex64], b: &[Complex64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Newton from every grid seed (plus the origin when it lies in the box).
/// Solutions inside the box are deduplicated at max-norm distance `10·tol`
/// and sorted lexicographically.
pub fn find_critical_points(sys: &ExpPolySystem, bx: &SearchBox, grid: usize, tol: f64) -> Vec<CriticalPoint> {
    let mut seeds = Vec::new();
    if bx.contains_origin() {
        seeds.push(vec![Complex64::new(0.0, 0.0); sys.nvars()]);
    }
    seeds.extend(bx.seeds(sys.nvars(), grid.max(1)));
    let found: Vec<CriticalPoint> = seeds
        .par_iter()
        .filter_map(|s| newton_core(sys, s, tol, MULTISTART_MAX_ITER).ok())
        .collect();
    let radius = 10.0 * tol;
    let found = found.into_iter().filter(|p| bx.contains(&p.coordinates, radius.max(1e-9)));
    let mut kept: Vec<CriticalPoint> = Vec::new();
    for p in found {
        let dup = kept.iter().any(|q| {
            p.coordinates.iter().zip(&q.coordinates).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) < radius
        });
        if !dup {
            kept.push(p);
        }
    }
    kept.sort_by(|a, b| lex_cmp(&a.coordinates, &b.coordinates));
    kept
}

/// The system `f = 0`, `∂_{v_ij} W = 0` for `f = x1 e^{x2} + x2 e^{x3} + x3 e^{x1}`
/// and `W = x1^{n+1} + x2 x3` on `ℂ³`.
pub fn exponential_surface_system(n: u32) -> CriticalSystem {
    let names = VarNames::indexed(3);
    let f = parse_expr("x1*exp(x2) + x2*exp(x3) + x3*exp(x1)", &names).expect("valid expression");
    let w = parse_expr(&format!("x1^{} + x2*x3", n + 1), &names).expect("valid expression");
    critical_system(&f, &w, 3).expect("three variables")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(s: &str, n: usize) -> ExpPoly {
        parse_expr(s, &VarNames::indexed(n)).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_point(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<Complex64> {
        (0..n).map(|_| c(rng.gen_range(-r..r), rng.gen_range(-r..r))).collect()
    }

    fn same(a: &ExpPoly, b: &ExpPoly) -> bool {
        ExpPoly::sub(a.clone(), b.clone()).is_identically_zero()
    }

    #[test]
    fn derivative_examples() {
        assert!(same(&e("x1*exp(x2)", 2).derivative(0), &e("exp(x2)", 2)));
        assert!(same(&e("x1*exp(x2)", 2).derivative(1), &e("x1*exp(x2)", 2)));
        assert!(same(&e("exp(x1^2)", 1).derivative(0), &e("2*x1*exp(x1^2)", 1)));
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = 1e-6;
        for text in ["x1*exp(x2) + x2*exp(x3) + x3*exp(x1)", "exp(x1*x2 - x3^2)*x2^3", "x1^4 + i*x2*x3 - exp(2*x3)"] {
            let f = e(text, 3);
            for _ in 0..20 {
                let x = random_point(&mut rng, 3, 1.0);
                for k in 0..3 {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[k] += h;
                    xm[k] -= h;
                    let fd = (f.eval(&xp) - f.eval(&xm)) / (2.0 * h);
                    let exact = f.derivative(k).eval(&x);
                    assert!((fd - exact).norm() <= 1e-6 * exact.norm().max(1.0), "{text} d{k}");
                }
            }
        }
    }

    #[test]
    fn tangent_generators_examples() {
        let v = tangent_generators_hypersurface(&e("x1*x2 - 1", 2), 2).unwrap();
        assert_eq!(v.len(), 1);
        assert!(same(&v[0].components[0], &e("x1", 2)));
        assert!(same(&v[0].components[1], &e("-x2", 2)));

        let f = e("x1*exp(x2) + x2*exp(x3) + x3*exp(x1)", 3);
        let v = tangent_generators_hypersurface(&f, 3).unwrap();
        assert_eq!(v.len(), 3);
        let v23 = v.iter().find(|t| (t.i, t.j) == (1, 2)).unwrap();
        assert!(v23.components[0].is_zero());
        assert!(same(&v23.components[1], &e("exp(x1) + x2*exp(x3)", 3)));
        assert!(same(&v23.components[2], &e("-exp(x3) - x1*exp(x2)", 3)));
        for t in &v {
            assert!(directional_derivative(&t.components, &f).is_identically_zero());
        }
        assert_eq!(tangent_generators_hypersurface(&f, 1).unwrap_err(), CriticalError::TooFewVariables(1));
    }

    #[test]
    fn tangency_on_random_points_of_zero_set() {
        let f = e("x1*exp(x2) + x2*exp(x3) + x3*exp(x1)", 3);
        let fields = tangent_generators_hypersurface(&f, 3).unwrap();
        let sys = ExpPolySystem::new(3, vec![f.clone()]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut hits = 0;
        while hits < 10 {
            let seed = random_point(&mut rng, 3, 1.0);
            let Ok(Ok(p)) = newton_solve(&sys, &seed, 1e-12, 50) else { continue };
            hits += 1;
            for v in &fields {
                let comps: Vec<Complex64> = v.components.iter().map(|c| c.eval(&p.coordinates)).collect();
                let grad: Vec<Complex64> = (0..3).map(|k| f.derivative(k).eval(&p.coordinates)).collect();
                let dot: Complex64 = comps.iter().zip(&grad).map(|(a, b)| a * b).sum();
                assert!(dot.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn torus_system() {
        let f = e("x1*x2*x3 - 1", 3);
        let w = e("x1 + x2 + x3", 3);
        let cs = critical_system(&f, &w, 3).unwrap();
        assert!(!cs.degenerate);
        let expected = ["x1*x2*x3 - 1", "x1*x3 - x2*x3", "x1*x2 - x2*x3", "x1*x2 - x1*x3"];
        assert_eq!(cs.system.len(), 4);
        for (got, want) in cs.system.equations().iter().zip(expected) {
            assert!(same(got, &e(want, 3)), "{got} vs {want}");
        }
        let real = find_critical_points(&cs.system, &SearchBox::real(-2.0, 2.0), 5, 1e-10);
        assert_eq!(real.len(), 1);
        assert!(real[0].coordinates.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-9));
        let all = find_critical_points(&cs.system, &SearchBox::square(1.5), 3, 1e-10);
        assert_eq!(all.len(), 3);
        for p in &all {
            let z = p.coordinates[0];
            assert!((z.powu(3) - c(1.0, 0.0)).norm() < 1e-9);
            assert!(p.coordinates.iter().all(|w| (w - z).norm() < 1e-9));
        }
    }

    #[test]
    fn exponential_surface_matches_reduced_system() {
        for n in 1..=3u32 {
            let cs = exponential_surface_system(n);
            let k = (n + 1) as i64;
            let reduced = [
                "x1*exp(x2) + x2*exp(x3) + x3*exp(x1)".to_string(),
                format!("{k}*x1^{n}*(exp(x1) + x2*exp(x3)) - x2*(exp(x2) + x3*exp(x1))"),
                "x3*(exp(x1) + x2*exp(x3)) - x2*(exp(x3) + x1*exp(x2))".to_string(),
                format!("{k}*x1^{n}*(exp(x3) + x1*exp(x2)) - x3*(exp(x2) + x3*exp(x1))"),
            ];
            let eqs = cs.system.equations();
            assert!(same(&eqs[0], &e(&reduced[0], 3)));
            // rows for (i,j) = (1,2), (1,3), (2,3)
            let pairs = [(1, 3), (2, 1), (3, 2)];
            for (row, red) in pairs {
                let r = e(&reduced[red], 3);
                assert!(same(&eqs[row], &r), "n={n} row {row}");
            }
        }
    }

    #[test]
    fn constant_potential_is_degenerate() {
        let cs = critical_system(&e("x1*x2 - 1", 2), &e("5", 2), 2).unwrap();
        assert!(cs.degenerate);
        assert_eq!(cs.system.len(), 2);
        assert!(cs.system.equations()[1].is_zero());
    }

    #[test]
    fn complete_intersection_matches_hypersurface() {
        let f = e("x1*x2*x3 - 1", 3);
        let w = e("x1 + x2 + x3", 3);
        let fields: Vec<Vec<ExpPoly>> =
            tangent_generators_hypersurface(&f, 3).unwrap().into_iter().map(|t| t.components).collect();
        let ci = critical_system_ci(std::slice::from_ref(&f), &fields, &w, 3).unwrap();
        let hyp = critical_system(&f, &w, 3).unwrap();
        for (a, b) in ci.system.equations().iter().zip(hyp.system.equations()) {
            assert!(same(a, b) || same(a, &ExpPoly::neg(b.clone())));
        }
        assert!(matches!(
            critical_system_ci(&[f], &[vec![w.clone()]], &w, 3),
            Err(CriticalError::FieldLength { .. })
        ));
        assert!(matches!(critical_system(&e("x1", 1), &w, 2), Err(CriticalError::VariableOutOfRange { .. })));
    }

    #[test]
    fn scalar_newton() {
        let sys = ExpPolySystem::new(1, vec![e("x1^2 - 1", 1)]).unwrap();
        let p = newton_solve(&sys, &[c(0.9, 0.0)], 1e-12, 50).unwrap().unwrap();
        assert!((p.coordinates[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(p.multiplicity_hint, 1);
        let d = newton_solve(&sys, &[c(0.0, 0.0)], 1e-12, 50).unwrap().unwrap_err();
        assert_eq!(d.reason, DivergenceReason::SingularJacobian);
        let d = newton_solve(&sys, &[c(0.3, 0.2)], 1e-12, 1).unwrap().unwrap_err();
        assert_eq!(d.reason, DivergenceReason::MaxIterations);
        assert!(newton_solve(&sys, &[], 1e-12, 5).is_err());
    }

    #[test]
    fn double_root_hint() {
        let sys = ExpPolySystem::new(1, vec![e("(x1 - 1)^2", 1)]).unwrap();
        let p = newton_solve(&sys, &[c(2.0, 0.0)], 1e-12, 100).unwrap().unwrap();
        assert_eq!(p.multiplicity_hint, 2);
    }

    #[test]
    fn cubic_multistart() {
        let sys = ExpPolySystem::new(1, vec![e("x1^3 - x1", 1)]).unwrap();
        let pts = find_critical_points(&sys, &SearchBox::real(-2.0, 2.0), 9, 1e-10);
        let xs: Vec<f64> = pts.iter().map(|p| p.coordinates[0].re).collect();
        assert_eq!(xs.len(), 3);
        for (x, want) in xs.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((x - want).abs() < 1e-10);
        }
        for p in &pts {
            assert!(sys.residual(&p.coordinates) < 1e-10);
        }
    }

    #[test]
    fn permutation_invariance() {
        let cs = exponential_surface_system(1);
        let bx = SearchBox::square(1.0);
        let a = find_critical_points(&cs.system, &bx, 2, 1e-10);
        let b = find_critical_points(&cs.system.permuted(&[3, 1, 0, 2]), &bx, 2, 1e-10);
        assert!(!a.is_empty());
        let close = |p: &CriticalPoint, q: &CriticalPoint| {
            p.coordinates.iter().zip(&q.coordinates).all(|(x, y)| (x - y).norm() < 1e-8)
        };
        assert!(a.iter().all(|p| b.iter().any(|q| close(p, q))));
        assert!(b.iter().all(|p| a.iter().any(|q| close(p, q))));
    }

    #[test]
    fn table_seeds_converge() {
        let cases = [
            (1, [c(0.5, 0.0), c(-0.5, 0.0), c(2.0, 0.0)], [0.512, -0.505, 1.957]),
            (2, [c(-0.4, 0.0), c(-0.1, 0.0), c(2.3, 0.0)], [-0.435, -0.109, 2.314]),
        ];
        for (n, seed, want) in cases {
            let sys = exponential_surface_system(n).system;
            let p = newton_solve(&sys, &seed, 1e-10, 50).unwrap().unwrap();
            for (z, w) in p.coordinates.iter().zip(want) {
                assert!((z.re - w).abs() < 1e-3 && z.im.abs() < 1e-9);
            }
        }
    }
}
