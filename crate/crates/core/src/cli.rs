//! Problem files, dispatch and result records shared by the `lg` binary.
//!
//! A problem file is TOML with exactly one top-level table naming the kind:
//!
//! ```toml
//! [jacobi]
//! W = "z^3"
//! ```
//!
//! Results are JSON with a fixed key order and no timing information, so
//! identical problems produce byte-identical output.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::arrangement::{self, Arrangement, ArrangementError};
use crate::critical::{self, CriticalError, SearchBox};
use crate::expr::{parse_expr, ParseError, VarNames};
use crate::factorization::{self, FactorizationError, FactorizationFile, MatrixFactorization};
use crate::koszul::{self, KoszulError};
use crate::linalg::{LinalgError, PolyMatrix};
use crate::poly::{jacobi_quotient, FrameSpec, Poly, PolyError};
use crate::theta::{self, ThetaError, ThetaSeriesParams};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const DEFAULT_DEGREE_CAP: usize = 64;
pub const DEFAULT_GRID: usize = 5;
pub const DEFAULT_CRITICAL_TOL: f64 = 1e-10;
pub const DEFAULT_BOX_RADIUS: f64 = 3.0;
pub const DEFAULT_THETA_SAMPLES: usize = 100;
pub const DEFAULT_THETA_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemSpec {
    Jacobi(JacobiProblem),
    Koszul(KoszulProblem),
    Critical(CriticalProblem),
    MfVerify(MfVerifyProblem),
    MfHom(MfHomProblem),
    MfDisk(MfDiskProblem),
    Arrangement(ArrangementProblem),
    Theta(ThetaProblem),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JacobiProblem {
    #[serde(rename = "W")]
    pub w: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vars: Option<Vec<String>>,
    /// Restrict to the hypersurface `f = 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypersurface: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_cap: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KoszulProblem {
    #[serde(rename = "W")]
    pub w: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vars: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<Vec<u32>>,
}

/// Either `f` and `W` (critical locus of `W` on `f = 0`) or an explicit
/// system `eq`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalProblem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(rename = "W", default, skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eq: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vars: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub re: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MfVerifyProblem {
    pub factorization: FactorizationFile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MfHomProblem {
    pub source: FactorizationFile,
    pub target: FactorizationFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MfDiskProblem {
    pub factorization: FactorizationFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<Vec<u32>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArrangementReport {
    Poincare,
    Mobius,
    Os,
    H2,
}

impl std::str::FromStr for ArrangementReport {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "poincare" => Ok(Self::Poincare),
            "mobius" => Ok(Self::Mobius),
            "os" => Ok(Self::Os),
            "h2" => Ok(Self::H2),
            _ => Err(format!("unknown report '{s}', expected poincare, mobius, os or h2")),
        }
    }
}

/// `forms` uses the arrangement file grammar, one form per entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrangementProblem {
    pub forms: Vec<String>,
    pub report: ArrangementReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaProblem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strip: Option<f64>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Parse(_) | RunError::Invalid(_) => 2,
            RunError::Inconclusive(_) => 3,
            RunError::ResourceLimit(_) => 4,
            RunError::Io(_) => 1,
        }
    }
}

impl From<ParseError> for RunError {
    fn from(e: ParseError) -> Self {
        RunError::Parse(e.to_string())
    }
}

impl From<LinalgError> for RunError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::MatrixTooLarge { .. } => RunError::ResourceLimit(e.to_string()),
            LinalgError::Shape(_) => RunError::Invalid(e.to_string()),
        }
    }
}

impl From<PolyError> for RunError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::PairQueueLimit(_) => RunError::ResourceLimit(e.to_string()),
            PolyError::Inconclusive(_) => RunError::Inconclusive(e.to_string()),
            PolyError::Parse(p) => p.into(),
            _ => RunError::Invalid(e.to_string()),
        }
    }
}

impl From<KoszulError> for RunError {
    fn from(e: KoszulError) -> Self {
        match e {
            KoszulError::Linalg(l) => l.into(),
            _ => RunError::Invalid(e.to_string()),
        }
    }
}

impl From<FactorizationError> for RunError {
    fn from(e: FactorizationError) -> Self {
        match e {
            FactorizationError::Poly(p) => p.into(),
            FactorizationError::Linalg(l) => l.into(),
            FactorizationError::NotStabilized(_) => RunError::Inconclusive(e.to_string()),
            _ => RunError::Invalid(e.to_string()),
        }
    }
}

impl From<CriticalError> for RunError {
    fn from(e: CriticalError) -> Self {
        RunError::Invalid(e.to_string())
    }
}

impl From<ArrangementError> for RunError {
    fn from(e: ArrangementError) -> Self {
        match e {
            ArrangementError::Parse { .. } => RunError::Parse(e.to_string()),
            _ => RunError::Invalid(e.to_string()),
        }
    }
}

impl From<ThetaError> for RunError {
    fn from(e: ThetaError) -> Self {
        RunError::Invalid(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub kind: String,
    pub version: String,
    pub inputs: Value,
    pub outputs: Value,
    pub diagnostics: Value,
}

impl ResultRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records are plain JSON")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Complete,
    /// A record was produced but a stabilization check failed.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub record: ResultRecord,
    pub status: Status,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Complete => 0,
            Status::Inconclusive => 3,
        }
    }
}

impl ProblemSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemSpec::Jacobi(_) => "jacobi",
            ProblemSpec::Koszul(_) => "koszul",
            ProblemSpec::Critical(_) => "critical",
            ProblemSpec::MfVerify(_) => "mf-verify",
            ProblemSpec::MfHom(_) => "mf-hom",
            ProblemSpec::MfDisk(_) => "mf-disk",
            ProblemSpec::Arrangement(_) => "arrangement",
            ProblemSpec::Theta(_) => "theta",
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("problem specs serialize to TOML")
    }

    fn payload(&self) -> Value {
        let v = match self {
            ProblemSpec::Jacobi(p) => serde_json::to_value(p),
            ProblemSpec::Koszul(p) => serde_json::to_value(p),
            ProblemSpec::Critical(p) => serde_json::to_value(p),
            ProblemSpec::MfVerify(p) => serde_json::to_value(p),
            ProblemSpec::MfHom(p) => serde_json::to_value(p),
            ProblemSpec::MfDisk(p) => serde_json::to_value(p),
            ProblemSpec::Arrangement(p) => serde_json::to_value(p),
            ProblemSpec::Theta(p) => serde_json::to_value(p),
        };
        v.expect("payloads are plain data")
    }

    /// Schema checks beyond the TOML structure: expressions parse, shapes
    /// agree, parameters are in range.
    pub fn validate(&self) -> Result<(), RunError> {
        match self {
            ProblemSpec::Jacobi(p) => {
                jacobi_inputs(p)?;
            }
            ProblemSpec::Koszul(p) => {
                let (w, _) = poly_with_names(&[&p.w], p.vars.as_ref())?;
                koszul_caps(p, &w[0])?;
            }
            ProblemSpec::Critical(p) => {
                critical_inputs(p)?;
            }
            ProblemSpec::MfVerify(p) => {
                p.factorization.build()?;
            }
            ProblemSpec::MfHom(p) => {
                mf_pair(p)?;
            }
            ProblemSpec::MfDisk(p) => {
                p.factorization.build()?;
            }
            ProblemSpec::Arrangement(p) => {
                arrangement_of(&p.forms)?;
            }
            ProblemSpec::Theta(p) => {
                theta_inputs(p)?;
            }
        }
        Ok(())
    }
}

/// Parses and validates a TOML problem. Errors carry line and column.
pub fn parse_problem(text: &str) -> Result<ProblemSpec, RunError> {
    let spec: ProblemSpec = toml::from_str(text).map_err(|e| RunError::Parse(e.to_string().trim_end().to_string()))?;
    spec.validate()?;
    Ok(spec)
}

fn names_for(texts: &[&str], vars: Option<&Vec<String>>) -> VarNames {
    match vars {
        Some(v) => VarNames::new(v.clone()),
        None => VarNames::infer(texts.iter().copied()),
    }
}

fn poly_with_names(texts: &[&str], vars: Option<&Vec<String>>) -> Result<(Vec<Poly>, VarNames), RunError> {
    let names = names_for(texts, vars);
    let polys = texts.iter().map(|t| Poly::parse(t, &names)).collect::<Result<Vec<_>, _>>()?;
    Ok((polys, names))
}

fn jacobi_inputs(p: &JacobiProblem) -> Result<(Poly, FrameSpec, VarNames), RunError> {
    let mut texts = vec![p.w.as_str()];
    if let Some(f) = &p.hypersurface {
        texts.push(f);
    }
    let (polys, names) = poly_with_names(&texts, p.vars.as_ref())?;
    let frame = match polys.get(1) {
        Some(f) => FrameSpec::Hypersurface(f.clone()),
        None => FrameSpec::Affine,
    };
    Ok((polys[0].clone(), frame, names))
}

fn koszul_caps(p: &KoszulProblem, w: &Poly) -> Result<Vec<u32>, RunError> {
    if w.is_constant() {
        return Err(RunError::Invalid("superpotential must be non-constant".into()));
    }
    let d = w.total_degree().unwrap_or(0);
    let caps = p.caps.clone().unwrap_or_else(|| vec![2 * d, 2 * d + 1, 2 * d + 2]);
    if caps.is_empty() || caps.windows(2).any(|c| c[0] >= c[1]) {
        return Err(RunError::Invalid("caps must be non-empty and strictly increasing".into()));
    }
    if let Some(&c) = caps.iter().find(|&&c| c < d) {
        return Err(RunError::Invalid(format!("cap {c} is below deg W = {d}")));
    }
    Ok(caps)
}

struct CriticalInputs {
    system: critical::CriticalSystem,
    names: VarNames,
    bx: SearchBox,
    grid: usize,
    tol: f64,
}

fn critical_inputs(p: &CriticalProblem) -> Result<CriticalInputs, RunError> {
    let system = match (&p.eq, &p.f, &p.w) {
        (Some(eqs), None, None) => {
            if eqs.is_empty() {
                return Err(RunError::Invalid("eq must list at least one equation".into()));
            }
            let texts: Vec<&str> = eqs.iter().map(String::as_str).collect();
            let names = names_for(&texts, p.vars.as_ref());
            let parsed = texts.iter().map(|t| parse_expr(t, &names)).collect::<Result<Vec<_>, _>>()?;
            let system = critical::ExpPolySystem::new(names.len(), parsed)?;
            (critical::CriticalSystem { system, degenerate: false }, names)
        }
        (None, Some(f), Some(w)) => {
            let names = names_for(&[f, w], p.vars.as_ref());
            let f = parse_expr(f, &names)?;
            let w = parse_expr(w, &names)?;
            (critical::critical_system(&f, &w, names.len())?, names)
        }
        _ => return Err(RunError::Invalid("give either eq, or both f and W".into())),
    };
    let default = SearchBox::square(DEFAULT_BOX_RADIUS);
    let bx = SearchBox { re: p.re.unwrap_or(default.re), im: p.im.unwrap_or(default.im) };
    if bx.re[0] > bx.re[1] || bx.im[0] > bx.im[1] || !bx.re.iter().chain(&bx.im).all(|x| x.is_finite()) {
        return Err(RunError::Invalid("search box bounds must be finite with lo <= hi".into()));
    }
    let tol = p.tol.unwrap_or(DEFAULT_CRITICAL_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(RunError::Invalid("tol must be positive".into()));
    }
    let grid = p.grid.unwrap_or(DEFAULT_GRID);
    if grid == 0 {
        return Err(RunError::Invalid("grid must be at least 1".into()));
    }
    Ok(CriticalInputs { system: system.0, names: system.1, bx, grid, tol })
}

fn mf_pair(p: &MfHomProblem) -> Result<(MatrixFactorization, MatrixFactorization, VarNames), RunError> {
    let (a, names) = p.source.build()?;
    let (b, names_b) = p.target.build()?;
    if names != names_b {
        return Err(RunError::Invalid("source and target use different variables".into()));
    }
    if a.w != b.w {
        return Err(RunError::Invalid("source and target have different potentials".into()));
    }
    Ok((a, b, names))
}

fn arrangement_of(forms: &[String]) -> Result<Arrangement, RunError> {
    Ok(Arrangement::parse(&forms.join("\n"))?)
}

fn theta_inputs(p: &ThetaProblem) -> Result<(usize, f64, u64, ThetaSeriesParams), RunError> {
    let defaults = ThetaSeriesParams::default();
    let params = ThetaSeriesParams::new(p.n_max.unwrap_or(defaults.n_max), p.strip.unwrap_or(defaults.strip))?;
    let tol = p.tol.unwrap_or(DEFAULT_THETA_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(RunError::Invalid("tol must be positive".into()));
    }
    Ok((p.samples.unwrap_or(DEFAULT_THETA_SAMPLES), tol, p.seed.unwrap_or(0), params))
}

fn matrix_strings(m: &PolyMatrix, names: &VarNames) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(|p| p.fmt_with(names)).collect()).collect()
}

fn record(spec: &ProblemSpec, outputs: Value, diagnostics: Value) -> ResultRecord {
    ResultRecord {
        kind: spec.kind().to_string(),
        version: VERSION.to_string(),
        inputs: spec.payload(),
        outputs,
        diagnostics,
    }
}

/// Dispatches a validated problem to its module.
pub fn run(spec: &ProblemSpec) -> Result<Outcome, RunError> {
    spec.validate()?;
    let mut status = Status::Complete;
    let (outputs, diagnostics) = match spec {
        ProblemSpec::Jacobi(p) => {
            let (w, frame, names) = jacobi_inputs(p)?;
            let cap = p.degree_cap.unwrap_or(DEFAULT_DEGREE_CAP);
            let (gb, q) = jacobi_quotient(&w, &frame, cap)?;
            let basis: Vec<String> = q.monomials().iter().map(|m| m.fmt_with(&names)).collect();
            let gens: Vec<String> = gb.basis().iter().map(|g| g.fmt_with(&names)).collect();
            (
                json!({ "dimension": q.dimension(), "finite": q.is_finite(), "basis": basis, "groebner_basis": gens }),
                json!({ "order": "grevlex", "degree_cap": cap, "vars": names.names() }),
            )
        }
        ProblemSpec::Koszul(p) => {
            let (w, names) = poly_with_names(&[&p.w], p.vars.as_ref())?;
            let caps = koszul_caps(p, &w[0])?;
            let r = koszul::koszul_cohomology_dims(&w[0], &caps)?;
            if !r.stabilized {
                status = Status::Inconclusive;
            }
            (
                json!({ "positions": r.positions, "dims": r.stable_dims, "stabilized": r.stabilized }),
                json!({ "caps": caps, "dims_per_cap": r.dims_per_cap, "vars": names.names() }),
            )
        }
        ProblemSpec::Critical(p) => {
            let c = critical_inputs(p)?;
            let points = critical::find_critical_points(&c.system.system, &c.bx, c.grid, c.tol);
            let eqs: Vec<String> = c.system.system.equations().iter().map(|e| e.fmt_with(&c.names)).collect();
            (
                json!({ "count": points.len(), "points": points }),
                json!({
                    "box": c.bx,
                    "grid": c.grid,
                    "tol": c.tol,
                    "degenerate": c.system.degenerate,
                    "equations": eqs,
                    "vars": c.names.names(),
                }),
            )
        }
        ProblemSpec::MfVerify(p) => {
            let (mf, names) = p.factorization.build()?;
            let r = factorization::verify_factorization(&mf)?;
            (
                json!({
                    "verdict": r.verdict,
                    "ba_residual": matrix_strings(&r.ba_residual, &names),
                    "ab_residual": matrix_strings(&r.ab_residual, &names),
                }),
                json!({ "r0": mf.r0, "r1": mf.r1, "vars": names.names() }),
            )
        }
        ProblemSpec::MfHom(p) => {
            let (a, b, names) = mf_pair(p)?;
            let caps = p.caps.clone().unwrap_or_default();
            let h = factorization::hmf_hom_dims(&a, &b, &caps)?;
            if !h.stabilized {
                status = Status::Inconclusive;
            }
            (
                json!({ "even_dim": h.even_dim, "odd_dim": h.odd_dim, "stabilized": h.stabilized }),
                json!({ "cap": h.cap, "dims_per_cap": h.dims_per_cap, "vars": names.names() }),
            )
        }
        ProblemSpec::MfDisk(p) => {
            let (mf, names) = p.factorization.build()?;
            let caps = p.caps.clone().unwrap_or_default();
            let r = factorization::disk_algebra_dims(&mf, &caps)?;
            (serde_json::to_value(&r).expect("plain data"), json!({ "vars": names.names() }))
        }
        ProblemSpec::Arrangement(p) => {
            let arr = arrangement_of(&p.forms)?;
            let outputs = match p.report {
                ArrangementReport::Poincare => json!({ "poincare": arrangement::poincare_polynomial(&arr) }),
                ArrangementReport::Mobius => json!({ "flats": arrangement::mobius_entries(&arr) }),
                ArrangementReport::Os => json!({ "os_ranks": arrangement::os_ranks(&arr) }),
                ArrangementReport::H2 => serde_json::to_value(arrangement::h2_rank(&arr)).expect("plain data"),
            };
            let lattice = arrangement::intersection_lattice(&arr);
            (
                outputs,
                json!({
                    "dim": arr.dim(),
                    "forms": arr.len(),
                    "rank": arr.rank(),
                    "flats_by_codim": lattice.counts_by_codim(),
                }),
            )
        }
        ProblemSpec::Theta(p) => {
            let (samples, tol, seed, params) = theta_inputs(p)?;
            let r = theta::theta_check(samples, tol, seed, &params)?;
            (
                json!({ "identities": r.identities, "passed": r.passed }),
                json!({ "samples": r.samples, "seed": r.seed, "params": r.params, "tol": tol }),
            )
        }
    };
    Ok(Outcome { record: record(spec, outputs, diagnostics), status })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn jacobi_cubic() {
        let spec = parse_problem("[jacobi]\nW = \"z^3\"\n").unwrap();
        let out = run(&spec).unwrap();
        assert_eq!(out.status, Status::Complete);
        assert_eq!(out.record.outputs["dimension"], json!(2));
        assert_eq!(out.record.outputs["basis"], json!(["1", "z"]));
        assert_eq!(out.record.kind, "jacobi");
    }

    #[test]
    fn misspelled_kind_is_named() {
        let err = parse_problem("[jaccobi]\nW = \"z^3\"\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let msg = err.to_string();
        assert!(msg.contains("jaccobi"), "{msg}");
        assert!(msg.contains("line 1"), "{msg}");
    }

    #[test]
    fn unknown_field_rejected_with_location() {
        let err = parse_problem("[jacobi]\nW = \"z^3\"\ncapp = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("capp") && msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn mf_shape_error() {
        let text = r#"
[mf-verify.factorization]
r0 = 2
r1 = 2
A = [["x", "0"], ["0", "x"]]
B = [["x", "0"], ["0", "x"], ["0", "0"]]
W = "x^2"
"#;
        let err = parse_problem(text).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("B has 3 rows"), "{err}");
    }

    #[test]
    fn arrangement_problem() {
        let text = r#"
[arrangement]
forms = ["1 0 0", "0 1 0", "0 0 1", "1 -1 0", "1 0 -1", "0 1 -1"]
report = "poincare"
"#;
        let out = run(&parse_problem(text).unwrap()).unwrap();
        assert_eq!(out.record.outputs["poincare"], json!([1, 6, 11, 6]));
        assert_eq!(out.record.diagnostics["flats_by_codim"], json!([1, 6, 7, 1]));
    }

    #[test]
    fn koszul_problem() {
        let out = run(&parse_problem("[koszul]\nW = \"x1^3 + x2*x3\"\ncaps = [6, 7]\n").unwrap()).unwrap();
        assert_eq!(out.record.outputs["dims"], json!([0, 0, 0, 2]));
        let single = run(&parse_problem("[koszul]\nW = \"x1^2\"\ncaps = [4]\n").unwrap()).unwrap();
        assert_eq!(single.status, Status::Inconclusive);
        assert_eq!(single.exit_code(), 3);
    }

    #[test]
    fn mf_problems() {
        let fact = "r0 = 1\nr1 = 1\nA = [[\"z\"]]\nB = [[\"z^2\"]]\nW = \"z^3\"\n";
        let verify = run(&parse_problem(&format!("[mf-verify.factorization]\n{fact}")).unwrap()).unwrap();
        assert_eq!(verify.record.outputs["verdict"], json!(true));
        let disk = run(&parse_problem(&format!("[mf-disk]\ncaps = [4, 6, 8]\n[mf-disk.factorization]\n{fact}")).unwrap())
            .unwrap();
        assert_eq!(disk.record.outputs["predicted"], json!(4));
        assert_eq!(disk.record.outputs["direct"], json!(4));
        let hom = format!("[mf-hom.source]\n{fact}[mf-hom.target]\n{fact}");
        let out = run(&parse_problem(&hom).unwrap()).unwrap();
        assert_eq!(out.record.outputs["even_dim"], json!(1));
        assert_eq!(out.record.outputs["odd_dim"], json!(1));
    }

    #[test]
    fn invalid_payloads() {
        assert_eq!(parse_problem("[critical]\nf = \"x1\"\n").unwrap_err().exit_code(), 2);
        assert_eq!(parse_problem("[theta]\nn_max = 1\n").unwrap_err().exit_code(), 2);
        assert_eq!(parse_problem("[arrangement]\nforms = [\"1 1\", \"2 2\"]\nreport = \"os\"\n").unwrap_err().exit_code(), 2);
        assert_eq!(parse_problem("[jacobi]\nW = \"x1^\"\n").unwrap_err().exit_code(), 2);
        assert_eq!(parse_problem("[koszul]\nW = \"x1^3\"\ncaps = [2]\n").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn deterministic_records() {
        let spec = parse_problem("[theta]\nsamples = 10\nseed = 7\n").unwrap();
        assert_eq!(run(&spec).unwrap().record.to_json(), run(&spec).unwrap().record.to_json());
        let rec = run(&spec).unwrap().record;
        let back: ResultRecord = serde_json::from_str(&rec.to_json()).unwrap();
        assert_eq!(back, rec);
    }

    fn small_expr() -> impl Strategy<Value = String> {
        (1i64..9, 1u32..5, 0i64..5).prop_map(|(a, e, b)| format!("{a}*x1^{e} + {b}*x2"))
    }

    fn maybe_f64() -> impl Strategy<Value = Option<f64>> {
        prop::option::of(1e-12f64..1.0)
    }

    fn arb_spec() -> impl Strategy<Value = ProblemSpec> {
        prop_oneof![
            (small_expr(), prop::option::of(1usize..100)).prop_map(|(w, degree_cap)| ProblemSpec::Jacobi(
                JacobiProblem { w, vars: None, hypersurface: None, degree_cap }
            )),
            (small_expr(), prop::option::of(prop::collection::vec(1u32..20, 1..4))).prop_map(|(w, caps)| {
                ProblemSpec::Koszul(KoszulProblem { w, vars: Some(vec!["x1".into(), "x2".into()]), caps })
            }),
            (small_expr(), small_expr(), prop::option::of(1usize..8), maybe_f64(), -5.0f64..0.0).prop_map(
                |(f, w, grid, tol, lo)| ProblemSpec::Critical(CriticalProblem {
                    f: Some(f),
                    w: Some(w),
                    eq: None,
                    vars: None,
                    re: Some([lo, -lo]),
                    im: None,
                    grid,
                    tol,
                })
            ),
            (prop::collection::vec(prop::collection::vec(-3i64..4, 3), 1..5), 0usize..4).prop_map(|(forms, r)| {
                ProblemSpec::Arrangement(ArrangementProblem {
                    forms: forms.iter().map(|f| f.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")).collect(),
                    report: [ArrangementReport::Poincare, ArrangementReport::Mobius, ArrangementReport::Os, ArrangementReport::H2][r],
                })
            }),
            (prop::option::of(1usize..500), maybe_f64(), prop::option::of(0u64..1 << 40), prop::option::of(2u32..20))
                .prop_map(|(samples, tol, seed, n_max)| ProblemSpec::Theta(ThetaProblem {
                    samples,
                    tol,
                    seed,
                    n_max,
                    strip: None
                })),
            (small_expr(), prop::option::of(prop::collection::vec(1u32..20, 1..4))).prop_map(|(w, caps)| {
                let fact = FactorizationFile {
                    r0: 1,
                    r1: 1,
                    a: vec![vec!["x1".into()]],
                    b: vec![vec![w.clone()]],
                    w,
                    vars: None,
                };
                ProblemSpec::MfHom(MfHomProblem { source: fact.clone(), target: fact, caps })
            }),
        ]
    }

    proptest! {
        #[test]
        fn toml_round_trip(spec in arb_spec()) {
            let text = spec.to_toml();
            let back: ProblemSpec = toml::from_str(&text).unwrap();
            prop_assert_eq!(back, spec);
        }
    }
}
