//! The theta function `ϑ(z) = Σ_n e^{−πn² + 2πinz}` at modulus `i`, and the
//! elementary factorization of `W̃(z1, z2) = e^{−2πz2²} ϑ(z1 + i z2) ϑ(z1 − i z2)`
//! on `(ℂ*)² = ℂ²/ℤ²`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// All evaluation is carried out in IEEE double precision.
pub const WORKING_PRECISION_BITS: u32 = 53;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThetaError {
    #[error("|Im z| = {im} lies outside the evaluation strip |Im z| <= {strip}")]
    StripViolation { im: f64, strip: f64 },
    #[error("invalid series parameters: {0}")]
    Params(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaSeriesParams {
    /// Partial sums run over `|n| <= n_max`.
    pub n_max: u32,
    /// Half-width of the strip `|Im z| <= strip` on which evaluation is allowed.
    pub strip: f64,
}

impl Default for ThetaSeriesParams {
    fn default() -> Self {
        ThetaSeriesParams { n_max: 8, strip: 3.0 }
    }
}

impl ThetaSeriesParams {
    pub fn new(n_max: u32, strip: f64) -> Result<Self, ThetaError> {
        let p = ThetaSeriesParams { n_max, strip };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ThetaError> {
        if self.n_max < 1 {
            return Err(ThetaError::Params("n_max must be at least 1".into()));
        }
        if !(self.strip >= 0.0) || !self.strip.is_finite() {
            return Err(ThetaError::Params("strip must be a finite non-negative number".into()));
        }
        if !self.tail_bound(self.strip).is_finite() {
            return Err(ThetaError::Params(format!(
                "n_max = {} does not control the tail on |Im z| <= {}",
                self.n_max, self.strip
            )));
        }
        Ok(())
    }

    /// Bound on `|Σ_{|n| > n_max} e^{−πn² + 2πinz}|` for `|Im z| <= y`:
    /// `2 e^{−π(N+1)² + 2π(N+1)y} / (1 − q)` with `q = e^{−π(2N+3) + 2πy}`.
    pub fn tail_bound(&self, y: f64) -> f64 {
        let m = self.n_max as f64 + 1.0;
        let q = (-PI * (2.0 * m + 1.0) + 2.0 * PI * y.abs()).exp();
        if q >= 1.0 {
            return f64::INFINITY;
        }
        2.0 * (-PI * m * m + 2.0 * PI * m * y.abs()).exp() / (1.0 - q)
    }

    fn check(&self, z: Complex64) -> Result<(), ThetaError> {
        if z.im.abs() > self.strip || !z.im.is_finite() {
            return Err(ThetaError::StripViolation { im: z.im.abs(), strip: self.strip });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThetaValue {
    pub value: Complex64,
    /// Truncation error bound for the partial sum.
    pub error_bound: f64,
}

fn theta_sum(z: Complex64, n_max: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for k in 1..=n_max as i64 {
        let n = k as f64;
        let base = -PI * n * n;
        let phase = Complex64::new(0.0, 2.0 * PI * n) * z;
        acc += (base + phase).exp() + (base - phase).exp();
    }
    acc
}

pub fn theta_eval(z: Complex64, params: &ThetaSeriesParams) -> Result<ThetaValue, ThetaError> {
    params.check(z)?;
    Ok(ThetaValue { value: theta_sum(z, params.n_max), error_bound: params.tail_bound(z.im) })
}

/// A point of `ℂ²` standing for its class in `ℂ²/ℤ²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl TorusPoint {
    pub fn new(z1: Complex64, z2: Complex64) -> Self {
        TorusPoint { z1, z2 }
    }

    /// Representative with both real parts in `[0, 1)`.
    pub fn canonical(&self) -> Self {
        let red = |z: Complex64| {
            let r = z.re.rem_euclid(1.0);
            Complex64::new(if r >= 1.0 { 0.0 } else { r }, z.im)
        };
        TorusPoint { z1: red(self.z1), z2: red(self.z2) }
    }

    pub fn shifted(&self, a: i64, b: i64) -> Self {
        TorusPoint { z1: self.z1 + a as f64, z2: self.z2 + b as f64 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionKind {
    FPlus,
    FMinus,
    S,
    WTilde,
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `f_± = ϑ(z1 ± i z2)`, `S = e^{−2π z2²}`, `W̃ = S f_+ f_−`.
pub fn section_eval(kind: SectionKind, p: &TorusPoint, params: &ThetaSeriesParams) -> Result<Complex64, ThetaError> {
    let plus = || theta_eval(p.z1 + I * p.z2, params).map(|v| v.value);
    let minus = || theta_eval(p.z1 - I * p.z2, params).map(|v| v.value);
    let s = (-2.0 * PI * p.z2 * p.z2).exp();
    Ok(match kind {
        SectionKind::FPlus => plus()?,
        SectionKind::FMinus => minus()?,
        SectionKind::S => s,
        SectionKind::WTilde => s * plus()? * minus()?,
    })
}

/// `W̃` from the double series `Σ_{m,n} e^{−π(m²+n²) + 2πi(m w₊ + n w₋)}`,
/// independent of the single-variable evaluation path.
pub fn w_tilde_double_series(p: &TorusPoint, params: &ThetaSeriesParams) -> Result<Complex64, ThetaError> {
    let (wp, wm) = (p.z1 + I * p.z2, p.z1 - I * p.z2);
    params.check(wp)?;
    params.check(wm)?;
    let n = params.n_max as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for a in -n..=n {
        for b in -n..=n {
            let (af, bf) = (a as f64, b as f64);
            let e = Complex64::new(-PI * (af * af + bf * bf), 0.0) + 2.0 * PI * I * (af * wp + bf * wm);
            acc += e.exp();
        }
    }
    Ok((-2.0 * PI * p.z2 * p.z2).exp() * acc)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorizationReport {
    pub samples: usize,
    pub max_deviation: f64,
    pub worst_point: Option<TorusPoint>,
    pub tol: f64,
    pub passed: bool,
}

/// At each point forms `D = [[0, f_−], [f_+, 0]]` and checks
/// `S·D² = W̃·id` against the double-series value of `W̃`.
pub fn verify_theta_factorization(
    points: &[TorusPoint],
    tol: f64,
    params: &ThetaSeriesParams,
) -> Result<FactorizationReport, ThetaError> {
    let mut max_deviation: f64 = 0.0;
    let mut worst_point = None;
    for p in points {
        let fp = section_eval(SectionKind::FPlus, p, params)?;
        let fm = section_eval(SectionKind::FMinus, p, params)?;
        let s = section_eval(SectionKind::S, p, params)?;
        let w = w_tilde_double_series(p, params)?;
        let zero = Complex64::new(0.0, 0.0);
        let d = Matrix2::new(zero, fm, fp, zero);
        let lhs = (d * d).map(|x| x * s);
        let rhs = Matrix2::new(w, zero, zero, w);
        let dev = (lhs - rhs).iter().map(|x| x.norm()).fold(0.0, f64::max);
        if dev > max_deviation || worst_point.is_none() {
            max_deviation = max_deviation.max(dev);
            worst_point = Some(*p);
        }
    }
    Ok(FactorizationReport {
        samples: points.len(),
        max_deviation,
        worst_point,
        tol,
        passed: max_deviation < tol,
    })
}

/// Random covering-space points with `Re` in `[0, 1)` and `|Im| <= im_radius`.
pub fn random_torus_points(rng: &mut impl Rng, count: usize, im_radius: f64) -> Vec<TorusPoint> {
    (0..count)
        .map(|_| {
            let mut c = || Complex64::new(rng.gen_range(0.0..1.0), rng.gen_range(-im_radius..=im_radius));
            TorusPoint::new(c(), c())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub max_residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(max_residual: f64, threshold: f64) -> Self {
        IdentityCheck { max_residual, threshold, passed: max_residual < threshold }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaCheckReport {
    pub samples: usize,
    pub seed: u64,
    pub params: ThetaSeriesParams,
    pub identities: BTreeMap<String, IdentityCheck>,
    pub passed: bool,
}

/// Thresholds for the fixed identities; `tol` governs the `W̃` identities.
pub const QUASI_PERIODICITY_THRESHOLD: f64 = 1e-10;
pub const ZERO_THRESHOLD: f64 = 1e-12;
pub const EVENNESS_THRESHOLD: f64 = 1e-12;

/// `|ϑ(z ± i) − e^{π ∓ 2πiz} ϑ(z)|`, shifting toward the real axis
/// (`+i` when `Im z <= 0`, `−i` otherwise) so that for `|Im z| <= 1` both
/// arguments stay in the unit strip.
pub fn quasi_period_residual(z: Complex64, params: &ThetaSeriesParams) -> Result<f64, ThetaError> {
    let t = theta_eval(z, params)?.value;
    let r = if z.im <= 0.0 {
        theta_eval(z + I, params)?.value - (PI - 2.0 * PI * I * z).exp() * t
    } else {
        theta_eval(z - I, params)?.value - (PI + 2.0 * PI * I * z).exp() * t
    };
    Ok(r.norm())
}

/// Evaluates every identity at `samples` seeded random points of the unit
/// strip:
/// `ϑ(z+1) = ϑ(z)`, `ϑ(z±i) = e^{π∓2πiz} ϑ(z)`, `ϑ(−z) = ϑ(z)`,
/// `ϑ((1+i)/2) = 0`, `ℤ²`-periodicity of `W̃` and the chart identity.
pub fn theta_check(samples: usize, tol: f64, seed: u64, params: &ThetaSeriesParams) -> Result<ThetaCheckReport, ThetaError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let th = |z: Complex64| theta_eval(z, params).map(|v| v.value);
    let zs: Vec<Complex64> = (0..samples)
        .map(|_| Complex64::new(rng.gen_range(0.0..1.0), rng.gen_range(-1.0..=1.0)))
        .collect();
    let (mut per1, mut quasi, mut even) = (0.0f64, 0.0f64, 0.0f64);
    for &z in &zs {
        let t = th(z)?;
        per1 = per1.max((th(z + 1.0)? - t).norm());
        quasi = quasi.max(quasi_period_residual(z, params)?);
        even = even.max((th(-z)? - t).norm());
    }
    let zero = th(Complex64::new(0.5, 0.5))?.norm();
    let pts = random_torus_points(&mut rng, samples, 0.5);
    let (mut w1, mut w2) = (0.0f64, 0.0f64);
    for p in &pts {
        let w = section_eval(SectionKind::WTilde, p, params)?;
        w1 = w1.max((section_eval(SectionKind::WTilde, &p.shifted(1, 0), params)? - w).norm());
        w2 = w2.max((section_eval(SectionKind::WTilde, &p.shifted(0, 1), params)? - w).norm());
    }
    let chart = verify_theta_factorization(&pts, tol, params)?;
    let mut identities = BTreeMap::new();
    identities.insert("theta_period_1".to_string(), IdentityCheck::new(per1, QUASI_PERIODICITY_THRESHOLD));
    identities.insert("theta_quasi_period_i".to_string(), IdentityCheck::new(quasi, QUASI_PERIODICITY_THRESHOLD));
    identities.insert("theta_even".to_string(), IdentityCheck::new(even, EVENNESS_THRESHOLD));
    identities.insert("theta_zero".to_string(), IdentityCheck::new(zero, ZERO_THRESHOLD));
    identities.insert("w_tilde_period_z1".to_string(), IdentityCheck::new(w1, tol));
    identities.insert("w_tilde_period_z2".to_string(), IdentityCheck::new(w2, tol));
    identities.insert("chart_identity".to_string(), IdentityCheck::new(chart.max_deviation, tol));
    let passed = identities.values().all(|c| c.passed);
    Ok(ThetaCheckReport { samples, seed, params: *params, identities, passed })
}
