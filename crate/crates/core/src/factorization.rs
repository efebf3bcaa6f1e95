//! Matrix factorizations `D² = W·id` over polynomial rings, their morphism
//! complexes and the disk complex `ι_W + 𝔡`.
//!
//! A factorization of rank `(r0, r1)` is stored by its two blocks: `A`
//! (`r1 × r0`, even to odd) and `B` (`r0 × r1`, odd to even), so that the
//! full odd endomorphism is `D = [[0, B], [A, 0]]`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::VarNames;
use crate::koszul::subsets;
use crate::linalg::{LinalgError, OperatorComplex, PolyMatrix, TruncatedComplex};
use crate::poly::{jacobi_quotient, FrameSpec, Poly, PolyError};
use crate::scalar::GaussianRational;

/// Caps used when the caller does not supply any.
pub const DEFAULT_CAPS: [u32; 3] = [4, 6, 8];

/// Degree bound for standard-monomial enumeration of Jacobi quotients.
pub const JACOBI_DEGREE_CAP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorizationError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("elementary factorization needs nonzero u and v")]
    ZeroInput,
    #[error("k = {k} outside 0..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("factorizations have different potentials")]
    MismatchedPotential,
    #[error("Jacobi quotient is infinite-dimensional")]
    InfiniteJacobi,
    #[error("cohomology did not stabilize over caps {0:?}")]
    NotStabilized(Vec<u32>),
    #[error("invalid factorization file: {0}")]
    Format(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFactorization {
    pub r0: usize,
    pub r1: usize,
    pub a: PolyMatrix,
    pub b: PolyMatrix,
    pub w: Poly,
}

impl MatrixFactorization {
    /// Checks block shapes and variable counts; does not check `D² = W`.
    pub fn new(r0: usize, r1: usize, a: PolyMatrix, b: PolyMatrix, w: Poly) -> Result<Self, FactorizationError> {
        if a.rows() != r1 || a.cols() != r0 {
            return Err(FactorizationError::Shape(format!(
                "A is {}x{}, expected {r1}x{r0}",
                a.rows(),
                a.cols()
            )));
        }
        if b.rows() != r0 || b.cols() != r1 {
            return Err(FactorizationError::Shape(format!(
                "B is {}x{}, expected {r0}x{r1}",
                b.rows(),
                b.cols()
            )));
        }
        if a.nvars() != w.nvars() || b.nvars() != w.nvars() {
            return Err(FactorizationError::Shape("blocks and W use different variable counts".into()));
        }
        Ok(MatrixFactorization { r0, r1, a, b, w })
    }

    /// The zero object: ranks `(0, 0)`.
    pub fn trivial(w: &Poly) -> Self {
        let n = w.nvars();
        MatrixFactorization {
            r0: 0,
            r1: 0,
            a: PolyMatrix::zeros(0, 0, n),
            b: PolyMatrix::zeros(0, 0, n),
            w: w.clone(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.w.nvars()
    }

    pub fn rank(&self) -> usize {
        self.r0 + self.r1
    }

    /// `D = [[0, B], [A, 0]]` on `E⁰ ⊕ E¹`.
    pub fn differential(&self) -> PolyMatrix {
        let n = self.rank();
        let mut d = PolyMatrix::zeros(n, n, self.nvars());
        for r in 0..self.r0 {
            for c in 0..self.r1 {
                d.set(r, self.r0 + c, self.b.get(r, c).clone());
            }
        }
        for r in 0..self.r1 {
            for c in 0..self.r0 {
                d.set(self.r0 + r, c, self.a.get(r, c).clone());
            }
        }
        d
    }

    /// The shifted factorization, with blocks exchanged.
    pub fn shift(&self) -> Self {
        MatrixFactorization {
            r0: self.r1,
            r1: self.r0,
            a: self.b.clone(),
            b: self.a.clone(),
            w: self.w.clone(),
        }
    }

    /// Conjugation by the even gauge transformation `diag(g0, g1)`:
    /// `A ↦ g1·A·g0⁻¹`, `B ↦ g0·B·g1⁻¹`.
    pub fn conjugate(
        &self,
        g0: &PolyMatrix,
        g0_inv: &PolyMatrix,
        g1: &PolyMatrix,
        g1_inv: &PolyMatrix,
    ) -> Result<Self, FactorizationError> {
        let n = self.nvars();
        for (g, gi, r) in [(g0, g0_inv, self.r0), (g1, g1_inv, self.r1)] {
            if g.mul(gi)? != PolyMatrix::identity(r, n) {
                return Err(FactorizationError::Shape("gauge matrix and inverse do not match".into()));
            }
        }
        let a = g1.mul(&self.a)?.mul(g0_inv)?;
        let b = g0.mul(&self.b)?.mul(g1_inv)?;
        MatrixFactorization::new(self.r0, self.r1, a, b, self.w.clone())
    }

    /// Reads `{r0, r1, A: [[expr]], B: [[expr]], W: expr}` with an optional
    /// `vars` list; variable names are inferred from the expressions otherwise.
    pub fn from_json(text: &str) -> Result<(Self, VarNames), FactorizationError> {
        let file: FactorizationFile =
            serde_json::from_str(text).map_err(|e| FactorizationError::Format(e.to_string()))?;
        file.build()
    }

    pub fn to_file(&self, names: &VarNames) -> FactorizationFile {
        let rows = |m: &PolyMatrix| {
            m.to_rows()
                .iter()
                .map(|row| row.iter().map(|p| p.fmt_with(names)).collect())
                .collect()
        };
        FactorizationFile {
            r0: self.r0,
            r1: self.r1,
            a: rows(&self.a),
            b: rows(&self.b),
            w: self.w.fmt_with(names),
            vars: Some(names.names().to_vec()),
        }
    }
}

/// Interchange form of a factorization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorizationFile {
    pub r0: usize,
    pub r1: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<String>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<String>>,
    #[serde(rename = "W")]
    pub w: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vars: Option<Vec<String>>,
}

impl FactorizationFile {
    fn texts(&self) -> impl Iterator<Item = &str> {
        self.a
            .iter()
            .chain(&self.b)
            .flatten()
            .map(String::as_str)
            .chain(std::iter::once(self.w.as_str()))
    }

    pub fn build(&self) -> Result<(MatrixFactorization, VarNames), FactorizationError> {
        let names = match &self.vars {
            Some(v) => VarNames::new(v.clone()),
            None => VarNames::infer(self.texts()),
        };
        let n = names.len();
        let matrix = |label: &str, rows: &[Vec<String>], nr: usize, nc: usize| {
            if rows.len() != nr {
                return Err(FactorizationError::Shape(format!("{label} has {} rows, expected {nr}", rows.len())));
            }
            let mut out = Vec::with_capacity(nr);
            for (i, row) in rows.iter().enumerate() {
                if row.len() != nc {
                    return Err(FactorizationError::Shape(format!(
                        "{label} row {i} has {} entries, expected {nc}",
                        row.len()
                    )));
                }
                out.push(row.iter().map(|t| Poly::parse(t, &names)).collect::<Result<Vec<_>, _>>()?);
            }
            Ok(PolyMatrix::from_rows(out, nc, n)?)
        };
        let a = matrix("A", &self.a, self.r1, self.r0)?;
        let b = matrix("B", &self.b, self.r0, self.r1)?;
        let w = Poly::parse(&self.w, &names)?;
        Ok((MatrixFactorization::new(self.r0, self.r1, a, b, w)?, names))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    /// `B·A − W·I_{r0}`
    pub ba_residual: PolyMatrix,
    /// `A·B − W·I_{r1}`
    pub ab_residual: PolyMatrix,
    pub verdict: bool,
}

pub fn verify_factorization(mf: &MatrixFactorization) -> Result<VerifyReport, FactorizationError> {
    let ba = mf.b.mul(&mf.a)?.sub(&PolyMatrix::scalar(mf.r0, &mf.w))?;
    let ab = mf.a.mul(&mf.b)?.sub(&PolyMatrix::scalar(mf.r1, &mf.w))?;
    let verdict = ba.is_zero() && ab.is_zero();
    Ok(VerifyReport { ba_residual: ba, ab_residual: ab, verdict })
}

/// Blocks `a_k = [[x2, x1^{n+1−k}], [x1^k, −x3]]` and
/// `b_k = [[x3, x1^{n+1−k}], [x1^k, −x2]]` of `W = x1^{n+1} + x2·x3`.
pub fn quiver_factorization(n: u32, k: u32) -> Result<MatrixFactorization, FactorizationError> {
    if k > n + 1 {
        return Err(FactorizationError::KOutOfRange { k: k as usize, max: n as usize + 1 });
    }
    let x = |i: usize| Poly::var(3, i);
    let x1p = |e: u32| x(0).pow(e);
    let a = vec![vec![x(1), x1p(n + 1 - k)], vec![x1p(k), -&x(2)]];
    let b = vec![vec![x(2), x1p(n + 1 - k)], vec![x1p(k), -&x(1)]];
    let w = &x1p(n + 1) + &(&x(1) * &x(2));
    MatrixFactorization::new(2, 2, PolyMatrix::from_rows(a, 2, 3)?, PolyMatrix::from_rows(b, 2, 3)?, w)
}

/// Rank `(1,1)` factorization `A = [u]`, `B = [v]` of `u·v`.
pub fn elementary_factorization(u: &Poly, v: &Poly) -> Result<MatrixFactorization, FactorizationError> {
    if u.is_zero() || v.is_zero() {
        return Err(FactorizationError::ZeroInput);
    }
    if u.nvars() != v.nvars() {
        return Err(FactorizationError::Shape("u and v use different variable counts".into()));
    }
    let n = u.nvars();
    MatrixFactorization::new(
        1,
        1,
        PolyMatrix::from_rows(vec![vec![u.clone()]], 1, n)?,
        PolyMatrix::from_rows(vec![vec![v.clone()]], 1, n)?,
        u * v,
    )
}

/// Entries `(row, col)` of block maps `E₁ → E₂`, split by parity and
/// ordered block-row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomBasis {
    pub even: Vec<(usize, usize)>,
    pub odd: Vec<(usize, usize)>,
}

impl HomBasis {
    pub fn new(source: &MatrixFactorization, target: &MatrixFactorization) -> Self {
        let rows = [0..target.r0, target.r0..target.rank()];
        let cols = [0..source.r0, source.r0..source.rank()];
        let mut even = Vec::new();
        let mut odd = Vec::new();
        for (bi, rr) in rows.iter().enumerate() {
            for (bj, cr) in cols.iter().enumerate() {
                let dst = if bi == bj { &mut even } else { &mut odd };
                for r in rr.clone() {
                    for c in cr.clone() {
                        dst.push((r, c));
                    }
                }
            }
        }
        HomBasis { even, odd }
    }

    pub fn part(&self, parity: usize) -> &[(usize, usize)] {
        if parity == 0 {
            &self.even
        } else {
            &self.odd
        }
    }
}

/// `𝔡(E_rc) = D₂·E_rc − (−1)^s E_rc·D₁` as a sparse list of entries.
fn defect_on_unit(d1: &PolyMatrix, d2: &PolyMatrix, r: usize, c: usize, parity: usize) -> Vec<((usize, usize), Poly)> {
    let mut acc: BTreeMap<(usize, usize), Poly> = BTreeMap::new();
    for i in 0..d2.rows() {
        let p = d2.get(i, r);
        if !p.is_zero() {
            let e = acc.entry((i, c)).or_insert_with(|| Poly::zero(p.nvars()));
            *e = &*e + p;
        }
    }
    for j in 0..d1.cols() {
        let p = d1.get(c, j);
        if !p.is_zero() {
            let e = acc.entry((r, j)).or_insert_with(|| Poly::zero(p.nvars()));
            *e = if parity == 0 { &*e - p } else { &*e + p };
        }
    }
    acc.into_iter().filter(|(_, p)| !p.is_zero()).collect()
}

fn same_potential(a1: &MatrixFactorization, a2: &MatrixFactorization) -> Result<(), FactorizationError> {
    if a1.w != a2.w {
        return Err(FactorizationError::MismatchedPotential);
    }
    Ok(())
}

/// The 2-periodic complex `Hom⁰ → Hom¹ → Hom⁰` of block maps `a1 → a2`
/// with the defect differential.
pub fn hom_complex(a1: &MatrixFactorization, a2: &MatrixFactorization) -> Result<OperatorComplex, FactorizationError> {
    same_potential(a1, a2)?;
    let n = a1.nvars();
    let basis = HomBasis::new(a1, a2);
    let (d1, d2) = (a1.differential(), a2.differential());
    let mut diffs = Vec::with_capacity(2);
    for s in 0..2 {
        let src = basis.part(s);
        let dst = basis.part(1 - s);
        let index: HashMap<(usize, usize), usize> = dst.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut m = PolyMatrix::zeros(dst.len(), src.len(), n);
        for (col, &(r, c)) in src.iter().enumerate() {
            for (entry, p) in defect_on_unit(&d1, &d2, r, c, s) {
                m.set(index[&entry], col, p);
            }
        }
        diffs.push(m);
    }
    Ok(OperatorComplex::new(n, vec![basis.even.len(), basis.odd.len()], diffs, true)?)
}

/// Truncated defect complex at one cap; module 0 is even, module 1 odd.
pub fn defect_operator(
    a1: &MatrixFactorization,
    a2: &MatrixFactorization,
    cap: u32,
) -> Result<TruncatedComplex, FactorizationError> {
    Ok(hom_complex(a1, a2)?.truncate(cap)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomDims {
    pub even_dim: usize,
    pub odd_dim: usize,
    pub stabilized: bool,
    pub cap: u32,
    pub dims_per_cap: BTreeMap<u32, [usize; 2]>,
}

fn stable_dims(complex: &OperatorComplex, caps: &[u32]) -> Result<(Vec<usize>, bool, u32, BTreeMap<u32, [usize; 2]>), FactorizationError> {
    let caps: &[u32] = if caps.is_empty() { &DEFAULT_CAPS } else { caps };
    if caps.windows(2).any(|p| p[0] >= p[1]) {
        return Err(FactorizationError::Shape("caps must be strictly increasing".into()));
    }
    let mut per_cap = BTreeMap::new();
    let mut previous: Option<Vec<usize>> = None;
    let mut found = None;
    for &cap in caps {
        let dims = complex.cohomology_dims(cap)?;
        per_cap.insert(cap, [dims[0], dims[1]]);
        if found.is_none() && previous.as_ref() == Some(&dims) {
            found = Some((dims.clone(), cap));
        }
        previous = Some(dims);
    }
    Ok(match found {
        Some((dims, cap)) => (dims, true, cap, per_cap),
        None => (previous.unwrap_or_default(), false, *caps.last().unwrap(), per_cap),
    })
}

/// Even and odd cohomology of the defect complex; non-stabilization over
/// `caps` is reported through the flag.
pub fn hmf_hom_dims(
    a1: &MatrixFactorization,
    a2: &MatrixFactorization,
    caps: &[u32],
) -> Result<HomDims, FactorizationError> {
    let complex = hom_complex(a1, a2)?;
    let (dims, stabilized, cap, dims_per_cap) = stable_dims(&complex, caps)?;
    Ok(HomDims { even_dim: dims[0], odd_dim: dims[1], stabilized, cap, dims_per_cap })
}

/// The 2-periodic complex `Λℂ^d ⊗ End(a)` with
/// `ϑ(e_I ⊗ f) = ι_W(e_I) ⊗ f + (−1)^{|I|} e_I ⊗ 𝔡f`,
/// graded by `|I| + deg f mod 2`.
pub fn disk_complex(a: &MatrixFactorization) -> Result<OperatorComplex, FactorizationError> {
    let n = a.nvars();
    let grad: Vec<Poly> = (0..n).map(|i| a.w.derivative(i)).collect();
    let basis = HomBasis::new(a, a);
    let d = a.differential();
    let sets: Vec<Vec<usize>> = (0..=n).flat_map(|k| subsets(n, k)).collect();
    let mut parts: [Vec<(usize, usize, usize)>; 2] = [Vec::new(), Vec::new()];
    for (si, set) in sets.iter().enumerate() {
        for s in 0..2 {
            for (ei, _) in basis.part(s).iter().enumerate() {
                parts[(set.len() + s) % 2].push((si, s, ei));
            }
        }
    }
    let set_index: HashMap<&Vec<usize>, usize> = sets.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let entry_index: [HashMap<(usize, usize), usize>; 2] =
        [0, 1].map(|s| basis.part(s).iter().enumerate().map(|(i, &e)| (e, i)).collect());
    let mut diffs = Vec::with_capacity(2);
    for t in 0..2 {
        let dst_index: HashMap<(usize, usize, usize), usize> =
            parts[1 - t].iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let mut m = PolyMatrix::zeros(parts[1 - t].len(), parts[t].len(), n);
        let mut add = |row: usize, col: usize, p: &Poly| {
            let cur = m.get(row, col).clone();
            m.set(row, col, &cur + p);
        };
        for (col, &(si, s, ei)) in parts[t].iter().enumerate() {
            let set = &sets[si];
            for (pos, &j) in set.iter().enumerate() {
                let mut rest = set.clone();
                rest.remove(pos);
                let row = dst_index[&(set_index[&rest], s, ei)];
                let term = if pos % 2 == 0 { grad[j].clone() } else { -&grad[j] };
                add(row, col, &term);
            }
            let (r, c) = basis.part(s)[ei];
            for (entry, p) in defect_on_unit(&d, &d, r, c, s) {
                let row = dst_index[&(si, 1 - s, entry_index[1 - s][&entry])];
                let term = if set.len().is_multiple_of(2) { p } else { -&p };
                add(row, col, &term);
            }
        }
        diffs.push(m);
    }
    Ok(OperatorComplex::new(n, vec![parts[0].len(), parts[1].len()], diffs, true)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiskReport {
    pub jacobi_dim: usize,
    pub end_dims: [usize; 2],
    /// `dim Jac × (even + odd)` self-hom dimensions.
    pub predicted: usize,
    pub direct_dims: [usize; 2],
    pub direct: usize,
    pub cap: u32,
    pub verdict: bool,
}

/// Compares `dim Jac · dim End` with the directly computed cohomology of the
/// disk complex. Both sides must stabilize over `caps`.
pub fn disk_algebra_dims(a: &MatrixFactorization, caps: &[u32]) -> Result<DiskReport, FactorizationError> {
    let (_, q) = jacobi_quotient(&a.w, &FrameSpec::Affine, JACOBI_DEGREE_CAP)?;
    let jacobi_dim = q.dimension().ok_or(FactorizationError::InfiniteJacobi)?;
    let used: Vec<u32> = if caps.is_empty() { DEFAULT_CAPS.to_vec() } else { caps.to_vec() };
    let end = hmf_hom_dims(a, a, &used)?;
    let (direct_dims, stabilized, cap, _) = stable_dims(&disk_complex(a)?, &used)?;
    if !end.stabilized || !stabilized {
        return Err(FactorizationError::NotStabilized(used));
    }
    let predicted = jacobi_dim * (end.even_dim + end.odd_dim);
    let direct = direct_dims[0] + direct_dims[1];
    Ok(DiskReport {
        jacobi_dim,
        end_dims: [end.even_dim, end.odd_dim],
        predicted,
        direct_dims: [direct_dims[0], direct_dims[1]],
        direct,
        cap: cap.max(end.cap),
        verdict: predicted == direct,
    })
}

/// Inverse of a constant square matrix over `ℚ(i)`, if it exists.
pub fn constant_inverse(m: &PolyMatrix) -> Option<PolyMatrix> {
    let n = m.rows();
    if m.cols() != n {
        return None;
    }
    let mut a: Vec<Vec<GaussianRational>> = Vec::with_capacity(n);
    for r in 0..n {
        let mut row = Vec::with_capacity(2 * n);
        for c in 0..n {
            let p = m.get(r, c);
            if !p.is_constant() {
                return None;
            }
            row.push(p.coeff(&crate::poly::Monomial::one(m.nvars())));
        }
        row.extend((0..n).map(|c| GaussianRational::from_int((r == c) as i64)));
        a.push(row);
    }
    for col in 0..n {
        let piv = (col..n).find(|&r| !num_traits::Zero::is_zero(&a[r][col]))?;
        a.swap(col, piv);
        let inv = a[col][col].inv()?;
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !num_traits::Zero::is_zero(&a[r][col]) {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &(&f * y);
                }
            }
        }
    }
    let mut out = PolyMatrix::zeros(n, n, m.nvars());
    for r in 0..n {
        for c in 0..n {
            out.set(r, c, Poly::constant(m.nvars(), a[r][n + c].clone()));
        }
    }
    Some(out)
}
