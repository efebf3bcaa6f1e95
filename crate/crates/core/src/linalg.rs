//! Exact linear algebra for degree-truncated complexes of free polynomial
//! modules.
//!
//! A differential is an `O`-linear map between free modules, stored as a
//! matrix of polynomials. Truncating the source at total degree `cap` gives a
//! finite matrix over ℚ(i) whose rank is computed by fraction-free sparse
//! elimination.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::poly::{Monomial, Poly};
use crate::scalar::{clear_denominators, gauss_content, GaussInt, GaussianRational};

/// Environment variable bounding the number of rows or columns of any
/// truncated matrix.
pub const MAX_MATRIX_DIM_ENV: &str = "LG_MAX_MATRIX_DIM";
const DEFAULT_MAX_MATRIX_DIM: usize = 200_000;

pub fn max_matrix_dim() -> usize {
    std::env::var(MAX_MATRIX_DIM_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_MATRIX_DIM)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("resource limit: truncated matrix dimension {found} exceeds {limit}")]
    MatrixTooLarge { found: usize, limit: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Dense matrix of polynomials, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    nvars: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        PolyMatrix { rows, cols, nvars, entries: vec![Poly::zero(nvars); rows * cols] }
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        let mut m = Self::zeros(n, n, nvars);
        for i in 0..n {
            m.set(i, i, Poly::one(nvars));
        }
        m
    }

    pub fn scalar(n: usize, p: &Poly) -> Self {
        let mut m = Self::zeros(n, n, p.nvars());
        for i in 0..n {
            m.set(i, i, p.clone());
        }
        m
    }

    /// Builds from rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Poly>>, cols: usize, nvars: usize) -> Result<Self, LinalgError> {
        let r = rows.len();
        let mut entries = Vec::with_capacity(r * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::Shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for p in row {
                if p.nvars() != nvars {
                    return Err(LinalgError::Shape(format!(
                        "entry in {} variables, expected {nvars}",
                        p.nvars()
                    )));
                }
                entries.push(p);
            }
        }
        Ok(PolyMatrix { rows: r, cols, nvars, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, r: usize, c: usize) -> &Poly {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: Poly) {
        self.entries[r * self.cols + c] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn to_rows(&self) -> Vec<Vec<Poly>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c).clone()).collect())
            .collect()
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = PolyMatrix::zeros(self.rows, other.cols, self.nvars);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Poly::zero(self.nvars);
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    fn zip(&self, other: &PolyMatrix, f: impl Fn(&Poly, &Poly) -> Poly) -> Result<PolyMatrix, LinalgError> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(LinalgError::Shape(format!(
                "shape {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<PolyMatrix, LinalgError> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PolyMatrix) -> Result<PolyMatrix, LinalgError> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &GaussianRational) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            entries: self.entries.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// Applies the matrix to a column vector of polynomials.
    pub fn apply(&self, v: &[Poly]) -> Vec<Poly> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                (0..self.cols).fold(Poly::zero(self.nvars), |acc, c| {
                    let a = self.get(r, c);
                    if a.is_zero() || v[c].is_zero() {
                        acc
                    } else {
                        &acc + &(a * &v[c])
                    }
                })
            })
            .collect()
    }
}

/// A basis vector `m · e_comp` of a free module.
pub type Label = (usize, Monomial);

/// The finite matrix of a [`PolyMatrix`] on sources of degree `≤ cap`.
/// Target rows are labelled and carry their degree, so the part of the
/// image above the cap can be projected out.
#[derive(Clone, Debug)]
pub struct TruncatedMap {
    pub cap: u32,
    pub source: Vec<Label>,
    pub target: Vec<Label>,
    target_index: HashMap<Label, usize>,
    /// Sparse columns, entries sorted by target row.
    pub columns: Vec<Vec<(usize, GaussianRational)>>,
}

impl TruncatedMap {
    pub fn build(m: &PolyMatrix, cap: u32) -> Result<Self, LinalgError> {
        Self::build_with_limit(m, cap, max_matrix_dim())
    }

    pub fn build_with_limit(m: &PolyMatrix, cap: u32, limit: usize) -> Result<Self, LinalgError> {
        let monos = Monomial::all_up_to_degree(m.nvars(), cap);
        let source: Vec<Label> = (0..m.cols())
            .flat_map(|c| monos.iter().map(move |mo| (c, mo.clone())))
            .collect();
        if source.len() > limit {
            return Err(LinalgError::MatrixTooLarge { found: source.len(), limit });
        }
        let mut images: Vec<BTreeMap<Label, GaussianRational>> = Vec::with_capacity(source.len());
        for (c, mo) in &source {
            let mut col: BTreeMap<Label, GaussianRational> = BTreeMap::new();
            for r in 0..m.rows() {
                for (t, a) in m.get(r, *c).terms() {
                    let key = (r, t.mul(mo));
                    let e = col.entry(key).or_insert_with(GaussianRational::zero);
                    *e += a;
                }
            }
            col.retain(|_, v| !v.is_zero());
            images.push(col);
        }
        let mut target: Vec<Label> = images.iter().flat_map(|c| c.keys().cloned()).collect();
        target.sort_by(|a, b| (a.1.degree(), a.0, &a.1).cmp(&(b.1.degree(), b.0, &b.1)));
        target.dedup();
        if target.len() > limit {
            return Err(LinalgError::MatrixTooLarge { found: target.len(), limit });
        }
        let target_index: HashMap<Label, usize> =
            target.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        let columns = images
            .into_iter()
            .map(|col| {
                let mut v: Vec<(usize, GaussianRational)> =
                    col.into_iter().map(|(l, a)| (target_index[&l], a)).collect();
                v.sort_by_key(|e| e.0);
                v
            })
            .collect();
        Ok(TruncatedMap { cap, source, target, target_index, columns })
    }

    pub fn rank(&self) -> usize {
        rank(self.columns.iter().map(|c| c.as_slice()))
    }

    /// Rank of the image after discarding rows of degree `≤ cap`.
    pub fn rank_above_cap(&self) -> usize {
        let cap = self.cap;
        let projected: Vec<Vec<(usize, GaussianRational)>> = self
            .columns
            .iter()
            .map(|c| c.iter().filter(|(r, _)| self.target[*r].1.degree() > cap).cloned().collect())
            .collect();
        rank(projected.iter().map(|c| c.as_slice()))
    }

    pub fn target_index(&self, l: &Label) -> Option<usize> {
        self.target_index.get(l).copied()
    }
}

fn gauss_mul(a: &GaussInt, b: &GaussInt) -> GaussInt {
    a * b
}

/// Rank of a family of sparse vectors over ℚ(i).
///
/// Fraction-free: each vector is scaled to Gaussian integers, eliminated by
/// cross-multiplication against the stored pivot rows, and divided by the
/// integer content of its entries after every step.
pub fn rank<'a>(vectors: impl Iterator<Item = &'a [(usize, GaussianRational)]>) -> usize {
    let mut pivots: HashMap<usize, Vec<(usize, GaussInt)>> = HashMap::new();
    let mut r = 0;
    for v in vectors {
        if v.is_empty() {
            continue;
        }
        let mut row: Vec<(usize, GaussInt)> = clear_denominators(v);
        row.retain(|(_, a)| !a.is_zero());
        row.sort_by_key(|e| e.0);
        normalize(&mut row);
        while let Some((lead, a)) = row.first().cloned() {
            match pivots.get(&lead) {
                Some(p) => {
                    let pa = p[0].1.clone();
                    row = combine(&pa, &row, &a, p);
                    normalize(&mut row);
                }
                None => {
                    pivots.insert(lead, row);
                    r += 1;
                    break;
                }
            }
        }
    }
    r
}

/// `alpha·x − beta·y` on sparse sorted vectors, dropping zeros.
fn combine(alpha: &GaussInt, x: &[(usize, GaussInt)], beta: &GaussInt, y: &[(usize, GaussInt)]) -> Vec<(usize, GaussInt)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        let (idx, val) = if take_x {
            let v = gauss_mul(alpha, &x[i].1);
            i += 1;
            (x[i - 1].0, v)
        } else if take_y {
            let v = -gauss_mul(beta, &y[j].1);
            j += 1;
            (y[j - 1].0, v)
        } else {
            let v = gauss_mul(alpha, &x[i].1) - gauss_mul(beta, &y[j].1);
            i += 1;
            j += 1;
            (x[i - 1].0, v)
        };
        if !val.is_zero() {
            out.push((idx, val));
        }
    }
    out
}

fn normalize(row: &mut [(usize, GaussInt)]) {
    let g: BigInt = gauss_content(row.iter().map(|e| &e.1));
    if !g.is_zero() && !g.is_one() {
        for e in row.iter_mut() {
            e.1 = GaussInt::new(&e.1.re / &g, &e.1.im / &g);
        }
    }
}

/// A complex of free modules with polynomial-matrix differentials.
/// `differentials[k]` maps module `k` to module `k+1`; a periodic complex
/// also has `differentials[last]` mapping the last module back to module 0.
#[derive(Clone, Debug)]
pub struct OperatorComplex {
    pub nvars: usize,
    pub ranks: Vec<usize>,
    pub differentials: Vec<PolyMatrix>,
    pub periodic: bool,
}

impl OperatorComplex {
    pub fn new(nvars: usize, ranks: Vec<usize>, differentials: Vec<PolyMatrix>, periodic: bool) -> Result<Self, LinalgError> {
        let n = ranks.len();
        let expected = if periodic { n } else { n.saturating_sub(1) };
        if differentials.len() != expected {
            return Err(LinalgError::Shape(format!(
                "{} modules need {expected} differentials, got {}",
                n,
                differentials.len()
            )));
        }
        for (k, d) in differentials.iter().enumerate() {
            let (src, dst) = (ranks[k], ranks[(k + 1) % n]);
            if d.cols() != src || d.rows() != dst {
                return Err(LinalgError::Shape(format!(
                    "differential {k} is {}x{}, expected {dst}x{src}",
                    d.rows(),
                    d.cols()
                )));
            }
        }
        Ok(OperatorComplex { nvars, ranks, differentials, periodic })
    }

    /// `d_{k+1} ∘ d_k` for every consecutive pair, computed symbolically.
    pub fn squares(&self) -> Vec<PolyMatrix> {
        (0..self.differentials.len())
            .filter_map(|k| {
                let next = if k + 1 < self.differentials.len() {
                    k + 1
                } else if self.periodic {
                    0
                } else {
                    return None;
                };
                Some(self.differentials[next].mul(&self.differentials[k]).expect("shapes checked"))
            })
            .collect()
    }

    pub fn truncate(&self, cap: u32) -> Result<TruncatedComplex, LinalgError> {
        let maps = self
            .differentials
            .par_iter()
            .map(|d| TruncatedMap::build(d, cap))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TruncatedComplex {
            cap,
            nvars: self.nvars,
            ranks: self.ranks.clone(),
            maps,
            periodic: self.periodic,
        })
    }

    /// Truncated cohomology dimension at every module for one cap.
    pub fn cohomology_dims(&self, cap: u32) -> Result<Vec<usize>, LinalgError> {
        Ok(self.truncate(cap)?.cohomology_dims())
    }
}

/// Finite-dimensional model of an [`OperatorComplex`] at one degree cap.
#[derive(Clone, Debug)]
pub struct TruncatedComplex {
    pub cap: u32,
    pub nvars: usize,
    pub ranks: Vec<usize>,
    pub maps: Vec<TruncatedMap>,
    pub periodic: bool,
}

impl TruncatedComplex {
    fn module_size(&self, k: usize) -> usize {
        self.ranks[k] * Monomial::all_up_to_degree(self.nvars, self.cap).len()
    }

    /// `dim ker(out) − dim(im(in) ∩ V_{≤cap})` at every module.
    ///
    /// The kernel is exact on sources of degree `≤ cap`. The image term is
    /// `rank(in) − rank(in projected above the cap)`, the dimension of the
    /// part of the truncated image that lies inside the truncated module.
    pub fn cohomology_dims(&self) -> Vec<usize> {
        let n = self.ranks.len();
        let ranks: Vec<(usize, usize)> = self
            .maps
            .par_iter()
            .map(|m| (m.rank(), m.rank_above_cap()))
            .collect();
        (0..n)
            .map(|k| {
                let size = self.module_size(k);
                let ker = match (k < self.maps.len()).then_some(k) {
                    Some(o) => size - ranks[o].0,
                    None => size,
                };
                let incoming = if k > 0 {
                    Some(k - 1)
                } else if self.periodic {
                    Some(n - 1)
                } else {
                    None
                };
                let im = incoming.map_or(0, |i| ranks[i].0 - ranks[i].1);
                ker - im
            })
            .collect()
    }

    /// Checks that consecutive truncated maps compose to zero on every
    /// source vector whose image stays within the cap.
    pub fn composition_vanishes(&self) -> bool {
        let n = self.maps.len();
        for k in 0..n {
            let next = if k + 1 < n {
                k + 1
            } else if self.periodic {
                0
            } else {
                continue;
            };
            let (first, second) = (&self.maps[k], &self.maps[next]);
            let src_index: HashMap<&Label, usize> =
                second.source.iter().enumerate().map(|(i, l)| (l, i)).collect();
            for col in &first.columns {
                if col.iter().any(|(r, _)| first.target[*r].1.degree() > self.cap) {
                    continue;
                }
                let mut acc: BTreeMap<usize, GaussianRational> = BTreeMap::new();
                for (r, a) in col {
                    let j = src_index[&first.target[*r]];
                    for (t, b) in &second.columns[j] {
                        *acc.entry(*t).or_insert_with(GaussianRational::zero) += &(a * b);
                    }
                }
                if acc.values().any(|v| !v.is_zero()) {
                    return false;
                }
            }
        }
        true
    }
}
