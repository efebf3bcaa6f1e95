//! Degree-truncated Koszul complex of the gradient of a superpotential.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{LinalgError, OperatorComplex, PolyMatrix, TruncatedComplex};
use crate::poly::Poly;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KoszulError {
    #[error("superpotential must be non-constant")]
    ConstantPotential,
    #[error("cap {cap} is below the degree {degree} of the superpotential")]
    CapTooSmall { cap: u32, degree: u32 },
    #[error("caps must be strictly increasing")]
    CapsNotIncreasing,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// k-element subsets of `0..d` in lexicographic order.
pub fn subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(i + 1, d, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, k, &mut Vec::new(), &mut out);
    out
}

/// Matrix of contraction `Λ^k → Λ^{k−1}` against `grad`:
/// `e_{i_0…i_{k−1}} ↦ Σ_p (−1)^p grad[i_p] · e_{I∖i_p}`.
pub fn contraction_matrix(grad: &[Poly], k: usize) -> PolyMatrix {
    let d = grad.len();
    let nvars = grad.first().map_or(0, Poly::nvars);
    let src = subsets(d, k);
    let dst = subsets(d, k.saturating_sub(1));
    let index: BTreeMap<&Vec<usize>, usize> = dst.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut m = PolyMatrix::zeros(dst.len(), src.len(), nvars);
    if k == 0 {
        return m;
    }
    for (c, set) in src.iter().enumerate() {
        for (p, &j) in set.iter().enumerate() {
            let mut rest = set.clone();
            rest.remove(p);
            let r = index[&rest];
            let term = if p % 2 == 0 { grad[j].clone() } else { -&grad[j] };
            m.set(r, c, term);
        }
    }
    m
}

/// The Koszul complex `Λ^d → … → Λ^0` of `(∂_1 W, …, ∂_d W)`.
/// Module `k` of the underlying operator complex sits at position `k − d`.
#[derive(Clone, Debug)]
pub struct KoszulComplex {
    pub w: Poly,
    pub complex: OperatorComplex,
}

impl KoszulComplex {
    pub fn new(w: &Poly) -> Result<Self, KoszulError> {
        if w.is_constant() {
            return Err(KoszulError::ConstantPotential);
        }
        let d = w.nvars();
        let grad: Vec<Poly> = (0..d).map(|i| w.derivative(i)).collect();
        let ranks: Vec<usize> = (0..=d).rev().map(|k| subsets(d, k).len()).collect();
        let diffs: Vec<PolyMatrix> = (1..=d).rev().map(|k| contraction_matrix(&grad, k)).collect();
        let complex = OperatorComplex::new(d, ranks, diffs, false)?;
        Ok(KoszulComplex { w: w.clone(), complex })
    }

    pub fn nvars(&self) -> usize {
        self.w.nvars()
    }

    pub fn positions(&self) -> Vec<i32> {
        let d = self.nvars() as i32;
        (-d..=0).collect()
    }

    /// Symbolic `ι_W ∘ ι_W = 0`.
    pub fn squares_vanish(&self) -> bool {
        self.complex.squares().iter().all(PolyMatrix::is_zero)
    }
}

/// Truncated Koszul complex at cap `cap`.
pub fn build_truncated_koszul(w: &Poly, cap: u32) -> Result<TruncatedComplex, KoszulError> {
    let k = KoszulComplex::new(w)?;
    let degree = w.total_degree().unwrap_or(0);
    if cap < degree {
        return Err(KoszulError::CapTooSmall { cap, degree });
    }
    Ok(k.complex.truncate(cap)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KoszulReport {
    pub positions: Vec<i32>,
    pub dims_per_cap: BTreeMap<u32, Vec<usize>>,
    pub stabilized: bool,
    /// Dimensions at the first cap where two consecutive caps agree.
    pub stable_dims: Option<Vec<usize>>,
}

impl KoszulReport {
    pub fn dims_at(&self, position: i32) -> Option<usize> {
        let idx = self.positions.iter().position(|&p| p == position)?;
        self.stable_dims.as_ref().map(|d| d[idx])
    }
}

/// Cohomology dimensions at positions `−d..=0` for every cap. The result is
/// flagged stabilized when two consecutive caps give identical dimensions.
pub fn koszul_cohomology_dims(w: &Poly, caps: &[u32]) -> Result<KoszulReport, KoszulError> {
    if caps.windows(2).any(|p| p[0] >= p[1]) {
        return Err(KoszulError::CapsNotIncreasing);
    }
    let k = KoszulComplex::new(w)?;
    let degree = w.total_degree().unwrap_or(0);
    let mut dims_per_cap = BTreeMap::new();
    let mut previous: Option<Vec<usize>> = None;
    let mut stable = None;
    for &cap in caps {
        if cap < degree {
            return Err(KoszulError::CapTooSmall { cap, degree });
        }
        let dims = k.complex.cohomology_dims(cap)?;
        if stable.is_none() && previous.as_ref() == Some(&dims) {
            stable = Some(dims.clone());
        }
        previous = Some(dims.clone());
        dims_per_cap.insert(cap, dims);
    }
    Ok(KoszulReport {
        positions: k.positions(),
        dims_per_cap,
        stabilized: stable.is_some(),
        stable_dims: stable,
    })
}
