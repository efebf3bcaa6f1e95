use serde::Serialize;

use super::{GroebnerBasis, Monomial, PolyError};

/// Standard-monomial basis of `R/I`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum QuotientBasis {
    Finite { standard_monomials: Vec<Vec<u32>> },
    Infinite,
}

impl QuotientBasis {
    pub fn dimension(&self) -> Option<usize> {
        match self {
            QuotientBasis::Finite { standard_monomials } => Some(standard_monomials.len()),
            QuotientBasis::Infinite => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, QuotientBasis::Finite { .. })
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        match self {
            QuotientBasis::Finite { standard_monomials } => {
                standard_monomials.iter().cloned().map(Monomial::new).collect()
            }
            QuotientBasis::Infinite => Vec::new(),
        }
    }
}

/// Enumerates standard monomials degree by degree.
///
/// The quotient is infinite exactly when some variable has no pure power
/// among the leading monomials. Otherwise enumeration stops at the first
/// empty degree level; reaching `degree_cap` with a non-empty level is
/// reported as inconclusive.
pub fn quotient_basis(gb: &GroebnerBasis, degree_cap: usize) -> Result<QuotientBasis, PolyError> {
    let n = gb.nvars();
    let lms = gb.leading_monomials();
    let mut has_pure = vec![false; n];
    for lm in lms {
        if let Some(v) = lm.pure_power_var() {
            has_pure[v] = true;
        }
    }
    if gb.is_unit_ideal() {
        return Ok(QuotientBasis::Finite { standard_monomials: Vec::new() });
    }
    if has_pure.iter().any(|h| !h) {
        return Ok(QuotientBasis::Infinite);
    }
    let mut out = Vec::new();
    for deg in 0..=degree_cap {
        let level: Vec<Monomial> = Monomial::all_of_degree(n, deg as u32)
            .into_iter()
            .filter(|m| !lms.iter().any(|lm| lm.divides(m)))
            .collect();
        if level.is_empty() {
            return Ok(QuotientBasis::Finite { standard_monomials: out });
        }
        let mut level = level;
        level.sort_by(|a, b| gb.order().cmp(a, b));
        out.extend(level.into_iter().map(|m| m.exps().to_vec()));
    }
    Err(PolyError::Inconclusive(degree_cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::VarNames;
    use crate::poly::{buchberger, Ideal, MonomialOrder, Poly};

    fn gb_of(gens: &[&str], n: usize) -> GroebnerBasis {
        let names = VarNames::indexed(n);
        let ideal = Ideal::new(n, gens.iter().map(|g| Poly::parse(g, &names).unwrap()).collect()).unwrap();
        buchberger(&ideal, &MonomialOrder::grevlex(n)).unwrap()
    }

    #[test]
    fn univariate_power() {
        let q = quotient_basis(&gb_of(&["3*x1^2"], 1), 20).unwrap();
        assert_eq!(q, QuotientBasis::Finite { standard_monomials: vec![vec![0], vec![1]] });
    }

    #[test]
    fn three_variable_staircase() {
        let q = quotient_basis(&gb_of(&["4*x1^3", "x3", "x2"], 3), 20).unwrap();
        assert_eq!(q.dimension(), Some(3));
        assert_eq!(q.monomials()[2], Monomial::new(vec![2, 0, 0]));
    }

    #[test]
    fn infinite_and_inconclusive() {
        assert_eq!(quotient_basis(&gb_of(&["x1^2"], 2), 20).unwrap(), QuotientBasis::Infinite);
        assert_eq!(
            quotient_basis(&gb_of(&["x1^5", "x2^5"], 2), 3),
            Err(PolyError::Inconclusive(3))
        );
    }

    #[test]
    fn unit_ideal_is_zero_dimensional() {
        assert_eq!(quotient_basis(&gb_of(&["x1 - 1", "x1"], 1), 5).unwrap().dimension(), Some(0));
    }
}
