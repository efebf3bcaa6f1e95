use super::{buchberger, quotient_basis, GroebnerBasis, Ideal, MonomialOrder, Poly, PolyError, QuotientBasis};

/// How the tangent bundle of the (embedded) space is generated.
#[derive(Clone, Debug, PartialEq)]
pub enum FrameSpec {
    /// `X = ℂ^N` with the coordinate frame.
    Affine,
    /// Smooth hypersurface `f = 0` in `ℂ^N`, generated by the fields
    /// `v_ij = (∂_j f) e_i − (∂_i f) e_j`.
    Hypersurface(Poly),
    /// Complete intersection `f_1 = … = f_{N−d} = 0` with explicit tangent
    /// generators, each an `N`-vector of polynomials.
    CompleteIntersection { equations: Vec<Poly>, fields: Vec<Vec<Poly>> },
}

fn check(expected: usize, p: &Poly) -> Result<(), PolyError> {
    if p.nvars() != expected {
        return Err(PolyError::FrameMismatch(format!(
            "polynomial in {} variables, ambient space has {}",
            p.nvars(),
            expected
        )));
    }
    Ok(())
}

/// `∂_v W = Σ_j v^j ∂_j W`
fn directional(field: &[Poly], grad: &[Poly]) -> Poly {
    let n = grad[0].nvars();
    field.iter().zip(grad).fold(Poly::zero(n), |acc, (v, g)| &acc + &(v * g))
}

/// Generators of the critical ideal of `W` restricted to the space described
/// by `frame`. The overall factor `−i` of the contraction is omitted; it
/// does not change the ideal.
pub fn jacobi_ideal(w: &Poly, frame: &FrameSpec) -> Result<Ideal, PolyError> {
    let n = w.nvars();
    let grad: Vec<Poly> = (0..n).map(|i| w.derivative(i)).collect();
    match frame {
        FrameSpec::Affine => Ideal::new(n, grad),
        FrameSpec::Hypersurface(f) => {
            check(n, f)?;
            if n < 2 {
                return Err(PolyError::FrameMismatch("hypersurface frame needs N >= 2".into()));
            }
            let df: Vec<Poly> = (0..n).map(|i| f.derivative(i)).collect();
            let mut gens = vec![f.clone()];
            for i in 0..n {
                for j in i + 1..n {
                    gens.push(&(&grad[i] * &df[j]) - &(&grad[j] * &df[i]));
                }
            }
            Ideal::new(n, gens)
        }
        FrameSpec::CompleteIntersection { equations, fields } => {
            for f in equations {
                check(n, f)?;
            }
            for v in fields {
                if v.len() != n {
                    return Err(PolyError::FrameMismatch(format!(
                        "tangent generator has {} components, ambient space has {}",
                        v.len(),
                        n
                    )));
                }
                for c in v {
                    check(n, c)?;
                }
            }
            let mut gens = equations.clone();
            gens.extend(fields.iter().map(|v| directional(v, &grad)));
            Ideal::new(n, gens)
        }
    }
}

/// Gröbner basis (grevlex) of the critical ideal together with its
/// standard-monomial quotient basis.
pub fn jacobi_quotient(w: &Poly, frame: &FrameSpec, degree_cap: usize) -> Result<(GroebnerBasis, QuotientBasis), PolyError> {
    let ideal = jacobi_ideal(w, frame)?;
    let gb = buchberger(&ideal, &MonomialOrder::grevlex(w.nvars()))?;
    let q = quotient_basis(&gb, degree_cap)?;
    Ok((gb, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::VarNames;

    fn p(s: &str, n: usize) -> Poly {
        Poly::parse(s, &VarNames::indexed(n)).unwrap()
    }

    #[test]
    fn affine_partials() {
        let i = jacobi_ideal(&p("x1^2 + x2^2", 2), &FrameSpec::Affine).unwrap();
        assert_eq!(i.generators(), &[p("2*x1", 2), p("2*x2", 2)]);
        let i = jacobi_ideal(&p("x1^2 + x2*x3", 3), &FrameSpec::Affine).unwrap();
        assert_eq!(i.generators(), &[p("2*x1", 3), p("x3", 3), p("x2", 3)]);
    }

    #[test]
    fn torus_hypersurface() {
        let f = p("x1*x2*x3 - 1", 3);
        let i = jacobi_ideal(&p("x1 + x2 + x3", 3), &FrameSpec::Hypersurface(f.clone())).unwrap();
        let expected = [f, p("x1*x3 - x2*x3", 3), p("x1*x2 - x2*x3", 3), p("x1*x2 - x1*x3", 3)];
        assert_eq!(i.generators(), &expected);
    }

    #[test]
    fn complete_intersection_matches_hypersurface() {
        let f = p("x1*x2*x3 - 1", 3);
        let w = p("x1 + x2 + x3", 3);
        let df: Vec<Poly> = (0..3).map(|i| f.derivative(i)).collect();
        let z = Poly::zero(3);
        let fields = vec![
            vec![df[1].clone(), -&df[0], z.clone()],
            vec![df[2].clone(), z.clone(), -&df[0]],
            vec![z.clone(), df[2].clone(), -&df[1]],
        ];
        let ci = jacobi_ideal(&w, &FrameSpec::CompleteIntersection { equations: vec![f.clone()], fields }).unwrap();
        let hyp = jacobi_ideal(&w, &FrameSpec::Hypersurface(f)).unwrap();
        assert_eq!(ci.generators(), hyp.generators());
    }

    #[test]
    fn quotient_dimensions() {
        let (_, q) = jacobi_quotient(&p("x1^4", 1), &FrameSpec::Affine, 32).unwrap();
        assert_eq!(q.dimension(), Some(3));
        let f = p("x1*x2*x3 - 1", 3);
        let (_, q) = jacobi_quotient(&p("x1 + x2 + x3", 3), &FrameSpec::Hypersurface(f), 32).unwrap();
        assert_eq!(q.dimension(), Some(3));
    }

    #[test]
    fn mismatches_rejected() {
        let w = p("x1 + x2", 2);
        assert!(matches!(
            jacobi_ideal(&w, &FrameSpec::Hypersurface(p("x1", 3))),
            Err(PolyError::FrameMismatch(_))
        ));
        let bad = FrameSpec::CompleteIntersection { equations: vec![], fields: vec![vec![p("1", 2)]] };
        assert!(matches!(jacobi_ideal(&w, &bad), Err(PolyError::FrameMismatch(_))));
    }
}
