//! Koszul cohomology against Gröbner quotients and under coordinate changes.

use proptest::prelude::*;

use lg_core::expr::VarNames;
use lg_core::koszul::koszul_cohomology_dims;
use lg_core::poly::{jacobi_quotient, FrameSpec, Poly};

fn p(s: &str, n: usize) -> Poly {
    Poly::parse(s, &VarNames::indexed(n)).unwrap()
}

fn stable(w: &Poly) -> Vec<usize> {
    let d = w.total_degree().unwrap();
    koszul_cohomology_dims(w, &[2 * d, 2 * d + 1, 2 * d + 2]).unwrap().stable_dims.expect("stabilizes")
}

fn jacobi(w: &Poly) -> usize {
    jacobi_quotient(w, &FrameSpec::Affine, 64).unwrap().1.dimension().unwrap()
}

#[test]
fn exact_resolution_for_isolated_singularities() {
    for (s, n) in [("x1^2*x2 + x2^4", 2), ("x1^5 + x2^3", 2), ("x1^2 + x2^2 + x3^3", 3)] {
        let w = p(s, n);
        let dims = stable(&w);
        assert!(dims[..n].iter().all(|&d| d == 0), "{s}: {dims:?}");
        assert_eq!(dims[n], jacobi(&w), "{s}");
    }
}

#[test]
fn non_isolated_critical_locus_has_higher_cohomology() {
    // critical locus of x1^2 x2^2 contains both axes
    let w = p("x1^2*x2^2", 2);
    let d = w.total_degree().unwrap();
    let r = koszul_cohomology_dims(&w, &[d, d + 2, d + 4]).unwrap();
    let last = r.dims_per_cap.values().last().unwrap();
    assert!(last[0] + last[1] > 0);
    assert!(!jacobi_quotient(&w, &FrameSpec::Affine, 64).unwrap().1.is_finite());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Diagonal rescaling `x_i -> c_i x_i` and swapping variables leave the
    /// dimensions unchanged.
    #[test]
    fn invariant_under_scaling_and_swap(a in 2u32..5, b in 2u32..5, c1 in 1i64..4, c2 in 1i64..4) {
        let w = p(&format!("x1^{a} + x2^{b}"), 2);
        let base = stable(&w);
        prop_assert_eq!(base[2], ((a - 1) * (b - 1)) as usize);
        let scaled = w.substitute(&[p(&format!("{c1}*x1"), 2), p(&format!("{c2}*x2"), 2)]);
        prop_assert_eq!(stable(&scaled), base.clone());
        let swapped = w.substitute(&[p("x2", 2), p("x1", 2)]);
        prop_assert_eq!(stable(&swapped), base);
    }
}
