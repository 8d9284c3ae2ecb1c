use hillspec::floquet::eigenvalue_by_discriminant;
use hillspec::matrix::{all_eigenvalues, build_matrix};
use hillspec::perturbation::eigenvalue_by_series;
use hillspec::potential::make_mathieu;
use hillspec::{Complex64, QuasiProblem};
use proptest::prelude::*;

fn arb_complex(r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..r, -std::f64::consts::PI..std::f64::consts::PI).prop_map(|(m, p)| Complex64::from_polar(m, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn three_methods_agree(a in arb_complex(2.0), b in arb_complex(2.0), t in 0.3f64..2.8, n in 5i64..12) {
        let prob = QuasiProblem::new(make_mathieu(a, b), t).unwrap();
        let matrix = all_eigenvalues(&build_matrix(&prob, 40).unwrap()).unwrap().lambda(n).unwrap();
        let floquet = eigenvalue_by_discriminant(&prob, n).unwrap().lambda;
        let series = eigenvalue_by_series(n, t, a, b, 1e-12).unwrap().lambda;
        prop_assert!((floquet - matrix).norm() < 1e-7, "floquet {} matrix {}", floquet, matrix);
        prop_assert!((series - matrix).norm() < 1e-8, "series {} matrix {}", series, matrix);
    }

    #[test]
    fn eigenvalue_sum_is_trace(a in arb_complex(3.0), b in arb_complex(3.0), t in -3.0f64..3.0) {
        // off-diagonal couplings leave the trace equal to the sum of the diagonal
        let prob = QuasiProblem::new(make_mathieu(a, b), t).unwrap();
        let m = build_matrix(&prob, 12).unwrap();
        let sum: Complex64 = all_eigenvalues(&m).unwrap().entries.iter().map(|e| e.lambda).sum();
        let trace: Complex64 = m.diag.iter().sum();
        prop_assert!((sum - trace).norm() < 1e-9 * trace.norm());
    }
}
