//! Path-sum series for `lambda_n(t)` of the two-mode potential.
//!
//! A path of order `k` is a sequence `(n_1, .., n_k)` in `{-1, 1}^k` whose
//! partial sums `sigma_s` never vanish and whose closing index `-sigma_k` is
//! again `+-1`. Each path contributes
//!
//! ```text
//! q_{n_1} .. q_{n_k} q_{-sigma_k} / prod_s (lambda - (2 pi (n - sigma_s) + t)^2)
//! ```
//!
//! with `q_{-1} = a`, `q_1 = b`. Internally everything is written in the shift
//! `delta = lambda - (2 pi n + t)^2`, where the denominators become
//! `delta + 2 pi sigma (2k - 2 pi sigma)` and lose no digits to cancellation.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{HillError, Result};
use crate::{free_eigenvalue, wavenumber};

/// Hard cap on the half-order `p` (order `k = 2p - 1`).
pub const P_MAX: usize = 12;
/// Tolerance floor for the series sum.
pub const TOL_FLOOR: f64 = 1e-14;
pub const MAX_FIXED_POINT_ITERATIONS: usize = 50;

/// One odd-order term `a_{2p-1}` of the series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTerm {
    pub p: usize,
    pub paths: Vec<Vec<i8>>,
    pub value: Complex64,
    /// `value / (2^{2p-1} (ab)^p)`; `None` when `ab = 0`.
    pub f_value: Option<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub terms_used: usize,
    pub last_term_magnitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRoot {
    pub lambda: Complex64,
    /// `lambda - (2 pi n + t)^2`
    pub shift: Complex64,
    pub iterations: usize,
}

/// True when `path` is admissible: no vanishing partial sum and closing index `+-1`.
pub fn is_valid_path(path: &[i8]) -> bool {
    let mut sigma = 0i64;
    for &step in path {
        sigma += step as i64;
        if sigma == 0 {
            return false;
        }
    }
    sigma.abs() == 1
}

fn enumerate_into(k: usize, prefix: &mut Vec<i8>, sigma: i64, out: &mut Vec<Vec<i8>>) {
    let s = prefix.len();
    if s == k {
        if sigma.abs() == 1 {
            out.push(prefix.clone());
        }
        return;
    }
    for step in [-1i8, 1] {
        let next = sigma + step as i64;
        // a branch that cannot get back to +-1 in the remaining steps contains no valid path
        if next == 0 || next.abs() - 1 > (k - s - 1) as i64 {
            continue;
        }
        prefix.push(step);
        enumerate_into(k, prefix, next, out);
        prefix.pop();
    }
}

/// Admissible paths of order `k`, in lexicographic order (`-1 < 1`).
pub fn valid_paths(k: usize) -> Vec<Vec<i8>> {
    let mut out = Vec::new();
    if k > 0 {
        enumerate_into(k, &mut Vec::with_capacity(k), 0, &mut out);
    }
    out
}

fn cached_paths(k: usize) -> &'static [Vec<i8>] {
    static CACHE: OnceLock<Vec<Vec<Vec<i8>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| (1..=P_MAX).map(|p| valid_paths(2 * p - 1)).collect());
    if k % 2 == 1 && k < 2 * P_MAX {
        &cache[(k - 1) / 2]
    } else {
        &[]
    }
}

/// Denominators `D(sigma)` for `sigma = -k..=k`, in shift form.
fn denominators(n: i64, t: f64, shift: Complex64, k: usize) -> Vec<Complex64> {
    let kk = wavenumber(n, t);
    (-(k as i64)..=k as i64)
        .map(|sigma| {
            let w = 2.0 * PI * sigma as f64;
            shift + w * (2.0 * kk - w)
        })
        .collect()
}

fn path_sum(
    paths: &[Vec<i8>],
    k: usize,
    n: i64,
    t: f64,
    a: Complex64,
    b: Complex64,
    shift: Complex64,
) -> Result<Complex64> {
    let den = denominators(n, t, shift, k);
    let scale = shift.norm().max(1.0) * 1e-15;
    let mut total = Complex64::new(0.0, 0.0);
    for path in paths {
        let mut sigma = 0i64;
        let mut term = Complex64::new(1.0, 0.0);
        for (s, &step) in path.iter().enumerate() {
            sigma += step as i64;
            let d = den[(sigma + k as i64) as usize];
            if d.norm() <= scale {
                return Err(HillError::VanishingDenominator {
                    path: path.iter().map(|&x| x as i64).collect(),
                    step: s + 1,
                });
            }
            term *= if step < 0 { a } else { b };
            term /= d;
        }
        // closing coefficient q_{-sigma_k}
        term *= if sigma > 0 { a } else { b };
        total += term;
    }
    Ok(total)
}

fn check_order(k: usize) -> Result<()> {
    if k == 0 {
        return Err(HillError::InvalidArgument("series order k must be positive".into()));
    }
    if k.is_multiple_of(2) {
        return Err(HillError::EvenOrder(k));
    }
    if k > 2 * P_MAX - 1 {
        return Err(HillError::InvalidArgument(format!(
            "order k={k} exceeds the cap {}",
            2 * P_MAX - 1
        )));
    }
    Ok(())
}

/// `a_k(lambda, t)` as an exact finite path sum; even `k` is rejected.
pub fn a_coefficient(
    k: usize,
    n: i64,
    t: f64,
    a: Complex64,
    b: Complex64,
    lambda: Complex64,
) -> Result<Complex64> {
    a_coefficient_shift(k, n, t, a, b, lambda - free_eigenvalue(n, t))
}

/// As [`a_coefficient`], with `lambda` given by its shift from `(2 pi n + t)^2`.
pub fn a_coefficient_shift(
    k: usize,
    n: i64,
    t: f64,
    a: Complex64,
    b: Complex64,
    shift: Complex64,
) -> Result<Complex64> {
    check_order(k)?;
    path_sum(cached_paths(k), k, n, t, a, b, shift)
}

/// The full term record for half-order `p`, paths included.
pub fn series_term(
    p: usize,
    n: i64,
    t: f64,
    a: Complex64,
    b: Complex64,
    lambda: Complex64,
) -> Result<SeriesTerm> {
    if p == 0 {
        return Err(HillError::InvalidArgument("half-order p must be positive".into()));
    }
    let k = 2 * p - 1;
    check_order(k)?;
    let value = a_coefficient(k, n, t, a, b, lambda)?;
    let ab = a * b;
    let f_value = (ab != Complex64::new(0.0, 0.0))
        .then(|| value / (2f64.powi(k as i32) * ab.powu(p as u32)));
    Ok(SeriesTerm {
        p,
        paths: cached_paths(k).to_vec(),
        value,
        f_value,
    })
}

/// `A(lambda, t, ab) = sum_p a_{2p-1}(lambda, t)`.
pub fn a_series(
    n: i64,
    t: f64,
    a: Complex64,
    b: Complex64,
    lambda: Complex64,
    tol: f64,
) -> Result<SeriesValue> {
    a_series_shift(n, t, a, b, lambda - free_eigenvalue(n, t), tol)
}

pub fn a_series_shift(
    n: i64,
    t: f64,
    a: Complex64,
    b: Complex64,
    shift: Complex64,
    tol: f64,
) -> Result<SeriesValue> {
    if !(tol >= TOL_FLOOR) || !tol.is_finite() {
        return Err(HillError::InvalidArgument(format!(
            "series tolerance must be finite and at least {TOL_FLOOR}, got {tol}"
        )));
    }
    if a * b == Complex64::new(0.0, 0.0) {
        return Ok(SeriesValue {
            value: Complex64::new(0.0, 0.0),
            terms_used: 1,
            last_term_magnitude: 0.0,
        });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut small_run = 0;
    let mut grow_run = 0;
    let mut prev_mag = f64::INFINITY;
    let mut last = 0.0;
    let mut used = 0;
    for p in 1..=P_MAX {
        let k = 2 * p - 1;
        let term = path_sum(cached_paths(k), k, n, t, a, b, shift)?;
        sum += term;
        used = p;
        last = term.norm();
        if last > prev_mag {
            grow_run += 1;
            if grow_run >= 3 {
                return Err(HillError::SeriesDiverging { last });
            }
        } else {
            grow_run = 0;
        }
        prev_mag = last;
        if last < tol * sum.norm().max(1.0) {
            small_run += 1;
            if small_run >= 2 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    Ok(SeriesValue {
        value: sum,
        terms_used: used,
        last_term_magnitude: last,
    })
}

/// Whether `(n, t)` lies in the region where the series root is attempted.
pub fn in_validity_region(n: i64, t: f64) -> bool {
    n.abs() >= 5 && (0.1..=PI - 0.1).contains(&t)
}

/// `lambda_n(t)` as the fixed point of `delta = A((2 pi n + t)^2 + delta)`
/// started from `delta = 0`; every iterate must stay in `|delta| <= 1`.
pub fn eigenvalue_by_series(
    n: i64,
    t: f64,
    a: Complex64,
    b: Complex64,
    tol: f64,
) -> Result<SeriesRoot> {
    let k2 = free_eigenvalue(n, t);
    let zero = Complex64::new(0.0, 0.0);
    if a * b == zero {
        return Ok(SeriesRoot {
            lambda: Complex64::new(k2, 0.0),
            shift: zero,
            iterations: 0,
        });
    }
    if !(tol > 0.0) {
        return Err(HillError::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if !in_validity_region(n, t) {
        return Err(HillError::OutsideValidity { n, t });
    }
    let series_tol = (tol * 1e-2).max(TOL_FLOOR);
    let mut shift = zero;
    for it in 1..=MAX_FIXED_POINT_ITERATIONS {
        let next = a_series_shift(n, t, a, b, shift, series_tol)?.value;
        if next.norm() > 1.0 {
            return Err(HillError::LeftDisk {
                distance: next.norm(),
            });
        }
        let step = (next - shift).norm();
        shift = next;
        if step < tol {
            return Ok(SeriesRoot {
                lambda: k2 + shift,
                shift,
                iterations: it,
            });
        }
    }
    Err(HillError::NonConvergence {
        what: format!("series fixed point for n={n}"),
        iterations: MAX_FIXED_POINT_ITERATIONS,
    })
}

/// `(2 pi n + t)^2 + ab / (2 (2 pi n + t)^2)`.
pub fn asymptotic_eigenvalue(n: i64, t: f64, ab: Complex64) -> Result<Complex64> {
    let k2 = free_eigenvalue(n, t);
    if k2 == 0.0 {
        return Err(HillError::InvalidArgument(
            "asymptotic form undefined at 2 pi n + t = 0".into(),
        ));
    }
    Ok(k2 + ab / (2.0 * k2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{all_eigenvalues, build_matrix};
    use crate::potential::{make_mathieu, QuasiProblem};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn brute_force(k: usize) -> Vec<Vec<i8>> {
        (0u32..(1 << k))
            .map(|bits| {
                (0..k)
                    .map(|i| if bits >> (k - 1 - i) & 1 == 1 { 1 } else { -1 })
                    .collect::<Vec<i8>>()
            })
            .filter(|p| is_valid_path(p))
            .collect()
    }

    fn catalan(m: u64) -> u64 {
        (0..m).fold(1, |c, i| c * 2 * (2 * i + 1) / (i + 2))
    }

    #[test]
    fn path_census() {
        assert_eq!(valid_paths(1), vec![vec![-1], vec![1]]);
        assert_eq!(valid_paths(3), vec![vec![-1, -1, 1], vec![1, 1, -1]]);
        for k in 1..=15 {
            assert_eq!(valid_paths(k), brute_force(k), "k={k}");
        }
        for p in 1..=P_MAX {
            assert_eq!(cached_paths(2 * p - 1).len() as u64, 2 * catalan(p as u64 - 1));
        }
        for k in [2, 4, 6] {
            assert!(valid_paths(k).is_empty());
        }
    }

    #[test]
    fn paths_balance_signs() {
        for p in 1..=6 {
            for path in valid_paths(2 * p - 1) {
                let sigma: i64 = path.iter().map(|&x| x as i64).sum();
                let plus = path.iter().filter(|&&x| x == 1).count() + usize::from(-sigma == 1);
                assert_eq!(plus, p);
            }
        }
    }

    #[test]
    fn first_order_hand_value() {
        let t = PI / 2.0;
        let lam = c(free_eigenvalue(1, t), 0.0);
        let v = a_coefficient(1, 1, t, c(1.0, 0.0), c(1.0, 0.0), lam).unwrap();
        let hand = 1.0 / ((2.5 * PI).powi(2) - (0.5 * PI).powi(2))
            + 1.0 / ((2.5 * PI).powi(2) - (4.5 * PI).powi(2));
        assert!((v - hand).norm() < 1e-15);
        assert!((v.re - 0.009649636537365502).abs() < 1e-15);
    }

    #[test]
    fn even_and_zero_orders_rejected() {
        let lam = c(100.0, 0.0);
        for k in [2, 4, 10] {
            assert_eq!(
                a_coefficient(k, 5, 1.0, c(1.0, 0.0), c(1.0, 0.0), lam),
                Err(HillError::EvenOrder(k))
            );
        }
        assert!(a_coefficient(0, 5, 1.0, c(1.0, 0.0), c(1.0, 0.0), lam).is_err());
        assert!(a_coefficient(25, 5, 1.0, c(1.0, 0.0), c(1.0, 0.0), lam).is_err());
    }

    #[test]
    fn ab_only_dependence() {
        let t = 1.3;
        let lam = c(free_eigenvalue(7, t) + 0.2, -0.1);
        for k in [1, 3, 5, 7] {
            let x = a_coefficient(k, 7, t, c(2.0, 0.0), c(3.0, 0.0), lam).unwrap();
            let y = a_coefficient(k, 7, t, c(6.0, 0.0), c(1.0, 0.0), lam).unwrap();
            assert!((x - y).norm() <= 1e-13 * x.norm());
        }
        let x = a_series(10, PI / 2.0, c(2.0, 0.0), c(3.0, 0.0), c(free_eigenvalue(10, PI / 2.0), 0.0), 1e-14)
            .unwrap();
        let y = a_series(10, PI / 2.0, c(6.0, 0.0), c(1.0, 0.0), c(free_eigenvalue(10, PI / 2.0), 0.0), 1e-14)
            .unwrap();
        assert!((x.value - y.value).norm() < 1e-13);
    }

    #[test]
    fn vanishing_denominator_reported() {
        // shift equal to -2 pi (2k - 2 pi) kills the sigma = 1 denominator
        let (n, t) = (3, 1.0);
        let kk = wavenumber(n, t);
        let shift = c(-2.0 * PI * (2.0 * kk - 2.0 * PI), 0.0);
        let err = a_coefficient_shift(1, n, t, c(1.0, 0.0), c(1.0, 0.0), shift).unwrap_err();
        assert_eq!(
            err,
            HillError::VanishingDenominator {
                path: vec![1],
                step: 1
            }
        );
    }

    #[test]
    fn series_trivial_and_leading_term() {
        let t = PI / 2.0;
        let lam = c(free_eigenvalue(10, t), 0.0);
        let v = a_series(10, t, c(0.0, 0.0), c(3.0, 0.0), lam, 1e-12).unwrap();
        assert_eq!((v.value, v.terms_used), (c(0.0, 0.0), 1));

        let v = a_series(10, t, c(2.0, 0.0), c(3.0, 0.0), lam, 1e-14).unwrap();
        let a1 = a_coefficient(1, 10, t, c(2.0, 0.0), c(3.0, 0.0), lam).unwrap();
        let a3 = a_coefficient(3, 10, t, c(2.0, 0.0), c(3.0, 0.0), lam).unwrap();
        assert!((v.value - a1).norm() <= 2.0 * a3.norm());
        let leading = 6.0 / (2.0 * free_eigenvalue(10, t));
        assert!((a1.re - leading).abs() < 0.01 * leading);
        assert!(v.last_term_magnitude < 1e-14 * v.value.norm().max(1.0));
        assert!(a_series(10, t, c(2.0, 0.0), c(3.0, 0.0), lam, 1e-16).is_err());
    }

    #[test]
    fn decay_of_successive_terms() {
        let t = PI / 2.0;
        let lam = c(free_eigenvalue(10, t), 0.0);
        let ab = [c(10.0, 0.0), c(0.0, 10.0), c(-7.0, 7.0)];
        for &s in &ab {
            let mut prev = f64::INFINITY;
            for p in 1..=6 {
                let v = a_coefficient(2 * p - 1, 10, t, s, c(1.0, 0.0), lam).unwrap().norm();
                assert!(v < prev);
                prev = v;
            }
        }
    }

    #[test]
    fn series_root_against_matrix() {
        let t = PI / 2.0;
        let root = eigenvalue_by_series(10, t, c(2.0, 0.0), c(3.0, 0.0), 1e-13).unwrap();
        let prob = QuasiProblem::new(make_mathieu(c(2.0, 0.0), c(3.0, 0.0)), t).unwrap();
        let m = all_eigenvalues(&build_matrix(&prob, 100).unwrap()).unwrap();
        assert!((root.lambda - m.lambda(10).unwrap()).norm() < 1e-8);
        assert!(root.shift.norm() <= 1.0);
        let other = eigenvalue_by_series(10, t, c(6.0, 0.0), c(1.0, 0.0), 1e-13).unwrap();
        assert!((root.lambda - other.lambda).norm() < 1e-10);
    }

    #[test]
    fn series_root_edge_cases() {
        let r = eigenvalue_by_series(2, 0.0, c(0.0, 0.0), c(0.0, 0.0), 1e-12).unwrap();
        assert_eq!(r.lambda, c(free_eigenvalue(2, 0.0), 0.0));
        assert_eq!(
            eigenvalue_by_series(4, 1.0, c(1.0, 0.0), c(1.0, 0.0), 1e-12),
            Err(HillError::OutsideValidity { n: 4, t: 1.0 })
        );
        assert!(eigenvalue_by_series(10, 0.05, c(1.0, 0.0), c(1.0, 0.0), 1e-12).is_err());
        assert!(eigenvalue_by_series(10, 3.1, c(1.0, 0.0), c(1.0, 0.0), 1e-12).is_err());
        // a huge coupling at modest n pushes the first iterate outside the unit disk
        assert!(matches!(
            eigenvalue_by_series(5, 1.5, c(2000.0, 0.0), c(2000.0, 0.0), 1e-12),
            Err(HillError::LeftDisk { .. }) | Err(HillError::SeriesDiverging { .. })
        ));
    }

    #[test]
    fn asymptotic_form() {
        let t = PI / 2.0;
        let k2 = free_eigenvalue(10, t);
        assert_eq!(asymptotic_eigenvalue(10, t, c(0.0, 0.0)).unwrap(), c(k2, 0.0));
        let v = asymptotic_eigenvalue(10, t, c(6.0, 0.0)).unwrap();
        assert!((v - (k2 + 3.0 / k2)).norm() < 1e-12);
        assert!(asymptotic_eigenvalue(0, 0.0, c(1.0, 0.0)).is_err());
        assert!(asymptotic_eigenvalue(0, 1.0, c(1.0, 0.0)).is_ok());
    }

    #[test]
    fn series_term_normalization() {
        let t = 1.0;
        let lam = c(free_eigenvalue(8, t), 0.0);
        let term = series_term(2, 8, t, c(2.0, 0.0), c(3.0, 0.0), lam).unwrap();
        assert_eq!(term.paths.len(), 2);
        let f = term.f_value.unwrap();
        assert!((f * 8.0 * 36.0 - term.value).norm() < 1e-15 * term.value.norm().max(1e-300));
        let zero = series_term(2, 8, t, c(0.0, 0.0), c(3.0, 0.0), lam).unwrap();
        assert_eq!(zero.f_value, None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn factorization(
            p in 1usize..=4,
            n in prop_oneof![-30i64..=-5, 5i64..=30],
            t in 0.1f64..(PI - 0.1),
            are in -3.0f64..3.0, aim in -3.0f64..3.0,
            bre in -3.0f64..3.0, bim in -3.0f64..3.0,
            sre in -0.9f64..0.9, sim in -0.4f64..0.4,
        ) {
            let (a, b) = (c(are, aim), c(bre, bim));
            let shift = c(sre, sim);
            let k = 2 * p - 1;
            let full = a_coefficient_shift(k, n, t, a, b, shift).unwrap();
            let unit = a_coefficient_shift(k, n, t, c(1.0, 0.0), c(1.0, 0.0), shift).unwrap();
            let expect = (a * b).powu(p as u32) * unit;
            prop_assert!((full - expect).norm() <= 1e-12 * expect.norm().max(1e-300));
        }

        #[test]
        fn root_stays_in_disk(
            n in prop_oneof![-25i64..=-5, 5i64..=25],
            t in 0.1f64..(PI - 0.1),
            sre in -8.0f64..8.0, sim in -8.0f64..8.0,
        ) {
            let root = eigenvalue_by_series(n, t, c(sre, sim), c(1.0, 0.0), 1e-12).unwrap();
            prop_assert!(root.shift.norm() <= 1.0);
            prop_assert!((root.lambda - free_eigenvalue(n, t)).norm() <= 1.0);
        }
    }
}
