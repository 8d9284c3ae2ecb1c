//! Recovery of the product `ab` from eigenvalues of `H_t(a, b)`.
//!
//! Each eigenvalue gives `estimate_n = (lambda_n - (2 pi n + t)^2) 2 (2 pi n + t)^2`,
//! which tends to `ab`. The estimates are fitted by least squares to
//! `ab + c_1 / nu + c_2 / nu^2` with `nu = |2 pi n + t| / (2 pi)` and the
//! constant term is returned. Only the product is recoverable: `(a, b)` and
//! `(c, d)` with `ab = cd` have the same spectrum.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{HillError, Result};
use crate::spectrum::SpectrumSlice;
use crate::{free_eigenvalue, wavenumber};

/// Minimum number of distinct indices.
pub const MIN_ENTRIES: usize = 4;
/// Successive differences below this (relative to the estimate) are treated as converged noise.
pub const NOISE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryResult {
    pub ab_estimate: Complex64,
    /// `(n, estimate_n)` in order of increasing `|2 pi n + t|`
    pub convergence_sequence: Vec<(i64, Complex64)>,
    /// false when too few distinct `|2 pi n + t|` were available for the fit
    pub extrapolated: bool,
    /// slope of `log|estimate_n - ab_estimate|` against `log nu`
    pub residual_decay_exponent: Option<f64>,
    /// `t = pi` uses the same limit expression as `0 < t < pi`
    pub boundary_reading: bool,
}

/// From absolute eigenvalues `(n, lambda_n)`.
pub fn recover_ab(eigs: &[(i64, Complex64)], t: f64) -> Result<RecoveryResult> {
    let shifts: Vec<(i64, Complex64)> = eigs
        .iter()
        .map(|&(n, lam)| (n, lam - free_eigenvalue(n, t)))
        .collect();
    recover_ab_from_shifts(&shifts, t)
}

pub fn recover_ab_from_slice(slice: &SpectrumSlice) -> Result<RecoveryResult> {
    let eigs: Vec<(i64, Complex64)> = slice.entries.iter().map(|e| (e.n, e.lambda)).collect();
    recover_ab(&eigs, slice.t)
}

/// From shifts `(n, lambda_n - (2 pi n + t)^2)`. Large eigenvalues carry
/// their shift in the last few digits, so data produced in shift form
/// avoids the cancellation in `lambda_n - (2 pi n + t)^2`.
pub fn recover_ab_from_shifts(shifts: &[(i64, Complex64)], t: f64) -> Result<RecoveryResult> {
    if !t.is_finite() {
        return Err(HillError::NonFinite(format!("t = {t}")));
    }
    if !(0.0..=PI).contains(&t) {
        return Err(HillError::InvalidArgument(format!("t={t} must lie in [0, pi]")));
    }
    let mut rows: Vec<(i64, f64, Complex64)> = Vec::new();
    for &(n, shift) in shifts {
        if !(shift.re.is_finite() && shift.im.is_finite()) {
            return Err(HillError::NonFinite(format!("eigenvalue for n={n}")));
        }
        let k = wavenumber(n, t);
        if k == 0.0 {
            // t = 0, n = 0 carries no information about ab
            continue;
        }
        if rows.iter().any(|r| r.0 == n) {
            return Err(HillError::InvalidArgument(format!("duplicate index n={n}")));
        }
        rows.push((n, k.abs() / (2.0 * PI), shift * 2.0 * k * k));
    }
    if rows.len() < MIN_ENTRIES {
        return Err(HillError::InsufficientData(format!(
            "{} usable entries, need at least {MIN_ENTRIES} with distinct n",
            rows.len()
        )));
    }
    rows.sort_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
    check_cauchy(&rows)?;

    let mut nus: Vec<f64> = rows.iter().map(|r| r.1).collect();
    nus.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    let (ab, extrapolated) = if nus.len() >= 3 {
        (fit_constant(&rows)?, true)
    } else {
        // not enough distinct abscissae: average the estimates at the largest nu
        let top = rows.last().map(|r| r.1).unwrap_or(0.0);
        let tail: Vec<Complex64> = rows
            .iter()
            .filter(|r| (r.1 - top).abs() <= 1e-12 * top)
            .map(|r| r.2)
            .collect();
        (tail.iter().sum::<Complex64>() / tail.len() as f64, false)
    };
    let decay: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.1.ln(), (r.2 - ab).norm()))
        .filter(|&(_, d)| d > 0.0)
        .map(|(x, d)| (x, d.ln()))
        .collect();
    Ok(RecoveryResult {
        ab_estimate: ab,
        convergence_sequence: rows.iter().map(|r| (r.0, r.2)).collect(),
        extrapolated,
        residual_decay_exponent: if decay.len() >= 3 {
            crate::gaps::fit_slope(&decay)
        } else {
            None
        },
        boundary_reading: t == PI,
    })
}

/// Fails when the last three successive differences strictly grow above the noise floor.
fn check_cauchy(rows: &[(i64, f64, Complex64)]) -> Result<()> {
    if rows.len() < 4 {
        return Ok(());
    }
    let diffs: Vec<f64> = rows.windows(2).map(|w| (w[1].2 - w[0].2).norm()).collect();
    let last = &diffs[diffs.len() - 3..];
    let scale = rows.last().map_or(1.0, |r| r.2.norm().max(1.0));
    if last[0] < last[1] && last[1] < last[2] && last[2] > NOISE_FLOOR * scale {
        return Err(HillError::NoisyData(format!(
            "last successive differences {:.3e}, {:.3e}, {:.3e} increase",
            last[0], last[1], last[2]
        )));
    }
    Ok(())
}

/// Constant term of the least-squares fit to `1, 1/nu, 1/nu^2`, real and imaginary parts together.
fn fit_constant(rows: &[(i64, f64, Complex64)]) -> Result<Complex64> {
    let m = rows.len();
    let design = DMatrix::from_fn(m, 3, |i, j| rows[i].1.powi(-(j as i32)));
    let rhs = DMatrix::from_fn(m, 2, |i, j| if j == 0 { rows[i].2.re } else { rows[i].2.im });
    let sol = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| HillError::InsufficientData(format!("least squares failed: {e}")))?;
    Ok(Complex64::new(sol[(0, 0)], sol[(0, 1)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{all_eigenvalues, build_matrix};
    use crate::potential::{make_mathieu, QuasiProblem};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn model(ab: Complex64, t: f64, ns: impl Iterator<Item = i64>) -> Vec<(i64, Complex64)> {
        ns.map(|n| (n, ab / (2.0 * free_eigenvalue(n, t)))).collect()
    }

    #[test]
    fn free_data_gives_zero() {
        let eigs: Vec<(i64, Complex64)> = (10..=20).map(|n| (n, c(free_eigenvalue(n, 1.0), 0.0))).collect();
        let r = recover_ab(&eigs, 1.0).unwrap();
        assert_eq!(r.ab_estimate, c(0.0, 0.0));
        assert!(r.extrapolated);
    }

    #[test]
    fn model_data_exact_in_shift_form() {
        let r = recover_ab_from_shifts(&model(c(6.0, 0.0), 1.0, 10..=20), 1.0).unwrap();
        assert!((r.ab_estimate - 6.0).norm() < 1e-10);
        let r = recover_ab_from_shifts(&model(c(-1.5, 2.5), 2.0, [-30, -12, 5, 9, 40].into_iter()), 2.0)
            .unwrap();
        assert!((r.ab_estimate - c(-1.5, 2.5)).norm() < 1e-10);
    }

    #[test]
    fn model_data_in_absolute_form_is_limited_by_rounding() {
        let eigs: Vec<(i64, Complex64)> = model(c(6.0, 0.0), 1.0, 10..=20)
            .into_iter()
            .map(|(n, s)| (n, free_eigenvalue(n, 1.0) + s))
            .collect();
        let r = recover_ab(&eigs, 1.0).unwrap();
        // the shift sits ~15 digits below lambda; what survives is ~1e-7 after scaling by 2 k^2
        assert!((r.ab_estimate - 6.0).norm() < 1e-5);
    }

    #[test]
    fn matrix_pipeline() {
        let prob = QuasiProblem::new(make_mathieu(c(2.0, 0.0), c(3.0, 0.0)), 1.0).unwrap();
        let slice = all_eigenvalues(&build_matrix(&prob, 70).unwrap()).unwrap();
        let r = recover_ab_from_slice(&slice.restrict(10, 40)).unwrap();
        assert!((r.ab_estimate - 6.0).norm() < 6e-3, "{}", r.ab_estimate);
        assert!(r.residual_decay_exponent.unwrap() <= -1.0);

        let prob2 = QuasiProblem::new(make_mathieu(c(6.0, 0.0), c(1.0, 0.0)), 1.0).unwrap();
        let slice2 = all_eigenvalues(&build_matrix(&prob2, 70).unwrap()).unwrap();
        let r2 = recover_ab_from_slice(&slice2.restrict(10, 40)).unwrap();
        assert!((r.ab_estimate - r2.ab_estimate).norm() < 1e-6);
    }

    #[test]
    fn zero_quasimomentum_skips_n0() {
        let mut data = model(c(2.0, 0.0), 0.0, [-9, -7, 6, 8, 11].into_iter());
        data.push((0, c(0.3, 0.0)));
        let r = recover_ab_from_shifts(&data, 0.0).unwrap();
        assert!((r.ab_estimate - 2.0).norm() < 1e-10);
        assert!(r.convergence_sequence.iter().all(|e| e.0 != 0));
        assert!(!r.boundary_reading);
    }

    #[test]
    fn mirrored_indices_fall_back_to_averaging() {
        let r = recover_ab_from_shifts(&model(c(1.0, 0.0), 0.0, [-6, -5, 5, 6].into_iter()), 0.0).unwrap();
        assert!(!r.extrapolated);
        assert!((r.ab_estimate - 1.0).norm() < 1e-12);
    }

    #[test]
    fn boundary_flag() {
        let r = recover_ab_from_shifts(&model(c(1.0, 0.0), PI, 5..=9), PI).unwrap();
        assert!(r.boundary_reading);
        assert!((r.ab_estimate - 1.0).norm() < 1e-10);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            recover_ab_from_shifts(&model(c(1.0, 0.0), 1.0, 10..=12), 1.0),
            Err(HillError::InsufficientData(_))
        ));
        assert!(recover_ab_from_shifts(&model(c(1.0, 0.0), 1.0, 10..=15), -0.5).is_err());
        let mut dup = model(c(1.0, 0.0), 1.0, 10..=15);
        dup.push(dup[0]);
        assert!(recover_ab_from_shifts(&dup, 1.0).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let noisy: Vec<(i64, Complex64)> = model(c(6.0, 0.0), 1.0, 10..=20)
            .into_iter()
            .enumerate()
            .map(|(i, (n, s))| {
                let k2 = free_eigenvalue(n, 1.0);
                // noise growing with n, as from an eigensolver losing digits
                let e = rng.gen_range(0.5..1.0) * 1e-3 * (i as f64).powi(3) / k2;
                (n, s + if i % 2 == 0 { e } else { -e })
            })
            .collect();
        assert!(matches!(
            recover_ab_from_shifts(&noisy, 1.0),
            Err(HillError::NoisyData(_))
        ));
    }
}
