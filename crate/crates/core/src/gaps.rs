//! Periodic/antiperiodic gaps `lambda_n^+ - lambda_n^-` of
//! `-y'' + (a e^{-2ix} + b e^{2ix}) y` on period `pi`, against
//!
//! ```text
//! |gap| ~ 8 |ab|^{n/2} 4^{-n} ((n-1)!)^{-2} |1 - ab / (4 n^3)|.
//! ```
//!
//! Only magnitudes are compared; the sign and the branch of `(ab)^{n/2}` are
//! left open, and the phase of the computed gap is reported as data.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{HillError, Result};
use crate::matrix::periodic_pair;

pub const N_MAX: u32 = 6;
pub const AB_MAX: f64 = 10.0;
/// Gaps below this are not trusted from a subtraction of O(n^2) eigenvalues.
pub const MIN_TRUSTED_GAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub n: u32,
    pub a: Complex64,
    pub b: Complex64,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub gap_computed: Complex64,
    pub gap_predicted_magnitude: f64,
    pub correction_factor: Complex64,
    /// `None` when `ab = 0` and both sides vanish
    pub ratio: Option<f64>,
    pub phase: f64,
    /// `n = 1` is outside the regime the asymptotic is meant for
    pub asymptotic_questionable: bool,
}

/// `8 |ab|^{n/2} 4^{-n} / ((n-1)!)^2`.
pub fn predicted_magnitude(ab: Complex64, n: u32) -> f64 {
    let fact: f64 = (1..n).map(f64::from).product();
    8.0 * ab.norm().powf(n as f64 / 2.0) * 4f64.powi(-(n as i32)) / (fact * fact)
}

pub fn gap(a: Complex64, b: Complex64, n: u32) -> Result<GapReport> {
    if !(1..=N_MAX).contains(&n) {
        return Err(HillError::InvalidArgument(format!("gap index n={n} outside 1..={N_MAX}")));
    }
    let ab = a * b;
    if !(ab.norm() <= AB_MAX) {
        return Err(HillError::InvalidArgument(format!("|ab|={} exceeds {AB_MAX}", ab.norm())));
    }
    let (plus, minus) = periodic_pair(a, b, n, n as usize + 30)?;
    let g = plus - minus;
    let zero = Complex64::new(0.0, 0.0);
    if ab != zero && g.norm() < MIN_TRUSTED_GAP {
        return Err(HillError::PrecisionLoss { gap: g.norm() });
    }
    let predicted = predicted_magnitude(ab, n);
    let correction = 1.0 - ab / (4.0 * f64::from(n).powi(3));
    let ratio = (ab != zero).then(|| g.norm() / (predicted * correction.norm()));
    Ok(GapReport {
        n,
        a,
        b,
        lambda_plus: plus,
        lambda_minus: minus,
        gap_computed: g,
        gap_predicted_magnitude: predicted,
        correction_factor: correction,
        ratio,
        phase: g.arg(),
        asymptotic_questionable: n == 1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSweep {
    pub reports: Vec<GapReport>,
    /// slope of `log|ratio - 1|` against `log n` over `n >= 2`
    pub ratio_convergence_exponent: Option<f64>,
}

pub fn gap_sweep(a: Complex64, b: Complex64, n_max: u32) -> Result<GapSweep> {
    if !(2..=N_MAX).contains(&n_max) {
        return Err(HillError::InvalidArgument(format!("n_max={n_max} outside 2..={N_MAX}")));
    }
    let reports = (1..=n_max).map(|n| gap(a, b, n)).collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = reports
        .iter()
        .filter(|r| r.n >= 2)
        .filter_map(|r| r.ratio.map(|q| (f64::from(r.n).ln(), (q - 1.0).abs())))
        .filter(|&(_, d)| d > 0.0)
        .map(|(x, d)| (x, d.ln()))
        .collect();
    Ok(GapSweep {
        ratio_convergence_exponent: fit_slope(&pts),
        reports,
    })
}

/// Ordinary least-squares slope; `None` with fewer than two distinct abscissae.
pub fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_coupling_has_zero_gap() {
        let r = gap(c(0.0), c(0.0), 2).unwrap();
        assert_eq!(r.gap_computed, Complex64::new(0.0, 0.0));
        assert_eq!(r.ratio, None);
        let r = gap(c(0.0), c(3.0), 4).unwrap();
        assert_eq!(r.gap_computed.norm(), 0.0);
    }

    #[test]
    fn first_gap_is_twice_sqrt_ab() {
        let r = gap(c(0.1), c(0.1), 1).unwrap();
        assert!((r.gap_computed.norm() - 0.2).abs() < 0.05 * 0.2);
        assert!(r.asymptotic_questionable);
        assert!((r.gap_predicted_magnitude - 0.2).abs() < 1e-15);
    }

    #[test]
    fn ab_only() {
        for n in 1..=5 {
            let x = gap(c(0.5), c(2.0), n).unwrap();
            let y = gap(c(1.0), c(1.0), n).unwrap();
            assert!((x.gap_computed.norm() - y.gap_computed.norm()).abs() < 1e-10);
        }
        let x = gap(Complex64::new(0.0, 1.0), Complex64::new(0.0, -2.0), 3).unwrap();
        let y = gap(c(2.0), c(1.0), 3).unwrap();
        assert!((x.gap_computed.norm() - y.gap_computed.norm()).abs() < 1e-10);
    }

    #[test]
    fn unit_product_ratios() {
        let sweep = gap_sweep(c(1.0), c(1.0), 5).unwrap();
        for r in &sweep.reports[1..] {
            let q = r.ratio.unwrap();
            let n = f64::from(r.n);
            assert!((q - 1.0).abs() <= 0.5 / n.powi(3) + 0.05, "n={} ratio={q}", r.n);
        }
        for r in &sweep.reports[2..] {
            assert!((0.95..=1.05).contains(&r.ratio.unwrap()));
        }
        for w in sweep.reports[1..4].windows(2) {
            let observed = w[1].gap_computed.norm() / w[0].gap_computed.norm();
            let n = f64::from(w[0].n);
            let expect = 1.0 / (4.0 * n * n);
            assert!(observed / expect < 2.0 && expect / observed < 2.0);
        }
        assert!(sweep.ratio_convergence_exponent.unwrap() < 0.0);
    }

    #[test]
    fn small_coupling_ratios_approach_one() {
        let sweep = gap_sweep(c(0.2), c(0.2), 5).unwrap();
        let devs: Vec<f64> = sweep.reports[1..]
            .iter()
            .map(|r| (r.ratio.unwrap() - 1.0).abs())
            .collect();
        for (r, d) in sweep.reports[1..].iter().zip(&devs) {
            assert!(*d < 0.1, "n={}", r.n);
        }
        for w in devs.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn argument_checks() {
        assert!(gap(c(1.0), c(1.0), 0).is_err());
        assert!(gap(c(1.0), c(1.0), 7).is_err());
        assert!(gap(c(4.0), c(4.0), 2).is_err());
        assert!(gap_sweep(c(1.0), c(1.0), 1).is_err());
        // n = 6 at ab = 0.01 puts the gap near 1e-16
        assert!(matches!(
            gap(c(0.1), c(0.1), 6),
            Err(HillError::PrecisionLoss { .. })
        ));
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = (1..6).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        assert!((fit_slope(&pts).unwrap() + 2.0).abs() < 1e-14);
        assert_eq!(fit_slope(&pts[..1]), None);
    }
}
