//! Eigenfunctions of `H_t` for one-sided potentials.
//!
//! When `q_j = 0` for `j <= 0` the eigenvalues are exactly `(2 pi n + t)^2` and
//!
//! ```text
//! Psi_{n,t}(x) = e^{i(2 pi n + t)x} + sum_{p >= 1} c_p e^{i(2 pi (n + p) + t)x},
//! c_p = d_p sum_{j=1}^{p} q_j c_{p-j},   c_0 = 1,
//! d_p = 1 / ((2 pi n + t)^2 - (2 pi (n + p) + t)^2).
//! ```
//!
//! For negative-sided potentials the same holds with `p` running over `-1, -2, ..`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{HillError, Result};
use crate::potential::{FourierPotential, Side};
use crate::{free_eigenvalue, wavenumber};

pub const DEFAULT_ORDER: usize = 25;

/// `1 / ((2 pi n + t)^2 - (2 pi (n + p) + t)^2)`, evaluated as
/// `-1 / (2 pi p (2 pi (2n + p) + 2t))`.
pub fn d_factor(n: i64, t: f64, p: i64) -> Result<Complex64> {
    if p == 0 {
        return Err(HillError::InvalidArgument("d_p needs p != 0".into()));
    }
    let den = 2.0 * PI * p as f64 * (2.0 * PI * (2 * n + p) as f64 + 2.0 * t);
    if den.abs() < 1e-12 {
        return Err(HillError::VanishingDenominator {
            path: vec![p],
            step: 0,
        });
    }
    Ok(Complex64::new(-1.0 / den, 0.0))
}

fn check_t(t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(HillError::NonFinite(format!("t = {t}")));
    }
    if (t.sin()).abs() < 1e-12 {
        return Err(HillError::ResonantQuasimomentum(t));
    }
    Ok(())
}

/// +1 for positive-sided (including zero) potentials, -1 for negative-sided.
fn orientation(q: &FourierPotential) -> Result<i64> {
    match q.side() {
        Side::Positive => Ok(1),
        Side::Negative => Ok(-1),
        Side::Neither => Err(HillError::NotGasymov),
    }
}

/// `c_1 .. c_order` (indices `s, 2s, ..` with `s` the orientation sign).
pub fn c_recursive(order: usize, n: i64, t: f64, q: &FourierPotential) -> Result<Vec<Complex64>> {
    check_t(t)?;
    let s = orientation(q)?;
    let support: Vec<(usize, Complex64)> = q
        .coeffs()
        .map(|(j, v)| ((j * s) as usize, v))
        .collect();
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for p in 1..=order {
        let acc: Complex64 = support
            .iter()
            .filter(|(j, _)| *j <= p)
            .map(|&(j, v)| v * c[p - j])
            .sum();
        let d = d_factor(n, t, s * p as i64)?;
        c.push(d * acc);
    }
    c.remove(0);
    Ok(c)
}

fn compositions(p: usize) -> Vec<Vec<usize>> {
    // bit i of mask set: cut after position i + 1
    (0u32..(1 << (p - 1)))
        .map(|mask| {
            let mut parts = Vec::new();
            let mut run = 1;
            for i in 0..(p - 1) {
                if mask >> i & 1 == 1 {
                    parts.push(run);
                    run = 1;
                } else {
                    run += 1;
                }
            }
            parts.push(run);
            parts
        })
        .collect()
}

/// `c_p` as the explicit sum over compositions `(n_1, .., n_k, r)` of `p`:
///
/// ```text
/// c_p = d_p (q_p + sum_k sum q_{n_1} .. q_{n_k} q_{r} d_{p - n_1} d_{p - n_1 - n_2} .. d_{r})
/// ```
///
/// Exponential in `p`; intended as a cross-check of [`c_recursive`].
pub fn c_closed_form(p: usize, n: i64, t: f64, q: &FourierPotential) -> Result<Complex64> {
    if p == 0 {
        return Err(HillError::InvalidArgument("c_p needs p >= 1".into()));
    }
    check_t(t)?;
    let s = orientation(q)?;
    let coeff = |j: usize| q.coeff(s * j as i64);
    let d = |j: usize| d_factor(n, t, s * j as i64);
    let mut total = Complex64::new(0.0, 0.0);
    for parts in compositions(p) {
        let mut term = Complex64::new(1.0, 0.0);
        for &part in &parts {
            term *= coeff(part);
        }
        if term == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut tail = p;
        for &part in &parts[..parts.len() - 1] {
            tail -= part;
            term *= d(tail)?;
        }
        total += term;
    }
    Ok(d(p)? * total)
}

/// Truncated eigenfunction `Psi_{n,t}` normalized by a unit coefficient on `e^{i(2 pi n + t)x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GasymovEigenfunction {
    pub n: i64,
    pub t: f64,
    /// `c_{s}, c_{2s}, .., c_{Ps}` with `s` the orientation sign
    pub coefficients: Vec<Complex64>,
    pub side: Side,
    /// `|c_P|`
    pub tail_magnitude: f64,
}

impl GasymovEigenfunction {
    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn eigenvalue(&self) -> f64 {
        free_eigenvalue(self.n, self.t)
    }

    fn sign(&self) -> i64 {
        if self.side == Side::Negative {
            -1
        } else {
            1
        }
    }

    /// `(Fourier index, coefficient)` including the unit leading term.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let s = self.sign();
        std::iter::once((self.n, Complex64::new(1.0, 0.0))).chain(
            self.coefficients
                .iter()
                .enumerate()
                .map(move |(i, &c)| (self.n + s * (i as i64 + 1), c)),
        )
    }

    pub fn to_record(&self) -> EigenfunctionRecord {
        let s = self.sign();
        EigenfunctionRecord {
            n: self.n,
            t: self.t,
            order: self.order(),
            side: match self.side {
                Side::Negative => "negative",
                _ => "positive",
            },
            eigenvalue: self.eigenvalue(),
            tail_magnitude: self.tail_magnitude,
            coeffs: self
                .coefficients
                .iter()
                .enumerate()
                .map(|(i, c)| CoeffRecord {
                    p: s * (i as i64 + 1),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffRecord {
    pub p: i64,
    pub re: f64,
    pub im: f64,
}

/// JSON form `{n, t, P, side, eigenvalue, tail_magnitude, coeffs: [{p, re, im}]}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenfunctionRecord {
    pub n: i64,
    pub t: f64,
    #[serde(rename = "P")]
    pub order: usize,
    pub side: &'static str,
    pub eigenvalue: f64,
    pub tail_magnitude: f64,
    pub coeffs: Vec<CoeffRecord>,
}

pub fn eigenfunction(n: i64, t: f64, q: &FourierPotential, order: usize) -> Result<GasymovEigenfunction> {
    if order == 0 {
        return Err(HillError::InvalidArgument("truncation order must be positive".into()));
    }
    let coefficients = c_recursive(order, n, t, q)?;
    let side = if q.side() == Side::Negative {
        Side::Negative
    } else {
        Side::Positive
    };
    Ok(GasymovEigenfunction {
        n,
        t,
        tail_magnitude: coefficients.last().map_or(0.0, |c| c.norm()),
        coefficients,
        side,
    })
}

/// Partial sum of `Psi_{n,t}` at `x`.
pub fn synthesize(ef: &GasymovEigenfunction, x: f64) -> Complex64 {
    ef.modes()
        .map(|(m, c)| c * Complex64::from_polar(1.0, wavenumber(m, ef.t) * x))
        .sum()
}

/// `max_x |-Psi'' + q Psi - (2 pi n + t)^2 Psi|` over `samples` equispaced points of `[0, 1)`.
pub fn residual(ef: &GasymovEigenfunction, q: &FourierPotential, samples: usize) -> Result<f64> {
    if samples < 32 {
        return Err(HillError::InvalidArgument(format!(
            "residual needs at least 32 samples, got {samples}"
        )));
    }
    let lambda = ef.eigenvalue();
    let mut worst: f64 = 0.0;
    for j in 0..samples {
        let x = j as f64 / samples as f64;
        let mut psi = Complex64::new(0.0, 0.0);
        let mut psi2 = Complex64::new(0.0, 0.0);
        for (m, c) in ef.modes() {
            let w = wavenumber(m, ef.t);
            let e = c * Complex64::from_polar(1.0, w * x);
            psi += e;
            psi2 -= w * w * e;
        }
        let r = -psi2 + q.evaluate(x) * psi - lambda * psi;
        worst = worst.max(r.norm());
    }
    Ok(worst)
}
