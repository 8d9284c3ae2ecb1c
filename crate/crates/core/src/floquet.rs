//! Monodromy of `y'' = (q(x) - lambda) y` over one period and the Hill
//! discriminant `F(lambda) = (theta(1) + phi'(1)) / 2`.
//!
//! Eigenvalues of `H_t` are the roots of `F(lambda) = cos t`. The derivative
//! `dF/dlambda` comes from integrating the variational system alongside the
//! fundamental solutions, so Newton's method needs no finite differences.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HillError, Result};
use crate::potential::{FourierPotential, QuasiProblem};
use crate::spectrum::{Method, SpectrumEntry, SpectrumSlice};
use crate::free_eigenvalue;

/// Smallest step count accepted by [`monodromy`].
pub const MIN_STEPS: usize = 64;
/// Separation parameter used for the Newton escape disk.
pub const RHO_DEFAULT: f64 = 0.1;

/// Endpoint values of the fundamental system at `x = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyResult {
    pub theta1: Complex64,
    pub theta1p: Complex64,
    pub phi1: Complex64,
    pub phi1p: Complex64,
    /// `d theta(1) / d lambda`
    pub dtheta1: Complex64,
    /// `d phi'(1) / d lambda`
    pub dphi1p: Complex64,
    pub step_count: usize,
}

impl MonodromyResult {
    /// `theta(1) phi'(1) - theta'(1) phi(1)`, identically 1 for the exact flow.
    pub fn wronskian(&self) -> Complex64 {
        self.theta1 * self.phi1p - self.theta1p * self.phi1
    }

    pub fn discriminant(&self) -> Complex64 {
        0.5 * (self.theta1 + self.phi1p)
    }

    pub fn discriminant_derivative(&self) -> Complex64 {
        0.5 * (self.dtheta1 + self.dphi1p)
    }
}

/// `lambda -> (F(lambda), F'(lambda))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantSample {
    pub lambda: Complex64,
    pub f_value: Complex64,
    pub f_derivative: Complex64,
    /// Step count of the finer integration in the accepted Richardson pair.
    pub step_count: usize,
}

// theta, theta', phi, phi', and their lambda-derivatives
type State = [Complex64; 8];

#[inline]
fn rhs(qm: Complex64, y: &State) -> State {
    [
        y[1],
        qm * y[0],
        y[3],
        qm * y[2],
        y[5],
        qm * y[4] - y[0],
        y[7],
        qm * y[6] - y[2],
    ]
}

#[inline]
fn axpy(y: &State, h: f64, k: &State) -> State {
    let mut out = *y;
    for (o, ki) in out.iter_mut().zip(k) {
        *o += ki * h;
    }
    out
}

fn check_finite(p: &FourierPotential, lambda: Complex64) -> Result<()> {
    if !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(HillError::NonFinite(format!("lambda = {lambda}")));
    }
    if let Some((n, q)) = p.coeffs().find(|(_, q)| !q.re.is_finite() || !q.im.is_finite()) {
        return Err(HillError::NonFinite(format!("q_{n} = {q}")));
    }
    Ok(())
}

/// Classical RK4 with `steps` uniform steps on `[0, 1]`.
pub fn monodromy(p: &FourierPotential, lambda: Complex64, steps: usize) -> Result<MonodromyResult> {
    if steps < MIN_STEPS {
        return Err(HillError::InvalidArgument(format!(
            "monodromy needs at least {MIN_STEPS} steps, got {steps}"
        )));
    }
    check_finite(p, lambda)?;

    let h = 1.0 / steps as f64;
    // q - lambda on the half-step grid x_j = j h / 2
    let coupling: Vec<Complex64> = if p.is_zero() {
        vec![-lambda; 2 * steps + 1]
    } else {
        (0..=2 * steps)
            .map(|j| p.evaluate(j as f64 * 0.5 * h) - lambda)
            .collect()
    };

    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut y: State = [one, zero, zero, one, zero, zero, zero, zero];
    for i in 0..steps {
        let (q0, qh, q1) = (coupling[2 * i], coupling[2 * i + 1], coupling[2 * i + 2]);
        let k1 = rhs(q0, &y);
        let k2 = rhs(qh, &axpy(&y, 0.5 * h, &k1));
        let k3 = rhs(qh, &axpy(&y, 0.5 * h, &k2));
        let k4 = rhs(q1, &axpy(&y, h, &k3));
        for j in 0..8 {
            y[j] += (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) * (h / 6.0);
        }
    }

    Ok(MonodromyResult {
        theta1: y[0],
        theta1p: y[1],
        phi1: y[2],
        phi1p: y[3],
        dtheta1: y[4],
        dphi1p: y[7],
        step_count: steps,
    })
}

/// Starting step count: 1024 scaled by `ceil(sqrt|lambda| / pi)`.
pub fn default_steps(lambda: Complex64) -> usize {
    let scale = (lambda.norm().sqrt() / PI).ceil().max(1.0) as usize;
    1024 * scale
}

/// Controls for the Richardson step-doubling loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscriminantSettings {
    /// accept when `|F_{2N} - F_N| < rel_tol * max(1, |F_{2N}|)`
    pub rel_tol: f64,
    pub max_doublings: u32,
    /// overrides [`default_steps`] when set
    pub initial_steps: Option<usize>,
}

impl Default for DiscriminantSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_doublings: 8,
            initial_steps: None,
        }
    }
}

/// `F(lambda)` and `F'(lambda)` with default settings.
pub fn discriminant(p: &FourierPotential, lambda: Complex64) -> Result<DiscriminantSample> {
    discriminant_with(p, lambda, &DiscriminantSettings::default())
}

/// Doubles the step count until two successive integrations agree, then
/// returns the Richardson combination `(16 F_{2N} - F_N) / 15` of the pair.
pub fn discriminant_with(
    p: &FourierPotential,
    lambda: Complex64,
    settings: &DiscriminantSettings,
) -> Result<DiscriminantSample> {
    let mut steps = settings.initial_steps.unwrap_or_else(|| default_steps(lambda));
    let mut coarse = monodromy(p, lambda, steps)?;
    for _ in 0..settings.max_doublings {
        steps *= 2;
        let fine = monodromy(p, lambda, steps)?;
        let (f_c, f_f) = (coarse.discriminant(), fine.discriminant());
        if (f_f - f_c).norm() < settings.rel_tol * f_f.norm().max(1.0) {
            let d_c = coarse.discriminant_derivative();
            let d_f = fine.discriminant_derivative();
            return Ok(DiscriminantSample {
                lambda,
                f_value: (16.0 * f_f - f_c) / 15.0,
                f_derivative: (16.0 * d_f - d_c) / 15.0,
                step_count: steps,
            });
        }
        coarse = fine;
    }
    Err(HillError::NonConvergence {
        what: format!("discriminant Richardson test at lambda = {lambda}"),
        iterations: settings.max_doublings as usize,
    })
}

/// Radius of the disk around `(2 pi n + t)^2` that a Newton iterate may not leave.
pub fn escape_radius(n: i64) -> f64 {
    (n.unsigned_abs() as f64 * RHO_DEFAULT).max(4.0)
}

/// Near `t = 0` or `t = pi` the seeds of `n` and its mirror index coincide;
/// such indices belong to the matrix solver, which handles clusters.
pub fn is_resonant(n: i64, t: f64) -> bool {
    if t.sin().abs() >= 0.05 {
        return false;
    }
    let seed = free_eigenvalue(n, t);
    [-n, -n - 1, 1 - n]
        .into_iter()
        .filter(|&m| m != n)
        .any(|m| (free_eigenvalue(m, t) - seed).abs() < 1.0)
}

const NEWTON_MAX_ITER: usize = 60;
const NEWTON_TOL: f64 = 1e-10;

/// Newton iteration on `F(lambda) - cos t` from the seed `(2 pi n + t)^2`.
pub fn eigenvalue_by_discriminant(prob: &QuasiProblem, n: i64) -> Result<SpectrumEntry> {
    let t = prob.t();
    if is_resonant(n, t) {
        return Err(HillError::ResonantIndex { n, t });
    }
    let seed = Complex64::new(free_eigenvalue(n, t), 0.0);
    let radius = escape_radius(n);
    let target = t.cos();
    let mut lambda = seed;
    for _ in 0..NEWTON_MAX_ITER {
        let s = discriminant(&prob.potential, lambda)?;
        let g = s.f_value - target;
        if g.norm() < NEWTON_TOL {
            return Ok(SpectrumEntry {
                n,
                lambda,
                residual: g.norm(),
                method: Method::Floquet,
            });
        }
        if s.f_derivative.norm() == 0.0 {
            return Err(HillError::NonConvergence {
                what: format!("Newton for n={n}: F'(lambda) vanished"),
                iterations: 0,
            });
        }
        lambda -= g / s.f_derivative;
        if (lambda - seed).norm() > radius || !lambda.re.is_finite() {
            return Err(HillError::RootEscape { n, radius, lambda });
        }
    }
    Err(HillError::NonConvergence {
        what: format!("Newton on F(lambda) = cos t for n={n}"),
        iterations: NEWTON_MAX_ITER,
    })
}

/// Discriminant roots for every `n` in `n_range`, computed in parallel.
pub fn eigenvalues_by_discriminant(
    prob: &QuasiProblem,
    n_range: RangeInclusive<i64>,
) -> Result<SpectrumSlice> {
    let entries = n_range
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&n| eigenvalue_by_discriminant(prob, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumSlice::new(prob.t(), prob.potential.id(), entries))
}
