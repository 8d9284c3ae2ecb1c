//! Spectral computations for Hill operators `-y'' + q(x) y` with complex,
//! finitely supported trigonometric potentials and quasi-periodic boundary
//! conditions `y(1) = e^{it} y(0)`, `y'(1) = e^{it} y'(0)`.
//!
//! Three independent routes to the eigenvalues `lambda_n(t)` are provided and
//! cross-checked against each other:
//!
//! * [`floquet`]: roots of the Hill discriminant `F(lambda) = cos t`, with `F`
//!   obtained from an RK4 integration of the fundamental system;
//! * [`matrix`]: the truncated Fourier-basis matrix, solved through its
//!   characteristic polynomial and Aberth-Ehrlich iteration;
//! * [`perturbation`]: the path-sum series `A(lambda, t, ab)` and the fixed
//!   point of `lambda - (2 pi n + t)^2 = A(lambda, t, ab)`.
//!
//! On top of these sit the isospectrality checks for `a e^{-i2 pi x} + b e^{i2 pi x}`
//! (the spectrum depends on `a` and `b` only through `ab`), recovery of `ab`
//! from eigenvalue data, the periodic/antiperiodic gap asymptotic, and exact
//! eigenfunctions for one-sided (Gasymov) potentials.

pub mod cli;
pub mod error;
pub mod floquet;
pub mod gaps;
pub mod gasymov;
pub mod inverse;
pub mod isospectral;
pub mod matrix;
pub mod perturbation;
pub mod potential;
pub mod spectrum;

pub use error::{HillError, Result};
pub use num_complex::Complex64;
pub use potential::{FourierPotential, QuasiProblem, Side};
pub use spectrum::{Method, SpectrumEntry, SpectrumSlice};

use std::f64::consts::PI;

/// Schema tag carried by every serialized artifact.
pub const SCHEMA: &str = "hillspec/1";

/// `(2 pi n + t)`, the free wavenumber attached to Fourier index `n`.
#[inline]
pub fn wavenumber(n: i64, t: f64) -> f64 {
    2.0 * PI * n as f64 + t
}

/// `(2 pi n + t)^2`, the unperturbed eigenvalue.
#[inline]
pub fn free_eigenvalue(n: i64, t: f64) -> f64 {
    let k = wavenumber(n, t);
    k * k
}
