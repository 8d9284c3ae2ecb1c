//! Truncated Fourier-basis matrices of `H_t` and their full spectra.
//!
//! In the basis `e^{i(2 pi m + t)x}`, `|m| <= half_width`, the operator has
//! diagonal `(2 pi m + t)^2` and couples `m` to `m - j` through `q_j`. For the
//! two-mode potential the matrix is tridiagonal and its characteristic
//! polynomial obeys the three-term recurrence
//!
//! ```text
//! f_k = (d_k - lambda) f_{k-1} - (sub * sup) f_{k-2}
//! ```
//!
//! which consumes the couplings only through their product. Eigenvalues are
//! found simultaneously by Aberth-Ehrlich iteration seeded at the diagonal.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{HillError, Result};
use crate::potential::{QuasiProblem, Side};
use crate::spectrum::{Method, SpectrumEntry, SpectrumSlice};
use crate::free_eigenvalue;

/// `det(M - lambda I) = mantissa * 2^exponent`, and likewise its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharpolyValue {
    pub mantissa: Complex64,
    pub derivative_mantissa: Complex64,
    pub exponent: i32,
}

impl CharpolyValue {
    /// Unscaled value; overflows to infinity for large matrices.
    pub fn value(&self) -> Complex64 {
        self.mantissa * scale2(self.exponent)
    }

    pub fn derivative(&self) -> Complex64 {
        self.derivative_mantissa * scale2(self.exponent)
    }

    /// `f / f'`, independent of the scaling exponent.
    pub fn newton_correction(&self) -> Complex64 {
        if self.mantissa == Complex64::new(0.0, 0.0) {
            return self.mantissa;
        }
        self.mantissa / self.derivative_mantissa
    }

    /// `|self - other| / |self|` computed without leaving the scaled representation.
    pub fn relative_difference(&self, other: &CharpolyValue) -> f64 {
        if self.mantissa.norm() == 0.0 {
            return other.mantissa.norm();
        }
        let ratio = other.mantissa / self.mantissa * scale2(other.exponent - self.exponent);
        (ratio - 1.0).norm()
    }
}

fn scale2(e: i32) -> f64 {
    // split so each factor stays representable
    let half = e / 2;
    2f64.powi(half) * 2f64.powi(e - half)
}

const RESCALE_HI: f64 = 1e150;
const RESCALE_LO: f64 = 1e-150;

fn l1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Common surface of the truncated operator matrices.
pub trait OperatorMatrix {
    fn diagonal(&self) -> &[Complex64];
    /// Fourier index attached to each row.
    fn index_map(&self) -> &[i64];
    fn t(&self) -> f64;
    fn potential_id(&self) -> &str;
    fn charpoly(&self, lambda: Complex64) -> CharpolyValue;
    /// Rough size of the off-diagonal coupling; zero means the spectrum is the diagonal.
    fn coupling_scale(&self) -> f64;

    fn size(&self) -> usize {
        self.diagonal().len()
    }

    /// Integer sort key for the wavenumber of row `k`, used to order
    /// degenerate diagonal groups.
    fn wavenumber(&self, k: usize) -> f64 {
        2.0 * PI * self.index_map()[k] as f64 + self.t()
    }
}

/// Tridiagonal truncation for `q = a e^{-i2 pi x} + b e^{i2 pi x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperatorMatrix {
    pub diag: Vec<Complex64>,
    /// `a`, coupling `m -> m - 1`
    pub sub: Complex64,
    /// `b`, coupling `m -> m + 1`
    pub sup: Complex64,
    pub index_map: Vec<i64>,
    t: f64,
    potential_id: String,
}

impl TridiagonalOperatorMatrix {
    pub fn from_parts(
        diag: Vec<Complex64>,
        sub: Complex64,
        sup: Complex64,
        index_map: Vec<i64>,
        t: f64,
        potential_id: String,
    ) -> Self {
        assert_eq!(diag.len(), index_map.len());
        Self {
            diag,
            sub,
            sup,
            index_map,
            t,
            potential_id,
        }
    }

    /// `sub * sup`, the only combination the spectrum depends on.
    pub fn coupling_product(&self) -> Complex64 {
        self.sub * self.sup
    }
}

impl OperatorMatrix for TridiagonalOperatorMatrix {
    fn diagonal(&self) -> &[Complex64] {
        &self.diag
    }

    fn index_map(&self) -> &[i64] {
        &self.index_map
    }

    fn t(&self) -> f64 {
        self.t
    }

    fn potential_id(&self) -> &str {
        &self.potential_id
    }

    fn coupling_scale(&self) -> f64 {
        self.coupling_product().norm().sqrt()
    }

    fn charpoly(&self, lambda: Complex64) -> CharpolyValue {
        charpoly_eval(self, lambda)
    }
}

/// `det(M - lambda I)` and its derivative by the three-term recurrence.
pub fn charpoly_eval(m: &TridiagonalOperatorMatrix, lambda: Complex64) -> CharpolyValue {
    let s = m.coupling_product();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let (mut f_prev, mut f) = (one, one);
    let (mut g_prev, mut g) = (zero, zero);
    let mut exponent = 0i32;
    for (k, &d) in m.diag.iter().enumerate() {
        let dk = d - lambda;
        let (f_new, g_new) = if k == 0 {
            (dk, -one)
        } else {
            (dk * f - s * f_prev, -f + dk * g - s * g_prev)
        };
        f_prev = f;
        g_prev = g;
        f = f_new;
        g = g_new;

        let big = l1(f).max(l1(g)).max(l1(f_prev)).max(l1(g_prev));
        if big > RESCALE_HI || (big < RESCALE_LO && big > 0.0) {
            let e = big.log2().floor() as i32;
            let factor = scale2(-e);
            f *= factor;
            g *= factor;
            f_prev *= factor;
            g_prev *= factor;
            exponent += e;
        }
    }
    CharpolyValue {
        mantissa: f,
        derivative_mantissa: g,
        exponent,
    }
}

/// Banded truncation for a general finitely supported potential.
///
/// Row `m`, column `m - j` holds `q_j`. One-sided potentials give a triangular
/// matrix whose determinant is the diagonal product.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOperatorMatrix {
    pub diag: Vec<Complex64>,
    /// `(j, q_j)` for every nonzero coefficient, `j != 0` (q_0 is folded into the diagonal)
    pub couplings: Vec<(i64, Complex64)>,
    pub bandwidth: usize,
    pub index_map: Vec<i64>,
    pub side: Side,
    t: f64,
    potential_id: String,
}

#[derive(Clone, Copy)]
struct Dual {
    v: Complex64,
    d: Complex64,
}

impl BandedOperatorMatrix {
    fn entry(&self, row: usize, col: usize, lambda: Complex64) -> Dual {
        let zero = Complex64::new(0.0, 0.0);
        if row == col {
            return Dual {
                v: self.diag[row] - lambda,
                d: Complex64::new(-1.0, 0.0),
            };
        }
        let j = row as i64 - col as i64;
        let v = self
            .couplings
            .iter()
            .find(|(jj, _)| *jj == j)
            .map(|(_, q)| *q)
            .unwrap_or(zero);
        Dual { v, d: zero }
    }

    fn diagonal_product(&self, lambda: Complex64) -> CharpolyValue {
        let zero = Complex64::new(0.0, 0.0);
        let (mut v, mut d) = (Complex64::new(1.0, 0.0), zero);
        let mut exponent = 0;
        for &dk in &self.diag {
            let u = dk - lambda;
            d = d * u - v;
            v *= u;
            let big = l1(v).max(l1(d));
            if big > RESCALE_HI || (big < RESCALE_LO && big > 0.0) {
                let e = big.log2().floor() as i32;
                v *= scale2(-e);
                d *= scale2(-e);
                exponent += e;
            }
        }
        CharpolyValue {
            mantissa: v,
            derivative_mantissa: d,
            exponent,
        }
    }

    /// Gaussian elimination with partial pivoting on dual numbers
    /// `(value, d/dlambda)`, restricted to the band.
    fn eliminate(&self, lambda: Complex64) -> CharpolyValue {
        let n = self.diag.len();
        let bw = self.bandwidth;
        let zero = Complex64::new(0.0, 0.0);
        let width = (3 * bw + 1).min(n);
        // row r stores columns r - bw ..= r + 2 bw (upper band grows under pivoting)
        let col0 = |r: usize| r.saturating_sub(bw);
        let mut rows: Vec<Vec<Dual>> = (0..n)
            .map(|r| {
                let c0 = col0(r);
                (c0..(c0 + width + bw).min(n))
                    .map(|c| {
                        if (c as i64 - r as i64).unsigned_abs() as usize <= bw {
                            self.entry(r, c, lambda)
                        } else {
                            Dual { v: zero, d: zero }
                        }
                    })
                    .collect()
            })
            .collect();
        let get = |rows: &Vec<Vec<Dual>>, r: usize, c: usize| -> Dual {
            let c0 = col0(r);
            if c < c0 || c - c0 >= rows[r].len() {
                Dual { v: zero, d: zero }
            } else {
                rows[r][c - c0]
            }
        };

        let (mut v, mut d) = (Complex64::new(1.0, 0.0), zero);
        let mut exponent = 0;
        let mut sign = 1.0;
        for k in 0..n {
            let last = (k + bw).min(n - 1);
            let pivot_row = (k..=last)
                .max_by(|&a, &b| {
                    l1(get(&rows, a, k).v)
                        .partial_cmp(&l1(get(&rows, b, k).v))
                        .unwrap_or(Ordering::Equal)
                })
                .unwrap_or(k);
            if pivot_row != k {
                // materialize both rows over the shared column window before swapping
                let hi = (k + 2 * bw + 1).min(n);
                let rk: Vec<Dual> = (k..hi).map(|c| get(&rows, k, c)).collect();
                let rp: Vec<Dual> = (k..hi).map(|c| get(&rows, pivot_row, c)).collect();
                for (off, c) in (k..hi).enumerate() {
                    set(&mut rows, k, c, rp[off], bw);
                    set(&mut rows, pivot_row, c, rk[off], bw);
                }
                sign = -sign;
            }
            let p = get(&rows, k, k);
            d = d * p.v + v * p.d;
            v *= p.v;
            if p.v == zero {
                return CharpolyValue {
                    mantissa: zero,
                    derivative_mantissa: d,
                    exponent,
                };
            }
            let hi = (k + 2 * bw + 1).min(n);
            for r in (k + 1)..=last {
                let e = get(&rows, r, k);
                if e.v == zero && e.d == zero {
                    continue;
                }
                // factor = e / p in dual arithmetic
                let fv = e.v / p.v;
                let fd = (e.d * p.v - e.v * p.d) / (p.v * p.v);
                for c in k..hi {
                    let pk = get(&rows, k, c);
                    let x = get(&rows, r, c);
                    let nv = x.v - fv * pk.v;
                    let nd = x.d - (fd * pk.v + fv * pk.d);
                    set(&mut rows, r, c, Dual { v: nv, d: nd }, bw);
                }
            }
            let big = l1(v).max(l1(d));
            if big > RESCALE_HI || (big < RESCALE_LO && big > 0.0) {
                let e = big.log2().floor() as i32;
                v *= scale2(-e);
                d *= scale2(-e);
                exponent += e;
            }
        }
        CharpolyValue {
            mantissa: v * sign,
            derivative_mantissa: d * sign,
            exponent,
        }
    }
}

fn set(rows: &mut [Vec<Dual>], r: usize, c: usize, val: Dual, bw: usize) {
    let c0 = r.saturating_sub(bw);
    debug_assert!(c >= c0, "write below band");
    let off = c - c0;
    if off < rows[r].len() {
        rows[r][off] = val;
    }
}

impl OperatorMatrix for BandedOperatorMatrix {
    fn diagonal(&self) -> &[Complex64] {
        &self.diag
    }

    fn index_map(&self) -> &[i64] {
        &self.index_map
    }

    fn t(&self) -> f64 {
        self.t
    }

    fn potential_id(&self) -> &str {
        &self.potential_id
    }

    fn coupling_scale(&self) -> f64 {
        match self.side {
            Side::Positive | Side::Negative => 0.0,
            Side::Neither => self
                .couplings
                .iter()
                .map(|(_, q)| q.norm())
                .fold(0.0, f64::max),
        }
    }

    fn charpoly(&self, lambda: Complex64) -> CharpolyValue {
        match self.side {
            Side::Positive | Side::Negative => self.diagonal_product(lambda),
            Side::Neither => self.eliminate(lambda),
        }
    }
}

fn fourier_window(half_width: usize) -> Vec<i64> {
    let h = half_width as i64;
    (-h..=h).collect()
}

/// Tridiagonal truncation with `2 half_width + 1` modes.
pub fn build_matrix(prob: &QuasiProblem, half_width: usize) -> Result<TridiagonalOperatorMatrix> {
    if half_width < 5 {
        return Err(HillError::InvalidArgument(format!(
            "half_width must be at least 5, got {half_width}"
        )));
    }
    let (a, b) = prob
        .potential
        .mathieu_pair()
        .ok_or(HillError::UnsupportedPotential {
            support: prob.potential.support(),
            bandwidth: 1,
        })?;
    let t = prob.t();
    let index_map = fourier_window(half_width);
    let diag = index_map
        .iter()
        .map(|&m| Complex64::new(free_eigenvalue(m, t), 0.0))
        .collect();
    Ok(TridiagonalOperatorMatrix {
        diag,
        sub: a,
        sup: b,
        index_map,
        t,
        potential_id: prob.potential.id(),
    })
}

/// Banded truncation for any potential whose support fits in `bandwidth`.
pub fn build_banded(
    prob: &QuasiProblem,
    half_width: usize,
    bandwidth: usize,
) -> Result<BandedOperatorMatrix> {
    if half_width < 5 {
        return Err(HillError::InvalidArgument(format!(
            "half_width must be at least 5, got {half_width}"
        )));
    }
    if prob.potential.bandwidth() > bandwidth {
        return Err(HillError::UnsupportedPotential {
            support: prob.potential.support(),
            bandwidth,
        });
    }
    let t = prob.t();
    let q0 = prob.potential.coeff(0);
    let index_map = fourier_window(half_width);
    let diag = index_map
        .iter()
        .map(|&m| Complex64::new(free_eigenvalue(m, t), 0.0) + q0)
        .collect();
    Ok(BandedOperatorMatrix {
        diag,
        couplings: prob.potential.coeffs().filter(|(j, _)| *j != 0).collect(),
        bandwidth: bandwidth.max(1),
        index_map,
        side: prob.potential.side(),
        t,
        potential_id: prob.potential.id(),
    })
}

/// Aberth iteration controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AberthSettings {
    pub max_sweeps: usize,
    /// accept a root once its Aberth correction drops below `tol`
    pub tol: f64,
}

impl Default for AberthSettings {
    fn default() -> Self {
        Self {
            max_sweeps: 200,
            tol: 1e-10,
        }
    }
}

/// Per-root tolerance: `tol`, raised to the rounding floor of `|z|` when the
/// root is so large that `tol` is below a few ulps.
fn root_tolerance(tol: f64, z: Complex64) -> f64 {
    tol.max(8.0 * f64::EPSILON * z.norm())
}

/// Simultaneous Aberth-Ehrlich iteration (Gauss-Seidel ordering).
pub fn aberth<M: OperatorMatrix + ?Sized>(
    m: &M,
    seeds: Vec<Complex64>,
    settings: &AberthSettings,
) -> Result<Vec<(Complex64, f64)>> {
    let n = seeds.len();
    let mut z = seeds;
    let mut done = vec![false; n];
    for _ in 0..settings.max_sweeps {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let r = m.charpoly(z[i]).newton_correction();
            if r == Complex64::new(0.0, 0.0) {
                done[i] = true;
                continue;
            }
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let w = r / (1.0 - r * repulsion);
            if !w.re.is_finite() || !w.im.is_finite() {
                all_done = false;
                continue;
            }
            z[i] -= w;
            if w.norm() < root_tolerance(settings.tol, z[i]) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    let failed: Vec<usize> = (0..n).filter(|&i| !done[i]).collect();
    if !failed.is_empty() {
        return Err(HillError::NonConvergence {
            what: format!("Aberth iteration (roots {failed:?} unconverged)"),
            iterations: settings.max_sweeps,
        });
    }
    polish(m, &mut z);
    Ok(z
        .into_iter()
        .map(|zi| (zi, m.charpoly(zi).newton_correction().norm()))
        .collect())
}

const POLISH_SWEEPS: usize = 12;

/// Extra Aberth sweeps after acceptance. Close pairs converge only linearly
/// down to `tol`; a root keeps moving while its correction keeps shrinking.
fn polish<M: OperatorMatrix + ?Sized>(m: &M, z: &mut [Complex64]) {
    let n = z.len();
    let mut last = vec![f64::INFINITY; n];
    let mut frozen = vec![false; n];
    for _ in 0..POLISH_SWEEPS {
        let mut moved = false;
        for i in 0..n {
            if frozen[i] {
                continue;
            }
            let r = m.charpoly(z[i]).newton_correction();
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let w = r / (1.0 - r * repulsion);
            let size = w.norm();
            if !size.is_finite() || size >= last[i] || size <= f64::EPSILON * z[i].norm() {
                frozen[i] = true;
                if size.is_finite() && size < last[i] {
                    z[i] -= w;
                }
                continue;
            }
            last[i] = size;
            z[i] -= w;
            moved = true;
        }
        if !moved {
            break;
        }
    }
}

/// Diagonal seeds, spread slightly apart when the coupling is nonzero so that
/// coincident diagonal values do not stall the repulsion term.
fn seeds<M: OperatorMatrix + ?Sized>(m: &M) -> Vec<Complex64> {
    let scale = m.coupling_scale();
    if scale == 0.0 {
        return m.diagonal().to_vec();
    }
    let eta = 1e-3 * (1.0 + scale);
    m.diagonal()
        .iter()
        .enumerate()
        .map(|(k, &d)| d + Complex64::from_polar(eta, 0.5 + 2.399_963 * k as f64))
        .collect()
}

/// One-to-one assignment of eigenvalues to rows: greedy by distance to the
/// diagonal, then within groups of coincident diagonal entries the
/// eigenvalues are re-ordered by (re, im) to follow the row wavenumbers.
pub fn assign_indices<M: OperatorMatrix + ?Sized>(m: &M, eigs: &[Complex64]) -> Vec<usize> {
    let diag = m.diagonal();
    let n = diag.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, e) in eigs.iter().enumerate() {
        for (k, d) in diag.iter().enumerate() {
            pairs.push(((e - d).norm(), i, k));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut row_of = vec![usize::MAX; eigs.len()];
    let mut taken = vec![false; n];
    for (_, i, k) in pairs {
        if row_of[i] == usize::MAX && !taken[k] {
            row_of[i] = k;
            taken[k] = true;
        }
    }

    // eig index currently assigned to each row
    let mut eig_of = vec![usize::MAX; n];
    for (i, &k) in row_of.iter().enumerate() {
        eig_of[k] = i;
    }
    let mut visited = vec![false; n];
    for k in 0..n {
        if visited[k] {
            continue;
        }
        let tol = 1e-12 * diag[k].norm().max(1.0);
        let mut group: Vec<usize> = (k..n)
            .filter(|&l| (diag[l] - diag[k]).norm() <= tol)
            .collect();
        for &l in &group {
            visited[l] = true;
        }
        if group.len() < 2 {
            continue;
        }
        let mut members: Vec<usize> = group.iter().map(|&l| eig_of[l]).collect();
        members.sort_by(|&a, &b| {
            eigs[a]
                .re
                .total_cmp(&eigs[b].re)
                .then(eigs[a].im.total_cmp(&eigs[b].im))
        });
        group.sort_by(|&a, &b| m.wavenumber(a).total_cmp(&m.wavenumber(b)));
        for (&row, &eig) in group.iter().zip(&members) {
            row_of[eig] = row;
        }
    }
    row_of
}

/// All eigenvalues of the truncated matrix, labelled by Fourier index.
pub fn all_eigenvalues<M: OperatorMatrix + ?Sized>(m: &M) -> Result<SpectrumSlice> {
    all_eigenvalues_with(m, &AberthSettings::default())
}

pub fn all_eigenvalues_with<M: OperatorMatrix + ?Sized>(
    m: &M,
    settings: &AberthSettings,
) -> Result<SpectrumSlice> {
    let roots = aberth(m, seeds(m), settings)?;
    let values: Vec<Complex64> = roots.iter().map(|r| r.0).collect();
    let rows = assign_indices(m, &values);
    let entries = roots
        .iter()
        .zip(rows)
        .map(|(&(lambda, residual), row)| SpectrumEntry {
            n: m.index_map()[row],
            lambda,
            residual,
            method: Method::Matrix,
        })
        .collect();
    Ok(SpectrumSlice::new(m.t(), m.potential_id().to_string(), entries))
}

/// Convenience: build the tridiagonal (or, failing that, banded) truncation
/// and return its spectrum.
pub fn matrix_spectrum(prob: &QuasiProblem, half_width: usize) -> Result<SpectrumSlice> {
    match build_matrix(prob, half_width) {
        Ok(m) => all_eigenvalues(&m),
        Err(HillError::UnsupportedPotential { .. }) => {
            let bw = prob.potential.bandwidth();
            all_eigenvalues(&build_banded(prob, half_width, bw)?)
        }
        Err(e) => Err(e),
    }
}

/// Mathieu-scaled matrix for `a e^{-i2x} + b e^{i2x}` on period `pi`: diagonal
/// `m^2` over `m = n (mod 2)`, couplings shifting `m` by two.
pub fn mathieu_scaled_matrix(
    a: Complex64,
    b: Complex64,
    n: u32,
    half_width: usize,
) -> TridiagonalOperatorMatrix {
    let h = half_width as i64;
    let index_map: Vec<i64> = if n.is_multiple_of(2) {
        (-h..=h).map(|j| 2 * j).collect()
    } else {
        (-h - 1..=h).map(|j| 2 * j + 1).collect()
    };
    let diag = index_map
        .iter()
        .map(|&m| Complex64::new((m * m) as f64, 0.0))
        .collect();
    // periodic for even n, antiperiodic for odd n; the wavenumber of row m is m
    let t = if n.is_multiple_of(2) { 0.0 } else { PI };
    TridiagonalOperatorMatrix {
        diag,
        sub: a,
        sup: b,
        index_map,
        t,
        potential_id: String::from("mathieu-scaled"),
    }
}

/// `(lambda_plus, lambda_minus)`: the two eigenvalues of the Mathieu-scaled
/// periodic (even `n`) or antiperiodic (odd `n`) problem nearest `n^2`.
/// `lambda_plus` has the larger real part (ties: larger imaginary part).
pub fn periodic_pair(
    a: Complex64,
    b: Complex64,
    n: u32,
    half_width: usize,
) -> Result<(Complex64, Complex64)> {
    if n < 1 {
        return Err(HillError::InvalidArgument("periodic_pair needs n >= 1".into()));
    }
    if half_width < n as usize + 10 {
        return Err(HillError::InvalidArgument(format!(
            "half_width {half_width} must be at least n + 10 = {}",
            n + 10
        )));
    }
    let m = mathieu_scaled_matrix(a, b, n, half_width);
    let roots = aberth(&m, seeds(&m), &AberthSettings::default())?;
    let center = (n * n) as f64;
    let mut near: Vec<Complex64> = roots.iter().map(|r| r.0).collect();
    near.sort_by(|x, y| (x - center).norm().total_cmp(&(y - center).norm()));
    let cluster = near.iter().filter(|z| (*z - center).norm() < 1.0).count();
    if cluster > 2 {
        return Err(HillError::DegenerateCluster {
            count: cluster,
            center,
        });
    }
    let (x, y) = (near[0], near[1]);
    let x_first = match x.re.total_cmp(&y.re) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => x.im >= y.im,
    };
    Ok(if x_first { (x, y) } else { (y, x) })
}
