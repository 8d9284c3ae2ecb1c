//! Spectral comparison of `H_t(a, b)` and `H_t(c, d)`, and the arcs
//! `Gamma_n = {lambda_n(t) : 0 <= t <= pi}` that make up the spectrum of the
//! full-line operator.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HillError, Result};
use crate::floquet::discriminant;
use crate::matrix::{all_eigenvalues, build_matrix};
use crate::potential::{make_mathieu, FourierPotential, QuasiProblem};
use crate::spectrum::SpectrumSlice;

pub const ISOSPECTRAL_TOL: f64 = 1e-8;
pub const DISTINCT_TOL: f64 = 1e-6;
pub const DISCRIMINANT_SAMPLES: usize = 20;
pub const MAX_REFINEMENT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Isospectral,
    Distinct,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsospectralReport {
    pub ab: Complex64,
    pub cd: Complex64,
    pub t_samples: Vec<f64>,
    pub n_range: (i64, i64),
    pub half_width: usize,
    pub max_eigenvalue_distance: f64,
    pub max_discriminant_distance: f64,
    pub verdict: Verdict,
}

/// Points of the 2-3 Halton sequence mapped uniformly into the disk `|z| <= radius`.
pub fn halton_disk(count: usize, radius: f64) -> Vec<Complex64> {
    fn radical_inverse(mut i: usize, base: usize) -> f64 {
        let (mut x, mut f) = (0.0, 1.0 / base as f64);
        while i > 0 {
            x += (i % base) as f64 * f;
            i /= base;
            f /= base as f64;
        }
        x
    }
    (1..=count)
        .map(|i| {
            let r = radius * radical_inverse(i, 2).sqrt();
            Complex64::from_polar(r, 2.0 * PI * radical_inverse(i, 3))
        })
        .collect()
}

/// Largest `|F_1 - F_2| / max(1, |F_1|)` over `points`.
pub fn discriminant_distance(
    p1: &FourierPotential,
    p2: &FourierPotential,
    points: &[Complex64],
) -> Result<f64> {
    let values = points
        .par_iter()
        .map(|&lam| {
            let f1 = discriminant(p1, lam)?.f_value;
            let f2 = discriminant(p2, lam)?.f_value;
            Ok((f1 - f2).norm() / f1.norm().max(1.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.into_iter().fold(0.0, f64::max))
}

fn matched_distance(s1: &SpectrumSlice, s2: &SpectrumSlice, range: &RangeInclusive<i64>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in range.clone() {
        let (x, y) = match (s1.lambda(n), s2.lambda(n)) {
            (Some(x), Some(y)) => (x, y),
            _ => {
                return Err(HillError::InconsistentIndexing(format!(
                    "index n={n} missing at t={}",
                    s1.t
                )))
            }
        };
        worst = worst.max((x - y).norm());
    }
    Ok(worst)
}

/// Index-matched spectra and sampled discriminants of the two operators.
pub fn compare_operators(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
    t_samples: &[f64],
    n_range: RangeInclusive<i64>,
) -> Result<IsospectralReport> {
    if t_samples.is_empty() {
        return Err(HillError::EmptyInput("no t samples".into()));
    }
    if n_range.is_empty() {
        return Err(HillError::EmptyInput("empty index range".into()));
    }
    let nmax = n_range.start().abs().max(n_range.end().abs());
    let half_width = 2 * nmax as usize + 20;
    let (p1, p2) = (make_mathieu(a, b), make_mathieu(c, d));

    let distances = t_samples
        .par_iter()
        .map(|&t| {
            let s1 = all_eigenvalues(&build_matrix(&QuasiProblem::new(p1.clone(), t)?, half_width)?)?;
            let s2 = all_eigenvalues(&build_matrix(&QuasiProblem::new(p2.clone(), t)?, half_width)?)?;
            matched_distance(&s1, &s2, &n_range)
        })
        .collect::<Result<Vec<f64>>>()?;
    let eig_dist = distances.into_iter().fold(0.0, f64::max);

    let radius = (2.0 * PI * nmax.max(1) as f64).powi(2);
    let disc_dist = discriminant_distance(&p1, &p2, &halton_disk(DISCRIMINANT_SAMPLES, radius))?;

    let verdict = if eig_dist < ISOSPECTRAL_TOL && disc_dist < ISOSPECTRAL_TOL {
        Verdict::Isospectral
    } else if eig_dist > DISTINCT_TOL || disc_dist > DISTINCT_TOL {
        Verdict::Distinct
    } else {
        Verdict::Inconclusive
    };
    Ok(IsospectralReport {
        ab: a * b,
        cd: c * d,
        t_samples: t_samples.to_vec(),
        n_range: (*n_range.start(), *n_range.end()),
        half_width,
        max_eigenvalue_distance: eig_dist,
        max_discriminant_distance: disc_dist,
        verdict,
    })
}

/// `lambda_n(t)` sampled on `grid_size` equispaced points of `[0, pi]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcTrace {
    pub n: i64,
    pub samples: Vec<(f64, Complex64)>,
    /// `(lambda_n(0), lambda_n(pi))`
    pub endpoint_labels: (Complex64, Complex64),
    /// number of interval bisections needed to keep the continuation connected
    pub refinements: usize,
}

struct Tracer {
    potential: FourierPotential,
    half_width: usize,
    speed: f64,
    refinements: usize,
    n: i64,
}

impl Tracer {
    fn spectrum(&self, t: f64) -> Result<SpectrumSlice> {
        all_eigenvalues(&build_matrix(
            &QuasiProblem::new(self.potential.clone(), t)?,
            self.half_width,
        )?)
    }

    /// Continue from `(t0, lam0)` to `t1`, bisecting while the step exceeds
    /// the continuity bound `2 S |t1 - t0|`.
    fn step(&mut self, t0: f64, lam0: Complex64, t1: f64, depth: usize) -> Result<Complex64> {
        let slice = self.spectrum(t1)?;
        let next = slice
            .entries
            .iter()
            .map(|e| e.lambda)
            .min_by(|x, y| (x - lam0).norm().total_cmp(&(y - lam0).norm()))
            .ok_or(HillError::EmptyInput("empty spectrum".into()))?;
        if (next - lam0).norm() < 2.0 * self.speed * (t1 - t0).abs() {
            return Ok(next);
        }
        if depth >= MAX_REFINEMENT {
            return Err(HillError::ArcBroken { n: self.n, t: t1 });
        }
        self.refinements += 1;
        let tm = 0.5 * (t0 + t1);
        let lm = self.step(t0, lam0, tm, depth + 1)?;
        self.step(tm, lm, t1, depth + 1)
    }
}

pub fn trace_arc(a: Complex64, b: Complex64, n: i64, grid_size: usize) -> Result<ArcTrace> {
    if grid_size < 16 {
        return Err(HillError::InvalidArgument(format!("grid_size must be at least 16, got {grid_size}")));
    }
    let mut tracer = Tracer {
        potential: make_mathieu(a, b),
        half_width: n.unsigned_abs() as usize + 20,
        // bound on |d lambda / dt|: free part 2 |2 pi n + t| plus a coupling allowance
        speed: 2.0 * (2.0 * PI * n.abs() as f64 + PI) + 4.0 * (a * b).norm().sqrt(),
        refinements: 0,
        n,
    };
    let ts: Vec<f64> = (0..grid_size)
        .map(|j| PI * j as f64 / (grid_size - 1) as f64)
        .collect();
    let mid = grid_size / 2;
    let start = tracer
        .spectrum(ts[mid])?
        .lambda(n)
        .ok_or_else(|| HillError::InconsistentIndexing(format!("n={n} absent from the truncation")))?;
    let mut values = vec![Complex64::new(0.0, 0.0); grid_size];
    values[mid] = start;
    for j in mid + 1..grid_size {
        values[j] = tracer.step(ts[j - 1], values[j - 1], ts[j], 0)?;
    }
    for j in (0..mid).rev() {
        values[j] = tracer.step(ts[j + 1], values[j + 1], ts[j], 0)?;
    }
    Ok(ArcTrace {
        n,
        endpoint_labels: (values[0], values[grid_size - 1]),
        samples: ts.into_iter().zip(values).collect(),
        refinements: tracer.refinements,
    })
}

/// Symmetric Hausdorff distance between the sample point sets.
pub fn hausdorff_distance(x: &ArcTrace, y: &ArcTrace) -> Result<f64> {
    if x.samples.is_empty() || y.samples.is_empty() {
        return Err(HillError::EmptyInput("arc trace without samples".into()));
    }
    let one_way = |p: &ArcTrace, q: &ArcTrace| {
        p.samples
            .iter()
            .map(|(_, u)| {
                q.samples
                    .iter()
                    .map(|(_, v)| (u - v).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(one_way(x, y).max(one_way(y, x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_eigenvalue;
    use crate::matrix::{mathieu_scaled_matrix, periodic_pair};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn halton_points_fill_disk() {
        let pts = halton_disk(20, 10.0);
        assert_eq!(pts.len(), 20);
        assert!(pts.iter().all(|z| z.norm() <= 10.0));
        assert!(pts.iter().any(|z| z.re < 0.0) && pts.iter().any(|z| z.im < 0.0));
        for i in 0..20 {
            for j in 0..i {
                assert!((pts[i] - pts[j]).norm() > 1e-3);
            }
        }
    }

    #[test]
    fn equal_products_are_isospectral() {
        let r = compare_operators(
            c(2.0, 0.0),
            c(3.0, 0.0),
            c(6.0, 0.0),
            c(1.0, 0.0),
            &[0.5, 1.5, 3.0],
            -5..=5,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Isospectral, "{r:?}");
        assert_eq!(r.half_width, 30);
    }

    #[test]
    fn different_products_are_distinct() {
        let r = compare_operators(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), &[1.0], -5..=5)
            .unwrap();
        assert_eq!(r.verdict, Verdict::Distinct);
        assert!(r.max_eigenvalue_distance > 1e-3);
    }

    #[test]
    fn one_sided_pairs_share_the_free_spectrum() {
        let r = compare_operators(c(0.0, 0.0), c(5.0, 0.0), c(5.0, 0.0), c(0.0, 0.0), &[1.0], -4..=4)
            .unwrap();
        assert_eq!(r.verdict, Verdict::Isospectral);
        assert_eq!(r.max_eigenvalue_distance, 0.0);
    }

    #[test]
    fn compare_input_errors() {
        assert!(compare_operators(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), &[], 0..=1).is_err());
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 3..=1;
        assert!(compare_operators(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), &[1.0], empty).is_err());
    }

    #[test]
    fn free_arc_is_real_interval() {
        let arc = trace_arc(c(0.0, 0.0), c(0.0, 0.0), 1, 32).unwrap();
        assert_eq!(arc.samples.len(), 32);
        for &(t, lam) in &arc.samples {
            assert!((lam - free_eigenvalue(1, t)).norm() < 1e-9);
        }
        assert_eq!(arc.refinements, 0);
        assert!(trace_arc(c(0.0, 0.0), c(0.0, 0.0), 1, 8).is_err());
    }

    #[test]
    fn arcs_of_equal_products_coincide() {
        let x = trace_arc(c(2.0, 0.0), c(3.0, 0.0), 5, 64).unwrap();
        let y = trace_arc(c(6.0, 0.0), c(1.0, 0.0), 5, 64).unwrap();
        for (p, q) in x.samples.iter().zip(&y.samples) {
            assert!((p.1 - q.1).norm() < 1e-9);
        }
        assert!(hausdorff_distance(&x, &y).unwrap() < 1e-8);
    }

    #[test]
    fn arc_endpoints_are_band_edges() {
        // period-1 eigenvalues are pi^2 times Mathieu-scaled ones at (a, b) / pi^2
        let s = 1.0 / (PI * PI);
        let arc = trace_arc(c(1.0, 0.0), c(1.0, 0.0), 0, 32).unwrap();
        let (_, minus) = periodic_pair(c(s, 0.0), c(s, 0.0), 1, 20).unwrap();
        assert!((arc.endpoint_labels.1 - PI * PI * minus).norm() < 1e-8);
        let m0 = mathieu_scaled_matrix(c(s, 0.0), c(s, 0.0), 0, 20);
        let roots = all_eigenvalues(&m0).unwrap();
        let ground = roots.entries.iter().map(|e| e.lambda).min_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap();
        assert!((arc.endpoint_labels.0 - PI * PI * ground).norm() < 1e-8);

        let arc = trace_arc(c(1.0, 0.0), c(1.0, 0.0), 1, 32).unwrap();
        let (plus2, _) = periodic_pair(c(s, 0.0), c(s, 0.0), 2, 20).unwrap();
        let (_, minus3) = periodic_pair(c(s, 0.0), c(s, 0.0), 3, 20).unwrap();
        assert!((arc.endpoint_labels.0 - PI * PI * plus2).norm() < 1e-8);
        assert!((arc.endpoint_labels.1 - PI * PI * minus3).norm() < 1e-8);
    }

    #[test]
    fn hausdorff_basics() {
        let x = trace_arc(c(1.0, 0.5), c(0.3, 0.0), 3, 16).unwrap();
        assert_eq!(hausdorff_distance(&x, &x).unwrap(), 0.0);
        let mut y = x.clone();
        for s in &mut y.samples {
            s.1 += 1e-3;
        }
        assert!((hausdorff_distance(&x, &y).unwrap() - 1e-3).abs() < 1e-9);
        let empty = ArcTrace {
            n: 0,
            samples: vec![],
            endpoint_labels: (c(0.0, 0.0), c(0.0, 0.0)),
            refinements: 0,
        };
        assert!(hausdorff_distance(&x, &empty).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn random_factorizations_are_isospectral(
            are in -2.0f64..2.0, aim in -2.0f64..2.0,
            bre in -2.0f64..2.0, bim in -2.0f64..2.0,
            r in 0.3f64..3.0, phi in -3.0f64..3.0,
            t in 0.05f64..3.1,
            nmax in 1i64..=8,
        ) {
            let (a, b) = (c(are, aim), c(bre, bim));
            let d = Complex64::from_polar(r, phi);
            let rep = compare_operators(a, b, a * b / d, d, &[t], -nmax..=nmax).unwrap();
            prop_assert_eq!(rep.verdict, Verdict::Isospectral, "{:?}", rep);
        }

        #[test]
        fn reflected_quasimomentum_same_set(
            are in -2.0f64..2.0, aim in -2.0f64..2.0,
            bre in -2.0f64..2.0, bim in -2.0f64..2.0,
            t in 0.05f64..3.1,
        ) {
            let q = make_mathieu(c(are, aim), c(bre, bim));
            let s1 = all_eigenvalues(&build_matrix(&QuasiProblem::new(q.clone(), t).unwrap(), 20).unwrap()).unwrap();
            let s2 = all_eigenvalues(&build_matrix(&QuasiProblem::new(q, -t).unwrap(), 20).unwrap()).unwrap();
            for e in &s1.entries {
                let mirror = s2.lambda(-e.n).unwrap();
                prop_assert!((e.lambda - mirror).norm() < 1e-9);
            }
        }
    }
}
