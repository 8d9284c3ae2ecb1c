//! Trigonometric-polynomial potentials `q(x) = sum_n q_n e^{i 2 pi n x}`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HillError, Result};

/// Sparse table of Fourier coefficients. Only nonzero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FourierPotential {
    coeffs: BTreeMap<i64, Complex64>,
}

/// One-sidedness of a potential's Fourier support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    /// every nonzero coefficient has `n >= 1`
    Positive,
    /// every nonzero coefficient has `n <= -1`
    Negative,
    Neither,
}

impl Side {
    /// `+1` for positive-sided, `-1` for negative-sided.
    pub fn sign(self) -> Option<i64> {
        match self {
            Side::Positive => Some(1),
            Side::Negative => Some(-1),
            Side::Neither => None,
        }
    }
}

impl FourierPotential {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a potential from `(n, q_n)` pairs. Zero coefficients are dropped
    /// and repeated indices are summed.
    pub fn from_coeffs<I>(coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let mut map: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (n, q) in coeffs {
            if !q.re.is_finite() || !q.im.is_finite() {
                return Err(HillError::NonFinite(format!("coefficient q_{n} = {q}")));
            }
            *map.entry(n).or_default() += q;
        }
        map.retain(|_, q| *q != Complex64::new(0.0, 0.0));
        Ok(Self { coeffs: map })
    }

    /// `q_n` for index `n` (zero outside the support).
    pub fn coeff(&self, n: i64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&n, &q)| (n, q))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `(min_index, max_index)` of the nonzero support, `None` for the zero potential.
    pub fn support(&self) -> Option<(i64, i64)> {
        let lo = *self.coeffs.keys().next()?;
        let hi = *self.coeffs.keys().next_back()?;
        Some((lo, hi))
    }

    /// Largest `|n|` with `q_n != 0` (0 for the zero potential).
    pub fn bandwidth(&self) -> usize {
        self.support()
            .map(|(lo, hi)| lo.unsigned_abs().max(hi.unsigned_abs()) as usize)
            .unwrap_or(0)
    }

    /// `q(x)`.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&n, &q)| q * Complex64::cis(2.0 * PI * n as f64 * x))
            .sum()
    }

    /// Classifies the support. The zero potential counts as positive-sided.
    pub fn side(&self) -> Side {
        match self.support() {
            None => Side::Positive,
            Some((lo, _)) if lo >= 1 => Side::Positive,
            Some((_, hi)) if hi <= -1 => Side::Negative,
            Some(_) => Side::Neither,
        }
    }

    /// `(q_{-1}, q_1)` when the support lies inside `{-1, 1}`.
    pub fn mathieu_pair(&self) -> Option<(Complex64, Complex64)> {
        if self.coeffs.keys().all(|&n| n == -1 || n == 1) {
            Some((self.coeff(-1), self.coeff(1)))
        } else {
            None
        }
    }

    /// Short content hash, stable across runs and platforms.
    pub fn id(&self) -> String {
        let mut hasher = Sha256::new();
        for (&n, q) in &self.coeffs {
            hasher.update(n.to_le_bytes());
            hasher.update(q.re.to_bits().to_le_bytes());
            hasher.update(q.im.to_bits().to_le_bytes());
        }
        hasher
            .finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn to_spec(&self) -> PotentialSpec {
        PotentialSpec {
            coeffs: self
                .coeffs()
                .map(|(n, q)| CoeffSpec { n, re: q.re, im: q.im })
                .collect(),
        }
    }
}

/// `q(x) = a e^{-i 2 pi x} + b e^{i 2 pi x}`.
pub fn make_mathieu(a: Complex64, b: Complex64) -> FourierPotential {
    FourierPotential::from_coeffs([(-1, a), (1, b)]).expect("finite Mathieu coefficients")
}

/// See [`FourierPotential::side`].
pub fn is_gasymov(p: &FourierPotential) -> Side {
    p.side()
}

/// A potential together with the quasimomentum `t`, i.e. the operator `H_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiProblem {
    pub potential: FourierPotential,
    t: f64,
}

impl QuasiProblem {
    pub fn new(potential: FourierPotential, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(HillError::NonFinite(format!("quasimomentum t = {t}")));
        }
        Ok(Self {
            potential,
            t: normalize_quasimomentum(t),
        })
    }

    /// Quasimomentum in `(-pi, pi]`.
    pub fn t(&self) -> f64 {
        self.t
    }
}

/// Maps `t` into `(-pi, pi]`.
pub fn normalize_quasimomentum(t: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let shifted = t - two_pi * ((t - PI) / two_pi).ceil();
    if shifted <= -PI {
        shifted + two_pi
    } else {
        shifted
    }
}

/// JSON form: `{"coeffs": [{"n": -1, "re": 2.0, "im": 0.0}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub coeffs: Vec<CoeffSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoeffSpec {
    pub n: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl TryFrom<&PotentialSpec> for FourierPotential {
    type Error = HillError;

    fn try_from(spec: &PotentialSpec) -> Result<Self> {
        FourierPotential::from_coeffs(
            spec.coeffs
                .iter()
                .map(|c| (c.n, Complex64::new(c.re, c.im))),
        )
    }
}

/// Parses the `a_re,a_im,b_re,b_im` shorthand.
pub fn parse_mathieu_shorthand(s: &str) -> Result<(Complex64, Complex64)> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| HillError::InvalidArgument(format!("bad Mathieu shorthand {s:?}: {e}")))?;
    if parts.len() != 4 {
        return Err(HillError::InvalidArgument(format!(
            "Mathieu shorthand needs 4 numbers a_re,a_im,b_re,b_im, got {}",
            parts.len()
        )));
    }
    if parts.iter().any(|v| !v.is_finite()) {
        return Err(HillError::NonFinite(s.to_string()));
    }
    Ok((
        Complex64::new(parts[0], parts[1]),
        Complex64::new(parts[2], parts[3]),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mathieu_values() {
        let zero = make_mathieu(c(0.0, 0.0), c(0.0, 0.0));
        assert!(zero.is_zero());
        assert_eq!(zero.evaluate(0.37), c(0.0, 0.0));

        let p = make_mathieu(c(2.0, 0.0), c(3.0, 0.0));
        assert!((p.evaluate(0.5) - c(-5.0, 0.0)).norm() < 1e-14);

        let p = make_mathieu(c(0.0, 1.0), c(1.0, 0.0));
        assert!((p.evaluate(0.25) - c(1.0, 1.0)).norm() < 1e-14);

        let p = make_mathieu(c(1.0, 0.0), c(1.0, 0.0));
        assert!((p.evaluate(0.0) - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn two_mode_evaluation() {
        let p = FourierPotential::from_coeffs([(1, c(1.0, 0.0)), (2, c(0.5, 0.0))]).unwrap();
        assert!((p.evaluate(0.5) - c(-0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn classification() {
        let pos = FourierPotential::from_coeffs([(1, c(1.0, 0.0))]).unwrap();
        assert_eq!(is_gasymov(&pos), Side::Positive);
        let both = make_mathieu(c(1.0, 0.0), c(1.0, 0.0));
        assert_eq!(is_gasymov(&both), Side::Neither);
        let neg = FourierPotential::from_coeffs([(-2, c(0.3, 0.0)), (-1, c(2.0, 0.0))]).unwrap();
        assert_eq!(is_gasymov(&neg), Side::Negative);
        assert_eq!(is_gasymov(&FourierPotential::zero()), Side::Positive);
        let with_mean = FourierPotential::from_coeffs([(0, c(1.0, 0.0)), (1, c(1.0, 0.0))]).unwrap();
        assert_eq!(is_gasymov(&with_mean), Side::Neither);
    }

    #[test]
    fn support_and_pair() {
        let p = make_mathieu(c(2.0, 0.0), c(3.0, 0.0));
        assert_eq!(p.support(), Some((-1, 1)));
        assert_eq!(p.mathieu_pair(), Some((c(2.0, 0.0), c(3.0, 0.0))));
        let half = make_mathieu(c(0.0, 0.0), c(3.0, 0.0));
        assert_eq!(half.support(), Some((1, 1)));
        let wide = FourierPotential::from_coeffs([(2, c(1.0, 0.0))]).unwrap();
        assert_eq!(wide.mathieu_pair(), None);
        assert_eq!(wide.bandwidth(), 2);
    }

    #[test]
    fn quasimomentum_normalization() {
        assert!((normalize_quasimomentum(PI) - PI).abs() < 1e-15);
        assert!((normalize_quasimomentum(-PI) - PI).abs() < 1e-15);
        assert!((normalize_quasimomentum(3.0 * PI) - PI).abs() < 1e-12);
        assert!((normalize_quasimomentum(1.0) - 1.0).abs() < 1e-15);
        assert!((normalize_quasimomentum(-1.0 - 4.0 * PI) + 1.0).abs() < 1e-12);
        assert!(QuasiProblem::new(FourierPotential::zero(), f64::NAN).is_err());
    }

    #[test]
    fn json_round_trip() {
        let json = r#"{"coeffs": [{"n": -1, "re": 2.0, "im": 0.5}, {"n": 1, "re": 3.0}]}"#;
        let spec: PotentialSpec = serde_json::from_str(json).unwrap();
        let p = FourierPotential::try_from(&spec).unwrap();
        assert_eq!(p.coeff(-1), c(2.0, 0.5));
        assert_eq!(p.coeff(1), c(3.0, 0.0));
        let back = FourierPotential::try_from(&p.to_spec()).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.id(), p.id());
        assert_ne!(p.id(), make_mathieu(c(6.0, 0.0), c(1.0, 0.0)).id());
    }

    #[test]
    fn shorthand() {
        let (a, b) = parse_mathieu_shorthand("2,0,3,-1.5").unwrap();
        assert_eq!((a, b), (c(2.0, 0.0), c(3.0, -1.5)));
        assert!(parse_mathieu_shorthand("2,0,3").is_err());
        assert!(parse_mathieu_shorthand("2,x,3,0").is_err());
    }

    fn arb_potential() -> impl Strategy<Value = FourierPotential> {
        prop::collection::vec((-4i64..=4, -3.0f64..3.0, -3.0f64..3.0), 0..5).prop_map(|v| {
            FourierPotential::from_coeffs(v.into_iter().map(|(n, re, im)| (n, c(re, im)))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn periodic_in_x(p in arb_potential(), x in -10.0f64..10.0) {
            let (q0, q1) = (p.evaluate(x), p.evaluate(x + 1.0));
            prop_assert!((q0 - q1).norm() <= 1e-12 * q0.norm().max(1.0));
        }

        #[test]
        fn mathieu_support(a_re in 0.1f64..3.0, b_im in 0.1f64..3.0) {
            let p = make_mathieu(c(a_re, 0.0), c(0.0, b_im));
            prop_assert_eq!(p.coeffs().map(|(n, _)| n).collect::<Vec<_>>(), vec![-1, 1]);
        }

        #[test]
        fn conjugate_symmetric_is_real(
            modes in prop::collection::vec((1i64..=4, -3.0f64..3.0, -3.0f64..3.0), 1..4),
            mean in -2.0f64..2.0,
            x in -3.0f64..3.0,
        ) {
            let mut coeffs = vec![(0, c(mean, 0.0))];
            for (n, re, im) in modes {
                coeffs.push((n, c(re, im)));
                coeffs.push((-n, c(re, -im)));
            }
            let p = FourierPotential::from_coeffs(coeffs).unwrap();
            prop_assert!(p.evaluate(x).im.abs() < 1e-12);
        }
    }
}
