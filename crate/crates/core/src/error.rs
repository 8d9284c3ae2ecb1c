use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, HillError>;

/// Every failure mode of the numerical pipelines.
///
/// The variant name doubles as the machine-readable error kind emitted by the
/// CLI (see [`HillError::kind`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HillError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence { what: String, iterations: usize },

    #[error("Newton iterate for n={n} left the disk |lambda-(2 pi n+t)^2| <= {radius} (at {lambda})")]
    RootEscape {
        n: i64,
        radius: f64,
        lambda: Complex64,
    },

    #[error("index n={n} is resonant at t={t}: seeds of n and its partner nearly coincide")]
    ResonantIndex { n: i64, t: f64 },

    #[error("vanishing denominator at step s={step} of path {path:?}")]
    VanishingDenominator { path: Vec<i64>, step: usize },

    #[error("even-order series coefficient requested (k={0}); a_k vanishes identically for even k")]
    EvenOrder(usize),

    #[error("series diverging: three consecutive terms grew (last |a|={last})")]
    SeriesDiverging { last: f64 },

    #[error("fixed-point iterate left U(n,t) (|lambda-(2 pi n+t)^2|={distance})")]
    LeftDisk { distance: f64 },

    #[error("(n={n}, t={t}) lies outside the series validity region")]
    OutsideValidity { n: i64, t: f64 },

    #[error("potential support {support:?} exceeds the matrix bandwidth {bandwidth}")]
    UnsupportedPotential {
        support: Option<(i64, i64)>,
        bandwidth: usize,
    },

    #[error("{count} eigenvalues fall within distance 1 of n^2={center}")]
    DegenerateCluster { count: usize, center: f64 },

    #[error("index matching failed: {0}")]
    InconsistentIndexing(String),

    #[error("arc for n={n} broke near t={t} after refinement")]
    ArcBroken { n: i64, t: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("noisy data: estimate sequence is not Cauchy ({0})")]
    NoisyData(String),

    #[error("gap {gap:e} is below the trustworthy subtraction level")]
    PrecisionLoss { gap: f64 },

    #[error("potential is not one-sided (Gasymov)")]
    NotGasymov,

    #[error("resonant quasimomentum t={0}: expansion requires t != 0, pi")]
    ResonantQuasimomentum(f64),

    #[error("empty input: {0}")]
    EmptyInput(String),
}

impl HillError {
    /// Stable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            HillError::InvalidArgument(_) => "InvalidArgument",
            HillError::NonFinite(_) => "NonFinite",
            HillError::NonConvergence { .. } => "NonConvergence",
            HillError::RootEscape { .. } => "RootEscape",
            HillError::ResonantIndex { .. } => "ResonantIndex",
            HillError::VanishingDenominator { .. } => "VanishingDenominator",
            HillError::EvenOrder(_) => "EvenOrder",
            HillError::SeriesDiverging { .. } => "SeriesDiverging",
            HillError::LeftDisk { .. } => "LeftDisk",
            HillError::OutsideValidity { .. } => "OutsideValidity",
            HillError::UnsupportedPotential { .. } => "UnsupportedPotential",
            HillError::DegenerateCluster { .. } => "DegenerateCluster",
            HillError::InconsistentIndexing(_) => "InconsistentIndexing",
            HillError::ArcBroken { .. } => "ArcBroken",
            HillError::InsufficientData(_) => "InsufficientData",
            HillError::NoisyData(_) => "NoisyData",
            HillError::PrecisionLoss { .. } => "PrecisionLoss",
            HillError::NotGasymov => "NotGasymov",
            HillError::ResonantQuasimomentum(_) => "ResonantQuasimomentum",
            HillError::EmptyInput(_) => "EmptyInput",
        }
    }
}
