use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Which solver produced an eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Floquet,
    Matrix,
    Series,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "floquet" => Ok(Method::Floquet),
            "matrix" => Ok(Method::Matrix),
            "series" => Ok(Method::Series),
            other => Err(format!("unknown method {other:?} (floquet|matrix|series)")),
        }
    }
}

/// `lambda_n(t)` labelled by the Fourier index it continues from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "EntryRepr", from = "EntryRepr")]
pub struct SpectrumEntry {
    pub n: i64,
    pub lambda: Complex64,
    pub residual: f64,
    pub method: Method,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
struct EntryRepr {
    n: i64,
    re: f64,
    im: f64,
    #[serde(default)]
    residual: f64,
    #[serde(default = "default_method")]
    method: Method,
}

fn default_method() -> Method {
    Method::Matrix
}

impl From<SpectrumEntry> for EntryRepr {
    fn from(e: SpectrumEntry) -> Self {
        EntryRepr {
            n: e.n,
            re: e.lambda.re,
            im: e.lambda.im,
            residual: e.residual,
            method: e.method,
        }
    }
}

impl From<EntryRepr> for SpectrumEntry {
    fn from(r: EntryRepr) -> Self {
        SpectrumEntry {
            n: r.n,
            lambda: Complex64::new(r.re, r.im),
            residual: r.residual,
            method: r.method,
        }
    }
}

/// Indexed eigenvalues of one fiber operator `H_t`.
///
/// Serializes as `{"t": .., "potential_id": .., "eigs": [{"n", "re", "im", "residual", "method"}]}`,
/// which is also the input format of the `ab` recovery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSlice {
    pub t: f64,
    #[serde(default)]
    pub potential_id: String,
    #[serde(rename = "eigs")]
    pub entries: Vec<SpectrumEntry>,
}

impl SpectrumSlice {
    pub fn new(t: f64, potential_id: String, mut entries: Vec<SpectrumEntry>) -> Self {
        entries.sort_by_key(|e| e.n);
        Self {
            t,
            potential_id,
            entries,
        }
    }

    pub fn get(&self, n: i64) -> Option<&SpectrumEntry> {
        self.entries
            .binary_search_by_key(&n, |e| e.n)
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn lambda(&self, n: i64) -> Option<Complex64> {
        self.get(n).map(|e| e.lambda)
    }

    /// Keeps only entries with `n` in `lo..=hi`.
    pub fn restrict(&self, lo: i64, hi: i64) -> SpectrumSlice {
        SpectrumSlice {
            t: self.t,
            potential_id: self.potential_id.clone(),
            entries: self
                .entries
                .iter()
                .filter(|e| (lo..=hi).contains(&e.n))
                .copied()
                .collect(),
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }
}
