//! Command-line driver.
//!
//! Flags are merged with an optional JSON config (`--config`, same keys as the
//! flags with underscores; flags win), resolved into a [`RunConfig`], and the
//! resolved config is embedded in every output. Exit codes: 0 success,
//! 1 configuration or I/O error, 2 numerical failure.

use std::ffi::OsString;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::HillError;
use crate::floquet::{discriminant, eigenvalues_by_discriminant};
use crate::gaps::{gap_sweep, GapReport};
use crate::gasymov::{eigenfunction, residual, synthesize, DEFAULT_ORDER};
use crate::inverse::recover_ab_from_slice;
use crate::isospectral::{compare_operators, trace_arc, ArcTrace};
use crate::matrix::matrix_spectrum;
use crate::perturbation::{a_series_shift, eigenvalue_by_series, TOL_FLOOR};
use crate::potential::{
    make_mathieu, normalize_quasimomentum, parse_mathieu_shorthand, FourierPotential,
    PotentialSpec, QuasiProblem, Side,
};
use crate::spectrum::{Method, SpectrumEntry, SpectrumSlice};
use crate::{free_eigenvalue, SCHEMA};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const THREADS_ENV: &str = "HILLSPEC_THREADS";

#[derive(Parser, Debug)]
#[command(name = "hillspec", version, about = "Spectra of complex Hill operators with quasi-periodic boundary conditions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Eigenvalues lambda_n(t) by matrix truncation, discriminant roots or the series
    Spectrum(Options),
    /// Hill discriminant F(lambda) and F'(lambda)
    Discriminant(Options),
    /// Compare the spectra of two two-mode potentials
    Isospectral(Options),
    /// Trace the arcs lambda_n(t), 0 <= t <= pi
    Arcs(Options),
    /// Recover ab from a spectrum file
    RecoverAb(Options),
    /// Eigenfunction of a one-sided potential
    Gasymov(Options),
    /// Periodic/antiperiodic gaps against their asymptotic
    Gaps(Options),
}

impl Command {
    fn parts(&self) -> (&'static str, &Options) {
        match self {
            Command::Spectrum(o) => ("spectrum", o),
            Command::Discriminant(o) => ("discriminant", o),
            Command::Isospectral(o) => ("isospectral", o),
            Command::Arcs(o) => ("arcs", o),
            Command::RecoverAb(o) => ("recover-ab", o),
            Command::Gasymov(o) => ("gasymov", o),
            Command::Gaps(o) => ("gaps", o),
        }
    }
}

/// Flags shared by all subcommands; also the schema of `--config` files.
#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    /// Two-mode potential a e^{-i2 pi x} + b e^{i2 pi x} as a_re,a_im,b_re,b_im
    #[arg(long, allow_hyphen_values = true)]
    pub mathieu: Option<String>,
    /// JSON potential file {"coeffs": [{"n", "re", "im"}]}
    #[arg(long)]
    pub potential: Option<PathBuf>,
    /// Quasimomentum (normalized into (-pi, pi])
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Number of equispaced quasimomenta in (-pi, pi]
    #[arg(long)]
    pub t_grid: Option<usize>,
    /// Index range lo..hi (or a single index)
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<String>,
    /// floquet | matrix | series
    #[arg(long)]
    pub method: Option<String>,
    /// Matrix truncation half-width
    #[arg(long)]
    pub half_width: Option<usize>,
    /// Two-mode coefficient pair a_re,a_im,b_re,b_im (give twice)
    #[arg(long, allow_hyphen_values = true)]
    pub pair: Vec<String>,
    /// Largest gap index
    #[arg(long)]
    pub n_max: Option<u32>,
    /// Input spectrum file for recover-ab
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output file (stdout when absent)
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// json | csv
    #[arg(long)]
    pub format: Option<String>,
    /// Keep t = 0 and t = pi in grids for the floquet and series methods
    #[arg(long)]
    pub include_resonant: bool,
    /// Tolerance for the series fixed point
    #[arg(long)]
    pub tol: Option<f64>,
    /// Spectral parameter re,im (repeatable)
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Vec<String>,
    /// Arc grid size
    #[arg(long)]
    pub grid: Option<usize>,
    /// Truncation order P of the one-sided eigenfunction
    #[arg(long)]
    pub order: Option<usize>,
    /// Sample count for eigenfunction values and residuals
    #[arg(long)]
    pub samples: Option<usize>,
    /// JSON file supplying any of the options above
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Options {
    /// Flags override config-file values.
    fn merged_with(self, file: Options) -> Options {
        Options {
            mathieu: self.mathieu.or(file.mathieu),
            potential: self.potential.or(file.potential),
            t: self.t.or(file.t),
            t_grid: self.t_grid.or(file.t_grid),
            n: self.n.or(file.n),
            method: self.method.or(file.method),
            half_width: self.half_width.or(file.half_width),
            pair: if self.pair.is_empty() { file.pair } else { self.pair },
            n_max: self.n_max.or(file.n_max),
            input: self.input.or(file.input),
            output: self.output.or(file.output),
            format: self.format.or(file.format),
            include_resonant: self.include_resonant || file.include_resonant,
            tol: self.tol.or(file.tol),
            lambda: if self.lambda.is_empty() { file.lambda } else { self.lambda },
            grid: self.grid.or(file.grid),
            order: self.order.or(file.order),
            samples: self.samples.or(file.samples),
            config: self.config,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Fully resolved and validated run description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub potential: Option<PotentialSpec>,
    /// `[a_re, a_im, b_re, b_im]` when the potential is two-mode
    pub mathieu: Option<[f64; 4]>,
    pub pairs: Vec<[f64; 4]>,
    /// normalized quasimomenta, ascending
    pub t: Vec<f64>,
    pub n_range: Option<(i64, i64)>,
    pub method: Method,
    pub half_width: Option<usize>,
    pub n_max: u32,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub include_resonant: bool,
    pub tol: f64,
    pub lambda: Vec<[f64; 2]>,
    pub grid: usize,
    pub order: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Numerical(HillError),
    Io { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "ConfigError",
            CliError::Numerical(e) => e.kind(),
            CliError::Io { .. } => "IoError",
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Config(m) => m.clone(),
            CliError::Numerical(e) => e.to_string(),
            CliError::Io { path, message } => format!("{}: {message}", path.display()),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"error": {"kind": self.kind(), "message": self.message()}})
    }
}

impl From<HillError> for CliError {
    fn from(e: HillError) -> Self {
        CliError::Numerical(e)
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

/// `"lo..hi"`, `"lo..=hi"` or a single integer.
pub fn parse_range(s: &str) -> Result<(i64, i64), CliError> {
    let bad = || config_err(format!("bad index range {s:?} (expected lo..hi)"));
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (lo.trim(), hi.trim().trim_start_matches('=')),
        None => (s.trim(), s.trim()),
    };
    let lo: i64 = lo.parse().map_err(|_| bad())?;
    let hi: i64 = hi.parse().map_err(|_| bad())?;
    if hi < lo {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| config_err(format!("bad complex value {s:?}: {e}")))?;
    match parts[..] {
        [re, im] if re.is_finite() && im.is_finite() => Ok(Complex64::new(re, im)),
        _ => Err(config_err(format!("complex value {s:?} must be re,im with finite parts"))),
    }
}

fn quad(a: Complex64, b: Complex64) -> [f64; 4] {
    [a.re, a.im, b.re, b.im]
}

fn unquad(q: [f64; 4]) -> (Complex64, Complex64) {
    (Complex64::new(q[0], q[1]), Complex64::new(q[2], q[3]))
}

/// `count` equispaced points `-pi + 2 pi j / count`, `j = 1..=count`, with
/// exact `0` and `pi` where they occur.
pub fn t_grid(count: usize) -> Vec<f64> {
    (1..=count)
        .map(|j| {
            if j == count {
                PI
            } else if 2 * j == count {
                0.0
            } else {
                -PI + 2.0 * PI * j as f64 / count as f64
            }
        })
        .collect()
}

impl RunConfig {
    pub fn resolve(command: &'static str, opts: Options) -> Result<RunConfig, CliError> {
        let opts = match &opts.config {
            Some(path) => {
                let file: Options = read_json(path)?;
                opts.clone().merged_with(file)
            }
            None => opts,
        };

        let (potential, mathieu) = match (&opts.mathieu, &opts.potential) {
            (Some(_), Some(_)) => {
                return Err(config_err("give either --mathieu or --potential, not both"))
            }
            (Some(s), None) => {
                let (a, b) = parse_mathieu_shorthand(s).map_err(config_err)?;
                (Some(make_mathieu(a, b).to_spec()), Some(quad(a, b)))
            }
            (None, Some(path)) => {
                let spec: PotentialSpec = read_json(path)?;
                let p = FourierPotential::try_from(&spec).map_err(config_err)?;
                let two_mode = p.mathieu_pair().map(|(a, b)| quad(a, b));
                (Some(p.to_spec()), two_mode)
            }
            (None, None) => (None, None),
        };

        let method: Method = match &opts.method {
            Some(m) => m.parse().map_err(config_err)?,
            None => Method::Matrix,
        };
        let default_format = if matches!(command, "gaps" | "arcs") {
            Format::Csv
        } else {
            Format::Json
        };
        let format = match opts.format.as_deref() {
            None => default_format,
            Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            Some(other) => return Err(config_err(format!("unknown format {other:?} (json|csv)"))),
        };

        let t = match (opts.t, opts.t_grid) {
            (Some(_), Some(_)) => return Err(config_err("give either --t or --t-grid, not both")),
            (Some(t), None) => {
                if !t.is_finite() {
                    return Err(config_err(format!("t must be finite, got {t}")));
                }
                vec![normalize_quasimomentum(t)]
            }
            (None, Some(0)) => return Err(config_err("--t-grid must be positive")),
            (None, Some(g)) => {
                let keep_resonant = opts.include_resonant
                    || !(command == "spectrum" && method != Method::Matrix);
                t_grid(g)
                    .into_iter()
                    .filter(|&t| keep_resonant || (t != 0.0 && t != PI))
                    .collect()
            }
            (None, None) => Vec::new(),
        };

        let n_range = opts.n.as_deref().map(parse_range).transpose()?;
        let tol = opts.tol.unwrap_or(1e-12);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(config_err(format!("tol must be positive, got {tol}")));
        }
        let pairs = opts
            .pair
            .iter()
            .map(|s| parse_mathieu_shorthand(s).map(|(a, b)| quad(a, b)).map_err(config_err))
            .collect::<Result<Vec<_>, _>>()?;
        let lambda = opts
            .lambda
            .iter()
            .map(|s| parse_complex(s).map(|z| [z.re, z.im]))
            .collect::<Result<Vec<_>, _>>()?;
        for (name, v) in [("half-width", opts.half_width), ("grid", opts.grid), ("order", opts.order), ("samples", opts.samples)] {
            if v == Some(0) {
                return Err(config_err(format!("--{name} must be positive")));
            }
        }

        let cfg = RunConfig {
            command,
            potential,
            mathieu,
            pairs,
            t,
            n_range,
            method,
            half_width: opts.half_width,
            n_max: opts.n_max.unwrap_or(5),
            input: opts.input,
            output: opts.output,
            format,
            include_resonant: opts.include_resonant,
            tol,
            lambda,
            grid: opts.grid.unwrap_or(64),
            order: opts.order.unwrap_or(DEFAULT_ORDER),
            samples: opts.samples.unwrap_or(64),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let need_potential = || {
            if self.potential.is_none() {
                Err(config_err(format!("{} needs --mathieu or --potential", self.command)))
            } else {
                Ok(())
            }
        };
        let need_mathieu = || {
            if self.mathieu.is_none() {
                Err(config_err(format!("{} needs a two-mode potential (--mathieu)", self.command)))
            } else {
                Ok(())
            }
        };
        let need_t = || {
            if self.t.is_empty() {
                Err(config_err(format!("{} needs --t or --t-grid", self.command)))
            } else {
                Ok(())
            }
        };
        match self.command {
            "spectrum" => {
                need_potential()?;
                need_t()?;
                if self.method == Method::Series {
                    need_mathieu()?;
                    if self.tol < TOL_FLOOR {
                        return Err(config_err(format!("series tolerance below {TOL_FLOOR}")));
                    }
                }
            }
            "discriminant" => {
                need_potential()?;
                if self.lambda.is_empty() {
                    return Err(config_err("discriminant needs at least one --lambda re,im"));
                }
            }
            "isospectral" => {
                need_t()?;
                if self.pairs.len() != 2 {
                    return Err(config_err(format!(
                        "isospectral needs exactly two --pair values, got {}",
                        self.pairs.len()
                    )));
                }
                if self.format == Format::Csv {
                    return Err(config_err("isospectral writes JSON only"));
                }
            }
            "arcs" => {
                need_mathieu()?;
                if self.n_range.is_none() {
                    return Err(config_err("arcs needs --n"));
                }
            }
            "recover-ab" => {
                if self.input.is_none() {
                    return Err(config_err("recover-ab needs --input"));
                }
            }
            "gasymov" => {
                need_potential()?;
                if self.t.len() != 1 {
                    return Err(config_err("gasymov needs a single --t"));
                }
                if let Some((lo, hi)) = self.n_range {
                    if lo != hi {
                        return Err(config_err("gasymov takes a single index --n"));
                    }
                }
                if self.samples < 32 {
                    return Err(config_err("gasymov needs --samples >= 32"));
                }
            }
            "gaps" => {
                need_mathieu()?;
                if !(2..=crate::gaps::N_MAX).contains(&self.n_max) {
                    return Err(config_err(format!("--n-max must lie in 2..={}", crate::gaps::N_MAX)));
                }
            }
            other => return Err(config_err(format!("unknown command {other}"))),
        }
        Ok(())
    }

    fn potential(&self) -> Result<FourierPotential, CliError> {
        let spec = self
            .potential
            .as_ref()
            .ok_or_else(|| config_err("no potential"))?;
        FourierPotential::try_from(spec).map_err(config_err)
    }

    fn n_range_or(&self, default: (i64, i64)) -> (i64, i64) {
        self.n_range.unwrap_or(default)
    }
}

fn header(cfg: &RunConfig) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("version".into(), json!(VERSION));
    m.insert("config".into(), serde_json::to_value(cfg).expect("config serializes"));
    m
}

fn json_body(cfg: &RunConfig, fields: Value) -> String {
    let mut m = header(cfg);
    if let Value::Object(extra) = fields {
        m.extend(extra);
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("json serializes");
    s.push('\n');
    s
}

fn csv_preamble(cfg: &RunConfig) -> String {
    format!(
        "# schema={SCHEMA}\n# version={VERSION}\n# config={}\n",
        serde_json::to_string(cfg).expect("config serializes")
    )
}

/// Fixed 17-significant-digit formatting for CSV columns.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn series_entry(n: i64, t: f64, a: Complex64, b: Complex64, tol: f64) -> crate::Result<SpectrumEntry> {
    // lambda_n(-t) = lambda_{-n}(t): the reflected problem has the same product ab
    let (m, s) = if t < 0.0 { (-n, -t) } else { (n, t) };
    let root = eigenvalue_by_series(m, s, a, b, tol)?;
    let check = a_series_shift(m, s, a, b, root.shift, (tol * 1e-2).max(TOL_FLOOR))?;
    Ok(SpectrumEntry {
        n,
        lambda: root.lambda,
        residual: (check.value - root.shift).norm(),
        method: Method::Series,
    })
}

fn spectrum_slice(cfg: &RunConfig, t: f64) -> Result<SpectrumSlice, CliError> {
    let potential = cfg.potential()?;
    let (lo, hi) = cfg.n_range_or((-5, 5));
    let prob = QuasiProblem::new(potential.clone(), t)?;
    Ok(match cfg.method {
        Method::Matrix => {
            let nmax = lo.abs().max(hi.abs()) as usize;
            let hw = cfg.half_width.unwrap_or((2 * nmax + 20).max(30));
            matrix_spectrum(&prob, hw)?.restrict(lo, hi)
        }
        Method::Floquet => eigenvalues_by_discriminant(&prob, lo..=hi)?,
        Method::Series => {
            let (a, b) = unquad(cfg.mathieu.expect("validated"));
            let entries = (lo..=hi)
                .collect::<Vec<_>>()
                .par_iter()
                .map(|&n| series_entry(n, prob.t(), a, b, cfg.tol))
                .collect::<crate::Result<Vec<_>>>()?;
            SpectrumSlice::new(prob.t(), potential.id(), entries)
        }
    })
}

fn run_spectrum(cfg: &RunConfig) -> Result<String, CliError> {
    let slices = cfg
        .t
        .par_iter()
        .map(|&t| spectrum_slice(cfg, t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut slices = slices;
    slices.sort_by(|x, y| x.t.total_cmp(&y.t));
    Ok(match cfg.format {
        Format::Json if slices.len() == 1 => {
            json_body(cfg, serde_json::to_value(&slices[0]).expect("slice serializes"))
        }
        Format::Json => json_body(cfg, json!({ "slices": slices })),
        Format::Csv => {
            let mut s = csv_preamble(cfg);
            s.push_str("t,n,re,im,residual,method\n");
            for slice in &slices {
                for e in &slice.entries {
                    let method = serde_json::to_value(e.method).expect("method serializes");
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{}",
                        num(slice.t),
                        e.n,
                        num(e.lambda.re),
                        num(e.lambda.im),
                        num(e.residual),
                        method.as_str().unwrap_or_default()
                    );
                }
            }
            s
        }
    })
}

fn run_discriminant(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.potential()?;
    let samples = cfg
        .lambda
        .par_iter()
        .map(|&[re, im]| discriminant(&p, Complex64::new(re, im)))
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(match cfg.format {
        Format::Json => {
            let rows: Vec<Value> = samples
                .iter()
                .map(|s| {
                    json!({
                        "lambda": {"re": s.lambda.re, "im": s.lambda.im},
                        "f": {"re": s.f_value.re, "im": s.f_value.im},
                        "df": {"re": s.f_derivative.re, "im": s.f_derivative.im},
                        "steps": s.step_count,
                    })
                })
                .collect();
            json_body(cfg, json!({ "samples": rows }))
        }
        Format::Csv => {
            let mut s = csv_preamble(cfg);
            s.push_str("lambda_re,lambda_im,f_re,f_im,df_re,df_im,steps\n");
            for d in &samples {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    num(d.lambda.re),
                    num(d.lambda.im),
                    num(d.f_value.re),
                    num(d.f_value.im),
                    num(d.f_derivative.re),
                    num(d.f_derivative.im),
                    d.step_count
                );
            }
            s
        }
    })
}

fn run_isospectral(cfg: &RunConfig) -> Result<String, CliError> {
    let (a, b) = unquad(cfg.pairs[0]);
    let (c, d) = unquad(cfg.pairs[1]);
    let (lo, hi) = cfg.n_range_or((-5, 5));
    let report = compare_operators(a, b, c, d, &cfg.t, lo..=hi)?;
    Ok(json_body(cfg, json!({ "report": report })))
}

/// Data accepted by [`emit_plot_data`].
#[derive(Debug, Clone, Copy)]
pub enum PlotData<'a> {
    Arcs(&'a [ArcTrace]),
    Gaps(&'a [GapReport]),
}

/// CSV rows: arcs as `t,re,im,n` sorted by t then n; gaps as `n,abs_gap,predicted,ratio,phase`.
pub fn plot_csv(data: PlotData<'_>) -> Result<String, CliError> {
    let mut s = String::new();
    match data {
        PlotData::Arcs(arcs) => {
            if arcs.iter().all(|a| a.samples.is_empty()) {
                return Err(CliError::Numerical(HillError::EmptyInput("arc trace without samples".into())));
            }
            s.push_str("t,re,im,n\n");
            let mut rows: Vec<(f64, i64, Complex64)> = arcs
                .iter()
                .flat_map(|a| a.samples.iter().map(move |&(t, l)| (t, a.n, l)))
                .collect();
            rows.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            for (t, n, l) in rows {
                let _ = writeln!(s, "{},{},{},{}", num(t), num(l.re), num(l.im), n);
            }
        }
        PlotData::Gaps(reports) => {
            if reports.is_empty() {
                return Err(CliError::Numerical(HillError::EmptyInput("no gap reports".into())));
            }
            s.push_str("n,abs_gap,predicted,ratio,phase\n");
            for r in reports {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.n,
                    num(r.gap_computed.norm()),
                    num(r.gap_predicted_magnitude),
                    r.ratio.map(num).unwrap_or_default(),
                    num(r.phase)
                );
            }
        }
    }
    Ok(s)
}

/// Writes plot CSV to `path`; nothing is created when the input is empty.
pub fn emit_plot_data(data: PlotData<'_>, path: &Path) -> Result<(), CliError> {
    let body = plot_csv(data)?;
    fs::write(path, body).map_err(|e| io_err(path, e))
}

fn run_arcs(cfg: &RunConfig) -> Result<String, CliError> {
    let (a, b) = unquad(cfg.mathieu.expect("validated"));
    let (lo, hi) = cfg.n_range.expect("validated");
    let arcs = (lo..=hi)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&n| trace_arc(a, b, n, cfg.grid))
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(match cfg.format {
        Format::Json => json_body(cfg, json!({ "arcs": arcs })),
        Format::Csv => csv_preamble(cfg) + &plot_csv(PlotData::Arcs(&arcs))?,
    })
}

fn run_recover(cfg: &RunConfig) -> Result<String, CliError> {
    let path = cfg.input.as_ref().expect("validated");
    let value: Value = read_json(path)?;
    let mut slice: SpectrumSlice = match value.get("slices") {
        Some(Value::Array(list)) if list.len() == 1 => serde_json::from_value(list[0].clone()),
        Some(_) => {
            return Err(config_err(format!(
                "{}: recover-ab needs a single spectrum slice",
                path.display()
            )))
        }
        None => serde_json::from_value(value),
    }
    .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    if let Some((lo, hi)) = cfg.n_range {
        slice = slice.restrict(lo, hi);
    }
    let result = recover_ab_from_slice(&slice)?;
    Ok(match cfg.format {
        Format::Json => json_body(cfg, json!({ "t": slice.t, "result": result })),
        Format::Csv => {
            let mut s = csv_preamble(cfg);
            s.push_str("n,estimate_re,estimate_im\n");
            for (n, e) in &result.convergence_sequence {
                let _ = writeln!(s, "{},{},{}", n, num(e.re), num(e.im));
            }
            s
        }
    })
}

fn run_gasymov(cfg: &RunConfig) -> Result<String, CliError> {
    let q = cfg.potential()?;
    if q.side() == Side::Neither {
        return Err(HillError::NotGasymov.into());
    }
    let n = cfg.n_range.map_or(0, |r| r.0);
    let t = cfg.t[0];
    let ef = eigenfunction(n, t, &q, cfg.order)?;
    let res = residual(&ef, &q, cfg.samples)?;
    Ok(match cfg.format {
        Format::Json => json_body(
            cfg,
            json!({
                "eigenfunction": ef.to_record(),
                "residual": res,
                "free_eigenvalue": free_eigenvalue(n, t),
            }),
        ),
        Format::Csv => {
            let mut s = csv_preamble(cfg);
            s.push_str("x,re,im\n");
            for j in 0..cfg.samples {
                let x = j as f64 / cfg.samples as f64;
                let v = synthesize(&ef, x);
                let _ = writeln!(s, "{},{},{}", num(x), num(v.re), num(v.im));
            }
            s
        }
    })
}

fn run_gaps(cfg: &RunConfig) -> Result<String, CliError> {
    let (a, b) = unquad(cfg.mathieu.expect("validated"));
    let sweep = gap_sweep(a, b, cfg.n_max)?;
    Ok(match cfg.format {
        Format::Json => json_body(cfg, serde_json::to_value(&sweep).expect("sweep serializes")),
        Format::Csv => csv_preamble(cfg) + &plot_csv(PlotData::Gaps(&sweep.reports))?,
    })
}

/// Output body for a resolved config.
pub fn run(cfg: &RunConfig) -> Result<String, CliError> {
    match cfg.command {
        "spectrum" => run_spectrum(cfg),
        "discriminant" => run_discriminant(cfg),
        "isospectral" => run_isospectral(cfg),
        "arcs" => run_arcs(cfg),
        "recover-ab" => run_recover(cfg),
        "gasymov" => run_gasymov(cfg),
        "gaps" => run_gaps(cfg),
        other => Err(config_err(format!("unknown command {other}"))),
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| config_err(format!("{THREADS_ENV}={v:?} is not a positive integer")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(config_err)
}

fn execute(cli: Cli) -> Result<Option<(String, Option<PathBuf>)>, CliError> {
    let (name, opts) = cli.command.parts();
    let cfg = RunConfig::resolve(name, opts.clone())?;
    let body = thread_pool()?.install(|| run(&cfg))?;
    Ok(Some((body, cfg.output.clone())))
}

/// Parses `args`, runs, and writes the result; returns the exit code.
pub fn main_entry<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = execute(cli).and_then(|out| match out {
        Some((body, Some(path))) => fs::write(&path, body).map_err(|e| io_err(&path, e)),
        Some((body, None)) => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| io_err(Path::new("<stdout>"), e)),
        None => Ok(()),
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            println!("{}", e.to_json());
            eprintln!("hillspec: {}", e.message());
            e.exit_code()
        }
    }
}
