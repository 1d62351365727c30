use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::combination::{CombinationSpec, Term};
use crate::diagnostics::{CompactnessParams, IndexTolerances, PathConfig, SequenceThresholds};
use crate::norms::{GridSpec, NormKind};
use crate::symbols::{Symbol, SymbolError};

pub const MAX_NMAX: u32 = 100_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("{key}: {reason}")]
    Invalid { key: String, reason: String },
    #[error("{key}: {source}")]
    InvalidSelfMap { key: String, source: SymbolError },
}

impl ConfigError {
    pub fn key(&self) -> &str {
        match self {
            ConfigError::Io { .. } => "",
            ConfigError::Invalid { key, .. } | ConfigError::InvalidSelfMap { key, .. } => key,
        }
    }

    fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Invalid { key: key.into(), reason: reason.into() }
    }
}

/// One `{lambda = [re, im], symbol = "..."}` entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub lambda: Complex64,
    pub symbol: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Plot,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "plot" | "plotdata" => Ok(Format::Plot),
            other => Err(format!("unknown format `{other}` (expected json, csv or plot)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, formats: vec![Format::Json] }
    }
}

/// Path-sampling tolerances; see [`IndexTolerances`] for the index-set ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Tail-variation bound for the convergence of sampled sequences.
    pub tol_conv: f64,
    pub tol_one: f64,
    pub tol_zero: f64,
    pub tol_sharp: f64,
    pub band: f64,
    pub sum_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let i = IndexTolerances::default();
        Self {
            tol_conv: 1e-3,
            tol_one: i.tol_one,
            tol_zero: i.tol_zero,
            tol_sharp: i.tol_sharp,
            band: i.band,
            sum_tol: i.sum_tol,
        }
    }
}

impl Tolerances {
    pub fn index(&self) -> IndexTolerances {
        IndexTolerances {
            tol_one: self.tol_one,
            tol_zero: self.tol_zero,
            tol_sharp: self.tol_sharp,
            band: self.band,
            sum_tol: self.sum_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundaryConfig {
    pub levels: u32,
    pub ladder_per_level: u32,
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        let p = CompactnessParams::default();
        Self { levels: p.levels, ladder_per_level: p.ladder_per_level }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TestfnConfig {
    pub enabled: bool,
    pub truncation: usize,
    /// Fixed `N` of the head sums.
    pub head: usize,
    /// At most this many frames, taken from the last step of paths in Δ.
    pub max_frames: usize,
}

impl Default for TestfnConfig {
    fn default() -> Self {
        Self { enabled: true, truncation: 1024, head: 8, max_frames: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Seed for random boundary points; always echoed in the report.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_norm")]
    pub norm: NormKind,
    #[serde(default = "default_nmax")]
    pub n_max: u32,
    pub combination: Vec<TermConfig>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub paths: PathConfig,
    #[serde(default)]
    pub thresholds: SequenceThresholds,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub testfns: TestfnConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_norm() -> NormKind {
    NormKind::Bloch
}

fn default_nmax() -> u32 {
    256
}

impl RunConfig {
    /// Defaults everywhere, with the given terms.
    pub fn with_terms<I: IntoIterator<Item = (Complex64, String)>>(terms: I) -> Self {
        Self {
            seed: 0,
            norm: default_norm(),
            n_max: default_nmax(),
            combination: terms.into_iter().map(|(lambda, symbol)| TermConfig { lambda, symbol }).collect(),
            grid: GridSpec::default(),
            paths: PathConfig::default(),
            thresholds: SequenceThresholds::default(),
            tolerances: Tolerances::default(),
            boundary: BoundaryConfig::default(),
            testfns: TestfnConfig::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::new(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            ConfigError::invalid(
                if key == "." { String::new() } else { key },
                e.into_inner().message().trim().to_string(),
            )
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn params(&self) -> CompactnessParams {
        CompactnessParams {
            grid: self.grid,
            n_max: self.n_max,
            thresholds: self.thresholds,
            levels: self.boundary.levels,
            ladder_per_level: self.boundary.ladder_per_level,
        }
    }

    /// Compiles every symbol (with self-map validation) into a combination.
    pub fn spec(&self) -> Result<CombinationSpec, ConfigError> {
        if self.combination.is_empty() {
            return Err(ConfigError::invalid("combination", "needs at least one term"));
        }
        let mut terms = Vec::with_capacity(self.combination.len());
        for (i, t) in self.combination.iter().enumerate() {
            if !t.lambda.is_finite() {
                return Err(ConfigError::invalid(format!("combination[{i}].lambda"), "must be finite"));
            }
            if t.lambda.norm() == 0.0 {
                return Err(ConfigError::invalid(format!("combination[{i}].lambda"), "must be nonzero"));
            }
            let symbol = match Symbol::parse(&t.symbol) {
                Ok(s) => s,
                Err(e @ SymbolError::InvalidSelfMap { .. }) => {
                    return Err(ConfigError::InvalidSelfMap { key: format!("combination[{i}].symbol"), source: e })
                }
                Err(e) => return Err(ConfigError::invalid(format!("combination[{i}].symbol"), e.to_string())),
            };
            terms.push(Term { lambda: t.lambda, symbol });
        }
        CombinationSpec::new(terms).map_err(|e| ConfigError::invalid("combination", e.to_string()))
    }

    /// Checks ranges and that the combination compiles.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::invalid(key, format!("must be positive, got {v}")))
            }
        };
        if self.n_max == 0 || self.n_max > MAX_NMAX {
            return Err(ConfigError::invalid("n_max", format!("must be in 1..={MAX_NMAX}")));
        }
        let th = &self.thresholds;
        positive("thresholds.tol_zero", th.tol_zero)?;
        positive("thresholds.tail_fraction", th.tail_fraction)?;
        positive("thresholds.monotone_slack", th.monotone_slack)?;
        positive("thresholds.high_factor", th.high_factor)?;
        positive("thresholds.min_coverage", th.min_coverage)?;
        if th.tail_fraction > 1.0 {
            return Err(ConfigError::invalid("thresholds.tail_fraction", "must be at most 1"));
        }
        let tol = &self.tolerances;
        positive("tolerances.tol_conv", tol.tol_conv)?;
        positive("tolerances.tol_one", tol.tol_one)?;
        positive("tolerances.tol_zero", tol.tol_zero)?;
        positive("tolerances.tol_sharp", tol.tol_sharp)?;
        positive("tolerances.band", tol.band)?;
        positive("tolerances.sum_tol", tol.sum_tol)?;
        positive("paths.last_step", self.paths.last_step)?;
        if self.paths.steps < 2 {
            return Err(ConfigError::invalid("paths.steps", "must be at least 2"));
        }
        if self.testfns.truncation > crate::testfns::MAX_TRUNCATION {
            return Err(ConfigError::invalid(
                "testfns.truncation",
                format!("must be at most {}", crate::testfns::MAX_TRUNCATION),
            ));
        }
        self.spec().map(|_| ())
    }
}

/// Reads and validates a TOML run configuration.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.display().to_string(), reason: e.to_string() })?;
    RunConfig::from_toml_str(&text)
}
