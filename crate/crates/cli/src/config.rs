//! Scenario configuration files.
//!
//! A config is a TOML document with `schema_version = 1` and one or more
//! `[[scenario]]` tables. Every optional field has a default; the resolved
//! form (all defaults filled in) is written next to the report and can be run
//! again as is.

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: u32,
    #[serde(rename = "scenario", default)]
    pub scenarios: Vec<ScenarioConfig>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let file: ConfigFile = toml::from_str(text)
            .map_err(|e| CliError::Config(e.to_string().trim_end().to_owned()))?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(CliError::config(
                "schema_version",
                format!(
                    "unsupported version {} (expected {SCHEMA_VERSION})",
                    file.schema_version
                ),
            ));
        }
        if file.scenarios.is_empty() {
            return Err(CliError::config(
                "scenario",
                "at least one [[scenario]] is required",
            ));
        }
        Ok(file)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub t_max: f64,
    #[serde(default = "default_n_samples")]
    pub n_samples: usize,
    pub methods: Vec<Method>,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Output>,
    #[serde(default)]
    pub anticorrelation: bool,
    #[serde(default)]
    pub diagnostics: Vec<Diagnostic>,
    pub system: SystemConfig,
    pub packet: PacketConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub propagator: PropagatorSection,
    #[serde(default)]
    pub spectral: SpectralSection,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_n_samples() -> usize {
    201
}

fn default_outputs() -> Vec<Output> {
    vec![Output::SeriesCsv, Output::ArgandSvg, Output::ReportJson]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Analytic,
    SplitOperator,
    Spectral,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::SplitOperator => "split-operator",
            Method::Spectral => "spectral",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Output {
    SeriesCsv,
    ArgandSvg,
    ReportJson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Diagnostic {
    Saturation,
    Mandelstam,
    ReturnSuppression,
    Periodicity,
    HalfPeriodRevival,
    Anticorrelation,
    Spread,
}

impl Diagnostic {
    pub fn as_str(self) -> &'static str {
        match self {
            Diagnostic::Saturation => "saturation",
            Diagnostic::Mandelstam => "mandelstam",
            Diagnostic::ReturnSuppression => "return-suppression",
            Diagnostic::Periodicity => "periodicity",
            Diagnostic::HalfPeriodRevival => "half-period-revival",
            Diagnostic::Anticorrelation => "anticorrelation",
            Diagnostic::Spread => "spread",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemConfig {
    Free,
    Accelerated { force: f64 },
    Harmonic { omega: f64 },
    Inverted { omega_tilde: f64 },
}

/// Packet width is given either as `alpha` (momentum-space, `beta = alpha
/// hbar`) or directly as `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub p0: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub min: f64,
    pub max: f64,
    pub n_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            min: -40.0,
            max: 40.0,
            n_points: 4096,
        }
    }
}

/// `steps_per_sample` defaults to the count giving `dt` no larger than the
/// system's natural timescale over 2000.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagatorSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps_per_sample: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralSection {
    pub n_max: usize,
    pub tail_tolerance: f64,
}

impl Default for SpectralSection {
    fn default() -> Self {
        Self {
            n_max: 100,
            tail_tolerance: gausspacket::numeric::DEFAULT_TAIL_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Method comparisons against the analytic series.
    pub max_abs_diff: f64,
    pub max_abs2_diff: f64,
    pub saturation: f64,
    pub bound_margin: f64,
    pub short_time_coefficient: f64,
    pub return_modulus: f64,
    pub periodicity: f64,
    pub revival: f64,
    pub spread: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            max_abs_diff: 1e-6,
            max_abs2_diff: 1e-6,
            saturation: 1e-3,
            bound_margin: 1e-10,
            short_time_coefficient: 1e-4,
            return_modulus: 1e-6,
            periodicity: 1e-10,
            revival: 1e-10,
            spread: 1e-8,
        }
    }
}
