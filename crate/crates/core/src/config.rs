//! Experiment description files (TOML).
//!
//! ```toml
//! schema_version = 1
//! path = "ideal"                 # optional: "ideal" | "physical"
//!
//! [grid]
//! spacing = 0.05                 # bin spacing shared by both profiles
//!
//! [source_i]
//! pump = 2.0                     # Ω_I
//! chi = 1.0                      # optional coupling, default 1
//! profile = { kind = "flat", start = 0.8, bins = 8 }
//!
//! [source_ii]
//! pump = 2.2                     # Ω_II
//! profile = { kind = "tabulated", start = 0.9, bins = 3, re = [1.0, 2.0, 1.0], im = [0.0, 0.5, 0.0] }
//!
//! [measurement]
//! omega_iii = 2.1                # lower edge of the sum window (Ω_III)
//! window_width = 0.05            # optional, default one bin
//! chi_iii = 1.0                  # optional
//!
//! [sampling]                     # optional
//! trials = 8000
//! seed = 42
//!
//! [outputs]                      # optional
//! coincidence_sweep = true
//! histogram = true
//! time_grid = { t_start = -40.0, delta_t = 0.5, samples = 161 }
//! ```
//!
//! Frequencies are plain decimals in arbitrary angular-frequency units.
//! `parse_experiment` fills every default, so serializing the result
//! writes a fully explicit document.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::frequency::{Frequency, FrequencyGrid};
use crate::measurement::TimeGrid;
use crate::protocol::{SwapConfig, SwapPath};
use crate::spectrum::SpectralAmplitude;

pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_TRIALS: u64 = 8000;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}, column {column}: unknown key `{key}`")]
    UnknownKey {
        key: String,
        line: usize,
        column: usize,
    },

    #[error("line {line}, column {column}: missing required key `{key}`")]
    MissingKey {
        key: String,
        line: usize,
        column: usize,
    },

    #[error("line {line}, column {column}: {message}")]
    Syntax {
        message: String,
        line: usize,
        column: usize,
    },

    #[error("unsupported schema_version {found} (this build reads version {SCHEMA_VERSION})")]
    UnsupportedSchema { found: u32 },

    #[error("`{key}` = {value}: frequencies must be positive")]
    NonPositiveFrequency { key: String, value: f64 },

    #[error("`{key}`: grid declares {declared} bins but {found} values are given")]
    GridMismatch {
        key: String,
        declared: usize,
        found: usize,
    },

    #[error("`{key}`: {reason}")]
    InvalidValue { key: String, reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<SwapPath>,
    pub grid: GridSection,
    pub source_i: SourceSection,
    pub source_ii: SourceSection,
    pub measurement: MeasurementSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<OutputsSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub spacing: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    pub pump: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
    pub profile: Profile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Profile {
    Flat {
        start: f64,
        bins: usize,
    },
    Tabulated {
        start: f64,
        bins: usize,
        re: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        im: Option<Vec<f64>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSection {
    pub omega_iii: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_iii: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    pub trials: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsSection {
    #[serde(default = "yes")]
    pub coincidence_sweep: bool,
    #[serde(default = "yes")]
    pub histogram: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_grid: Option<TimeGridSection>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGridSection {
    pub t_start: f64,
    pub delta_t: f64,
    pub samples: usize,
}

fn yes() -> bool {
    true
}

impl Default for OutputsSection {
    fn default() -> Self {
        OutputsSection {
            coincidence_sweep: true,
            histogram: true,
            time_grid: Some(TimeGridSection::default()),
        }
    }
}

impl Default for TimeGridSection {
    fn default() -> Self {
        TimeGridSection {
            t_start: -40.0,
            delta_t: 0.5,
            samples: 161,
        }
    }
}

/// Parses and validates an experiment document, filling defaults.
pub fn parse_experiment(text: &str) -> Result<ExperimentFile, ConfigError> {
    let mut doc: ExperimentFile = toml::from_str(text).map_err(|e| toml_error(text, &e))?;
    doc.validate()?;
    doc.fill_defaults();
    Ok(doc)
}

/// Writes a document that `parse_experiment` reads back to an equal value.
pub fn serialize_experiment(doc: &ExperimentFile) -> String {
    toml::to_string(doc).expect("experiment documents always serialize")
}

fn toml_error(text: &str, err: &toml::de::Error) -> ConfigError {
    let (line, column) = err
        .span()
        .map(|s| line_column(text, s.start))
        .unwrap_or((0, 0));
    let message = err.message().to_string();
    if let Some(rest) = message.strip_prefix("unknown field `") {
        let key = rest.split('`').next().unwrap_or_default().to_string();
        return ConfigError::UnknownKey { key, line, column };
    }
    if let Some(rest) = message.strip_prefix("missing field `") {
        let key = rest.split('`').next().unwrap_or_default().to_string();
        return ConfigError::MissingKey { key, line, column };
    }
    if let Some(rest) = message.strip_prefix("unknown variant `") {
        let key = rest.split('`').next().unwrap_or_default().to_string();
        return ConfigError::InvalidValue {
            key: format!("line {line}, column {column}"),
            reason: format!("unknown value `{key}`"),
        };
    }
    ConfigError::Syntax {
        message,
        line,
        column,
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before
        .rfind('\n')
        .map_or(before.len(), |i| before.len() - i - 1)
        + 1;
    (line, column)
}

fn positive(key: &str, value: f64) -> Result<(), ConfigError> {
    if !value.is_finite() {
        return Err(ConfigError::InvalidValue {
            key: key.into(),
            reason: format!("{value} is not finite"),
        });
    }
    if value <= 0.0 {
        return Err(ConfigError::NonPositiveFrequency {
            key: key.into(),
            value,
        });
    }
    Ok(())
}

fn coupling(key: &str, value: Option<f64>) -> Result<(), ConfigError> {
    match value {
        Some(c) if !(c > 0.0 && c.is_finite()) => Err(ConfigError::InvalidValue {
            key: key.into(),
            reason: format!("coupling {c} must be positive and finite"),
        }),
        _ => Ok(()),
    }
}

fn to_frequency(key: &str, value: f64) -> Result<Frequency, ConfigError> {
    Frequency::new(value).map_err(|e| ConfigError::InvalidValue {
        key: key.into(),
        reason: e.to_string(),
    })
}

impl Profile {
    fn validate(&self, key: &str) -> Result<(), ConfigError> {
        let (start, bins) = match self {
            Profile::Flat { start, bins } | Profile::Tabulated { start, bins, .. } => {
                (*start, *bins)
            }
        };
        positive(&format!("{key}.start"), start)?;
        if bins == 0 {
            return Err(ConfigError::InvalidValue {
                key: format!("{key}.bins"),
                reason: "at least one bin is required".into(),
            });
        }
        if let Profile::Tabulated { re, im, .. } = self {
            if re.len() != bins {
                return Err(ConfigError::GridMismatch {
                    key: format!("{key}.re"),
                    declared: bins,
                    found: re.len(),
                });
            }
            if let Some(im) = im {
                if im.len() != bins {
                    return Err(ConfigError::GridMismatch {
                        key: format!("{key}.im"),
                        declared: bins,
                        found: im.len(),
                    });
                }
            }
            let all = re.iter().chain(im.iter().flatten());
            if all.clone().any(|v| !v.is_finite()) {
                return Err(ConfigError::InvalidValue {
                    key: format!("{key}.re"),
                    reason: "profile values must be finite".into(),
                });
            }
        }
        Ok(())
    }

    fn amplitude(&self, spacing: Frequency, key: &str) -> Result<SpectralAmplitude, ConfigError> {
        let invalid = |e: crate::Error| ConfigError::InvalidValue {
            key: key.into(),
            reason: e.to_string(),
        };
        match self {
            Profile::Flat { start, bins } => {
                let grid = FrequencyGrid::new(to_frequency(key, *start)?, spacing, *bins)
                    .map_err(invalid)?;
                Ok(SpectralAmplitude::flat(grid))
            }
            Profile::Tabulated {
                start,
                bins,
                re,
                im,
            } => {
                let grid = FrequencyGrid::new(to_frequency(key, *start)?, spacing, *bins)
                    .map_err(invalid)?;
                let values = re
                    .iter()
                    .enumerate()
                    .map(|(k, &r)| Complex64::new(r, im.as_ref().map_or(0.0, |im| im[k])))
                    .collect();
                SpectralAmplitude::new(grid, values).map_err(invalid)
            }
        }
    }
}

impl ExperimentFile {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::UnsupportedSchema {
                found: self.schema_version,
            });
        }
        positive("grid.spacing", self.grid.spacing)?;
        positive("source_i.pump", self.source_i.pump)?;
        positive("source_ii.pump", self.source_ii.pump)?;
        coupling("source_i.chi", self.source_i.chi)?;
        coupling("source_ii.chi", self.source_ii.chi)?;
        self.source_i.profile.validate("source_i.profile")?;
        self.source_ii.profile.validate("source_ii.profile")?;
        positive("measurement.omega_iii", self.measurement.omega_iii)?;
        if let Some(w) = self.measurement.window_width {
            positive("measurement.window_width", w)?;
        }
        coupling("measurement.chi_iii", self.measurement.chi_iii)?;
        if let Some(s) = &self.sampling {
            if s.trials == 0 {
                return Err(ConfigError::InvalidValue {
                    key: "sampling.trials".into(),
                    reason: "at least one trial is required".into(),
                });
            }
        }
        if let Some(t) = self.outputs.as_ref().and_then(|o| o.time_grid) {
            TimeGrid::new(t.t_start, t.delta_t, t.samples).map_err(|e| {
                ConfigError::InvalidValue {
                    key: "outputs.time_grid".into(),
                    reason: e.to_string(),
                }
            })?;
        }
        // every frequency must also fit the fixed-point range
        for (key, v) in [
            ("grid.spacing", self.grid.spacing),
            ("source_i.pump", self.source_i.pump),
            ("source_ii.pump", self.source_ii.pump),
            ("measurement.omega_iii", self.measurement.omega_iii),
        ] {
            to_frequency(key, v)?;
        }
        Ok(())
    }

    fn fill_defaults(&mut self) {
        self.path.get_or_insert(SwapPath::IdealProjector);
        self.source_i.chi.get_or_insert(1.0);
        self.source_ii.chi.get_or_insert(1.0);
        self.measurement
            .window_width
            .get_or_insert(self.grid.spacing);
        self.measurement.chi_iii.get_or_insert(1.0);
        self.sampling.get_or_insert(SamplingSection {
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
        });
        let outputs = self.outputs.get_or_insert_with(OutputsSection::default);
        outputs
            .time_grid
            .get_or_insert_with(TimeGridSection::default);
    }

    pub fn swap_config(&self) -> Result<SwapConfig, ConfigError> {
        let spacing = to_frequency("grid.spacing", self.grid.spacing)?;
        let f = self
            .source_i
            .profile
            .amplitude(spacing, "source_i.profile")?;
        let g = self
            .source_ii
            .profile
            .amplitude(spacing, "source_ii.profile")?;
        let mut cfg = SwapConfig::new(
            to_frequency("source_i.pump", self.source_i.pump)?,
            to_frequency("source_ii.pump", self.source_ii.pump)?,
            to_frequency("measurement.omega_iii", self.measurement.omega_iii)?,
            f,
            g,
        )
        .with_path(self.path.unwrap_or_default())
        .with_couplings(
            self.source_i.chi.unwrap_or(1.0),
            self.source_ii.chi.unwrap_or(1.0),
            self.measurement.chi_iii.unwrap_or(1.0),
        );
        if let Some(w) = self.measurement.window_width {
            cfg = cfg.with_window_width(to_frequency("measurement.window_width", w)?);
        }
        Ok(cfg)
    }

    pub fn sampling(&self) -> SamplingSection {
        self.sampling.clone().unwrap_or(SamplingSection {
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
        })
    }

    pub fn outputs(&self) -> OutputsSection {
        self.outputs.clone().unwrap_or_default()
    }

    pub fn time_grid(&self) -> TimeGrid {
        let t = self.outputs().time_grid.unwrap_or_default();
        TimeGrid::new(t.t_start, t.delta_t, t.samples).expect("validated on parse")
    }

    /// SHA-256 of the canonical serialized document, as lowercase hex.
    pub fn content_hash(&self) -> String {
        Sha256::digest(serialize_experiment(self).as_bytes())
            .iter()
            .fold(String::with_capacity(64), |mut s, b| {
                use fmt::Write;
                let _ = write!(s, "{b:02x}");
                s
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema_version = 1

[grid]
spacing = 0.05

[source_i]
pump = 2.0
profile = { kind = "flat", start = 0.8, bins = 8 }

[source_ii]
pump = 2.2
profile = { kind = "flat", start = 0.9, bins = 8 }

[measurement]
omega_iii = 2.1
"#;

    #[test]
    fn minimal_document_gets_defaults() {
        let doc = parse_experiment(MINIMAL).unwrap();
        assert_eq!(doc.path, Some(SwapPath::IdealProjector));
        assert_eq!(doc.measurement.window_width, Some(0.05));
        assert_eq!(doc.measurement.chi_iii, Some(1.0));
        assert_eq!(doc.sampling().trials, DEFAULT_TRIALS);
        let cfg = doc.swap_config().unwrap();
        assert_eq!(cfg.window_width, Frequency::new(0.05).unwrap());
        assert_eq!(cfg.path, SwapPath::IdealProjector);
        assert_eq!(cfg.f.grid().bins(), 8);
    }

    #[test]
    fn round_trip() {
        let doc = parse_experiment(MINIMAL).unwrap();
        let text = serialize_experiment(&doc);
        assert_eq!(parse_experiment(&text).unwrap(), doc);
    }

    #[test]
    fn tabulated_round_trip() {
        let text = MINIMAL.replace(
            r#"profile = { kind = "flat", start = 0.9, bins = 8 }"#,
            r#"profile = { kind = "tabulated", start = 0.9, bins = 3, re = [1.0, 2.0, 1.0], im = [0.0, 0.5, 0.0] }"#,
        );
        let doc = parse_experiment(&text).unwrap();
        let cfg = doc.swap_config().unwrap();
        assert_eq!(cfg.g.values()[1], Complex64::new(2.0, 0.5));
        assert_eq!(parse_experiment(&serialize_experiment(&doc)).unwrap(), doc);
    }

    #[test]
    fn non_positive_frequency() {
        let text = MINIMAL.replace("omega_iii = 2.1", "omega_iii = -2.1");
        match parse_experiment(&text) {
            Err(ConfigError::NonPositiveFrequency { key, value }) => {
                assert_eq!(key, "measurement.omega_iii");
                assert_eq!(value, -2.1);
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = MINIMAL.replace("omega_iii = 2.1", "omega_iii = 0.0");
        assert!(matches!(
            parse_experiment(&text),
            Err(ConfigError::NonPositiveFrequency { .. })
        ));
    }

    #[test]
    fn unknown_key_names_key_and_line() {
        let text = MINIMAL.replace("omega_iii = 2.1", "omega_iii = 2.1\nomega_iv = 3.0");
        match parse_experiment(&text) {
            Err(ConfigError::UnknownKey { key, line, .. }) => {
                assert_eq!(key, "omega_iv");
                assert_eq!(line, 17);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_profile_key() {
        let text = MINIMAL.replace(
            r#"{ kind = "flat", start = 0.8, bins = 8 }"#,
            r#"{ kind = "flat", start = 0.8, bins = 8, width = 2 }"#,
        );
        assert!(matches!(
            parse_experiment(&text),
            Err(ConfigError::UnknownKey { .. })
        ));
    }

    #[test]
    fn grid_mismatch() {
        let text = MINIMAL.replace(
            r#"profile = { kind = "flat", start = 0.9, bins = 8 }"#,
            r#"profile = { kind = "tabulated", start = 0.9, bins = 4, re = [1.0, 2.0, 1.0] }"#,
        );
        assert_eq!(
            parse_experiment(&text),
            Err(ConfigError::GridMismatch {
                key: "source_ii.profile.re".into(),
                declared: 4,
                found: 3
            })
        );
    }

    #[test]
    fn schema_and_syntax_errors() {
        let text = MINIMAL.replace("schema_version = 1", "schema_version = 2");
        assert_eq!(
            parse_experiment(&text),
            Err(ConfigError::UnsupportedSchema { found: 2 })
        );
        assert!(matches!(
            parse_experiment("schema_version = "),
            Err(ConfigError::Syntax { .. })
        ));
        let text = MINIMAL.replace("[measurement]\nomega_iii = 2.1", "");
        assert!(matches!(
            parse_experiment(&text),
            Err(ConfigError::MissingKey { key, .. }) if key == "measurement"
        ));
    }

    #[test]
    fn hash_is_stable() {
        let a = parse_experiment(MINIMAL).unwrap();
        let b = parse_experiment(&serialize_experiment(&a)).unwrap();
        assert_eq!(a.content_hash(), b.content_hash());
        assert_eq!(a.content_hash().len(), 64);
    }
}
