//! TOML run configuration.
//!
//! ```toml
//! seed = 7
//!
//! [model]
//! model = "implicit_maxaccel"
//! charge = 1.0
//! mass = 1.0
//! a_max = 100.0
//!
//! [field]
//! kind = "constant"
//! e = [0.01, 0.0, 0.0]
//!
//! [initial]
//! position = [0.0, 0.0, 0.0, 0.0]
//! velocity = [0.0, 0.0, 0.0]
//!
//! [span]
//! start = 0.0
//! end = 5.0
//!
//! [solver]
//! dt = 1e-3
//!
//! [output]
//! dir = "out"
//! name = "run"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::AuditThresholds;
use crate::dynamics::{ForceModelSpec, ModelKind};
use crate::fields::FieldSpec;
use crate::integrator::{prepare_initial, SolverOptions};
use crate::minkowski::FourVector;
use crate::worldline::WorldlineState;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
}

fn invalid(key: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub position: [f64; 4],
    /// Spatial part of `u`; `u^0` is completed on the model's unit shell.
    pub velocity: [f64; 3],
    /// Initial acceleration, accepted only by the ALD model.
    #[serde(default)]
    pub acceleration: Option<[f64; 4]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanConfig {
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// File stem: `<name>.csv`, `<name>.meta.json`, `<name>.audit.json`.
    pub name: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("."),
            name: "trajectory".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub model: ForceModelSpec,
    pub field: FieldSpec,
    pub initial: InitialConfig,
    pub span: SpanConfig,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub audit: AuditThresholds,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let m = &self.model;
        if !(m.mass > 0.0) || !m.mass.is_finite() {
            return Err(invalid("model.mass", format!("must be positive, got {}", m.mass)));
        }
        if !m.charge.is_finite() {
            return Err(invalid("model.charge", "must be finite"));
        }
        match m.a_max {
            Some(a) if !(a > 0.0) => {
                return Err(invalid("model.a_max", format!("must be positive, got {a}")));
            }
            None if m.model.requires_a_max() => {
                return Err(invalid("model.a_max", format!("required by model {}", m.model)));
            }
            _ => {}
        }
        m.validate().map_err(|e| invalid("model", e.to_string()))?;
        self.field.validate().map_err(|e| invalid("field", e.to_string()))?;
        if !self.initial.position.iter().all(|c| c.is_finite()) {
            return Err(invalid("initial.position", "must be finite"));
        }
        if !self.initial.velocity.iter().all(|c| c.is_finite()) {
            return Err(invalid("initial.velocity", "must be finite"));
        }
        if let Some(a) = self.initial.acceleration {
            if m.model != ModelKind::Ald {
                return Err(invalid(
                    "initial.acceleration",
                    format!("only the ald model takes an initial acceleration, not {}", m.model),
                ));
            }
            if !a.iter().all(|c| c.is_finite()) {
                return Err(invalid("initial.acceleration", "must be finite"));
            }
        }
        let SpanConfig { start, end } = self.span;
        if !start.is_finite() || !end.is_finite() || start >= end {
            return Err(invalid("span", format!("need finite start < end, got [{start}, {end}]")));
        }
        self.solver.validate().map_err(|e| invalid("solver", e.to_string()))?;
        if self.output.name.is_empty() || self.output.name.contains(['/', '\\']) {
            return Err(invalid("output.name", "must be a plain file stem"));
        }
        Ok(())
    }

    /// Completed initial state at `span.start`.
    pub fn initial_state(&self) -> crate::Result<WorldlineState> {
        prepare_initial(
            &self.model,
            &self.field,
            self.span.start,
            FourVector(self.initial.position),
            self.initial.velocity,
            self.initial.acceleration.map(FourVector),
            &self.solver,
        )
    }

    pub fn csv_path(&self) -> PathBuf {
        self.output.dir.join(format!("{}.csv", self.output.name))
    }

    pub fn audit_path(&self) -> PathBuf {
        self.output.dir.join(format!("{}.audit.json", self.output.name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[model]
model = "implicit_maxaccel"
charge = 1.0
mass = 1.0
a_max = 100.0

[field]
kind = "constant"
e = [0.01, 0.0, 0.0]

[initial]
position = [0.0, 0.0, 0.0, 0.0]
velocity = [0.0, 0.0, 0.0]

[span]
start = 0.0
end = 1.0
"#;

    fn key_of(text: &str) -> &'static str {
        match RunConfig::from_toml(text) {
            Err(ConfigError::Invalid { key, .. }) => key,
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn parses_with_defaults() {
        let cfg = RunConfig::from_toml(BASE).unwrap();
        assert_eq!(cfg.solver, SolverOptions::default());
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.csv_path(), PathBuf::from("./trajectory.csv"));
        let s = cfg.initial_state().unwrap();
        assert!(s.u[0] > 1.0);
    }

    #[test]
    fn named_rejections() {
        assert_eq!(key_of(&BASE.replace("mass = 1.0", "mass = -1.0")), "model.mass");
        assert_eq!(key_of(&BASE.replace("a_max = 100.0", "")), "model.a_max");
        assert_eq!(key_of(&BASE.replace("a_max = 100.0", "a_max = 0.0")), "model.a_max");
        assert_eq!(key_of(&BASE.replace("end = 1.0", "end = -1.0")), "span");
        assert_eq!(
            key_of(&BASE.replace("kind = \"constant\"\ne = [0.01, 0.0, 0.0]", "kind = \"gaussian_pulse\"\nkappa = 0.5\nwidth = 0.0")),
            "field"
        );
        assert_eq!(key_of(&format!("{BASE}\n[solver]\ndt = 0.0\n")), "solver");
        assert_eq!(
            key_of(&BASE.replace("velocity = [0.0, 0.0, 0.0]", "velocity = [0.0, 0.0, 0.0]\nacceleration = [0.0, 1.0, 0.0, 0.0]")),
            "initial.acceleration"
        );
    }

    #[test]
    fn missing_charge_is_a_parse_error() {
        let text = BASE.replace("charge = 1.0\n", "");
        assert!(matches!(RunConfig::from_toml(&text), Err(ConfigError::Parse(_))));
        let text = BASE.replace("mass = 1.0", "mass = 1.0\ncolour = 2");
        assert!(matches!(RunConfig::from_toml(&text), Err(ConfigError::Parse(_))));
    }
}
