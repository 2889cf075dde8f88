use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::actions::ActionSpec;
use crate::cone::DEFAULT_SLACK;
use crate::error::{Error, Result};
use crate::odometer::precision_for;
use crate::spaces::{FreeWord, LatticePoint, ModelKind, SpaceDescriptor, SpaceHandle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    VerifyCoarse,
    Orbit,
    FixedPoint,
    OdometerDensity,
    ConeDiagnostic,
    HigsonDefect,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Experiment::VerifyCoarse => "verify-coarse",
            Experiment::Orbit => "orbit",
            Experiment::FixedPoint => "fixed-point",
            Experiment::OdometerDensity => "odometer-density",
            Experiment::ConeDiagnostic => "cone-diagnostic",
            Experiment::HigsonDefect => "higson-defect",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionKind {
    /// The group (or ℕᵏ) acting on itself by left translation.
    SelfTranslation,
    /// ℕ acting by x ↦ x + `vector`.
    Translation,
    /// The map x ↦ x·`word` on F₂ (checked as a single coarse map).
    RightTranslation,
    Odometer,
    /// ℕ rotating the cone base cycle by `steps`.
    Rotation,
    Identity,
    Constant,
    /// ℕ acting on ℤ by x ↦ (x + 1) mod `modulus`.
    Cyclic,
}

/// ```toml
/// [action]
/// kind = "translation"
/// vector = "(3)"
/// ```
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDescriptor {
    pub kind: ActionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<i64>,
}

impl ActionDescriptor {
    pub fn build(&self, space: &SpaceHandle) -> Result<ActionSpec> {
        let need = |field: &'static str, v: Option<&String>| {
            v.cloned()
                .ok_or_else(|| Error::config(format!("action.{field}"), format!("required for {:?}", self.kind)))
        };
        match self.kind {
            ActionKind::SelfTranslation => ActionSpec::self_translation(space),
            ActionKind::Translation => {
                let v: LatticePoint = need("vector", self.vector.as_ref())?.parse()?;
                Ok(ActionSpec::translation(v))
            }
            ActionKind::RightTranslation => {
                let h: FreeWord = need("word", self.word.as_ref())?.parse()?;
                Ok(ActionSpec::natural(crate::actions::right_translation_map(h), false))
            }
            ActionKind::Odometer => Ok(ActionSpec::odometer()),
            ActionKind::Rotation => {
                let k = self
                    .steps
                    .ok_or_else(|| Error::config("action.steps", "required for rotation"))?;
                ActionSpec::cone_rotation(space, k)
            }
            ActionKind::Identity => Ok(ActionSpec::identity()),
            ActionKind::Constant => {
                let p = match &self.point {
                    Some(s) => space.parse_point(s)?,
                    None => space.basepoint().clone(),
                };
                Ok(ActionSpec::constant(p))
            }
            ActionKind::Cyclic => ActionSpec::cyclic(
                self.modulus
                    .ok_or_else(|| Error::config("action.modulus", "required for cyclic"))?,
            ),
        }
    }
}

/// Numeric parameters; each experiment reads the subset it needs.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_returns: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_e: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entourage: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub balls: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
}

/// One experiment per file.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionDescriptor>,
    #[serde(default)]
    pub params: Params,
    /// Directory used to resolve relative paths; not part of the file.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

/// A static problem with a config, naming the offending field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("config", e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn build_space(&self) -> Result<SpaceHandle> {
        self.space
            .as_ref()
            .ok_or_else(|| Error::config("space", "missing [space] table"))?
            .build(self.base_dir.as_deref())
    }

    pub fn build_action(&self, space: &SpaceHandle) -> Result<ActionSpec> {
        self.action
            .as_ref()
            .ok_or_else(|| Error::config("action", "missing [action] table"))?
            .build(space)
    }

    /// Static checks only: required fields, ranges and precision budget.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut diag = |field: &str, message: String| {
            out.push(Diagnostic {
                field: field.to_string(),
                message,
            })
        };
        let p = &self.params;
        let needs_space = self.experiment != Experiment::OdometerDensity;
        let needs_action = matches!(
            self.experiment,
            Experiment::VerifyCoarse | Experiment::Orbit | Experiment::FixedPoint
        );
        if needs_space && self.space.is_none() {
            diag("space", "missing [space] table".into());
        }
        if needs_action && self.action.is_none() {
            diag("action", "missing [action] table".into());
        }
        for (name, v) in [
            ("params.sample", p.sample),
            ("params.domain_radius", p.domain_radius),
            ("params.r_e", p.r_e),
            ("params.slack", p.slack),
            ("params.entourage", p.entourage),
            ("params.window", p.window),
        ] {
            if let Some(x) = v {
                if !(x.is_finite() && x >= 0.0) {
                    diag(name, format!("must be a non-negative number, got {x}"));
                }
            }
        }
        if let Some(radii) = &p.radii {
            if radii.is_empty() || radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
                diag("params.radii", "must be a non-empty list of non-negative numbers".into());
            }
        }
        match self.experiment {
            Experiment::VerifyCoarse => {}
            Experiment::Orbit => {
                if p.horizon.is_none() {
                    diag("params.horizon", "required for orbit".into());
                }
            }
            Experiment::FixedPoint => {
                if p.horizon.is_none() {
                    diag("params.horizon", "required for fixed-point".into());
                }
            }
            Experiment::OdometerDensity => match p.precision {
                None => diag("params.precision", "required for odometer-density".into()),
                Some(0) => diag("params.precision", "must be >= 1".into()),
                Some(prec) => {
                    match &p.epsilons {
                        None => diag("params.epsilons", "required for odometer-density".into()),
                        Some(eps) if eps.is_empty() => {
                            diag("params.epsilons", "must be non-empty".into())
                        }
                        Some(eps) => {
                            for &e in eps {
                                match precision_for(e) {
                                    Err(_) => diag("params.epsilons", format!("{e} is not positive")),
                                    Ok(n) if n >= prec => diag(
                                        "params.epsilons",
                                        format!(
                                            "insufficient precision: epsilon {e} needs {} bits, precision is {prec}",
                                            n + 1
                                        ),
                                    ),
                                    Ok(_) => {}
                                }
                            }
                        }
                    }
                    if let Some(start) = &p.start {
                        if start.trim_end_matches('+').len() != prec {
                            diag("params.start", format!("must have exactly {prec} bits"));
                        }
                    }
                }
            },
            Experiment::ConeDiagnostic => {
                if let Some(s) = &self.space {
                    if s.model != ModelKind::Cone {
                        diag("space.model", "cone-diagnostic needs the cone model".into());
                    }
                }
                if p.r_e.is_none() {
                    diag("params.r_e", "required for cone-diagnostic".into());
                }
                if p.heights.as_ref().is_none_or(|h| h.is_empty()) {
                    diag("params.heights", "required for cone-diagnostic".into());
                }
            }
            Experiment::HigsonDefect => {
                if p.function.is_none() {
                    diag("params.function", "required for higson-defect".into());
                }
                if p.entourage.is_none() {
                    diag("params.entourage", "required for higson-defect".into());
                }
                match (&p.balls, p.window) {
                    (None, _) => diag("params.balls", "required for higson-defect".into()),
                    (_, None) => diag("params.window", "required for higson-defect".into()),
                    (Some(b), Some(w)) => {
                        if b.iter().any(|&x| x >= w) {
                            diag("params.window", format!("window {w} must exceed every ball radius"));
                        }
                    }
                }
            }
        }
        if needs_space {
            if let Some(space) = &self.space {
                if space.model == ModelKind::Cone && space.cone.is_none() {
                    diag("space.cone", "the cone model needs a [space.cone] table".into());
                }
            }
        }
        out
    }

    pub fn slack(&self) -> f64 {
        self.params.slack.unwrap_or(DEFAULT_SLACK)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_formed_config_has_no_diagnostics() {
        let cfg = ExperimentConfig::from_toml(
            "experiment = \"orbit\"\n[space]\nmodel = \"lattice\"\nrank = 1\n[action]\nkind = \"translation\"\nvector = \"1\"\n[params]\nhorizon = 5\n",
        )
        .unwrap();
        assert!(cfg.validate().is_empty());
    }

    #[test]
    fn missing_horizon_is_named() {
        let cfg = ExperimentConfig::from_toml(
            "experiment = \"orbit\"\n[space]\nmodel = \"lattice\"\nrank = 1\n[action]\nkind = \"identity\"\n",
        )
        .unwrap();
        let d = cfg.validate();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].field, "params.horizon");
    }

    #[test]
    fn tiny_epsilon_is_insufficient_precision() {
        let cfg = ExperimentConfig::from_toml(
            "experiment = \"odometer-density\"\n[params]\nprecision = 8\ntargets = 3\nepsilons = [0.001]\n",
        )
        .unwrap();
        let d = cfg.validate();
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("insufficient precision"));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(ExperimentConfig::from_toml("experiment = \"orbit\"\nhorizon = 3\n").is_err());
        assert!(ExperimentConfig::from_toml("experiment = \"nope\"\n").is_err());
    }
}
