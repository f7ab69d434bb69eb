use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{apply_d_homothety, heisenberg_chart, milnor, sheared_heisenberg_chart, Structure, SyntheticPointStructure};
use crate::error::{Error, Result};
use crate::report::Tolerances;
use crate::sampling::DEFAULT_SEED;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Left-invariant family with parameters `lambda2`, `lambda3`.
    Milnor,
    /// `milnor` with both parameters zero.
    Heisenberg,
    /// Heisenberg structure on a coordinate chart.
    HeisenbergChart,
    /// Chart model with a sheared contact-plane metric, parameter `shear`.
    ShearedHeisenberg,
    /// Pointwise normal form with parameters `n`, `kappa`, `mu`.
    Synthetic,
}

fn default_samples() -> usize {
    100
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_n() -> usize {
    1
}

fn default_one() -> f64 {
    1.0
}

fn default_sweep() -> Vec<f64> {
    vec![-3.0, -1.5, -0.5, 0.0, 0.5, 1.5, 3.0]
}

/// A model description as read from a JSON or TOML file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub model: ModelKind,
    #[serde(default)]
    pub lambda2: f64,
    #[serde(default)]
    pub lambda3: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default = "default_one")]
    pub shear: f64,
    /// Homothety constant applied after construction.
    #[serde(default)]
    pub a: Option<f64>,
    /// Pointwise conformal scale `e^{2f}` used by `descend`.
    #[serde(default = "default_one")]
    pub scale: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Parameter values crossed with themselves by `sweep`.
    #[serde(default = "default_sweep")]
    pub sweep: Vec<f64>,
}

impl ModelConfig {
    pub fn new(model: ModelKind) -> Self {
        ModelConfig {
            model,
            lambda2: 0.0,
            lambda3: 0.0,
            n: default_n(),
            kappa: 0.0,
            mu: 0.0,
            shear: 1.0,
            a: None,
            scale: 1.0,
            samples: default_samples(),
            seed: DEFAULT_SEED,
            tolerances: Tolerances::default(),
            sweep: default_sweep(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let field = |f: &str, m: &str| Error::Config {
            field: f.to_string(),
            message: m.to_string(),
        };
        for (name, v) in [
            ("lambda2", self.lambda2),
            ("lambda3", self.lambda3),
            ("kappa", self.kappa),
            ("mu", self.mu),
            ("shear", self.shear),
            ("scale", self.scale),
        ] {
            if !v.is_finite() {
                return Err(field(name, "must be finite"));
            }
        }
        if let Some(a) = self.a {
            if !a.is_finite() || a == 0.0 {
                return Err(field("a", "a ≠ 0 required"));
            }
            if a < 0.0 {
                return Err(field("a", "a > 0 required for a Riemannian metric"));
            }
        }
        if self.kappa > 1.0 {
            return Err(field("kappa", "κ ≤ 1 required"));
        }
        if self.n == 0 {
            return Err(field("n", "n ≥ 1 required"));
        }
        if self.samples == 0 {
            return Err(field("samples", "at least 1 sample required"));
        }
        if self.scale <= 0.0 {
            return Err(field("scale", "scale = e^{2f} must be positive"));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.algebraic", t.algebraic),
            ("tolerances.finite_difference", t.finite_difference),
            ("tolerances.nullity", t.nullity),
            ("tolerances.identity", t.identity),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(field(name, "must be a positive number"));
            }
        }
        if self.sweep.iter().any(|v| !v.is_finite()) {
            return Err(field("sweep", "values must be finite"));
        }
        Ok(())
    }

    /// The structure described by this config, homothety applied.
    pub fn build(&self) -> Result<Structure> {
        self.validate()?;
        let base: Structure = match self.model {
            ModelKind::Milnor => milnor(self.lambda2, self.lambda3)?.into(),
            ModelKind::Heisenberg => milnor(0.0, 0.0)?.into(),
            ModelKind::HeisenbergChart => heisenberg_chart()?.into(),
            ModelKind::ShearedHeisenberg => sheared_heisenberg_chart(self.shear)?.into(),
            ModelKind::Synthetic => SyntheticPointStructure::new(self.n, self.kappa, self.mu)?.into(),
        };
        match self.a {
            Some(a) => apply_d_homothety(&base, a),
            None => Ok(base),
        }
    }

    /// Whether `build` yields a homogeneous or pointwise structure, where
    /// only algebraic tolerances apply.
    pub fn is_exact(&self) -> bool {
        matches!(self.model, ModelKind::Milnor | ModelKind::Heisenberg | ModelKind::Synthetic)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConfigFormat {
    Json,
    Toml,
}

pub fn parse_model_config(text: &str, format: ConfigFormat) -> Result<ModelConfig> {
    let config: ModelConfig = match format {
        ConfigFormat::Json => serde_json::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?,
        ConfigFormat::Toml => toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?,
    };
    config.validate()?;
    Ok(config)
}

/// Reads a config file. The format follows the extension (`.json`,
/// `.toml`); other extensions are tried as JSON, then TOML.
pub fn load_model_config(path: impl AsRef<Path>) -> Result<ModelConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => parse_model_config(&text, ConfigFormat::Json),
        Some("toml") => parse_model_config(&text, ConfigFormat::Toml),
        _ => parse_model_config(&text, ConfigFormat::Json).or_else(|json_err| match json_err {
            Error::ConfigParse(_) => parse_model_config(&text, ConfigFormat::Toml),
            other => Err(other),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_milnor_file_gets_defaults() {
        let c = parse_model_config(r#"{"model": "milnor"}"#, ConfigFormat::Json).unwrap();
        assert_eq!((c.lambda2, c.lambda3), (0.0, 0.0));
        assert_eq!(c.samples, 100);
        assert_eq!(c.tolerances.identity, 1e-7);
        assert_eq!(c.tolerances.algebraic, 1e-10);
    }

    #[test]
    fn zero_homothety_names_the_field() {
        let e = parse_model_config("model = \"milnor\"\na = 0.0\n", ConfigFormat::Toml).unwrap_err();
        assert!(matches!(e, Error::Config { ref field, .. } if field == "a"), "{e}");
    }

    #[test]
    fn kappa_above_one_is_rejected() {
        let e = parse_model_config(r#"{"model": "synthetic", "kappa": 2}"#, ConfigFormat::Json).unwrap_err();
        assert!(e.to_string().contains("κ ≤ 1 required"), "{e}");
    }

    #[test]
    fn malformed_file_is_a_parse_error() {
        assert!(matches!(
            parse_model_config("{model: ", ConfigFormat::Json),
            Err(Error::ConfigParse(_))
        ));
        assert!(matches!(
            parse_model_config(r#"{"model": "torus"}"#, ConfigFormat::Json),
            Err(Error::ConfigParse(_))
        ));
    }
}
