//! Run configuration: TOML or JSON, chosen by file extension.

use std::fs;
use std::path::Path;

use cbose_core::dyson::{TrialParameters, VariationalConfig};
use cbose_core::jellium::JelliumParams;
use cbose_core::report::Constants;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoComponentConfig {
    /// Condensate number `n` of the grand-canonical state.
    pub n: f64,
    pub eps: f64,
    #[serde(default)]
    pub constants: Constants,
}

impl Default for TwoComponentConfig {
    fn default() -> Self {
        Self {
            n: 1e8,
            eps: 0.0,
            constants: Constants::default(),
        }
    }
}

impl TwoComponentConfig {
    pub fn trial_parameters(&self) -> cbose_core::Result<TrialParameters> {
        let mut p = TrialParameters::new(self.n, self.eps)?;
        p.constants = self.constants.clone();
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub format: Format,
    pub minimize: VariationalConfig,
    pub two_component: TwoComponentConfig,
    pub one_component: JelliumParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            format: Format::Json,
            minimize: VariationalConfig::default(),
            two_component: TwoComponentConfig::default(),
            one_component: JelliumParams::new(1e6, None),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        self.minimize
            .validate()
            .map_err(|e| CliError::Config(format!("minimize: {e}")))?;
        self.two_component
            .trial_parameters()
            .map_err(|e| CliError::Config(format!("two_component: {e}")))?;
        let oc = &self.one_component;
        positive("one_component.rho", oc.rho)?;
        positive("one_component.l", oc.l)?;
        positive("one_component.r", oc.r)?;
        if let Some(eps) = oc.eps {
            positive("one_component.eps", eps)?;
        }
        if oc.neutrality_samples < 2 {
            return Err(CliError::Config(
                "one_component.neutrality_samples must be at least 2".into(),
            ));
        }
        oc.profile()
            .map_err(|e| CliError::Config(format!("one_component: {e}")))?;
        Ok(())
    }
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

pub fn parse_config(text: &str, json: bool) -> Result<RunConfig, CliError> {
    let cfg: RunConfig = if json {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?
    } else {
        toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text, is_json(path)).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn render_config(cfg: &RunConfig, json: bool) -> Result<String, CliError> {
    if json {
        serde_json::to_string_pretty(cfg).map_err(|e| CliError::Output(e.to_string()))
    } else {
        toml::to_string(cfg).map_err(|e| CliError::Output(e.to_string()))
    }
}

pub fn save_config(cfg: &RunConfig, path: &Path) -> Result<(), CliError> {
    let text = render_config(cfg, is_json(path))?;
    fs::write(path, text)
        .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_in_both_formats() {
        let cfg = RunConfig::default();
        for json in [false, true] {
            let text = render_config(&cfg, json).unwrap();
            assert_eq!(parse_config(&text, json).unwrap(), cfg);
        }
    }

    #[test]
    fn missing_key_is_named() {
        let text = render_config(&RunConfig::default(), false).unwrap();
        let cut: String = text
            .lines()
            .filter(|l| !l.starts_with("seed"))
            .collect::<Vec<_>>()
            .join("\n");
        let err = parse_config(&cut, false).unwrap_err().to_string();
        assert!(err.contains("seed"), "{err}");
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = render_config(&RunConfig::default(), false).unwrap();
        let err = parse_config(&format!("bogus = 1\n{text}"), false)
            .unwrap_err()
            .to_string();
        assert!(err.contains("bogus"), "{err}");
    }

    #[test]
    fn nonpositive_tolerance_is_rejected() {
        let mut cfg = RunConfig::default();
        cfg.minimize.tol = 0.0;
        assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
    }
}
