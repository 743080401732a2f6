//! Versioned TOML experiment files.
//!
//! ```toml
//! schema = "logevo/1"
//! threads = 4
//!
//! [sandwich]
//! claim = "P61"
//! tmin = 1e3
//! ```
//!
//! Each table holds the same keys as the subcommand's long flags, with `_`
//! in place of `-`. Flags given on the command line win over the file.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA: &str = "logevo/1";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema: String,
    pub threads: Option<usize>,
    pub no_timestamp: Option<bool>,
    pub roots: Option<toml::Table>,
    pub mode: Option<toml::Table>,
    pub integral: Option<toml::Table>,
    pub ratio: Option<toml::Table>,
    pub sandwich: Option<toml::Table>,
    #[serde(rename = "profile-error")]
    pub profile_error: Option<toml::Table>,
    pub solve: Option<toml::Table>,
    pub rates: Option<toml::Table>,
    #[serde(rename = "verify-pointwise")]
    pub verify_pointwise: Option<toml::Table>,
    pub report: Option<toml::Table>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        ConfigFile::parse(&text).map_err(|e| match e {
            CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<ConfigFile, CliError> {
        let cfg: ConfigFile =
            toml::from_str(text).map_err(|e| CliError::Usage(format!("bad config: {e}")))?;
        if cfg.schema != SCHEMA {
            return Err(CliError::Usage(format!(
                "config schema must be {SCHEMA:?}, got {:?}",
                cfg.schema
            )));
        }
        Ok(cfg)
    }

    pub fn section(&self, command: &str) -> Option<&toml::Table> {
        match command {
            "roots" => self.roots.as_ref(),
            "mode" => self.mode.as_ref(),
            "integral" => self.integral.as_ref(),
            "ratio" => self.ratio.as_ref(),
            "sandwich" => self.sandwich.as_ref(),
            "profile-error" => self.profile_error.as_ref(),
            "solve" => self.solve.as_ref(),
            "rates" => self.rates.as_ref(),
            "verify-pointwise" => self.verify_pointwise.as_ref(),
            "report" => self.report.as_ref(),
            _ => None,
        }
    }
}

/// Overlays the flags that were set on the command line onto the config
/// table, then parses the result. Unknown keys in the table are rejected by
/// the target type.
pub fn resolve<T: Serialize + DeserializeOwned>(
    flags: &T,
    section: Option<&toml::Table>,
    command: &str,
) -> Result<T, CliError> {
    let mut merged = match section {
        Some(t) => serde_json::to_value(t).map_err(|e| CliError::Usage(e.to_string()))?,
        None => serde_json::Value::Object(Default::default()),
    };
    let cli = serde_json::to_value(flags).map_err(|e| CliError::Usage(e.to_string()))?;
    if let (Some(dst), serde_json::Value::Object(src)) = (merged.as_object_mut(), cli) {
        for (k, v) in src {
            if !v.is_null() {
                dst.insert(k, v);
            }
        }
    }
    serde_json::from_value(merged).map_err(|e| CliError::Usage(format!("[{command}] {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Default, Serialize, Deserialize, PartialEq)]
    #[serde(deny_unknown_fields)]
    struct Demo {
        a: Option<f64>,
        b: Option<String>,
    }

    #[test]
    fn flags_override_file() {
        let cfg =
            ConfigFile::parse("schema = \"logevo/1\"\n[roots]\na = 1.5\nb = \"x\"\n").unwrap();
        let flags = Demo {
            a: Some(2.0),
            b: None,
        };
        let d: Demo = resolve(&flags, cfg.section("roots"), "roots").unwrap();
        assert_eq!(
            d,
            Demo {
                a: Some(2.0),
                b: Some("x".into())
            }
        );
    }

    #[test]
    fn integers_in_file_are_accepted_for_reals() {
        let cfg = ConfigFile::parse("schema = \"logevo/1\"\n[roots]\na = 4\n").unwrap();
        let d: Demo = resolve(&Demo::default(), cfg.section("roots"), "roots").unwrap();
        assert_eq!(d.a, Some(4.0));
    }

    #[test]
    fn unknown_keys_and_schemas_are_rejected() {
        assert!(ConfigFile::parse("schema = \"logevo/1\"\nextra = 1\n").is_err());
        assert!(ConfigFile::parse("schema = \"logevo/2\"\n").is_err());
        assert!(ConfigFile::parse("threads = 2\n").is_err());
        let cfg = ConfigFile::parse("schema = \"logevo/1\"\n[roots]\nc = 1\n").unwrap();
        assert!(resolve(&Demo::default(), cfg.section("roots"), "roots").is_err());
    }
}
