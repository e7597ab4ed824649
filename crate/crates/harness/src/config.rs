//! Run configuration: a JSON file mirroring the CLI flags, with the CLI
//! taking precedence over the file.

use crate::table::OutputFormat;
use anyhow::{Context, Result};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Effective settings for one experiment run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub format: OutputFormat,
    pub params: BTreeMap<String, String>,
}

impl RunConfig {
    /// Merge: defaults < config file < CLI.
    pub fn merge(
        id: &str,
        file: Option<FileConfig>,
        cli_seed: Option<u64>,
        cli_out: Option<PathBuf>,
        cli_format: Option<OutputFormat>,
        cli_params: &[(String, String)],
    ) -> Result<Self> {
        let file = file.unwrap_or_default();
        let format = match (cli_format, file.format.as_deref()) {
            (Some(f), _) => f,
            (None, Some(s)) => s
                .parse()
                .map_err(|e: String| anyhow::anyhow!("config format: {e}"))?,
            (None, None) => OutputFormat::Csv,
        };
        let mut params = file.params;
        for (key, value) in cli_params {
            params.insert(key.clone(), value.clone());
        }
        Ok(RunConfig {
            seed: cli_seed.or(file.seed).unwrap_or(0),
            out: cli_out
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("runs").join(id)),
            format,
            params,
        })
    }
}

/// Typed access to the string parameter map.
pub struct Params<'a>(pub &'a BTreeMap<String, String>);

impl Params<'_> {
    pub fn usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v.parse().with_context(|| format!("parameter {key}={v}")),
        }
    }

    pub fn u64(&self, key: &str, default: u64) -> Result<u64> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v.parse().with_context(|| format!("parameter {key}={v}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_overrides_file() {
        let file = FileConfig {
            seed: Some(7),
            out: Some(PathBuf::from("fromfile")),
            format: Some("json".to_string()),
            params: BTreeMap::from([("n".to_string(), "5".to_string())]),
        };
        let cfg = RunConfig::merge(
            "demo",
            Some(file),
            Some(9),
            None,
            None,
            &[("n".to_string(), "8".to_string())],
        )
        .unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.out, PathBuf::from("fromfile"));
        assert_eq!(cfg.format, OutputFormat::Json);
        assert_eq!(Params(&cfg.params).usize("n", 0).unwrap(), 8);
    }
}
