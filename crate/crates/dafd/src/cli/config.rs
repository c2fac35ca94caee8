//! Run configuration: built-in defaults, overridden by a TOML config file,
//! overridden by command-line flags. Every writing command persists the
//! effective configuration as a provenance sidecar so reruns are exact.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dann::{Hyperparams, TrainConfig, TrainMode};
use crate::error::{DafdError, Result};

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    // paths and selection
    pub data: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub mode: Option<String>,
    pub scenario: Option<String>,
    pub pair: Option<String>,
    // determinism and parallelism
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    // training
    pub epochs: Option<usize>,
    pub patience: Option<usize>,
    pub batch_per_domain: Option<usize>,
    pub val_fraction: Option<f64>,
    pub lr: Option<f64>,
    pub lambda: Option<f64>,
    pub dropout: Option<f64>,
    // synthetic generation
    pub subjects: Option<usize>,
    pub trials_per_class: Option<usize>,
    pub rate_hz: Option<f64>,
    pub noise_sigma: Option<f64>,
    pub rotation_deg: Option<f64>,
    pub gain: Option<[f64; 3]>,
    pub offset_g: Option<[f64; 3]>,
    pub rate_override_hz: Option<f64>,
    pub confuser_fraction: Option<f64>,
}

impl RunConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| DafdError::io(path, e))?;
        toml::from_str(&text)
            .map_err(|e| DafdError::parse(path, 0, format!("bad run config: {e}")))
    }

    /// Field-wise overlay: values set in `flags` win.
    pub fn overlay(mut self, flags: RunConfig) -> RunConfig {
        macro_rules! take {
            ($($field:ident),* $(,)?) => {
                $(if flags.$field.is_some() { self.$field = flags.$field; })*
            };
        }
        take!(
            data, out, mode, scenario, pair, seed, jobs, epochs, patience, batch_per_domain,
            val_fraction, lr, lambda, dropout, subjects, trials_per_class, rate_hz, noise_sigma,
            rotation_deg, gain, offset_g, rate_override_hz, confuser_fraction,
        );
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn jobs(&self) -> usize {
        self.jobs.unwrap_or(1).max(1)
    }

    pub fn hyperparams(&self) -> Result<Hyperparams> {
        let d = Hyperparams::default();
        Hyperparams::new(
            self.dropout.unwrap_or(d.dropout),
            self.lr.unwrap_or(d.lr),
            self.lambda.unwrap_or(d.lambda),
        )
    }

    pub fn train_config(&self, mode: TrainMode) -> Result<TrainConfig> {
        let d = TrainConfig::default();
        let cfg = TrainConfig {
            mode,
            batch_per_domain: self.batch_per_domain.unwrap_or(d.batch_per_domain),
            max_epochs: self.epochs.unwrap_or(d.max_epochs),
            patience: self.patience.unwrap_or(d.patience),
            seed: self.seed(),
            val_fraction: self.val_fraction.unwrap_or(d.val_fraction),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Copy with every field the command consulted made explicit, for the
    /// provenance sidecar.
    pub fn resolved(&self) -> RunConfig {
        let mut r = self.clone();
        r.seed = Some(self.seed());
        r.jobs = Some(self.jobs());
        r
    }
}

#[derive(Debug, Serialize)]
struct Provenance<'a> {
    command: &'a str,
    artifact_version: &'a str,
    config: &'a RunConfig,
}

/// Writes `<dir>/provenance.toml` (or `<file>.provenance.toml` next to a file
/// output) describing exactly how the outputs were produced.
pub fn write_provenance(command: &str, config: &RunConfig, out: &Path, is_dir: bool) -> Result<()> {
    let path = if is_dir {
        out.join("provenance.toml")
    } else {
        let mut name = out.file_name().unwrap_or_default().to_os_string();
        name.push(".provenance.toml");
        out.with_file_name(name)
    };
    let doc = Provenance {
        command,
        artifact_version: env!("CARGO_PKG_VERSION"),
        config: &config.resolved(),
    };
    let text = toml::to_string(&doc)
        .map_err(|e| DafdError::InvalidArgument(format!("provenance serialization: {e}")))?;
    std::fs::write(&path, text).map_err(|e| DafdError::io(&path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config_file_values() {
        let file = RunConfig {
            seed: Some(7),
            lr: Some(0.0005),
            ..RunConfig::default()
        };
        let flags = RunConfig {
            lr: Some(0.001),
            ..RunConfig::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.seed, Some(7));
        assert_eq!(merged.lr, Some(0.001));
    }

    #[test]
    fn config_parses_from_toml() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "seed = 42\nlambda = 0.31\nmode = \"dafd\"\ngain = [0.9, 1.1, 1.0]\n",
        )
        .unwrap();
        let cfg = RunConfig::from_toml_file(&path).unwrap();
        assert_eq!(cfg.seed, Some(42));
        assert_eq!(cfg.lambda, Some(0.31));
        assert_eq!(cfg.gain, Some([0.9, 1.1, 1.0]));
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "sede = 42\n").unwrap();
        assert!(RunConfig::from_toml_file(&path).is_err());
    }
}
