//! Run configuration: a TOML file of defaults plus command-line overrides.
//! Every report embeds the SHA-256 hash of the effective configuration so a
//! run can be tied back to exactly what produced it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use scsim_core::simulator::{AnswerPolicy, ChiefComplaintMode, NegativeAnswer};

use crate::CliError;

fn default_k() -> usize {
    8
}
fn default_n_per_disease() -> u32 {
    100
}
fn default_n_per_common() -> u32 {
    50
}
fn default_max_questions() -> usize {
    15
}
fn default_frequency() -> f64 {
    0.5
}
fn default_resamples() -> usize {
    10_000
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsConfig {
    pub hpoa: Option<PathBuf>,
    pub mapping: Option<PathBuf>,
    pub catalog: Option<PathBuf>,
    pub demographics: Option<PathBuf>,
    pub common_profiles: Option<PathBuf>,
    pub kb_before: Option<PathBuf>,
    pub kb_after: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_n_per_disease")]
    pub n_per_disease: u32,
    #[serde(default = "default_n_per_common")]
    pub n_per_common_disease: u32,
    #[serde(default = "default_max_questions")]
    pub max_questions: usize,
    /// Parallelism degree for simulation; 0 means all cores.
    #[serde(default)]
    pub jobs: usize,
    /// "absent" or "unknown".
    #[serde(default)]
    pub answer_policy: NegativeAnswer,
    /// "seeded" or "none".
    #[serde(default)]
    pub chief_complaint: ChiefComplaintMode,
    #[serde(default)]
    pub strict_frequencies: bool,
    #[serde(default = "default_frequency")]
    pub default_frequency: f64,
    #[serde(default = "default_resamples")]
    pub bootstrap_resamples: usize,
    /// Diseases to generate rare vignettes for.
    #[serde(default)]
    pub targets: Vec<String>,
    #[serde(default)]
    pub paths: PathsConfig,
    /// Disease-id rewrites applied while loading annotation files, for
    /// reconciling granularity mismatches between knowledge sources.
    #[serde(default)]
    pub aliases: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        let mut config: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::Validation(format!("invalid config {}: {e}", path.display())))?;
        // relative paths resolve against the config file's directory
        if let Some(base) = path.parent() {
            config.paths = config.paths.resolved(base);
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.k == 0 {
            return Err(CliError::Validation("k must be at least 1".to_string()));
        }
        if !(0.0..=1.0).contains(&self.default_frequency) {
            return Err(CliError::Validation(format!(
                "default_frequency {} not in [0,1]",
                self.default_frequency
            )));
        }
        for (path, label) in [
            (&self.paths.hpoa, "hpoa"),
            (&self.paths.mapping, "mapping"),
            (&self.paths.catalog, "catalog"),
            (&self.paths.demographics, "demographics"),
            (&self.paths.common_profiles, "common_profiles"),
            (&self.paths.kb_before, "kb_before"),
            (&self.paths.kb_after, "kb_after"),
        ] {
            if let Some(p) = path {
                if !p.exists() {
                    return Err(CliError::Validation(format!(
                        "configured {label} path {} does not exist",
                        p.display()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn answer_policy(&self) -> AnswerPolicy {
        AnswerPolicy {
            negative: self.answer_policy,
            chief_complaint: self.chief_complaint,
        }
    }

    /// Hash of the effective configuration, embedded in reports.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut out = String::with_capacity(16);
        for b in &digest[..8] {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }
}

impl PathsConfig {
    fn resolved(self, base: &Path) -> Self {
        let resolve = |p: Option<PathBuf>| p.map(|p| if p.is_relative() { base.join(p) } else { p });
        Self {
            hpoa: resolve(self.hpoa),
            mapping: resolve(self.mapping),
            catalog: resolve(self.catalog),
            demographics: resolve(self.demographics),
            common_profiles: resolve(self.common_profiles),
            kb_before: resolve(self.kb_before),
            kb_after: resolve(self.kb_after),
        }
    }
}

impl RunConfig {
    pub fn base() -> Self {
        Self {
            seed: 0,
            k: default_k(),
            n_per_disease: default_n_per_disease(),
            n_per_common_disease: default_n_per_common(),
            max_questions: default_max_questions(),
            jobs: 0,
            answer_policy: NegativeAnswer::Absent,
            chief_complaint: ChiefComplaintMode::Seeded,
            strict_frequencies: false,
            default_frequency: default_frequency(),
            bootstrap_resamples: default_resamples(),
            targets: Vec::new(),
            paths: PathsConfig::default(),
            aliases: BTreeMap::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_hash_are_stable() {
        let a = RunConfig::base();
        let b = RunConfig::base();
        assert_eq!(a.config_hash(), b.config_hash());
        assert_eq!(a.k, 8);
        assert_eq!(a.n_per_disease, 100);
        assert_eq!(a.max_questions, 15);
        assert_eq!(a.bootstrap_resamples, 10_000);

        let mut c = RunConfig::base();
        c.seed = 1;
        assert_ne!(a.config_hash(), c.config_hash());
    }

    #[test]
    fn toml_round_trip() {
        let text = r#"
seed = 42
k = 8
n_per_disease = 100
targets = ["ORPHA:117", "OMIM:168600"]

[paths]

[aliases]
"ORPHANET:117" = "ORPHA:117"
"#;
        let config: RunConfig = toml::from_str(text).unwrap();
        assert_eq!(config.seed, 42);
        assert_eq!(config.targets.len(), 2);
        assert_eq!(config.aliases["ORPHANET:117"], "ORPHA:117");
        config.validate().unwrap();
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<RunConfig>("sede = 42\n").is_err());
    }
}
