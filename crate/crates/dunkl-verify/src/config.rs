//! Experiment configuration: which root-system contexts to build, which
//! checks to run on each, the quadrature resolution, and optional custom
//! test functions.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use dunkl_core::quadrature::Levels;

use crate::checks;
use crate::testfn::FunctionSpec;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("no jobs configured")]
    NoJobs,
    #[error("job {job}: empty check list (use [\"all\"] for everything)")]
    NoChecks { job: usize },
    #[error("job {job}: unknown check id `{id}`; known ids: {known}")]
    UnknownCheck {
        job: usize,
        id: String,
        known: String,
    },
    #[error("quadrature levels must satisfy 4 ≤ coarse < fine, got {coarse}/{fine}")]
    BadLevels { coarse: usize, fine: usize },
}

/// Two-level quadrature resolution; the coarse/fine difference feeds the
/// reported `quad_error`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LevelsConfig {
    pub coarse: usize,
    pub fine: usize,
}

impl LevelsConfig {
    pub fn to_levels(&self) -> Levels {
        Levels::new(self.coarse, self.fine)
    }
}

/// One verification job: a root-system family with multiplicities, the
/// checks to run, and (optionally) custom test functions replacing the
/// built-in defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JobConfig {
    /// Family descriptor, e.g. `A2`, `B3`, `Z2^2`, `I2(5)`, `A1xZ2^1`.
    pub family: String,
    /// Rank for bare letters like `A` or `B`; ignored otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    /// One multiplicity per orbit, parsed exactly (`"1/2"`, `"0.3"`, `"2"`).
    /// A single entry broadcasts over all orbits.
    pub k: Vec<String>,
    /// Check ids to run, or `["all"]` for the whole registry.
    pub checks: Vec<String>,
    /// Custom test functions; when present they replace the defaults for
    /// every check that samples test functions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functions: Option<Vec<FunctionSpec>>,
}

impl JobConfig {
    fn all(family: &str, k: &[&str]) -> Self {
        JobConfig {
            family: family.to_string(),
            rank: None,
            k: k.iter().map(|s| s.to_string()).collect(),
            checks: vec!["all".to_string()],
            functions: None,
        }
    }

    /// Expand `"all"` and return the ids to run, in registry order.
    pub fn resolved_checks(&self) -> Vec<String> {
        if self.checks.iter().any(|c| c == "all") {
            checks::check_ids().iter().map(|s| s.to_string()).collect()
        } else {
            let order: Vec<&'static str> = checks::check_ids();
            let mut out: Vec<String> = Vec::new();
            for id in &order {
                if self.checks.iter().any(|c| c == id) && !out.iter().any(|c| c == id) {
                    out.push(id.to_string());
                }
            }
            out
        }
    }
}

/// Top-level configuration (JSON on disk).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Seed for every randomized ingredient; fixed seed ⇒ identical output.
    pub seed: u64,
    pub levels: LevelsConfig,
    /// Optional path to also write the JSON lines to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub jobs: Vec<JobConfig>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|source| ConfigError::Json {
                path: path.to_path_buf(),
                source,
            })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.levels.coarse < 4 || self.levels.fine <= self.levels.coarse {
            return Err(ConfigError::BadLevels {
                coarse: self.levels.coarse,
                fine: self.levels.fine,
            });
        }
        if self.jobs.is_empty() {
            return Err(ConfigError::NoJobs);
        }
        let known = checks::check_ids();
        for (j, job) in self.jobs.iter().enumerate() {
            if job.checks.is_empty() {
                return Err(ConfigError::NoChecks { job: j });
            }
            for id in &job.checks {
                if id != "all" && !known.contains(&id.as_str()) {
                    return Err(ConfigError::UnknownCheck {
                        job: j,
                        id: id.clone(),
                        known: known.join(", "),
                    });
                }
            }
        }
        Ok(())
    }
}

/// The built-in experiment: one rank-one context with large multiplicity,
/// one reducible axis product, and the two standard rank-two families, all
/// with exact rational multiplicities and every check enabled.
pub fn default_config() -> ExperimentConfig {
    ExperimentConfig {
        seed: 7,
        levels: LevelsConfig {
            coarse: 10,
            fine: 20,
        },
        output: None,
        jobs: vec![
            JobConfig::all("Z2^1", &["3/2"]),
            JobConfig::all("Z2^2", &["1/2", "3/4"]),
            JobConfig::all("A2", &["1/2"]),
            JobConfig::all("B2", &["3/10", "7/10"]),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        default_config().validate().unwrap();
    }

    #[test]
    fn json_round_trip() {
        let cfg = default_config();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        back.validate().unwrap();
        assert_eq!(back.seed, cfg.seed);
        assert_eq!(back.jobs.len(), cfg.jobs.len());
        assert_eq!(back.jobs[3].k, vec!["3/10", "7/10"]);
    }

    #[test]
    fn unknown_check_is_rejected() {
        let mut cfg = default_config();
        cfg.jobs[0].checks = vec!["thm99.9".to_string()];
        match cfg.validate() {
            Err(ConfigError::UnknownCheck { id, .. }) => assert_eq!(id, "thm99.9"),
            other => panic!("expected UnknownCheck, got {other:?}"),
        }
    }

    #[test]
    fn bad_levels_are_rejected() {
        let mut cfg = default_config();
        cfg.levels = LevelsConfig {
            coarse: 20,
            fine: 10,
        };
        assert!(matches!(cfg.validate(), Err(ConfigError::BadLevels { .. })));
    }

    #[test]
    fn all_expands_to_registry_order() {
        let cfg = default_config();
        let ids = cfg.jobs[0].resolved_checks();
        assert_eq!(
            ids,
            checks::check_ids()
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn explicit_subset_keeps_registry_order() {
        let mut cfg = default_config();
        cfg.jobs[0].checks = vec!["thm6.1".into(), "lem2.1".into(), "thm6.1".into()];
        let ids = cfg.jobs[0].resolved_checks();
        assert_eq!(ids, vec!["lem2.1".to_string(), "thm6.1".to_string()]);
    }

    #[test]
    fn custom_function_specs_deserialize() {
        let text = r#"{
            "seed": 1,
            "levels": {"coarse": 8, "fine": 16},
            "jobs": [{
                "family": "Z2^1",
                "k": ["1/2"],
                "checks": ["thm3.4"],
                "functions": [
                    {"type": "mollifier", "center": [2.0], "radius": 1.0},
                    {"type": "gauss-bump", "center": [1.5], "width": 0.4}
                ]
            }]
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.jobs[0].functions.as_ref().unwrap().len(), 2);
    }
}
