//! Run configuration: one JSON document drives every pipeline stage.
//!
//! Precedence is flag > config > default: command-line flags override
//! config fields, which override the defaults baked in here. The output
//! directory can additionally be overridden by the `HUBL_OUT` environment
//! variable. Configs hash to a short hex digest that every written
//! artifact embeds, so outputs can be traced back to the exact
//! configuration that produced them.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::benchmark::BehaviorSpec;
use crate::error::{Error, Result};
use crate::mdp::TabularMdp;
use crate::relabel::BlendingKind;

/// Where the model comes from: inline JSON or a file path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MdpSpec {
    Path { path: PathBuf },
    Inline(crate::mdp::MdpJson),
}

/// Solver-stage settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Blend weight used by raw-transition solving and by analysis; when
    /// absent, the top-level `alpha` applies.
    pub alpha: Option<f64>,
    /// Seed for the solver's data split and model rows.
    pub seed: u64,
    /// Override for the value-scale bound (default `1/(1-gamma)`).
    pub v_max: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            alpha: None,
            seed: 0,
            v_max: None,
        }
    }
}

/// Grids for the sweep stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Dataset sizes in transitions; each is rounded up to a whole number
    /// of trajectories of `max_len` steps.
    pub n_grid: Vec<usize>,
    pub alpha_grid: Vec<f64>,
    pub seed_grid: Vec<u64>,
}

/// The single configuration document all subcommands consume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mdp: MdpSpec,
    #[serde(default = "default_behavior")]
    pub behavior: BehaviorSpec,
    #[serde(default = "default_n_traj")]
    pub n_traj: usize,
    #[serde(default = "default_max_len")]
    pub max_len: usize,
    /// States that absorb: a trajectory ends (terminal) upon entering one.
    #[serde(default)]
    pub terminal_states: Vec<usize>,
    #[serde(default = "default_strategy")]
    pub strategy: BlendingKind,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Seed for dataset generation.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default = "default_outdir")]
    pub outdir: PathBuf,
}

fn default_behavior() -> BehaviorSpec {
    BehaviorSpec::Expert
}
fn default_n_traj() -> usize {
    200
}
fn default_max_len() -> usize {
    50
}
fn default_strategy() -> BlendingKind {
    BlendingKind::Constant
}
fn default_alpha() -> f64 {
    0.1
}
fn default_outdir() -> PathBuf {
    PathBuf::from("hubl_out")
}

impl RunConfig {
    /// Parse and validate a config file.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::invalid(format!("config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Validate field ranges; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        if let MdpSpec::Path { path } = &self.mdp {
            if !path.exists() {
                return Err(Error::invalid(format!(
                    "mdp.path: file {} does not exist",
                    path.display()
                )));
            }
        }
        self.behavior
            .validate()
            .map_err(|e| Error::invalid(format!("behavior: {e}")))?;
        if self.n_traj == 0 {
            return Err(Error::invalid("n_traj: must be at least 1"));
        }
        if self.max_len == 0 {
            return Err(Error::invalid("max_len: must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid(format!(
                "alpha: must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if let Some(a) = self.solver.alpha {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::invalid(format!(
                    "solver.alpha: must lie in [0, 1], got {a}"
                )));
            }
        }
        if let Some(v) = self.solver.v_max {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!(
                    "solver.v_max: must be positive and finite, got {v}"
                )));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.n_grid.is_empty() {
                return Err(Error::invalid("sweep.n_grid: must be nonempty"));
            }
            if sweep.alpha_grid.is_empty() {
                return Err(Error::invalid("sweep.alpha_grid: must be nonempty"));
            }
            if sweep.seed_grid.is_empty() {
                return Err(Error::invalid("sweep.seed_grid: must be nonempty"));
            }
            if let Some(n) = sweep.n_grid.iter().find(|&&n| n == 0) {
                return Err(Error::invalid(format!("sweep.n_grid: sizes must be >= 1, got {n}")));
            }
            if let Some(a) = sweep.alpha_grid.iter().find(|a| !(0.0..=1.0).contains(*a)) {
                return Err(Error::invalid(format!(
                    "sweep.alpha_grid: entries must lie in [0, 1], got {a}"
                )));
            }
        }
        Ok(())
    }

    /// Load the model this config refers to. Inline models are validated
    /// on construction; file paths are read relative to the working
    /// directory.
    pub fn resolve_mdp(&self) -> Result<TabularMdp> {
        match &self.mdp {
            MdpSpec::Inline(doc) => TabularMdp::from_doc(doc.clone()),
            MdpSpec::Path { path } => TabularMdp::load(path),
        }
    }

    /// Output directory, honoring the `HUBL_OUT` environment override.
    pub fn resolved_outdir(&self) -> PathBuf {
        match std::env::var_os("HUBL_OUT") {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.outdir.clone(),
        }
    }

    /// Short hex digest of the serialized config; embedded in every
    /// artifact manifest.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Blend weight for solving/analysis: the solver-specific override if
    /// set, else the top-level `alpha`.
    pub fn solver_alpha(&self) -> f64 {
        self.solver.alpha.unwrap_or(self.alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inline_config_json() -> String {
        let mdp = crate::testutil::two_state_chain(0.5).to_doc();
        let mdp_text = serde_json::to_string(&mdp).unwrap();
        format!(
            r#"{{
                "mdp": {mdp_text},
                "behavior": {{"kind": "uniform"}},
                "n_traj": 10,
                "max_len": 5,
                "alpha": 0.25,
                "seed": 3
            }}"#
        )
    }

    fn write_config(dir: &Path, text: &str) -> PathBuf {
        let path = dir.join("hubl.json");
        std::fs::write(&path, text).unwrap();
        path
    }

    #[test]
    fn loads_an_inline_config_and_fills_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(dir.path(), &inline_config_json());
        let cfg = RunConfig::load(&path).unwrap();
        assert_eq!(cfg.n_traj, 10);
        assert_eq!(cfg.max_len, 5);
        assert_eq!(cfg.alpha, 0.25);
        assert_eq!(cfg.seed, 3);
        // Defaults kick in for everything unspecified.
        assert_eq!(cfg.strategy, BlendingKind::Constant);
        assert_eq!(cfg.terminal_states, Vec::<usize>::new());
        assert_eq!(cfg.solver, SolverConfig::default());
        assert_eq!(cfg.outdir, PathBuf::from("hubl_out"));
        assert!(cfg.sweep.is_none());
        // The inline model resolves to a valid instance.
        let mdp = cfg.resolve_mdp().unwrap();
        assert_eq!(mdp.n_states, 2);
        assert_eq!(mdp.discount, 0.5);
    }

    #[test]
    fn model_paths_resolve_relative_to_the_working_directory() {
        let dir = tempfile::tempdir().unwrap();
        let mdp = crate::testutil::two_state_chain(0.5);
        let mdp_path = dir.path().join("mdp.json");
        mdp.save(&mdp_path).unwrap();
        let text = format!(
            r#"{{"mdp": {{"path": {}}}}}"#,
            serde_json::to_string(&mdp_path).unwrap()
        );
        let path = write_config(dir.path(), &text);
        let cfg = RunConfig::load(&path).unwrap();
        let loaded = cfg.resolve_mdp().unwrap();
        assert_eq!(loaded.n_states, 2);

        // A dangling path is rejected at load time, naming the field.
        let text = r#"{"mdp": {"path": "/nonexistent/mdp.json"}}"#;
        let path = write_config(dir.path(), text);
        let err = RunConfig::load(&path).unwrap_err();
        assert!(err.to_string().contains("mdp.path"), "{err}");
    }

    #[test]
    fn validation_names_the_offending_field() {
        let dir = tempfile::tempdir().unwrap();
        let base = inline_config_json();
        for (needle, broken) in [
            ("n_traj", base.replace(r#""n_traj": 10"#, r#""n_traj": 0"#)),
            ("max_len", base.replace(r#""max_len": 5"#, r#""max_len": 0"#)),
            ("alpha", base.replace(r#""alpha": 0.25"#, r#""alpha": 1.5"#)),
            (
                "behavior",
                base.replace(
                    r#""behavior": {"kind": "uniform"}"#,
                    r#""behavior": {"kind": "epsilon_noisy", "epsilon": 2.0}"#,
                ),
            ),
        ] {
            let path = write_config(dir.path(), &broken);
            let err = RunConfig::load(&path).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{needle}: wrong exit class");
            assert!(err.to_string().contains(needle), "{needle}: {err}");
        }

        // Sweep grids must be nonempty and in range.
        let mut cfg: RunConfig = serde_json::from_str(&inline_config_json()).unwrap();
        cfg.sweep = Some(SweepConfig {
            n_grid: vec![],
            alpha_grid: vec![0.1],
            seed_grid: vec![0],
        });
        assert!(cfg.validate().unwrap_err().to_string().contains("sweep.n_grid"));
        cfg.sweep = Some(SweepConfig {
            n_grid: vec![100],
            alpha_grid: vec![2.0],
            seed_grid: vec![0],
        });
        assert!(cfg.validate().unwrap_err().to_string().contains("sweep.alpha_grid"));
    }

    #[test]
    fn malformed_json_is_invalid_not_a_panic() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(dir.path(), "{ not json");
        assert_eq!(RunConfig::load(&path).unwrap_err().exit_code(), 2);
        let missing = dir.path().join("absent.json");
        assert_eq!(RunConfig::load(&missing).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let cfg: RunConfig = serde_json::from_str(&inline_config_json()).unwrap();
        let h1 = cfg.hash();
        assert_eq!(h1.len(), 16);
        assert_eq!(h1, cfg.hash(), "hashing is deterministic");
        let mut changed = cfg.clone();
        changed.seed = 4;
        assert_ne!(h1, changed.hash(), "any field change moves the digest");
    }

    #[test]
    fn solver_alpha_prefers_the_stage_override() {
        let mut cfg: RunConfig = serde_json::from_str(&inline_config_json()).unwrap();
        assert_eq!(cfg.solver_alpha(), 0.25);
        cfg.solver.alpha = Some(0.0);
        assert_eq!(cfg.solver_alpha(), 0.0);
    }

    #[test]
    fn outdir_env_override_wins_only_when_set_and_nonempty() {
        // All three cases live in one test: the variable is process-global,
        // so separate tests would race under the parallel runner.
        let cfg: RunConfig = serde_json::from_str(&inline_config_json()).unwrap();
        unsafe { std::env::remove_var("HUBL_OUT") };
        assert_eq!(cfg.resolved_outdir(), PathBuf::from("hubl_out"));
        unsafe { std::env::set_var("HUBL_OUT", "/tmp/elsewhere") };
        assert_eq!(cfg.resolved_outdir(), PathBuf::from("/tmp/elsewhere"));
        unsafe { std::env::set_var("HUBL_OUT", "") };
        assert_eq!(cfg.resolved_outdir(), PathBuf::from("hubl_out"));
        unsafe { std::env::remove_var("HUBL_OUT") };
    }
}
