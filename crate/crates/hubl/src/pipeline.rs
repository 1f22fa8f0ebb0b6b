//! The five pipeline stages behind the command-line interface:
//! generate → relabel → solve → analyze → sweep.
//!
//! Each stage reads its inputs from the run's output directory, writes its
//! artifacts there, and embeds the config hash plus the governing seed in
//! a manifest, so re-running any stage with the same config is
//! bit-identical (nothing written here carries a timestamp). The sweep
//! runs its grid with a bounded worker pool, persists one row file per
//! grid point (making interrupted sweeps resumable without duplicate
//! rows), and assembles the CSV in grid order regardless of completion
//! order.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    bias_bound, bound_report, decomposition_check, lemma_suite, policy_evaluation_gap,
    BiasBoundCheck, BoundReport, DecompositionReport, LemmaReport, ANALYSIS_TOL,
};
use crate::benchmark::behavior_policy;
use crate::config::RunConfig;
use crate::dataset::{
    mc_state_values, read_trajectories, rollout, stats, write_trajectories, Dataset, McValues,
};
use crate::error::{Error, Result};
use crate::mdp::{policy_evaluation, Policy, TabularMdp, ValueTable};
use crate::relabel::{
    read_tuples_jsonl, relabel, relabel_discount_only, write_tuples_jsonl, BlendingKind,
    BlendingStrategy, RelabeledTuple,
};
use crate::solver::{vi_lcb, vi_lcb_hubl, vi_lcb_relabeled, VilcbConfig};

/// File layout inside a run's output directory.
pub struct Paths {
    pub outdir: PathBuf,
}

impl Paths {
    pub fn new(outdir: PathBuf) -> Self {
        Paths { outdir }
    }
    pub fn config(&self) -> PathBuf {
        self.outdir.join("config.json")
    }
    pub fn mdp(&self) -> PathBuf {
        self.outdir.join("mdp.json")
    }
    pub fn dataset(&self) -> PathBuf {
        self.outdir.join("dataset.jsonl")
    }
    pub fn dataset_manifest(&self) -> PathBuf {
        self.outdir.join("dataset.manifest.json")
    }
    pub fn tuples(&self) -> PathBuf {
        self.outdir.join("tuples.jsonl")
    }
    pub fn tuples_manifest(&self) -> PathBuf {
        self.outdir.join("tuples.manifest.json")
    }
    pub fn policy(&self) -> PathBuf {
        self.outdir.join("policy.json")
    }
    pub fn reports(&self) -> PathBuf {
        self.outdir.join("reports.json")
    }
    pub fn sweep_csv(&self) -> PathBuf {
        self.outdir.join("sweep.csv")
    }
    pub fn sweep_rows(&self) -> PathBuf {
        self.outdir.join("sweep_rows")
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::invalid(format!("failed to serialize {}: {e}", path.display())))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, 1, format!("malformed JSON: {e}")))
}

fn ensure_outdir(paths: &Paths) -> Result<()> {
    std::fs::create_dir_all(&paths.outdir).map_err(|e| Error::io(&paths.outdir, e))
}

/// Scramble a user-facing seed into the solver's stream so the solver's
/// generators never collide with the rollout generators derived from the
/// same small integers (splitmix-style mix).
pub fn solver_stream_seed(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub config_hash: String,
    pub seed: u64,
    pub n_traj: usize,
    pub n_transitions: usize,
    pub n_states: usize,
    pub n_actions: usize,
    pub support_pairs: usize,
}

/// Generate a dataset: roll out the configured behavior policy and write
/// the model, the trajectory file, and a manifest.
pub fn cmd_generate(cfg: &RunConfig) -> Result<DatasetManifest> {
    let paths = Paths::new(cfg.resolved_outdir());
    ensure_outdir(&paths)?;
    let mdp = cfg.resolve_mdp()?;
    let behavior = behavior_policy(&mdp, &cfg.behavior)?;
    let dataset = rollout(
        &mdp,
        &behavior,
        cfg.max_len,
        cfg.n_traj,
        &cfg.terminal_states,
        cfg.seed,
    )?;
    let data_stats = stats(&dataset);
    let manifest = DatasetManifest {
        config_hash: cfg.hash(),
        seed: cfg.seed,
        n_traj: cfg.n_traj,
        n_transitions: dataset.n_transitions(),
        n_states: mdp.n_states,
        n_actions: mdp.n_actions,
        support_pairs: data_stats.support.n_pairs(),
    };
    write_json(&paths.config(), cfg)?;
    mdp.save(&paths.mdp())?;
    write_trajectories(&paths.dataset(), &dataset.trajectories)?;
    write_json(&paths.dataset_manifest(), &manifest)?;
    Ok(manifest)
}

fn load_dataset(paths: &Paths, mdp: &TabularMdp) -> Result<(Dataset, DatasetManifest)> {
    let manifest: DatasetManifest = read_json(&paths.dataset_manifest())?;
    let trajectories = read_trajectories(&paths.dataset())?;
    let dataset = Dataset::from_parts(
        trajectories,
        mdp.discount,
        manifest.seed,
        mdp.n_states,
        mdp.n_actions,
    )?;
    Ok((dataset, manifest))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuplesManifest {
    pub config_hash: String,
    pub seed: u64,
    pub strategy: BlendingKind,
    pub alpha: f64,
    pub ablation: bool,
    pub n_tuples: usize,
    /// Timeout trajectories whose cut state had no Monte-Carlo value
    /// (bootstrapped as zero) — surfaced as a warning, not an error.
    pub zero_bootstrap_tails: usize,
}

/// Options for [`cmd_relabel`]; flags override config fields.
#[derive(Debug, Clone, Copy, Default)]
pub struct RelabelOptions {
    pub strategy: Option<BlendingKind>,
    pub alpha: Option<f64>,
    pub ablation: bool,
}

/// Relabel the generated dataset into solver-ready tuples.
pub fn cmd_relabel(cfg: &RunConfig, opts: &RelabelOptions) -> Result<TuplesManifest> {
    let paths = Paths::new(cfg.resolved_outdir());
    ensure_outdir(&paths)?;
    let mdp = TabularMdp::load(&paths.mdp())?;
    let (dataset, data_manifest) = load_dataset(&paths, &mdp)?;
    let strategy = BlendingStrategy::new(
        opts.strategy.unwrap_or(cfg.strategy),
        opts.alpha.unwrap_or(cfg.alpha),
    )?;
    let timeout_values = mc_state_values(&dataset, mdp.discount)?;
    let output = if opts.ablation {
        relabel_discount_only(&dataset, &strategy, &timeout_values)?
    } else {
        relabel(&dataset, &strategy, &timeout_values)?
    };
    if output.zero_bootstrap_tails > 0 {
        log::warn!(
            "{} timeout trajectories bootstrapped from absent values (taken as zero)",
            output.zero_bootstrap_tails
        );
    }
    let manifest = TuplesManifest {
        config_hash: cfg.hash(),
        seed: data_manifest.seed,
        strategy: strategy.kind,
        alpha: strategy.alpha,
        ablation: opts.ablation,
        n_tuples: output.tuples.len(),
        zero_bootstrap_tails: output.zero_bootstrap_tails,
    };
    write_tuples_jsonl(&paths.tuples(), &output.tuples)?;
    write_json(&paths.tuples_manifest(), &manifest)?;
    Ok(manifest)
}

/// What the solve stage consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveInput {
    /// Relabeled tuples if present, else the raw dataset.
    #[default]
    Auto,
    /// The relabeled tuples file.
    Tuples,
    /// The raw trajectory dataset (blending applied in-solver).
    Dataset,
}

/// Options for [`cmd_solve`]; flags override config fields.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    pub input: SolveInput,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    /// Run the unblended baseline on the raw dataset.
    pub baseline: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyArtifact {
    pub config_hash: String,
    pub seed: u64,
    /// "relabeled", "raw", or "baseline".
    pub mode: String,
    pub alpha: f64,
    pub n_tuples: usize,
    pub t_horizon: usize,
    pub actions: Vec<usize>,
    /// Exact value of the learned policy at the initial distribution.
    pub v_hat_d0: f64,
    /// Exact optimal value at the initial distribution.
    pub v_star_d0: f64,
    /// `v_star_d0 - v_hat_d0`.
    pub gap: f64,
}

/// Solve for a policy from tuples or raw data, then score it with the
/// exact oracle.
pub fn cmd_solve(cfg: &RunConfig, opts: &SolveOptions) -> Result<PolicyArtifact> {
    let paths = Paths::new(cfg.resolved_outdir());
    ensure_outdir(&paths)?;
    let mdp = TabularMdp::load(&paths.mdp())?;
    // Baselines run unblended no matter what the config says; the artifact
    // records the weight that was actually used.
    let alpha = if opts.baseline {
        0.0
    } else {
        opts.alpha.unwrap_or_else(|| cfg.solver_alpha())
    };
    let user_seed = opts.seed.unwrap_or(cfg.solver.seed);
    let vilcb_cfg = VilcbConfig {
        gamma: mdp.discount,
        v_max: cfg.solver.v_max.unwrap_or_else(|| mdp.v_max()),
        lambda_const: alpha,
        seed: solver_stream_seed(user_seed),
        t_override: None,
    };
    let use_tuples = match (opts.baseline, opts.input) {
        (true, SolveInput::Tuples) => {
            return Err(Error::invalid(
                "baseline solving consumes the raw dataset; drop the tuples input",
            ))
        }
        (true, _) => false,
        (false, SolveInput::Tuples) => true,
        (false, SolveInput::Dataset) => false,
        (false, SolveInput::Auto) => paths.tuples().exists(),
    };
    let (result, mode, n_tuples) = if use_tuples {
        let tuples: Vec<RelabeledTuple> = read_tuples_jsonl(&paths.tuples())?;
        let n = tuples.len();
        let result = vi_lcb_relabeled(&tuples, mdp.n_states, mdp.n_actions, &vilcb_cfg)?;
        (result, "relabeled", n)
    } else {
        let (dataset, _) = load_dataset(&paths, &mdp)?;
        let transitions: Vec<_> = dataset.transitions().collect();
        let n = transitions.len();
        if opts.baseline {
            let result = vi_lcb(&transitions, mdp.n_states, mdp.n_actions, &vilcb_cfg)?;
            (result, "baseline", n)
        } else {
            let data_stats = stats(&dataset);
            let heuristic = mc_state_values(&dataset, mdp.discount)?;
            let result = vi_lcb_hubl(
                &transitions,
                mdp.n_states,
                mdp.n_actions,
                &vilcb_cfg,
                &heuristic,
                &data_stats.support,
            )?;
            (result, "raw", n)
        }
    };
    let actions = match &result.policy {
        Policy::Deterministic(actions) => actions.clone(),
        Policy::Stochastic(_) => unreachable!("solver policies are deterministic"),
    };
    let (gap, v_hat_d0, v_star_d0) = policy_evaluation_gap(&mdp, &result.policy)?;
    let artifact = PolicyArtifact {
        config_hash: cfg.hash(),
        seed: user_seed,
        mode: mode.to_string(),
        alpha,
        n_tuples,
        t_horizon: result.t_horizon,
        actions,
        v_hat_d0,
        v_star_d0,
        gap,
    };
    write_json(&paths.policy(), &artifact)?;
    Ok(artifact)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReports {
    pub config_hash: String,
    pub alpha: f64,
    pub n_tuples: usize,
    pub decomposition: DecompositionReport,
    pub bounds: BoundReport,
    pub lemmas: LemmaReport,
    /// Bias-bound verification in its exact form (`h` set to the true
    /// behavior values, satisfying the bound's hypothesis).
    pub bias_check: BiasBoundCheck,
}

/// Options for [`cmd_analyze`].
#[derive(Debug, Clone, Copy, Default)]
pub struct AnalyzeOptions {
    pub alpha: Option<f64>,
}

/// Run the full verification battery for the solved policy: the
/// decomposition identity, the structural property suite, the exact
/// bias-bound check, and the bound report. Any failed check is an error
/// (distinct exit code at the CLI).
///
/// Decomposition and bounds use the constant-blend abstraction at the
/// configured weight regardless of which trajectory-level strategy
/// produced the tuples; the closed-form bounds are only stated for
/// constant blending.
pub fn cmd_analyze(cfg: &RunConfig, opts: &AnalyzeOptions) -> Result<AnalysisReports> {
    let paths = Paths::new(cfg.resolved_outdir());
    let mdp = TabularMdp::load(&paths.mdp())?;
    let (dataset, _) = load_dataset(&paths, &mdp)?;
    let artifact: PolicyArtifact = read_json(&paths.policy())?;
    if artifact.actions.len() != mdp.n_states {
        return Err(Error::invalid(format!(
            "policy file has {} actions for {} states",
            artifact.actions.len(),
            mdp.n_states
        )));
    }
    let pi_hat = Policy::Deterministic(artifact.actions.clone());
    let alpha = opts.alpha.unwrap_or_else(|| cfg.solver_alpha());
    let data_stats = stats(&dataset);
    let heuristic = mc_state_values(&dataset, mdp.discount)?;
    let h_dense = dense_heuristic(&heuristic, mdp.n_states);
    let lambda_state = vec![alpha; mdp.n_states];
    let mu = behavior_policy(&mdp, &cfg.behavior)?;
    let v_mu = policy_evaluation(&mdp, &mu, ANALYSIS_TOL)?;

    let decomposition =
        decomposition_check(&mdp, &h_dense, &lambda_state, &data_stats.support, &pi_hat)?;
    // Gate on conclusions only: a hypothesis unmet by this dataset (e.g.
    // an empirical support that misses pairs the behavior policy rarely
    // plays) is reported, not an error — no proven statement is violated.
    let lemmas = lemma_suite(&mdp, &mu, &v_mu, alpha, &data_stats.support)?;
    if !lemmas.conclusions_hold() {
        return Err(Error::CheckFailed(format!(
            "structural property suite failed: {lemmas:?}"
        )));
    }
    let bias_check = bias_bound(&mdp, alpha, &mu, &data_stats.support, &v_mu)?;
    let bounds = bound_report(
        &mdp,
        &mu,
        &data_stats.support,
        alpha,
        &h_dense,
        &pi_hat,
        dataset.n_transitions(),
        cfg.solver.v_max.unwrap_or_else(|| mdp.v_max()),
    )?;
    let reports = AnalysisReports {
        config_hash: cfg.hash(),
        alpha,
        n_tuples: dataset.n_transitions(),
        decomposition,
        bounds,
        lemmas,
        bias_check,
    };
    write_json(&paths.reports(), &reports)?;
    Ok(reports)
}

/// Densify a partial Monte-Carlo table for analysis: absent states get 0,
/// which is never read where the blend weight is zero (off-support).
fn dense_heuristic(mc: &McValues, n_states: usize) -> ValueTable {
    mc.to_dense(n_states, 0.0)
}

/// One row of the sweep CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub seed: u64,
    #[serde(rename = "N")]
    pub n: usize,
    pub alpha: f64,
    pub strategy: BlendingKind,
    pub total_gap: f64,
    pub bias: f64,
    pub regret: f64,
    pub bias_bound: f64,
    pub regret_bound: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSummary {
    pub rows_total: usize,
    pub rows_computed: usize,
    pub rows_reused: usize,
    pub csv_path: PathBuf,
}

/// Run the full pipeline for every grid point of (N, alpha, seed) at the
/// configured strategy, one row per run. Rows already on disk are reused
/// (resume), fresh rows are computed in parallel, and the CSV is written
/// in grid order.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<SweepSummary> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::invalid("sweep: config section is required for sweeping"))?;
    let paths = Paths::new(cfg.resolved_outdir());
    ensure_outdir(&paths)?;
    std::fs::create_dir_all(paths.sweep_rows()).map_err(|e| Error::io(&paths.sweep_rows(), e))?;
    write_json(&paths.config(), cfg)?;
    let mdp = cfg.resolve_mdp()?;
    let mu = behavior_policy(&mdp, &cfg.behavior)?;

    // Grid order: N outermost, then alpha, then seed.
    let mut grid = Vec::new();
    for &n in &sweep.n_grid {
        for &alpha in &sweep.alpha_grid {
            for &seed in &sweep.seed_grid {
                grid.push((n, alpha, seed));
            }
        }
    }
    let row_path = |idx: usize| paths.sweep_rows().join(format!("row_{idx:05}.json"));
    let pending: Vec<(usize, (usize, f64, u64))> = grid
        .iter()
        .enumerate()
        .filter(|(idx, _)| {
            // A present-but-unreadable row file is recomputed rather than
            // trusted.
            read_json::<SweepRow>(&row_path(*idx)).is_err()
        })
        .map(|(idx, &point)| (idx, point))
        .collect();
    let rows_reused = grid.len() - pending.len();
    let computed: Vec<(usize, Result<SweepRow>)> = pending
        .par_iter()
        .map(|&(idx, (n, alpha, seed))| (idx, sweep_row(cfg, &mdp, &mu, n, alpha, seed)))
        .collect();
    let rows_computed = computed.len();
    for (idx, row) in computed {
        write_json(&row_path(idx), &row?)?;
    }

    let file = std::fs::File::create(paths.sweep_csv())
        .map_err(|e| Error::io(&paths.sweep_csv(), e))?;
    let mut writer = csv::Writer::from_writer(file);
    for idx in 0..grid.len() {
        let row: SweepRow = read_json(&row_path(idx))?;
        writer
            .serialize(&row)
            .map_err(|e| Error::invalid(format!("failed to write sweep row {idx}: {e}")))?;
    }
    writer
        .flush()
        .map_err(|e| Error::io(&paths.sweep_csv(), e))?;
    Ok(SweepSummary {
        rows_total: grid.len(),
        rows_computed,
        rows_reused,
        csv_path: paths.sweep_csv(),
    })
}

/// One grid point, entirely in memory: generate, relabel, solve, analyze.
fn sweep_row(
    cfg: &RunConfig,
    mdp: &TabularMdp,
    mu: &Policy,
    n: usize,
    alpha: f64,
    seed: u64,
) -> Result<SweepRow> {
    let n_traj = n.div_ceil(cfg.max_len);
    let dataset = rollout(mdp, mu, cfg.max_len, n_traj, &cfg.terminal_states, seed)?;
    let data_stats = stats(&dataset);
    let heuristic = mc_state_values(&dataset, mdp.discount)?;
    let strategy = BlendingStrategy::new(cfg.strategy, alpha)?;
    let relabeled = relabel(&dataset, &strategy, &heuristic)?;
    let vilcb_cfg = VilcbConfig {
        gamma: mdp.discount,
        v_max: cfg.solver.v_max.unwrap_or_else(|| mdp.v_max()),
        lambda_const: alpha,
        seed: solver_stream_seed(seed),
        t_override: None,
    };
    let result = vi_lcb_relabeled(&relabeled.tuples, mdp.n_states, mdp.n_actions, &vilcb_cfg)?;
    let h_dense = dense_heuristic(&heuristic, mdp.n_states);
    let lambda_state = vec![alpha; mdp.n_states];
    let decomposition = decomposition_check(
        mdp,
        &h_dense,
        &lambda_state,
        &data_stats.support,
        &result.policy,
    )?;
    let bounds = bound_report(
        mdp,
        mu,
        &data_stats.support,
        alpha,
        &h_dense,
        &result.policy,
        dataset.n_transitions(),
        vilcb_cfg.v_max,
    )?;
    Ok(SweepRow {
        seed,
        n,
        alpha,
        strategy: cfg.strategy,
        total_gap: decomposition.total_gap,
        bias: decomposition.bias,
        regret: decomposition.regret,
        bias_bound: bounds.bias_bound,
        regret_bound: bounds.regret_bound,
        residual: decomposition.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_seed_scrambler_matches_the_reference_values() {
        // Frozen outputs of the standard 64-bit finalizer-style scrambler.
        assert_eq!(solver_stream_seed(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(solver_stream_seed(1), 0x910A_2DEC_8902_5CC1);
        assert_eq!(solver_stream_seed(12345), 0x2211_8258_A9D1_11A0);
        assert_ne!(solver_stream_seed(2), solver_stream_seed(3));
    }

    fn test_config(outdir: &Path) -> RunConfig {
        let doc = crate::testutil::fixed_five_state().to_doc();
        let text = format!(
            r#"{{
                "mdp": {},
                "behavior": {{"kind": "epsilon_noisy", "epsilon": 0.4}},
                "n_traj": 60,
                "max_len": 25,
                "strategy": "constant",
                "alpha": 0.1,
                "seed": 11,
                "outdir": {}
            }}"#,
            serde_json::to_string(&doc).unwrap(),
            serde_json::to_string(outdir).unwrap(),
        );
        let cfg: RunConfig = serde_json::from_str(&text).unwrap();
        cfg.validate().unwrap();
        cfg
    }

    #[test]
    fn generate_writes_coherent_artifacts_and_is_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = test_config(dir.path());
        let manifest = cmd_generate(&cfg).unwrap();
        assert_eq!(manifest.n_traj, 60);
        assert_eq!(manifest.config_hash, cfg.hash());
        assert!(manifest.n_transitions > 0);
        assert!(manifest.support_pairs > 0 && manifest.support_pairs <= 15);

        let paths = Paths::new(cfg.resolved_outdir());
        for p in [paths.config(), paths.mdp(), paths.dataset(), paths.dataset_manifest()] {
            assert!(p.exists(), "missing artifact {}", p.display());
        }

        // The loader round-trips what generate wrote.
        let mdp = cfg.resolve_mdp().unwrap();
        let (ds, loaded_manifest) = load_dataset(&paths, &mdp).unwrap();
        assert_eq!(ds.n_transitions(), manifest.n_transitions);
        assert_eq!(loaded_manifest, manifest);

        // Regenerating produces byte-identical files.
        let before = std::fs::read(paths.dataset()).unwrap();
        cmd_generate(&cfg).unwrap();
        let after = std::fs::read(paths.dataset()).unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn relabel_solve_analyze_chain_off_one_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = test_config(dir.path());
        cmd_generate(&cfg).unwrap();

        let tuples_manifest = cmd_relabel(&cfg, &RelabelOptions::default()).unwrap();
        assert_eq!(tuples_manifest.alpha, 0.1);
        assert_eq!(tuples_manifest.strategy, BlendingKind::Constant);
        assert!(!tuples_manifest.ablation);
        assert_eq!(tuples_manifest.config_hash, cfg.hash());

        let paths = Paths::new(cfg.resolved_outdir());
        let tuples = crate::relabel::read_tuples_jsonl(&paths.tuples()).unwrap();
        assert_eq!(tuples.len(), tuples_manifest.n_tuples);

        // Solve consumes the tuples (Auto finds them) and records the gap.
        let artifact = cmd_solve(&cfg, &SolveOptions::default()).unwrap();
        assert_eq!(artifact.mode, "relabeled");
        assert_eq!(artifact.actions.len(), 5);
        assert_eq!(artifact.n_tuples, tuples.len());
        assert!((artifact.gap - (artifact.v_star_d0 - artifact.v_hat_d0)).abs() <= 1e-12);
        let stored: PolicyArtifact = read_json(&paths.policy()).unwrap();
        assert_eq!(stored, artifact);

        // Analyze reconciles the decomposition for the stored policy.
        let reports = cmd_analyze(&cfg, &AnalyzeOptions::default()).unwrap();
        assert!(reports.decomposition.residual.abs() <= 1e-8);
        assert!(reports.lemmas.all_ok());
        assert!(
            reports.bias_check.measured_bias <= reports.bias_check.bound + 1e-8
        );
        assert_eq!(reports.alpha, 0.1);

        // Flag overrides beat the config: an ablation relabel with a
        // different strategy and weight.
        let opts = RelabelOptions {
            strategy: Some(BlendingKind::Rank),
            alpha: Some(0.3),
            ablation: true,
        };
        let manifest2 = cmd_relabel(&cfg, &opts).unwrap();
        assert_eq!(manifest2.strategy, BlendingKind::Rank);
        assert_eq!(manifest2.alpha, 0.3);
        assert!(manifest2.ablation);
    }

    #[test]
    fn solve_supports_baseline_and_explicit_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = test_config(dir.path());
        cmd_generate(&cfg).unwrap();

        // Auto without tuples falls back to the raw dataset.
        let auto = cmd_solve(&cfg, &SolveOptions::default()).unwrap();
        assert_eq!(auto.mode, "raw");

        // Baseline ignores blending entirely.
        let baseline_opts = SolveOptions {
            baseline: true,
            ..SolveOptions::default()
        };
        let baseline = cmd_solve(&cfg, &baseline_opts).unwrap();
        assert_eq!(baseline.mode, "baseline");
        assert_eq!(baseline.alpha, 0.0);

        // Baseline cannot consume relabeled tuples.
        let conflict = SolveOptions {
            baseline: true,
            input: SolveInput::Tuples,
            ..SolveOptions::default()
        };
        assert_eq!(cmd_solve(&cfg, &conflict).unwrap_err().exit_code(), 2);

        // Tuples input without a relabel stage is an I/O error.
        let tuples_only = SolveOptions {
            input: SolveInput::Tuples,
            ..SolveOptions::default()
        };
        assert_eq!(cmd_solve(&cfg, &tuples_only).unwrap_err().exit_code(), 3);

        // Explicit dataset input keeps working after a relabel, and the
        // seed override changes the artifact's recorded seed.
        cmd_relabel(&cfg, &RelabelOptions::default()).unwrap();
        let ds_opts = SolveOptions {
            input: SolveInput::Dataset,
            seed: Some(99),
            ..SolveOptions::default()
        };
        let ds_solve = cmd_solve(&cfg, &ds_opts).unwrap();
        assert_eq!(ds_solve.mode, "raw");
        assert_eq!(ds_solve.seed, 99);
    }

    #[test]
    fn sweep_writes_ordered_rows_and_resumes_without_recomputing() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = test_config(dir.path());
        cfg.sweep = Some(crate::config::SweepConfig {
            n_grid: vec![50, 100],
            alpha_grid: vec![0.0, 0.1],
            seed_grid: vec![0],
        });
        cfg.validate().unwrap();

        let summary = cmd_sweep(&cfg).unwrap();
        assert_eq!(summary.rows_total, 4);
        assert_eq!(summary.rows_computed, 4);
        assert_eq!(summary.rows_reused, 0);

        // CSV: header + one line per grid point, in grid order.
        let text = std::fs::read_to_string(&summary.csv_path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(
            lines[0],
            "seed,N,alpha,strategy,total_gap,bias,regret,bias_bound,regret_bound,residual"
        );
        // Outermost N, then alpha, then seed.
        let n_col: Vec<&str> =
            lines[1..].iter().map(|l| l.split(',').nth(1).unwrap()).collect();
        assert_eq!(n_col, vec!["50", "50", "100", "100"]);

        // Second run reuses every row file.
        let again = cmd_sweep(&cfg).unwrap();
        assert_eq!(again.rows_computed, 0);
        assert_eq!(again.rows_reused, 4);
        assert_eq!(std::fs::read_to_string(&again.csv_path).unwrap(), text);

        // Zero-alpha rows have exactly zero bias.
        let rows: Vec<SweepRow> = (0..4)
            .map(|i| {
                read_json(&Paths::new(cfg.resolved_outdir()).sweep_rows().join(format!(
                    "row_{i:05}.json"
                )))
                .unwrap()
            })
            .collect();
        for row in &rows {
            assert!(row.residual.abs() <= 1e-8);
            if row.alpha == 0.0 {
                assert_eq!(row.bias, 0.0);
            }
        }

        // Deleting one row file recomputes only that row.
        std::fs::remove_file(
            Paths::new(cfg.resolved_outdir()).sweep_rows().join("row_00002.json"),
        )
        .unwrap();
        let partial = cmd_sweep(&cfg).unwrap();
        assert_eq!(partial.rows_computed, 1);
        assert_eq!(partial.rows_reused, 3);
    }

    #[test]
    fn sweep_without_grids_is_invalid() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = test_config(dir.path());
        assert_eq!(cmd_sweep(&cfg).unwrap_err().exit_code(), 2);
    }
}
