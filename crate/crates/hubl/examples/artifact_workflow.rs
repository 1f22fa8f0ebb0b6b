//! The on-disk workflow the CLI drives, called as a library: one JSON
//! config, four stages writing traceable artifacts, and a resumable sweep
//! that fans a grid out to CSV. Everything lands in a temp directory.
//!
//! Run with: cargo run --example artifact_workflow

use hubl::config::RunConfig;
use hubl::pipeline::{
    cmd_analyze, cmd_generate, cmd_relabel, cmd_solve, cmd_sweep, AnalyzeOptions, RelabelOptions,
    SolveOptions,
};

fn main() -> hubl::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let mdp_path = dir.path().join("mdp.json");
    hubl::benchmark::benchmark_mdp().save(&mdp_path)?;
    let outdir = dir.path().join("out");

    // One document drives every stage; flags can override per call. Sweep
    // seeds are spaced by more than n_traj: trajectory i draws from stream
    // seed + i, so adjacent dataset seeds would reuse most of each other's
    // trajectories instead of giving independent replicas.
    let config_text = format!(
        r#"{{
            "mdp": {{"path": {}}},
            "behavior": {{"kind": "epsilon_noisy", "epsilon": 0.3}},
            "n_traj": 400,
            "max_len": 50,
            "strategy": "constant",
            "alpha": 0.1,
            "seed": 11,
            "outdir": {},
            "sweep": {{"n_grid": [4000, 16000], "alpha_grid": [0.0, 0.1], "seed_grid": [0, 1000]}}
        }}"#,
        serde_json::to_string(&mdp_path).expect("path serializes"),
        serde_json::to_string(&outdir).expect("path serializes"),
    );
    let config_path = dir.path().join("hubl.json");
    std::fs::write(&config_path, config_text).map_err(|e| hubl::Error::io(&config_path, e))?;
    let cfg = RunConfig::load(&config_path)?;
    println!("config hash {} (embedded in every artifact manifest)", cfg.hash());

    let manifest = cmd_generate(&cfg)?;
    println!(
        "\ngenerate: {} trajectories, {} transitions, {} pairs covered",
        manifest.n_traj, manifest.n_transitions, manifest.support_pairs
    );

    let manifest = cmd_relabel(&cfg, &RelabelOptions::default())?;
    println!(
        "relabel:  {} tuples, strategy {}, alpha {}",
        manifest.n_tuples, manifest.strategy, manifest.alpha
    );

    let artifact = cmd_solve(&cfg, &SolveOptions::default())?;
    println!(
        "solve:    mode {}, V^pi(d0) = {:.6}, gap to optimal = {:.3e}",
        artifact.mode, artifact.v_hat_d0, artifact.gap
    );

    let reports = cmd_analyze(&cfg, &AnalyzeOptions::default())?;
    println!(
        "analyze:  residual {:.2e}, bias {:.3e} <= {:.3e}, {} of 3 hypotheses met",
        reports.decomposition.residual,
        reports.bounds.measured_bias,
        reports.bounds.bias_bound,
        reports.lemmas.hypotheses_met()
    );

    println!("\nartifacts written:");
    let mut names: Vec<String> = std::fs::read_dir(&outdir)
        .map_err(|e| hubl::Error::io(&outdir, e))?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_file())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    for name in names {
        println!("  {name}");
    }

    // The sweep fans the grid out in parallel and is resumable: rerunning
    // recomputes nothing and rewrites the identical CSV.
    let summary = cmd_sweep(&cfg)?;
    println!(
        "\nsweep: {} rows ({} computed, {} reused) -> {}",
        summary.rows_total,
        summary.rows_computed,
        summary.rows_reused,
        summary.csv_path.display()
    );
    let again = cmd_sweep(&cfg)?;
    println!(
        "rerun: {} rows ({} computed, {} reused) — pure resume",
        again.rows_total, again.rows_computed, again.rows_reused
    );
    let csv = std::fs::read_to_string(&summary.csv_path)
        .map_err(|e| hubl::Error::io(&summary.csv_path, e))?;
    println!("\nsweep.csv:");
    for line in csv.lines() {
        println!("  {line}");
    }
    Ok(())
}
