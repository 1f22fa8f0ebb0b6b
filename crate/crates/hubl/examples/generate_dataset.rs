//! Offline data collection: roll out a behavior policy on the benchmark,
//! inspect coverage statistics, and round-trip the trajectory file format.
//!
//! Run with: cargo run --example generate_dataset

use hubl::benchmark::{behavior_policy, benchmark_mdp, BehaviorSpec, BENCHMARK_MAX_LEN};
use hubl::dataset::{read_trajectories, rollout, stats, write_trajectories, Dataset, EndKind};

fn main() -> hubl::Result<()> {
    let mdp = benchmark_mdp();
    let total_pairs = mdp.n_states * mdp.n_actions;

    // Coverage depends on who collected the data: the expert commits to one
    // action per state, noise spreads mass over the rest.
    println!("behavior policies and the coverage they produce (200 trajectories):");
    for (label, spec) in [
        ("expert", BehaviorSpec::Expert),
        ("eps-noisy(0.3)", BehaviorSpec::EpsilonNoisy { epsilon: 0.3 }),
        ("uniform", BehaviorSpec::Uniform),
    ] {
        let mu = behavior_policy(&mdp, &spec)?;
        let ds = rollout(&mdp, &mu, BENCHMARK_MAX_LEN, 200, &[], 7)?;
        let st = stats(&ds);
        let seen = st.support.n_pairs();
        println!(
            "  {label:<15} {} transitions, {seen}/{total_pairs} state-action pairs seen",
            ds.n_transitions()
        );
    }

    // Terminal states end trajectories early; everything else runs to the
    // step cap and records a timeout with its cut state. The hub leaks onto
    // the ladder with probability 1e-3 per step, so a 50-step trajectory
    // reaches state 1 about 5% of the time — a few hundred trajectories
    // show both end kinds.
    let mu = behavior_policy(&mdp, &BehaviorSpec::EpsilonNoisy { epsilon: 0.3 })?;
    let ds = rollout(&mdp, &mu, BENCHMARK_MAX_LEN, 400, &[1], 11)?;
    let terminal = ds
        .trajectories
        .iter()
        .filter(|t| t.end_kind == EndKind::Terminal)
        .count();
    println!(
        "\nwith state 1 absorbing: {} of {} trajectories ended there, rest timed out",
        terminal,
        ds.trajectories.len()
    );

    // The JSONL format round-trips exactly: same trajectories, same bytes.
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("dataset.jsonl");
    write_trajectories(&path, &ds.trajectories)?;
    let reread = read_trajectories(&path)?;
    let rebuilt = Dataset::from_parts(reread, ds.gamma, ds.rng_seed, ds.n_states, ds.n_actions)?;
    assert_eq!(rebuilt.trajectories, ds.trajectories);
    let bytes = std::fs::metadata(&path).map_err(|e| hubl::Error::io(&path, e))?.len();
    println!(
        "saved {} trajectories to {} ({bytes} bytes) and read them back identically",
        ds.trajectories.len(),
        path.display()
    );

    // Same seed, same data: generation is a pure function of its inputs.
    let again = rollout(&mdp, &mu, BENCHMARK_MAX_LEN, 400, &[1], 11)?;
    assert_eq!(again.trajectories, ds.trajectories);
    println!("re-rolling with the same seed reproduced the dataset exactly");
    Ok(())
}
