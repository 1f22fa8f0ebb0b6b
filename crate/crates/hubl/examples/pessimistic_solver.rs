//! The pessimistic offline solver, with and without heuristic blending:
//! how count-based penalties gate value propagation, how blending injects
//! heuristic value on supported states, and how both fare as data grows.
//!
//! Run with: cargo run --example pessimistic_solver

use hubl::analysis::policy_evaluation_gap;
use hubl::benchmark::{behavior_policy, benchmark_mdp, BehaviorSpec, BENCHMARK_MAX_LEN};
use hubl::dataset::{mc_state_values, rollout, stats, Transition};
use hubl::pipeline::solver_stream_seed;
use hubl::solver::{vi_lcb, vi_lcb_hubl, VilcbConfig};

fn main() -> hubl::Result<()> {
    let mdp = benchmark_mdp();
    let mu = behavior_policy(&mdp, &BehaviorSpec::EpsilonNoisy { epsilon: 0.3 })?;

    println!("pessimistic solving on growing datasets (seed 1, blend alpha 0.1):");
    println!("{:>11}   {:>14}   {:>14}   {:>10}", "transitions", "gap (raw)", "gap (blended)", "iterations");
    for n in [2_000usize, 16_000, 128_000] {
        let ds = rollout(&mdp, &mu, BENCHMARK_MAX_LEN, n / BENCHMARK_MAX_LEN, &[], 1)?;
        let bag: Vec<Transition> = ds.transitions().collect();
        let st = stats(&ds);
        let h = mc_state_values(&ds, mdp.discount)?;

        let mut cfg = VilcbConfig {
            gamma: mdp.discount,
            v_max: mdp.v_max(),
            lambda_const: 0.0,
            seed: solver_stream_seed(1),
            t_override: None,
        };
        let raw = vi_lcb(&bag, mdp.n_states, mdp.n_actions, &cfg)?;
        cfg.lambda_const = 0.1;
        let blended = vi_lcb_hubl(&bag, mdp.n_states, mdp.n_actions, &cfg, &h, &st.support)?;

        let (gap_raw, _, _) = policy_evaluation_gap(&mdp, &raw.policy)?;
        let (gap_blended, _, _) = policy_evaluation_gap(&mdp, &blended.policy)?;
        println!(
            "{n:>11}   {gap_raw:>14.6}   {gap_blended:>14.6}   {:>10}",
            raw.t_horizon
        );
    }

    // A closer look at one run. The concentration penalty is sized for the
    // worst case, so at these sample counts it exceeds every observed
    // return: the internal estimate never leaves the pessimistic floor.
    // The learned policy improves anyway — it starts from each state's
    // plurality action in the data, and monotone take-the-max updates only
    // move it when an estimate clears the penalty.
    let ds = rollout(&mdp, &mu, BENCHMARK_MAX_LEN, 1280, &[], 1)?;
    let bag: Vec<Transition> = ds.transitions().collect();
    let st = stats(&ds);
    let h = mc_state_values(&ds, mdp.discount)?;
    let cfg = VilcbConfig {
        gamma: mdp.discount,
        v_max: mdp.v_max(),
        lambda_const: 0.1,
        seed: solver_stream_seed(1),
        t_override: None,
    };
    let res = vi_lcb_hubl(&bag, mdp.n_states, mdp.n_actions, &cfg, &h, &st.support)?;
    let (gap, v_hat_d0, v_star_d0) = policy_evaluation_gap(&mdp, &res.policy)?;
    println!("\n64,000-transition run:");
    println!("  learned policy's true start value V^pi(d0) = {v_hat_d0:.6}");
    println!("  optimal start value            V*(d0)      = {v_star_d0:.6}");
    println!("  gap = {gap:.3e}");
    println!("  pessimistic internal estimate max_s V(s)   = {:.6}", max_of(&res.values.0));
    println!("  concentration log-factor L = {:.1}", res.big_l);
    let floor_iters = res
        .v_trace
        .iter()
        .take_while(|v| max_of(v) <= 0.0)
        .count();
    println!(
        "  internal values stayed at the pessimistic floor for {floor_iters} of {} iterations:\n\
         \x20 the penalty (at least {:.4} even at the best-covered pair) dwarfs rewards\n\
         \x20 of at most {:.3}, so the gap measures the plurality-initialized policy",
        res.v_trace.len(),
        penalty_floor(&bag, res.big_l, mdp.v_max()),
        max_reward(&bag),
    );
    Ok(())
}

fn max_of(v: &ndarray::Array1<f64>) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn max_reward(bag: &[Transition]) -> f64 {
    bag.iter().map(|t| t.reward).fold(f64::NEG_INFINITY, f64::max)
}

/// A lower bound on every penalty the solver applied: the bonus formula
/// evaluated at the most-visited pair's whole-dataset count (per-iteration
/// batches are smaller, so their penalties are larger).
fn penalty_floor(bag: &[Transition], big_l: f64, v_max: f64) -> f64 {
    let mut counts = std::collections::HashMap::new();
    for t in bag {
        *counts.entry((t.state, t.action)).or_insert(0u64) += 1;
    }
    let m = counts.values().copied().max().unwrap_or(1).max(1) as f64;
    v_max * (big_l / m).sqrt()
}
