//! Exact dynamic programming on the built-in benchmark: optimal values via
//! value iteration, policy evaluation for comparison policies, and the
//! discounted occupancy measure that underpins all of the analysis tooling.
//!
//! Run with: cargo run --example exact_dp

use hubl::analysis::ANALYSIS_TOL;
use hubl::benchmark::benchmark_mdp;
use hubl::mdp::{discounted_occupancy, policy_evaluation, value_iteration, Policy};

fn main() -> hubl::Result<()> {
    let mdp = benchmark_mdp();
    println!(
        "benchmark model: {} states, {} actions, discount {}, value scale {:.1}",
        mdp.n_states,
        mdp.n_actions,
        mdp.discount,
        mdp.v_max()
    );

    // Optimal values and the optimal policy, solved to a 1e-12 fixed point.
    let (q_star, pi_star, v_star) = value_iteration(&mdp, ANALYSIS_TOL)?;
    let uniform = Policy::uniform(mdp.n_states, mdp.n_actions);
    let v_uniform = policy_evaluation(&mdp, &uniform, ANALYSIS_TOL)?;

    println!("\nstate   V*          pi*   V^uniform   Q*(s,0)     Q*(s,1)");
    for s in 0..mdp.n_states {
        let a_star = match &pi_star {
            Policy::Deterministic(actions) => actions[s],
            _ => unreachable!("value iteration returns a deterministic policy"),
        };
        println!(
            "{s:>5}   {:>9.6}   {a_star:>3}   {:>9.6}   {:>9.6}   {:>9.6}",
            v_star[s],
            v_uniform[s],
            q_star[(s, 0)],
            q_star[(s, 1)]
        );
    }
    println!(
        "\nstart-state values: V*(d0) = {:.9}, V^uniform(d0) = {:.9}",
        v_star.expect_under(&mdp.initial_dist),
        v_uniform.expect_under(&mdp.initial_dist)
    );

    // V* solves its own one-step backup: report the Bellman residual.
    let mut residual = 0.0f64;
    for s in 0..mdp.n_states {
        let best = (0..mdp.n_actions)
            .map(|a| {
                let mut q = mdp.reward[[s, a]];
                for sn in 0..mdp.n_states {
                    q += mdp.discount * mdp.transition[[s, a, sn]] * v_star[sn];
                }
                q
            })
            .fold(f64::NEG_INFINITY, f64::max);
        residual = residual.max((best - v_star[s]).abs());
    }
    println!("Bellman residual of V*: {residual:.3e}");

    // Where the optimal policy actually spends its discounted time.
    let d_star = discounted_occupancy(&mdp, &pi_star, &mdp.initial_dist)?;
    println!("\ndiscounted occupancy under pi* (rows: states, cols: actions):");
    for s in 0..mdp.n_states {
        let row: Vec<String> = (0..mdp.n_actions)
            .map(|a| format!("{:.6}", d_star.weights[[s, a]]))
            .collect();
        println!("{s:>5}   {}", row.join("   "));
    }
    let mass: f64 = d_star.weights.iter().sum();
    println!("total occupancy mass: {mass:.9} (normalized to one)");
    Ok(())
}
