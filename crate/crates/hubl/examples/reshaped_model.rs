//! The reshaped decision problem behind relabeling: rewards gain a blended
//! bonus, discounts shrink pairwise, and policy evaluation in the reshaped
//! problem is exactly what a solver consuming relabeled tuples estimates.
//!
//! Run with: cargo run --example reshaped_model

use ndarray::{Array1, Array2, Array3};

use hubl::analysis::ANALYSIS_TOL;
use hubl::mdp::{
    policy_evaluation, reshape_mdp, reshaped_policy_evaluation, Policy, Support, TabularMdp,
    ValueTable,
};

/// A three-state loop: action 0 stays put cheaply, action 1 advances with
/// a reward that grows along the loop.
fn loop_mdp() -> hubl::Result<TabularMdp> {
    let n = 3;
    let mut transition = Array3::zeros((n, 2, n));
    for s in 0..n {
        transition[[s, 0, s]] = 1.0;
        transition[[s, 1, (s + 1) % n]] = 1.0;
    }
    let reward = Array2::from_shape_vec((n, 2), vec![0.05, 0.2, 0.05, 0.5, 0.05, 1.0])
        .expect("shape matches");
    let initial = Array1::from_vec(vec![1.0, 0.0, 0.0]);
    TabularMdp::new(transition, reward, 0.9, initial)
}

fn main() -> hubl::Result<()> {
    let mdp = loop_mdp()?;
    let pi = Policy::Deterministic(vec![1, 1, 1]);
    let v_pi = policy_evaluation(&mdp, &pi, ANALYSIS_TOL)?;

    // Blend toward a heuristic on supported states only; state 2's pairs
    // stay outside the set, so nothing about state 2 is reshaped.
    let h = ValueTable::from_vec(vec![4.0, 5.0, 6.0]);
    let lambda = vec![0.3, 0.3, 0.3];
    let support = Support::from_pairs(3, 2, [(0, 0), (0, 1), (1, 0), (1, 1)])?;
    let reshaped = reshape_mdp(&mdp, &h, &lambda, &support)?;

    println!("base rewards vs reshaped rewards (rows: states, cols: actions):");
    for s in 0..3 {
        println!(
            "  s={s}:  [{:.3}, {:.3}]  ->  [{:.3}, {:.3}]",
            mdp.reward[[s, 0]],
            mdp.reward[[s, 1]],
            reshaped.reshaped_reward[[s, 0]],
            reshaped.reshaped_reward[[s, 1]]
        );
    }
    println!("\npairwise discounts gamma~(s, s') (base discount {}):", mdp.discount);
    for s in 0..3 {
        let row: Vec<String> = (0..3)
            .map(|sn| format!("{:.3}", reshaped.discount_matrix[[s, sn]]))
            .collect();
        println!("  from s={s}: [{}]", row.join(", "));
    }

    // The reshaped problem has its own exact values.
    let v_tilde = reshaped_policy_evaluation(&reshaped, &pi, ANALYSIS_TOL)?;
    println!("\nstate   V^pi (base)   V~^pi (reshaped)");
    for s in 0..3 {
        println!("{s:>5}   {:>11.6}   {:>16.6}", v_pi[s], v_tilde[s]);
    }

    // Zero weight reshapes nothing: rewards, discounts, and values agree.
    let identity = reshape_mdp(&mdp, &h, &[0.0; 3], &support)?;
    let v_same = reshaped_policy_evaluation(&identity, &pi, ANALYSIS_TOL)?;
    let max_dev = (0..3).map(|s| (v_same[s] - v_pi[s]).abs()).fold(0.0, f64::max);
    println!("\nlambda = 0 reproduces base evaluation: max deviation {max_dev:.2e}");

    // Full weight is fully myopic where supported: gamma~ = 0 means the
    // value is just the expected (blended) immediate reward.
    let myopic = reshape_mdp(&mdp, &h, &[1.0; 3], &Support::full(3, 2))?;
    let v_myopic = reshaped_policy_evaluation(&myopic, &pi, ANALYSIS_TOL)?;
    println!("lambda = 1 makes values one-step lookaheads into h:");
    for s in 0..3 {
        println!(
            "  s={s}: V~ = {:.6}, r + gamma * h(next) = {:.6}",
            v_myopic[s],
            mdp.reward[[s, 1]] + mdp.discount * h[(s + 1) % 3]
        );
    }
    Ok(())
}
