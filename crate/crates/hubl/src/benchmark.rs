//! The fixed 5-state benchmark used by the scaling experiments, plus
//! standard behavior-policy constructors.
//!
//! Layout: state 0 is a hub; states 1–4 form a ladder. Both hub actions
//! behave identically (enter the ladder with small probability `u`, else
//! stay), so the hub contributes data mass but no decision signal. On the
//! ladder, action 1 ("advance") pays an immediate reward and climbs one
//! rung with probability `q` (falling back to the hub otherwise); action 0
//! ("bail") returns to the hub for nothing. Advancing is strictly optimal
//! at every rung.
//!
//! The constants are tuned jointly so that, under the ε = 0.3 noisy-expert
//! behavior, rung `k` is visited at per-step rate about `1e-3 * 4^(1-k)`:
//! each successive rung's visit count crosses the handful-of-samples
//! threshold one factor-of-4 later in dataset size, and the value lost by
//! abandoning the ladder at rung `k` shrinks by about 3x per rung. A
//! pessimistic learner's regret on this instance is dominated by how many
//! deep rungs its data has effectively resolved, which is what gives the
//! dataset-size scaling experiments a clean power-law shape. Reward
//! magnitudes keep the whole instance's optimal start value small
//! (~5e-3), so reshaping-induced drift stays well below the per-rung
//! regret quanta being measured.

use ndarray::{Array1, Array2, Array3};

use crate::error::{Error, Result};
use crate::mdp::{argmax_lowest, value_iteration, Policy, TabularMdp};

/// Ladder-entry probability from the hub (either action).
const HUB_ENTRY: f64 = 1.0e-3;
/// Advance success probability; chosen so the 0.85-noisy advance rate is
/// exactly 1/4 per rung.
const ADVANCE_SUCCESS: f64 = 0.25 / 0.85;
/// Immediate rewards for advancing from rungs 1..=4.
const ADVANCE_REWARD: [f64; 4] = [0.3339, 0.4204, 0.5294, 1.0];
/// Discount factor of the benchmark.
pub const BENCHMARK_GAMMA: f64 = 0.9;
/// Trajectory cut length used by the benchmark experiments.
pub const BENCHMARK_MAX_LEN: usize = 50;

/// The fixed 5-state, 2-action benchmark (see module docs).
pub fn benchmark_mdp() -> TabularMdp {
    let n_states = 5;
    let n_actions = 2;
    let mut transition = Array3::<f64>::zeros((n_states, n_actions, n_states));
    let mut reward = Array2::<f64>::zeros((n_states, n_actions));
    // Hub: both actions enter the ladder with probability HUB_ENTRY.
    for a in 0..n_actions {
        transition[[0, a, 1]] = HUB_ENTRY;
        transition[[0, a, 0]] = 1.0 - HUB_ENTRY;
    }
    for k in 1..=4usize {
        // Bail: back to the hub, no reward.
        transition[[k, 0, 0]] = 1.0;
        // Advance: climb with probability q (the top rung cashes out to the
        // hub deterministically), fall back to the hub otherwise.
        if k < 4 {
            transition[[k, 1, k + 1]] = ADVANCE_SUCCESS;
            transition[[k, 1, 0]] = 1.0 - ADVANCE_SUCCESS;
        } else {
            transition[[k, 1, 0]] = 1.0;
        }
        reward[[k, 1]] = ADVANCE_REWARD[k - 1];
    }
    let mut initial = Array1::<f64>::zeros(n_states);
    initial[0] = 1.0;
    TabularMdp::new(transition, reward, BENCHMARK_GAMMA, initial)
        .expect("benchmark constants form a valid model")
}

/// How a dataset's behavior policy is chosen.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BehaviorSpec {
    /// The optimal policy of the model, deterministic.
    Expert,
    /// Mixture: optimal action with probability `1 - epsilon`, uniform
    /// otherwise (so the optimal action keeps probability
    /// `1 - epsilon + epsilon/|A|`).
    EpsilonNoisy { epsilon: f64 },
    /// Uniform over actions everywhere.
    Uniform,
}

impl BehaviorSpec {
    pub fn validate(&self) -> Result<()> {
        if let BehaviorSpec::EpsilonNoisy { epsilon } = self {
            if !(0.0..=1.0).contains(epsilon) {
                return Err(Error::invalid(format!(
                    "behavior epsilon must lie in [0, 1]: got {epsilon}"
                )));
            }
        }
        Ok(())
    }
}

/// Materialize a behavior policy for a model. Expert and noisy-expert
/// variants derive the expert from exact value iteration (ties to the
/// lowest action index), so the construction is deterministic.
pub fn behavior_policy(mdp: &TabularMdp, spec: &BehaviorSpec) -> Result<Policy> {
    spec.validate()?;
    match spec {
        BehaviorSpec::Uniform => Ok(Policy::uniform(mdp.n_states, mdp.n_actions)),
        BehaviorSpec::Expert => {
            let (_, pi_star, _) = value_iteration(mdp, 1e-12)?;
            Ok(pi_star)
        }
        BehaviorSpec::EpsilonNoisy { epsilon } => {
            let (q_star, _, _) = value_iteration(mdp, 1e-12)?;
            let mut probs = Array2::<f64>::zeros((mdp.n_states, mdp.n_actions));
            let unif = epsilon / mdp.n_actions as f64;
            for s in 0..mdp.n_states {
                let best = argmax_lowest(q_star.0.row(s).iter().copied());
                for a in 0..mdp.n_actions {
                    probs[[s, a]] = unif + if a == best { 1.0 - epsilon } else { 0.0 };
                }
            }
            Ok(Policy::Stochastic(probs))
        }
    }
}
