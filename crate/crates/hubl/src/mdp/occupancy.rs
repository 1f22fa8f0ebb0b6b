//! Normalized discounted occupancy measures.

use ndarray::{Array1, Array2};

use crate::error::Result;
use crate::mdp::{check_prob_row, OccupancyMeasure, Policy, TabularMdp};

/// Internal fixed-point tolerance; tight so downstream identity checks can
/// use 1e-8/1e-9 tolerances comfortably.
const OCC_TOL: f64 = 1e-13;

/// Normalized discounted state-action occupancy of `policy` started from
/// `init_dist`:
///
///   d(s, a) = (1 - gamma) * sum_t gamma^t P(S_t = s, A_t = a),
///
/// which has total mass one and satisfies the flow identity
/// d(s') = (1 - gamma) d0(s') + gamma * sum_{s,a} d(s,a) P(s'|s,a) on state
/// marginals. Computed by iterating that identity to a sup-norm fixed point
/// (a gamma-contraction, so convergence is geometric and deterministic).
pub fn discounted_occupancy(
    mdp: &TabularMdp,
    policy: &Policy,
    init_dist: &Array1<f64>,
) -> Result<OccupancyMeasure> {
    policy.validate(mdp)?;
    if init_dist.len() != mdp.n_states {
        return Err(crate::error::Error::invalid(format!(
            "init_dist length {} does not match n_states {}",
            init_dist.len(),
            mdp.n_states
        )));
    }
    check_prob_row(init_dist.iter().copied(), "init_dist")?;

    let gamma = mdp.discount;
    // State-marginal fixed point: x = (1-gamma) d0 + gamma * Ppi^T x.
    let mut x: Array1<f64> = init_dist.mapv(|p| (1.0 - gamma) * p);
    loop {
        let mut next: Array1<f64> = init_dist.mapv(|p| (1.0 - gamma) * p);
        for s in 0..mdp.n_states {
            if x[s] == 0.0 {
                continue;
            }
            for a in 0..mdp.n_actions {
                let p_a = policy.action_prob(s, a);
                if p_a == 0.0 {
                    continue;
                }
                let flow = gamma * x[s] * p_a;
                let row = mdp.transition.slice(ndarray::s![s, a, ..]);
                for (s_next, &p) in row.iter().enumerate() {
                    next[s_next] += flow * p;
                }
            }
        }
        let delta = crate::mdp::dp::sup_diff(&next, &x);
        x = next;
        if delta <= OCC_TOL {
            break;
        }
    }

    let mut weights = Array2::zeros((mdp.n_states, mdp.n_actions));
    for s in 0..mdp.n_states {
        for a in 0..mdp.n_actions {
            weights[[s, a]] = x[s] * policy.action_prob(s, a);
        }
    }
    Ok(OccupancyMeasure { weights })
}
