//! Exact dynamic-programming solvers: synchronous-sweep policy evaluation
//! and value iteration with sup-norm stopping rules.

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::mdp::{Policy, QTable, TabularMdp, ValueTable};

/// Default sup-norm stopping tolerance for the iterative solvers.
pub const DEFAULT_TOL: f64 = 1e-10;

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tol must be > 0: got {tol}")));
    }
    Ok(())
}

/// One application of the Bellman evaluation operator:
/// (T^pi V)(s) = sum_a pi(a|s) [ r(s,a) + gamma * sum_s' P(s'|s,a) V(s') ].
pub fn evaluation_operator(mdp: &TabularMdp, policy: &Policy, v: &Array1<f64>) -> Array1<f64> {
    let mut out = Array1::zeros(mdp.n_states);
    for s in 0..mdp.n_states {
        let mut total = 0.0;
        for a in 0..mdp.n_actions {
            let p_a = policy.action_prob(s, a);
            if p_a == 0.0 {
                continue;
            }
            let row = mdp.transition.slice(ndarray::s![s, a, ..]);
            let bootstrap: f64 = row.iter().zip(v.iter()).map(|(p, val)| p * val).sum();
            total += p_a * (mdp.reward[[s, a]] + mdp.discount * bootstrap);
        }
        out[s] = total;
    }
    out
}

/// Iterate T^pi from zero until successive iterates differ by at most `tol`
/// in sup norm. The returned table then has Bellman residual
/// ||V - T^pi V||_inf <= gamma * tol <= tol.
pub fn policy_evaluation(mdp: &TabularMdp, policy: &Policy, tol: f64) -> Result<ValueTable> {
    check_tol(tol)?;
    policy.validate(mdp)?;
    let mut v = Array1::zeros(mdp.n_states);
    loop {
        let next = evaluation_operator(mdp, policy, &v);
        let delta = sup_diff(&next, &v);
        v = next;
        if delta <= tol {
            return Ok(ValueTable(v));
        }
    }
}

/// One application of the Bellman optimality operator:
/// (T V)(s) = max_a [ r(s,a) + gamma * sum_s' P(s'|s,a) V(s') ].
pub fn optimality_operator(mdp: &TabularMdp, v: &Array1<f64>) -> Array1<f64> {
    let mut out = Array1::zeros(mdp.n_states);
    for s in 0..mdp.n_states {
        let mut best = f64::NEG_INFINITY;
        for a in 0..mdp.n_actions {
            let row = mdp.transition.slice(ndarray::s![s, a, ..]);
            let bootstrap: f64 = row.iter().zip(v.iter()).map(|(p, val)| p * val).sum();
            best = best.max(mdp.reward[[s, a]] + mdp.discount * bootstrap);
        }
        out[s] = best;
    }
    out
}

/// Q(s,a) = r(s,a) + gamma * sum_s' P(s'|s,a) V(s') for a given V.
pub fn q_from_values(mdp: &TabularMdp, v: &ValueTable) -> QTable {
    let mut q = QTable::zeros(mdp.n_states, mdp.n_actions);
    for s in 0..mdp.n_states {
        for a in 0..mdp.n_actions {
            let row = mdp.transition.slice(ndarray::s![s, a, ..]);
            let bootstrap: f64 = row.iter().zip(v.0.iter()).map(|(p, val)| p * val).sum();
            q.0[[s, a]] = mdp.reward[[s, a]] + mdp.discount * bootstrap;
        }
    }
    q
}

/// Value iteration to sup-norm tolerance `tol`.
///
/// Returns (Q*, greedy policy, V*) where the greedy policy breaks ties
/// toward the lowest action index and V*(s) = max_a Q*(s,a) exactly. Both
/// returned tables have Bellman residual <= tol.
pub fn value_iteration(mdp: &TabularMdp, tol: f64) -> Result<(QTable, Policy, ValueTable)> {
    check_tol(tol)?;
    let mut v = Array1::zeros(mdp.n_states);
    loop {
        let next = optimality_operator(mdp, &v);
        let delta = sup_diff(&next, &v);
        v = next;
        if delta <= tol {
            break;
        }
    }
    // One more backup to make Q, pi, and V mutually consistent: the returned
    // V is exactly the row-max of the returned Q.
    let q = q_from_values(mdp, &ValueTable(v));
    let policy = q.greedy_policy();
    let values = q.state_values();
    Ok((q, policy, values))
}

pub(crate) fn sup_diff(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
