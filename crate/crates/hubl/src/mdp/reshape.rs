//! Construction and solution of the heuristic-blended ("reshaped") MDP.
//!
//! Given a per-state heuristic h, per-state blending weights lambda, and a
//! support set Omega, the reshaped MDP replaces
//!
//!   r~(s,a)      = r(s,a) + gamma * sum_s' P(s'|s,a) lambda(s,s') h(s')
//!   gamma~(s,s') = gamma * (1 - lambda(s,s'))
//!
//! where h and lambda are extended by zero off the state projection of
//! Omega: h(s) keeps its given value on Omega-states and is 0 elsewhere, and
//! lambda(s,s') = lambda(s') when both s and s' are Omega-states, else 0.
//! The extension is what lets downstream identities hold as exact equalities
//! without conditioning on support membership.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::mdp::{Policy, QTable, ReshapedMdp, Support, TabularMdp, ValueTable};

/// h extended by zero off the state projection of the support.
pub fn extended_heuristic(h: &ValueTable, support: &Support) -> Array1<f64> {
    Array1::from_shape_fn(h.len(), |s| if support.state_in(s) { h[s] } else { 0.0 })
}

/// lambda(s,s') = lambda_state[s'] when both s and s' lie in the state
/// projection of the support, else 0.
pub fn extended_lambda(lambda_state: &[f64], support: &Support) -> Array2<f64> {
    let n = lambda_state.len();
    Array2::from_shape_fn((n, n), |(s, s_next)| {
        if support.state_in(s) && support.state_in(s_next) {
            lambda_state[s_next]
        } else {
            0.0
        }
    })
}

/// Build the reshaped MDP from (h, lambda, Omega).
pub fn reshape_mdp(
    mdp: &TabularMdp,
    h: &ValueTable,
    lambda_state: &[f64],
    support: &Support,
) -> Result<ReshapedMdp> {
    if h.len() != mdp.n_states || lambda_state.len() != mdp.n_states {
        return Err(Error::invalid(format!(
            "h ({}) and lambda ({}) must both have one entry per state ({})",
            h.len(),
            lambda_state.len(),
            mdp.n_states
        )));
    }
    if support.n_states() != mdp.n_states || support.n_actions() != mdp.n_actions {
        return Err(Error::invalid("support dimensions do not match the MDP"));
    }
    for (s, &lam) in lambda_state.iter().enumerate() {
        if !(0.0..=1.0).contains(&lam) {
            return Err(Error::invalid(format!(
                "lambda[{s}] = {lam} outside [0, 1]"
            )));
        }
    }
    if h.0.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("heuristic table contains non-finite values"));
    }

    let gamma = mdp.discount;
    let h_ext = extended_heuristic(h, support);
    let lam = extended_lambda(lambda_state, support);

    let mut reshaped_reward = mdp.reward.clone();
    for s in 0..mdp.n_states {
        for a in 0..mdp.n_actions {
            let row = mdp.transition.slice(ndarray::s![s, a, ..]);
            let blended: f64 = row
                .iter()
                .enumerate()
                .map(|(s_next, &p)| p * lam[[s, s_next]] * h_ext[s_next])
                .sum();
            reshaped_reward[[s, a]] += gamma * blended;
        }
    }
    let discount_matrix = lam.mapv(|l| gamma * (1.0 - l));
    Ok(ReshapedMdp {
        base: mdp.clone(),
        reshaped_reward,
        discount_matrix,
    })
}

/// One application of the reshaped evaluation operator:
/// (T~^pi V)(s) = sum_a pi(a|s) [ r~(s,a) + sum_s' P(s'|s,a) gamma~(s,s') V(s') ].
pub fn reshaped_evaluation_operator(
    reshaped: &ReshapedMdp,
    policy: &Policy,
    v: &Array1<f64>,
) -> Array1<f64> {
    let mdp = &reshaped.base;
    let mut out = Array1::zeros(mdp.n_states);
    for s in 0..mdp.n_states {
        let mut total = 0.0;
        for a in 0..mdp.n_actions {
            let p_a = policy.action_prob(s, a);
            if p_a == 0.0 {
                continue;
            }
            let row = mdp.transition.slice(ndarray::s![s, a, ..]);
            let bootstrap: f64 = row
                .iter()
                .enumerate()
                .map(|(s_next, &p)| p * reshaped.discount_matrix[[s, s_next]] * v[s_next])
                .sum();
            total += p_a * (reshaped.reshaped_reward[[s, a]] + bootstrap);
        }
        out[s] = total;
    }
    out
}

/// Fixed point of the reshaped Bellman evaluation equation, to sup-norm
/// tolerance `tol`. Contraction is guaranteed because every
/// gamma~(s,s') <= gamma < 1.
pub fn reshaped_policy_evaluation(
    reshaped: &ReshapedMdp,
    policy: &Policy,
    tol: f64,
) -> Result<ValueTable> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tol must be > 0: got {tol}")));
    }
    policy.validate(&reshaped.base)?;
    let mut v = Array1::zeros(reshaped.base.n_states);
    loop {
        let next = reshaped_evaluation_operator(reshaped, policy, &v);
        let delta = crate::mdp::dp::sup_diff(&next, &v);
        v = next;
        if delta <= tol {
            return Ok(ValueTable(v));
        }
    }
}

/// Q~(s,a) = r~(s,a) + sum_s' P(s'|s,a) gamma~(s,s') V(s') for a given V.
pub fn reshaped_q_from_values(reshaped: &ReshapedMdp, v: &ValueTable) -> QTable {
    let mdp = &reshaped.base;
    let mut q = QTable::zeros(mdp.n_states, mdp.n_actions);
    for s in 0..mdp.n_states {
        for a in 0..mdp.n_actions {
            let row = mdp.transition.slice(ndarray::s![s, a, ..]);
            let bootstrap: f64 = row
                .iter()
                .enumerate()
                .map(|(s_next, &p)| p * reshaped.discount_matrix[[s, s_next]] * v.0[s_next])
                .sum();
            q.0[[s, a]] = reshaped.reshaped_reward[[s, a]] + bootstrap;
        }
    }
    q
}
