//! Offline data: behavior-policy rollouts, trajectory storage, empirical
//! statistics (counts and support), and Monte-Carlo state values.

mod io;
mod mc;

pub use io::{read_trajectories, write_trajectories};
pub use mc::{mc_state_values, McValues};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mdp::{Policy, Support, TabularMdp};

/// One environment step: the state the agent was in, the action it took,
/// and the reward received.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub state: usize,
    pub action: usize,
    pub reward: f64,
}

/// Why a trajectory stopped: it entered a terminal state, or it was cut at
/// the horizon limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndKind {
    Terminal,
    Timeout,
}

/// A finite rollout. `final_state` is the state reached after the last
/// step, so every step has a well-defined successor.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<Step>,
    pub end_kind: EndKind,
    pub final_state: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Successor state of step `t`: the next step's state, or `final_state`
    /// for the last step.
    pub fn next_state(&self, t: usize) -> usize {
        if t + 1 < self.steps.len() {
            self.steps[t + 1].state
        } else {
            self.final_state
        }
    }

    /// Flatten into raw transition tuples in step order.
    pub fn transitions(&self) -> impl Iterator<Item = Transition> + '_ {
        self.steps.iter().enumerate().map(|(t, step)| Transition {
            state: step.state,
            action: step.action,
            reward: step.reward,
            next_state: self.next_state(t),
            ends_terminal: t + 1 == self.steps.len() && self.end_kind == EndKind::Terminal,
        })
    }
}

/// A raw (s, a, r, s') tuple; `ends_terminal` marks the last tuple of a
/// terminal trajectory (no successor return exists).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub state: usize,
    pub action: usize,
    pub reward: f64,
    pub next_state: usize,
    pub ends_terminal: bool,
}

/// The offline dataset D: trajectories plus collection-time provenance (the
/// discount in force and the rollout seed). State/action dimensions are
/// carried so empirical statistics can allocate full tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub trajectories: Vec<Trajectory>,
    pub gamma: f64,
    pub rng_seed: u64,
    pub n_states: usize,
    pub n_actions: usize,
}

impl Dataset {
    /// Total number of transition tuples N.
    pub fn n_transitions(&self) -> usize {
        self.trajectories.iter().map(Trajectory::len).sum()
    }

    /// All tuples, trajectory order then step order.
    pub fn transitions(&self) -> impl Iterator<Item = Transition> + '_ {
        self.trajectories.iter().flat_map(Trajectory::transitions)
    }

    /// Assemble a dataset from parts (e.g. trajectories read back from a
    /// JSONL file plus provenance from a manifest), validating index ranges.
    pub fn from_parts(
        trajectories: Vec<Trajectory>,
        gamma: f64,
        rng_seed: u64,
        n_states: usize,
        n_actions: usize,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::invalid(format!("gamma must lie in [0, 1): got {gamma}")));
        }
        if trajectories.iter().all(Trajectory::is_empty) {
            return Err(Error::invalid("dataset must contain at least one transition"));
        }
        for (i, traj) in trajectories.iter().enumerate() {
            if traj.is_empty() {
                return Err(Error::invalid(format!("trajectory {i} is empty")));
            }
            for step in &traj.steps {
                if step.state >= n_states || step.action >= n_actions {
                    return Err(Error::invalid(format!(
                        "trajectory {i} references ({}, {}) outside ({n_states}, {n_actions})",
                        step.state, step.action
                    )));
                }
            }
            if traj.final_state >= n_states {
                return Err(Error::invalid(format!(
                    "trajectory {i} final_state {} outside {n_states} states",
                    traj.final_state
                )));
            }
        }
        Ok(Dataset {
            trajectories,
            gamma,
            rng_seed,
            n_states,
            n_actions,
        })
    }
}

/// Empirical data statistics: visit counts m[s][a], the support Omega of
/// observed pairs, and the normalized empirical state-action distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct DataStats {
    pub counts: Array2<u64>,
    pub support: Support,
    pub empirical_mu: Array2<f64>,
}

/// Count every transition tuple of the dataset.
pub fn stats(dataset: &Dataset) -> DataStats {
    let (ns, na) = (dataset.n_states, dataset.n_actions);
    let mut counts: Array2<u64> = Array2::zeros((ns, na));
    for tr in dataset.transitions() {
        counts[[tr.state, tr.action]] += 1;
    }
    let total: u64 = counts.sum();
    let mut support = Support::new(ns, na);
    let mut empirical_mu = Array2::zeros((ns, na));
    for s in 0..ns {
        for a in 0..na {
            if counts[[s, a]] > 0 {
                support.insert(s, a);
                empirical_mu[[s, a]] = counts[[s, a]] as f64 / total as f64;
            }
        }
    }
    DataStats {
        counts,
        support,
        empirical_mu,
    }
}

/// Inverse-CDF draw from a probability row using one uniform from the
/// stream. Returns the last positive-probability index if accumulated
/// floating error leaves the uniform above the total.
fn sample_from(rng: &mut ChaCha8Rng, probs: impl Iterator<Item = f64>) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0usize;
    for (i, p) in probs.enumerate() {
        if p > 0.0 {
            last_positive = i;
            acc += p;
            if u < acc {
                return i;
            }
        }
    }
    last_positive
}

/// Generate `n_traj` rollouts of `behavior` on `mdp`.
///
/// A trajectory ends with [`EndKind::Terminal`] as soon as it *enters* a
/// state in `terminal_states`, otherwise with [`EndKind::Timeout`] after
/// `max_len` steps. Sampling is fully deterministic: trajectory `i` draws
/// from its own ChaCha8 stream seeded with `seed + i` (wrapping), so results
/// do not depend on scheduling and any trajectory can be regenerated in
/// isolation.
///
/// Because streams are indexed by `seed + i`, datasets whose seeds differ
/// by less than `n_traj` share trajectory streams (seed 1 re-draws all but
/// one of seed 0's trajectories). Space dataset seeds by at least `n_traj`
/// when statistically independent replicas are wanted.
pub fn rollout(
    mdp: &TabularMdp,
    behavior: &Policy,
    max_len: usize,
    n_traj: usize,
    terminal_states: &[usize],
    seed: u64,
) -> Result<Dataset> {
    behavior.validate(mdp)?;
    if max_len == 0 {
        return Err(Error::invalid("max_len must be >= 1"));
    }
    if n_traj == 0 {
        return Err(Error::invalid("n_traj must be >= 1"));
    }
    let mut terminal = vec![false; mdp.n_states];
    for &t in terminal_states {
        if t >= mdp.n_states {
            return Err(Error::invalid(format!(
                "terminal state {t} out of range ({} states)",
                mdp.n_states
            )));
        }
        terminal[t] = true;
    }
    for (s, &is_terminal) in terminal.iter().enumerate() {
        if is_terminal && mdp.initial_dist[s] > 0.0 {
            return Err(Error::invalid(format!(
                "initial_dist places mass on terminal state {s}; trajectories must take at least one step"
            )));
        }
    }

    let mut trajectories = Vec::with_capacity(n_traj);
    for i in 0..n_traj {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let mut state = sample_from(&mut rng, mdp.initial_dist.iter().copied());
        let mut steps = Vec::new();
        let mut end_kind = EndKind::Timeout;
        let mut final_state = state;
        for _ in 0..max_len {
            let action = match behavior {
                Policy::Deterministic(actions) => actions[state],
                Policy::Stochastic(rows) => sample_from(&mut rng, rows.row(state).iter().copied()),
            };
            let reward = mdp.reward[[state, action]];
            let next = sample_from(
                &mut rng,
                mdp.transition.slice(ndarray::s![state, action, ..]).iter().copied(),
            );
            steps.push(Step {
                state,
                action,
                reward,
            });
            final_state = next;
            if terminal[next] {
                end_kind = EndKind::Terminal;
                break;
            }
            state = next;
        }
        trajectories.push(Trajectory {
            steps,
            end_kind,
            final_state,
        });
    }
    Ok(Dataset {
        trajectories,
        gamma: mdp.discount,
        rng_seed: seed,
        n_states: mdp.n_states,
        n_actions: mdp.n_actions,
    })
}
