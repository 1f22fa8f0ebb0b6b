//! Pessimistic value iteration over split offline data, with optional
//! heuristic blending in the bootstrap.
//!
//! The solver consumes a bag of transitions, splits it once into a
//! policy-initialization half and one slice per iteration, and runs a
//! finite number of lower-confidence-bound backups:
//!
//! ```text
//! Q_t(s,a) = r_t(s,a) - b_t(s,a)
//!          + gamma * sum_{s'} P_t(s'|s,a) [ (1 - L(s,s')) V_{t-1}(s') + L(s,s') h(s') ]
//! ```
//!
//! where `r_t`/`P_t` are the empirical mean reward and transition
//! frequencies on iteration `t`'s slice, `b_t` is a count-based penalty,
//! and `L(s,s') = alpha` exactly when both states appear in the dataset's
//! state support (zero otherwise, and identically zero for the unblended
//! baseline). Value updates are monotone: a state's value and its policy
//! action change only when the freshly backed-up value strictly improves
//! on the previous one. Unvisited `(s,a)` pairs on a slice get a uniform
//! Dirichlet model row, zero reward, and — through the penalty at count
//! zero — a value too low to ever win a backup.
//!
//! Determinism: one seed fixes everything. The split shuffles tuple
//! *indices* with a dedicated generator, and model rows for unvisited pairs
//! are drawn from a second generator in a fixed iteration/state/action
//! order, for unvisited pairs only, so results are bit-reproducible across
//! runs and platforms.

use ndarray::{Array1, Array2, Array3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Transition;
use crate::error::{Error, Result};
use crate::mdp::{argmax_lowest, Policy, QTable, Support, ValueTable};
use crate::relabel::RelabeledTuple;

/// Configuration for the pessimistic solver.
#[derive(Debug, Clone, PartialEq)]
pub struct VilcbConfig {
    /// Base discount in `[0, 1)`.
    pub gamma: f64,
    /// Value-scale upper bound used by the penalty (positive; defaults to
    /// `1 / (1 - gamma)` for rewards in `[0, 1]`).
    pub v_max: f64,
    /// Blending weight `alpha in [0, 1]`; zero disables blending.
    pub lambda_const: f64,
    /// Seed driving both the data split and unvisited-pair model rows.
    pub seed: u64,
    /// Optional iteration-count override (mainly for tests); when absent
    /// the count is [`horizon_t`] of the tuple count.
    pub t_override: Option<usize>,
}

impl VilcbConfig {
    pub fn new(gamma: f64, v_max: f64, lambda_const: f64, seed: u64) -> Result<Self> {
        let cfg = VilcbConfig {
            gamma,
            v_max,
            lambda_const,
            seed,
            t_override: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Config with the default value scale `1 / (1 - gamma)`.
    pub fn for_gamma(gamma: f64, lambda_const: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::invalid(format!("gamma must lie in [0, 1): got {gamma}")));
        }
        VilcbConfig::new(gamma, 1.0 / (1.0 - gamma), lambda_const, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::invalid(format!(
                "gamma must lie in [0, 1): got {}",
                self.gamma
            )));
        }
        if !(self.v_max > 0.0) || !self.v_max.is_finite() {
            return Err(Error::invalid(format!(
                "v_max must be positive and finite: got {}",
                self.v_max
            )));
        }
        if !(0.0..=1.0).contains(&self.lambda_const) {
            return Err(Error::invalid(format!(
                "lambda_const must lie in [0, 1]: got {}",
                self.lambda_const
            )));
        }
        if let Some(t) = self.t_override {
            if t == 0 {
                return Err(Error::invalid("horizon override must be at least 1"));
            }
        }
        Ok(())
    }
}

/// Iteration count for a dataset of `n_tuples` transitions:
/// `max(1, ceil(ln(n) / (1 - gamma)))`.
pub fn horizon_t(n_tuples: usize, gamma: f64) -> usize {
    assert!(n_tuples >= 1, "horizon_t needs at least one tuple");
    assert!((0.0..1.0).contains(&gamma), "gamma must lie in [0, 1)");
    let raw = (n_tuples as f64).ln() / (1.0 - gamma);
    (raw.ceil() as usize).max(1)
}

/// Count-based pessimism penalty `v_max * sqrt(big_l / max(m, 1))`.
pub fn penalty(m: u64, big_l: f64, v_max: f64) -> f64 {
    v_max * (big_l / m.max(1) as f64).sqrt()
}

/// The iteration-count-dependent log factor in the penalty:
/// `2000 * ln(2 * (T + 1) * |S| * |A| * N)`.
pub fn penalty_log_factor(
    t_horizon: usize,
    n_states: usize,
    n_actions: usize,
    n_tuples: usize,
) -> f64 {
    2000.0 * (2.0 * (t_horizon as f64 + 1.0) * n_states as f64 * n_actions as f64 * n_tuples as f64).ln()
}

/// Deterministic partition of `0..n` into an initialization half and
/// `t_horizon` round-robin slices. Indices are shuffled with a generator
/// seeded only by `seed`, so the pattern is independent of tuple contents.
pub fn shuffled_split_indices(n: usize, t_horizon: usize, seed: u64) -> Vec<Vec<usize>> {
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let first = n.div_ceil(2);
    let mut splits = vec![Vec::new(); t_horizon + 1];
    splits[0].extend_from_slice(&order[..first]);
    for (j, &idx) in order[first..].iter().enumerate() {
        splits[1 + j % t_horizon].push(idx);
    }
    splits
}

/// A transition bag split for pessimistic value iteration: slice 0
/// initializes the policy from visit counts, slices `1..=T` each feed one
/// backup. Every slice carries its visit counts, empirical mean rewards
/// (zero where unvisited), and empirical next-state frequencies (zero rows
/// where unvisited).
#[derive(Debug, Clone)]
pub struct SplitDataset {
    pub splits: Vec<Vec<Transition>>,
    pub counts: Vec<Array2<u64>>,
    pub mean_reward: Vec<Array2<f64>>,
    pub transition_freq: Vec<Array3<f64>>,
}

impl SplitDataset {
    pub fn n_slices(&self) -> usize {
        self.splits.len()
    }
}

/// Split transitions into the initialization half plus `t_horizon`
/// round-robin slices, deterministically in `seed`.
pub fn split_dataset(
    transitions: &[Transition],
    t_horizon: usize,
    seed: u64,
    n_states: usize,
    n_actions: usize,
) -> Result<SplitDataset> {
    if transitions.is_empty() {
        return Err(Error::invalid("cannot split an empty transition bag"));
    }
    if t_horizon == 0 {
        return Err(Error::invalid("split needs at least one backup slice"));
    }
    for (i, tr) in transitions.iter().enumerate() {
        if tr.state >= n_states || tr.next_state >= n_states || tr.action >= n_actions {
            return Err(Error::invalid(format!(
                "transition {i} is out of range for {n_states} states / {n_actions} actions"
            )));
        }
    }
    let index_splits = shuffled_split_indices(transitions.len(), t_horizon, seed);
    let mut splits = Vec::with_capacity(index_splits.len());
    let mut counts = Vec::with_capacity(index_splits.len());
    let mut mean_reward = Vec::with_capacity(index_splits.len());
    let mut transition_freq = Vec::with_capacity(index_splits.len());
    for indices in &index_splits {
        let slice: Vec<Transition> = indices.iter().map(|&i| transitions[i]).collect();
        let mut m = Array2::<u64>::zeros((n_states, n_actions));
        let mut r_sum = Array2::<f64>::zeros((n_states, n_actions));
        let mut next = Array3::<f64>::zeros((n_states, n_actions, n_states));
        for tr in &slice {
            m[[tr.state, tr.action]] += 1;
            r_sum[[tr.state, tr.action]] += tr.reward;
            next[[tr.state, tr.action, tr.next_state]] += 1.0;
        }
        for s in 0..n_states {
            for a in 0..n_actions {
                let c = m[[s, a]];
                if c > 0 {
                    let cf = c as f64;
                    r_sum[[s, a]] /= cf;
                    for sn in 0..n_states {
                        next[[s, a, sn]] /= cf;
                    }
                }
            }
        }
        splits.push(slice);
        counts.push(m);
        mean_reward.push(r_sum);
        transition_freq.push(next);
    }
    Ok(SplitDataset {
        splits,
        counts,
        mean_reward,
        transition_freq,
    })
}

/// Everything a solver run produces: the learned policy, its final value
/// estimates, the last backup's action values, the per-iteration value
/// trace (length `T + 1`, starting at zero), and the resolved horizon and
/// log factor.
#[derive(Debug, Clone)]
pub struct VilcbResult {
    pub policy: Policy,
    pub values: ValueTable,
    pub q_final: QTable,
    pub v_trace: Vec<Array1<f64>>,
    pub t_horizon: usize,
    pub big_l: f64,
}

/// A uniform Dirichlet row: exponential draws (inverse-CDF from one uniform
/// each) normalized to sum one. Drawn from `rng` in index order.
fn dirichlet_uniform_row(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    use rand::Rng;
    let mut row: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            -(1.0 - u).ln()
        })
        .collect();
    let sum: f64 = row.iter().sum();
    if sum > 0.0 {
        row.iter_mut().for_each(|e| *e /= sum);
    } else {
        row.iter_mut().for_each(|e| *e = 1.0 / n as f64);
    }
    row
}

fn model_rng(seed: u64) -> ChaCha8Rng {
    // A dedicated stream keeps model rows independent of the split shuffle
    // while still deriving from the single run seed.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

fn initial_policy(counts: &Array2<u64>) -> Vec<usize> {
    let (n_states, _) = counts.dim();
    (0..n_states)
        .map(|s| argmax_lowest(counts.row(s).iter().map(|&c| c as f64)))
        .collect()
}

/// Pessimistic value iteration with heuristic blending over raw transitions.
///
/// `heuristic` must hold a value for every state in `support`'s state
/// projection (those are the only states where blending applies; off the
/// projection the blend weight is zero and the heuristic is never read).
pub fn vi_lcb_hubl(
    transitions: &[Transition],
    n_states: usize,
    n_actions: usize,
    cfg: &VilcbConfig,
    heuristic: &crate::dataset::McValues,
    support: &Support,
) -> Result<VilcbResult> {
    cfg.validate()?;
    if support.n_states() != n_states || support.n_actions() != n_actions {
        return Err(Error::invalid(format!(
            "support shaped {}x{} does not match {n_states} states / {n_actions} actions",
            support.n_states(),
            support.n_actions()
        )));
    }
    let proj: Vec<bool> = (0..n_states).map(|s| support.state_in(s)).collect();
    for (s, &in_proj) in proj.iter().enumerate() {
        if in_proj && heuristic.get(s).is_none() {
            return Err(Error::invalid(format!(
                "heuristic value missing for supported state {s}"
            )));
        }
    }
    let h_dense: Vec<f64> = (0..n_states).map(|s| heuristic.get(s).unwrap_or(0.0)).collect();
    let alpha = cfg.lambda_const;
    run_backups(transitions, n_states, n_actions, cfg, |s, sn, v| {
        let lam = if alpha > 0.0 && proj[s] && proj[sn] { alpha } else { 0.0 };
        if lam == 0.0 {
            v[sn]
        } else {
            (1.0 - lam) * v[sn] + lam * h_dense[sn]
        }
    })
}

/// Unblended pessimistic value iteration: [`vi_lcb_hubl`] with the blend
/// weight forced to zero (the heuristic is never read).
pub fn vi_lcb(
    transitions: &[Transition],
    n_states: usize,
    n_actions: usize,
    cfg: &VilcbConfig,
) -> Result<VilcbResult> {
    let mut plain = cfg.clone();
    plain.lambda_const = 0.0;
    vi_lcb_hubl(
        transitions,
        n_states,
        n_actions,
        &plain,
        &crate::dataset::McValues::empty(),
        &Support::new(n_states, n_actions),
    )
}

fn run_backups(
    transitions: &[Transition],
    n_states: usize,
    n_actions: usize,
    cfg: &VilcbConfig,
    blend: impl Fn(usize, usize, &Array1<f64>) -> f64,
) -> Result<VilcbResult> {
    if transitions.is_empty() {
        return Err(Error::invalid("solver needs at least one transition"));
    }
    let n = transitions.len();
    let t_horizon = cfg.t_override.unwrap_or_else(|| horizon_t(n, cfg.gamma));
    let big_l = penalty_log_factor(t_horizon, n_states, n_actions, n);
    let split = split_dataset(transitions, t_horizon, cfg.seed, n_states, n_actions)?;
    let mut policy = initial_policy(&split.counts[0]);
    let mut v = Array1::<f64>::zeros(n_states);
    let mut v_trace = vec![v.clone()];
    let mut rows_rng = model_rng(cfg.seed);
    let mut q = Array2::<f64>::zeros((n_states, n_actions));
    for t in 1..=t_horizon {
        let counts = &split.counts[t];
        let means = &split.mean_reward[t];
        let freq = &split.transition_freq[t];
        for s in 0..n_states {
            for a in 0..n_actions {
                let m = counts[[s, a]];
                let b = penalty(m, big_l, cfg.v_max);
                let (r_t, boot) = if m > 0 {
                    let mut boot = 0.0;
                    for sn in 0..n_states {
                        let p = freq[[s, a, sn]];
                        if p == 0.0 {
                            continue;
                        }
                        boot += p * blend(s, sn, &v);
                    }
                    (means[[s, a]], boot)
                } else {
                    let row = dirichlet_uniform_row(&mut rows_rng, n_states);
                    let mut boot = 0.0;
                    for (sn, &p) in row.iter().enumerate() {
                        if p == 0.0 {
                            continue;
                        }
                        boot += p * blend(s, sn, &v);
                    }
                    (0.0, boot)
                };
                q[[s, a]] = r_t - b + cfg.gamma * boot;
            }
        }
        monotone_update(&q, &mut v, &mut policy);
        v_trace.push(v.clone());
    }
    finish(policy, v, q, v_trace, t_horizon, big_l)
}

/// Pessimistic value iteration over relabeled tuples: each tuple carries
/// its own reward and discount, so the backup bootstraps
/// `mean_i [ r~_i ] - b + mean_i [ gamma~_i * V(s'_i) ]` with no separate
/// blending term. Unvisited pairs fall back to a Dirichlet row under the
/// base discount, exactly as the raw-transition solver does.
pub fn vi_lcb_relabeled(
    tuples: &[RelabeledTuple],
    n_states: usize,
    n_actions: usize,
    cfg: &VilcbConfig,
) -> Result<VilcbResult> {
    cfg.validate()?;
    if tuples.is_empty() {
        return Err(Error::invalid("solver needs at least one tuple"));
    }
    for (i, t) in tuples.iter().enumerate() {
        if t.state >= n_states || t.next_state >= n_states || t.action >= n_actions {
            return Err(Error::invalid(format!(
                "tuple {i} is out of range for {n_states} states / {n_actions} actions"
            )));
        }
        if !t.r_tilde.is_finite() || !t.gamma_tilde.is_finite() || t.gamma_tilde < 0.0 {
            return Err(Error::invalid(format!("tuple {i} has invalid reward or discount")));
        }
    }
    let n = tuples.len();
    let t_horizon = cfg.t_override.unwrap_or_else(|| horizon_t(n, cfg.gamma));
    let big_l = penalty_log_factor(t_horizon, n_states, n_actions, n);
    let index_splits = shuffled_split_indices(n, t_horizon, cfg.seed);
    let slices: Vec<Vec<RelabeledTuple>> = index_splits
        .iter()
        .map(|indices| indices.iter().map(|&i| tuples[i]).collect())
        .collect();
    let mut counts0 = Array2::<u64>::zeros((n_states, n_actions));
    for t in &slices[0] {
        counts0[[t.state, t.action]] += 1;
    }
    let mut policy = initial_policy(&counts0);
    let mut v = Array1::<f64>::zeros(n_states);
    let mut v_trace = vec![v.clone()];
    let mut rows_rng = model_rng(cfg.seed);
    let mut q = Array2::<f64>::zeros((n_states, n_actions));
    let mut m = Array2::<u64>::zeros((n_states, n_actions));
    let mut r_sum = Array2::<f64>::zeros((n_states, n_actions));
    let mut boot_sum = Array2::<f64>::zeros((n_states, n_actions));
    for t in 1..=t_horizon {
        m.fill(0);
        r_sum.fill(0.0);
        boot_sum.fill(0.0);
        for tu in &slices[t] {
            m[[tu.state, tu.action]] += 1;
            r_sum[[tu.state, tu.action]] += tu.r_tilde;
            boot_sum[[tu.state, tu.action]] += tu.gamma_tilde * v[tu.next_state];
        }
        for s in 0..n_states {
            for a in 0..n_actions {
                let c = m[[s, a]];
                let b = penalty(c, big_l, cfg.v_max);
                q[[s, a]] = if c > 0 {
                    let cf = c as f64;
                    r_sum[[s, a]] / cf - b + boot_sum[[s, a]] / cf
                } else {
                    let row = dirichlet_uniform_row(&mut rows_rng, n_states);
                    let boot: f64 = row
                        .iter()
                        .enumerate()
                        .map(|(sn, &p)| p * v[sn])
                        .sum();
                    0.0 - b + cfg.gamma * boot
                };
            }
        }
        monotone_update(&q, &mut v, &mut policy);
        v_trace.push(v.clone());
    }
    finish(policy, v, q, v_trace, t_horizon, big_l)
}

fn monotone_update(q: &Array2<f64>, v: &mut Array1<f64>, policy: &mut [usize]) {
    let (n_states, _) = q.dim();
    for s in 0..n_states {
        let a_mid = argmax_lowest(q.row(s).iter().copied());
        let v_mid = q[[s, a_mid]];
        if v_mid > v[s] {
            v[s] = v_mid;
            policy[s] = a_mid;
        }
    }
}

fn finish(
    policy: Vec<usize>,
    v: Array1<f64>,
    q: Array2<f64>,
    v_trace: Vec<Array1<f64>>,
    t_horizon: usize,
    big_l: f64,
) -> Result<VilcbResult> {
    Ok(VilcbResult {
        policy: Policy::Deterministic(policy),
        values: ValueTable(v),
        q_final: QTable(q),
        v_trace,
        t_horizon,
        big_l,
    })
}
