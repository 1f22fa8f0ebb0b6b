//! Finite tabular MDPs and exact dynamic programming.
//!
//! Everything downstream (data generation, relabeling, the pessimistic
//! solver, bias/regret accounting) treats the solvers in this module as
//! ground-truth oracles, so the contracts here are strict: validated
//! probability rows, deterministic tie-breaking, and sup-norm stopping rules
//! with explicit tolerances.

mod dp;
mod io;
mod occupancy;
mod reshape;

pub use dp::{
    evaluation_operator, optimality_operator, policy_evaluation, q_from_values, value_iteration,
    DEFAULT_TOL,
};
pub use io::MdpJson;
pub use occupancy::discounted_occupancy;
pub use reshape::{
    extended_heuristic, extended_lambda, reshape_mdp, reshaped_evaluation_operator,
    reshaped_policy_evaluation, reshaped_q_from_values,
};

use ndarray::{Array1, Array2, Array3};

use crate::error::{Error, Result};

/// Tolerance for probability rows summing to one.
pub const PROB_TOL: f64 = 1e-12;

/// A finite Markov decision process with tabular transition and reward
/// models.
///
/// Rewards are restricted to [0,1] so that 1/(1-gamma) is a valid value
/// bound everywhere; see [`TabularMdp::v_max`].
#[derive(Debug, Clone, PartialEq)]
pub struct TabularMdp {
    pub n_states: usize,
    pub n_actions: usize,
    /// transition[[s, a, s']] = P(s' | s, a); every (s,a) row is a
    /// probability vector.
    pub transition: Array3<f64>,
    /// reward[[s, a]] in [0, 1].
    pub reward: Array2<f64>,
    /// Discount factor gamma in [0, 1).
    pub discount: f64,
    /// Initial state distribution d0.
    pub initial_dist: Array1<f64>,
}

impl TabularMdp {
    /// Build and validate an MDP. Rejects malformed probability rows,
    /// rewards outside [0,1], discounts outside [0,1), and initial
    /// distributions that do not sum to one.
    pub fn new(
        transition: Array3<f64>,
        reward: Array2<f64>,
        discount: f64,
        initial_dist: Array1<f64>,
    ) -> Result<Self> {
        let (n_states, n_actions, n_next) = transition.dim();
        if n_states == 0 || n_actions == 0 {
            return Err(Error::invalid("MDP needs at least one state and action"));
        }
        if n_next != n_states {
            return Err(Error::invalid(format!(
                "transition tensor must be square in states: got {n_states}x{n_actions}x{n_next}"
            )));
        }
        if reward.dim() != (n_states, n_actions) {
            return Err(Error::invalid(format!(
                "reward matrix shape {:?} does not match ({n_states}, {n_actions})",
                reward.dim()
            )));
        }
        if initial_dist.len() != n_states {
            return Err(Error::invalid(format!(
                "initial_dist length {} does not match n_states {n_states}",
                initial_dist.len()
            )));
        }
        if !(0.0..1.0).contains(&discount) {
            return Err(Error::invalid(format!(
                "gamma must lie in [0, 1): got {discount}"
            )));
        }
        for s in 0..n_states {
            for a in 0..n_actions {
                let row = transition.slice(ndarray::s![s, a, ..]);
                check_prob_row(row.iter().copied(), &format!("P[{s}][{a}]"))?;
                let r = reward[[s, a]];
                if !r.is_finite() || !(0.0..=1.0).contains(&r) {
                    return Err(Error::invalid(format!(
                        "reward[{s}][{a}] = {r} outside [0, 1]"
                    )));
                }
            }
        }
        check_prob_row(initial_dist.iter().copied(), "initial_dist")?;
        Ok(TabularMdp {
            n_states,
            n_actions,
            transition,
            reward,
            discount,
            initial_dist,
        })
    }

    /// Upper bound on any value function: 1/(1-gamma), tight for rewards in
    /// [0,1].
    pub fn v_max(&self) -> f64 {
        1.0 / (1.0 - self.discount)
    }

    /// Same dynamics and rewards under a different discount factor. Used by
    /// the occupancy-domination check, which compares visitation sums at
    /// discounts gamma and gamma*(1-lambda).
    pub fn with_discount(&self, discount: f64) -> Result<Self> {
        let mut copy = self.clone();
        if !(0.0..1.0).contains(&discount) {
            return Err(Error::invalid(format!(
                "gamma must lie in [0, 1): got {discount}"
            )));
        }
        copy.discount = discount;
        Ok(copy)
    }
}

pub(crate) fn check_prob_row(row: impl Iterator<Item = f64>, what: &str) -> Result<()> {
    let mut sum = 0.0;
    for (i, p) in row.enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::invalid(format!("{what}[{i}] = {p} is not a probability")));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::invalid(format!(
            "{what} sums to {sum}, expected 1 within {PROB_TOL:e}"
        )));
    }
    Ok(())
}

/// A decision rule: either one action per state or a per-state distribution
/// over actions.
#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    Deterministic(Vec<usize>),
    Stochastic(Array2<f64>),
}

impl Policy {
    /// Uniform-random policy over all actions.
    pub fn uniform(n_states: usize, n_actions: usize) -> Self {
        Policy::Stochastic(Array2::from_elem(
            (n_states, n_actions),
            1.0 / n_actions as f64,
        ))
    }

    /// Probability of taking `a` in `s`.
    pub fn action_prob(&self, s: usize, a: usize) -> f64 {
        match self {
            Policy::Deterministic(actions) => {
                if actions[s] == a {
                    1.0
                } else {
                    0.0
                }
            }
            Policy::Stochastic(rows) => rows[[s, a]],
        }
    }

    pub fn n_states(&self) -> usize {
        match self {
            Policy::Deterministic(actions) => actions.len(),
            Policy::Stochastic(rows) => rows.nrows(),
        }
    }

    /// Validate shape and probability rows against an MDP.
    pub fn validate(&self, mdp: &TabularMdp) -> Result<()> {
        match self {
            Policy::Deterministic(actions) => {
                if actions.len() != mdp.n_states {
                    return Err(Error::invalid(format!(
                        "policy has {} states, MDP has {}",
                        actions.len(),
                        mdp.n_states
                    )));
                }
                for (s, &a) in actions.iter().enumerate() {
                    if a >= mdp.n_actions {
                        return Err(Error::invalid(format!(
                            "policy action {a} at state {s} out of range (n_actions = {})",
                            mdp.n_actions
                        )));
                    }
                }
            }
            Policy::Stochastic(rows) => {
                if rows.dim() != (mdp.n_states, mdp.n_actions) {
                    return Err(Error::invalid(format!(
                        "policy shape {:?} does not match MDP ({}, {})",
                        rows.dim(),
                        mdp.n_states,
                        mdp.n_actions
                    )));
                }
                for s in 0..mdp.n_states {
                    check_prob_row(rows.row(s).iter().copied(), &format!("pi[{s}]"))?;
                }
            }
        }
        Ok(())
    }
}

/// Per-state real values (V tables and heuristic tables share this shape).
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable(pub Array1<f64>);

impl ValueTable {
    pub fn zeros(n_states: usize) -> Self {
        ValueTable(Array1::zeros(n_states))
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        ValueTable(Array1::from_vec(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// sup-norm distance to another table of the same length.
    pub fn sup_distance(&self, other: &ValueTable) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Expected value under a distribution over states, e.g. V(d0).
    pub fn expect_under(&self, dist: &Array1<f64>) -> f64 {
        self.0.dot(dist)
    }
}

impl std::ops::Index<usize> for ValueTable {
    type Output = f64;
    fn index(&self, s: usize) -> &f64 {
        &self.0[s]
    }
}

/// Per-(state, action) real values.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable(pub Array2<f64>);

impl QTable {
    pub fn zeros(n_states: usize, n_actions: usize) -> Self {
        QTable(Array2::zeros((n_states, n_actions)))
    }

    /// Greedy deterministic policy; ties break toward the lowest action
    /// index so that repeated runs are reproducible.
    pub fn greedy_policy(&self) -> Policy {
        let actions = self
            .0
            .rows()
            .into_iter()
            .map(|row| argmax_lowest(row.iter().copied()))
            .collect();
        Policy::Deterministic(actions)
    }

    /// Row maxima: V(s) = max_a Q(s, a).
    pub fn state_values(&self) -> ValueTable {
        ValueTable(
            self.0
                .rows()
                .into_iter()
                .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
                .collect(),
        )
    }
}

impl std::ops::Index<(usize, usize)> for QTable {
    type Output = f64;
    fn index(&self, (s, a): (usize, usize)) -> &f64 {
        &self.0[[s, a]]
    }
}

/// Index of the largest element, lowest index on ties. The iterator must be
/// nonempty.
pub(crate) fn argmax_lowest(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

/// The MDP obtained by blending a heuristic into rewards and shrinking the
/// discount per transition: r~(s,a) = r(s,a) + gamma * E[lambda(s,s') h(s')]
/// and gamma~(s,s') = gamma * (1 - lambda(s,s')).
#[derive(Debug, Clone, PartialEq)]
pub struct ReshapedMdp {
    pub base: TabularMdp,
    /// reshaped_reward[[s, a]] = r~(s, a).
    pub reshaped_reward: Array2<f64>,
    /// discount_matrix[[s, s']] = gamma~(s, s') in [0, gamma].
    pub discount_matrix: Array2<f64>,
}

/// Normalized discounted state-action occupancy: d(s, a) sums to one over
/// all pairs. See [`discounted_occupancy`].
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyMeasure {
    pub weights: Array2<f64>,
}

impl OccupancyMeasure {
    /// Marginal state masses d(s) = sum_a d(s, a).
    pub fn state_masses(&self) -> Array1<f64> {
        self.weights.sum_axis(ndarray::Axis(1))
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.sum()
    }
}

/// Membership set of state-action pairs (the data support Omega). The
/// reshaping extension rule keys off this set's *state projection*: a state
/// is "in" if it appears in some member pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Support {
    members: Array2<bool>,
    state_in: Vec<bool>,
}

impl Support {
    pub fn new(n_states: usize, n_actions: usize) -> Self {
        Support {
            members: Array2::from_elem((n_states, n_actions), false),
            state_in: vec![false; n_states],
        }
    }

    /// Support containing every pair.
    pub fn full(n_states: usize, n_actions: usize) -> Self {
        Support {
            members: Array2::from_elem((n_states, n_actions), true),
            state_in: vec![true; n_states],
        }
    }

    pub fn from_pairs(
        n_states: usize,
        n_actions: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut sup = Support::new(n_states, n_actions);
        for (s, a) in pairs {
            if s >= n_states || a >= n_actions {
                return Err(Error::invalid(format!(
                    "support pair ({s}, {a}) out of range for ({n_states}, {n_actions})"
                )));
            }
            sup.insert(s, a);
        }
        Ok(sup)
    }

    pub fn insert(&mut self, s: usize, a: usize) {
        self.members[[s, a]] = true;
        self.state_in[s] = true;
    }

    pub fn contains(&self, s: usize, a: usize) -> bool {
        self.members[[s, a]]
    }

    /// Whether `s` is in the state projection of the set.
    pub fn state_in(&self, s: usize) -> bool {
        self.state_in[s]
    }

    pub fn n_states(&self) -> usize {
        self.state_in.len()
    }

    pub fn n_actions(&self) -> usize {
        self.members.ncols()
    }

    pub fn n_pairs(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn iter_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n_actions = self.members.ncols();
        self.members
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(move |(i, _)| (i / n_actions, i % n_actions))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::two_state_chain;

    fn tiny() -> (Array3<f64>, Array2<f64>, Array1<f64>) {
        (
            Array3::from_shape_vec((1, 1, 1), vec![1.0]).unwrap(),
            Array2::from_shape_vec((1, 1), vec![0.5]).unwrap(),
            Array1::from_vec(vec![1.0]),
        )
    }

    #[test]
    fn construction_validates_every_field() {
        let (t, r, d0) = tiny();
        assert!(TabularMdp::new(t.clone(), r.clone(), 0.9, d0.clone()).is_ok());
        assert!(TabularMdp::new(t.clone(), r.clone(), 1.0, d0.clone()).is_err());
        assert!(TabularMdp::new(t.clone(), r.clone(), -0.1, d0.clone()).is_err());

        let bad_row = Array3::from_shape_vec((1, 1, 1), vec![0.9]).unwrap();
        assert!(TabularMdp::new(bad_row, r.clone(), 0.9, d0.clone()).is_err());
        let neg_prob = Array3::from_shape_vec((1, 1, 1), vec![-1.0]).unwrap();
        assert!(TabularMdp::new(neg_prob, r.clone(), 0.9, d0.clone()).is_err());

        let big_reward = Array2::from_shape_vec((1, 1), vec![1.5]).unwrap();
        assert!(TabularMdp::new(t.clone(), big_reward, 0.9, d0.clone()).is_err());
        let nan_reward = Array2::from_shape_vec((1, 1), vec![f64::NAN]).unwrap();
        assert!(TabularMdp::new(t.clone(), nan_reward, 0.9, d0.clone()).is_err());

        let bad_d0 = Array1::from_vec(vec![0.7]);
        assert!(TabularMdp::new(t.clone(), r.clone(), 0.9, bad_d0).is_err());
    }

    #[test]
    fn v_max_is_geometric_bound() {
        let (t, r, d0) = tiny();
        let mdp = TabularMdp::new(t, r, 0.9, d0).unwrap();
        assert!((mdp.v_max() - 10.0).abs() <= 1e-12);
    }

    #[test]
    fn policy_probabilities_and_validation() {
        let mdp = two_state_chain(0.5);
        let det = Policy::Deterministic(vec![1, 0]);
        assert_eq!(det.action_prob(0, 1), 1.0);
        assert_eq!(det.action_prob(0, 0), 0.0);
        assert!(det.validate(&mdp).is_ok());

        let sto = Policy::uniform(2, 2);
        assert_eq!(sto.action_prob(1, 0), 0.5);
        assert!(sto.validate(&mdp).is_ok());

        let bad = Policy::Stochastic(Array2::from_shape_vec((2, 2), vec![0.9, 0.2, 0.5, 0.5]).unwrap());
        assert!(bad.validate(&mdp).is_err());
    }

    #[test]
    fn greedy_policy_breaks_ties_toward_lowest_action() {
        let q = QTable(Array2::from_shape_vec((2, 3), vec![1.0, 1.0, 0.0, 0.0, 2.0, 2.0]).unwrap());
        assert_eq!(q.greedy_policy(), Policy::Deterministic(vec![0, 1]));
        let v = q.state_values();
        assert_eq!(v[0], 1.0);
        assert_eq!(v[1], 2.0);
    }

    #[test]
    fn value_table_expectation_and_distance() {
        let v = ValueTable::from_vec(vec![1.0, 3.0]);
        let w = ValueTable::from_vec(vec![2.0, 0.5]);
        assert_eq!(v.expect_under(&Array1::from_vec(vec![0.5, 0.5])), 2.0);
        assert_eq!(v.sup_distance(&w), 2.5);
    }

    #[test]
    fn support_projection_and_pair_iteration() {
        let mut sup = Support::new(3, 2);
        assert_eq!(sup.n_pairs(), 0);
        assert!(!sup.state_in(1));
        sup.insert(1, 0);
        sup.insert(2, 1);
        assert!(sup.state_in(1));
        assert!(!sup.state_in(0));
        assert!(sup.contains(1, 0));
        assert!(!sup.contains(1, 1));
        assert_eq!(sup.n_pairs(), 2);
        let pairs: Vec<_> = sup.iter_pairs().collect();
        assert_eq!(pairs, vec![(1, 0), (2, 1)]);

        assert!(Support::from_pairs(3, 2, [(0, 0), (2, 1)]).is_ok());
        assert!(Support::from_pairs(3, 2, [(3, 0)]).is_err());
        assert!(Support::from_pairs(3, 2, [(0, 2)]).is_err());

        let full = Support::full(2, 2);
        assert_eq!(full.n_pairs(), 4);
        assert!(full.state_in(0) && full.state_in(1));
    }

    #[test]
    fn argmax_prefers_lowest_on_ties() {
        assert_eq!(argmax_lowest([1.0, 1.0, 1.0].into_iter()), 0);
        assert_eq!(argmax_lowest([0.0, 2.0, 2.0].into_iter()), 1);
        assert_eq!(argmax_lowest([f64::NEG_INFINITY, -1.0].into_iter()), 1);
    }

    #[test]
    fn with_discount_keeps_everything_else() {
        let mdp = two_state_chain(0.5);
        let shrunk = mdp.with_discount(0.25).unwrap();
        assert_eq!(shrunk.discount, 0.25);
        assert_eq!(shrunk.transition, mdp.transition);
        assert_eq!(shrunk.reward, mdp.reward);
        assert!(mdp.with_discount(1.0).is_err());
    }
}
