//! First-visit Monte-Carlo state-value estimation from offline data.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::mdp::ValueTable;

/// A partial per-state value table: states never visited carry no value at
/// all (queries return `None`, never a silent 0).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct McValues {
    values: Vec<Option<f64>>,
}

impl McValues {
    /// A table with no entries; every query is absent.
    pub fn empty() -> Self {
        McValues { values: Vec::new() }
    }

    /// Treat a dense table as fully present.
    pub fn from_dense(table: &ValueTable) -> Self {
        McValues {
            values: table.0.iter().map(|&v| Some(v)).collect(),
        }
    }

    pub fn insert(&mut self, state: usize, value: f64) {
        if state >= self.values.len() {
            self.values.resize(state + 1, None);
        }
        self.values[state] = Some(value);
    }

    /// Value at `state`, or `None` if the state was never visited (or lies
    /// beyond the table).
    pub fn get(&self, state: usize) -> Option<f64> {
        self.values.get(state).copied().flatten()
    }

    pub fn present_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Densify with a default for absent states. Callers that must not
    /// tolerate absence should check presence first.
    pub fn to_dense(&self, n_states: usize, default: f64) -> ValueTable {
        ValueTable(ndarray::Array1::from_shape_fn(n_states, |s| {
            self.get(s).unwrap_or(default)
        }))
    }
}

/// First-visit Monte-Carlo estimates of the behavior policy's state values.
///
/// For each trajectory the per-step discounted return-to-go is computed by
/// the same backward pass the relabeling stage uses
/// ([`crate::relabel::compute_heuristics`]); because this operation takes no
/// bootstrap table, timeout tails contribute zero beyond the cut (the
/// documented absent-value case of that rule). Each state's estimate
/// averages the return at its *first* occurrence in every trajectory that
/// visits it.
pub fn mc_state_values(dataset: &Dataset, gamma: f64) -> Result<McValues> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::invalid(format!("gamma must lie in [0, 1): got {gamma}")));
    }
    let absent = McValues::empty();
    let mut sums = vec![0.0f64; dataset.n_states];
    let mut counts = vec![0u64; dataset.n_states];
    let mut seen = vec![false; dataset.n_states];
    for traj in &dataset.trajectories {
        let (returns, _) = crate::relabel::returns_to_go(traj, gamma, &absent);
        seen.iter_mut().for_each(|s| *s = false);
        for (step, &ret) in traj.steps.iter().zip(returns.iter()) {
            if !seen[step.state] {
                seen[step.state] = true;
                sums[step.state] += ret;
                counts[step.state] += 1;
            }
        }
    }
    let mut out = McValues::empty();
    for s in 0..dataset.n_states {
        if counts[s] > 0 {
            out.insert(s, sums[s] / counts[s] as f64);
        }
    }
    Ok(out)
}
