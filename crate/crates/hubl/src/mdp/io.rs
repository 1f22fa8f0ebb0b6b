//! JSON (de)serialization for tabular MDPs.
//!
//! Format: {"n_states", "n_actions", "gamma", "transition": nested arrays,
//! "reward": nested arrays, "initial_dist": array}. Floats round-trip
//! value-exactly (serde_json emits shortest-representation decimals).

use std::path::Path;

use ndarray::{Array1, Array2, Array3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::TabularMdp;

/// The JSON document shape for a tabular MDP — also usable inline inside a
/// run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdpJson {
    pub n_states: usize,
    pub n_actions: usize,
    pub gamma: f64,
    pub transition: Vec<Vec<Vec<f64>>>,
    pub reward: Vec<Vec<f64>>,
    pub initial_dist: Vec<f64>,
}

impl TabularMdp {
    pub fn to_doc(&self) -> MdpJson {
        MdpJson {
            n_states: self.n_states,
            n_actions: self.n_actions,
            gamma: self.discount,
            transition: (0..self.n_states)
                .map(|s| {
                    (0..self.n_actions)
                        .map(|a| self.transition.slice(ndarray::s![s, a, ..]).to_vec())
                        .collect()
                })
                .collect(),
            reward: (0..self.n_states)
                .map(|s| self.reward.row(s).to_vec())
                .collect(),
            initial_dist: self.initial_dist.to_vec(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("MDP serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MdpJson = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("malformed MDP JSON: {e}")))?;
        Self::from_doc(doc)
    }

    pub fn from_doc(doc: MdpJson) -> Result<Self> {
        let (ns, na) = (doc.n_states, doc.n_actions);
        if doc.transition.len() != ns
            || doc.transition.iter().any(|rows| {
                rows.len() != na || rows.iter().any(|row| row.len() != ns)
            })
        {
            return Err(Error::invalid(
                "transition tensor shape does not match n_states/n_actions",
            ));
        }
        if doc.reward.len() != ns || doc.reward.iter().any(|row| row.len() != na) {
            return Err(Error::invalid(
                "reward matrix shape does not match n_states/n_actions",
            ));
        }
        if doc.initial_dist.len() != ns {
            return Err(Error::invalid("initial_dist length does not match n_states"));
        }
        let mut transition = Array3::zeros((ns, na, ns));
        for (s, rows) in doc.transition.iter().enumerate() {
            for (a, row) in rows.iter().enumerate() {
                for (s_next, &p) in row.iter().enumerate() {
                    transition[[s, a, s_next]] = p;
                }
            }
        }
        let mut reward = Array2::zeros((ns, na));
        for (s, row) in doc.reward.iter().enumerate() {
            for (a, &r) in row.iter().enumerate() {
                reward[[s, a]] = r;
            }
        }
        TabularMdp::new(transition, reward, doc.gamma, Array1::from_vec(doc.initial_dist))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Invalid(msg) => Error::invalid(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}
