//! Dataset relabeling with Monte-Carlo heuristics and blending factors.
//!
//! The pipeline annotates every step of every trajectory with a discounted
//! return-to-go `h`, assigns each trajectory a single blending factor
//! `lambda` in `[0, 1]`, and then rewrites each transition
//! `(s, a, r, s')` into a tuple with
//!
//! ```text
//! r~ = r + gamma * lambda * h'        (h' = next step's return-to-go)
//! gamma~ = gamma * (1 - lambda)
//! ```
//!
//! so a downstream solver that simply bootstraps with the per-tuple
//! discount `gamma~` optimizes the blended objective without knowing the
//! heuristic exists. Final tuples are special: a terminal ending blends
//! nothing (`h' = 0`) and forces `gamma~ = 0` with `done = true`; a timeout
//! ending bootstraps `h'` from a state-value table at the cut state and
//! keeps `done = false`.

mod io;

pub use io::{read_tuples_csv, read_tuples_jsonl, write_tuples_csv, write_tuples_jsonl};

use crate::dataset::{Dataset, EndKind, McValues, Trajectory};
use crate::error::{Error, Result};

/// One step of a trajectory annotated with its discounted return-to-go.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedStep {
    pub state: usize,
    pub action: usize,
    pub reward: f64,
    /// Discounted return-to-go from this step (heuristic value).
    pub h: f64,
}

/// A trajectory with per-step heuristics and, once assigned, a single
/// trajectory-level blending factor. Every step of a trajectory shares the
/// same factor by construction: `lambda` lives here, not on the steps.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedTrajectory {
    pub steps: Vec<AnnotatedStep>,
    pub end_kind: EndKind,
    pub final_state: usize,
    /// Blending factor in `[0, 1]`; `None` until a strategy assigns it.
    pub lambda: Option<f64>,
}

impl AnnotatedTrajectory {
    /// Mean of the per-step heuristics (trajectories are nonempty).
    pub fn mean_h(&self) -> f64 {
        let sum: f64 = self.steps.iter().map(|s| s.h).sum();
        sum / self.steps.len() as f64
    }
}

/// How trajectory-level blending factors are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlendingKind {
    /// `lambda = alpha` for every trajectory.
    Constant,
    /// `lambda = alpha * logistic(mean_h)`, more blending for trajectories
    /// whose heuristics look better.
    Sigmoid,
    /// `lambda = alpha * (non-strict rank of mean_h among all trajectories) / n`.
    Rank,
}

impl std::str::FromStr for BlendingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(BlendingKind::Constant),
            "sigmoid" => Ok(BlendingKind::Sigmoid),
            "rank" => Ok(BlendingKind::Rank),
            other => Err(Error::invalid(format!(
                "unknown blending strategy {other:?} (expected constant, sigmoid, or rank)"
            ))),
        }
    }
}

impl std::fmt::Display for BlendingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BlendingKind::Constant => write!(f, "constant"),
            BlendingKind::Sigmoid => write!(f, "sigmoid"),
            BlendingKind::Rank => write!(f, "rank"),
        }
    }
}

/// A blending strategy: a kind plus its scale `alpha in [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BlendingStrategy {
    pub kind: BlendingKind,
    pub alpha: f64,
}

impl BlendingStrategy {
    pub fn new(kind: BlendingKind, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::invalid(format!(
                "blending alpha must lie in [0, 1]: got {alpha}"
            )));
        }
        Ok(BlendingStrategy { kind, alpha })
    }
}

/// Dataset-level context needed by rank blending: the mean heuristic of
/// every trajectory, in dataset order.
#[derive(Debug, Clone, PartialEq)]
pub struct BlendingContext {
    pub mean_hs: Vec<f64>,
}

impl BlendingContext {
    pub fn from_annotated(trajectories: &[AnnotatedTrajectory]) -> Self {
        BlendingContext {
            mean_hs: trajectories.iter().map(|t| t.mean_h()).collect(),
        }
    }
}

/// One relabeled transition, ready for a per-tuple-discount solver.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RelabeledTuple {
    pub state: usize,
    pub action: usize,
    pub next_state: usize,
    pub r_tilde: f64,
    pub gamma_tilde: f64,
    /// True only for the final tuple of a terminal trajectory; implies
    /// `gamma_tilde == 0`.
    pub done: bool,
}

/// Output of [`relabel`]: the tuple stream plus per-trajectory factors and
/// a count of timeout tails that bootstrapped from an absent value (taken
/// as zero). Callers surface that count as a warning, not an error.
#[derive(Debug, Clone, PartialEq)]
pub struct RelabelOutput {
    pub tuples: Vec<RelabeledTuple>,
    /// Assigned blending factor per trajectory, dataset order.
    pub lambdas: Vec<f64>,
    /// Trajectories whose timeout cut state had no bootstrap value.
    pub zero_bootstrap_tails: usize,
}

/// Backward-pass discounted returns-to-go for one trajectory.
///
/// `h_t = r_t + gamma * h_{t+1}` with the tail seeded by the ending: a
/// terminal trajectory seeds zero beyond the last step, a timeout seeds the
/// bootstrap table's value at the cut state (zero if absent — the second
/// return flags that). This single definition is shared by heuristic
/// annotation and Monte-Carlo value estimation so the two can never
/// disagree on what a return is.
pub(crate) fn returns_to_go(
    traj: &Trajectory,
    gamma: f64,
    bootstrap: &McValues,
) -> (Vec<f64>, bool) {
    let mut used_zero_tail = false;
    let tail = match traj.end_kind {
        EndKind::Terminal => 0.0,
        EndKind::Timeout => match bootstrap.get(traj.final_state) {
            Some(v) => v,
            None => {
                used_zero_tail = true;
                0.0
            }
        },
    };
    let mut h = vec![0.0; traj.len()];
    let mut acc = tail;
    for t in (0..traj.len()).rev() {
        acc = traj.steps[t].reward + gamma * acc;
        h[t] = acc;
    }
    (h, used_zero_tail)
}

/// Annotate one trajectory with per-step returns-to-go (`lambda` left
/// unassigned). Timeout trajectories bootstrap the tail from
/// `timeout_values` at the cut state; an absent value contributes zero and
/// is logged as a warning.
pub fn compute_heuristics(
    traj: &Trajectory,
    gamma: f64,
    timeout_values: &McValues,
) -> Result<AnnotatedTrajectory> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::invalid(format!("gamma must lie in [0, 1): got {gamma}")));
    }
    if traj.is_empty() {
        return Err(Error::invalid("cannot annotate an empty trajectory"));
    }
    let (h, used_zero_tail) = returns_to_go(traj, gamma, timeout_values);
    if used_zero_tail {
        log::warn!(
            "timeout trajectory cut at state {} has no bootstrap value; using 0",
            traj.final_state
        );
    }
    let steps = traj
        .steps
        .iter()
        .zip(h)
        .map(|(s, h)| AnnotatedStep {
            state: s.state,
            action: s.action,
            reward: s.reward,
            h,
        })
        .collect();
    Ok(AnnotatedTrajectory {
        steps,
        end_kind: traj.end_kind,
        final_state: traj.final_state,
        lambda: None,
    })
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Blending factor for one annotated trajectory under a strategy.
///
/// `context` must cover the whole dataset (including `traj` itself) when the
/// strategy is rank; constant and sigmoid ignore it beyond requiring the
/// heuristics to have been computed.
pub fn blending_factor(
    strategy: &BlendingStrategy,
    context: &BlendingContext,
    traj: &AnnotatedTrajectory,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&strategy.alpha) {
        return Err(Error::invalid(format!(
            "blending alpha must lie in [0, 1]: got {}",
            strategy.alpha
        )));
    }
    let lambda = match strategy.kind {
        BlendingKind::Constant => strategy.alpha,
        BlendingKind::Sigmoid => strategy.alpha * logistic(traj.mean_h()),
        BlendingKind::Rank => {
            let n = context.mean_hs.len();
            if n == 0 {
                return Err(Error::invalid(
                    "rank blending needs the dataset's mean heuristics, got an empty context",
                ));
            }
            let own = traj.mean_h();
            let at_or_below = context.mean_hs.iter().filter(|&&m| m <= own).count();
            // Form the rank fraction first so the best trajectory gets
            // exactly alpha and no factor ever exceeds it.
            strategy.alpha * (at_or_below as f64 / n as f64)
        }
    };
    debug_assert!((0.0..=1.0).contains(&lambda));
    Ok(lambda)
}

/// Assign a blending factor to every trajectory in place.
pub fn assign_blending(
    trajectories: &mut [AnnotatedTrajectory],
    strategy: &BlendingStrategy,
) -> Result<()> {
    let context = BlendingContext::from_annotated(trajectories);
    for traj in trajectories.iter_mut() {
        traj.lambda = Some(blending_factor(strategy, &context, traj)?);
    }
    Ok(())
}

fn relabel_impl(
    dataset: &Dataset,
    strategy: &BlendingStrategy,
    timeout_values: &McValues,
    keep_raw_reward: bool,
) -> Result<RelabelOutput> {
    let gamma = dataset.gamma;
    let mut annotated = Vec::with_capacity(dataset.trajectories.len());
    let mut zero_bootstrap_tails = 0usize;
    for traj in &dataset.trajectories {
        let (_, used_zero_tail) = returns_to_go(traj, gamma, timeout_values);
        if used_zero_tail {
            zero_bootstrap_tails += 1;
        }
        annotated.push(compute_heuristics(traj, gamma, timeout_values)?);
    }
    assign_blending(&mut annotated, strategy)?;

    let mut tuples = Vec::with_capacity(dataset.n_transitions());
    let mut lambdas = Vec::with_capacity(annotated.len());
    for traj in &annotated {
        let lambda = traj.lambda.expect("assign_blending set every factor");
        lambdas.push(lambda);
        let last = traj.steps.len() - 1;
        for (t, step) in traj.steps.iter().enumerate() {
            let (next_state, h_next, done) = if t < last {
                (traj.steps[t + 1].state, traj.steps[t + 1].h, false)
            } else {
                match traj.end_kind {
                    EndKind::Terminal => (traj.final_state, 0.0, true),
                    EndKind::Timeout => (
                        traj.final_state,
                        timeout_values.get(traj.final_state).unwrap_or(0.0),
                        false,
                    ),
                }
            };
            let r_tilde = if keep_raw_reward {
                step.reward
            } else {
                step.reward + gamma * lambda * h_next
            };
            let gamma_tilde = if done { 0.0 } else { gamma * (1.0 - lambda) };
            tuples.push(RelabeledTuple {
                state: step.state,
                action: step.action,
                next_state,
                r_tilde,
                gamma_tilde,
                done,
            });
        }
    }
    Ok(RelabelOutput {
        tuples,
        lambdas,
        zero_bootstrap_tails,
    })
}

/// Relabel a dataset: blend heuristics into rewards and shrink per-tuple
/// discounts. Tuples come out in dataset order (trajectory by trajectory,
/// step by step).
pub fn relabel(
    dataset: &Dataset,
    strategy: &BlendingStrategy,
    timeout_values: &McValues,
) -> Result<RelabelOutput> {
    relabel_impl(dataset, strategy, timeout_values, false)
}

/// Ablation: shrink discounts exactly as [`relabel`] does but leave rewards
/// untouched. Isolates the effect of discount shortening from the effect of
/// heuristic reward blending.
pub fn relabel_discount_only(
    dataset: &Dataset,
    strategy: &BlendingStrategy,
    timeout_values: &McValues,
) -> Result<RelabelOutput> {
    relabel_impl(dataset, strategy, timeout_values, true)
}
