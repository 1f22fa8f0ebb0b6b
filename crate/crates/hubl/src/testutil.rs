//! Shared fixtures and independent oracles for unit tests.

use ndarray::{Array1, Array2, Array3};

use crate::mdp::{Policy, TabularMdp};

/// One state, one action, self-loop with reward 1.
pub(crate) fn self_loop(gamma: f64) -> TabularMdp {
    let transition = Array3::from_shape_vec((1, 1, 1), vec![1.0]).unwrap();
    let reward = Array2::from_shape_vec((1, 1), vec![1.0]).unwrap();
    TabularMdp::new(transition, reward, gamma, Array1::from_vec(vec![1.0])).unwrap()
}

/// Two states, two actions: action 0 stays put, action 1 swaps states.
/// Rewards: r(0,0)=0.4, r(0,1)=0.0, r(1,0)=1.0, r(1,1)=1.0.
/// At gamma=0.5 the optimal policy is [1, 0] with V* = [1.0, 2.0].
pub(crate) fn two_state_chain(gamma: f64) -> TabularMdp {
    let transition = Array3::from_shape_vec(
        (2, 2, 2),
        vec![
            1.0, 0.0, // s0, a0: stay
            0.0, 1.0, // s0, a1: go to s1
            0.0, 1.0, // s1, a0: stay
            1.0, 0.0, // s1, a1: go to s0
        ],
    )
    .unwrap();
    let reward = Array2::from_shape_vec((2, 2), vec![0.4, 0.0, 1.0, 1.0]).unwrap();
    TabularMdp::new(transition, reward, gamma, Array1::from_vec(vec![1.0, 0.0])).unwrap()
}

/// A fixed, fully mixing 5-state 3-action MDP with irregular constants
/// (hand-written, no symmetry to hide bugs behind).
pub(crate) fn fixed_five_state() -> TabularMdp {
    let n_states = 5;
    let n_actions = 3;
    let mut transition = Array3::<f64>::zeros((n_states, n_actions, n_states));
    let mut reward = Array2::<f64>::zeros((n_states, n_actions));
    // Deterministic-ish pattern rows with distinct masses.
    let rows: [[f64; 5]; 15] = [
        [0.70, 0.10, 0.10, 0.05, 0.05],
        [0.00, 0.50, 0.25, 0.25, 0.00],
        [0.20, 0.20, 0.20, 0.20, 0.20],
        [0.05, 0.05, 0.80, 0.05, 0.05],
        [0.30, 0.00, 0.00, 0.70, 0.00],
        [0.00, 0.00, 0.00, 0.00, 1.00],
        [0.25, 0.25, 0.25, 0.00, 0.25],
        [0.10, 0.40, 0.10, 0.30, 0.10],
        [0.00, 1.00, 0.00, 0.00, 0.00],
        [0.15, 0.15, 0.15, 0.15, 0.40],
        [0.60, 0.00, 0.20, 0.10, 0.10],
        [0.00, 0.30, 0.30, 0.30, 0.10],
        [0.45, 0.05, 0.05, 0.05, 0.40],
        [0.00, 0.00, 0.50, 0.50, 0.00],
        [0.90, 0.025, 0.025, 0.025, 0.025],
    ];
    let rewards: [f64; 15] = [
        0.12, 0.95, 0.50, 0.03, 0.71, 0.33, 0.89, 0.27, 0.64, 0.08, 0.42, 0.77, 0.19, 0.56,
        0.91,
    ];
    for s in 0..n_states {
        for a in 0..n_actions {
            let idx = s * n_actions + a;
            for sn in 0..n_states {
                transition[[s, a, sn]] = rows[idx][sn];
            }
            reward[[s, a]] = rewards[idx];
        }
    }
    let initial = Array1::from_vec(vec![0.2, 0.2, 0.2, 0.2, 0.2]);
    TabularMdp::new(transition, reward, 0.85, initial).unwrap()
}

/// A fixed stochastic policy for [`fixed_five_state`].
pub(crate) fn fixed_five_state_policy() -> Policy {
    Policy::Stochastic(
        Array2::from_shape_vec(
            (5, 3),
            vec![
                0.5, 0.3, 0.2, //
                0.1, 0.1, 0.8, //
                1.0, 0.0, 0.0, //
                0.0, 0.6, 0.4, //
                0.25, 0.25, 0.5,
            ],
        )
        .unwrap(),
    )
}

/// Solve (I - gamma * P^pi) V = r^pi exactly by Gaussian elimination with
/// partial pivoting — an oracle independent of the iterative solvers.
pub(crate) fn policy_values_linear_solve(mdp: &TabularMdp, policy: &Policy) -> Vec<f64> {
    let n = mdp.n_states;
    // Build A = I - gamma * P^pi and b = r^pi.
    let mut a = vec![vec![0.0f64; n]; n];
    let mut b = vec![0.0f64; n];
    for s in 0..n {
        a[s][s] = 1.0;
        for act in 0..mdp.n_actions {
            let p_a = policy.action_prob(s, act);
            if p_a == 0.0 {
                continue;
            }
            b[s] += p_a * mdp.reward[[s, act]];
            for sn in 0..n {
                a[s][sn] -= mdp.discount * p_a * mdp.transition[[s, act, sn]];
            }
        }
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        assert!(a[col][col].abs() > 1e-14, "singular evaluation system");
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut v = vec![0.0f64; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row][k] * v[k];
        }
        v[row] = acc / a[row][row];
    }
    v
}

/// All deterministic policies for a given shape, lexicographic order.
pub(crate) fn all_deterministic_policies(n_states: usize, n_actions: usize) -> Vec<Vec<usize>> {
    let total = n_actions.pow(n_states as u32);
    (0..total)
        .map(|mut code| {
            (0..n_states)
                .map(|_| {
                    let a = code % n_actions;
                    code /= n_actions;
                    a
                })
                .collect()
        })
        .collect()
}
