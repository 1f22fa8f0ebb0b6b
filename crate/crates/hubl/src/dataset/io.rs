//! Trajectory serialization: one JSON object per line.
//!
//! Each line carries parallel `states`/`actions`/`rewards` arrays plus the
//! state the trajectory ended in and how it ended. Readers reject malformed
//! lines — unparseable JSON, mismatched array lengths, empty trajectories,
//! unknown end markers — with an error naming the offending line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{EndKind, Step, Trajectory};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct TrajectoryLine {
    states: Vec<usize>,
    actions: Vec<usize>,
    rewards: Vec<f64>,
    final_state: usize,
    end: String,
}

const END_TERMINAL: &str = "terminal";
const END_TIMEOUT: &str = "timeout";

/// Write trajectories as JSON lines.
pub fn write_trajectories(path: &Path, trajectories: &[Trajectory]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for traj in trajectories {
        let line = TrajectoryLine {
            states: traj.steps.iter().map(|s| s.state).collect(),
            actions: traj.steps.iter().map(|s| s.action).collect(),
            rewards: traj.steps.iter().map(|s| s.reward).collect(),
            final_state: traj.final_state,
            end: match traj.end_kind {
                EndKind::Terminal => END_TERMINAL.to_string(),
                EndKind::Timeout => END_TIMEOUT.to_string(),
            },
        };
        let json = serde_json::to_string(&line)
            .map_err(|e| Error::invalid(format!("failed to serialize trajectory: {e}")))?;
        writeln!(w, "{json}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Read trajectories from a JSON-lines file, validating each line.
pub fn read_trajectories(path: &Path) -> Result<Vec<Trajectory>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let text = line.map_err(|e| Error::io(path, e))?;
        if text.trim().is_empty() {
            continue;
        }
        let parsed: TrajectoryLine = serde_json::from_str(&text)
            .map_err(|e| Error::format(path, line_no, format!("malformed JSON: {e}")))?;
        out.push(parse_line(parsed, path, line_no)?);
    }
    Ok(out)
}

fn parse_line(line: TrajectoryLine, path: &Path, line_no: usize) -> Result<Trajectory> {
    let n = line.states.len();
    if n == 0 {
        return Err(Error::format(path, line_no, "trajectory has no steps"));
    }
    if line.actions.len() != n || line.rewards.len() != n {
        return Err(Error::format(
            path,
            line_no,
            format!(
                "length mismatch: {} states, {} actions, {} rewards",
                n,
                line.actions.len(),
                line.rewards.len()
            ),
        ));
    }
    let end_kind = match line.end.as_str() {
        END_TERMINAL => EndKind::Terminal,
        END_TIMEOUT => EndKind::Timeout,
        other => {
            return Err(Error::format(
                path,
                line_no,
                format!("unknown end marker {other:?} (expected \"terminal\" or \"timeout\")"),
            ))
        }
    };
    for (t, &r) in line.rewards.iter().enumerate() {
        if !r.is_finite() {
            return Err(Error::format(
                path,
                line_no,
                format!("reward at step {t} is not finite"),
            ));
        }
    }
    let steps = line
        .states
        .iter()
        .zip(&line.actions)
        .zip(&line.rewards)
        .map(|((&state, &action), &reward)| Step { state, action, reward })
        .collect();
    Ok(Trajectory {
        steps,
        end_kind,
        final_state: line.final_state,
    })
}
