//! Solver outcome types shared by the continuous solver and the local-search
//! baseline, plus trajectory diagnostics.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::instance::Assignment;

/// Why a solver run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ThresholdReached,
    BudgetExhausted,
    Converged,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StopReason::ThresholdReached => "threshold_reached",
            StopReason::BudgetExhausted => "budget_exhausted",
            StopReason::Converged => "converged",
        };
        f.write_str(s)
    }
}

impl FromStr for StopReason {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "threshold_reached" => Ok(StopReason::ThresholdReached),
            "budget_exhausted" => Ok(StopReason::BudgetExhausted),
            "converged" => Ok(StopReason::Converged),
            other => Err(format!("unknown stop reason `{other}`")),
        }
    }
}

/// Unsat-count target for a threshold fraction: floor(fraction * m), with a
/// tiny epsilon so decimal fractions (0.015 is not exact in binary) still
/// floor to the intended integer (0.015 * 5000 -> 75, not 74).
pub fn threshold_count(fraction: f64, m: usize) -> usize {
    (fraction * m as f64 + 1e-9).floor() as usize
}

/// Outcome of one solver run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    #[serde(skip)]
    pub best_assignment: Assignment,
    pub stop_reason: StopReason,
    pub best_unsat: usize,
    pub steps_total: u64,
    #[serde(rename = "wall_time_s")]
    pub wall_time: f64,
    pub step_of_best: u64,
    /// Sampled (step, unsat count) pairs; the first entry is the initial
    /// evaluation and the last is the final one.
    pub trajectory: Vec<(u64, usize)>,
}

impl SolveResult {
    /// Equality on everything the determinism contract covers; wall time is
    /// the one documented non-invariant.
    pub fn deterministic_eq(&self, other: &Self) -> bool {
        self.best_assignment == other.best_assignment
            && self.stop_reason == other.stop_reason
            && self.best_unsat == other.best_unsat
            && self.steps_total == other.steps_total
            && self.step_of_best == other.step_of_best
            && self.trajectory == other.trajectory
    }

    /// JSON form {stop_reason, best_unsat, steps_total, wall_time_s,
    /// step_of_best, trajectory: [[step, unsat], ...]}.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("result serializes")
    }

    /// Competition-style solution line: `v` followed by signed literals.
    pub fn assignment_v_line(&self) -> String {
        let mut out = String::from("v");
        for (i, &bit) in self.best_assignment.bits().iter().enumerate() {
            let var = i as i64 + 1;
            out.push_str(&format!(" {}", if bit { var } else { -var }));
        }
        out
    }
}

/// Staircase summary of a trajectory: the monotone best-so-far curve, the
/// strictly positive drops between consecutive points of that curve
/// (avalanche sizes), and their histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrajectoryDiagnostics {
    pub best_curve: Vec<(u64, usize)>,
    pub drops: Vec<usize>,
    pub drop_histogram: BTreeMap<usize, usize>,
}

impl TrajectoryDiagnostics {
    /// Total decrease; equals first minus last of the best curve.
    pub fn total_drop(&self) -> usize {
        self.drops.iter().sum()
    }
}

pub fn trajectory_diagnostics(result: &SolveResult) -> TrajectoryDiagnostics {
    let mut best_curve = Vec::with_capacity(result.trajectory.len());
    let mut drops = Vec::new();
    let mut best = usize::MAX;
    for &(step, unsat) in &result.trajectory {
        let prev = best;
        best = best.min(unsat);
        if prev != usize::MAX && best < prev {
            drops.push(prev - best);
        }
        best_curve.push((step, best));
    }
    let mut drop_histogram = BTreeMap::new();
    for &d in &drops {
        *drop_histogram.entry(d).or_insert(0) += 1;
    }
    TrajectoryDiagnostics {
        best_curve,
        drops,
        drop_histogram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result_with_trajectory(trajectory: Vec<(u64, usize)>) -> SolveResult {
        SolveResult {
            best_assignment: Assignment::new(vec![false]),
            stop_reason: StopReason::BudgetExhausted,
            best_unsat: trajectory.iter().map(|&(_, u)| u).min().unwrap_or(0),
            steps_total: trajectory.last().map(|&(s, _)| s).unwrap_or(0),
            wall_time: 0.0,
            step_of_best: 0,
            trajectory,
        }
    }

    #[test]
    fn threshold_count_examples() {
        assert_eq!(threshold_count(0.015, 5000), 75);
        assert_eq!(threshold_count(0.015, 2500), 37);
        assert_eq!(threshold_count(0.015, 1250), 18);
        assert_eq!(threshold_count(0.0, 10), 0);
        assert_eq!(threshold_count(1.0, 10), 10);
    }

    #[test]
    fn staircase_drops() {
        let r = result_with_trajectory(vec![(0, 100), (10, 90), (20, 90), (30, 40)]);
        let d = trajectory_diagnostics(&r);
        assert_eq!(d.drops, vec![10, 50]);
        assert_eq!(d.total_drop(), 60);
        assert_eq!(d.best_curve, vec![(0, 100), (10, 90), (20, 90), (30, 40)]);
        assert_eq!(d.drop_histogram.get(&50), Some(&1));
    }

    #[test]
    fn flat_trajectory_has_no_drops() {
        let r = result_with_trajectory(vec![(0, 5), (10, 5), (20, 5)]);
        let d = trajectory_diagnostics(&r);
        assert!(d.drops.is_empty());
        assert_eq!(d.total_drop(), 0);
    }

    #[test]
    fn non_monotone_trajectory_normalized_by_best_curve() {
        let r = result_with_trajectory(vec![(0, 10), (10, 4), (20, 8), (30, 2)]);
        let d = trajectory_diagnostics(&r);
        assert_eq!(d.best_curve, vec![(0, 10), (10, 4), (20, 4), (30, 2)]);
        assert_eq!(d.drops, vec![6, 2]);
        // Sum of drops telescopes to first minus last of the best curve.
        assert_eq!(d.total_drop(), 10 - 2);
    }

    #[test]
    fn json_shape() {
        let r = result_with_trajectory(vec![(0, 3), (10, 1)]);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["stop_reason"], "budget_exhausted");
        assert_eq!(v["best_unsat"], 1);
        assert_eq!(v["trajectory"][1][0], 10);
        assert_eq!(v["trajectory"][1][1], 1);
        assert!(v.get("best_assignment").is_none());
        assert!(v.get("wall_time_s").is_some());
    }

    #[test]
    fn v_line_format() {
        let mut r = result_with_trajectory(vec![(0, 0)]);
        r.best_assignment = Assignment::new(vec![true, false, true]);
        assert_eq!(r.assignment_v_line(), "v 1 -2 3");
    }
}
