//! Run aggregation: shifted geometric means and paired run comparison.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("no values to aggregate")]
    EmptyInput,
    #[error("values must be non-negative, found {0}")]
    NegativeValue(f64),
    #[error("instance sets differ: only left {only_left:?}, only right {only_right:?}")]
    InstanceSetMismatch {
        only_left: Vec<String>,
        only_right: Vec<String>,
    },
}

/// Shifted geometric mean: (prod (x_i + tau))^(1/q) - tau.
///
/// With tau = 0 this is the plain geometric mean. The usual shifts are 10
/// for times in seconds and 100 for node counts.
pub fn shifted_geom_mean(values: &[f64], tau: f64) -> Result<f64, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut log_sum = 0.0;
    for &v in values {
        if v < 0.0 {
            return Err(MetricsError::NegativeValue(v));
        }
        log_sum += (v + tau).ln();
    }
    Ok((log_sum / values.len() as f64).exp() - tau)
}

/// One instance's solve outcome, as consumed by the comparison.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricsRow {
    pub instance: String,
    pub solved: bool,
    pub nodes: u64,
    pub time_s: f64,
    /// Relative optimality gap; `None` means unknown/unbounded.
    pub gap: Option<f64>,
}

/// Aggregates over the instances solved by both sides.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SolvedByBoth {
    pub count: usize,
    /// Shifted geometric mean of node counts (shift 100): [left, right].
    pub nodes_sgm: [f64; 2],
    /// Shifted geometric mean of times in seconds (shift 10): [left, right].
    pub time_sgm: [f64; 2],
}

/// Gap win counts over the instances solved by neither side.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SolvedByNeither {
    pub count: usize,
    pub gap_wins: [usize; 2],
    pub ties: usize,
}

/// Win counts over the instances solved by exactly one side.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SolvedByOne {
    pub left_only: usize,
    pub right_only: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CompareReport {
    pub instances: usize,
    pub both: SolvedByBoth,
    pub neither: SolvedByNeither,
    pub one: SolvedByOne,
}

pub const NODES_SHIFT: f64 = 100.0;
pub const TIME_SHIFT: f64 = 10.0;

/// Partitions paired rows into solved-by-both / neither / exactly-one and
/// aggregates each partition. Rows are matched by instance name; mismatched
/// sets are an error listing the difference.
pub fn compare_runs(left: &[MetricsRow], right: &[MetricsRow]) -> Result<CompareReport, MetricsError> {
    let names = |rows: &[MetricsRow]| -> Vec<String> {
        let mut v: Vec<String> = rows.iter().map(|r| r.instance.clone()).collect();
        v.sort();
        v
    };
    let left_names = names(left);
    let right_names = names(right);
    if left_names != right_names {
        let only_left: Vec<String> = left_names
            .iter()
            .filter(|n| !right_names.contains(n))
            .cloned()
            .collect();
        let only_right: Vec<String> = right_names
            .iter()
            .filter(|n| !left_names.contains(n))
            .cloned()
            .collect();
        return Err(MetricsError::InstanceSetMismatch {
            only_left,
            only_right,
        });
    }
    if left.is_empty() {
        return Err(MetricsError::EmptyInput);
    }

    let by_name = |rows: &[MetricsRow]| -> std::collections::BTreeMap<String, MetricsRow> {
        rows.iter().map(|r| (r.instance.clone(), r.clone())).collect()
    };
    let lmap = by_name(left);
    let rmap = by_name(right);

    let mut both_nodes: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let mut both_time: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let mut gap_wins = [0usize; 2];
    let mut gap_ties = 0usize;
    let mut neither = 0usize;
    let mut one = SolvedByOne {
        left_only: 0,
        right_only: 0,
    };

    for (name, l) in &lmap {
        let r = &rmap[name];
        match (l.solved, r.solved) {
            (true, true) => {
                both_nodes[0].push(l.nodes as f64);
                both_nodes[1].push(r.nodes as f64);
                both_time[0].push(l.time_s);
                both_time[1].push(r.time_s);
            }
            (false, false) => {
                neither += 1;
                match (l.gap, r.gap) {
                    (Some(a), Some(b)) if a < b => gap_wins[0] += 1,
                    (Some(a), Some(b)) if b < a => gap_wins[1] += 1,
                    (Some(_), Some(_)) | (None, None) => gap_ties += 1,
                    (Some(_), None) => gap_wins[0] += 1,
                    (None, Some(_)) => gap_wins[1] += 1,
                }
            }
            (true, false) => one.left_only += 1,
            (false, true) => one.right_only += 1,
        }
    }

    let sgm_pair = |vals: &[Vec<f64>; 2], tau: f64| -> [f64; 2] {
        if vals[0].is_empty() {
            [0.0, 0.0]
        } else {
            [
                shifted_geom_mean(&vals[0], tau).expect("non-negative inputs"),
                shifted_geom_mean(&vals[1], tau).expect("non-negative inputs"),
            ]
        }
    };

    Ok(CompareReport {
        instances: lmap.len(),
        both: SolvedByBoth {
            count: both_nodes[0].len(),
            nodes_sgm: sgm_pair(&both_nodes, NODES_SHIFT),
            time_sgm: sgm_pair(&both_time, TIME_SHIFT),
        },
        neither: SolvedByNeither {
            count: neither,
            gap_wins,
            ties: gap_ties,
        },
        one,
    })
}

/// Renders the comparison as a small CSV table.
pub fn compare_csv(report: &CompareReport, left_label: &str, right_label: &str) -> String {
    let mut out = String::new();
    out.push_str("metric,partition,");
    out.push_str(left_label);
    out.push(',');
    out.push_str(right_label);
    out.push('\n');
    out.push_str(&format!(
        "nodes_sgm,solved_by_both({}),{},{}\n",
        report.both.count, report.both.nodes_sgm[0], report.both.nodes_sgm[1]
    ));
    out.push_str(&format!(
        "time_sgm,solved_by_both({}),{},{}\n",
        report.both.count, report.both.time_sgm[0], report.both.time_sgm[1]
    ));
    out.push_str(&format!(
        "gap_wins,solved_by_neither({}),{},{}\n",
        report.neither.count, report.neither.gap_wins[0], report.neither.gap_wins[1]
    ));
    out.push_str(&format!(
        "solved,solved_by_one,{},{}\n",
        report.one.left_only, report.one.right_only
    ));
    out
}
