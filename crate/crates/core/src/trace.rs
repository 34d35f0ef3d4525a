//! Search trace and summary records.
//!
//! Every search method emits the same JSON-lines trace: one record per
//! improving candidate, plus a final summary object. With `workers == 1`
//! runs are bit-reproducible, so the wall-clock fields are reported as 0.0
//! there to keep output files byte-stable; `evals` is the deterministic
//! progress measure.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mcts,
    Biased,
    Setcover,
    Oracle,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Mcts => "mcts",
            Method::Biased => "biased",
            Method::Setcover => "setcover",
            Method::Oracle => "oracle",
        };
        f.write_str(s)
    }
}

/// One improving candidate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t_s: f64,
    /// Evaluations completed when this record was written.
    pub evals: u64,
    pub method: Method,
    pub candidate: Vec<usize>,
    pub tree_weight: f64,
    /// Nodes processed by the candidate's evaluation.
    pub nodes: u64,
    pub solved: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oversize: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// A candidate with tree weight 1 was found.
    Goal,
    Iterations,
    TimeLimit,
    /// No fractional integer variables at the root; nothing to search.
    Vacuous,
    /// Set cover reproduced the same candidate; no progress possible.
    FixedPoint,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchSummary {
    pub method: Method,
    pub instance: String,
    pub k: usize,
    pub seed: u64,
    pub workers: usize,
    pub best_candidate: Vec<usize>,
    pub best_tree_weight: f64,
    pub iterations: u64,
    pub evaluations: u64,
    pub wall_time_s: f64,
    pub stop_reason: StopReason,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oversize: Option<bool>,
}

/// A full search result: the improving trace plus the summary.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub summary: SearchSummary,
    pub trace: Vec<TraceRecord>,
}

/// Serializes records as JSON lines (one object per line).
pub fn to_jsonl(records: &[TraceRecord]) -> String {
    let mut out = String::new();
    for rec in records {
        out.push_str(&serde_json::to_string(rec).expect("trace records serialize"));
        out.push('\n');
    }
    out
}
