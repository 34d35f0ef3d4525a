//! Branch-and-bound: restricted candidate evaluation and a full solve mode.
//!
//! Candidate evaluation branches only on an ordered candidate set and scores
//! the resulting (possibly incomplete) tree with the tree-weight completion
//! measure: every fathomed node at depth d contributes 2^-d, so a finished
//! proof scores exactly 1. Leaves whose LP is fractional but where no
//! candidate variable is fractional are "stuck"; they contribute nothing and
//! their vertices feed the set-cover baseline.

use crate::config::{EvalLimits, Tolerances};
use crate::lp::{solve_lp, BoundDelta, LpError, LpSolution, LpStatus, RootLpCache};
use crate::mip::MipInstance;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;
use thiserror::Error;

/// Unit gain credited to a branching direction whose child LP is infeasible.
pub const INFEASIBLE_GAIN: f64 = 1e6;
/// Pseudocost product terms are clamped below by this before multiplying.
pub const EPS_PC: f64 = 1e-6;
/// Fathom-by-bound slack: a node closes when its bound reaches the incumbent
/// value minus this.
const BOUND_FATHOM_EPS: f64 = 1e-9;

/// An ordered candidate set of integer variables. Rank i is branched before
/// rank j > i whenever both are fractional.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Backdoor {
    vars: Vec<usize>,
}

impl Backdoor {
    /// Builds a candidate from an ordered variable list; duplicates are
    /// rejected.
    pub fn new(vars: Vec<usize>) -> Result<Self, BnbError> {
        for (i, &v) in vars.iter().enumerate() {
            if vars[..i].contains(&v) {
                return Err(BnbError::DuplicateCandidate { var: v });
            }
        }
        Ok(Self { vars })
    }

    pub fn empty() -> Self {
        Self { vars: Vec::new() }
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }
}

/// Terminal classification of a processed node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeStatus {
    Open,
    FathomedInfeasible,
    FathomedIntegral,
    FathomedByBound,
    Stuck,
}

/// Adds a fathomed node's 2^-depth weight; open and stuck nodes contribute
/// nothing.
pub fn tree_weight_update(current: f64, status: NodeStatus, depth: u32) -> f64 {
    match status {
        NodeStatus::FathomedInfeasible
        | NodeStatus::FathomedIntegral
        | NodeStatus::FathomedByBound => current + f64::exp2(-f64::from(depth)),
        NodeStatus::Open | NodeStatus::Stuck => current,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchDir {
    Down,
    Up,
}

/// One observed unit objective gain from a branching.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PcObservation {
    pub var: usize,
    pub dir: BranchDir,
    pub gain: f64,
}

/// Running per-variable averages of unit objective gains.
#[derive(Clone, Debug)]
pub struct PseudocostTable {
    down_sum: Vec<f64>,
    down_count: Vec<u64>,
    up_sum: Vec<f64>,
    up_count: Vec<u64>,
    initialized: Vec<bool>,
}

impl PseudocostTable {
    pub fn new(num_vars: usize) -> Self {
        Self {
            down_sum: vec![0.0; num_vars],
            down_count: vec![0; num_vars],
            up_sum: vec![0.0; num_vars],
            up_count: vec![0; num_vars],
            initialized: vec![false; num_vars],
        }
    }

    pub fn record(&mut self, var: usize, dir: BranchDir, gain: f64) {
        match dir {
            BranchDir::Down => {
                self.down_sum[var] += gain;
                self.down_count[var] += 1;
            }
            BranchDir::Up => {
                self.up_sum[var] += gain;
                self.up_count[var] += 1;
            }
        }
    }

    pub fn record_obs(&mut self, obs: &PcObservation) {
        self.record(obs.var, obs.dir, obs.gain);
    }

    pub fn mean_down(&self, var: usize) -> Option<f64> {
        (self.down_count[var] > 0).then(|| self.down_sum[var] / self.down_count[var] as f64)
    }

    pub fn mean_up(&self, var: usize) -> Option<f64> {
        (self.up_count[var] > 0).then(|| self.up_sum[var] / self.up_count[var] as f64)
    }

    pub fn is_initialized(&self, var: usize) -> bool {
        self.initialized[var]
    }

    pub fn mark_initialized(&mut self, var: usize) {
        self.initialized[var] = true;
    }
}

/// The pseudocost branching score: product of the down and up unit gains
/// scaled by the fractional distances, each clamped below by [`EPS_PC`] so a
/// zero side cannot annihilate the other.
pub fn pseudocost_score(table: &PseudocostTable, var: usize, x_j: f64) -> f64 {
    let f = x_j - x_j.floor();
    let down = (f * table.mean_down(var).unwrap_or(0.0)).max(EPS_PC);
    let up = ((1.0 - f) * table.mean_up(var).unwrap_or(0.0)).max(EPS_PC);
    down * up
}

/// A fractional LP vertex exported from a stuck leaf.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrontierVertex {
    pub x: Vec<f64>,
    /// Integer variables fractional at this vertex, ascending.
    pub frac_vars: Vec<usize>,
}

/// Outcome of a restricted branch-and-bound run on one candidate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalResult {
    pub tree_weight: f64,
    pub solved: bool,
    #[serde(rename = "nodes")]
    pub nodes_expanded: u64,
    #[serde(rename = "time_s")]
    pub wall_time_s: f64,
    pub truncated: bool,
    /// Best integer-feasible objective, reported in the caller's sense.
    pub incumbent_value: Option<f64>,
    pub pseudocost_obs: Vec<PcObservation>,
    pub frontier_vertices: Vec<FrontierVertex>,
}

#[derive(Debug, Error)]
pub enum BnbError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("candidate variable {var} is not an integer variable of the instance")]
    CandidateNotInteger { var: usize },
    #[error("candidate contains variable {var} twice")]
    DuplicateCandidate { var: usize },
    #[error("LP relaxation unbounded at a node; the instance is unsuitable for branch-and-bound")]
    UnboundedRelaxation,
}

struct NodeWork {
    delta: BoundDelta,
    depth: u32,
    parent_obj: f64,
    branch: Option<(usize, BranchDir, f64)>,
}

struct QueueEntry {
    bound: f64,
    seq: u64,
    work: NodeWork,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}
impl Eq for QueueEntry {}
impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for QueueEntry {
    // BinaryHeap is a max-heap; invert so the lowest bound pops first, FIFO
    // on ties.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn check_candidate(inst: &MipInstance, cand: &Backdoor) -> Result<(), BnbError> {
    for &v in cand.vars() {
        if !inst.integers.contains(&v) {
            return Err(BnbError::CandidateNotInteger { var: v });
        }
    }
    Ok(())
}

fn branch_children(
    entry: &QueueEntry,
    j: usize,
    lp: &LpSolution,
    seq: &mut u64,
) -> [QueueEntry; 2] {
    let x_j = lp.x[j];
    let f = x_j - x_j.floor();
    let down = QueueEntry {
        bound: lp.objective,
        seq: {
            *seq += 1;
            *seq
        },
        work: NodeWork {
            delta: entry.work.delta.clone().with(j, f64::NEG_INFINITY, x_j.floor()),
            depth: entry.work.depth + 1,
            parent_obj: lp.objective,
            branch: Some((j, BranchDir::Down, f)),
        },
    };
    let up = QueueEntry {
        bound: lp.objective,
        seq: {
            *seq += 1;
            *seq
        },
        work: NodeWork {
            delta: entry.work.delta.clone().with(j, x_j.ceil(), f64::INFINITY),
            depth: entry.work.depth + 1,
            parent_obj: lp.objective,
            branch: Some((j, BranchDir::Up, 1.0 - f)),
        },
    };
    [down, up]
}

/// Runs restricted branch-and-bound on `cand`.
///
/// At every node the branching variable is the lowest-rank candidate variable
/// fractional in the node LP; candidate variables integral at the node are
/// skipped, not consumed. Nodes fathom when the LP is infeasible, integral
/// over the full integer set, or bounded by the incumbent at processing time.
/// A node with fractional integers but no fractional candidate is stuck: it
/// contributes no weight and exports its vertex.
///
/// The result is a pure function of (instance, candidate, limits, config)
/// whenever the wall-clock limit does not fire; node-limit truncation is
/// deterministic.
pub fn evaluate_candidate(
    inst: &MipInstance,
    cache: &RootLpCache,
    cand: &Backdoor,
    limits: &EvalLimits,
    tol: &Tolerances,
) -> Result<EvalResult, BnbError> {
    check_candidate(inst, cand)?;
    let started = Instant::now();
    let root = cache.get_or_solve(inst, tol)?.clone();

    let mut weight = 0.0;
    let mut nodes: u64 = 0;
    let mut truncated = false;
    let mut stuck_leaves: u64 = 0;
    let mut incumbent: Option<f64> = None;
    let mut pc_obs: Vec<PcObservation> = Vec::new();
    let mut frontier: Vec<FrontierVertex> = Vec::new();

    let mut seq: u64 = 0;
    let mut heap = BinaryHeap::new();
    heap.push(QueueEntry {
        bound: f64::NEG_INFINITY,
        seq,
        work: NodeWork {
            delta: BoundDelta::new(),
            depth: 0,
            parent_obj: f64::NAN,
            branch: None,
        },
    });

    while let Some(entry) = heap.pop() {
        if nodes >= limits.max_nodes
            || limits
                .time_limit
                .is_some_and(|cap| started.elapsed() >= cap)
        {
            truncated = true;
            break;
        }
        nodes += 1;

        let lp = if entry.work.depth == 0 {
            root.clone()
        } else {
            let warm = (entry.work.depth == 1)
                .then(|| cache.root_basis())
                .flatten();
            solve_lp(inst, &entry.work.delta, warm, tol)?
        };

        if let Some((var, dir, dist)) = entry.work.branch {
            let gain = match lp.status {
                LpStatus::Optimal => ((lp.objective - entry.work.parent_obj) / dist).max(0.0),
                LpStatus::Infeasible => INFEASIBLE_GAIN,
                LpStatus::Unbounded => return Err(BnbError::UnboundedRelaxation),
            };
            pc_obs.push(PcObservation { var, dir, gain });
        }

        match lp.status {
            LpStatus::Infeasible => {
                weight = tree_weight_update(weight, NodeStatus::FathomedInfeasible, entry.work.depth);
            }
            LpStatus::Unbounded => return Err(BnbError::UnboundedRelaxation),
            LpStatus::Optimal => {
                if inst.is_integral(&lp.x, tol) {
                    weight =
                        tree_weight_update(weight, NodeStatus::FathomedIntegral, entry.work.depth);
                    if incumbent.is_none_or(|b| lp.objective < b) {
                        incumbent = Some(lp.objective);
                    }
                } else if incumbent.is_some_and(|b| lp.objective >= b - BOUND_FATHOM_EPS) {
                    weight =
                        tree_weight_update(weight, NodeStatus::FathomedByBound, entry.work.depth);
                } else {
                    let branch_var = cand
                        .vars()
                        .iter()
                        .copied()
                        .find(|&j| !tol.is_integral(lp.x[j]));
                    match branch_var {
                        None => {
                            stuck_leaves += 1;
                            frontier.push(FrontierVertex {
                                frac_vars: inst.fractional_integers(&lp.x, tol),
                                x: lp.x.clone(),
                            });
                        }
                        Some(j) => {
                            let [down, up] = branch_children(&entry, j, &lp, &mut seq);
                            heap.push(down);
                            heap.push(up);
                        }
                    }
                }
            }
        }
    }

    let solved = !truncated && stuck_leaves == 0;
    Ok(EvalResult {
        tree_weight: weight,
        solved,
        nodes_expanded: nodes,
        wall_time_s: started.elapsed().as_secs_f64(),
        truncated,
        incumbent_value: incumbent.map(|v| inst.reported_objective(v)),
        pseudocost_obs: pc_obs,
        frontier_vertices: frontier,
    })
}

/// Solves both child LPs of branching on `j` at a node and returns the unit
/// objective gains (down, up). An infeasible child yields [`INFEASIBLE_GAIN`].
pub fn strong_branching_init(
    inst: &MipInstance,
    node_delta: &BoundDelta,
    node_lp: &LpSolution,
    j: usize,
    tol: &Tolerances,
) -> Result<(f64, f64), BnbError> {
    let x_j = node_lp.x[j];
    let f = x_j - x_j.floor();
    let down_delta = node_delta.clone().with(j, f64::NEG_INFINITY, x_j.floor());
    let up_delta = node_delta.clone().with(j, x_j.ceil(), f64::INFINITY);
    let gain = |delta: &BoundDelta, dist: f64| -> Result<f64, BnbError> {
        let sol = solve_lp(inst, delta, None, tol)?;
        Ok(match sol.status {
            LpStatus::Optimal => ((sol.objective - node_lp.objective) / dist).max(0.0),
            LpStatus::Infeasible => INFEASIBLE_GAIN,
            LpStatus::Unbounded => return Err(BnbError::UnboundedRelaxation),
        })
    };
    Ok((gain(&down_delta, f)?, gain(&up_delta, 1.0 - f)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    LimitReached,
}

/// Result of a full branch-and-bound solve.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub nodes: u64,
    pub time_s: f64,
    /// Relative optimality gap at termination; `None` when no incumbent or
    /// no finite bound exists.
    pub gap: Option<f64>,
    /// Incumbent objective in the caller's sense.
    pub incumbent: Option<f64>,
}

/// Full branch-and-bound with optional branching priorities.
///
/// When a priority variable is fractional at a node, the lowest-rank one is
/// branched; otherwise pseudocost branching over the full integer set takes
/// over, with strong-branching initialization at the first node where a
/// variable is fractional.
pub fn solve_with_priorities(
    inst: &MipInstance,
    cache: &RootLpCache,
    priority: Option<&Backdoor>,
    limits: &EvalLimits,
    tol: &Tolerances,
) -> Result<SolveReport, BnbError> {
    if let Some(p) = priority {
        check_candidate(inst, p)?;
    }
    let started = Instant::now();
    let root = cache.get_or_solve(inst, tol)?.clone();

    let mut table = PseudocostTable::new(inst.num_vars());
    let mut nodes: u64 = 0;
    let mut truncated = false;
    let mut incumbent: Option<f64> = None;
    let mut seq: u64 = 0;
    let mut heap = BinaryHeap::new();
    heap.push(QueueEntry {
        bound: f64::NEG_INFINITY,
        seq,
        work: NodeWork {
            delta: BoundDelta::new(),
            depth: 0,
            parent_obj: f64::NAN,
            branch: None,
        },
    });
    let mut last_popped_bound = f64::NEG_INFINITY;

    while let Some(entry) = heap.pop() {
        if nodes >= limits.max_nodes
            || limits
                .time_limit
                .is_some_and(|cap| started.elapsed() >= cap)
        {
            // Put the bound back into consideration for the gap report.
            last_popped_bound = entry.bound;
            heap.push(entry);
            truncated = true;
            break;
        }
        nodes += 1;

        let lp = if entry.work.depth == 0 {
            root.clone()
        } else {
            let warm = (entry.work.depth == 1)
                .then(|| cache.root_basis())
                .flatten();
            solve_lp(inst, &entry.work.delta, warm, tol)?
        };

        if let Some((var, dir, dist)) = entry.work.branch {
            let gain = match lp.status {
                LpStatus::Optimal => ((lp.objective - entry.work.parent_obj) / dist).max(0.0),
                LpStatus::Infeasible => INFEASIBLE_GAIN,
                LpStatus::Unbounded => return Err(BnbError::UnboundedRelaxation),
            };
            table.record(var, dir, gain);
        }

        match lp.status {
            LpStatus::Infeasible => {}
            LpStatus::Unbounded => return Err(BnbError::UnboundedRelaxation),
            LpStatus::Optimal => {
                if inst.is_integral(&lp.x, tol) {
                    if incumbent.is_none_or(|b| lp.objective < b) {
                        incumbent = Some(lp.objective);
                    }
                } else if incumbent.is_some_and(|b| lp.objective >= b - BOUND_FATHOM_EPS) {
                    // fathomed by bound
                } else {
                    let priority_var = priority.and_then(|p| {
                        p.vars()
                            .iter()
                            .copied()
                            .find(|&j| !tol.is_integral(lp.x[j]))
                    });
                    let j = match priority_var {
                        Some(j) => j,
                        None => {
                            let frac = inst.fractional_integers(&lp.x, tol);
                            for &j in &frac {
                                if !table.is_initialized(j) {
                                    let (gd, gu) = strong_branching_init(
                                        inst,
                                        &entry.work.delta,
                                        &lp,
                                        j,
                                        tol,
                                    )?;
                                    table.record(j, BranchDir::Down, gd);
                                    table.record(j, BranchDir::Up, gu);
                                    table.mark_initialized(j);
                                }
                            }
                            let mut best = frac[0];
                            let mut best_score = f64::NEG_INFINITY;
                            for &j in &frac {
                                let s = pseudocost_score(&table, j, lp.x[j]);
                                if s > best_score {
                                    best_score = s;
                                    best = j;
                                }
                            }
                            best
                        }
                    };
                    let [down, up] = branch_children(&entry, j, &lp, &mut seq);
                    heap.push(down);
                    heap.push(up);
                }
            }
        }
    }

    let status = if truncated {
        SolveStatus::LimitReached
    } else if incumbent.is_some() {
        SolveStatus::Optimal
    } else {
        SolveStatus::Infeasible
    };
    let gap = match (truncated, incumbent) {
        (false, _) => Some(0.0),
        (true, Some(inc)) => {
            let best_bound = heap
                .iter()
                .map(|e| e.bound)
                .fold(last_popped_bound, f64::min);
            best_bound
                .is_finite()
                .then(|| (best_bound - inc).abs() / inc.abs().max(1e-10))
        }
        (true, None) => None,
    };
    Ok(SolveReport {
        status,
        nodes,
        time_s: started.elapsed().as_secs_f64(),
        gap,
        incumbent: incumbent.map(|v| inst.reported_objective(v)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mip::{Row, Sense};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn limits() -> EvalLimits {
        EvalLimits::with_nodes(10_000)
    }

    /// max 2x + y  s.t.  x + y <= 1,  x - y <= 0.5  (stored as min).
    /// Root vertex (0.75, 0.25) is fractional; {x} is a backdoor, {y} is not.
    fn corner_knapsack() -> MipInstance {
        MipInstance {
            name: "corner".into(),
            var_names: vec!["x".into(), "y".into()],
            objective: vec![-2.0, -1.0],
            rows: vec![
                Row {
                    name: "cap".into(),
                    coeffs: vec![(0, 1.0), (1, 1.0)],
                    sense: Sense::Le,
                    rhs: 1.0,
                },
                Row {
                    name: "cut".into(),
                    coeffs: vec![(0, 1.0), (1, -1.0)],
                    sense: Sense::Le,
                    rhs: 0.5,
                },
            ],
            lower: vec![0.0, 0.0],
            upper: vec![1.0, 1.0],
            integers: vec![0, 1],
            maximize_flipped: true,
        }
    }

    #[test]
    fn tree_weight_update_matches_geometric_weights() {
        assert_eq!(tree_weight_update(0.0, NodeStatus::FathomedIntegral, 0), 1.0);
        let w = tree_weight_update(0.0, NodeStatus::FathomedInfeasible, 2);
        let w = tree_weight_update(w, NodeStatus::FathomedByBound, 2);
        let w = tree_weight_update(w, NodeStatus::FathomedIntegral, 1);
        assert_eq!(w, 1.0);
        assert_eq!(tree_weight_update(0.25, NodeStatus::Stuck, 1), 0.25);
        assert_eq!(tree_weight_update(0.25, NodeStatus::Open, 1), 0.25);
    }

    #[test]
    fn pseudocost_score_is_the_clamped_product() {
        let mut table = PseudocostTable::new(3);
        table.record(0, BranchDir::Down, 2.0);
        table.record(0, BranchDir::Up, 2.0);
        assert!((pseudocost_score(&table, 0, 0.5) - 1.0).abs() < 1e-15);

        // One-sided zero clamps to EPS_PC: max(0.25*0, eps) * max(0.75*4, eps)
        let mut t2 = PseudocostTable::new(3);
        t2.record(1, BranchDir::Down, 0.0);
        t2.record(1, BranchDir::Up, 4.0);
        assert!((pseudocost_score(&t2, 1, 0.25) - 3e-6).abs() < 1e-18);

        // Integral value: the down term collapses to the clamp.
        let s = pseudocost_score(&table, 0, 1.0);
        assert!((s - EPS_PC * 2.0).abs() < 1e-12);
    }

    #[test]
    fn pseudocost_means_are_arithmetic_means() {
        let mut table = PseudocostTable::new(1);
        let gains = [0.5, 1.5, 4.0];
        for g in gains {
            table.record(0, BranchDir::Down, g);
        }
        let mean = gains.iter().sum::<f64>() / gains.len() as f64;
        assert_eq!(table.mean_down(0), Some(mean));
        assert_eq!(table.mean_up(0), None);
    }

    #[test]
    fn integral_root_solves_in_one_node() {
        // max x s.t. x <= 1: root LP is integral at x = 1.
        let inst = MipInstance {
            name: "one".into(),
            var_names: vec!["x".into()],
            objective: vec![-1.0],
            rows: vec![],
            lower: vec![0.0],
            upper: vec![1.0],
            integers: vec![0],
            maximize_flipped: true,
        };
        let cache = RootLpCache::new();
        let cand = Backdoor::new(vec![0]).unwrap();
        let res = evaluate_candidate(&inst, &cache, &cand, &limits(), &tol()).unwrap();
        assert!(res.solved);
        assert_eq!(res.tree_weight, 1.0);
        assert_eq!(res.nodes_expanded, 1);
        assert_eq!(res.incumbent_value, Some(1.0));
    }

    #[test]
    fn corner_knapsack_x_is_a_backdoor_y_is_not() {
        let inst = corner_knapsack();
        let cache = RootLpCache::new();

        // Candidate (x): x<=0 leaves y=1 integral at depth 1; x>=1 is
        // infeasible at depth 1. Tree weight 1/2 + 1/2 = 1.
        let res_x = evaluate_candidate(
            &inst,
            &cache,
            &Backdoor::new(vec![0]).unwrap(),
            &limits(),
            &tol(),
        )
        .unwrap();
        assert!(res_x.solved, "{res_x:?}");
        assert_eq!(res_x.tree_weight, 1.0);
        assert_eq!(res_x.nodes_expanded, 3);
        assert_eq!(res_x.incumbent_value, Some(1.0));

        // Candidate (y): the y<=0 child keeps x fractional at 0.5 and gets
        // stuck, so the weight stays strictly below 1.
        let res_y = evaluate_candidate(
            &inst,
            &cache,
            &Backdoor::new(vec![1]).unwrap(),
            &limits(),
            &tol(),
        )
        .unwrap();
        assert!(!res_y.solved);
        assert!(res_y.tree_weight < 1.0);
        assert_eq!(res_y.tree_weight, 0.5);
        assert_eq!(res_y.frontier_vertices.len(), 1);
        assert_eq!(res_y.frontier_vertices[0].frac_vars, vec![0]);
    }

    #[test]
    fn evaluation_is_reproducible() {
        let inst = corner_knapsack();
        let cache = RootLpCache::new();
        let cand = Backdoor::new(vec![1, 0]).unwrap();
        let a = evaluate_candidate(&inst, &cache, &cand, &limits(), &tol()).unwrap();
        let b = evaluate_candidate(&inst, &cache, &cand, &limits(), &tol()).unwrap();
        assert_eq!(a.tree_weight, b.tree_weight);
        assert_eq!(a.solved, b.solved);
        assert_eq!(a.nodes_expanded, b.nodes_expanded);
    }

    #[test]
    fn node_limit_truncates_with_partial_weight() {
        let inst = corner_knapsack();
        let cache = RootLpCache::new();
        let cand = Backdoor::new(vec![0, 1]).unwrap();
        let res =
            evaluate_candidate(&inst, &cache, &cand, &EvalLimits::with_nodes(1), &tol()).unwrap();
        assert!(res.truncated);
        assert!(!res.solved);
        assert!(res.tree_weight < 1.0);
    }

    #[test]
    fn empty_candidate_sticks_at_a_fractional_root() {
        let inst = corner_knapsack();
        let cache = RootLpCache::new();
        let res =
            evaluate_candidate(&inst, &cache, &Backdoor::empty(), &limits(), &tol()).unwrap();
        assert!(!res.solved);
        assert_eq!(res.tree_weight, 0.0);
        assert_eq!(res.nodes_expanded, 1);
        assert_eq!(res.frontier_vertices.len(), 1);
    }

    #[test]
    fn duplicate_candidate_variables_are_rejected() {
        assert!(matches!(
            Backdoor::new(vec![1, 1]),
            Err(BnbError::DuplicateCandidate { var: 1 })
        ));
    }

    #[test]
    fn candidate_outside_integer_set_is_rejected() {
        let mut inst = corner_knapsack();
        inst.integers = vec![0];
        inst.upper[1] = 1.0;
        let cache = RootLpCache::new();
        let cand = Backdoor::new(vec![1]).unwrap();
        assert!(matches!(
            evaluate_candidate(&inst, &cache, &cand, &limits(), &tol()),
            Err(BnbError::CandidateNotInteger { var: 1 })
        ));
    }

    #[test]
    fn full_solve_reaches_the_integer_optimum() {
        let inst = corner_knapsack();
        let cache = RootLpCache::new();
        let report = solve_with_priorities(&inst, &cache, None, &limits(), &tol()).unwrap();
        assert_eq!(report.status, SolveStatus::Optimal);
        // Binary optimum of max 2x + y under both rows is x=0, y=1.
        assert_eq!(report.incumbent, Some(1.0));
        assert_eq!(report.gap, Some(0.0));
        assert!(report.nodes >= 1);
    }

    #[test]
    fn infeasible_instance_reports_infeasible() {
        let mut inst = corner_knapsack();
        inst.rows.push(Row {
            name: "force".into(),
            coeffs: vec![(0, 1.0), (1, 1.0)],
            sense: Sense::Ge,
            rhs: 3.0,
        });
        let cache = RootLpCache::new();
        let report = solve_with_priorities(&inst, &cache, None, &limits(), &tol()).unwrap();
        assert_eq!(report.status, SolveStatus::Infeasible);
        assert!(report.nodes >= 1);
    }

    #[test]
    fn priority_branching_solves_with_the_backdoor_tree() {
        let inst = corner_knapsack();
        let cache = RootLpCache::new();
        let backdoor = Backdoor::new(vec![0]).unwrap();
        let with = solve_with_priorities(&inst, &cache, Some(&backdoor), &limits(), &tol())
            .unwrap();
        let without = solve_with_priorities(&inst, &cache, None, &limits(), &tol()).unwrap();
        assert_eq!(with.status, SolveStatus::Optimal);
        assert_eq!(without.status, SolveStatus::Optimal);
        assert_eq!(with.incumbent, without.incumbent);
        assert!(with.nodes <= without.nodes);
    }

    #[test]
    fn strong_branching_reports_unit_gains_per_direction() {
        let inst = corner_knapsack();
        let cache = RootLpCache::new();
        let root = cache.get_or_solve(&inst, &tol()).unwrap();
        let (gd, gu) = strong_branching_init(&inst, &BoundDelta::new(), root, 0, &tol()).unwrap();
        // Down child: x=0, best y=1 -> obj -1; parent -1.75; dist 0.75.
        assert!((gd - (0.75 / 0.75)).abs() < 1e-9);
        // Up child: x=1 needs y <= 0 (cap) and y >= 0.5 (cut): infeasible.
        assert_eq!(gu, INFEASIBLE_GAIN);
    }
}
