//! Monte Carlo tree search over ordered candidate sets.
//!
//! States are ordered sequences of distinct fractional root variables, up to
//! an effective size cap; terminal states are candidate backdoors, evaluated
//! by restricted branch-and-bound with the tree weight as reward. Selection
//! blends a UCT-style score (optionally variance-capped like UCB1-Tuned)
//! with a normalized global pseudocost score per variable.

use crate::bnb::{evaluate_candidate, Backdoor, BnbError, PcObservation, PseudocostTable};
use crate::config::{EvalLimits, Tolerances};
use crate::lp::{LpError, LpStatus, RootLpCache};
use crate::mip::{fractional_set, ActionSpace, MipError, MipInstance};
use crate::pool::run_in_flight;
use crate::seed::{stream_rng, Stream};
use crate::trace::{Method, SearchOutcome, SearchSummary, StopReason, TraceRecord};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::{Duration, Instant};
use thiserror::Error;

/// Backpropagation rule: accumulate rewards or track the maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backup {
    Sum,
    Max,
}

/// Expansion rule: uniform over unexpanded actions, or the largest global
/// pseudocost score.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expansion {
    Uniform,
    BestScore,
}

/// Selection/expansion hyperparameters. Defaults are the configuration that
/// scored best in tuning: max backup, best-score expansion, variance on,
/// alpha 0.01, C = 1.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SelectionParams {
    /// Weight of the global pseudocost score in the convex blend, in [0, 1).
    pub alpha_pc: f64,
    /// Exploration weight, > 0.
    pub c: f64,
    /// Use the variance-capped exploration factor.
    pub use_variance: bool,
    pub backup: Backup,
    pub expansion: Expansion,
}

impl Default for SelectionParams {
    fn default() -> Self {
        Self {
            alpha_pc: 0.01,
            c: 1.0,
            use_variance: true,
            backup: Backup::Max,
            expansion: Expansion::BestScore,
        }
    }
}

/// Visit and reward statistics of one tree node.
#[derive(Clone, Copy, Debug, Default)]
pub struct NodeStats {
    pub visits: u64,
    pub reward_sum: f64,
    pub reward_sq_sum: f64,
    pub reward_max: f64,
}

impl NodeStats {
    fn absorb(&mut self, reward: f64) {
        self.visits += 1;
        self.reward_sum += reward;
        self.reward_sq_sum += reward * reward;
        self.reward_max = self.reward_max.max(reward);
    }

    /// Mean observed reward.
    pub fn mean(&self) -> f64 {
        if self.visits == 0 {
            0.0
        } else {
            self.reward_sum / self.visits as f64
        }
    }

    /// Population variance of observed rewards, clamped at zero.
    pub fn variance(&self) -> f64 {
        if self.visits == 0 {
            return 0.0;
        }
        let mean = self.mean();
        (self.reward_sq_sum / self.visits as f64 - mean * mean).max(0.0)
    }
}

/// A search tree node; children are keyed by the appended variable.
#[derive(Clone, Debug, Default)]
pub struct MctsNode {
    pub stats: NodeStats,
    pub children: BTreeMap<usize, MctsNode>,
}

impl MctsNode {
    pub fn new() -> Self {
        Self::default()
    }
}

/// The selection score of a child with the given statistics.
///
/// EXP = sqrt(ln(T_parent)/T_child); VAR = sqrt(min(1/4, sigma^2 + EXP));
/// the UCT term is mu + C*EXP, or mu + C*EXP*VAR with variance enabled, and
/// the result blends (1 - alpha)*UCT + alpha*pc_norm.
pub fn selection_score(
    parent_visits: u64,
    child: &NodeStats,
    params: &SelectionParams,
    pc_norm: f64,
) -> f64 {
    debug_assert!(child.visits >= 1 && parent_visits >= 1);
    let mu = match params.backup {
        Backup::Sum => child.mean(),
        Backup::Max => child.reward_max,
    };
    let exp = ((parent_visits as f64).ln() / child.visits as f64).sqrt();
    let uct = if params.use_variance {
        let var = (0.25f64.min(child.variance() + exp)).sqrt();
        mu + params.c * exp * var
    } else {
        mu + params.c * exp
    };
    (1.0 - params.alpha_pc) * uct + params.alpha_pc * pc_norm
}

/// Scores `child` under `parent` for the action whose normalized global
/// pseudocost score is `pc_norm`.
pub fn score_child(
    parent: &MctsNode,
    child: &MctsNode,
    params: &SelectionParams,
    pc_norm: f64,
) -> f64 {
    selection_score(parent.stats.visits, &child.stats, params, pc_norm)
}

/// Per-variable running mean of pseudocost scores across candidate
/// evaluations.
#[derive(Clone, Debug, Default)]
pub struct GlobalPcScores {
    sums: BTreeMap<usize, (f64, u64)>,
}

impl GlobalPcScores {
    pub fn new() -> Self {
        Self::default()
    }

    /// Folds one evaluation's observations in: per variable, the evaluation's
    /// own gain averages are turned into a pseudocost score at the root LP
    /// point, and that score extends the variable's running mean.
    pub fn merge_eval(&mut self, obs: &[PcObservation], root_x: &[f64]) {
        if obs.is_empty() {
            return;
        }
        let mut local = PseudocostTable::new(root_x.len());
        let mut touched: Vec<usize> = Vec::new();
        for o in obs {
            local.record_obs(o);
            if !touched.contains(&o.var) {
                touched.push(o.var);
            }
        }
        touched.sort_unstable();
        for var in touched {
            let score = crate::bnb::pseudocost_score(&local, var, root_x[var]);
            let entry = self.sums.entry(var).or_insert((0.0, 0));
            entry.0 += score;
            entry.1 += 1;
        }
    }

    /// Running mean score of a variable, when observed.
    pub fn mean(&self, var: usize) -> Option<f64> {
        self.sums.get(&var).map(|&(sum, n)| sum / n as f64)
    }

    /// Min-max normalized scores over `vars`, mapped to [0, 1]. Variables
    /// without observations take the median of observed scores first; with
    /// no spread (or no data) everything maps to 0.5.
    pub fn normalized(&self, vars: &[usize]) -> BTreeMap<usize, f64> {
        let mut observed: Vec<f64> = vars.iter().filter_map(|&v| self.mean(v)).collect();
        if observed.is_empty() {
            return vars.iter().map(|&v| (v, 0.5)).collect();
        }
        observed.sort_by(f64::total_cmp);
        let median = {
            let n = observed.len();
            if n % 2 == 1 {
                observed[n / 2]
            } else {
                0.5 * (observed[n / 2 - 1] + observed[n / 2])
            }
        };
        let raw: Vec<(usize, f64)> = vars
            .iter()
            .map(|&v| (v, self.mean(v).unwrap_or(median)))
            .collect();
        let lo = raw.iter().map(|&(_, s)| s).fold(f64::INFINITY, f64::min);
        let hi = raw.iter().map(|&(_, s)| s).fold(f64::NEG_INFINITY, f64::max);
        if hi - lo <= 0.0 {
            return vars.iter().map(|&v| (v, 0.5)).collect();
        }
        raw.into_iter().map(|(v, s)| (v, (s - lo) / (hi - lo))).collect()
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Bnb(#[from] BnbError),
    #[error(transparent)]
    Mip(#[from] MipError),
}

/// Wall-clock and iteration budget for a search. With neither set, a default
/// of 1000 iterations applies.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_iterations: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl SearchBudget {
    pub fn iterations(n: u64) -> Self {
        Self {
            max_iterations: Some(n),
            time_limit: None,
        }
    }
}

const DEFAULT_ITERATIONS: u64 = 1000;

/// Everything a search run needs besides the instance.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub k: usize,
    pub params: SelectionParams,
    pub budget: SearchBudget,
    pub workers: usize,
    pub seed: u64,
    pub eval_limits: EvalLimits,
    pub tol: Tolerances,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            k: 8,
            params: SelectionParams::default(),
            budget: SearchBudget::default(),
            workers: 1,
            seed: 0,
            eval_limits: EvalLimits::default(),
            tol: Tolerances::default(),
        }
    }
}

/// Descends from the root through fully expanded nodes, picking the argmax
/// selection score (unvisited children first, lowest variable on ties), and
/// returns the action path. Stops at a terminal, or at the first node with
/// unexpanded actions.
pub fn select(
    root: &MctsNode,
    frac_vars: &[usize],
    k_eff: usize,
    params: &SelectionParams,
    pc_norm: &BTreeMap<usize, f64>,
) -> Vec<usize> {
    let mut path = Vec::new();
    let mut node = root;
    loop {
        if path.len() == k_eff {
            return path;
        }
        let available = frac_vars.iter().filter(|v| !path.contains(v)).count();
        if node.children.len() < available {
            return path;
        }
        let mut best: Option<(usize, f64)> = None;
        for (&action, child) in &node.children {
            let score = if child.stats.visits == 0 {
                f64::INFINITY
            } else {
                score_child(node, child, params, pc_norm[&action])
            };
            if best.is_none_or(|(_, bs)| score > bs) {
                best = Some((action, score));
            }
        }
        let (action, _) = best.expect("non-terminal nodes have actions");
        path.push(action);
        node = &node.children[&action];
    }
}

#[derive(Debug, Error)]
#[error("every action is already expanded")]
pub struct NoActionsLeft;

/// Creates one new child under the node at `path` and returns its action.
/// Uniform expansion samples the action; best-score takes the largest
/// normalized pseudocost score (lowest variable on ties).
pub fn expand(
    root: &mut MctsNode,
    path: &[usize],
    frac_vars: &[usize],
    params: &SelectionParams,
    pc_norm: &BTreeMap<usize, f64>,
    rng: &mut impl Rng,
) -> Result<usize, NoActionsLeft> {
    let mut node = &mut *root;
    for action in path {
        node = node.children.get_mut(action).expect("path exists");
    }
    let unexpanded: Vec<usize> = frac_vars
        .iter()
        .copied()
        .filter(|v| !path.contains(v) && !node.children.contains_key(v))
        .collect();
    if unexpanded.is_empty() {
        return Err(NoActionsLeft);
    }
    let action = match params.expansion {
        Expansion::Uniform => unexpanded[rng.gen_range(0..unexpanded.len())],
        Expansion::BestScore => {
            let mut best = unexpanded[0];
            let mut best_score = f64::NEG_INFINITY;
            for &v in &unexpanded {
                let s = pc_norm[&v];
                if s > best_score {
                    best_score = s;
                    best = v;
                }
            }
            best
        }
    };
    node.children.insert(action, MctsNode::new());
    Ok(action)
}

/// Random rollout: extends the sequence with distinct fractional variables
/// until terminal. The rollout is not added to the tree.
pub fn simulate(seq: &[usize], frac_vars: &[usize], k_eff: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut seq = seq.to_vec();
    let mut remaining: Vec<usize> = frac_vars
        .iter()
        .copied()
        .filter(|v| !seq.contains(v))
        .collect();
    while seq.len() < k_eff {
        let i = rng.gen_range(0..remaining.len());
        seq.push(remaining.swap_remove(i));
    }
    seq
}

/// Adds a reward along the path from the root (inclusive).
pub fn backpropagate(root: &mut MctsNode, path: &[usize], reward: f64) {
    debug_assert!((0.0..=1.0).contains(&reward));
    let mut node = &mut *root;
    node.stats.absorb(reward);
    for action in path {
        node = node.children.get_mut(action).expect("path exists");
        node.stats.absorb(reward);
    }
}

pub(crate) struct RolloutJob {
    path: Vec<usize>,
    candidate: Vec<usize>,
}

struct MctsDriver<'a, F: FnMut(&TraceRecord)> {
    cfg: &'a SearchConfig,
    space: &'a ActionSpace,
    k_eff: usize,
    started: Instant,
    deterministic: bool,
    max_iterations: Option<u64>,
    rng: rand_chacha::ChaCha8Rng,
    tree: MctsNode,
    pc: GlobalPcScores,
    trace: Vec<TraceRecord>,
    best_weight: f64,
    best_candidate: Vec<usize>,
    iterations: u64,
    evaluations: u64,
    stop_reason: StopReason,
    eval_error: Option<BnbError>,
    on_record: F,
}

impl<F: FnMut(&TraceRecord)> crate::pool::EvalDriver for MctsDriver<'_, F> {
    type Job = RolloutJob;
    type Out = Result<crate::bnb::EvalResult, BnbError>;

    fn next(&mut self) -> Option<RolloutJob> {
        if self.max_iterations.is_some_and(|cap| self.iterations >= cap) {
            self.stop_reason = StopReason::Iterations;
            return None;
        }
        if self
            .cfg
            .budget
            .time_limit
            .is_some_and(|cap| self.started.elapsed() >= cap)
        {
            self.stop_reason = StopReason::TimeLimit;
            return None;
        }
        self.iterations += 1;
        let pc_norm = self.pc.normalized(&self.space.frac_vars);
        let mut path = select(
            &self.tree,
            &self.space.frac_vars,
            self.k_eff,
            &self.cfg.params,
            &pc_norm,
        );
        if path.len() < self.k_eff {
            let action = expand(
                &mut self.tree,
                &path,
                &self.space.frac_vars,
                &self.cfg.params,
                &pc_norm,
                &mut self.rng,
            )
            .expect("selection stopped at an expandable node");
            path.push(action);
        }
        let candidate = simulate(&path, &self.space.frac_vars, self.k_eff, &mut self.rng);
        Some(RolloutJob { path, candidate })
    }

    fn apply(&mut self, job: RolloutJob, out: Self::Out) -> bool {
        let res = match out {
            Ok(res) => res,
            Err(e) => {
                self.eval_error = Some(e);
                return false;
            }
        };
        self.evaluations += 1;
        self.pc.merge_eval(&res.pseudocost_obs, &self.space.root.x);
        backpropagate(&mut self.tree, &job.path, res.tree_weight);
        if res.tree_weight > self.best_weight {
            self.best_weight = res.tree_weight;
            self.best_candidate = job.candidate.clone();
            let rec = TraceRecord {
                t_s: if self.deterministic {
                    0.0
                } else {
                    self.started.elapsed().as_secs_f64()
                },
                evals: self.evaluations,
                method: Method::Mcts,
                candidate: job.candidate,
                tree_weight: res.tree_weight,
                nodes: res.nodes_expanded,
                solved: res.solved,
                oversize: None,
            };
            (self.on_record)(&rec);
            self.trace.push(rec);
        }
        if res.solved && res.tree_weight >= 1.0 {
            self.stop_reason = StopReason::Goal;
            return false;
        }
        true
    }
}

/// The full search loop: select, expand, simulate, evaluate, backpropagate,
/// with up to `workers` candidate evaluations in flight. Improving
/// candidates stream through `on_record`. Stops at a tree-weight-1 candidate
/// or on budget exhaustion.
pub fn run_search(
    inst: &MipInstance,
    cache: &RootLpCache,
    cfg: &SearchConfig,
    mut on_record: impl FnMut(&TraceRecord),
) -> Result<SearchOutcome, SearchError> {
    let started = Instant::now();
    let deterministic = cfg.workers <= 1;
    let root_lp = cache.get_or_solve(inst, &cfg.tol)?.clone();
    if root_lp.status != LpStatus::Optimal {
        // Infeasible root: the empty candidate already carries the proof.
        return vacuous_outcome(inst, cache, cfg, Method::Mcts, started, &mut on_record);
    }
    let space = fractional_set(inst, &root_lp, cfg.tol.integrality)?;
    if space.frac_vars.is_empty() {
        return vacuous_outcome(inst, cache, cfg, Method::Mcts, started, &mut on_record);
    }
    let k_eff = cfg.k.min(space.frac_vars.len());
    let max_iterations = match (cfg.budget.max_iterations, cfg.budget.time_limit) {
        (None, None) => Some(DEFAULT_ITERATIONS),
        (iters, _) => iters,
    };

    let mut driver = MctsDriver {
        cfg,
        space: &space,
        k_eff,
        started,
        deterministic,
        max_iterations,
        rng: stream_rng(cfg.seed, Stream::MctsSearch),
        tree: MctsNode::new(),
        pc: GlobalPcScores::new(),
        trace: Vec::new(),
        best_weight: f64::NEG_INFINITY,
        best_candidate: Vec::new(),
        iterations: 0,
        evaluations: 0,
        stop_reason: StopReason::Iterations,
        eval_error: None,
        on_record: &mut on_record,
    };
    run_in_flight(cfg.workers, &mut driver, |job: &RolloutJob| {
        let cand = Backdoor::new(job.candidate.clone()).expect("rollouts are distinct");
        evaluate_candidate(inst, cache, &cand, &cfg.eval_limits, &cfg.tol)
    });
    if let Some(e) = driver.eval_error {
        return Err(e.into());
    }

    let summary = SearchSummary {
        method: Method::Mcts,
        instance: inst.name.clone(),
        k: cfg.k,
        seed: cfg.seed,
        workers: cfg.workers,
        best_candidate: driver.best_candidate,
        best_tree_weight: if driver.best_weight.is_finite() {
            driver.best_weight
        } else {
            0.0
        },
        iterations: driver.iterations,
        evaluations: driver.evaluations,
        wall_time_s: if deterministic {
            0.0
        } else {
            started.elapsed().as_secs_f64()
        },
        stop_reason: driver.stop_reason,
        oversize: None,
    };
    Ok(SearchOutcome {
        summary,
        trace: driver.trace,
    })
}

/// Shared handling for instances with nothing to search: the empty candidate
/// is evaluated once (root integral or infeasible both yield weight 1).
pub(crate) fn vacuous_outcome(
    inst: &MipInstance,
    cache: &RootLpCache,
    cfg: &SearchConfig,
    method: Method,
    started: Instant,
    on_record: &mut impl FnMut(&TraceRecord),
) -> Result<SearchOutcome, SearchError> {
    let deterministic = cfg.workers <= 1;
    let res = evaluate_candidate(inst, cache, &Backdoor::empty(), &cfg.eval_limits, &cfg.tol)?;
    let rec = TraceRecord {
        t_s: 0.0,
        evals: 1,
        method,
        candidate: Vec::new(),
        tree_weight: res.tree_weight,
        nodes: res.nodes_expanded,
        solved: res.solved,
        oversize: None,
    };
    on_record(&rec);
    let summary = SearchSummary {
        method,
        instance: inst.name.clone(),
        k: cfg.k,
        seed: cfg.seed,
        workers: cfg.workers,
        best_candidate: Vec::new(),
        best_tree_weight: res.tree_weight,
        iterations: 0,
        evaluations: 1,
        wall_time_s: if deterministic {
            0.0
        } else {
            started.elapsed().as_secs_f64()
        },
        stop_reason: StopReason::Vacuous,
        oversize: None,
    };
    Ok(SearchOutcome {
        summary,
        trace: vec![rec],
    })
}

/// Action space of an instance: the fractional root variables. Exposed for
/// callers that need the same view the search uses.
pub fn action_space(
    inst: &MipInstance,
    cache: &RootLpCache,
    tol: &Tolerances,
) -> Result<ActionSpace, SearchError> {
    let root = cache.get_or_solve(inst, tol)?;
    Ok(fractional_set(inst, root, tol.integrality)?)
}
