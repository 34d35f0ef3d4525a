//! Prior-art search strategies: biased fractionality sampling and greedy set
//! cover over fractional vertices.

use crate::bnb::{evaluate_candidate, Backdoor, BnbError, EvalResult};
use crate::lp::{LpStatus, RootLpCache};
use crate::mcts::{vacuous_outcome, SearchConfig, SearchError};
use crate::mip::{fractional_set, ActionSpace, MipInstance};
use crate::pool::{run_in_flight, EvalDriver};
use crate::seed::{stream_rng, Stream};
use crate::trace::{Method, SearchOutcome, SearchSummary, StopReason, TraceRecord};
use rand::Rng;
use std::collections::BTreeSet;
use std::time::Instant;

const DEFAULT_EVALUATIONS: u64 = 1000;
/// Tent-weight floor so every fractional variable keeps positive mass.
const WEIGHT_EPS: f64 = 1e-9;

/// Tent weight of a root value: largest at 0.5, falling off linearly toward
/// the integers.
fn tent_weight(value: f64) -> f64 {
    let frac = value - value.floor();
    0.5 - (frac - 0.5).abs() + WEIGHT_EPS
}

/// Samples an ordered candidate of up to `k` distinct variables; each draw
/// picks among the remaining variables with probability proportional to its
/// tent weight.
pub fn biased_sample(space: &ActionSpace, k: usize, rng: &mut impl Rng) -> Backdoor {
    let k_eff = k.min(space.frac_vars.len());
    let mut remaining: Vec<usize> = space.frac_vars.clone();
    let mut picked = Vec::with_capacity(k_eff);
    while picked.len() < k_eff {
        let weights: Vec<f64> = remaining
            .iter()
            .map(|&j| tent_weight(space.root_value(j)))
            .collect();
        let total: f64 = weights.iter().sum();
        let mut target = rng.gen::<f64>() * total;
        let mut chosen = remaining.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            target -= w;
            if target < 0.0 {
                chosen = i;
                break;
            }
        }
        picked.push(remaining.remove(chosen));
    }
    Backdoor::new(picked).expect("draws are distinct")
}

struct BiasedDriver<'a, F: FnMut(&TraceRecord)> {
    cfg: &'a SearchConfig,
    space: &'a ActionSpace,
    started: Instant,
    deterministic: bool,
    max_evaluations: u64,
    rng: rand_chacha::ChaCha8Rng,
    trace: Vec<TraceRecord>,
    best_weight: f64,
    best_candidate: Vec<usize>,
    issued: u64,
    evaluations: u64,
    stop_reason: StopReason,
    eval_error: Option<BnbError>,
    on_record: F,
}

impl<F: FnMut(&TraceRecord)> EvalDriver for BiasedDriver<'_, F> {
    type Job = Backdoor;
    type Out = Result<EvalResult, BnbError>;

    fn next(&mut self) -> Option<Backdoor> {
        if self.issued >= self.max_evaluations {
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
        self.issued += 1;
        Some(biased_sample(self.space, self.cfg.k, &mut self.rng))
    }

    fn apply(&mut self, job: Backdoor, out: Self::Out) -> bool {
        let res = match out {
            Ok(res) => res,
            Err(e) => {
                self.eval_error = Some(e);
                return false;
            }
        };
        self.evaluations += 1;
        if res.tree_weight > self.best_weight {
            self.best_weight = res.tree_weight;
            self.best_candidate = job.vars().to_vec();
            let rec = TraceRecord {
                t_s: if self.deterministic {
                    0.0
                } else {
                    self.started.elapsed().as_secs_f64()
                },
                evals: self.evaluations,
                method: Method::Biased,
                candidate: job.vars().to_vec(),
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

/// Repeated biased sampling with the same trace format and stopping rule as
/// the MCTS search.
pub fn run_biased_search(
    inst: &MipInstance,
    cache: &RootLpCache,
    cfg: &SearchConfig,
    mut on_record: impl FnMut(&TraceRecord),
) -> Result<SearchOutcome, SearchError> {
    let started = Instant::now();
    let deterministic = cfg.workers <= 1;
    let root_lp = cache.get_or_solve(inst, &cfg.tol)?.clone();
    if root_lp.status != LpStatus::Optimal {
        return vacuous_outcome(inst, cache, cfg, Method::Biased, started, &mut on_record);
    }
    let space = fractional_set(inst, &root_lp, cfg.tol.integrality)?;
    if space.frac_vars.is_empty() {
        return vacuous_outcome(inst, cache, cfg, Method::Biased, started, &mut on_record);
    }
    let max_evaluations = cfg.budget.max_iterations.unwrap_or(if cfg.budget.time_limit.is_some() {
        u64::MAX
    } else {
        DEFAULT_EVALUATIONS
    });

    let mut driver = BiasedDriver {
        cfg,
        space: &space,
        started,
        deterministic,
        max_evaluations,
        rng: stream_rng(cfg.seed, Stream::BiasedSampling),
        trace: Vec::new(),
        best_weight: f64::NEG_INFINITY,
        best_candidate: Vec::new(),
        issued: 0,
        evaluations: 0,
        stop_reason: StopReason::Iterations,
        eval_error: None,
        on_record: &mut on_record,
    };
    run_in_flight(cfg.workers, &mut driver, |cand: &Backdoor| {
        evaluate_candidate(inst, cache, cand, &cfg.eval_limits, &cfg.tol)
    });
    if let Some(e) = driver.eval_error {
        return Err(e.into());
    }

    let summary = SearchSummary {
        method: Method::Biased,
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
        iterations: driver.issued,
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

/// Fractional LP vertices harvested from stuck leaves, deduplicated by their
/// fractional-variable set.
#[derive(Clone, Debug, Default)]
pub struct FractionalVertexPool {
    /// (fractional-variable set, witness vertex), in insertion order.
    entries: Vec<(Vec<usize>, Vec<f64>)>,
}

impl FractionalVertexPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn frac_sets(&self) -> impl Iterator<Item = &[usize]> {
        self.entries.iter().map(|(s, _)| s.as_slice())
    }
}

/// Adds an evaluation's stuck-leaf vertices to the pool; vertices whose
/// fractional-variable set is already present are dropped.
pub fn collect_fractional_vertices(result: &EvalResult, pool: &mut FractionalVertexPool) {
    for vertex in &result.frontier_vertices {
        if vertex.frac_vars.is_empty() {
            continue;
        }
        let key = vertex.frac_vars.clone();
        if !pool.entries.iter().any(|(s, _)| *s == key) {
            pool.entries.push((key, vertex.x.clone()));
        }
    }
}

/// Greedy set cover: repeatedly take the variable fractional in the most
/// uncovered vertices (lowest index on ties) until every vertex is covered.
pub fn solve_scp_greedy(pool: &FractionalVertexPool) -> Backdoor {
    let mut uncovered: Vec<&Vec<usize>> = pool.entries.iter().map(|(s, _)| s).collect();
    let mut picked: Vec<usize> = Vec::new();
    while !uncovered.is_empty() {
        let mut counts: BTreeSet<usize> = BTreeSet::new();
        for set in &uncovered {
            counts.extend(set.iter().copied());
        }
        let best = counts
            .into_iter()
            .map(|v| {
                let c = uncovered.iter().filter(|s| s.contains(&v)).count();
                (v, c)
            })
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(v, _)| v)
            .expect("uncovered vertices have fractional variables");
        picked.push(best);
        uncovered.retain(|s| !s.contains(&best));
    }
    Backdoor::new(picked).expect("greedy never repeats a variable")
}

/// The set-cover search: evaluate the current candidate, harvest stuck
/// vertices, re-solve the cover, and repeat until the candidate proves the
/// instance, the cover stops changing, or the budget runs out. The final
/// candidate may exceed `k`; it is then flagged oversize.
///
/// The loop is inherently sequential (each cover depends on the previous
/// evaluation), so it ignores `workers`.
pub fn run_setcover(
    inst: &MipInstance,
    cache: &RootLpCache,
    cfg: &SearchConfig,
    mut on_record: impl FnMut(&TraceRecord),
) -> Result<SearchOutcome, SearchError> {
    let started = Instant::now();
    let root_lp = cache.get_or_solve(inst, &cfg.tol)?.clone();
    if root_lp.status != LpStatus::Optimal {
        return vacuous_outcome(inst, cache, cfg, Method::Setcover, started, &mut on_record);
    }
    let space = fractional_set(inst, &root_lp, cfg.tol.integrality)?;
    if space.frac_vars.is_empty() {
        return vacuous_outcome(inst, cache, cfg, Method::Setcover, started, &mut on_record);
    }
    let max_evaluations = cfg.budget.max_iterations.unwrap_or(if cfg.budget.time_limit.is_some() {
        u64::MAX
    } else {
        DEFAULT_EVALUATIONS
    });

    let mut pool = FractionalVertexPool::new();
    let mut candidate = Backdoor::empty();
    let mut trace: Vec<TraceRecord> = Vec::new();
    let mut best_weight = f64::NEG_INFINITY;
    let mut best_candidate: Vec<usize> = Vec::new();
    let mut evaluations: u64 = 0;

    let stop_reason = loop {
        if evaluations >= max_evaluations {
            break StopReason::Iterations;
        }
        if cfg
            .budget
            .time_limit
            .is_some_and(|cap| started.elapsed() >= cap)
        {
            break StopReason::TimeLimit;
        }
        let res = evaluate_candidate(inst, cache, &candidate, &cfg.eval_limits, &cfg.tol)
            .map_err(SearchError::from)?;
        evaluations += 1;
        if res.tree_weight > best_weight {
            best_weight = res.tree_weight;
            best_candidate = candidate.vars().to_vec();
            let rec = TraceRecord {
                t_s: 0.0,
                evals: evaluations,
                method: Method::Setcover,
                candidate: candidate.vars().to_vec(),
                tree_weight: res.tree_weight,
                nodes: res.nodes_expanded,
                solved: res.solved,
                oversize: Some(candidate.len() > cfg.k),
            };
            on_record(&rec);
            trace.push(rec);
        }
        if res.solved && res.tree_weight >= 1.0 {
            break StopReason::Goal;
        }
        collect_fractional_vertices(&res, &mut pool);
        let next = solve_scp_greedy(&pool);
        if next == candidate {
            break StopReason::FixedPoint;
        }
        candidate = next;
    };

    let oversize = candidate.len() > cfg.k;
    let summary = SearchSummary {
        method: Method::Setcover,
        instance: inst.name.clone(),
        k: cfg.k,
        seed: cfg.seed,
        workers: 1,
        best_candidate,
        best_tree_weight: if best_weight.is_finite() { best_weight } else { 0.0 },
        iterations: evaluations,
        evaluations,
        wall_time_s: 0.0,
        stop_reason,
        oversize: Some(oversize),
    };
    Ok(SearchOutcome { summary, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bnb::FrontierVertex;
    use crate::lp::{Basis, LpSolution};
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space_with(values: &[(usize, f64)]) -> ActionSpace {
        let n = values.iter().map(|&(j, _)| j).max().unwrap() + 1;
        let mut x = vec![0.0; n];
        for &(j, v) in values {
            x[j] = v;
        }
        ActionSpace {
            frac_vars: values.iter().map(|&(j, _)| j).collect(),
            root: LpSolution {
                status: LpStatus::Optimal,
                x,
                objective: 0.0,
                basis: Basis::default(),
                iterations: 0,
            },
        }
    }

    #[test]
    fn tent_weight_peaks_at_half() {
        assert!(tent_weight(0.5) > tent_weight(0.9));
        assert!(tent_weight(0.1) < tent_weight(0.3));
        assert!(tent_weight(0.999) > 0.0);
    }

    #[test]
    fn biased_sample_prefers_the_half_fractional_variable() {
        let space = space_with(&[(0, 0.5), (1, 0.999)]);
        let mut counts = [0u32; 2];
        for seed in 0..10_000 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cand = biased_sample(&space, 1, &mut rng);
            counts[cand.vars()[0]] += 1;
        }
        // P(var 0) = w0 / (w0 + w1) = 0.5 / 0.501 -> about 0.998.
        let p0 = counts[0] as f64 / 10_000.0;
        assert!(p0 > 0.99, "observed {p0}");
    }

    #[test]
    fn equal_weights_sample_uniformly() {
        let space = space_with(&[(0, 0.5), (1, 0.5), (2, 0.5)]);
        let mut counts = [0u32; 3];
        for seed in 0..9_000 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            counts[biased_sample(&space, 1, &mut rng).vars()[0]] += 1;
        }
        // Chi-square, 2 dof, p > 0.01 means stat < 9.210.
        let stat: f64 = counts
            .iter()
            .map(|&c| (c as f64 - 3000.0).powi(2) / 3000.0)
            .sum();
        assert!(stat < 9.210, "chi-square stat {stat} (counts {counts:?})");
    }

    #[test]
    fn oversized_k_yields_a_full_permutation() {
        let space = space_with(&[(2, 0.4), (5, 0.6), (9, 0.5)]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cand = biased_sample(&space, 10, &mut rng);
        let mut vars = cand.vars().to_vec();
        vars.sort_unstable();
        assert_eq!(vars, vec![2, 5, 9]);
    }

    #[test]
    fn sample_never_repeats_variables() {
        let space = space_with(&[(0, 0.3), (1, 0.5), (2, 0.7), (3, 0.5)]);
        for seed in 0..500 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cand = biased_sample(&space, 4, &mut rng);
            let mut vars = cand.vars().to_vec();
            vars.sort_unstable();
            vars.dedup();
            assert_eq!(vars.len(), 4);
        }
    }

    fn eval_with_vertices(sets: &[&[usize]]) -> EvalResult {
        EvalResult {
            tree_weight: 0.5,
            solved: false,
            nodes_expanded: 1,
            wall_time_s: 0.0,
            truncated: false,
            incumbent_value: None,
            pseudocost_obs: vec![],
            frontier_vertices: sets
                .iter()
                .map(|s| FrontierVertex {
                    x: vec![0.5; 4],
                    frac_vars: s.to_vec(),
                })
                .collect(),
        }
    }

    #[test]
    fn vertex_pool_dedupes_by_fractional_set() {
        let mut pool = FractionalVertexPool::new();
        collect_fractional_vertices(&eval_with_vertices(&[&[1, 2], &[2, 3], &[1, 2]]), &mut pool);
        assert_eq!(pool.len(), 2);
        collect_fractional_vertices(&eval_with_vertices(&[&[2, 3]]), &mut pool);
        assert_eq!(pool.len(), 2);
        collect_fractional_vertices(&eval_with_vertices(&[&[3]]), &mut pool);
        assert_eq!(pool.len(), 3);
    }

    #[test]
    fn solved_results_leave_the_pool_unchanged() {
        let mut pool = FractionalVertexPool::new();
        let mut res = eval_with_vertices(&[]);
        res.solved = true;
        res.tree_weight = 1.0;
        collect_fractional_vertices(&res, &mut pool);
        assert!(pool.is_empty());
    }

    #[test]
    fn greedy_cover_picks_the_common_variable() {
        let mut pool = FractionalVertexPool::new();
        collect_fractional_vertices(&eval_with_vertices(&[&[1, 2], &[2, 3]]), &mut pool);
        let cover = solve_scp_greedy(&pool);
        assert_eq!(cover.vars(), &[2]);
    }

    #[test]
    fn singleton_vertex_forces_its_variable() {
        let mut pool = FractionalVertexPool::new();
        collect_fractional_vertices(&eval_with_vertices(&[&[3]]), &mut pool);
        assert_eq!(solve_scp_greedy(&pool).vars(), &[3]);
    }

    #[test]
    fn greedy_cover_always_covers_everything() {
        let sets: Vec<Vec<usize>> = vec![vec![0, 1], vec![1, 2], vec![3], vec![0, 3]];
        let mut pool = FractionalVertexPool::new();
        let refs: Vec<&[usize]> = sets.iter().map(|s| s.as_slice()).collect();
        collect_fractional_vertices(&eval_with_vertices(&refs), &mut pool);
        let cover = solve_scp_greedy(&pool);
        for set in pool.frac_sets() {
            assert!(
                set.iter().any(|v| cover.vars().contains(v)),
                "uncovered set {set:?}"
            );
        }
    }
}
