//! Brute-force ground truth on tiny instances: enumerate every ordered
//! candidate up to size K, evaluate each, and certify the best achievable
//! tree weight.

use crate::bnb::{evaluate_candidate, Backdoor, BnbError, EvalResult};
use crate::config::{EvalLimits, Tolerances};
use crate::lp::{LpStatus, RootLpCache};
use crate::mcts::SearchError;
use crate::mip::{fractional_set, MipInstance};
use crate::pool::{run_in_flight, EvalDriver};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Enumeration guardrail; the candidate count grows as sum of P(n, k).
#[derive(Clone, Copy, Debug)]
pub struct OracleGuard {
    pub max_frac: usize,
    pub max_k: usize,
}

impl Default for OracleGuard {
    fn default() -> Self {
        Self {
            max_frac: 12,
            max_k: 4,
        }
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("enumeration too large: {frac} fractional variables at k = {k} exceeds the guardrail")]
    TooLarge { frac: usize, k: usize },
    #[error(transparent)]
    Bnb(#[from] BnbError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Iterator over every nonempty ordered sequence of at most `k` distinct
/// variables, ordered by length and lexicographically within a length.
pub fn enumerate_candidates(vars: &[usize], k: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    let k_eff = k.min(vars.len());
    (1..=k_eff).flat_map(move |len| Permutations::new(vars, len))
}

/// Odometer over length-`len` permutations of `vars`, lexicographic in the
/// positions of `vars` (which callers keep sorted).
struct Permutations<'a> {
    vars: &'a [usize],
    idx: Vec<usize>,
    done: bool,
}

impl<'a> Permutations<'a> {
    fn new(vars: &'a [usize], len: usize) -> Self {
        let mut idx = Vec::with_capacity(len);
        let mut used = vec![false; vars.len()];
        for _ in 0..len {
            let next = used.iter().position(|u| !u).expect("len <= vars");
            used[next] = true;
            idx.push(next);
        }
        Self {
            vars,
            idx,
            done: vars.is_empty() || len == 0 || len > vars.len(),
        }
    }

    fn advance(&mut self) {
        let n = self.vars.len();
        let len = self.idx.len();
        let mut pos = len;
        loop {
            if pos == 0 {
                self.done = true;
                return;
            }
            pos -= 1;
            let mut used = vec![false; n];
            for &i in &self.idx[..pos] {
                used[i] = true;
            }
            // Smallest unused index after the current one at this position.
            let cur = self.idx[pos];
            if let Some(next) = (cur + 1..n).find(|&i| !used[i]) {
                self.idx[pos] = next;
                used[next] = true;
                for slot in pos + 1..len {
                    let fill = (0..n).find(|&i| !used[i]).expect("enough unused indices");
                    used[fill] = true;
                    self.idx[slot] = fill;
                }
                return;
            }
        }
    }
}

impl Iterator for Permutations<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out: Vec<usize> = self.idx.iter().map(|&i| self.vars[i]).collect();
        self.advance();
        Some(out)
    }
}

/// Count of nonempty ordered candidates: sum over k of n!/(n-k)!.
pub fn candidate_count(n: usize, k: usize) -> u64 {
    let mut total = 0u64;
    for len in 1..=k.min(n) {
        let mut p = 1u64;
        for i in 0..len {
            p *= (n - i) as u64;
        }
        total += p;
    }
    total
}

/// Per-candidate verdict in enumeration order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CandidateVerdict {
    pub candidate: Vec<usize>,
    pub tree_weight: f64,
    pub is_backdoor: bool,
}

/// Exhaustive certification of an instance at size cap `k`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleReport {
    pub k: usize,
    pub num_candidates: u64,
    pub best_tree_weight: f64,
    /// Every candidate attaining the best weight, in enumeration order.
    pub best_candidates: Vec<Vec<usize>>,
    /// Verdict per candidate, in enumeration order.
    pub verdicts: Vec<CandidateVerdict>,
}

impl OracleReport {
    pub fn is_backdoor(&self, candidate: &[usize]) -> Option<bool> {
        self.verdicts
            .iter()
            .find(|v| v.candidate == candidate)
            .map(|v| v.is_backdoor)
    }
}

struct CertifyDriver<'a> {
    jobs: std::vec::IntoIter<(usize, Vec<usize>)>,
    results: &'a mut Vec<Option<EvalResult>>,
    error: Option<BnbError>,
}

impl EvalDriver for CertifyDriver<'_> {
    type Job = (usize, Vec<usize>);
    type Out = Result<EvalResult, BnbError>;

    fn next(&mut self) -> Option<(usize, Vec<usize>)> {
        self.jobs.next()
    }

    fn apply(&mut self, job: (usize, Vec<usize>), out: Self::Out) -> bool {
        match out {
            Ok(res) => {
                self.results[job.0] = Some(res);
                true
            }
            Err(e) => {
                self.error = Some(e);
                false
            }
        }
    }
}

/// Evaluates every candidate with the given limits and reports the maximum
/// achievable tree weight, the argmax set, and the full verdict table.
/// Results are assembled by enumeration index, so the report is identical
/// for any worker count.
pub fn certify(
    inst: &MipInstance,
    cache: &RootLpCache,
    k: usize,
    guard: &OracleGuard,
    limits: &EvalLimits,
    tol: &Tolerances,
    workers: usize,
) -> Result<OracleReport, OracleError> {
    let root = cache
        .get_or_solve(inst, tol)
        .map_err(BnbError::from)?
        .clone();
    if root.status != LpStatus::Optimal {
        // Root infeasible: the empty candidate is the whole proof.
        let res = evaluate_candidate(inst, cache, &Backdoor::empty(), limits, tol)?;
        return Ok(OracleReport {
            k,
            num_candidates: 0,
            best_tree_weight: res.tree_weight,
            best_candidates: vec![Vec::new()],
            verdicts: Vec::new(),
        });
    }
    let space = fractional_set(inst, &root, tol.integrality).map_err(SearchError::from)?;
    if space.frac_vars.len() > guard.max_frac || k > guard.max_k {
        return Err(OracleError::TooLarge {
            frac: space.frac_vars.len(),
            k,
        });
    }
    if space.frac_vars.is_empty() {
        let res = evaluate_candidate(inst, cache, &Backdoor::empty(), limits, tol)?;
        return Ok(OracleReport {
            k,
            num_candidates: 0,
            best_tree_weight: res.tree_weight,
            best_candidates: vec![Vec::new()],
            verdicts: Vec::new(),
        });
    }

    let candidates: Vec<(usize, Vec<usize>)> = enumerate_candidates(&space.frac_vars, k)
        .enumerate()
        .collect();
    let expected = candidate_count(space.frac_vars.len(), k);
    debug_assert_eq!(candidates.len() as u64, expected);

    let mut results: Vec<Option<EvalResult>> = vec![None; candidates.len()];
    let mut driver = CertifyDriver {
        jobs: candidates.into_iter(),
        results: &mut results,
        error: None,
    };
    run_in_flight(workers, &mut driver, |job: &(usize, Vec<usize>)| {
        let cand = Backdoor::new(job.1.clone()).expect("enumeration yields distinct vars");
        evaluate_candidate(inst, cache, &cand, limits, tol)
    });
    if let Some(e) = driver.error {
        return Err(e.into());
    }

    let mut verdicts = Vec::with_capacity(results.len());
    let mut best = f64::NEG_INFINITY;
    for ((_, cand), res) in enumerate_candidates(&space.frac_vars, k)
        .enumerate()
        .map(|(i, c)| ((i, c), results[i].as_ref().expect("all evaluated")))
    {
        best = best.max(res.tree_weight);
        verdicts.push(CandidateVerdict {
            candidate: cand,
            tree_weight: res.tree_weight,
            is_backdoor: res.solved && res.tree_weight == 1.0,
        });
    }
    let best_candidates: Vec<Vec<usize>> = verdicts
        .iter()
        .filter(|v| v.tree_weight == best)
        .map(|v| v.candidate.clone())
        .collect();

    Ok(OracleReport {
        k,
        num_candidates: expected,
        best_tree_weight: best,
        best_candidates,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_matches_the_permutation_count() {
        let vars = vec![1, 2, 3];
        let cands: Vec<Vec<usize>> = enumerate_candidates(&vars, 2).collect();
        // 3 singletons + 6 ordered pairs; the 10-element state space of the
        // k=2 example includes the empty sequence, which is not a candidate.
        assert_eq!(cands.len(), 9);
        assert_eq!(candidate_count(3, 2), 9);
        assert_eq!(
            cands,
            vec![
                vec![1],
                vec![2],
                vec![3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 1],
                vec![2, 3],
                vec![3, 1],
                vec![3, 2],
            ]
        );
    }

    #[test]
    fn k1_enumerates_each_variable_once() {
        let vars = vec![4, 9, 17, 30];
        let cands: Vec<Vec<usize>> = enumerate_candidates(&vars, 1).collect();
        assert_eq!(cands.len(), 4);
        assert_eq!(candidate_count(4, 1), 4);
    }

    #[test]
    fn k_larger_than_n_saturates() {
        let vars = vec![0, 1];
        let cands: Vec<Vec<usize>> = enumerate_candidates(&vars, 5).collect();
        // 2 singletons + 2 pairs.
        assert_eq!(cands.len(), 4);
    }

    #[test]
    fn candidate_counts_accumulate_permutations() {
        assert_eq!(candidate_count(6, 2), 6 + 30);
        assert_eq!(candidate_count(10, 3), 10 + 90 + 720);
    }
}
