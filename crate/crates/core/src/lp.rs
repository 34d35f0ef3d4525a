//! Bounded-variable two-phase primal simplex on a dense tableau.
//!
//! This is the LP engine behind every branch-and-bound node. It targets
//! desk-scale instances: a dense tableau, Dantzig pricing with Bland's rule
//! engaged after a degeneracy streak, and phase 1 via artificial variables.
//! Solves are deterministic for fixed inputs.

use crate::config::Tolerances;
use crate::mip::{MipInstance, Sense};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;
use thiserror::Error;

const INF: f64 = f64::INFINITY;
/// Entries smaller than this never serve as pivots.
const PIVOT_TOL: f64 = 1e-9;
/// Ratio-test tie window.
const RATIO_EPS: f64 = 1e-9;
/// Degenerate pivots tolerated before switching to Bland's rule.
const DEGEN_STREAK_LIMIT: u32 = 50;
/// Iteration cap factor: cap = factor * (m + n).
const CAP_FACTOR: u64 = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// A basis snapshot: which columns are basic (structurals first, then row
/// slacks) and which nonbasic columns sit at their upper bound.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basis {
    pub basic: Vec<usize>,
    pub at_upper: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Structural variable values; empty unless `status == Optimal`.
    pub x: Vec<f64>,
    pub objective: f64,
    pub basis: Basis,
    pub iterations: u64,
}

impl LpSolution {
    fn non_optimal(status: LpStatus, iterations: u64) -> Self {
        Self {
            status,
            x: Vec::new(),
            objective: f64::NAN,
            basis: Basis::default(),
            iterations,
        }
    }
}

/// Bound changes layered on top of the instance bounds; entries intersect.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundDelta {
    changes: Vec<(usize, f64, f64)>,
}

impl BoundDelta {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a bound change; panics if `lo > up` (caller bug).
    pub fn push(&mut self, var: usize, lo: f64, up: f64) {
        assert!(lo <= up, "bound delta with lo > up for variable {var}");
        self.changes.push((var, lo, up));
    }

    pub fn with(mut self, var: usize, lo: f64, up: f64) -> Self {
        self.push(var, lo, up);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.changes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, f64, f64)> {
        self.changes.iter()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("simplex exceeded its iteration cap of {cap}")]
    NumericalFailure { cap: u64 },
    #[error("bound delta touches variable {var}, which does not exist")]
    BadDelta { var: usize },
}

/// Solves the LP relaxation of `inst` with `delta` layered over its bounds.
///
/// A warm basis, when supplied and primal feasible under the new bounds, lets
/// the solve skip phase 1; otherwise it falls back to a cold start. The pivot
/// rule is fixed, so results are deterministic for fixed inputs.
pub fn solve_lp(
    inst: &MipInstance,
    delta: &BoundDelta,
    warm: Option<&Basis>,
    tol: &Tolerances,
) -> Result<LpSolution, LpError> {
    let n = inst.num_vars();
    for &(var, _, _) in delta.iter() {
        if var >= n {
            return Err(LpError::BadDelta { var });
        }
    }
    let mut simplex = Simplex::new(inst, delta, *tol);
    simplex.solve(warm)
}

/// Write-once cache for the root LP solution. The paper-facing point is that
/// every candidate evaluation shares one root solve.
#[derive(Debug, Default)]
pub struct RootLpCache {
    cell: OnceLock<Result<LpSolution, LpError>>,
}

impl RootLpCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// First call solves the root LP; later calls return the stored value.
    pub fn get_or_solve(
        &self,
        inst: &MipInstance,
        tol: &Tolerances,
    ) -> Result<&LpSolution, LpError> {
        self.cell
            .get_or_init(|| solve_lp(inst, &BoundDelta::new(), None, tol))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn solved(&self) -> bool {
        self.cell.get().is_some()
    }

    /// Root basis to warm-start depth-1 child solves, when available.
    pub fn root_basis(&self) -> Option<&Basis> {
        match self.cell.get() {
            Some(Ok(sol)) if sol.status == LpStatus::Optimal => Some(&sol.basis),
            _ => None,
        }
    }
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

enum Step {
    Unbounded,
    Flip,
    Pivot { row: usize, t: f64, to_upper: bool },
}

struct Simplex {
    m: usize,
    n_struct: usize,
    /// Structural + slack column count (artificials live past this).
    n_real: usize,
    n_cols: usize,
    lo: Vec<f64>,
    up: Vec<f64>,
    /// Original [A | I] rows, kept pristine for warm-start factorization.
    orig: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    /// Current tableau rows (B^-1 applied), including artificial columns.
    a: Vec<Vec<f64>>,
    xb: Vec<f64>,
    basic: Vec<usize>,
    pos: Vec<Option<usize>>,
    val: Vec<f64>,
    at_up: Vec<bool>,
    cost: Vec<f64>,
    d: Vec<f64>,
    tol: Tolerances,
    iterations: u64,
    cap: u64,
    bland: bool,
    degen_streak: u32,
    bounds_conflict: bool,
}

impl Simplex {
    fn new(inst: &MipInstance, delta: &BoundDelta, tol: Tolerances) -> Self {
        let n = inst.num_vars();
        let m = inst.num_cons();
        let n_real = n + m;

        let mut lo = Vec::with_capacity(n_real);
        let mut up = Vec::with_capacity(n_real);
        lo.extend_from_slice(&inst.lower);
        up.extend_from_slice(&inst.upper);
        let mut bounds_conflict = false;
        for &(var, l, u) in delta.iter() {
            lo[var] = lo[var].max(l);
            up[var] = up[var].min(u);
            if lo[var] > up[var] {
                bounds_conflict = true;
            }
        }
        for row in &inst.rows {
            let (l, u) = match row.sense {
                Sense::Le => (0.0, INF),
                Sense::Ge => (-INF, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lo.push(l);
            up.push(u);
        }

        let mut orig = vec![vec![0.0; n_real]; m];
        let mut rhs = vec![0.0; m];
        for (i, row) in inst.rows.iter().enumerate() {
            for &(j, v) in &row.coeffs {
                orig[i][j] = v;
            }
            orig[i][n + i] = 1.0;
            rhs[i] = row.rhs;
        }

        let mut cost = vec![0.0; n_real];
        cost[..n].copy_from_slice(&inst.objective);

        Self {
            m,
            n_struct: n,
            n_real,
            n_cols: n_real,
            lo,
            up,
            orig,
            rhs,
            a: Vec::new(),
            xb: Vec::new(),
            basic: Vec::new(),
            pos: Vec::new(),
            val: Vec::new(),
            at_up: Vec::new(),
            cost,
            d: Vec::new(),
            tol,
            iterations: 0,
            cap: CAP_FACTOR * (m as u64 + n as u64 + 1),
            bland: false,
            degen_streak: 0,
            bounds_conflict,
        }
    }

    /// Bound a nonbasic column starts from: finite lower, else finite upper,
    /// else 0 for free columns.
    fn start_value(&self, j: usize) -> (f64, bool) {
        if self.lo[j].is_finite() {
            (self.lo[j], false)
        } else if self.up[j].is_finite() {
            (self.up[j], true)
        } else {
            (0.0, false)
        }
    }

    fn solve(&mut self, warm: Option<&Basis>) -> Result<LpSolution, LpError> {
        if self.bounds_conflict {
            return Ok(LpSolution::non_optimal(LpStatus::Infeasible, 0));
        }
        let warm_ok = warm.is_some_and(|b| self.try_warm(b));
        if !warm_ok {
            let needs_phase1 = self.cold_start();
            if needs_phase1 {
                match self.optimize()? {
                    PhaseEnd::Unbounded => unreachable!("phase-1 objective is bounded below"),
                    PhaseEnd::Optimal => {}
                }
                let infeas: f64 = (0..self.m)
                    .filter(|&i| self.basic[i] >= self.n_real)
                    .map(|i| self.xb[i])
                    .sum();
                if infeas > self.tol.feasibility {
                    return Ok(LpSolution::non_optimal(
                        LpStatus::Infeasible,
                        self.iterations,
                    ));
                }
                self.retire_artificials();
            }
        }

        // Phase 2 under the true objective.
        self.load_costs_phase2();
        match self.optimize()? {
            PhaseEnd::Unbounded => Ok(LpSolution::non_optimal(
                LpStatus::Unbounded,
                self.iterations,
            )),
            PhaseEnd::Optimal => Ok(self.extract()),
        }
    }

    /// Slack/artificial starting basis. Returns whether phase 1 is needed.
    fn cold_start(&mut self) -> bool {
        let m = self.m;
        self.a = self.orig.clone();
        self.val = vec![0.0; self.n_real];
        self.at_up = vec![false; self.n_real];
        self.pos = vec![None; self.n_real];
        self.basic = Vec::with_capacity(m);
        self.xb = Vec::with_capacity(m);

        for j in 0..self.n_struct {
            let (v, atu) = self.start_value(j);
            self.val[j] = v;
            self.at_up[j] = atu;
        }

        let mut needs_art: Vec<(usize, f64)> = Vec::new(); // (row, residual past slack bound)
        for i in 0..m {
            let slack = self.n_struct + i;
            let mut r = self.rhs[i];
            for j in 0..self.n_struct {
                if self.orig[i][j] != 0.0 {
                    r -= self.orig[i][j] * self.val[j];
                }
            }
            let clamped = r.clamp(self.lo[slack], self.up[slack]);
            if (clamped - r).abs() <= self.tol.feasibility {
                // Slack absorbs the residual and sits in the basis.
                self.basic.push(slack);
                self.xb.push(r);
                self.pos[slack] = Some(i);
            } else {
                self.val[slack] = clamped;
                self.at_up[slack] = clamped == self.up[slack] && self.lo[slack] != self.up[slack];
                needs_art.push((i, r - clamped));
            }
        }

        if needs_art.is_empty() {
            // Reorder: basic[i] must correspond to row i; it already does.
            return false;
        }

        // Rows that could not start feasible get an artificial column.
        let n_art = needs_art.len();
        self.n_cols = self.n_real + n_art;
        for row in &mut self.a {
            row.resize(self.n_cols, 0.0);
        }
        self.lo.resize(self.n_cols, 0.0);
        self.up.resize(self.n_cols, INF);
        self.val.resize(self.n_cols, 0.0);
        self.at_up.resize(self.n_cols, false);
        self.pos.resize(self.n_cols, None);

        // basic/xb currently hold only slack-basic rows in row order; rebuild
        // aligned per row.
        let mut basic = vec![usize::MAX; self.m];
        let mut xb = vec![0.0; self.m];
        for (k, &col) in self.basic.iter().enumerate() {
            let row = self.pos[col].unwrap();
            basic[row] = col;
            xb[row] = self.xb[k];
        }
        for (k, &(row, resid)) in needs_art.iter().enumerate() {
            let art = self.n_real + k;
            let sigma = if resid >= 0.0 { 1.0 } else { -1.0 };
            self.a[row][art] = sigma;
            if sigma < 0.0 {
                for j in 0..self.n_cols {
                    self.a[row][j] = -self.a[row][j];
                }
            }
            basic[row] = art;
            xb[row] = resid.abs();
            self.pos[art] = Some(row);
        }
        self.basic = basic;
        self.xb = xb;

        // Phase-1 objective: sum of artificials.
        let mut cost1 = vec![0.0; self.n_cols];
        for k in 0..n_art {
            cost1[self.n_real + k] = 1.0;
        }
        self.compute_reduced_costs(&cost1);
        true
    }

    /// After phase 1: artificials are pinned to zero and pivoted out of the
    /// basis where possible. A leftover basic artificial marks a redundant
    /// row and is harmless at value zero.
    fn retire_artificials(&mut self) {
        for j in self.n_real..self.n_cols {
            self.lo[j] = 0.0;
            self.up[j] = 0.0;
            if self.pos[j].is_none() {
                self.val[j] = 0.0;
            }
        }
        for row in 0..self.m {
            if self.basic[row] < self.n_real {
                continue;
            }
            let entering = (0..self.n_real)
                .find(|&j| self.pos[j].is_none() && self.a[row][j].abs() > PIVOT_TOL);
            if let Some(e) = entering {
                let dir = 1.0;
                self.apply_pivot(e, dir, row, 0.0, false);
            }
        }
    }

    fn load_costs_phase2(&mut self) {
        let mut cost = vec![0.0; self.n_cols];
        cost[..self.n_real].copy_from_slice(&self.cost[..self.n_real]);
        self.compute_reduced_costs(&cost);
    }

    fn compute_reduced_costs(&mut self, cost: &[f64]) {
        let mut d = cost.to_vec();
        for i in 0..self.m {
            let cb = cost[self.basic[i]];
            if cb != 0.0 {
                for j in 0..self.n_cols {
                    d[j] -= cb * self.a[i][j];
                }
            }
        }
        for i in 0..self.m {
            d[self.basic[i]] = 0.0;
        }
        self.d = d;
    }

    fn optimize(&mut self) -> Result<PhaseEnd, LpError> {
        loop {
            if self.iterations >= self.cap {
                return Err(LpError::NumericalFailure { cap: self.cap });
            }
            let Some((e, dir)) = self.price() else {
                return Ok(PhaseEnd::Optimal);
            };
            match self.ratio_test(e, dir) {
                Step::Unbounded => return Ok(PhaseEnd::Unbounded),
                Step::Flip => {
                    let range = self.up[e] - self.lo[e];
                    for i in 0..self.m {
                        let y = self.a[i][e];
                        if y != 0.0 {
                            self.xb[i] -= dir * range * y;
                        }
                    }
                    self.at_up[e] = !self.at_up[e];
                    self.val[e] = if self.at_up[e] { self.up[e] } else { self.lo[e] };
                    self.note_step(range);
                }
                Step::Pivot { row, t, to_upper } => {
                    self.note_step(t);
                    self.apply_pivot(e, dir, row, t, to_upper);
                }
            }
            self.iterations += 1;
        }
    }

    fn note_step(&mut self, t: f64) {
        if t <= 1e-10 {
            self.degen_streak += 1;
            if self.degen_streak > DEGEN_STREAK_LIMIT {
                self.bland = true;
            }
        } else {
            self.degen_streak = 0;
        }
    }

    /// Dantzig pricing (most violating reduced cost), or Bland's smallest
    /// index once a degeneracy streak has been detected.
    fn price(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.n_cols {
            if self.pos[j].is_some() || self.lo[j] == self.up[j] {
                continue;
            }
            let dj = self.d[j];
            let free = self.lo[j] == -INF && self.up[j] == INF;
            let cand = if dj < -self.tol.reduced_cost && (free || !self.at_up[j]) {
                Some((1.0, -dj))
            } else if dj > self.tol.reduced_cost && (free || self.at_up[j]) {
                Some((-1.0, dj))
            } else {
                None
            };
            if let Some((dir, viol)) = cand {
                if self.bland {
                    return Some((j, dir));
                }
                if best.is_none_or(|(_, _, bv)| viol > bv) {
                    best = Some((j, dir, viol));
                }
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    fn ratio_test(&self, e: usize, dir: f64) -> Step {
        let range = self.up[e] - self.lo[e];
        let mut t_best = if range.is_finite() { range } else { INF };
        let mut block: Option<(usize, bool)> = None;
        for i in 0..self.m {
            let y = self.a[i][e];
            if y.abs() <= PIVOT_TOL {
                continue;
            }
            let rate = dir * y; // xb[i] moves by -rate per unit step
            let bi = self.basic[i];
            let (ti, to_upper) = if rate > 0.0 {
                if self.lo[bi] == -INF {
                    continue;
                }
                ((self.xb[i] - self.lo[bi]) / rate, false)
            } else {
                if self.up[bi] == INF {
                    continue;
                }
                ((self.up[bi] - self.xb[i]) / -rate, true)
            };
            let ti = ti.max(0.0);
            if ti < t_best - RATIO_EPS {
                t_best = ti;
                block = Some((i, to_upper));
            } else if ti < t_best + RATIO_EPS {
                match block {
                    // Tie against the entering bound flip: prefer the pivot.
                    None => {
                        t_best = t_best.min(ti);
                        block = Some((i, to_upper));
                    }
                    Some((r, _)) if self.basic[i] < self.basic[r] => {
                        t_best = t_best.min(ti);
                        block = Some((i, to_upper));
                    }
                    Some(_) => {}
                }
            }
        }
        match block {
            None if t_best.is_finite() => Step::Flip,
            None => Step::Unbounded,
            Some((row, to_upper)) => Step::Pivot {
                row,
                t: t_best,
                to_upper,
            },
        }
    }

    fn apply_pivot(&mut self, e: usize, dir: f64, row: usize, t: f64, to_upper: bool) {
        if t != 0.0 {
            for i in 0..self.m {
                let y = self.a[i][e];
                if y != 0.0 {
                    self.xb[i] -= dir * t * y;
                }
            }
        }
        let entering_val = self.val[e] + dir * t;
        let leaving = self.basic[row];
        self.pos[leaving] = None;
        self.at_up[leaving] = to_upper;
        self.val[leaving] = if to_upper {
            self.up[leaving]
        } else {
            self.lo[leaving]
        };

        let p = self.a[row][e];
        let inv = 1.0 / p;
        for j in 0..self.n_cols {
            self.a[row][j] *= inv;
        }
        self.a[row][e] = 1.0;
        for i in 0..self.m {
            if i == row {
                continue;
            }
            let f = self.a[i][e];
            if f != 0.0 {
                for j in 0..self.n_cols {
                    self.a[i][j] -= f * self.a[row][j];
                }
                self.a[i][e] = 0.0;
            }
        }
        let f = self.d[e];
        if f != 0.0 {
            for j in 0..self.n_cols {
                self.d[j] -= f * self.a[row][j];
            }
            self.d[e] = 0.0;
        }
        self.basic[row] = e;
        self.pos[e] = Some(row);
        self.xb[row] = entering_val;
    }

    /// Builds the tableau for a caller-provided basis. Returns false (cold
    /// restart) when the basis is stale: wrong shape, singular, or primal
    /// infeasible under the current bounds.
    fn try_warm(&mut self, warm: &Basis) -> bool {
        if warm.basic.len() != self.m {
            return false;
        }
        let mut seen = vec![false; self.n_real];
        for &j in &warm.basic {
            if j >= self.n_real || seen[j] {
                return false;
            }
            seen[j] = true;
        }

        self.val = vec![0.0; self.n_real];
        self.at_up = vec![false; self.n_real];
        self.pos = vec![None; self.n_real];
        for j in 0..self.n_real {
            let (v, atu) = self.start_value(j);
            self.val[j] = v;
            self.at_up[j] = atu;
        }
        for &j in &warm.at_upper {
            if j < self.n_real && !seen[j] && self.up[j].is_finite() {
                self.val[j] = self.up[j];
                self.at_up[j] = true;
            }
        }

        // Augmented system [A | q], q = b - sum over nonbasic of A_j v_j.
        let mut aug: Vec<Vec<f64>> = Vec::with_capacity(self.m);
        for i in 0..self.m {
            let mut row = self.orig[i].clone();
            let mut q = self.rhs[i];
            for j in 0..self.n_real {
                if !seen[j] && self.val[j] != 0.0 && row[j] != 0.0 {
                    q -= row[j] * self.val[j];
                }
            }
            row.push(q);
            aug.push(row);
        }

        // Gauss-Jordan on the basis columns, pivot row chosen by magnitude.
        for (k, &col) in warm.basic.iter().enumerate() {
            let mut piv = k;
            for r in k..self.m {
                if aug[r][col].abs() > aug[piv][col].abs() {
                    piv = r;
                }
            }
            if aug[piv][col].abs() <= PIVOT_TOL {
                return false;
            }
            aug.swap(k, piv);
            let inv = 1.0 / aug[k][col];
            for v in aug[k].iter_mut() {
                *v *= inv;
            }
            for r in 0..self.m {
                if r != k {
                    let f = aug[r][col];
                    if f != 0.0 {
                        for j in 0..=self.n_real {
                            aug[r][j] -= f * aug[k][j];
                        }
                    }
                }
            }
        }

        let xb: Vec<f64> = aug.iter().map(|row| row[self.n_real]).collect();
        for (k, &col) in warm.basic.iter().enumerate() {
            if xb[k] < self.lo[col] - self.tol.feasibility
                || xb[k] > self.up[col] + self.tol.feasibility
            {
                return false;
            }
        }

        self.a = aug
            .into_iter()
            .map(|mut row| {
                row.pop();
                row
            })
            .collect();
        self.xb = xb;
        self.basic = warm.basic.clone();
        for (k, &col) in self.basic.iter().enumerate() {
            self.pos[col] = Some(k);
        }
        self.n_cols = self.n_real;
        true
    }

    fn extract(&self) -> LpSolution {
        let mut x = vec![0.0; self.n_struct];
        for (j, slot) in x.iter_mut().enumerate() {
            *slot = match self.pos[j] {
                Some(row) => self.xb[row],
                None => self.val[j],
            };
        }
        let objective: f64 = (0..self.n_struct).map(|j| self.cost[j] * x[j]).sum();
        let mut basic: Vec<usize> = self.basic.clone();
        basic.sort_unstable();
        let mut at_upper: Vec<usize> = (0..self.n_real)
            .filter(|&j| self.pos[j].is_none() && self.at_up[j] && self.lo[j] != self.up[j])
            .collect();
        at_upper.sort_unstable();
        LpSolution {
            status: LpStatus::Optimal,
            x,
            objective,
            basis: Basis { basic, at_upper },
            iterations: self.iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mip::{Row, Sense};

    fn knapsack() -> MipInstance {
        MipInstance {
            name: "knap2".into(),
            var_names: vec!["x".into(), "y".into()],
            objective: vec![-1.0, -1.0],
            rows: vec![Row {
                name: "cap".into(),
                coeffs: vec![(0, 1.0), (1, 1.0)],
                sense: Sense::Le,
                rhs: 1.0,
            }],
            lower: vec![0.0, 0.0],
            upper: vec![1.0, 1.0],
            integers: vec![0, 1],
            maximize_flipped: false,
        }
    }

    #[test]
    fn knapsack_relaxation_reaches_minus_one_at_a_vertex() {
        let inst = knapsack();
        let sol = solve_lp(&inst, &BoundDelta::new(), None, &Tolerances::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - -1.0).abs() < 1e-9, "objective {}", sol.objective);
        // Any optimal vertex has the capacity row tight.
        assert!((sol.x[0] + sol.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn conflicting_fixings_are_infeasible() {
        let inst = knapsack();
        let delta = BoundDelta::new().with(0, 1.0, 1.0).with(1, 1.0, 1.0);
        let sol = solve_lp(&inst, &delta, None, &Tolerances::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn empty_constraint_set_sits_at_lower_bounds() {
        let inst = MipInstance {
            name: "box".into(),
            var_names: vec!["a".into(), "b".into()],
            objective: vec![0.0, 0.0],
            rows: vec![],
            lower: vec![0.0, -2.0],
            upper: vec![5.0, 2.0],
            integers: vec![],
            maximize_flipped: false,
        };
        let sol = solve_lp(&inst, &BoundDelta::new(), None, &Tolerances::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, 0.0);
        assert_eq!(sol.x, vec![0.0, -2.0]);
    }

    #[test]
    fn unbounded_below_is_reported() {
        let inst = MipInstance {
            name: "unb".into(),
            var_names: vec!["a".into()],
            objective: vec![-1.0],
            rows: vec![],
            lower: vec![0.0],
            upper: vec![INF],
            integers: vec![],
            maximize_flipped: false,
        };
        let sol = solve_lp(&inst, &BoundDelta::new(), None, &Tolerances::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_row_forces_phase_one() {
        // min x + y  s.t. x + y = 2, 0 <= x,y <= 3
        let inst = MipInstance {
            name: "eq".into(),
            var_names: vec!["x".into(), "y".into()],
            objective: vec![1.0, 1.0],
            rows: vec![Row {
                name: "r".into(),
                coeffs: vec![(0, 1.0), (1, 1.0)],
                sense: Sense::Eq,
                rhs: 2.0,
            }],
            lower: vec![0.0, 0.0],
            upper: vec![3.0, 3.0],
            integers: vec![],
            maximize_flipped: false,
        };
        let sol = solve_lp(&inst, &BoundDelta::new(), None, &Tolerances::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 2.0).abs() < 1e-9);
        assert!((sol.x[0] + sol.x[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_system_is_detected() {
        // x >= 2 and x <= 1 rows with x in [0, 3].
        let inst = MipInstance {
            name: "inf".into(),
            var_names: vec!["x".into()],
            objective: vec![1.0],
            rows: vec![
                Row {
                    name: "ge".into(),
                    coeffs: vec![(0, 1.0)],
                    sense: Sense::Ge,
                    rhs: 2.0,
                },
                Row {
                    name: "le".into(),
                    coeffs: vec![(0, 1.0)],
                    sense: Sense::Le,
                    rhs: 1.0,
                },
            ],
            lower: vec![0.0],
            upper: vec![3.0],
            integers: vec![],
            maximize_flipped: false,
        };
        let sol = solve_lp(&inst, &BoundDelta::new(), None, &Tolerances::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn root_cache_returns_the_same_solution_without_resolving() {
        let inst = knapsack();
        let tol = Tolerances::default();
        let cache = RootLpCache::new();
        let first = cache.get_or_solve(&inst, &tol).unwrap() as *const LpSolution;
        let second = cache.get_or_solve(&inst, &tol).unwrap() as *const LpSolution;
        assert_eq!(first, second, "second call must reuse the stored value");
    }

    #[test]
    fn root_cache_caches_infeasibility_too() {
        let mut inst = knapsack();
        inst.rows.push(Row {
            name: "force".into(),
            coeffs: vec![(0, 1.0), (1, 1.0)],
            sense: Sense::Ge,
            rhs: 3.0,
        });
        let tol = Tolerances::default();
        let cache = RootLpCache::new();
        assert_eq!(
            cache.get_or_solve(&inst, &tol).unwrap().status,
            LpStatus::Infeasible
        );
        assert_eq!(
            cache.get_or_solve(&inst, &tol).unwrap().status,
            LpStatus::Infeasible
        );
        assert!(cache.root_basis().is_none());
    }

    #[test]
    fn warm_start_agrees_with_cold_start() {
        // min -2x - y - 3z  s.t.  x+y+z <= 2, x+2z <= 2, bounds [0,1.5]
        let inst = MipInstance {
            name: "w3".into(),
            var_names: vec!["x".into(), "y".into(), "z".into()],
            objective: vec![-2.0, -1.0, -3.0],
            rows: vec![
                Row {
                    name: "r1".into(),
                    coeffs: vec![(0, 1.0), (1, 1.0), (2, 1.0)],
                    sense: Sense::Le,
                    rhs: 2.0,
                },
                Row {
                    name: "r2".into(),
                    coeffs: vec![(0, 1.0), (2, 2.0)],
                    sense: Sense::Le,
                    rhs: 2.0,
                },
            ],
            lower: vec![0.0; 3],
            upper: vec![1.5; 3],
            integers: vec![],
            maximize_flipped: false,
        };
        let tol = Tolerances::default();
        let cold = solve_lp(&inst, &BoundDelta::new(), None, &tol).unwrap();
        let warm = solve_lp(&inst, &BoundDelta::new(), Some(&cold.basis), &tol).unwrap();
        assert_eq!(warm.status, LpStatus::Optimal);
        assert!((warm.objective - cold.objective).abs() < 1e-9);
        assert_eq!(warm.iterations, 0, "optimal basis needs no pivots");
        // And from the root basis after a bound change.
        let delta = BoundDelta::new().with(0, 0.0, 0.0);
        let warm_child = solve_lp(&inst, &delta, Some(&cold.basis), &tol).unwrap();
        let cold_child = solve_lp(&inst, &delta, None, &tol).unwrap();
        assert!((warm_child.objective - cold_child.objective).abs() < 1e-9);
    }

    #[test]
    fn tightening_bounds_never_improves_the_minimum() {
        let inst = knapsack();
        let tol = Tolerances::default();
        let base = solve_lp(&inst, &BoundDelta::new(), None, &tol).unwrap();
        for (var, lo, up) in [(0, 0.0, 0.0), (0, 1.0, 1.0), (1, 0.0, 0.0), (1, 1.0, 1.0)] {
            let delta = BoundDelta::new().with(var, lo, up);
            let sol = solve_lp(&inst, &delta, None, &tol).unwrap();
            if sol.status == LpStatus::Optimal {
                assert!(sol.objective >= base.objective - 1e-9);
            }
        }
    }

    #[test]
    fn bad_delta_index_is_an_error() {
        let inst = knapsack();
        let delta = BoundDelta::new().with(7, 0.0, 0.0);
        assert!(matches!(
            solve_lp(&inst, &delta, None, &Tolerances::default()),
            Err(LpError::BadDelta { var: 7 })
        ));
    }
}
