//! The simplex against an independent brute-force oracle: enumerate every
//! candidate vertex of a bounded LP by activating n constraints at a time,
//! keep the feasible ones, and take the best objective.

use backdoor_core::config::Tolerances;
use backdoor_core::lp::{solve_lp, BoundDelta, LpStatus};
use backdoor_core::mip::{MipInstance, Row, Sense};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Solves an n x n system by Gaussian elimination; None when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[piv][k].abs() < 1e-9 {
            return None;
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for i in 0..n {
            if i != k {
                let f = a[i][k] / a[k][k];
                if f != 0.0 {
                    for j in k..n {
                        a[i][j] -= f * a[k][j];
                    }
                    b[i] -= f * b[k];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Best objective over all feasible vertices, or None when no vertex is
/// feasible (which, for a box-bounded LP, means infeasible).
fn enumerate_best_vertex(inst: &MipInstance) -> Option<f64> {
    let n = inst.num_vars();
    // Constraint pool: every row as an equality, then x_j = lo_j, x_j = up_j.
    let mut pool: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in &inst.rows {
        let mut dense = vec![0.0; n];
        for &(j, v) in &row.coeffs {
            dense[j] = v;
        }
        pool.push((dense, row.rhs));
    }
    for j in 0..n {
        let mut lo_row = vec![0.0; n];
        lo_row[j] = 1.0;
        pool.push((lo_row.clone(), inst.lower[j]));
        pool.push((lo_row, inst.upper[j]));
    }

    let feasible = |x: &[f64]| -> bool {
        for j in 0..n {
            if x[j] < inst.lower[j] - 1e-7 || x[j] > inst.upper[j] + 1e-7 {
                return false;
            }
        }
        for row in &inst.rows {
            let lhs: f64 = row.coeffs.iter().map(|&(j, v)| v * x[j]).sum();
            let ok = match row.sense {
                Sense::Le => lhs <= row.rhs + 1e-7,
                Sense::Ge => lhs >= row.rhs - 1e-7,
                Sense::Eq => (lhs - row.rhs).abs() <= 1e-7,
            };
            if !ok {
                return false;
            }
        }
        true
    };

    let mut best: Option<f64> = None;
    let mut combo: Vec<usize> = (0..n).collect();
    if pool.len() < n {
        return None;
    }
    loop {
        let a: Vec<Vec<f64>> = combo.iter().map(|&i| pool[i].0.clone()).collect();
        let b: Vec<f64> = combo.iter().map(|&i| pool[i].1).collect();
        if let Some(x) = solve_square(a, b) {
            if x.iter().all(|v| v.is_finite()) && feasible(&x) {
                let obj: f64 = inst
                    .objective
                    .iter()
                    .zip(&x)
                    .map(|(c, v)| c * v)
                    .sum();
                best = Some(best.map_or(obj, |b: f64| b.min(obj)));
            }
        }
        // Next n-combination of pool indices, lexicographic.
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if combo[i] < pool.len() - (n - i) {
                combo[i] += 1;
                for j in i + 1..n {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn random_lp(rng: &mut ChaCha8Rng) -> MipInstance {
    let n = rng.gen_range(1..=6);
    let m = rng.gen_range(0..=6);
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for _ in 0..n {
        let lo = rng.gen_range(-3..=0) as f64;
        let up = lo + rng.gen_range(1..=4) as f64;
        lower.push(lo);
        upper.push(up);
    }
    let objective: Vec<f64> = (0..n).map(|_| rng.gen_range(-5..=5) as f64).collect();
    let mut rows = Vec::new();
    for i in 0..m {
        let coeffs: Vec<(usize, f64)> = (0..n)
            .filter_map(|j| {
                let a = rng.gen_range(-4..=4);
                (a != 0).then_some((j, a as f64))
            })
            .collect();
        if coeffs.is_empty() {
            continue;
        }
        let sense = match rng.gen_range(0..6) {
            0 => Sense::Eq,
            1 | 2 => Sense::Ge,
            _ => Sense::Le,
        };
        rows.push(Row {
            name: format!("r{i}"),
            coeffs,
            sense,
            rhs: rng.gen_range(-6..=6) as f64,
        });
    }
    MipInstance {
        name: "rand-lp".into(),
        var_names: (0..n).map(|j| format!("x{j}")).collect(),
        objective,
        rows,
        lower,
        upper,
        integers: vec![],
        maximize_flipped: false,
    }
}

#[test]
fn simplex_matches_vertex_enumeration_on_random_bounded_lps() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_817);
    let mut optimal = 0;
    let mut infeasible = 0;
    for case in 0..150 {
        let inst = random_lp(&mut rng);
        let oracle = enumerate_best_vertex(&inst);
        let sol = solve_lp(&inst, &BoundDelta::new(), None, &tol)
            .unwrap_or_else(|e| panic!("case {case}: solver error {e} on {inst:?}"));
        match oracle {
            Some(best) => {
                assert_eq!(
                    sol.status,
                    LpStatus::Optimal,
                    "case {case}: oracle found vertex {best} but solver says {:?}\n{inst:?}",
                    sol.status
                );
                assert!(
                    (sol.objective - best).abs() < 1e-6,
                    "case {case}: solver {} vs oracle {best}\n{inst:?}",
                    sol.objective
                );
                optimal += 1;
            }
            None => {
                assert_eq!(
                    sol.status,
                    LpStatus::Infeasible,
                    "case {case}: oracle found no feasible vertex\n{inst:?}"
                );
                infeasible += 1;
            }
        }
    }
    // Both outcomes must actually occur for the test to mean anything.
    assert!(optimal > 30, "only {optimal} optimal cases");
    assert!(infeasible > 10, "only {infeasible} infeasible cases");
}

#[test]
fn optimal_solutions_have_nonbasic_vars_at_bounds() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for _ in 0..60 {
        let inst = random_lp(&mut rng);
        let sol = solve_lp(&inst, &BoundDelta::new(), None, &tol).unwrap();
        if sol.status != LpStatus::Optimal {
            continue;
        }
        checked += 1;
        for j in 0..inst.num_vars() {
            if sol.basis.basic.contains(&j) {
                continue;
            }
            let at_lo = (sol.x[j] - inst.lower[j]).abs() <= 1e-7;
            let at_up = (sol.x[j] - inst.upper[j]).abs() <= 1e-7;
            assert!(
                at_lo || at_up,
                "nonbasic structural {j} sits strictly between its bounds: {} in [{}, {}]",
                sol.x[j],
                inst.lower[j],
                inst.upper[j]
            );
        }
    }
    assert!(checked > 20);
}
