//! Deterministic generators for crafted instance families.
//!
//! These power the test suites and make desk-scale experiments
//! reproducible: every instance is a pure function of its seed.

use crate::mip::{MipInstance, Row, Sense};
use crate::seed::{stream_rng, Stream};
use rand::Rng;

/// A random mixed-binary packing instance: maximize a positive objective
/// under a few knapsack rows. Root LP optima land on fractional vertices for
/// most seeds.
pub fn random_packing(seed: u64) -> MipInstance {
    let mut rng = stream_rng(seed, Stream::InstanceGen);
    let n_bin = rng.gen_range(6..=10);
    let n_cont = rng.gen_range(0..=1);
    let m = rng.gen_range(2..=4);
    let n = n_bin + n_cont;

    let mut objective = Vec::with_capacity(n);
    let mut var_names = Vec::with_capacity(n);
    for j in 0..n_bin {
        objective.push(-(rng.gen_range(3..20) as f64)); // stored as minimize
        var_names.push(format!("x{j}"));
    }
    for j in 0..n_cont {
        objective.push(-rng.gen_range(0.5..1.5));
        var_names.push(format!("w{j}"));
    }

    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let mut coeffs: Vec<(usize, f64)> = Vec::new();
        for j in 0..n_bin {
            if rng.gen_bool(0.7) {
                coeffs.push((j, rng.gen_range(1..10) as f64));
            }
        }
        if coeffs.is_empty() {
            coeffs.push((rng.gen_range(0..n_bin), rng.gen_range(1..10) as f64));
        }
        for j in n_bin..n {
            if rng.gen_bool(0.5) {
                coeffs.push((j, rng.gen_range(1..4) as f64));
            }
        }
        let weight_sum: f64 = coeffs.iter().map(|&(_, a)| a).sum();
        let rhs = (weight_sum * rng.gen_range(0.35..0.55)).max(1.0);
        rows.push(Row {
            name: format!("r{i}"),
            coeffs,
            sense: Sense::Le,
            rhs,
        });
    }

    let mut lower = vec![0.0; n];
    let mut upper = vec![1.0; n];
    for j in n_bin..n {
        lower[j] = 0.0;
        upper[j] = 2.0;
    }

    MipInstance {
        name: format!("packing-{seed}"),
        var_names,
        objective,
        rows,
        lower,
        upper,
        integers: (0..n_bin).collect(),
        maximize_flipped: true,
    }
}

/// A planted-backdoor family with a unique size-2 backdoor.
///
/// Two key binaries u, v are capped at 0.25 each; every decoy pair (p, q)
/// shares the budget p + q <= u + v. At the root u = v = 0.25 and each p
/// sits at 0.5, so the fractional set is {u, v, p_0, ..}. Fixing any
/// non-key variable keeps u and v fractional somewhere, so the only
/// candidates reaching tree weight 1 are (u, v) and (v, u). The keys carry
/// large pseudocost gains while the decoys look most attractive to
/// fractionality-biased sampling (0.5 beats 0.25 in tent weight).
///
/// Returns the instance and the key pair in index order.
pub fn planted_pair(seed: u64, decoy_pairs: usize) -> (MipInstance, (usize, usize)) {
    assert!(decoy_pairs >= 1);
    let mut rng = stream_rng(seed, Stream::InstanceGen);
    let n = 2 + 2 * decoy_pairs;

    // Random variable placement so key indices vary across seeds.
    let mut slots: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        slots.swap(i, j);
    }
    let u = slots[0];
    let v = slots[1];
    let pairs: Vec<(usize, usize)> = (0..decoy_pairs)
        .map(|i| (slots[2 + 2 * i], slots[3 + 2 * i]))
        .collect();

    let mut objective = vec![0.0; n];
    let mut var_names = vec![String::new(); n];
    objective[u] = -(1.0 + rng.gen_range(0.0..0.2));
    objective[v] = -(1.2 + rng.gen_range(0.0..0.2));
    var_names[u] = "u".into();
    var_names[v] = "v".into();
    for (i, &(p, q)) in pairs.iter().enumerate() {
        let cp = 2.0 + 0.3 * i as f64 + rng.gen_range(0.0..0.1);
        objective[p] = -cp;
        objective[q] = -(0.6 * cp);
        var_names[p] = format!("p{i}");
        var_names[q] = format!("q{i}");
    }

    let mut rows = vec![
        Row {
            name: "capu".into(),
            coeffs: vec![(u, 1.0)],
            sense: Sense::Le,
            rhs: 0.25,
        },
        Row {
            name: "capv".into(),
            coeffs: vec![(v, 1.0)],
            sense: Sense::Le,
            rhs: 0.25,
        },
    ];
    for (i, &(p, q)) in pairs.iter().enumerate() {
        let mut coeffs = vec![(p, 1.0), (q, 1.0), (u, -1.0), (v, -1.0)];
        coeffs.sort_by_key(|&(j, _)| j);
        rows.push(Row {
            name: format!("pair{i}"),
            coeffs,
            sense: Sense::Le,
            rhs: 0.0,
        });
    }

    let inst = MipInstance {
        name: format!("planted-{seed}"),
        var_names,
        objective,
        rows,
        lower: vec![0.0; n],
        upper: vec![1.0; n],
        integers: (0..n).collect(),
        maximize_flipped: true,
    };
    let key = if u < v { (u, v) } else { (v, u) };
    (inst, key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Tolerances;
    use crate::lp::RootLpCache;
    use crate::mip::fractional_set;

    #[test]
    fn packing_instances_are_valid_and_reproducible() {
        for seed in 0..20 {
            let a = random_packing(seed);
            let b = random_packing(seed);
            assert_eq!(a, b);
            a.validate().unwrap();
        }
    }

    #[test]
    fn planted_root_has_keys_at_quarter_and_decoys_at_half() {
        let tol = Tolerances::default();
        let (inst, (u, v)) = planted_pair(7, 4);
        inst.validate().unwrap();
        let cache = RootLpCache::new();
        let root = cache.get_or_solve(&inst, &tol).unwrap();
        assert!((root.x[u] - 0.25).abs() < 1e-9);
        assert!((root.x[v] - 0.25).abs() < 1e-9);
        let space = fractional_set(&inst, root, tol.integrality).unwrap();
        assert_eq!(space.frac_vars.len(), 6, "two keys plus one per pair");
        assert!(space.frac_vars.contains(&u));
        assert!(space.frac_vars.contains(&v));
    }
}
