//! Helpers shared by the integration tests: a reference evaluation of the
//! cost formulas and a brute-force optimiser for the example query.

#![allow(dead_code)]

use dqo_core::cost::{grouping_cost, join_cost};
use dqo_core::optimizer::{LogicalPlan, Mode};
use dqo_core::{AlgoId, QueryStats};

/// log2 through the natural logarithm, so the reference does not share the
/// library's `f64::log2` call.
pub fn ref_log2(x: u64) -> f64 {
    (x as f64).ln() / std::f64::consts::LN_2
}

pub fn ref_grouping_cost(algo: AlgoId, n: u64, n_groups: u64, input_sorted: bool) -> f64 {
    let n_f = n as f64;
    match algo.name() {
        "HG" => 4.0 * n_f,
        "OG" | "SPHG" => n_f,
        "SOG" if input_sorted => n_f,
        "SOG" => n_f * ref_log2(n) + n_f,
        "BSG" => n_f * ref_log2(n_groups),
        other => panic!("{other} is not a grouping algorithm"),
    }
}

pub fn ref_join_cost(
    algo: AlgoId,
    n_r: u64,
    n_s: u64,
    n_groups: u64,
    r_sorted: bool,
    s_sorted: bool,
) -> f64 {
    let (r, s) = (n_r as f64, n_s as f64);
    match algo.name() {
        "HJ" => 4.0 * (r + s),
        "OJ" | "SPHJ" => r + s,
        "SOJ" => {
            let r_sort = if r_sorted { 0.0 } else { r * ref_log2(n_r) };
            let s_sort = if s_sorted { 0.0 } else { s * ref_log2(n_s) };
            r_sort + s_sort + r + s
        }
        "BSJ" => (r + s) * ref_log2(n_groups),
        other => panic!("{other} is not a join algorithm"),
    }
}

pub fn rel_close(got: f64, want: f64, tol: f64) -> bool {
    if want == 0.0 {
        got == 0.0
    } else {
        ((got - want) / want).abs() <= tol
    }
}

/// Independent restatement of which algorithms may run on which inputs.
pub fn ref_applicable(algo: AlgoId, sorted: &[bool], dense: &[bool], mode: Mode) -> bool {
    let all_sorted = sorted.iter().all(|&s| s);
    let all_dense = dense.iter().all(|&d| d);
    let deep = mode == Mode::Dqo;
    match algo.name() {
        "HG" | "HJ" | "SOG" | "SOJ" => true,
        "OG" | "OJ" => all_sorted,
        "SPHG" | "SPHJ" => deep && all_dense,
        "BSG" | "BSJ" => deep && !all_dense,
        other => panic!("unknown algorithm {other}"),
    }
}

/// Cheapest total cost over every applicable (join, grouping) pair, plus
/// the pairs attaining it.
pub fn brute_force(
    lp: &LogicalPlan,
    stats: &QueryStats,
    mode: Mode,
) -> (f64, Vec<(AlgoId, AlgoId)>) {
    let mut best = f64::INFINITY;
    let mut argmin = Vec::new();
    let sorted = [lp.r.sorted, lp.s.sorted];
    let dense = [lp.r.dense, lp.s.dense];
    for j in AlgoId::JOIN {
        if !ref_applicable(j, &sorted, &dense, mode) {
            continue;
        }
        let jc = join_cost(j, stats.n_r, stats.n_s, stats.n_r, sorted[0], sorted[1])
            .unwrap()
            .value();
        let join_sorted = matches!(j, AlgoId::Oj | AlgoId::Soj);
        let join_dense = dense.iter().all(|&d| d);
        for g in AlgoId::GROUPING {
            if !ref_applicable(g, &[join_sorted], &[join_dense], mode) {
                continue;
            }
            let gc = grouping_cost(g, stats.join_out, stats.group_out, join_sorted)
                .unwrap()
                .value();
            let total = gc + jc;
            if total < best {
                best = total;
                argmin.clear();
            }
            if total == best {
                argmin.push((j, g));
            }
        }
    }
    (best, argmin)
}

pub const CELLS: [(bool, bool, bool); 8] = [
    (true, true, true),
    (true, true, false),
    (true, false, true),
    (true, false, false),
    (false, true, true),
    (false, true, false),
    (false, false, true),
    (false, false, false),
];
