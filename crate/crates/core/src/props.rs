//! Meta-relational properties carried by relations and plan edges, exact
//! inference from data, and propagation through operators.

use std::fmt;

use crate::algo::{AlgoId, Role};
use crate::cost::QueryStats;
use crate::data::Relation;
use crate::error::{Error, Result};
use crate::optimizer::{applicable, Mode};

/// Sortedness and density of the key column plus its cardinalities.
/// `dense` asserts the distinct keys are exactly `{0, …, n_groups-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MetaProps {
    pub sorted: bool,
    pub dense: bool,
    pub n_rows: u64,
    pub n_groups: u64,
}

impl MetaProps {
    pub fn new(sorted: bool, dense: bool, n_rows: u64, n_groups: u64) -> Self {
        MetaProps {
            sorted,
            dense,
            n_rows,
            n_groups,
        }
    }
}

fn flag(b: bool) -> char {
    if b {
        'T'
    } else {
        'F'
    }
}

impl fmt::Display for MetaProps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "props{{sorted={},dense={},rows={},groups={}}}",
            flag(self.sorted),
            flag(self.dense),
            self.n_rows,
            self.n_groups
        )
    }
}

/// Full-scan property inference.
pub fn infer_props(rel: &Relation) -> MetaProps {
    let keys = rel.keys();
    let sorted = keys.windows(2).all(|w| w[0] <= w[1]);
    let (n_groups, max) = if sorted {
        distinct_sorted(keys)
    } else {
        let mut copy = keys.to_vec();
        copy.sort_unstable();
        distinct_sorted(&copy)
    };
    let dense = match max {
        None => true,
        Some(m) => m as u64 + 1 == n_groups,
    };
    MetaProps {
        sorted,
        dense,
        n_rows: keys.len() as u64,
        n_groups,
    }
}

fn distinct_sorted(keys: &[u32]) -> (u64, Option<u32>) {
    let distinct =
        keys.windows(2).filter(|w| w[0] != w[1]).count() as u64 + u64::from(!keys.is_empty());
    (distinct, keys.last().copied())
}

/// Output properties of running `algo` over `inputs`.
///
/// Only OJ/SOJ produce join output ordered by key; hash-table order is never
/// relied on. Grouping output is ordered for SPHG, BSG, SOG and OG. A join
/// is dense iff all inputs are dense; grouping keeps its input's density.
/// Cardinalities come from `stats`.
pub fn propagate(
    role: Role,
    algo: AlgoId,
    inputs: &[MetaProps],
    stats: &QueryStats,
) -> Result<MetaProps> {
    if algo.role() != role {
        return Err(Error::WrongRole { algo, role });
    }
    if !applicable(role, algo, inputs, Mode::Dqo) {
        return Err(Error::NotApplicable { algo });
    }
    let dense = inputs.iter().all(|p| p.dense);
    Ok(MetaProps {
        sorted: output_sorted(algo),
        dense,
        n_rows: match role {
            Role::Join => stats.join_out,
            Role::Group => stats.group_out,
        },
        n_groups: stats.group_out,
    })
}

/// Whether `algo` emits its output ordered by key.
pub fn output_sorted(algo: AlgoId) -> bool {
    matches!(
        algo,
        AlgoId::Oj | AlgoId::Soj | AlgoId::Og | AlgoId::Sog | AlgoId::Sphg | AlgoId::Bsg
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infer_hand_checked() {
        let p = infer_props(&Relation::from_keys(vec![0, 1, 1, 2]));
        assert_eq!(p, MetaProps::new(true, true, 4, 3));
        let p = infer_props(&Relation::from_keys(vec![10, 5]));
        assert!(!p.sorted && !p.dense);
        assert_eq!(p.n_groups, 2);
        let p = infer_props(&Relation::from_keys(vec![2, 0, 1, 0]));
        assert_eq!(p, MetaProps::new(false, true, 4, 3));
        let p = infer_props(&Relation::default());
        assert_eq!((p.n_rows, p.n_groups), (0, 0));
    }

    #[test]
    fn render() {
        let p = MetaProps::new(true, false, 90_000, 20_000);
        assert_eq!(
            p.to_string(),
            "props{sorted=T,dense=F,rows=90000,groups=20000}"
        );
    }

    #[test]
    fn propagate_examples() {
        let stats = QueryStats::DEFAULT;
        let sorted = MetaProps::new(true, true, 40_000, 40_000);
        let out = propagate(Role::Join, AlgoId::Oj, &[sorted, sorted], &stats).unwrap();
        assert!(out.sorted);
        assert_eq!(out.n_rows, 90_000);

        let unsorted = MetaProps::new(false, false, 40_000, 40_000);
        for inputs in [[sorted, sorted], [unsorted, unsorted]] {
            let out = propagate(Role::Join, AlgoId::Hj, &inputs, &stats).unwrap();
            assert!(!out.sorted);
        }

        let dense_in = MetaProps::new(false, true, 90_000, 20_000);
        let out = propagate(Role::Group, AlgoId::Sphg, &[dense_in], &stats).unwrap();
        assert!(out.sorted);
        assert_eq!((out.n_rows, out.n_groups), (20_000, 20_000));
    }

    #[test]
    fn propagate_rejects_inapplicable() {
        let stats = QueryStats::DEFAULT;
        let unsorted = MetaProps::new(false, true, 10, 10);
        assert!(matches!(
            propagate(Role::Join, AlgoId::Oj, &[unsorted, unsorted], &stats),
            Err(Error::NotApplicable { .. })
        ));
        let sparse = MetaProps::new(false, false, 10, 10);
        assert!(propagate(Role::Group, AlgoId::Sphg, &[sparse], &stats).is_err());
        assert!(matches!(
            propagate(Role::Group, AlgoId::Hj, &[sparse], &stats),
            Err(Error::WrongRole { .. })
        ));
    }

    #[test]
    fn density_carries_through_join() {
        let stats = QueryStats::DEFAULT;
        let d = MetaProps::new(false, true, 1, 1);
        let s = MetaProps::new(false, false, 1, 1);
        assert!(
            propagate(Role::Join, AlgoId::Hj, &[d, d], &stats)
                .unwrap()
                .dense
        );
        assert!(
            !propagate(Role::Join, AlgoId::Hj, &[d, s], &stats)
                .unwrap()
                .dense
        );
    }
}
