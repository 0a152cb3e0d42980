//! Naive reference implementations. No performance claims; every
//! algorithm test compares against these.

use std::collections::BTreeMap;

use crate::data::{GroupEntry, GroupResult, Relation};

/// Grouping through a single ordered map. Entries come out key-ascending.
pub fn oracle_group(rel: &Relation) -> GroupResult {
    let mut groups: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    for i in 0..rel.n_rows() {
        let agg = groups.entry(rel.keys()[i]).or_default();
        agg.0 += 1;
        agg.1 = agg.1.wrapping_add(rel.sum_value(i));
    }
    GroupResult::new(
        groups
            .into_iter()
            .map(|(key, (count, sum))| GroupEntry::new(key, count, sum))
            .collect(),
    )
}

/// Nested-loop equi-join on key. Output rows are ordered by
/// `(r index, s index)` and carry r's payload.
pub fn oracle_join(r: &Relation, s: &Relation) -> Relation {
    let mut key = Vec::new();
    let mut payload = r.payload().map(|_| Vec::new());
    for (ri, &rk) in r.keys().iter().enumerate() {
        for &sk in s.keys() {
            if rk == sk {
                key.push(rk);
                if let (Some(out), Some(p)) = (payload.as_mut(), r.payload()) {
                    out.push(p[ri]);
                }
            }
        }
    }
    Relation::new(key, payload).expect("columns grow in lockstep")
}

/// Rows of a relation as `(key, payload)` pairs sorted, for multiset
/// comparison of join outputs whose order is unspecified.
pub fn row_multiset(rel: &Relation) -> Vec<(u32, Option<u64>)> {
    let mut rows: Vec<(u32, Option<u64>)> = (0..rel.n_rows())
        .map(|i| (rel.keys()[i], rel.payload().map(|p| p[i])))
        .collect();
    rows.sort_unstable();
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_hand_counted() {
        let got = oracle_group(&Relation::from_keys(vec![5, 3, 5]));
        assert_eq!(
            got.entries,
            vec![GroupEntry::new(3, 1, 3), GroupEntry::new(5, 2, 10)]
        );
        assert!(oracle_group(&Relation::default()).is_empty());
    }

    #[test]
    fn group_sums_payload_when_present() {
        let rel = Relation::new(vec![1, 1], Some(vec![10, 20])).unwrap();
        assert_eq!(oracle_group(&rel).entries, vec![GroupEntry::new(1, 2, 30)]);
    }

    #[test]
    fn join_hand_enumerated() {
        let r = Relation::from_keys(vec![1, 2]);
        let s = Relation::from_keys(vec![2, 2]);
        assert_eq!(oracle_join(&r, &s).keys(), &[2, 2]);
        assert!(oracle_join(&r, &Relation::default()).is_empty());
    }

    #[test]
    fn join_order_is_r_then_s() {
        let r = Relation::new(vec![2, 1], Some(vec![20, 10])).unwrap();
        let s = Relation::from_keys(vec![1, 2, 2]);
        let out = oracle_join(&r, &s);
        assert_eq!(out.keys(), &[2, 2, 1]);
        assert_eq!(out.payload().unwrap(), &[20, 20, 10]);
    }
}
