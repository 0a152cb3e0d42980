//! The five grouping implementations. Each computes COUNT and SUM on the
//! fly into an array of aggregates; they differ in how a row finds its
//! slot.

use std::collections::{HashMap, HashSet};
use std::hint::select_unpredictable;

use crate::algo::{AlgoId, Role};
use crate::data::{with_values, GroupEntry, GroupResult, Relation, SumValues};
use crate::error::{Error, Result};
use crate::hash::MurmurBuildHasher;

/// Side information some variants need: the number of groups for the
/// static perfect hash and the sorted key directory for binary search.
#[derive(Debug, Clone, Copy, Default)]
pub struct GroupAux<'a> {
    pub n_groups: Option<usize>,
    pub group_keys: Option<&'a [u32]>,
}

impl<'a> GroupAux<'a> {
    pub fn dense(n_groups: usize) -> Self {
        GroupAux {
            n_groups: Some(n_groups),
            group_keys: None,
        }
    }

    pub fn directory(group_keys: &'a [u32]) -> Self {
        GroupAux {
            n_groups: None,
            group_keys: Some(group_keys),
        }
    }
}

pub fn group(algo: AlgoId, rel: &Relation, aux: GroupAux<'_>) -> Result<GroupResult> {
    match algo {
        AlgoId::Hg => Ok(hg_group(rel)),
        AlgoId::Sphg => {
            let n = aux.n_groups.ok_or(Error::MissingAux {
                algo,
                what: "number of groups",
            })?;
            sphg_group(rel, n)
        }
        AlgoId::Og => og_group(rel),
        AlgoId::Sog => Ok(sog_group(rel)),
        AlgoId::Bsg => {
            let keys = aux.group_keys.ok_or(Error::MissingAux {
                algo,
                what: "sorted group directory",
            })?;
            bsg_group(rel, keys)
        }
        _ => Err(Error::WrongRole {
            algo,
            role: Role::Group,
        }),
    }
}

#[inline]
fn bump(entry: &mut GroupEntry, value: u64) {
    entry.count += 1;
    entry.sum = entry.sum.wrapping_add(value);
}

/// Hash-based grouping: a hash map from key to slot in the aggregate
/// array, one insert-or-update per row.
pub fn hg_group(rel: &Relation) -> GroupResult {
    fn run(keys: &[u32], values: impl SumValues) -> Vec<GroupEntry> {
        let mut slots: HashMap<u32, u32, MurmurBuildHasher> = HashMap::default();
        let mut aggs: Vec<GroupEntry> = Vec::new();
        for (row, &key) in keys.iter().enumerate() {
            let next = aggs.len() as u32;
            let slot = *slots.entry(key).or_insert(next);
            if slot == next {
                aggs.push(GroupEntry::new(key, 0, 0));
            }
            bump(&mut aggs[slot as usize], values.value(row, key));
        }
        aggs
    }
    GroupResult::new(with_values!(rel, |keys, values| run(keys, values)))
}

/// Per-slot state of the array-based variants.
#[derive(Debug, Clone, Copy, Default)]
struct Slot {
    count: u64,
    sum: u64,
}

impl Slot {
    #[inline(always)]
    fn bump(&mut self, value: u64) {
        self.count += 1;
        self.sum = self.sum.wrapping_add(value);
    }
}

/// Largest group count for which SPHG keeps several private aggregate
/// arrays. On key-ordered input consecutive rows hit the same slot, and
/// each update has to wait for the previous store; interleaving
/// independent arrays hides that latency. Four copies of this many slots
/// stay well inside a typical L2 cache.
const SPHG_LANE_LIMIT: usize = 4096;
const SPHG_LANES: usize = 4;

/// Static perfect hash grouping: the key is the array offset. Output is
/// key-ascending.
pub fn sphg_group(rel: &Relation, n_groups: usize) -> Result<GroupResult> {
    fn single(keys: &[u32], values: impl SumValues, slots: &mut [Slot]) -> Option<usize> {
        for (row, &key) in keys.iter().enumerate() {
            match slots.get_mut(key as usize) {
                Some(slot) => slot.bump(values.value(row, key)),
                None => return Some(row),
            }
        }
        None
    }

    /// Lane `l` aggregates rows `[l * chunk, (l + 1) * chunk)`; the lanes
    /// advance in lock step. Leftover rows go to lane 0.
    fn laned(
        keys: &[u32],
        values: impl SumValues,
        lanes: &mut [Vec<Slot>; SPHG_LANES],
    ) -> Option<usize> {
        let chunk = keys.len() / SPHG_LANES;
        let [a, b, c, d] = lanes;
        for i in 0..chunk {
            for (l, slots) in [&mut *a, &mut *b, &mut *c, &mut *d].into_iter().enumerate() {
                let row = l * chunk + i;
                let key = keys[row];
                match slots.get_mut(key as usize) {
                    Some(slot) => slot.bump(values.value(row, key)),
                    None => return Some(row),
                }
            }
        }
        let tail_start = chunk * SPHG_LANES;
        for (row, &key) in keys.iter().enumerate().skip(tail_start) {
            match a.get_mut(key as usize) {
                Some(slot) => slot.bump(values.value(row, key)),
                None => return Some(row),
            }
        }
        None
    }

    let (slots, bad_row) = if n_groups <= SPHG_LANE_LIMIT {
        let mut lanes: [Vec<Slot>; SPHG_LANES] =
            std::array::from_fn(|_| vec![Slot::default(); n_groups]);
        let bad = with_values!(rel, |keys, values| laned(keys, values, &mut lanes));
        let [mut first, rest @ ..] = lanes;
        for lane in &rest {
            for (acc, s) in first.iter_mut().zip(lane) {
                acc.count += s.count;
                acc.sum = acc.sum.wrapping_add(s.sum);
            }
        }
        (first, bad)
    } else {
        let mut slots = vec![Slot::default(); n_groups];
        let bad = with_values!(rel, |keys, values| single(keys, values, &mut slots));
        (slots, bad)
    };
    if bad_row.is_some() {
        // Lanes may trip over a later row first; report the earliest.
        let row = rel
            .keys()
            .iter()
            .position(|&k| k as usize >= n_groups)
            .expect("an out-of-range key was seen");
        return Err(Error::KeyOutOfRange {
            key: rel.keys()[row],
            row,
            n_groups,
        });
    }
    Ok(GroupResult::new(
        slots
            .into_iter()
            .enumerate()
            .filter(|(_, s)| s.count > 0)
            .map(|(k, s)| GroupEntry::new(k as u32, s.count, s.sum))
            .collect(),
    ))
}

/// Order-based grouping over input partitioned by key. Groups are emitted
/// in first-occurrence order.
pub fn og_group(rel: &Relation) -> Result<GroupResult> {
    fn run(keys: &[u32], values: impl SumValues) -> std::result::Result<Vec<GroupEntry>, usize> {
        let mut out: Vec<GroupEntry> = Vec::new();
        // While run keys only increase, a new key cannot have been seen.
        // After the first decrease every new key is checked against `seen`.
        let mut seen: Option<HashSet<u32, MurmurBuildHasher>> = None;
        let mut row = 0;
        while row < keys.len() {
            let key = keys[row];
            if let Some(prev) = out.last() {
                if seen.is_none() && key < prev.key {
                    seen = Some(out.iter().map(|e| e.key).collect());
                }
            }
            if let Some(seen) = seen.as_mut() {
                if !seen.insert(key) {
                    return Err(row);
                }
            }
            let mut entry = GroupEntry::new(key, 0, 0);
            while row < keys.len() && keys[row] == key {
                bump(&mut entry, values.value(row, key));
                row += 1;
            }
            out.push(entry);
        }
        Ok(out)
    }
    match with_values!(rel, |keys, values| run(keys, values)) {
        Ok(out) => Ok(GroupResult::new(out)),
        Err(row) => Err(Error::NonContiguousKey {
            key: rel.keys()[row],
            row,
        }),
    }
}

/// Sort a copy, then order-based grouping.
pub fn sog_group(rel: &Relation) -> GroupResult {
    og_group(&rel.sorted_by_key()).expect("sorted input is partitioned")
}

/// Index of `key` in the strictly ascending `keys`, if present. The
/// search loop is branch-free.
#[inline]
pub(crate) fn directory_lookup(keys: &[u32], key: u32) -> Option<usize> {
    if keys.is_empty() {
        return None;
    }
    let mut base = 0usize;
    let mut size = keys.len();
    while size > 1 {
        let half = size / 2;
        let mid = base + half;
        base = select_unpredictable(keys[mid] <= key, mid, base);
        size -= half;
    }
    (keys[base] == key).then_some(base)
}

pub(crate) fn check_directory(keys: &[u32]) -> Result<()> {
    match keys.windows(2).position(|w| w[0] >= w[1]) {
        Some(p) => Err(Error::DirectoryNotAscending { position: p + 1 }),
        None => Ok(()),
    }
}

/// Binary-search grouping over a sorted key directory. Output is
/// key-ascending.
pub fn bsg_group(rel: &Relation, group_keys: &[u32]) -> Result<GroupResult> {
    fn run(
        keys: &[u32],
        values: impl SumValues,
        directory: &[u32],
        aggs: &mut [GroupEntry],
    ) -> Option<u32> {
        for (row, &key) in keys.iter().enumerate() {
            match directory_lookup(directory, key) {
                Some(slot) => bump(&mut aggs[slot], values.value(row, key)),
                None => return Some(key),
            }
        }
        None
    }
    check_directory(group_keys)?;
    let mut aggs: Vec<GroupEntry> = group_keys
        .iter()
        .map(|&k| GroupEntry::new(k, 0, 0))
        .collect();
    if let Some(key) = with_values!(rel, |keys, values| run(keys, values, group_keys, &mut aggs)) {
        return Err(Error::KeyNotInDirectory { key });
    }
    aggs.retain(|a| a.count > 0);
    Ok(GroupResult::new(aggs))
}

/// Sorted distinct keys of a relation, the directory BSG expects.
pub fn key_directory(keys: &[u32]) -> Vec<u32> {
    let mut dir = keys.to_vec();
    dir.sort_unstable();
    dir.dedup();
    dir
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_group;

    fn rel(keys: &[u32]) -> Relation {
        Relation::from_keys(keys.to_vec())
    }

    fn e(key: u32, count: u64, sum: u64) -> GroupEntry {
        GroupEntry::new(key, count, sum)
    }

    #[test]
    fn hg_hand_checked() {
        let got = hg_group(&rel(&[5, 3, 5])).canonical();
        assert_eq!(got.entries, vec![e(3, 1, 3), e(5, 2, 10)]);
        assert!(hg_group(&rel(&[])).is_empty());
    }

    #[test]
    fn sphg_hand_checked_and_ascending() {
        let got = sphg_group(&rel(&[0, 1, 0]), 2).unwrap();
        assert_eq!(got.entries, vec![e(0, 2, 0), e(1, 1, 1)]);
        let got = sphg_group(&rel(&[3, 0, 3, 1]), 4).unwrap();
        assert!(got.is_key_ascending());
    }

    #[test]
    fn sphg_rejects_sparse_key() {
        let err = sphg_group(&rel(&[1, 1 << 31]), 100).unwrap_err();
        assert!(matches!(
            err,
            Error::KeyOutOfRange {
                key: 2147483648,
                row: 1,
                n_groups: 100
            }
        ));
    }

    #[test]
    fn sphg_lanes_report_earliest_bad_row() {
        let mut keys = vec![0u32; 40];
        keys[5] = 7;
        keys[30] = 9;
        let err = sphg_group(&rel(&keys), 4).unwrap_err();
        assert!(matches!(err, Error::KeyOutOfRange { key: 7, row: 5, .. }));
    }

    #[test]
    fn sphg_lanes_and_single_array_agree() {
        let keys: Vec<u32> = (0..10_007u32).map(|i| (i * 7919) % 5000).collect();
        let r = rel(&keys);
        let expected = oracle_group(&r);
        assert_eq!(sphg_group(&r, 5000).unwrap(), expected);
        let small: Vec<u32> = keys.iter().map(|k| k % 64).collect();
        let r = rel(&small);
        assert_eq!(sphg_group(&r, 64).unwrap(), oracle_group(&r));
    }

    #[test]
    fn og_hand_checked() {
        let got = og_group(&rel(&[1, 1, 2])).unwrap();
        assert_eq!(got.entries, vec![e(1, 2, 2), e(2, 1, 2)]);
    }

    #[test]
    fn og_rejects_non_contiguous_key() {
        let err = og_group(&rel(&[1, 2, 1])).unwrap_err();
        assert!(matches!(err, Error::NonContiguousKey { key: 1, row: 2 }));
        let err = og_group(&rel(&[5, 3, 9, 3])).unwrap_err();
        assert!(matches!(err, Error::NonContiguousKey { key: 3, row: 3 }));
    }

    #[test]
    fn og_accepts_partitioned_unsorted_input() {
        let got = og_group(&rel(&[9, 9, 2, 7, 7, 7])).unwrap();
        let keys: Vec<u32> = got.entries.iter().map(|e| e.key).collect();
        assert_eq!(keys, vec![9, 2, 7]);
    }

    #[test]
    fn sog_hand_checked() {
        let got = sog_group(&rel(&[2, 1, 2]));
        assert_eq!(got.entries, vec![e(1, 1, 1), e(2, 2, 4)]);
    }

    #[test]
    fn sog_does_not_touch_input() {
        let input = rel(&[3, 1, 2]);
        let _ = sog_group(&input);
        assert_eq!(input.keys(), &[3, 1, 2]);
    }

    #[test]
    fn bsg_hand_checked() {
        let got = bsg_group(&rel(&[7, 3, 7]), &[3, 7]).unwrap();
        assert_eq!(got.entries, vec![e(3, 1, 3), e(7, 2, 14)]);
    }

    #[test]
    fn bsg_lookup_error() {
        let err = bsg_group(&rel(&[5]), &[3, 7]).unwrap_err();
        assert!(matches!(err, Error::KeyNotInDirectory { key: 5 }));
        let err = bsg_group(&rel(&[3]), &[3, 3]).unwrap_err();
        assert!(matches!(err, Error::DirectoryNotAscending { position: 1 }));
    }

    #[test]
    fn directory_lookup_matches_linear_search() {
        let keys = [2u32, 5, 9, 11, 40, u32::MAX];
        for probe in 0..50u32 {
            assert_eq!(
                directory_lookup(&keys, probe),
                keys.iter().position(|&k| k == probe)
            );
        }
        assert_eq!(directory_lookup(&keys, u32::MAX), Some(5));
        assert_eq!(directory_lookup(&[], 1), None);
    }

    #[test]
    fn payload_is_summed() {
        let r = Relation::new(vec![4, 4, 1], Some(vec![10, 5, 7])).unwrap();
        let expected = oracle_group(&r);
        assert_eq!(hg_group(&r).canonical(), expected);
        assert_eq!(sphg_group(&r, 5).unwrap(), expected);
        assert_eq!(sog_group(&r), expected);
        assert_eq!(bsg_group(&r, &[1, 4]).unwrap(), expected);
    }

    #[test]
    fn dispatch_checks_role_and_aux() {
        let r = rel(&[1]);
        assert!(matches!(
            group(AlgoId::Hj, &r, GroupAux::default()),
            Err(Error::WrongRole { .. })
        ));
        assert!(matches!(
            group(AlgoId::Sphg, &r, GroupAux::default()),
            Err(Error::MissingAux { .. })
        ));
        assert_eq!(
            group(AlgoId::Sphg, &r, GroupAux::dense(2)).unwrap().len(),
            1
        );
    }
}
