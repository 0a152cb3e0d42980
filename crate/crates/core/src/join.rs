//! Join counterparts of the grouping variants.
//!
//! `r` is the build side. Every output row is one matching `(r, s)` pair
//! with the join key as key and r's payload as payload. Only OJ/SOJ
//! promise an output order (ascending key).

use std::collections::HashMap;

use crate::algo::{AlgoId, Role};
use crate::data::Relation;
use crate::error::{Error, Result};
use crate::grouping::{check_directory, directory_lookup};
use crate::hash::MurmurBuildHasher;

const NO_ROW: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, Default)]
pub struct JoinAux<'a> {
    /// Size of the dense build-key domain (SPHJ).
    pub n_groups: Option<usize>,
    /// Sorted build-key directory (BSJ).
    pub group_keys: Option<&'a [u32]>,
}

impl<'a> JoinAux<'a> {
    pub fn dense(n_groups: usize) -> Self {
        JoinAux {
            n_groups: Some(n_groups),
            group_keys: None,
        }
    }

    pub fn directory(group_keys: &'a [u32]) -> Self {
        JoinAux {
            n_groups: None,
            group_keys: Some(group_keys),
        }
    }
}

pub fn join(algo: AlgoId, r: &Relation, s: &Relation, aux: JoinAux<'_>) -> Result<Relation> {
    match algo {
        AlgoId::Hj => Ok(hash_join(r, s)),
        AlgoId::Sphj => {
            let n = aux.n_groups.ok_or(Error::MissingAux {
                algo,
                what: "dense key domain size",
            })?;
            sph_join(r, s, n)
        }
        AlgoId::Oj => order_join(r, s),
        AlgoId::Soj => Ok(sort_order_join(r, s)),
        AlgoId::Bsj => {
            let keys = aux.group_keys.ok_or(Error::MissingAux {
                algo,
                what: "sorted build-key directory",
            })?;
            binary_search_join(r, s, keys)
        }
        _ => Err(Error::WrongRole {
            algo,
            role: Role::Join,
        }),
    }
}

struct Output<'r> {
    key: Vec<u32>,
    payload: Option<Vec<u64>>,
    r_payload: Option<&'r [u64]>,
}

impl<'r> Output<'r> {
    fn new(r: &'r Relation, capacity: usize) -> Self {
        Output {
            key: Vec::with_capacity(capacity),
            payload: r.payload().map(|_| Vec::with_capacity(capacity)),
            r_payload: r.payload(),
        }
    }

    #[inline]
    fn push(&mut self, key: u32, r_row: usize) {
        self.key.push(key);
        if let (Some(out), Some(p)) = (self.payload.as_mut(), self.r_payload) {
            out.push(p[r_row]);
        }
    }

    fn finish(self) -> Relation {
        Relation::new(self.key, self.payload).expect("columns grow in lockstep")
    }
}

/// Hash join: chained hash table on r, probed by every s row. Duplicate
/// build keys are allowed.
pub fn hash_join(r: &Relation, s: &Relation) -> Relation {
    let mut heads: HashMap<u32, u32, MurmurBuildHasher> = HashMap::default();
    let mut next = vec![NO_ROW; r.n_rows()];
    for (i, &k) in r.keys().iter().enumerate() {
        let head = heads.entry(k).or_insert(NO_ROW);
        next[i] = *head;
        *head = i as u32;
    }
    let mut out = Output::new(r, s.n_rows());
    for &k in s.keys() {
        let mut row = heads.get(&k).copied().unwrap_or(NO_ROW);
        while row != NO_ROW {
            out.push(k, row as usize);
            row = next[row as usize];
        }
    }
    out.finish()
}

/// Static perfect hash join: r's keys index a direct array. Build keys
/// must be unique and below `n_groups`.
pub fn sph_join(r: &Relation, s: &Relation, n_groups: usize) -> Result<Relation> {
    let mut slots = vec![NO_ROW; n_groups];
    for (row, &key) in r.keys().iter().enumerate() {
        let slot =
            slots
                .get_mut(key as usize)
                .ok_or(Error::KeyOutOfRange { key, row, n_groups })?;
        if *slot != NO_ROW {
            return Err(Error::DuplicateBuildKey { key });
        }
        *slot = row as u32;
    }
    let mut out = Output::new(r, s.n_rows());
    for &k in s.keys() {
        if let Some(&row) = slots.get(k as usize) {
            if row != NO_ROW {
                out.push(k, row as usize);
            }
        }
    }
    Ok(out.finish())
}

fn check_sorted_from(keys: &[u32], from: usize, side: &'static str) -> Result<()> {
    let start = from.saturating_sub(1);
    match keys[start..].windows(2).position(|w| w[0] > w[1]) {
        Some(p) => Err(Error::UnsortedInput {
            side,
            row: start + p + 1,
        }),
        None => Ok(()),
    }
}

/// Merge join over two key-sorted inputs. Order violations are detected
/// while merging.
pub fn order_join(r: &Relation, s: &Relation) -> Result<Relation> {
    let (rk, sk) = (r.keys(), s.keys());
    let mut out = Output::new(r, s.n_rows());
    let (mut i, mut j) = (0usize, 0usize);
    while i < rk.len() && j < sk.len() {
        let (a, b) = (rk[i], sk[j]);
        if a < b {
            i += 1;
            if i < rk.len() && rk[i] < a {
                return Err(Error::UnsortedInput {
                    side: "build",
                    row: i,
                });
            }
        } else if b < a {
            j += 1;
            if j < sk.len() && sk[j] < b {
                return Err(Error::UnsortedInput {
                    side: "probe",
                    row: j,
                });
            }
        } else {
            let r_end = run_end(rk, i, "build")?;
            let s_end = run_end(sk, j, "probe")?;
            for r_row in i..r_end {
                for _ in j..s_end {
                    out.push(a, r_row);
                }
            }
            i = r_end;
            j = s_end;
        }
    }
    check_sorted_from(rk, i, "build")?;
    check_sorted_from(sk, j, "probe")?;
    Ok(out.finish())
}

/// End of the run of keys equal to `keys[start]`; errors if the next key
/// is smaller.
fn run_end(keys: &[u32], start: usize, side: &'static str) -> Result<usize> {
    let k = keys[start];
    let mut end = start + 1;
    while end < keys.len() && keys[end] == k {
        end += 1;
    }
    if end < keys.len() && keys[end] < k {
        return Err(Error::UnsortedInput { side, row: end });
    }
    Ok(end)
}

/// Sort copies of both inputs, then merge.
pub fn sort_order_join(r: &Relation, s: &Relation) -> Relation {
    order_join(&r.sorted_by_key(), &s.sorted_by_key()).expect("sorted copies merge")
}

/// Binary-search join: r's rows are placed in a slot array parallel to a
/// sorted key directory; s rows find their slot by binary search.
pub fn binary_search_join(r: &Relation, s: &Relation, group_keys: &[u32]) -> Result<Relation> {
    check_directory(group_keys)?;
    let mut slots = vec![NO_ROW; group_keys.len()];
    for (row, &key) in r.keys().iter().enumerate() {
        let pos = directory_lookup(group_keys, key).ok_or(Error::KeyNotInDirectory { key })?;
        if slots[pos] != NO_ROW {
            return Err(Error::DuplicateBuildKey { key });
        }
        slots[pos] = row as u32;
    }
    let mut out = Output::new(r, s.n_rows());
    for &k in s.keys() {
        if let Some(pos) = directory_lookup(group_keys, k) {
            let row = slots[pos];
            if row != NO_ROW {
                out.push(k, row as usize);
            }
        }
    }
    Ok(out.finish())
}
