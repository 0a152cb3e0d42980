//! Column-oriented relations, grouping results and the seeded dataset
//! generators.
//!
//! Generation is a pure function of the seed. The PRNG is ChaCha8
//! (`rand_chacha::ChaCha8Rng::seed_from_u64`); per-row group picks use
//! `Rng::gen_range` over the chosen key list and sparse key sets are drawn
//! with `rand::seq::index::sample` over `[0, 2^32)`.

use rand::seq::index;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A keyed column with an optional payload column.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Relation {
    key: Vec<u32>,
    payload: Option<Vec<u64>>,
}

impl Relation {
    pub fn new(key: Vec<u32>, payload: Option<Vec<u64>>) -> Result<Self> {
        if let Some(p) = &payload {
            if p.len() != key.len() {
                return Err(Error::InvalidRelation(format!(
                    "payload has {} entries but key has {}",
                    p.len(),
                    key.len()
                )));
            }
        }
        Ok(Relation { key, payload })
    }

    pub fn from_keys(key: Vec<u32>) -> Self {
        Relation { key, payload: None }
    }

    pub fn keys(&self) -> &[u32] {
        &self.key
    }

    pub fn payload(&self) -> Option<&[u64]> {
        self.payload.as_deref()
    }

    pub fn n_rows(&self) -> usize {
        self.key.len()
    }

    pub fn is_empty(&self) -> bool {
        self.key.is_empty()
    }

    pub fn into_parts(self) -> (Vec<u32>, Option<Vec<u64>>) {
        (self.key, self.payload)
    }

    /// The value a SUM aggregate adds for row `i`: the payload when
    /// present, the key otherwise.
    #[inline]
    pub fn sum_value(&self, i: usize) -> u64 {
        match &self.payload {
            Some(p) => p[i],
            None => self.key[i] as u64,
        }
    }

    /// Copy of this relation ordered by key. Payload rows travel with
    /// their keys; the sort is stable.
    pub fn sorted_by_key(&self) -> Relation {
        match &self.payload {
            None => {
                let mut key = self.key.clone();
                key.sort_unstable();
                Relation { key, payload: None }
            }
            Some(p) => {
                let mut rows: Vec<(u32, u64)> =
                    self.key.iter().copied().zip(p.iter().copied()).collect();
                rows.sort_by_key(|r| r.0);
                let (key, payload) = rows.into_iter().unzip();
                Relation {
                    key,
                    payload: Some(payload),
                }
            }
        }
    }
}

/// Source of the value a SUM aggregate adds for a row.
pub(crate) trait SumValues: Copy {
    fn value(self, row: usize, key: u32) -> u64;
}

/// Key-only relations sum the key itself.
#[derive(Clone, Copy)]
pub(crate) struct KeyAsValue;

impl SumValues for KeyAsValue {
    #[inline(always)]
    fn value(self, _row: usize, key: u32) -> u64 {
        key as u64
    }
}

impl SumValues for &[u64] {
    #[inline(always)]
    fn value(self, row: usize, _key: u32) -> u64 {
        self[row]
    }
}

/// Runs `$body` with `$keys: &[u32]` and `$values: impl SumValues`,
/// monomorphised once per payload layout.
macro_rules! with_values {
    ($rel:expr, |$keys:ident, $values:ident| $body:expr) => {{
        let rel: &$crate::data::Relation = $rel;
        let $keys = rel.keys();
        match rel.payload() {
            None => {
                let $values = $crate::data::KeyAsValue;
                $body
            }
            Some(p) => {
                let $values = p;
                $body
            }
        }
    }};
}
pub(crate) use with_values;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetSpec {
    pub n_rows: usize,
    pub n_groups: usize,
    pub sorted: bool,
    pub dense: bool,
    pub seed: u64,
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_groups == 0 {
            return Err(Error::InvalidSpec("n_groups must be at least 1".into()));
        }
        if self.n_groups > self.n_rows {
            return Err(Error::InvalidSpec(format!(
                "n_groups ({}) exceeds n_rows ({})",
                self.n_groups, self.n_rows
            )));
        }
        if self.n_groups as u64 > 1u64 << 32 {
            return Err(Error::InvalidSpec(
                "n_groups exceeds the 32-bit key domain".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GroupEntry {
    pub key: u32,
    pub count: u64,
    pub sum: u64,
}

impl GroupEntry {
    pub fn new(key: u32, count: u64, sum: u64) -> Self {
        GroupEntry { key, count, sum }
    }
}

/// Per-group COUNT and SUM.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupResult {
    pub entries: Vec<GroupEntry>,
}

impl GroupResult {
    pub fn new(entries: Vec<GroupEntry>) -> Self {
        GroupResult { entries }
    }

    /// Canonical form: ascending key.
    pub fn canonical(mut self) -> Self {
        self.entries.sort_unstable_by_key(|e| e.key);
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_count(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }

    /// (Σ count, Σ sum), wrapping. Used as a benchmark checksum.
    pub fn checksum(&self) -> (u64, u64) {
        self.entries.iter().fold((0u64, 0u64), |(c, s), e| {
            (c.wrapping_add(e.count), s.wrapping_add(e.sum))
        })
    }

    pub fn is_key_ascending(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].key < w[1].key)
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` distinct keys, ascending. Dense draws `{0, …, count-1}`; sparse
/// draws uniformly without replacement from the whole 32-bit domain and
/// never returns the dense set.
fn draw_key_set(rng: &mut ChaCha8Rng, count: usize, dense: bool) -> Vec<u32> {
    if dense || count == 0 {
        return (0..count as u64).map(|k| k as u32).collect();
    }
    loop {
        let mut keys: Vec<u32> = index::sample(rng, 1usize << 32, count)
            .into_iter()
            .map(|k| k as u32)
            .collect();
        keys.sort_unstable();
        let is_dense_by_accident = keys.last().is_none_or(|&m| m as usize == count - 1);
        if !is_dense_by_accident {
            return keys;
        }
    }
}

/// Group indices in `[0, n_groups)` for `n_rows` rows, every group present
/// at least once, the remainder uniform.
fn draw_assignment(rng: &mut ChaCha8Rng, n_rows: usize, n_groups: usize) -> Vec<u32> {
    let mut idx: Vec<u32> = Vec::with_capacity(n_rows);
    idx.extend((0..n_groups).map(|g| g as u32));
    idx.extend((n_groups..n_rows).map(|_| rng.gen_range(0..n_groups) as u32));
    idx
}

/// Generates a key-only relation with exactly `spec.n_groups` distinct keys.
pub fn generate_dataset(spec: &DatasetSpec) -> Result<Relation> {
    spec.validate()?;
    let mut rng = rng_for(spec.seed);
    let key_set = draw_key_set(&mut rng, spec.n_groups, spec.dense);
    let mut idx = draw_assignment(&mut rng, spec.n_rows, spec.n_groups);
    if spec.sorted {
        // key_set is ascending, so sorting indices sorts keys.
        idx.sort_unstable();
    } else {
        idx.shuffle(&mut rng);
    }
    let key = idx.into_iter().map(|i| key_set[i as usize]).collect();
    Ok(Relation::from_keys(key))
}

/// Shape of the R ⋈ S foreign-key pair used by the example query
/// `SELECT R.A, COUNT(*) FROM R JOIN S ON R.ID = S.R_ID GROUP BY R.A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FkSpec {
    pub n_r: usize,
    pub n_s: usize,
    /// Distinct values of R.A.
    pub n_groups: usize,
    pub r_sorted: bool,
    pub s_sorted: bool,
    /// Applies to R.ID, S.R_ID and R.A alike.
    pub dense: bool,
    pub seed: u64,
}

impl FkSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_r == 0 {
            return Err(Error::InvalidSpec("R must not be empty".into()));
        }
        if self.n_groups == 0 || self.n_groups > self.n_r {
            return Err(Error::InvalidSpec(format!(
                "n_groups ({}) must be in [1, |R| = {}]",
                self.n_groups, self.n_r
            )));
        }
        Ok(())
    }
}

/// Generates `(R, S)`: R has unique keys (R.ID) and carries R.A as its
/// payload; every S key references some R key. R.A is non-decreasing in
/// R.ID, so an output ordered by the join key is also partitioned by R.A.
pub fn generate_fk_pair(spec: &FkSpec) -> Result<(Relation, Relation)> {
    spec.validate()?;
    let mut rng = rng_for(spec.seed);

    let ids = draw_key_set(&mut rng, spec.n_r, spec.dense);
    let domain = draw_key_set(&mut rng, spec.n_groups, spec.dense);
    let mut a_idx = draw_assignment(&mut rng, spec.n_r, spec.n_groups);
    a_idx.sort_unstable();
    let mut r_rows: Vec<(u32, u64)> = ids
        .iter()
        .zip(&a_idx)
        .map(|(&id, &a)| (id, domain[a as usize] as u64))
        .collect();
    if !spec.r_sorted {
        r_rows.shuffle(&mut rng);
    }
    let (r_key, r_payload): (Vec<u32>, Vec<u64>) = r_rows.into_iter().unzip();

    let covered = spec.n_s.min(spec.n_r);
    let mut s_idx: Vec<u32> = if spec.n_s >= spec.n_r {
        draw_assignment(&mut rng, spec.n_s, spec.n_r)
    } else {
        index::sample(&mut rng, spec.n_r, covered)
            .into_iter()
            .map(|i| i as u32)
            .collect()
    };
    if spec.s_sorted {
        s_idx.sort_unstable();
    } else {
        s_idx.shuffle(&mut rng);
    }
    let s_key = s_idx.into_iter().map(|i| ids[i as usize]).collect();

    Ok((
        Relation::new(r_key, Some(r_payload))?,
        Relation::from_keys(s_key),
    ))
}
