//! Single-threaded timing harness for the grouping variants.

use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::algo::AlgoId;
use crate::data::Relation;
use crate::error::{Error, Result};
use crate::grouping::{group, key_directory, GroupAux};
use crate::props::{infer_props, MetaProps};

pub const BENCH_CSV_HEADER: [&str; 8] = [
    "algo",
    "n_rows",
    "n_groups",
    "sorted",
    "dense",
    "rep_median_ms",
    "checksum_count",
    "checksum_sum",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchOptions {
    pub repetitions: usize,
    pub warmup: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            repetitions: 5,
            warmup: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub algo: AlgoId,
    pub n_rows: u64,
    pub n_groups: u64,
    pub sorted: bool,
    pub dense: bool,
    /// `None` when the algorithm's precondition does not hold for the data.
    pub median_ms: Option<f64>,
    pub checksum: Option<(u64, u64)>,
}

impl BenchRow {
    pub fn is_na(&self) -> bool {
        self.median_ms.is_none()
    }
}

#[derive(Serialize)]
struct CsvRow {
    algo: String,
    n_rows: u64,
    n_groups: u64,
    sorted: bool,
    dense: bool,
    rep_median_ms: String,
    checksum_count: String,
    checksum_sum: String,
}

pub fn median(samples: &mut [f64]) -> f64 {
    assert!(!samples.is_empty(), "median of no samples");
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        (samples[mid - 1] + samples[mid]) / 2.0
    }
}

/// Powers of two from 2^1 to 2^20, clipped to `n_rows`.
pub fn sweep_group_counts(n_rows: usize) -> Vec<usize> {
    (1..=20)
        .map(|e| 1usize << e)
        .filter(|&g| g <= n_rows)
        .collect()
}

/// Whether `algo` can run on data with these properties, given that the
/// harness supplies the group count and key directory.
pub fn bench_applicable(algo: AlgoId, props: &MetaProps) -> bool {
    match algo {
        AlgoId::Og => props.sorted,
        AlgoId::Sphg => props.dense,
        AlgoId::Hg | AlgoId::Sog | AlgoId::Bsg => true,
        _ => false,
    }
}

/// Times one grouping variant: `warmup` unrecorded runs, then the median
/// of `repetitions` runs.
pub fn bench_one(
    algo: AlgoId,
    rel: &Relation,
    props: &MetaProps,
    directory: &[u32],
    opts: BenchOptions,
) -> Result<BenchRow> {
    let mut row = BenchRow {
        algo,
        n_rows: props.n_rows,
        n_groups: props.n_groups,
        sorted: props.sorted,
        dense: props.dense,
        median_ms: None,
        checksum: None,
    };
    if !bench_applicable(algo, props) {
        return Ok(row);
    }
    if opts.repetitions == 0 {
        return Err(Error::InvalidSpec("repetitions must be at least 1".into()));
    }
    let aux = GroupAux {
        n_groups: Some(props.n_groups as usize),
        group_keys: Some(directory),
    };
    for _ in 0..opts.warmup {
        black_box(group(algo, black_box(rel), aux)?);
    }
    let mut samples = Vec::with_capacity(opts.repetitions);
    let mut checksum = (0, 0);
    for _ in 0..opts.repetitions {
        let start = Instant::now();
        let result = group(algo, black_box(rel), aux)?;
        samples.push(start.elapsed().as_secs_f64() * 1e3);
        checksum = black_box(result).checksum();
    }
    row.median_ms = Some(median(&mut samples));
    row.checksum = Some(checksum);
    Ok(row)
}

/// Benchmarks `algos` on one dataset. Properties are inferred from the data
/// and the binary search directory is its sorted distinct keys.
pub fn bench_dataset(
    algos: &[AlgoId],
    rel: &Relation,
    opts: BenchOptions,
) -> Result<Vec<BenchRow>> {
    let props = infer_props(rel);
    let directory = key_directory(rel.keys());
    algos
        .iter()
        .map(|&algo| bench_one(algo, rel, &props, &directory, opts))
        .collect()
}

/// True when every measured row reports the same checksum.
pub fn checksums_agree(rows: &[BenchRow]) -> bool {
    let mut sums = rows.iter().filter_map(|r| r.checksum);
    match sums.next() {
        None => true,
        Some(first) => sums.all(|c| c == first),
    }
}

pub fn write_bench_csv(rows: &[BenchRow], out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(BENCH_CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        let na = || "n/a".to_string();
        w.serialize(CsvRow {
            algo: r.algo.to_string(),
            n_rows: r.n_rows,
            n_groups: r.n_groups,
            sorted: r.sorted,
            dense: r.dense,
            rep_median_ms: r.median_ms.map_or_else(na, |m| format!("{m:.3}")),
            checksum_count: r.checksum.map_or_else(na, |c| c.0.to_string()),
            checksum_sum: r.checksum.map_or_else(na, |c| c.1.to_string()),
        })
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
