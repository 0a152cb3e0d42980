use std::io::Write;

use serde::Serialize;

use crate::cost::QueryStats;
use crate::error::{Error, Result};
use crate::props::MetaProps;

use super::enumerate::{enumerate, OptResult};
use super::plan::{LogicalPlan, NodeKind};
use super::Mode;

/// Best SQO cost divided by best DQO cost.
pub fn improvement_factor(
    stats: &QueryStats,
    props_r: MetaProps,
    props_s: MetaProps,
) -> Result<f64> {
    let lp = LogicalPlan::new(props_r, props_s);
    let sqo = enumerate(&lp, stats, Mode::Sqo, None)?;
    let dqo = enumerate(&lp, stats, Mode::Dqo, None)?;
    Ok(sqo.best_cost.value() / dqo.best_cost.value())
}

/// One cell of the density × R-sortedness × S-sortedness grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PivotCell {
    pub dense: bool,
    pub r_sorted: bool,
    pub s_sorted: bool,
    pub dqo: OptResult,
    pub sqo: OptResult,
    pub improvement_factor: f64,
}

/// All eight cells, ordered dense before sparse, then R sorted before
/// unsorted, then S sorted before unsorted.
pub fn dp_pivot_table(stats: &QueryStats) -> Result<Vec<PivotCell>> {
    let mut cells = Vec::with_capacity(8);
    for dense in [true, false] {
        for r_sorted in [true, false] {
            for s_sorted in [true, false] {
                let lp = LogicalPlan::for_cell(stats, dense, r_sorted, s_sorted);
                let dqo = enumerate(&lp, stats, Mode::Dqo, None)?;
                let sqo = enumerate(&lp, stats, Mode::Sqo, None)?;
                let improvement_factor = sqo.best_cost.value() / dqo.best_cost.value();
                cells.push(PivotCell {
                    dense,
                    r_sorted,
                    s_sorted,
                    dqo,
                    sqo,
                    improvement_factor,
                });
            }
        }
    }
    Ok(cells)
}

pub const DP_CSV_HEADER: [&str; 9] = [
    "density",
    "r_sorted",
    "s_sorted",
    "mode",
    "join_algo",
    "group_algo",
    "cost",
    "is_best",
    "improvement_factor",
];

/// One surviving DP entry. Join-level entries have `group_algo = "-"`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DpCsvRow {
    pub density: &'static str,
    pub r_sorted: bool,
    pub s_sorted: bool,
    pub mode: String,
    pub join_algo: String,
    pub group_algo: String,
    pub cost: String,
    pub is_best: bool,
    pub improvement_factor: String,
}

pub fn pivot_csv_rows(cells: &[PivotCell]) -> Vec<DpCsvRow> {
    let mut rows = Vec::new();
    for cell in cells {
        for (mode, res) in [(Mode::Sqo, &cell.sqo), (Mode::Dqo, &cell.dqo)] {
            let entries = res.dp_table.join.iter().chain(res.dp_table.group.iter());
            for entry in entries {
                let plan = &entry.plan;
                let algo_name = |kind| {
                    plan.algo_of(kind)
                        .map_or_else(|| "-".to_string(), |a| a.to_string())
                };
                rows.push(DpCsvRow {
                    density: if cell.dense { "dense" } else { "sparse" },
                    r_sorted: cell.r_sorted,
                    s_sorted: cell.s_sorted,
                    mode: mode.to_string(),
                    join_algo: algo_name(NodeKind::Join),
                    group_algo: algo_name(NodeKind::Group),
                    cost: plan.cost.to_string(),
                    is_best: *plan == res.best_plan,
                    improvement_factor: format!("{:.4}", cell.improvement_factor),
                });
            }
        }
    }
    rows
}

pub fn write_pivot_csv(cells: &[PivotCell], out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(DP_CSV_HEADER).map_err(csv_err)?;
    for row in pivot_csv_rows(cells) {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
