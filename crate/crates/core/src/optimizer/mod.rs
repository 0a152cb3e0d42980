//! Property-aware dynamic programming over the example query
//! `Γ(R.A; COUNT) ( R ⋈ S )`.
//!
//! Shallow mode (SQO) plans with sortedness only. Deep mode (DQO) also
//! sees density, which unlocks the static perfect hash variants on dense
//! data and the binary search variants on sparse data.

mod enumerate;
mod execute;
mod pivot;
mod plan;

use std::fmt;
use std::str::FromStr;

use crate::algo::{AlgoId, Family, Role};
use crate::error::Error;
use crate::props::MetaProps;

pub use enumerate::{
    enumerate, enumerate_with, Constraints, DpEntry, DpTable, NodeConstraint, OptResult, Pruning,
    StateKey,
};
pub use execute::{execute_plan, rekey_by_payload};
pub use pivot::{
    dp_pivot_table, improvement_factor, pivot_csv_rows, write_pivot_csv, DpCsvRow, PivotCell,
    DP_CSV_HEADER,
};
pub use plan::{BaseRel, LogicalPlan, NodeKind, PhysioPlan, PlanNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Sqo,
    Dqo,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sqo => "SQO",
            Mode::Dqo => "DQO",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sqo" => Ok(Mode::Sqo),
            "dqo" => Ok(Mode::Dqo),
            other => Err(Error::UnknownAlgo(format!("mode {other}"))),
        }
    }
}

/// Whether `algo` may implement a `role` node over inputs with the given
/// properties.
///
/// Hash and sort-based variants always apply; order-based ones need every
/// input sorted. Static perfect hashing needs dense inputs and binary
/// search is reserved for non-dense ones; both are DQO-only because SQO
/// does not know density.
pub fn applicable(role: Role, algo: AlgoId, inputs: &[MetaProps], mode: Mode) -> bool {
    if algo.role() != role {
        return false;
    }
    let all_dense = inputs.iter().all(|p| p.dense);
    match algo.family() {
        Family::Hash | Family::SortOrderBased => true,
        Family::OrderBased => inputs.iter().all(|p| p.sorted),
        Family::StaticPerfectHash => mode == Mode::Dqo && all_dense,
        Family::BinarySearch => mode == Mode::Dqo && !all_dense,
    }
}
