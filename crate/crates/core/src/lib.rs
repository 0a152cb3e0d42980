//! A small query engine for deep query optimisation experiments.
//!
//! * [`data`], [`io`], [`oracle`]: relations, seeded generators, the binary
//!   file format and naive reference operators.
//! * [`grouping`], [`join`]: hash, static perfect hash, order, sort+order and
//!   binary search variants of grouping and FK equi-join.
//! * [`props`]: meta-relational properties (sortedness, density,
//!   cardinalities), inference and propagation.
//! * [`cost`]: abstract cost formulas.
//! * [`optimizer`]: applicability rules, DP enumeration in shallow (SQO) and
//!   deep (DQO) mode, the pivot table and plan execution.
//! * [`mav`]: materialised algorithmic views and matching.
//! * [`bench`]: timing harness for the grouping variants.

pub mod algo;
pub mod bench;
pub mod cost;
pub mod data;
pub mod error;
pub mod grouping;
pub mod hash;
pub mod io;
pub mod join;
pub mod mav;
pub mod optimizer;
pub mod oracle;
pub mod props;

pub use algo::{AlgoId, Role};
pub use cost::{Cost, QueryStats};
pub use data::{
    generate_dataset, generate_fk_pair, DatasetSpec, FkSpec, GroupEntry, GroupResult, Relation,
};
pub use error::{Error, Result};
pub use props::{infer_props, MetaProps};
