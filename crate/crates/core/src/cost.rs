//! Abstract cost formulas for the grouping and join variants.
//!
//! | family             | grouping            | join                                   |
//! |--------------------|---------------------|----------------------------------------|
//! | hash               | 4·n                 | 4·(r + s)                              |
//! | order              | n                   | r + s                                  |
//! | sort + order       | n·log2(n) + n       | r·log2(r) + s·log2(s) + r + s          |
//! | static perfect hash| n                   | r + s                                  |
//! | binary search      | n·log2(#groups)     | (r + s)·log2(#groups)                  |
//!
//! Sort terms are charged only for inputs that are not already sorted.

use std::fmt;
use std::ops::Add;

use crate::algo::{AlgoId, Role};
use crate::error::{Error, Result};

/// Cardinalities of the example query: |R|, |S|, |R ⋈ S| and the number of
/// result groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryStats {
    pub n_r: u64,
    pub n_s: u64,
    pub join_out: u64,
    pub group_out: u64,
}

impl QueryStats {
    pub const DEFAULT: QueryStats = QueryStats {
        n_r: 40_000,
        n_s: 90_000,
        join_out: 90_000,
        group_out: 20_000,
    };

    pub fn new(n_r: u64, n_s: u64, join_out: u64, group_out: u64) -> Result<Self> {
        let stats = QueryStats {
            n_r,
            n_s,
            join_out,
            group_out,
        };
        stats.validate()?;
        Ok(stats)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_r == 0 || self.n_s == 0 || self.join_out == 0 || self.group_out == 0 {
            return Err(Error::InvalidStats(format!(
                "all cardinalities must be positive: {self:?}"
            )));
        }
        if self.group_out > self.join_out {
            return Err(Error::InvalidStats(format!(
                "group_out ({}) exceeds join_out ({})",
                self.group_out, self.join_out
            )));
        }
        Ok(())
    }
}

impl Default for QueryStats {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Non-negative abstract cost.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Cost(f64);

impl Cost {
    pub const ZERO: Cost = Cost(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(Cost(value))
        } else {
            Err(Error::InvalidCostInput(format!(
                "cost {value} is not finite and non-negative"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Add for Cost {
    type Output = Cost;

    fn add(self, rhs: Cost) -> Cost {
        Cost(self.0 + rhs.0)
    }
}

impl std::iter::Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, Add::add)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.1}", self.0)
    }
}

fn sort_term(n: f64, sorted: bool) -> f64 {
    if sorted {
        0.0
    } else {
        n * n.log2()
    }
}

pub fn grouping_cost(algo: AlgoId, n: u64, n_groups: u64, input_sorted: bool) -> Result<Cost> {
    if n == 0 {
        return Err(Error::InvalidCostInput(
            "grouping input must be non-empty".into(),
        ));
    }
    let n_f = n as f64;
    let value = match algo {
        AlgoId::Hg => 4.0 * n_f,
        AlgoId::Og | AlgoId::Sphg => n_f,
        AlgoId::Sog => sort_term(n_f, input_sorted) + n_f,
        AlgoId::Bsg => {
            if n_groups == 0 {
                return Err(Error::InvalidCostInput(
                    "BSG needs at least one group".into(),
                ));
            }
            n_f * (n_groups as f64).log2()
        }
        _ => {
            return Err(Error::WrongRole {
                algo,
                role: Role::Group,
            })
        }
    };
    Cost::new(value)
}

pub fn join_cost(
    algo: AlgoId,
    n_r: u64,
    n_s: u64,
    n_groups: u64,
    r_sorted: bool,
    s_sorted: bool,
) -> Result<Cost> {
    if n_r == 0 || n_s == 0 {
        return Err(Error::InvalidCostInput(
            "join inputs must be non-empty".into(),
        ));
    }
    let (r, s) = (n_r as f64, n_s as f64);
    let value = match algo {
        AlgoId::Hj => 4.0 * (r + s),
        AlgoId::Oj | AlgoId::Sphj => r + s,
        AlgoId::Soj => sort_term(r, r_sorted) + sort_term(s, s_sorted) + r + s,
        AlgoId::Bsj => {
            if n_groups == 0 {
                return Err(Error::InvalidCostInput(
                    "BSJ needs at least one group".into(),
                ));
            }
            let lg = (n_groups as f64).log2();
            r * lg + s * lg
        }
        _ => {
            return Err(Error::WrongRole {
                algo,
                role: Role::Join,
            })
        }
    };
    Cost::new(value)
}
