//! Algorithm identifiers and operator roles.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Logical role of a non-base plan node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Join,
    Group,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Join => "join",
            Role::Group => "group",
        })
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "join" => Ok(Role::Join),
            "group" => Ok(Role::Group),
            other => Err(Error::UnknownAlgo(format!("role {other}"))),
        }
    }
}

/// The closed set of physical algorithms. Grouping variants end in `G`,
/// their join counterparts in `J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgoId {
    Hg,
    Sphg,
    Og,
    Sog,
    Bsg,
    Hj,
    Sphj,
    Oj,
    Soj,
    Bsj,
}

/// Algorithm family shared by a grouping variant and its join counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    // Declaration order is the tie-break preference.
    OrderBased,
    StaticPerfectHash,
    BinarySearch,
    SortOrderBased,
    Hash,
}

impl AlgoId {
    pub const ALL: [AlgoId; 10] = [
        AlgoId::Hg,
        AlgoId::Sphg,
        AlgoId::Og,
        AlgoId::Sog,
        AlgoId::Bsg,
        AlgoId::Hj,
        AlgoId::Sphj,
        AlgoId::Oj,
        AlgoId::Soj,
        AlgoId::Bsj,
    ];

    pub const GROUPING: [AlgoId; 5] = [
        AlgoId::Hg,
        AlgoId::Sphg,
        AlgoId::Og,
        AlgoId::Sog,
        AlgoId::Bsg,
    ];

    pub const JOIN: [AlgoId; 5] = [
        AlgoId::Hj,
        AlgoId::Sphj,
        AlgoId::Oj,
        AlgoId::Soj,
        AlgoId::Bsj,
    ];

    pub fn for_role(role: Role) -> &'static [AlgoId; 5] {
        match role {
            Role::Join => &Self::JOIN,
            Role::Group => &Self::GROUPING,
        }
    }

    pub fn role(self) -> Role {
        match self {
            AlgoId::Hg | AlgoId::Sphg | AlgoId::Og | AlgoId::Sog | AlgoId::Bsg => Role::Group,
            _ => Role::Join,
        }
    }

    pub fn family(self) -> Family {
        match self {
            AlgoId::Og | AlgoId::Oj => Family::OrderBased,
            AlgoId::Sphg | AlgoId::Sphj => Family::StaticPerfectHash,
            AlgoId::Bsg | AlgoId::Bsj => Family::BinarySearch,
            AlgoId::Sog | AlgoId::Soj => Family::SortOrderBased,
            AlgoId::Hg | AlgoId::Hj => Family::Hash,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AlgoId::Hg => "HG",
            AlgoId::Sphg => "SPHG",
            AlgoId::Og => "OG",
            AlgoId::Sog => "SOG",
            AlgoId::Bsg => "BSG",
            AlgoId::Hj => "HJ",
            AlgoId::Sphj => "SPHJ",
            AlgoId::Oj => "OJ",
            AlgoId::Soj => "SOJ",
            AlgoId::Bsj => "BSJ",
        }
    }
}

impl fmt::Display for AlgoId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgoId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        AlgoId::ALL
            .into_iter()
            .find(|a| a.name() == upper)
            .ok_or_else(|| Error::UnknownAlgo(s.to_string()))
    }
}
