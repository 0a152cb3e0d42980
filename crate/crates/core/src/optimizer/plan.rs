use std::fmt::Write as _;

use crate::algo::{AlgoId, Family, Role};
use crate::cost::{Cost, QueryStats};
use crate::props::MetaProps;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseRel {
    R,
    S,
}

/// Node positions of the fixed query shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlanNode {
    Group,
    Join,
}

impl PlanNode {
    pub fn role(self) -> Role {
        match self {
            PlanNode::Group => Role::Group,
            PlanNode::Join => Role::Join,
        }
    }
}

/// `Γ(R.A; COUNT)` over `R ⋈ S`, with the properties of both base
/// relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogicalPlan {
    pub r: MetaProps,
    pub s: MetaProps,
}

impl LogicalPlan {
    pub fn new(r: MetaProps, s: MetaProps) -> Self {
        LogicalPlan { r, s }
    }

    /// Base properties for one cell of the property grid. Density is shared
    /// by both inputs; R's key is unique.
    pub fn for_cell(stats: &QueryStats, dense: bool, r_sorted: bool, s_sorted: bool) -> Self {
        LogicalPlan {
            r: MetaProps::new(r_sorted, dense, stats.n_r, stats.n_r),
            s: MetaProps::new(s_sorted, dense, stats.n_s, stats.n_s.min(stats.n_r)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Base(BaseRel),
    Join,
    Group,
}

/// A fully physical plan: every non-base node has its algorithm fixed.
/// `cost` is cumulative over the subtree.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysioPlan {
    pub kind: NodeKind,
    pub algo: Option<AlgoId>,
    pub out_props: MetaProps,
    pub cost: Cost,
    pub children: Vec<PhysioPlan>,
}

impl PhysioPlan {
    pub fn base(rel: BaseRel, props: MetaProps) -> Self {
        PhysioPlan {
            kind: NodeKind::Base(rel),
            algo: None,
            out_props: props,
            cost: Cost::ZERO,
            children: Vec::new(),
        }
    }

    /// Algorithms in post-order (children before parents).
    pub fn algos_bottom_up(&self) -> Vec<AlgoId> {
        let mut out = Vec::new();
        self.collect_post_order(&mut out);
        out
    }

    fn collect_post_order(&self, out: &mut Vec<AlgoId>) {
        for c in &self.children {
            c.collect_post_order(out);
        }
        out.extend(self.algo);
    }

    pub(crate) fn tie_rank(&self) -> Vec<Family> {
        self.algos_bottom_up()
            .into_iter()
            .map(AlgoId::family)
            .collect()
    }

    /// First node of the given kind, depth-first.
    pub fn find(&self, kind: NodeKind) -> Option<&PhysioPlan> {
        if self.kind == kind {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(kind))
    }

    pub fn algo_of(&self, kind: NodeKind) -> Option<AlgoId> {
        self.find(kind).and_then(|n| n.algo)
    }

    /// Short form such as `SPHJ→SPHG`.
    pub fn summary(&self) -> String {
        self.algos_bottom_up()
            .iter()
            .map(|a| a.name())
            .collect::<Vec<_>>()
            .join("→")
    }

    /// Indented tree, one node per line with algorithm, properties and
    /// cumulative cost.
    pub fn explain(&self) -> String {
        let mut out = String::new();
        self.explain_into(&mut out, 0);
        out
    }

    fn explain_into(&self, out: &mut String, depth: usize) {
        let label = match (self.kind, self.algo) {
            (NodeKind::Base(BaseRel::R), _) => "SCAN R".to_string(),
            (NodeKind::Base(BaseRel::S), _) => "SCAN S".to_string(),
            (NodeKind::Join, Some(a)) => format!("JOIN {a}"),
            (NodeKind::Group, Some(a)) => format!("GROUP {a}"),
            (kind, None) => format!("{kind:?}"),
        };
        let _ = writeln!(
            out,
            "{:indent$}{label} {} cost={}",
            "",
            self.out_props,
            self.cost,
            indent = depth * 2
        );
        for c in &self.children {
            c.explain_into(out, depth + 1);
        }
    }
}
