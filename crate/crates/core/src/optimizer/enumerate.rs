use std::cmp::Ordering;

use crate::algo::{AlgoId, Role};
use crate::cost::{grouping_cost, join_cost, Cost, QueryStats};
use crate::error::{Error, Result};
use crate::mav::{self, MavRegistry};
use crate::props::{output_sorted, propagate, MetaProps};

use super::plan::{BaseRel, LogicalPlan, NodeKind, PhysioPlan, PlanNode};
use super::{applicable, Mode};

/// DP state key: the property vector of a subplan's output. Density is
/// masked out in shallow mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey {
    pub sorted: bool,
    pub dense: Option<bool>,
    pub n_rows: u64,
    pub n_groups: u64,
}

impl StateKey {
    pub fn of(props: &MetaProps, mode: Mode) -> Self {
        StateKey {
            sorted: props.sorted,
            dense: (mode == Mode::Dqo).then_some(props.dense),
            n_rows: props.n_rows,
            n_groups: props.n_groups,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpEntry {
    pub key: StateKey,
    pub plan: PhysioPlan,
}

/// Surviving entries per subplan.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DpTable {
    pub r: Vec<DpEntry>,
    pub s: Vec<DpEntry>,
    pub join: Vec<DpEntry>,
    pub group: Vec<DpEntry>,
}

impl DpTable {
    pub fn root(&self) -> &[DpEntry] {
        &self.group
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub best_plan: PhysioPlan,
    pub best_cost: Cost,
    pub dp_table: DpTable,
    pub enumerated_state_count: usize,
}

/// What the enumerator may choose at one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NodeConstraint {
    #[default]
    Free,
    /// Algorithm pinned.
    Fixed(AlgoId),
    /// Algorithm open, output sortedness pinned.
    OutputSorted(bool),
}

impl NodeConstraint {
    pub fn allows(self, algo: AlgoId) -> bool {
        match self {
            NodeConstraint::Free => true,
            NodeConstraint::Fixed(a) => a == algo,
            NodeConstraint::OutputSorted(s) => output_sorted(algo) == s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Constraints {
    pub join: NodeConstraint,
    pub group: NodeConstraint,
}

impl Constraints {
    pub fn get(&self, node: PlanNode) -> NodeConstraint {
        match node {
            PlanNode::Join => self.join,
            PlanNode::Group => self.group,
        }
    }

    pub fn set(&mut self, node: PlanNode, c: NodeConstraint) {
        match node {
            PlanNode::Join => self.join = c,
            PlanNode::Group => self.group = c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pruning {
    /// Keep the cheapest plan per distinct property vector.
    #[default]
    PerProperties,
    /// Keep everything.
    None,
}

/// Cheaper wins; equal costs fall back to the family preference of the
/// algorithms, compared bottom-up.
fn compare_plans(a: &PhysioPlan, b: &PhysioPlan) -> Ordering {
    a.cost
        .value()
        .total_cmp(&b.cost.value())
        .then_with(|| a.tie_rank().cmp(&b.tie_rank()))
}

fn insert(entries: &mut Vec<DpEntry>, entry: DpEntry, pruning: Pruning) {
    if pruning == Pruning::PerProperties {
        if let Some(existing) = entries.iter_mut().find(|e| e.key == entry.key) {
            if compare_plans(&entry.plan, &existing.plan) == Ordering::Less {
                *existing = entry;
            }
            return;
        }
    }
    entries.push(entry);
}

/// Exhaustive bottom-up enumeration. With a registry, matched subplans are
/// pinned before enumeration starts.
pub fn enumerate(
    lp: &LogicalPlan,
    stats: &QueryStats,
    mode: Mode,
    mavs: Option<&MavRegistry>,
) -> Result<OptResult> {
    let constraints = match mavs {
        Some(reg) => mav::apply(lp, &mav::match_plan(reg, lp, stats, mode)),
        None => Constraints::default(),
    };
    enumerate_with(lp, stats, mode, &constraints, Pruning::PerProperties)
}

pub fn enumerate_with(
    lp: &LogicalPlan,
    stats: &QueryStats,
    mode: Mode,
    constraints: &Constraints,
    pruning: Pruning,
) -> Result<OptResult> {
    stats.validate()?;
    let mut table = DpTable::default();
    let mut states = 0usize;

    for (rel, props, slot) in [
        (BaseRel::R, lp.r, &mut table.r),
        (BaseRel::S, lp.s, &mut table.s),
    ] {
        states += 1;
        slot.push(DpEntry {
            key: StateKey::of(&props, mode),
            plan: PhysioPlan::base(rel, props),
        });
    }

    for r in &table.r {
        for s in &table.s {
            let inputs = [r.plan.out_props, s.plan.out_props];
            for algo in AlgoId::JOIN {
                if !constraints.join.allows(algo) || !applicable(Role::Join, algo, &inputs, mode) {
                    continue;
                }
                states += 1;
                // The build side has unique keys, so its key count is |R|.
                let own = join_cost(
                    algo,
                    stats.n_r,
                    stats.n_s,
                    stats.n_r,
                    inputs[0].sorted,
                    inputs[1].sorted,
                )?;
                let out_props = propagate(Role::Join, algo, &inputs, stats)?;
                let plan = PhysioPlan {
                    kind: NodeKind::Join,
                    algo: Some(algo),
                    out_props,
                    cost: own + r.plan.cost + s.plan.cost,
                    children: vec![r.plan.clone(), s.plan.clone()],
                };
                let key = StateKey::of(&out_props, mode);
                insert(&mut table.join, DpEntry { key, plan }, pruning);
            }
        }
    }
    if table.join.is_empty() {
        return Err(Error::Infeasible(Role::Join));
    }

    let mut group = Vec::new();
    for input in &table.join {
        let in_props = input.plan.out_props;
        for algo in AlgoId::GROUPING {
            if !constraints.group.allows(algo) || !applicable(Role::Group, algo, &[in_props], mode)
            {
                continue;
            }
            states += 1;
            let own = grouping_cost(algo, stats.join_out, stats.group_out, in_props.sorted)?;
            let out_props = propagate(Role::Group, algo, &[in_props], stats)?;
            let plan = PhysioPlan {
                kind: NodeKind::Group,
                algo: Some(algo),
                out_props,
                cost: own + input.plan.cost,
                children: vec![input.plan.clone()],
            };
            let key = StateKey::of(&out_props, mode);
            insert(&mut group, DpEntry { key, plan }, pruning);
        }
    }
    table.group = group;

    let best_plan = table
        .group
        .iter()
        .map(|e| &e.plan)
        .min_by(|a, b| compare_plans(a, b))
        .cloned()
        .ok_or(Error::Infeasible(Role::Group))?;

    Ok(OptResult {
        best_cost: best_plan.cost,
        best_plan,
        dp_table: table,
        enumerated_state_count: states,
    })
}
