use crate::algo::AlgoId;
use crate::data::{GroupResult, Relation};
use crate::error::{Error, Result};
use crate::grouping::{group, key_directory, GroupAux};
use crate::join::{join, JoinAux};

use super::plan::{BaseRel, NodeKind, PhysioPlan};

/// Turns a join output (key = join key, payload = R.A) into a key-only
/// relation keyed by R.A.
pub fn rekey_by_payload(joined: &Relation) -> Result<Relation> {
    let payload = joined
        .payload()
        .ok_or_else(|| Error::MalformedPlan("join output carries no grouping column".into()))?;
    let key = payload
        .iter()
        .map(|&v| u32::try_from(v).map_err(|_| Error::GroupKeyOverflow(v)))
        .collect::<Result<Vec<u32>>>()?;
    Ok(Relation::from_keys(key))
}

/// Runs the plan's join then its grouping over `r` (R.ID with R.A as
/// payload) and `s` (S.R_ID). Directories for the binary search variants
/// are built from `r`.
pub fn execute_plan(plan: &PhysioPlan, r: &Relation, s: &Relation) -> Result<GroupResult> {
    if plan.kind != NodeKind::Group {
        return Err(Error::MalformedPlan(
            "root must be the grouping node".into(),
        ));
    }
    let join_node = plan
        .children
        .first()
        .filter(|c| c.kind == NodeKind::Join)
        .ok_or_else(|| Error::MalformedPlan("grouping must sit on the join".into()))?;
    let join_algo = join_node
        .algo
        .ok_or_else(|| Error::MalformedPlan("join node has no algorithm".into()))?;
    let group_algo = plan
        .algo
        .ok_or_else(|| Error::MalformedPlan("grouping node has no algorithm".into()))?;
    let r_props = join_node
        .find(NodeKind::Base(BaseRel::R))
        .map(|n| n.out_props)
        .ok_or_else(|| Error::MalformedPlan("join is missing R".into()))?;

    let build_dir;
    let join_aux = match join_algo {
        AlgoId::Sphj => JoinAux::dense(r_props.n_groups as usize),
        AlgoId::Bsj => {
            build_dir = key_directory(r.keys());
            JoinAux::directory(&build_dir)
        }
        _ => JoinAux::default(),
    };
    let joined = join(join_algo, r, s, join_aux)?;
    let grouped_input = rekey_by_payload(&joined)?;

    let group_dir;
    let group_aux = match group_algo {
        AlgoId::Sphg => GroupAux::dense(join_node.out_props.n_groups as usize),
        AlgoId::Bsg => {
            let domain = r
                .payload()
                .ok_or_else(|| Error::MalformedPlan("R carries no grouping column".into()))?
                .iter()
                .map(|&v| u32::try_from(v).map_err(|_| Error::GroupKeyOverflow(v)))
                .collect::<Result<Vec<u32>>>()?;
            group_dir = key_directory(&domain);
            GroupAux::directory(&group_dir)
        }
        _ => GroupAux::default(),
    };
    group(group_algo, &grouped_input, group_aux)
}
