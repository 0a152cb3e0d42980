//! Materialised algorithmic views: pre-decided subplans matched against
//! the query before enumeration.
//!
//! A registry file holds one view per line:
//!
//! ```text
//! id;role;sorted_req;dense_req;choice;physicality
//! mav1;group;*;T;SPHG;full
//! ```
//!
//! `sorted_req` and `dense_req` are `T`, `F` or `*`. A `full` view pins
//! `choice`; a `partial` view leaves the algorithm open and only pins the
//! output sortedness `choice` would produce. Blank lines and lines
//! starting with `#` are ignored.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::algo::{AlgoId, Role};
use crate::cost::QueryStats;
use crate::error::{Error, Result};
use crate::optimizer::{applicable, Constraints, LogicalPlan, Mode, NodeConstraint, PlanNode};
use crate::props::{output_sorted, MetaProps};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriState {
    True,
    False,
    Any,
}

impl TriState {
    /// `None` means the value is unknown at matching time; only `Any`
    /// accepts it.
    pub fn accepts(self, value: Option<bool>) -> bool {
        match self {
            TriState::Any => true,
            TriState::True => value == Some(true),
            TriState::False => value == Some(false),
        }
    }

    fn candidates(self) -> &'static [bool] {
        match self {
            TriState::True => &[true],
            TriState::False => &[false],
            TriState::Any => &[true, false],
        }
    }
}

impl fmt::Display for TriState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriState::True => "T",
            TriState::False => "F",
            TriState::Any => "*",
        })
    }
}

impl FromStr for TriState {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "T" | "t" => Ok(TriState::True),
            "F" | "f" => Ok(TriState::False),
            "*" => Ok(TriState::Any),
            other => Err(format!("tri-state must be T, F or *, got {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Physicality {
    Full,
    Partial,
}

impl fmt::Display for Physicality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Physicality::Full => "full",
            Physicality::Partial => "partial",
        })
    }
}

impl FromStr for Physicality {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(Physicality::Full),
            "partial" => Ok(Physicality::Partial),
            other => Err(format!(
                "physicality must be full or partial, got {other:?}"
            )),
        }
    }
}

/// Role plus a predicate over the node's input properties. For a join
/// the predicate applies to the conjunction of both inputs ("all sorted",
/// "all dense").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MavPattern {
    pub role: Role,
    pub sorted: TriState,
    pub dense: TriState,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mav {
    pub id: String,
    pub pattern: MavPattern,
    pub choice: AlgoId,
    pub physicality: Physicality,
}

impl Mav {
    pub fn full(id: &str, role: Role, sorted: TriState, dense: TriState, choice: AlgoId) -> Self {
        Mav {
            id: id.to_string(),
            pattern: MavPattern {
                role,
                sorted,
                dense,
            },
            choice,
            physicality: Physicality::Full,
        }
    }

    pub fn partial(
        id: &str,
        role: Role,
        sorted: TriState,
        dense: TriState,
        choice: AlgoId,
    ) -> Self {
        Mav {
            physicality: Physicality::Partial,
            ..Mav::full(id, role, sorted, dense, choice)
        }
    }

    /// `choice` must have the pattern's role and be applicable (in deep
    /// mode) to every concrete input the pattern admits.
    pub fn validate(&self) -> Result<()> {
        let reject = |reason: String| Error::InapplicableMav {
            id: self.id.clone(),
            reason,
        };
        if self.id.is_empty() || self.id.contains(';') {
            return Err(reject("id must be non-empty and contain no ';'".into()));
        }
        if self.choice.role() != self.pattern.role {
            return Err(reject(format!(
                "{} is not a {} algorithm",
                self.choice, self.pattern.role
            )));
        }
        let arity = match self.pattern.role {
            Role::Join => 2,
            Role::Group => 1,
        };
        for &sorted in self.pattern.sorted.candidates() {
            for &dense in self.pattern.dense.candidates() {
                let inputs = vec![MetaProps::new(sorted, dense, 1, 1); arity];
                if !applicable(self.pattern.role, self.choice, &inputs, Mode::Dqo) {
                    return Err(reject(format!(
                        "{} does not apply to inputs with sorted={sorted}, dense={dense}",
                        self.choice
                    )));
                }
            }
        }
        Ok(())
    }

    fn constraint(&self) -> NodeConstraint {
        match self.physicality {
            Physicality::Full => NodeConstraint::Fixed(self.choice),
            Physicality::Partial => NodeConstraint::OutputSorted(output_sorted(self.choice)),
        }
    }

    pub fn to_line(&self) -> String {
        format!(
            "{};{};{};{};{};{}",
            self.id,
            self.pattern.role,
            self.pattern.sorted,
            self.pattern.dense,
            self.choice,
            self.physicality
        )
    }

    pub fn parse_line(line: &str, line_no: usize) -> Result<Mav> {
        let err = |msg: String| Error::MavParse { line: line_no, msg };
        let fields: Vec<&str> = line.split(';').map(str::trim).collect();
        if fields.len() != 6 {
            return Err(err(format!(
                "expected 6 ';'-separated fields, got {}",
                fields.len()
            )));
        }
        let role = fields[1].parse::<Role>().map_err(|e| err(e.to_string()))?;
        let sorted = fields[2].parse::<TriState>().map_err(err)?;
        let dense = fields[3].parse::<TriState>().map_err(err)?;
        let choice = fields[4]
            .parse::<AlgoId>()
            .map_err(|e| err(e.to_string()))?;
        let physicality = fields[5].parse::<Physicality>().map_err(err)?;
        Ok(Mav {
            id: fields[0].to_string(),
            pattern: MavPattern {
                role,
                sorted,
                dense,
            },
            choice,
            physicality,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MavRegistry {
    mavs: Vec<Mav>,
}

impl MavRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mavs(&self) -> &[Mav] {
        &self.mavs
    }

    pub fn len(&self) -> usize {
        self.mavs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mavs.is_empty()
    }

    pub fn register(mut self, mav: Mav) -> Result<Self> {
        self.add(mav)?;
        Ok(self)
    }

    pub fn add(&mut self, mav: Mav) -> Result<()> {
        mav.validate()?;
        if self.mavs.iter().any(|m| m.id == mav.id) {
            return Err(Error::DuplicateMav(mav.id));
        }
        self.mavs.push(mav);
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut reg = MavRegistry::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            reg.add(Mav::parse_line(line, i + 1)?)?;
        }
        Ok(reg)
    }

    pub fn to_text(&self) -> String {
        self.mavs.iter().map(|m| m.to_line() + "\n").collect()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// A missing file is an empty registry.
    pub fn load_or_default(path: impl AsRef<Path>) -> Result<Self> {
        match fs::read_to_string(path) {
            Ok(text) => Self::parse(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::new()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MavMatch {
    pub node: PlanNode,
    pub mav: Mav,
}

/// What is known about a node's inputs while matching.
#[derive(Debug, Clone, Copy)]
struct KnownInput {
    sorted: Option<bool>,
    dense: Option<bool>,
}

fn first_fit(reg: &MavRegistry, role: Role, input: KnownInput) -> Option<&Mav> {
    reg.mavs.iter().find(|m| {
        m.pattern.role == role
            && m.pattern.sorted.accepts(input.sorted)
            && m.pattern.dense.accepts(input.dense)
    })
}

/// Greedy first-fit matching, at most one view per node. Input properties
/// are derived bottom-up so the grouping node sees what a matched join
/// produces; the result is listed top-down. In shallow mode density is
/// unknown, so only density-agnostic patterns can match.
pub fn match_plan(
    reg: &MavRegistry,
    lp: &LogicalPlan,
    _stats: &QueryStats,
    mode: Mode,
) -> Vec<MavMatch> {
    let know_density = mode == Mode::Dqo;
    let all_dense = lp.r.dense && lp.s.dense;
    let join_input = KnownInput {
        sorted: Some(lp.r.sorted && lp.s.sorted),
        dense: know_density.then_some(all_dense),
    };
    let join_match = first_fit(reg, Role::Join, join_input);

    let join_out_sorted = join_match.map(|m| output_sorted(m.choice));
    let group_input = KnownInput {
        sorted: join_out_sorted,
        dense: know_density.then_some(all_dense),
    };
    let group_match = first_fit(reg, Role::Group, group_input);

    let mut out = Vec::new();
    if let Some(m) = group_match {
        out.push(MavMatch {
            node: PlanNode::Group,
            mav: m.clone(),
        });
    }
    if let Some(m) = join_match {
        out.push(MavMatch {
            node: PlanNode::Join,
            mav: m.clone(),
        });
    }
    out
}

/// Constraints that replace matched nodes by their views.
pub fn apply(_lp: &LogicalPlan, matches: &[MavMatch]) -> Constraints {
    let mut c = Constraints::default();
    for m in matches {
        c.set(m.node, m.mav.constraint());
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::enumerate;
    use TriState::{Any, False, True};

    fn cell(dense: bool, r_sorted: bool, s_sorted: bool) -> LogicalPlan {
        LogicalPlan::for_cell(&QueryStats::DEFAULT, dense, r_sorted, s_sorted)
    }

    #[test]
    fn register_and_reject() {
        let reg = MavRegistry::new()
            .register(Mav::full("mav1", Role::Group, Any, True, AlgoId::Sphg))
            .unwrap();
        assert_eq!(reg.len(), 1);

        let err = reg
            .clone()
            .register(Mav::full("mav2", Role::Group, Any, False, AlgoId::Sphg))
            .unwrap_err();
        assert!(matches!(err, Error::InapplicableMav { .. }));

        let err = reg
            .clone()
            .register(Mav::full("mav1", Role::Group, Any, Any, AlgoId::Hg))
            .unwrap_err();
        assert!(matches!(err, Error::DuplicateMav(_)));

        assert!(MavRegistry::new()
            .register(Mav::full("x", Role::Group, Any, Any, AlgoId::Hj))
            .is_err());
        assert!(MavRegistry::new()
            .register(Mav::full("x", Role::Join, Any, Any, AlgoId::Oj))
            .is_err());
    }

    #[test]
    fn same_pattern_first_wins() {
        let reg = MavRegistry::new()
            .register(Mav::full("a", Role::Group, Any, True, AlgoId::Hg))
            .unwrap()
            .register(Mav::full("b", Role::Group, Any, True, AlgoId::Sphg))
            .unwrap();
        assert_eq!(reg.len(), 2);
        let m = match_plan(
            &reg,
            &cell(true, false, false),
            &QueryStats::DEFAULT,
            Mode::Dqo,
        );
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].mav.id, "a");
    }

    #[test]
    fn density_predicate() {
        let reg = MavRegistry::new()
            .register(Mav::full("g", Role::Group, Any, True, AlgoId::Sphg))
            .unwrap();
        let stats = QueryStats::DEFAULT;
        let dense = match_plan(&reg, &cell(true, false, false), &stats, Mode::Dqo);
        assert_eq!(dense.len(), 1);
        assert_eq!(dense[0].node, PlanNode::Group);
        assert!(match_plan(&reg, &cell(false, false, false), &stats, Mode::Dqo).is_empty());
        assert!(match_plan(&reg, &cell(true, false, false), &stats, Mode::Sqo).is_empty());
    }

    #[test]
    fn two_matches_listed_top_down() {
        let reg = MavRegistry::new()
            .register(Mav::full("j", Role::Join, Any, True, AlgoId::Sphj))
            .unwrap()
            .register(Mav::full("g", Role::Group, Any, True, AlgoId::Sphg))
            .unwrap();
        let m = match_plan(
            &reg,
            &cell(true, false, false),
            &QueryStats::DEFAULT,
            Mode::Dqo,
        );
        let nodes: Vec<PlanNode> = m.iter().map(|x| x.node).collect();
        assert_eq!(nodes, vec![PlanNode::Group, PlanNode::Join]);
    }

    #[test]
    fn grouping_sortedness_needs_a_pinned_join() {
        let sorted_group = Mav::full("g", Role::Group, True, Any, AlgoId::Og);
        let reg = MavRegistry::new().register(sorted_group.clone()).unwrap();
        let stats = QueryStats::DEFAULT;
        assert!(match_plan(&reg, &cell(true, true, true), &stats, Mode::Dqo).is_empty());

        let reg = MavRegistry::new()
            .register(Mav::full("j", Role::Join, True, Any, AlgoId::Oj))
            .unwrap()
            .register(sorted_group)
            .unwrap();
        assert_eq!(
            match_plan(&reg, &cell(true, true, true), &stats, Mode::Dqo).len(),
            2
        );
    }

    #[test]
    fn apply_pins_and_partial_constrains() {
        let lp = cell(true, false, false);
        let stats = QueryStats::DEFAULT;
        let free = enumerate(&lp, &stats, Mode::Dqo, None).unwrap();

        let pin_sphg = MavRegistry::new()
            .register(Mav::full("g", Role::Group, Any, True, AlgoId::Sphg))
            .unwrap();
        let res = enumerate(&lp, &stats, Mode::Dqo, Some(&pin_sphg)).unwrap();
        assert_eq!(res.best_cost.value(), 220_000.0);
        assert!(res.enumerated_state_count < free.enumerated_state_count);

        let pin_hg = MavRegistry::new()
            .register(Mav::full("g", Role::Group, Any, Any, AlgoId::Hg))
            .unwrap();
        let res = enumerate(&lp, &stats, Mode::Dqo, Some(&pin_hg)).unwrap();
        assert_eq!(res.best_cost.value(), 490_000.0);

        // Partial: grouping output must be unsorted, so only HG remains.
        let partial = MavRegistry::new()
            .register(Mav::partial("p", Role::Group, Any, Any, AlgoId::Hg))
            .unwrap();
        let res = enumerate(&lp, &stats, Mode::Dqo, Some(&partial)).unwrap();
        assert_eq!(res.best_plan.summary(), "SPHJ→HG");

        let empty = enumerate(&lp, &stats, Mode::Dqo, Some(&MavRegistry::new())).unwrap();
        assert_eq!(empty, free);
    }

    #[test]
    fn registry_text_round_trip() {
        let text = "# views\nmav1;group;*;T;SPHG;full\n\nmav2;join;F;F;BSJ;partial\n";
        let reg = MavRegistry::parse(text).unwrap();
        assert_eq!(reg.len(), 2);
        assert_eq!(reg.mavs()[1].physicality, Physicality::Partial);
        assert_eq!(MavRegistry::parse(&reg.to_text()).unwrap(), reg);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = MavRegistry::parse("a;group;*;T;SPHG;full\nb;group;?;T;SPHG;full").unwrap_err();
        assert!(matches!(err, Error::MavParse { line: 2, .. }));
        let err = MavRegistry::parse("a;group;*;T").unwrap_err();
        assert!(matches!(err, Error::MavParse { line: 1, .. }));
        let err = MavRegistry::parse("a;group;*;T;NOPE;full").unwrap_err();
        assert!(matches!(err, Error::MavParse { line: 1, .. }));
    }
}
