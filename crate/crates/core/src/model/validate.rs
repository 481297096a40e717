use std::collections::BTreeSet;
use std::fmt;

use super::{outcomes, GameTree, Node, NodeId};

/// A violated invariant, with the offending node or information set.
///
/// Violations are data, not failures: an invalid game is representable and
/// every broken rule is reported.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyAgentName,
    DuplicateAgent { name: String },
    RootHasParent,
    MultipleParents { node: String },
    Unreachable { node: String },
    PayoffLength { node: String, got: usize, want: usize },
    EmptyMenu { node: String },
    DuplicateAction { node: String, action: String },
    NotInAnyInfoset { node: String },
    InMultipleInfosets { node: String },
    LeafInInfoset { infoset: String, node: String },
    EmptyInfoset { infoset: String },
    OwnerMismatch { infoset: String, node: String },
    MenuMismatch { infoset: String, node: String },
    AncestorMembers { infoset: String, ancestor: String, descendant: String },
}

impl Violation {
    /// Pointer-style location of the offending element.
    pub fn path(&self) -> String {
        use Violation::*;
        match self {
            EmptyAgentName | DuplicateAgent { .. } => "/agents".into(),
            RootHasParent => "/nodes".into(),
            MultipleParents { node }
            | Unreachable { node }
            | PayoffLength { node, .. }
            | EmptyMenu { node }
            | DuplicateAction { node, .. }
            | NotInAnyInfoset { node }
            | InMultipleInfosets { node } => format!("/nodes/{node}"),
            LeafInInfoset { infoset, .. }
            | EmptyInfoset { infoset }
            | OwnerMismatch { infoset, .. }
            | MenuMismatch { infoset, .. }
            | AncestorMembers { infoset, .. } => format!("/infosets/{infoset}"),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            EmptyAgentName => write!(f, "agent names must be non-empty"),
            DuplicateAgent { name } => write!(f, "duplicate agent {name:?}"),
            RootHasParent => write!(f, "the root node appears as a child"),
            MultipleParents { node } => write!(f, "node {node:?} has more than one parent"),
            Unreachable { node } => write!(f, "node {node:?} is not reachable from the root"),
            PayoffLength { node, got, want } => {
                write!(f, "leaf {node:?} has {got} payoffs for {want} agents")
            }
            EmptyMenu { node } => write!(f, "decision node {node:?} offers no actions"),
            DuplicateAction { node, action } => {
                write!(f, "node {node:?} repeats action {action:?}")
            }
            NotInAnyInfoset { node } => {
                write!(f, "decision node {node:?} belongs to no information set")
            }
            InMultipleInfosets { node } => {
                write!(f, "node {node:?} belongs to more than one information set")
            }
            LeafInInfoset { infoset, node } => {
                write!(f, "information set {infoset:?} lists leaf {node:?}")
            }
            EmptyInfoset { infoset } => write!(f, "information set {infoset:?} has no members"),
            OwnerMismatch { infoset, node } => write!(
                f,
                "member {node:?} of information set {infoset:?} is owned by a different agent"
            ),
            MenuMismatch { infoset, node } => write!(
                f,
                "member {node:?} of information set {infoset:?} offers a different menu"
            ),
            AncestorMembers { infoset, ancestor, descendant } => write!(
                f,
                "information set {infoset:?} contains {ancestor:?} and its descendant {descendant:?}"
            ),
        }
    }
}

/// Every violated invariant; empty means the game is valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every game-tree invariant and reports all violations.
pub fn validate_game(tree: &GameTree) -> ValidationReport {
    let mut v = Vec::new();

    let mut names = BTreeSet::new();
    for agent in tree.agents() {
        if agent.name().is_empty() {
            v.push(Violation::EmptyAgentName);
        }
        if !names.insert(agent.name()) {
            v.push(Violation::DuplicateAgent {
                name: agent.name().to_owned(),
            });
        }
    }

    // Parent multiplicity: every node except the root has exactly one.
    let mut parents = vec![0usize; tree.node_count()];
    for ix in tree.node_indices() {
        if let Node::Decision { children, .. } = tree.node(ix) {
            for child in children {
                parents[child.0] += 1;
            }
        }
    }
    if parents[tree.root().0] > 0 {
        v.push(Violation::RootHasParent);
    }
    for ix in tree.node_indices() {
        if parents[ix.0] > 1 {
            v.push(Violation::MultipleParents {
                node: tree.node_id(ix).to_owned(),
            });
        }
    }

    // Reachability from the root (guards against disconnected cycles too).
    let mut reached = vec![false; tree.node_count()];
    let mut stack = vec![tree.root()];
    while let Some(at) = stack.pop() {
        if std::mem::replace(&mut reached[at.0], true) {
            continue;
        }
        if let Node::Decision { children, .. } = tree.node(at) {
            stack.extend(children.iter().copied());
        }
    }
    for ix in tree.node_indices() {
        if !reached[ix.0] {
            v.push(Violation::Unreachable {
                node: tree.node_id(ix).to_owned(),
            });
        }
    }

    // Per-node shape rules.
    let mut claims = vec![0usize; tree.node_count()];
    for infoset in tree.infosets() {
        for member in &infoset.members {
            claims[member.0] += 1;
        }
    }
    for ix in tree.node_indices() {
        match tree.node(ix) {
            Node::Leaf { payoffs } => {
                if payoffs.len() != tree.agents().len() {
                    v.push(Violation::PayoffLength {
                        node: tree.node_id(ix).to_owned(),
                        got: payoffs.len(),
                        want: tree.agents().len(),
                    });
                }
            }
            Node::Decision { actions, .. } => {
                if actions.is_empty() {
                    v.push(Violation::EmptyMenu {
                        node: tree.node_id(ix).to_owned(),
                    });
                }
                let mut seen = BTreeSet::new();
                for action in actions {
                    if !seen.insert(action.as_str()) {
                        v.push(Violation::DuplicateAction {
                            node: tree.node_id(ix).to_owned(),
                            action: action.clone(),
                        });
                    }
                }
                match claims[ix.0] {
                    0 => v.push(Violation::NotInAnyInfoset {
                        node: tree.node_id(ix).to_owned(),
                    }),
                    1 => {}
                    _ => v.push(Violation::InMultipleInfosets {
                        node: tree.node_id(ix).to_owned(),
                    }),
                }
            }
        }
    }

    // Information-set rules.
    for infoset in tree.infosets() {
        if infoset.members.is_empty() {
            v.push(Violation::EmptyInfoset {
                infoset: infoset.id.clone(),
            });
            continue;
        }
        for member in &infoset.members {
            match tree.node(*member) {
                Node::Leaf { .. } => v.push(Violation::LeafInInfoset {
                    infoset: infoset.id.clone(),
                    node: tree.node_id(*member).to_owned(),
                }),
                Node::Decision { owner, actions, .. } => {
                    if *owner != infoset.owner {
                        v.push(Violation::OwnerMismatch {
                            infoset: infoset.id.clone(),
                            node: tree.node_id(*member).to_owned(),
                        });
                    }
                    if actions != &infoset.menu {
                        v.push(Violation::MenuMismatch {
                            infoset: infoset.id.clone(),
                            node: tree.node_id(*member).to_owned(),
                        });
                    }
                }
            }
        }
        // No member may sit below another: one play would cross the set twice.
        let members: BTreeSet<NodeId> = infoset.members.iter().copied().collect();
        for &member in &infoset.members {
            if tree.node(member).is_leaf() {
                continue;
            }
            let mut stack: Vec<NodeId> = match tree.node(member) {
                Node::Decision { children, .. } => children.clone(),
                Node::Leaf { .. } => vec![],
            };
            let mut seen = BTreeSet::new();
            while let Some(at) = stack.pop() {
                if !seen.insert(at) {
                    continue;
                }
                if members.contains(&at) {
                    v.push(Violation::AncestorMembers {
                        infoset: infoset.id.clone(),
                        ancestor: tree.node_id(member).to_owned(),
                        descendant: tree.node_id(at).to_owned(),
                    });
                }
                if let Node::Decision { children, .. } = tree.node(at) {
                    stack.extend(children.iter().copied());
                }
            }
        }
    }

    ValidationReport { violations: v }
}

/// Payoff-rank collisions, one list of outcome-id pairs per agent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TieReport {
    /// Indexed like the game's agent list; entries are (outcome id, outcome
    /// id, shared rank).
    pub per_agent: Vec<Vec<(String, String, i64)>>,
}

impl TieReport {
    pub fn in_general_position(&self) -> bool {
        self.per_agent.iter().all(|ties| ties.is_empty())
    }
}

impl fmt::Display for TieReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (agent, ties) in self.per_agent.iter().enumerate() {
            for (a, b, rank) in ties {
                writeln!(f, "agent #{agent}: outcomes {a:?} and {b:?} share rank {rank}")?;
            }
        }
        Ok(())
    }
}

/// Lists, per agent, all pairs of outcomes carrying the same utility rank.
/// Empty lists mean the game is in general position.
pub fn general_position_check(tree: &GameTree) -> TieReport {
    let outs = outcomes(tree);
    let mut per_agent = Vec::with_capacity(tree.agents().len());
    for agent in 0..tree.agents().len() {
        let mut ranked: Vec<(i64, &str)> = outs
            .iter()
            .map(|o| (o.payoffs.get(agent), o.id.as_str()))
            .collect();
        ranked.sort();
        let mut ties = Vec::new();
        for pair in ranked.windows(2) {
            if pair[0].0 == pair[1].0 {
                ties.push((pair[0].1.to_owned(), pair[1].1.to_owned(), pair[0].0));
            }
        }
        per_agent.push(ties);
    }
    TieReport { per_agent }
}
