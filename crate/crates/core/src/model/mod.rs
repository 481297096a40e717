//! Game representations: extensive form with imperfect information, and
//! normal form.
//!
//! All payoffs are integer ranks with ordinal meaning. Solvers compare them,
//! never add them, so any order-preserving relabeling of one agent's ranks
//! leaves every solution concept unchanged.
//!
//! Values are immutable after construction and safe to share across threads.

mod normal;
mod validate;

pub use normal::{to_tree, NormalFormGame, StrategyProfile};
pub use validate::{general_position_check, validate_game, TieReport, ValidationReport, Violation};

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Name of an agent, unique within a game.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(String);

impl AgentId {
    pub fn new(name: impl Into<String>) -> Self {
        AgentId(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One integer utility rank per agent, in the game's agent order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PayoffVector(Vec<i64>);

impl PayoffVector {
    pub fn new(ranks: Vec<i64>) -> Self {
        PayoffVector(ranks)
    }

    /// Rank for the agent at `agent` position in the game's agent list.
    pub fn get(&self, agent: usize) -> i64 {
        self.0[agent]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.0.iter().copied()
    }
}

impl fmt::Display for PayoffVector {
    /// Renders as `(p1,p2,...)`, matching how outcomes are reported.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Index of a node within its game tree.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

/// A node of an extensive-form game tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    /// An agent decides here; one child per action, in menu order.
    Decision {
        owner: usize,
        actions: Vec<String>,
        children: Vec<NodeId>,
    },
    /// Terminal node carrying the full payoff vector.
    Leaf { payoffs: PayoffVector },
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf { .. })
    }
}

/// A set of decision nodes indistinguishable to their owner.
///
/// All members must be owned by `owner` and offer exactly `menu`; no member
/// may be an ancestor of another. Those rules are reported by
/// [`validate_game`], not enforced at construction, so that invalid games can
/// be represented and diagnosed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InformationSet {
    pub id: String,
    pub owner: usize,
    pub members: Vec<NodeId>,
    pub menu: Vec<String>,
}

/// A leaf together with its payoffs and the unique root-to-leaf path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    /// The leaf's node id; unique per game.
    pub id: String,
    pub leaf: NodeId,
    pub payoffs: PayoffVector,
    /// (decision node, action index taken there), from the root down.
    pub path: Vec<(NodeId, usize)>,
}

/// Rooted game tree with information sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameTree {
    agents: Vec<AgentId>,
    node_ids: Vec<String>,
    nodes: Vec<Node>,
    root: NodeId,
    infosets: Vec<InformationSet>,
    /// First information set claiming each node, if any.
    node_infoset: Vec<Option<usize>>,
}

/// Structural errors that make a tree unrepresentable (dangling indices,
/// duplicate node ids). Logical invariant violations are data instead: see
/// [`validate_game`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("node index {0} out of range")]
    NodeOutOfRange(usize),
    #[error("agent index {0} out of range")]
    AgentOutOfRange(usize),
    #[error("duplicate node id {0:?}")]
    DuplicateNodeId(String),
    #[error("node id must not be empty")]
    EmptyNodeId,
    #[error("decision node {0:?} has {1} actions but {2} children")]
    ActionChildMismatch(String, usize, usize),
    #[error("agent order is not a permutation of the game's agents")]
    NotAPermutation,
}

impl GameTree {
    /// Builds a tree, checking only that references resolve: children,
    /// owners and members are in range, ids are unique and non-empty, and
    /// each decision node has one child per action.
    pub fn new(
        agents: Vec<AgentId>,
        node_ids: Vec<String>,
        nodes: Vec<Node>,
        root: NodeId,
        infosets: Vec<InformationSet>,
    ) -> Result<Self, ModelError> {
        let n = nodes.len();
        if root.0 >= n {
            return Err(ModelError::NodeOutOfRange(root.0));
        }
        let mut seen = BTreeSet::new();
        for id in &node_ids {
            if id.is_empty() {
                return Err(ModelError::EmptyNodeId);
            }
            if !seen.insert(id.as_str()) {
                return Err(ModelError::DuplicateNodeId(id.clone()));
            }
        }
        assert_eq!(node_ids.len(), n, "one id per node");
        for (ix, node) in nodes.iter().enumerate() {
            if let Node::Decision {
                owner,
                actions,
                children,
            } = node
            {
                if *owner >= agents.len() {
                    return Err(ModelError::AgentOutOfRange(*owner));
                }
                if actions.len() != children.len() {
                    return Err(ModelError::ActionChildMismatch(
                        node_ids[ix].clone(),
                        actions.len(),
                        children.len(),
                    ));
                }
                for child in children {
                    if child.0 >= n {
                        return Err(ModelError::NodeOutOfRange(child.0));
                    }
                }
            }
        }
        let mut node_infoset = vec![None; n];
        for (ix, infoset) in infosets.iter().enumerate() {
            if infoset.owner >= agents.len() {
                return Err(ModelError::AgentOutOfRange(infoset.owner));
            }
            for member in &infoset.members {
                if member.0 >= n {
                    return Err(ModelError::NodeOutOfRange(member.0));
                }
                node_infoset[member.0].get_or_insert(ix);
            }
        }
        Ok(GameTree {
            agents,
            node_ids,
            nodes,
            root,
            infosets,
            node_infoset,
        })
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a.name() == name)
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn node_id(&self, id: NodeId) -> &str {
        &self.node_ids[id.0]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_indices(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn infosets(&self) -> &[InformationSet] {
        &self.infosets
    }

    pub fn infoset(&self, ix: usize) -> &InformationSet {
        &self.infosets[ix]
    }

    /// Information set the node belongs to (first claim wins when a game
    /// violates the exactly-one rule; validation reports such games).
    pub fn node_infoset(&self, id: NodeId) -> Option<usize> {
        self.node_infoset[id.0]
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    /// True when every information set has exactly one member.
    pub fn is_perfect_information(&self) -> bool {
        self.infosets.iter().all(|i| i.members.len() == 1)
    }
}

/// Enumerates one [`Outcome`] per leaf in depth-first, menu order. The order
/// is deterministic: it depends only on the declaration order of nodes and
/// actions.
///
/// Requires a valid game (see [`validate_game`]); cyclic inputs would recurse
/// forever.
pub fn outcomes(tree: &GameTree) -> Vec<Outcome> {
    let mut acc = Vec::new();
    let mut path = Vec::new();
    walk(tree, tree.root(), &mut path, &mut acc);
    acc
}

fn walk(tree: &GameTree, at: NodeId, path: &mut Vec<(NodeId, usize)>, acc: &mut Vec<Outcome>) {
    match tree.node(at) {
        Node::Leaf { payoffs } => acc.push(Outcome {
            id: tree.node_id(at).to_owned(),
            leaf: at,
            payoffs: payoffs.clone(),
            path: path.clone(),
        }),
        Node::Decision { children, .. } => {
            for (action, child) in children.iter().enumerate() {
                path.push((at, action));
                walk(tree, *child, path, acc);
                path.pop();
            }
        }
    }
}

/// Indices into `all` of the surviving outcomes whose path crosses some
/// member of `infoset` taking `action` there.
pub fn outcomes_through(
    tree: &GameTree,
    all: &[Outcome],
    infoset: usize,
    action: usize,
    surviving: &BTreeSet<usize>,
) -> BTreeSet<usize> {
    surviving
        .iter()
        .copied()
        .filter(|&ix| outcome_action_at(tree, &all[ix], infoset) == Some(action))
        .collect()
}

/// Action index the outcome takes at `infoset`, or `None` when its path does
/// not cross the set.
pub fn outcome_action_at(tree: &GameTree, outcome: &Outcome, infoset: usize) -> Option<usize> {
    outcome
        .path
        .iter()
        .find(|(node, _)| tree.node_infoset(*node) == Some(infoset))
        .map(|&(_, action)| action)
}
