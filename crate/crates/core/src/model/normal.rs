use std::collections::BTreeMap;

use super::{AgentId, GameTree, InformationSet, ModelError, Node, NodeId, PayoffVector};

/// A game in normal form: simultaneous one-shot choices.
///
/// The payoff table is keyed by one strategy index per agent, in agent order,
/// and must be total over the Cartesian product of the strategy lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalFormGame {
    pub agents: Vec<AgentId>,
    /// One ordered strategy list per agent.
    pub strategies: Vec<Vec<String>>,
    /// Profile (one strategy index per agent) to payoffs.
    pub table: BTreeMap<Vec<usize>, PayoffVector>,
}

impl NormalFormGame {
    /// Number of strategy profiles the table must cover.
    pub fn profile_count(&self) -> usize {
        self.strategies.iter().map(|s| s.len()).product()
    }

    /// All profiles in lexicographic order of strategy indices.
    pub fn profiles(&self) -> Vec<Vec<usize>> {
        let mut acc = vec![vec![]];
        for list in &self.strategies {
            let mut next = Vec::with_capacity(acc.len() * list.len());
            for prefix in &acc {
                for s in 0..list.len() {
                    let mut p = prefix.clone();
                    p.push(s);
                    next.push(p);
                }
            }
            acc = next;
        }
        acc
    }
}

/// One action choice per information set, indexed like `tree.infosets()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StrategyProfile(pub Vec<usize>);

impl StrategyProfile {
    /// Action chosen at the given information set.
    pub fn action_at(&self, infoset: usize) -> usize {
        self.0[infoset]
    }
}

/// Unrolls a normal-form game into a depth-|agents| tree. The agent at
/// position k of `order` decides at depth k; all of that agent's nodes form a
/// single information set, so no decision observes any other.
///
/// Node ids are `/`-joined strategy labels from the root; the root is `/`.
pub fn to_tree(nf: &NormalFormGame, order: &[usize]) -> Result<GameTree, ModelError> {
    let n = nf.agents.len();
    let mut seen = vec![false; n];
    if order.len() != n || !order.iter().all(|&a| a < n && !std::mem::replace(&mut seen[a], true)) {
        return Err(ModelError::NotAPermutation);
    }

    let mut node_ids: Vec<String> = Vec::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut levels: Vec<Vec<NodeId>> = vec![Vec::new(); n];

    // depth-first construction; profile holds strategy indices in agent order
    let mut profile: Vec<usize> = vec![usize::MAX; n];
    let root = build(nf, order, 0, &mut profile, String::new(), &mut node_ids, &mut nodes, &mut levels);

    let infosets = order
        .iter()
        .enumerate()
        .map(|(depth, &agent)| InformationSet {
            id: nf.agents[agent].name().to_owned(),
            owner: agent,
            members: levels[depth].clone(),
            menu: nf.strategies[agent].clone(),
        })
        .collect();

    GameTree::new(nf.agents.clone(), node_ids, nodes, root, infosets)
}

#[allow(clippy::too_many_arguments)]
fn build(
    nf: &NormalFormGame,
    order: &[usize],
    depth: usize,
    profile: &mut Vec<usize>,
    path: String,
    node_ids: &mut Vec<String>,
    nodes: &mut Vec<Node>,
    levels: &mut Vec<Vec<NodeId>>,
) -> NodeId {
    if depth == order.len() {
        let payoffs = nf.table[&*profile].clone();
        node_ids.push(if path.is_empty() { "/".into() } else { path });
        nodes.push(Node::Leaf { payoffs });
        return NodeId(nodes.len() - 1);
    }
    let agent = order[depth];
    let mut children = Vec::with_capacity(nf.strategies[agent].len());
    for (s, label) in nf.strategies[agent].iter().enumerate() {
        profile[agent] = s;
        children.push(build(
            nf,
            order,
            depth + 1,
            profile,
            format!("{path}/{label}"),
            node_ids,
            nodes,
            levels,
        ));
        profile[agent] = usize::MAX;
    }
    node_ids.push(if path.is_empty() { "/".into() } else { path });
    nodes.push(Node::Decision {
        owner: agent,
        actions: nf.strategies[agent].clone(),
        children,
    });
    let id = NodeId(nodes.len() - 1);
    levels[depth].push(id);
    id
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::outcomes;
    use crate::testgames;

    #[test]
    fn prisoners_dilemma_tree_shape() {
        let nf = testgames::prisoners_dilemma();
        let tree = to_tree(&nf, &[0, 1]).unwrap();
        assert_eq!(tree.infosets().len(), 2);
        assert_eq!(tree.infosets()[0].members.len(), 1);
        assert_eq!(tree.infosets()[1].members.len(), 2);
        assert_eq!(tree.leaf_count(), 4);
    }

    #[test]
    fn one_agent_one_strategy_tree() {
        let nf = NormalFormGame {
            agents: vec![AgentId::new("A")],
            strategies: vec![vec!["go".into()]],
            table: BTreeMap::from([(vec![0], PayoffVector::new(vec![1]))]),
        };
        let tree = to_tree(&nf, &[0]).unwrap();
        assert_eq!(tree.leaf_count(), 1);
        assert_eq!(tree.infosets().len(), 1);
        assert_eq!(outcomes(&tree).len(), 1);
    }

    #[test]
    fn three_agent_binary_tree_counts() {
        let nf = testgames::binary_game(3);
        let tree = to_tree(&nf, &[0, 1, 2]).unwrap();
        let sizes: Vec<usize> = tree.infosets().iter().map(|i| i.members.len()).collect();
        assert_eq!(sizes, [1, 2, 4]);
        assert_eq!(outcomes(&tree).len(), 8);
    }

    #[test]
    fn order_must_be_permutation() {
        let nf = testgames::prisoners_dilemma();
        assert_eq!(to_tree(&nf, &[0, 0]), Err(ModelError::NotAPermutation));
        assert_eq!(to_tree(&nf, &[0]), Err(ModelError::NotAPermutation));
    }

    #[test]
    fn tree_outcomes_reproduce_table() {
        let nf = testgames::binary_game(3);
        let tree = to_tree(&nf, &[0, 1, 2]).unwrap();
        let outs = outcomes(&tree);
        assert_eq!(outs.len(), nf.profile_count());
        for (profile, out) in nf.profiles().iter().zip(&outs) {
            assert_eq!(&out.payoffs, &nf.table[profile]);
        }
    }
}
