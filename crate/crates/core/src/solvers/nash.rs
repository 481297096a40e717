use crate::model::{outcomes, GameTree, Node, NodeId, Outcome, StrategyProfile};

/// A pure-strategy profile no agent can improve on by changing their own
/// assignments, everyone else held fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NashEquilibrium {
    pub profile: StrategyProfile,
    pub outcome: Outcome,
}

/// Enumerates every pure-strategy Nash equilibrium.
///
/// Deviations are whole strategies: an agent may rewrite the actions at all
/// of their information sets at once. General position is not required; ties
/// simply mean no strict improvement.
pub fn enumerate_nash(tree: &GameTree) -> Vec<NashEquilibrium> {
    let all = outcomes(tree);
    let mut leaf_outcome = vec![usize::MAX; tree.node_count()];
    for (ix, outcome) in all.iter().enumerate() {
        leaf_outcome[outcome.leaf.0] = ix;
    }

    let menu_sizes: Vec<usize> = tree.infosets().iter().map(|i| i.menu.len()).collect();
    let mut agent_infosets: Vec<Vec<usize>> = vec![Vec::new(); tree.agents().len()];
    for (ix, infoset) in tree.infosets().iter().enumerate() {
        agent_infosets[infoset.owner].push(ix);
    }

    let mut equilibria = Vec::new();
    let mut profile = vec![0usize; menu_sizes.len()];
    loop {
        let realized = realize(tree, &leaf_outcome, &profile);
        let is_nash = (0..tree.agents().len()).all(|agent| {
            !improves(tree, &all, &leaf_outcome, &profile, agent, &agent_infosets[agent], realized)
        });
        if is_nash {
            equilibria.push(NashEquilibrium {
                profile: StrategyProfile(profile.clone()),
                outcome: all[realized].clone(),
            });
        }
        if !advance(&mut profile, &menu_sizes) {
            break;
        }
    }
    equilibria
}

/// Whether `agent` has some alternative assignment over their own information
/// sets that strictly improves their payoff against the rest of `profile`.
fn improves(
    tree: &GameTree,
    all: &[Outcome],
    leaf_outcome: &[usize],
    profile: &[usize],
    agent: usize,
    own: &[usize],
    realized: usize,
) -> bool {
    if own.is_empty() {
        return false;
    }
    let current = all[realized].payoffs.get(agent);
    let bounds: Vec<usize> = own.iter().map(|&ix| tree.infoset(ix).menu.len()).collect();
    let mut choice = vec![0usize; own.len()];
    let mut deviated = profile.to_vec();
    loop {
        for (slot, &ix) in own.iter().enumerate() {
            deviated[ix] = choice[slot];
        }
        let outcome = realize(tree, leaf_outcome, &deviated);
        if all[outcome].payoffs.get(agent) > current {
            return true;
        }
        if !advance(&mut choice, &bounds) {
            return false;
        }
    }
}

/// Outcome index reached from the root when everyone follows `profile`.
fn realize(tree: &GameTree, leaf_outcome: &[usize], profile: &[usize]) -> usize {
    let mut at: NodeId = tree.root();
    loop {
        match tree.node(at) {
            Node::Leaf { .. } => return leaf_outcome[at.0],
            Node::Decision { children, .. } => {
                let infoset = tree
                    .node_infoset(at)
                    .expect("valid games place every decision node in an information set");
                at = children[profile[infoset]];
            }
        }
    }
}

/// Odometer step over mixed-radix counters; false once wrapped around.
fn advance(counters: &mut [usize], bounds: &[usize]) -> bool {
    for (c, &b) in counters.iter_mut().zip(bounds).rev() {
        *c += 1;
        if *c < b {
            return true;
        }
        *c = 0;
    }
    false
}
