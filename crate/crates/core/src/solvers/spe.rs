use thiserror::Error;

use crate::model::{
    general_position_check, outcomes, GameTree, Node, NodeId, Outcome, StrategyProfile, TieReport,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpeError {
    #[error("information set {0:?} has several members; backward induction needs perfect information")]
    ImperfectInformation(String),
    #[error("payoff ties break backward induction:\n{0}")]
    Ties(TieReport),
}

/// Backward-induction solution: the induced outcome plus a full strategy
/// profile. The profile assigns an action to every information set, on or off
/// the equilibrium path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpeResult {
    pub outcome: Outcome,
    pub profile: StrategyProfile,
}

/// Standard backward induction on a perfect-information tree in general
/// position. Both preconditions are checked and reported as errors.
pub fn solve_spe(tree: &GameTree) -> Result<SpeResult, SpeError> {
    for infoset in tree.infosets() {
        if infoset.members.len() != 1 {
            return Err(SpeError::ImperfectInformation(infoset.id.clone()));
        }
    }
    let ties = general_position_check(tree);
    if !ties.in_general_position() {
        return Err(SpeError::Ties(ties));
    }

    let all = outcomes(tree);
    let mut leaf_outcome = vec![usize::MAX; tree.node_count()];
    for (ix, outcome) in all.iter().enumerate() {
        leaf_outcome[outcome.leaf.0] = ix;
    }

    let mut profile = vec![usize::MAX; tree.infosets().len()];
    let induced = induce(tree, &all, &leaf_outcome, tree.root(), &mut profile);
    debug_assert!(profile.iter().all(|&a| a != usize::MAX));
    Ok(SpeResult {
        outcome: all[induced].clone(),
        profile: StrategyProfile(profile),
    })
}

/// Returns the index of the outcome reached from `at` under optimal play
/// below, filling in the decision taken at every node on the way.
fn induce(
    tree: &GameTree,
    all: &[Outcome],
    leaf_outcome: &[usize],
    at: NodeId,
    profile: &mut [usize],
) -> usize {
    match tree.node(at) {
        Node::Leaf { .. } => leaf_outcome[at.0],
        Node::Decision { owner, children, .. } => {
            let mut best: Option<(usize, usize)> = None; // (action, outcome ix)
            for (action, child) in children.iter().enumerate() {
                let induced = induce(tree, all, leaf_outcome, *child, profile);
                best = Some(match best {
                    None => (action, induced),
                    Some((_, cur)) if all[induced].payoffs.get(*owner) > all[cur].payoffs.get(*owner) => {
                        (action, induced)
                    }
                    Some(b) => b,
                });
            }
            let (action, induced) = best.expect("decision nodes have at least one action");
            let infoset = tree
                .node_infoset(at)
                .expect("valid games place every decision node in an information set");
            profile[infoset] = action;
            induced
        }
    }
}
