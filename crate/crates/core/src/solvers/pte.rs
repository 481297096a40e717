use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{
    general_position_check, outcome_action_at, outcomes, to_tree, GameTree, ModelError,
    NormalFormGame, Outcome, PayoffVector, TieReport,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PteError {
    #[error("payoff ties violate general position:\n{0}")]
    Ties(TieReport),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// How a round applies its eliminations.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum EliminationMode {
    /// All certain deciders eliminate against the same surviving set; the
    /// removals take effect together at the end of the round.
    #[default]
    Simultaneous,
    /// Deciders eliminate one at a time within the round, each seeing the
    /// previous one's removals. For experimentation; results can differ.
    Sequential,
}

/// An outcome id plus its payoffs, as recorded in traces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceOutcome {
    pub id: String,
    pub payoffs: PayoffVector,
}

/// Worst-case guarantees of one certain decider against a surviving set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuaranteeReport {
    pub infoset: String,
    pub agent: String,
    /// (action, guaranteed minimum) for actions with non-empty support, in
    /// menu order. Actions no surviving outcome goes through are excluded.
    pub per_action: Vec<(String, i64)>,
    pub maximin: i64,
    /// Actions achieving the maximin (a single one in general position).
    pub best: Vec<String>,
}

/// Why an outcome left the surviving set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination {
    pub outcome: String,
    pub payoffs: PayoffVector,
    /// The certain information set whose owner would have deviated.
    pub infoset: String,
    pub agent: String,
    /// Owner's payoff at the outcome, strictly below `maximin`.
    pub payoff: i64,
    pub maximin: i64,
}

/// One round: who was certain to decide, what they could guarantee, and which
/// outcomes their anticipation preempted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationRound {
    /// 1-based.
    pub index: usize,
    /// Ids of the information sets certain at round start.
    pub certain: Vec<String>,
    pub guarantees: Vec<GuaranteeReport>,
    pub eliminated: Vec<Elimination>,
}

/// The full solve record: every round, the surviving outcomes, and the
/// decisions the survivors pin down. Information sets that are never certain
/// stay undefined; no action is assigned off the surviving paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationTrace {
    pub rounds: Vec<EliminationRound>,
    pub surviving: Vec<TraceOutcome>,
    /// (information set id, action) wherever the survivors agree.
    pub pinned: Vec<(String, String)>,
    pub undefined: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PteStatus {
    /// Exactly one outcome survived: the equilibrium.
    Unique(Outcome),
    /// Elimination emptied the outcome set; the game has no such equilibrium.
    Empty,
    /// The fixpoint stabilized with several survivors. Reported, not decided:
    /// treated as "no equilibrium".
    Multiple(Vec<Outcome>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PteResult {
    pub status: PteStatus,
    pub trace: EliminationTrace,
}

impl PteResult {
    pub fn unique(&self) -> Option<&Outcome> {
        match &self.status {
            PteStatus::Unique(outcome) => Some(outcome),
            _ => None,
        }
    }
}

/// Information sets crossed by every surviving outcome: their owners decide
/// no matter which surviving world is real.
///
/// `surviving` must be non-empty (an empty set would make every infoset
/// vacuously certain).
pub fn certain_infosets(
    tree: &GameTree,
    all: &[Outcome],
    surviving: &BTreeSet<usize>,
) -> Vec<usize> {
    assert!(!surviving.is_empty(), "certainty is undefined for an empty surviving set");
    (0..tree.infosets().len())
        .filter(|&infoset| {
            surviving
                .iter()
                .all(|&o| outcome_action_at(tree, &all[o], infoset).is_some())
        })
        .collect()
}

/// Worst-case payoff per action and the best such guarantee, for the owner of
/// a certain information set.
///
/// Panics if no action has surviving support, which cannot happen when the
/// set is certain with respect to a non-empty surviving set.
pub fn maximin_guarantee(
    tree: &GameTree,
    all: &[Outcome],
    infoset: usize,
    surviving: &BTreeSet<usize>,
) -> GuaranteeReport {
    let set = tree.infoset(infoset);
    let owner = set.owner;
    let mut per_action: Vec<(String, i64)> = Vec::new();
    for (action, label) in set.menu.iter().enumerate() {
        let min = surviving
            .iter()
            .filter(|&&o| outcome_action_at(tree, &all[o], infoset) == Some(action))
            .map(|&o| all[o].payoffs.get(owner))
            .min();
        if let Some(min) = min {
            per_action.push((label.clone(), min));
        }
    }
    let maximin = per_action
        .iter()
        .map(|&(_, min)| min)
        .max()
        .expect("a certain information set has at least one supported action");
    let best = per_action
        .iter()
        .filter(|&&(_, min)| min == maximin)
        .map(|(label, _)| label.clone())
        .collect();
    GuaranteeReport {
        infoset: set.id.clone(),
        agent: tree.agents()[owner].name().to_owned(),
        per_action,
        maximin,
        best,
    }
}

/// Iterated elimination of outcomes that fall below a certain decider's
/// guarantee, run to fixpoint. Requires general position per agent (checked).
///
/// Each round takes the infosets certain against the current surviving set,
/// computes every owner's maximin guarantee, and removes each outcome whose
/// owner-payoff at some certain set is strictly below that set's guarantee.
/// The loop stops when a round removes nothing; rounds that remove nothing
/// are not recorded.
pub fn solve_pte(tree: &GameTree) -> Result<PteResult, PteError> {
    solve_pte_with(tree, EliminationMode::Simultaneous)
}

pub fn solve_pte_with(tree: &GameTree, mode: EliminationMode) -> Result<PteResult, PteError> {
    let ties = general_position_check(tree);
    if !ties.in_general_position() {
        return Err(PteError::Ties(ties));
    }

    let all = outcomes(tree);
    // action taken at [outcome][infoset], None when the path misses the set
    let at: Vec<Vec<Option<usize>>> = all
        .iter()
        .map(|o| {
            (0..tree.infosets().len())
                .map(|i| outcome_action_at(tree, o, i))
                .collect()
        })
        .collect();

    let mut surviving: BTreeSet<usize> = (0..all.len()).collect();
    let mut rounds: Vec<EliminationRound> = Vec::new();

    while !surviving.is_empty() {
        let certain: Vec<usize> = (0..tree.infosets().len())
            .filter(|&i| surviving.iter().all(|&o| at[o][i].is_some()))
            .collect();

        let mut guarantees = Vec::new();
        let mut eliminated: Vec<Elimination> = Vec::new();
        let mut removed: BTreeSet<usize> = BTreeSet::new();

        for &infoset in &certain {
            // sequential mode sees earlier removals of the same round
            let against: BTreeSet<usize> = match mode {
                EliminationMode::Simultaneous => surviving.clone(),
                EliminationMode::Sequential => {
                    surviving.difference(&removed).copied().collect()
                }
            };
            let report = maximin_guarantee(tree, &all, infoset, &against);
            let owner = tree.infoset(infoset).owner;
            for &o in &against {
                let payoff = all[o].payoffs.get(owner);
                if payoff < report.maximin && !removed.contains(&o) {
                    removed.insert(o);
                    eliminated.push(Elimination {
                        outcome: all[o].id.clone(),
                        payoffs: all[o].payoffs.clone(),
                        infoset: report.infoset.clone(),
                        agent: report.agent.clone(),
                        payoff,
                        maximin: report.maximin,
                    });
                }
            }
            guarantees.push(report);
        }

        if removed.is_empty() {
            break;
        }
        eliminated.sort_by(|a, b| a.outcome.cmp(&b.outcome));
        rounds.push(EliminationRound {
            index: rounds.len() + 1,
            certain: certain.iter().map(|&i| tree.infoset(i).id.clone()).collect(),
            guarantees,
            eliminated,
        });
        surviving = surviving.difference(&removed).copied().collect();
        assert!(rounds.len() <= all.len(), "each recorded round shrinks the set");
    }

    // Survivor-consistent decisions: pin an action wherever every surviving
    // outcome crosses the set and agrees; everything else stays undefined.
    let mut pinned = Vec::new();
    let mut undefined = Vec::new();
    for (ix, infoset) in tree.infosets().iter().enumerate() {
        let actions: BTreeSet<Option<usize>> = surviving.iter().map(|&o| at[o][ix]).collect();
        match (actions.len(), actions.first().copied().flatten()) {
            (1, Some(action)) => {
                pinned.push((infoset.id.clone(), infoset.menu[action].clone()));
            }
            _ => undefined.push(infoset.id.clone()),
        }
    }

    let survivors: Vec<&Outcome> = surviving.iter().map(|&o| &all[o]).collect();
    let status = match survivors.as_slice() {
        [] => PteStatus::Empty,
        [one] => PteStatus::Unique((*one).clone()),
        many => PteStatus::Multiple(many.iter().map(|o| (*o).clone()).collect()),
    };
    Ok(PteResult {
        status,
        trace: EliminationTrace {
            rounds,
            surviving: survivors
                .iter()
                .map(|o| TraceOutcome {
                    id: o.id.clone(),
                    payoffs: o.payoffs.clone(),
                })
                .collect(),
            pinned,
            undefined,
        },
    })
}

/// The same concept for a normal-form game, via its tree unrolling. The
/// result does not depend on the unrolling order; debug builds spot-check
/// that with the reverse order.
pub fn pte_normal(nf: &NormalFormGame) -> Result<PteResult, PteError> {
    let order: Vec<usize> = (0..nf.agents.len()).collect();
    let tree = to_tree(nf, &order)?;
    let result = solve_pte(&tree)?;
    #[cfg(debug_assertions)]
    {
        let reversed: Vec<usize> = order.iter().rev().copied().collect();
        let alt = solve_pte(&to_tree(nf, &reversed)?)?;
        let payoffs = |r: &PteResult| -> Vec<String> {
            let mut p: Vec<String> =
                r.trace.surviving.iter().map(|o| o.payoffs.to_string()).collect();
            p.sort();
            p
        };
        debug_assert_eq!(payoffs(&result), payoffs(&alt), "unrolling order changed the result");
    }
    Ok(result)
}
