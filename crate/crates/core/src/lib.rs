//! Games located in spacetime: model, solvers, and laboratory.
//!
//! The crate models decision setups as extensive-form games with imperfect
//! information, classifies causal relations between decision events and
//! compiles event specifications into game trees, and solves games under
//! three concepts: backward induction (SPE), pure-strategy Nash enumeration,
//! and a transparent equilibrium found by iterated elimination of outcomes a
//! certain decider would preempt.
//!
//! Everything is deterministic and works on exact integer ranks and exact
//! rational coordinates; no floating point is involved in any solve.

pub mod epr;
pub mod format;
pub mod model;
pub mod solvers;
pub mod spacetime;

#[cfg(test)]
pub(crate) mod testgames;

pub use model::{
    general_position_check, outcomes, outcomes_through, to_tree, validate_game, AgentId, GameTree,
    InformationSet, Node, NodeId, NormalFormGame, Outcome, PayoffVector, StrategyProfile,
    ValidationReport,
};
pub use solvers::{
    certain_infosets, enumerate_nash, maximin_guarantee, pte_normal, solve_pte, solve_spe,
    EliminationTrace, PteResult, PteStatus, SolveResult,
};
pub use spacetime::{causal_relation, compile, validate_spec, CausalRelation, DecisionEvent, EventCoord, SpacetimeSpec};
