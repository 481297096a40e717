//! Solution concepts: Subgame Perfect Equilibrium (backward induction),
//! pure-strategy Nash enumeration, and the transparent-equilibrium
//! elimination engine (iterated removal of outcomes a certain decider would
//! preempt).

mod nash;
mod pte;
mod spe;

pub use nash::{enumerate_nash, NashEquilibrium};
pub use pte::{
    certain_infosets, maximin_guarantee, pte_normal, solve_pte, solve_pte_with, Elimination,
    EliminationMode, EliminationRound, EliminationTrace, GuaranteeReport, PteError, PteResult,
    PteStatus, TraceOutcome,
};
pub use spe::{solve_spe, SpeError, SpeResult};

/// A solve outcome from any of the three concepts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    Spe(SpeResult),
    Nash(Vec<NashEquilibrium>),
    Pte(PteResult),
}

impl SolveResult {
    pub fn concept(&self) -> &'static str {
        match self {
            SolveResult::Spe(_) => "spe",
            SolveResult::Nash(_) => "nash",
            SolveResult::Pte(_) => "pte",
        }
    }

    /// False when the concept produced no equilibrium (no pure Nash profile,
    /// or no surviving transparent outcome).
    pub fn has_equilibrium(&self) -> bool {
        match self {
            SolveResult::Spe(_) => true,
            SolveResult::Nash(eqs) => !eqs.is_empty(),
            SolveResult::Pte(r) => matches!(r.status, PteStatus::Unique(_)),
        }
    }
}
