//! The on-disk formats: game files (`.game.json`, `.spacetime.json`), solve
//! traces (`.trace.json`), ensemble reports, and fixed-utility files.
//!
//! Concrete syntax is strict JSON with a fixed schema per `kind`. Unknown
//! keys are rejected so typos in hand-written files surface immediately;
//! every diagnostic carries a line:column position, and semantic problems
//! also carry a pointer-style path. Serialization is canonical — fixed key
//! order, two-space indent, declaration order for agents and actions — so
//! outputs are byte-identical across runs and platforms, and
//! parse-then-serialize is the identity on canonical files.

pub mod json;
mod read;
mod write;

pub use json::{Diagnostic, Pos};

use crate::epr::{EnsembleReport, UtilitySpec};
use crate::model::{GameTree, NormalFormGame};
use crate::solvers::EliminationTrace;
use crate::spacetime::SpacetimeSpec;

/// The only format version this build reads or writes.
pub const FORMAT_VERSION: i64 = 1;

/// A parsed game file of any of the three game kinds.
#[derive(Clone, Debug, PartialEq)]
pub struct GameDocument {
    pub body: GameBody,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GameBody {
    Extensive(GameTree),
    Normal(NormalFormGame),
    Spacetime(SpacetimeSpec),
}

impl GameBody {
    pub fn kind(&self) -> &'static str {
        match self {
            GameBody::Extensive(_) => "extensive",
            GameBody::Normal(_) => "normal",
            GameBody::Spacetime(_) => "spacetime",
        }
    }
}

/// A recorded elimination solve.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceDocument {
    /// Solution concept the trace belongs to (`pte`).
    pub concept: String,
    pub trace: EliminationTrace,
}

/// Any document the toolkit reads or writes.
#[derive(Clone, Debug, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Document {
    Game(GameDocument),
    Trace(TraceDocument),
    Report(EnsembleReport),
    Utilities(UtilitySpec),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Game(game) => game.body.kind(),
            Document::Trace(_) => "trace",
            Document::Report(_) => "epr-report",
            Document::Utilities(_) => "epr-utilities",
        }
    }
}

/// Parses any document, dispatching on its `kind`.
pub fn parse(text: &str) -> Result<Document, Diagnostic> {
    read::document(text)
}

/// Parses a document and insists it is a game.
pub fn parse_game(text: &str) -> Result<GameDocument, Diagnostic> {
    match parse(text)? {
        Document::Game(game) => Ok(game),
        other => Err(Diagnostic::with_path(
            Pos { line: 1, col: 1 },
            "/kind",
            format!("expected a game document, found kind {:?}", other.kind()),
        )),
    }
}

pub fn parse_trace(text: &str) -> Result<TraceDocument, Diagnostic> {
    match parse(text)? {
        Document::Trace(trace) => Ok(trace),
        other => Err(Diagnostic::with_path(
            Pos { line: 1, col: 1 },
            "/kind",
            format!("expected a trace document, found kind {:?}", other.kind()),
        )),
    }
}

pub fn parse_report(text: &str) -> Result<EnsembleReport, Diagnostic> {
    match parse(text)? {
        Document::Report(report) => Ok(report),
        other => Err(Diagnostic::with_path(
            Pos { line: 1, col: 1 },
            "/kind",
            format!("expected a report document, found kind {:?}", other.kind()),
        )),
    }
}

pub fn parse_utilities(text: &str) -> Result<UtilitySpec, Diagnostic> {
    match parse(text)? {
        Document::Utilities(spec) => Ok(spec),
        other => Err(Diagnostic::with_path(
            Pos { line: 1, col: 1 },
            "/kind",
            format!("expected a utilities document, found kind {:?}", other.kind()),
        )),
    }
}

/// Renders the canonical text of a document.
pub fn serialize(doc: &Document) -> String {
    write::document(doc)
}
