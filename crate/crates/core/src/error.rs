//! Error types shared across the crate.

use thiserror::Error;

use crate::semantics::SemanticsId;

/// Errors raised while parsing or validating transition models.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("state {state}: probabilities sum to {sum}, expected 1")]
    RowSum { state: u32, sum: String },
    #[error("state {state}: probability {prob} outside (0,1]")]
    ProbRange { state: u32, prob: String },
    #[error("state index {index} out of range (model has {num_states} states)")]
    StateRange { index: u32, num_states: u32 },
    #[error("invalid action label {label:?}: {msg}")]
    BadLabel { label: String, msg: String },
    #[error("state {state} has no outgoing distribution")]
    MissingRow { state: u32 },
}

/// Errors raised by the graded engine and the oracles.
#[derive(Debug, Error)]
pub enum EngineError {
    #[error("{semantics} does not apply to {kind} models")]
    KindMismatch {
        semantics: SemanticsId,
        kind: &'static str,
    },
    #[error("{semantics} is not supported by this operation")]
    UnsupportedSemantics { semantics: SemanticsId },
    #[error("state index {index} out of range (model has {num_states} states)")]
    StateRange { index: u32, num_states: u32 },
    #[error("values have mismatched depth or semantics")]
    ValueMismatch,
    #[error("oracle bound exceeded: {0}")]
    OracleBound(String),
}

/// Errors raised by formula parsing, well-formedness checks and evaluation.
#[derive(Debug, Error)]
pub enum LogicError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("{op} is not admitted under {semantics}")]
    Vocabulary { op: String, semantics: SemanticsId },
    #[error("{semantics} has no characteristic logic")]
    NoVocabulary { semantics: SemanticsId },
    #[error("ill-formed formula {formula}: {msg}")]
    IllFormed { formula: String, msg: String },
    #[error("formula depth {formula_depth} does not match value depth {value_depth}")]
    DepthMismatch { formula_depth: u32, value_depth: u32 },
    #[error("unknown action {label:?}")]
    UnknownAction { label: String },
    #[error("{semantics} does not apply to {kind} models")]
    KindMismatch {
        semantics: SemanticsId,
        kind: &'static str,
    },
}

/// Errors raised by the term layer.
#[derive(Debug, Error)]
pub enum TheoryError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("term {term} has no uniform depth: {msg}")]
    NonUniform { term: String, msg: String },
    #[error("operation {op} is not part of the {theory} theory")]
    UnknownOperation { op: String, theory: SemanticsId },
    #[error("equation sides have different uniform depth")]
    DepthMismatch,
    #[error("no equational theory is implemented for {theory}")]
    UnsupportedTheory { theory: SemanticsId },
    #[error("convex weight {weight} outside [0,1]")]
    BadWeight { weight: String },
}
