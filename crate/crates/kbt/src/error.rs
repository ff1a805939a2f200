//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("control node has no children")]
    EmptyChildren,

    #[error("value `{0}` is not in the tree's value set")]
    UnknownValue(String),

    #[error("unknown node id {0}")]
    UnknownNode(u32),

    #[error("incompatible value sets: `{0}` is not handled by the target tree")]
    IncompatibleValues(String),

    #[error("custom decorator policy is not total: missing entry for `{0}`")]
    PolicyNotTotal(String),

    #[error("parallel threshold {m} out of range 1..={n}")]
    BadThreshold { m: usize, n: usize },

    #[error("transition cycle under fixed input, revisiting state `{state}` (loop: {path:?})")]
    TransitionCycle { state: String, path: Vec<String> },

    #[error("overlapping guards in state `{state}`: transitions to `{a}` and `{b}` both triggered")]
    OverlappingGuards { state: String, a: String, b: String },

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("no teleo-reactive rule satisfied (no catch-all)")]
    NoRuleSatisfied,

    #[error("tree contains `{0}` nodes, which cannot be converted to a decision tree")]
    UnsupportedForDt(String),

    #[error("negation over unsupported `{0}` node")]
    UnsupportedUnderNegation(String),

    #[error("style `{style}` would empty the child list of node {node}")]
    StyleEmpties { style: String, node: u32 },

    #[error("style `{style}` disables the root of the tree")]
    StyleRemovesRoot { style: String },

    #[error("search space of {size} histories exceeds budget {budget}; enable sampling")]
    BudgetExceeded { size: u128, budget: u64 },

    #[error("empty history")]
    EmptyHistory,

    #[error("empty teleo-reactive program")]
    EmptyProgram,

    #[error("controller stack cannot resolve selection `{0}` to a world command")]
    UnresolvedSelection(String),

    #[error("world does not accept command `{0}`")]
    UnknownCommand(String),

    #[error("unknown name `{0}` in model")]
    UnknownName(String),

    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: u32, col: u32, msg: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
