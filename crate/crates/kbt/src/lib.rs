//! Execution and analysis of action-selection mechanisms: generalized
//! behavior trees over arbitrary finite value sets, plus classical behavior
//! trees, teleo-reactive programs, decision trees and finite-state machines
//! under one stepping interface.
//!
//! The entry points are:
//! - [`tree::KBTree`] and the node constructors in [`tree`] for building
//!   trees programmatically;
//! - [`asm::Arch`] to wrap any of the architectures behind a common
//!   [`asm::Arch::step`];
//! - [`analysis::check_reactive`] and [`analysis::check_equivalence`] for
//!   the semantic checks;
//! - [`dsl`] for the textual model format and [`dot`] for Graphviz export;
//! - [`worlds`] for the simulated environments and canonical scenarios.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod analysis;
pub mod asm;
pub mod classic;
pub mod cond;
pub mod dot;
pub mod dsl;
pub mod error;
pub mod extensions;
pub mod input;
pub mod tree;
pub mod worlds;

pub use asm::{run_asm, trace_asm, Arch, ArchCtx, Selection, TickValue};
pub use error::{Error, Result};
pub use input::{ActionId, History, InputAlphabet, InputState, ValueName, ValueSet};
pub use tree::{KBTree, NodeId, ReturnRule, TickOutcome, TreeCtx};
