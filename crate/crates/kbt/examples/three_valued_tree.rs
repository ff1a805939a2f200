//! A behavior tree over the value set {Success, Failure, Unknown}.
//!
//! The control node `*Unknown[Unlock, GatherInfo]` ticks its children left
//! to right and moves on only while a child keeps returning Unknown — so
//! uncertainty is handled by the tree structure itself instead of being
//! squeezed into Success or Failure.

use kbt::cond::ConditionExpr;
use kbt::tree::{action, control};
use kbt::{InputState, KBTree, ReturnRule, ValueName, ValueSet};

fn main() {
    let unknown = ValueName::new("Unknown");
    let values = ValueSet::new(vec![
        ValueName::success(),
        ValueName::failure(),
        unknown.clone(),
    ])
    .unwrap();

    // Unlock reports Success when the door is known unlocked, Unknown while
    // the status has not been observed, Failure without a key.
    let unlock = action(
        "Unlock",
        ReturnRule::running()
            .when(ConditionExpr::eq("door_know", 1), ValueName::success())
            .when(ConditionExpr::eq("door_know", 2), unknown.clone())
            .when(ConditionExpr::eq("has_key", 0), ValueName::failure()),
    );
    let gather = action(
        "GatherInfo",
        ReturnRule::running().when(ConditionExpr::ne("door_know", 2), ValueName::success()),
    );

    let tree = KBTree::new(values, control(unknown, vec![unlock, gather]).unwrap()).unwrap();

    for (label, know, key) in [
        ("status unknown", 2, 1),
        ("known unlocked", 1, 1),
        ("unknown, no key", 2, 0),
        ("known locked, no key", 0, 0),
    ] {
        let x = InputState::of(&[("door_know", know), ("has_key", key)]);
        let out = tree.tick_once(&x).unwrap();
        println!(
            "{label:22} -> selects {:12} returns {}",
            out.selection.action.name(),
            out.selection.value
        );
    }
}
