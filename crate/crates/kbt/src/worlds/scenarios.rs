//! Canonical built-in scenarios: the recharge/chattering controllers, the
//! memory-node emulation pair, the wall-following room and the door world
//! with its three-valued trees.

use std::collections::BTreeMap;

use crate::asm::{Arch, BbRule, Blackboard};
use crate::classic::{Fsm, FsmRule, StateLabel, Tr};
use crate::cond::ConditionExpr;
use crate::error::Result;
use crate::input::{ActionId, History, InputState, ValueName, ValueSet};
use crate::tree::{
    action, condition, fallback, memory_sequence, sequence, KBTree, ReturnRule,
};

use super::{ControllerStack, DoorWorld, GridWorld, Heading};

// ---------------------------------------------------------------------------
// Recharge controllers.
// ---------------------------------------------------------------------------

fn recharge_leaf() -> crate::tree::Node {
    action(
        "Recharge",
        ReturnRule::running().when(ConditionExpr::eq("battery", 100), ValueName::success()),
    )
}

fn work_leaf() -> crate::tree::Node {
    action("Work", ReturnRule::running())
}

/// The plain recharge tree: recharge whenever the battery is below 10%,
/// otherwise do the other task. Chattering-prone by construction.
pub fn recharge_bt() -> KBTree {
    let root = fallback(vec![
        sequence(vec![
            condition("BatteryBelow10", ConditionExpr::lt("battery", 10)),
            recharge_leaf(),
        ])
        .unwrap(),
        work_leaf(),
    ])
    .unwrap();
    KBTree::classic(root).unwrap()
}

/// The implicit-memory variant: a hidden `recharging` flag keeps the tree in
/// Recharge until the battery is full. The flag's dynamics live outside the
/// tree, which is exactly what makes the composite non-reactive.
pub fn recharge_bt_hidden_flag() -> Arch {
    let root = fallback(vec![
        sequence(vec![
            fallback(vec![
                condition("BatteryBelow10", ConditionExpr::lt("battery", 10)),
                condition("RechargingFlag", ConditionExpr::eq("recharging", 1)),
            ])
            .unwrap(),
            recharge_leaf(),
        ])
        .unwrap(),
        work_leaf(),
    ])
    .unwrap();
    let tree = KBTree::classic(root).unwrap();
    Arch::Blackboard(Blackboard {
        inner: Box::new(Arch::Tree(tree)),
        init: BTreeMap::from([("recharging".to_string(), 0)]),
        rules: vec![
            BbRule {
                var: "recharging".into(),
                value: 0,
                when: ConditionExpr::eq("battery", 100),
            },
            BbRule {
                var: "recharging".into(),
                value: 1,
                when: ConditionExpr::lt("battery", 10),
            },
        ],
    })
}

/// The layered fix: an FSM on top switches between a Recharging state and
/// the work tree beneath, so the non-reactive part is explicit and separate.
pub fn recharge_fsm() -> Fsm {
    let work_tree = KBTree::classic(work_leaf()).unwrap();
    Fsm::new(
        vec!["OtherTask".into(), "Recharging".into()],
        "OtherTask".into(),
        vec![
            FsmRule {
                from: "OtherTask".into(),
                guard: ConditionExpr::lt("battery", 10),
                to: "Recharging".into(),
            },
            FsmRule {
                from: "Recharging".into(),
                guard: ConditionExpr::eq("battery", 100),
                to: "OtherTask".into(),
            },
        ],
        BTreeMap::from([
            (
                "Recharging".to_string(),
                StateLabel::Action(ActionId::new("Recharge")),
            ),
            (
                "OtherTask".to_string(),
                StateLabel::Arch(Box::new(Arch::Tree(work_tree))),
            ),
        ]),
    )
    .unwrap()
}

/// A battery reading oscillating just around the 10% threshold.
pub fn oscillating_battery_history(steps: usize) -> History {
    (0..steps)
        .map(|i| InputState::of(&[("battery", if i % 2 == 0 { 9 } else { 11 })]))
        .collect()
}

// ---------------------------------------------------------------------------
// Memory-node emulation pair.
// ---------------------------------------------------------------------------

fn step_action(name: &str, done_var: &str) -> crate::tree::Node {
    action(
        name,
        ReturnRule::running().when(ConditionExpr::eq(done_var, 1), ValueName::success()),
    )
}

/// Sequence-with-memory over two actions whose success conditions are the
/// visible variables `a1` and `a2`.
pub fn two_step_memory_tree() -> KBTree {
    let root = memory_sequence(vec![
        step_action("Action1", "a1"),
        step_action("Action2", "a2"),
    ])
    .unwrap();
    KBTree::classic(root).unwrap()
}

/// The same behavior rebuilt from a plain Sequence plus hidden "done"
/// variables maintained outside the tree. Selects the same actions as the
/// memory tree on every history while hiding the memory in the blackboard.
pub fn two_step_flag_emulation() -> Arch {
    let root = sequence(vec![
        fallback(vec![
            condition("Action1Done", ConditionExpr::eq("d1", 1)),
            step_action("Action1", "a1"),
        ])
        .unwrap(),
        fallback(vec![
            condition("Action2Done", ConditionExpr::eq("d2", 1)),
            step_action("Action2", "a2"),
        ])
        .unwrap(),
    ])
    .unwrap();
    let tree = KBTree::classic(root).unwrap();
    let first_done = ConditionExpr::or(vec![
        ConditionExpr::eq("d1", 1),
        ConditionExpr::eq("a1", 1),
    ]);
    let second_done = ConditionExpr::or(vec![
        ConditionExpr::eq("d2", 1),
        ConditionExpr::eq("a2", 1),
    ]);
    let whole_done = ConditionExpr::and(vec![first_done.clone(), second_done]);
    Arch::Blackboard(Blackboard {
        inner: Box::new(Arch::Tree(tree)),
        init: BTreeMap::from([("d1".to_string(), 0), ("d2".to_string(), 0)]),
        rules: vec![
            // Clearing mirrors the memory node returning a handled value.
            BbRule { var: "d1".into(), value: 0, when: whole_done.clone() },
            BbRule { var: "d2".into(), value: 0, when: whole_done },
            BbRule { var: "d1".into(), value: 1, when: ConditionExpr::eq("a1", 1) },
            BbRule {
                var: "d2".into(),
                value: 1,
                when: ConditionExpr::and(vec![first_done, ConditionExpr::eq("a2", 1)]),
            },
        ],
    })
}

// ---------------------------------------------------------------------------
// Wall following.
// ---------------------------------------------------------------------------

fn cell_is_wall(name: &str) -> ConditionExpr {
    ConditionExpr::eq(name, super::grid::CELL_WALL)
}

fn cell_is_free(name: &str) -> ConditionExpr {
    ConditionExpr::not(cell_is_wall(name))
}

/// Purely reactive left-hand wall follower over atomic actions. A function
/// of the 5x5 view only; in the gap room it shuttles back and forth through
/// the passage.
pub fn reactive_wall_follower() -> Tr {
    // agent-frame cells: c21 left, c12 front, c11 front-left, c31 back-left
    Tr::new(vec![
        (
            ConditionExpr::and(vec![cell_is_wall("c21"), cell_is_wall("c12")]),
            ActionId::new("TurnRight"),
        ),
        (cell_is_wall("c21"), ActionId::new("StepForward")),
        (
            ConditionExpr::and(vec![cell_is_free("c21"), cell_is_wall("c31")]),
            ActionId::new("TurnLeft"),
        ),
        (cell_is_free("c12"), ActionId::new("StepForward")),
        (ConditionExpr::True, ActionId::new("TurnRight")),
    ])
    .unwrap()
}

/// A one-cell passage in a straight wall, seen from the wall-following side:
/// the cell to the left is free while both left diagonals are wall.
fn gap_signature() -> ConditionExpr {
    ConditionExpr::and(vec![
        cell_is_free("c21"),
        cell_is_wall("c11"),
        cell_is_wall("c31"),
    ])
}

/// Wall follower with internal state: a two-state machine that crosses wall
/// passages instead of turning into them, so it completes the perimeter.
pub fn fsm_wall_follower() -> Fsm {
    Fsm::new(
        vec!["Follow".into(), "CrossGap".into()],
        "Follow".into(),
        vec![
            FsmRule {
                from: "Follow".into(),
                guard: gap_signature(),
                to: "CrossGap".into(),
            },
            FsmRule {
                from: "CrossGap".into(),
                guard: cell_is_wall("c21"),
                to: "Follow".into(),
            },
        ],
        BTreeMap::from([
            (
                "Follow".to_string(),
                StateLabel::Arch(Box::new(Arch::Tr(reactive_wall_follower()))),
            ),
            (
                "CrossGap".to_string(),
                StateLabel::Action(ActionId::new("StepForward")),
            ),
        ]),
    )
    .unwrap()
}

/// The wall-following room: a free-standing horizontal wall with a one-cell
/// passage, the agent starting against its south side. Returns the world
/// plus the reactive and stateful controllers.
pub fn wall_follow_scenario() -> (GridWorld, Arch, Arch) {
    let mut w = GridWorld::new(17, 13);
    for x in 4..=12 {
        if x != 8 {
            w.add_wall(x, 6);
        }
    }
    w.place_agent(4, 7, Heading::East);
    (
        w,
        Arch::Tr(reactive_wall_follower()),
        Arch::Fsm(fsm_wall_follower()),
    )
}

/// Start pose of the wall-follow scenario.
pub fn wall_follow_start() -> ((i64, i64), Heading) {
    ((4, 7), Heading::East)
}

// ---------------------------------------------------------------------------
// Door world.
// ---------------------------------------------------------------------------

fn unlock_leaf() -> crate::tree::Node {
    action(
        "Unlock",
        ReturnRule::running()
            .when(ConditionExpr::eq("door_know", 1), ValueName::success())
            .when(ConditionExpr::eq("door_know", 2), ValueName::new("Unknown"))
            .when(ConditionExpr::eq("has_key", 0), ValueName::failure()),
    )
}

/// Three-valued tree that handles the `Unknown` value: when the door status
/// is uncertain it gathers information instead of attempting the door.
pub fn door_handling_tree() -> KBTree {
    let values = ValueSet::new(vec![
        ValueName::success(),
        ValueName::failure(),
        ValueName::new("Unknown"),
    ])
    .unwrap();
    let root = crate::tree::control(
        ValueName::new("Unknown"),
        vec![unlock_leaf(), action("GatherInfo", ReturnRule::running())],
    )
    .unwrap();
    KBTree::new(values, root).unwrap()
}

/// Two-valued tree over the same action: `Unknown` is outside its value set,
/// so it acts as "Running" and Unlock stays selected.
pub fn door_ignoring_tree() -> KBTree {
    let root = fallback(vec![unlock_leaf(), action("GatherInfo", ReturnRule::running())])
        .unwrap();
    KBTree::classic(root).unwrap()
}

/// Door world plus the Unknown-handling and Unknown-ignoring trees.
pub fn door_scenario() -> (DoorWorld, KBTree, KBTree) {
    (
        DoorWorld::new(true, true),
        door_handling_tree(),
        door_ignoring_tree(),
    )
}

// ---------------------------------------------------------------------------
// Stacks for simulation.
// ---------------------------------------------------------------------------

/// The plain recharge tree as a single-layer controller.
pub fn recharge_stack_plain() -> ControllerStack {
    ControllerStack::single("Main", Arch::Tree(recharge_bt()))
}

/// The FSM-over-BT layering as a controller stack.
pub fn recharge_stack_layered() -> ControllerStack {
    ControllerStack::single("Top", Arch::Fsm(recharge_fsm()))
}

/// Convenience check used by demos.
pub fn simulate_battery(stack: &ControllerStack, steps: usize, initial: i64) -> Result<super::SimTrace> {
    let mut world = super::BatteryWorld::new(initial);
    super::simulate(&mut world, stack, steps, None)
}
