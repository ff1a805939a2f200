//! Decorators, parallel nodes and utility ordering.
//!
//! `until_success` latches its child's first Success; `times(n)` passes the
//! child's value for n ticks and then succeeds forever; `par(M)` succeeds
//! once M children succeed; a utility node re-orders its children by a
//! score evaluated on the current input.

use kbt::cond::ConditionExpr;
use kbt::tree::{action, parallel, times, until_success, utility, Score};
use kbt::{InputState, KBTree, ReturnRule, TreeCtx, ValueName};

fn leaf(name: &str, done: &str) -> kbt::tree::Node {
    action(
        name,
        ReturnRule::running().when(ConditionExpr::eq(done, 1), ValueName::success()),
    )
}

fn main() {
    // until_success: Calibrate's one Success is remembered across ticks.
    let t = KBTree::classic(until_success(leaf("Calibrate", "ok"))).unwrap();
    let mut ctx = TreeCtx::default();
    print!("until_success over ok = 0 1 0:");
    for ok in [0, 1, 0] {
        let v = t.tick(&InputState::of(&[("ok", ok)]), &mut ctx).unwrap().selection.value;
        print!("  {v}");
    }
    println!();

    // times(2): two delivered ticks, then Success without ticking the child.
    let t = KBTree::classic(times(2, action("Ping", ReturnRule::running()))).unwrap();
    let mut ctx = TreeCtx::default();
    print!("times(2) over four ticks:");
    for _ in 0..4 {
        let v = t.tick(&InputState::new(), &mut ctx).unwrap().selection.value;
        print!("  {v}");
    }
    println!();

    // par(2) of three children: succeeds as soon as two do.
    let t = KBTree::classic(
        parallel(2, vec![leaf("L1", "d1"), leaf("L2", "d2"), leaf("L3", "d3")]).unwrap(),
    )
    .unwrap();
    for (d1, d2, d3) in [(1, 0, 0), (1, 0, 1), (0, 0, 0)] {
        let x = InputState::of(&[("d1", d1), ("d2", d2), ("d3", d3)]);
        let o = t.tick_once(&x).unwrap();
        println!(
            "par(2) with done=({d1},{d2},{d3}): returns {:9} selected {}",
            o.selection.value.to_string(),
            o.selection.action.name()
        );
    }

    // utility: scores decide the order children are tried in.
    let t = KBTree::classic(
        utility(vec![
            (leaf("Explore", "never"), Score::constant(1)),
            (
                leaf("Deliver", "never"),
                Score { cases: vec![(ConditionExpr::eq("carrying", 1), 10)], default: 0 },
            ),
        ])
        .unwrap(),
    )
    .unwrap();
    for carrying in [0, 1] {
        let x = InputState::of(&[("never", 0), ("carrying", carrying)]);
        let o = t.tick_once(&x).unwrap();
        println!(
            "utility with carrying={carrying}: selects {} (scores {:?})",
            o.selection.action.name(),
            o.scores[0].1
        );
    }
}
