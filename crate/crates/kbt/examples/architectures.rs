//! Five architectures, one stepping interface.
//!
//! Behavior trees, teleo-reactive programs, decision trees, FSMs and
//! blackboard-wrapped controllers all implement action selection behind
//! `Arch::step`, so they can be traced, checked and layered uniformly.
//! The conversions between them are exact: a teleo-reactive program is a
//! 1-valued tree, and a decorator-free classical tree flattens to a
//! decision tree.

use kbt::classic::{bt_to_dt, dt_select, tr_select};
use kbt::tree::tr_to_kbt;
use kbt::worlds::scenarios::{
    reactive_wall_follower, recharge_bt, recharge_bt_hidden_flag, recharge_fsm,
};
use kbt::{trace_asm, Arch, InputAlphabet, InputState};

fn main() {
    let history: Vec<InputState> = [50, 5, 50, 100, 50]
        .iter()
        .map(|b| InputState::of(&[("battery", *b)]))
        .collect();

    let archs = [
        ("tree", Arch::Tree(recharge_bt())),
        ("dt", Arch::Dt(bt_to_dt(&recharge_bt()).unwrap())),
        ("fsm", Arch::Fsm(recharge_fsm())),
        ("blackboard", recharge_bt_hidden_flag()),
    ];
    println!("battery history: 50 5 50 100 50");
    for (name, m) in &archs {
        let names: Vec<_> = trace_asm(m, &history)
            .unwrap()
            .iter()
            .map(|s| s.action.name().to_string())
            .collect();
        println!("{name:10} -> {}", names.join(" "));
    }

    // tr_select and the 1-valued tree embedding agree on every input
    let tr = reactive_wall_follower();
    let as_tree = tr_to_kbt(&tr).unwrap();
    let alphabet = InputAlphabet::booleans(&["c11", "c12", "c21", "c31"]).unwrap();
    let agree = alphabet.states().iter().all(|x| {
        tr_select(&tr, x).unwrap().action == as_tree.tick_once(x).unwrap().selection.action
    });
    println!("\ntr_select == tick(tr_to_kbt) on all {} inputs: {agree}", alphabet.len());

    // and the flattened decision tree agrees with the original tree
    let dt = bt_to_dt(&recharge_bt()).unwrap();
    let alphabet = InputAlphabet::product(&[("battery", vec![5, 50, 100])]).unwrap();
    let agree = alphabet.states().iter().all(|x| {
        dt_select(&dt, x).unwrap().action
            == recharge_bt().tick_once(x).unwrap().selection.action
    });
    println!("bt_to_dt preserves selection on all inputs: {agree}");
}
