//! Chattering: a purely reactive recharge tree versus a layered controller.
//!
//! When the battery oscillates around the 10% threshold, the plain tree
//! flips between Recharge and Work on every reading. Putting a small FSM on
//! top — enter Recharging below 10%, leave at 100% — removes the chatter
//! while keeping the reactive work tree underneath.

use kbt::analysis::count_switches;
use kbt::worlds::scenarios::{
    oscillating_battery_history, recharge_bt, recharge_fsm,
};
use kbt::{trace_asm, Arch};

fn main() {
    let history = oscillating_battery_history(40);

    let plain = trace_asm(&Arch::Tree(recharge_bt()), &history).unwrap();
    let layered = trace_asm(&Arch::Fsm(recharge_fsm()), &history).unwrap();

    println!("battery readings alternate 9% / 11% for {} steps\n", history.len());
    println!("step  battery  plain tree  layered fsm");
    for (i, x) in history.iter().enumerate().take(8) {
        println!(
            "{:4}  {:7}  {:10}  {}",
            i,
            x.get("battery").unwrap(),
            plain[i].action.name(),
            layered[i].action.name()
        );
    }
    println!("...\n");
    println!("action switches, plain tree:  {}", count_switches(&plain));
    println!("action switches, layered fsm: {}", count_switches(&layered));
}
