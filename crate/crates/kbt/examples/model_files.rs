//! The textual model format: parse, pretty-print, build, run.
//!
//! One file declares values, variables, actions, trees, FSMs, alphabets and
//! controller stacks. `parse_model` + `format_model` round-trip, and
//! `build_model` turns the declarations into executable architectures.

use kbt::dsl::{build_model, format_model, parse_model};
use kbt::{trace_asm, InputState};

const MODEL: &str = r#"
values [Success, Failure]

var battery: 0..100

action Recharge {
  returns Success when battery == 100;
}
action Work { }

cond BatteryLow = battery < 10

tree Main = (BatteryLow -> Recharge) ? Work

fsm Top {
  init Working;
  Working -[battery < 10]-> Recharging;
  Recharging -[battery == 100]-> Working;
  label Working: tree Main;
  label Recharging: Recharge;
}
"#;

fn main() {
    let file = parse_model(MODEL).unwrap();
    println!("canonical form:\n{}", format_model(&file));

    let model = build_model(&file).unwrap();
    let top = model.arch("Top").unwrap();

    let history: Vec<InputState> = [50, 9, 50, 100, 50]
        .iter()
        .map(|b| InputState::of(&[("battery", *b)]))
        .collect();
    println!("running fsm Top over battery 50 9 50 100 50:");
    for (x, sel) in history.iter().zip(trace_asm(top, &history).unwrap()) {
        println!("  battery={:3} -> {}", x.get("battery").unwrap(), sel.action.name());
    }
}
