//! Graphviz export for trees, FSMs and decision trees.
//!
//! Output is deterministic (pre-order node numbering), so exported files
//! are diffable and stable across runs. Pipe any of these through
//! `dot -Tsvg` to render.

use kbt::classic::bt_to_dt;
use kbt::dot::{dt_to_dot, fsm_to_dot, tree_to_dot};
use kbt::worlds::scenarios::{recharge_bt, recharge_fsm};

fn main() {
    println!("// recharge tree");
    print!("{}", tree_to_dot(&recharge_bt()));

    println!("\n// recharge fsm");
    print!("{}", fsm_to_dot(&recharge_fsm()));

    println!("\n// the same tree flattened to a decision tree");
    print!("{}", dt_to_dot(&bt_to_dt(&recharge_bt()).unwrap()));
}
