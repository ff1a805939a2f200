//! The door scenario: acting on uncertainty versus acting through it.
//!
//! Two trees drive the same world, where the door's status starts out
//! unknown. The three-valued tree treats Unknown as its handled value and
//! gathers information before touching the door; the classical tree has no
//! third value and walks straight up to the lock.

use kbt::worlds::scenarios::door_scenario;
use kbt::worlds::{simulate, ControllerStack};
use kbt::Arch;

fn main() {
    let (mut world, handling, ignoring) = door_scenario();
    let stack = ControllerStack::single("Door", Arch::Tree(handling));
    let trace = simulate(&mut world, &stack, 4, None).unwrap();
    println!("tree with an Unknown value (gathers information first):");
    print!("{}", trace.to_text());

    let (mut world, _, _) = door_scenario();
    let stack = ControllerStack::single("Door", Arch::Tree(ignoring));
    let trace = simulate(&mut world, &stack, 4, None).unwrap();
    println!("\nclassical two-valued tree (tries the door immediately):");
    print!("{}", trace.to_text());
}
