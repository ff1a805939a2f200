//! Wall following around a wall with a gap.
//!
//! A purely reactive rule list cannot tell "approaching the gap from the
//! left" apart from "approaching it from the right": the local observation
//! is the same, so it ends up circling one end of the wall. A two-state FSM
//! that commits to crossing the gap completes the perimeter.

use kbt::worlds::scenarios::{wall_follow_scenario, wall_follow_start};
use kbt::worlds::{simulate, ControllerStack};

fn run(label: &str, nav: kbt::Arch, steps: usize) {
    let (mut world, _, _) = wall_follow_scenario();
    let stack = ControllerStack::single("Nav", nav);
    let start = wall_follow_start();
    let start_summary = format!(
        "{{pos=({},{}) heading={}}}",
        start.0 .0,
        start.0 .1,
        start.1.letter()
    );

    let trace = simulate(&mut world, &stack, steps, None).unwrap();
    let mut max_x = i64::MIN;
    let mut returned = None;
    for s in &trace.steps {
        let x: i64 = s
            .summary
            .trim_start_matches("{pos=(")
            .split(',')
            .next()
            .unwrap()
            .parse()
            .unwrap();
        max_x = max_x.max(x);
        if s.step > 0 && s.summary == start_summary && returned.is_none() {
            returned = Some(s.step);
        }
    }
    println!("{label}:");
    println!("  farthest x reached: {max_x} (gap is at x=8, wall ends at x=12)");
    match returned {
        Some(t) => println!("  back at the start pose after {t} steps\n"),
        None => println!("  never returned to the start pose in {steps} steps\n"),
    }
}

fn main() {
    let (_, reactive, fsm) = wall_follow_scenario();
    run("reactive rule list", reactive, 60);
    run("fsm with gap-crossing state", fsm, 80);
}
