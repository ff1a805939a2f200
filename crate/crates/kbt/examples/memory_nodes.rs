//! Memory control nodes and their hidden-variable emulation.
//!
//! `A mem-> B` remembers that A succeeded and stops re-ticking it until the
//! whole sequence returns a handled value. The same behaviour can be
//! emulated with a plain sequence guarded by "done" flags maintained
//! outside the tree — and a bounded equivalence check confirms the two
//! select the same actions on every history up to the bound.

use kbt::analysis::{check_equivalence, SearchMode};
use kbt::worlds::scenarios::{two_step_flag_emulation, two_step_memory_tree};
use kbt::{trace_asm, Arch, InputAlphabet, InputState};

fn main() {
    let memory = Arch::Tree(two_step_memory_tree());
    let emulated = two_step_flag_emulation();

    // a1/a2 flag the completion of the two actions; note step 3: a plain
    // sequence would fall back to Action1, the memory node stays on Action2.
    let history: Vec<InputState> = [(0, 0), (1, 0), (0, 0), (0, 1), (0, 0)]
        .iter()
        .map(|(a1, a2)| InputState::of(&[("a1", *a1), ("a2", *a2)]))
        .collect();

    println!("step  (a1,a2)  memory node  flag emulation");
    let m = trace_asm(&memory, &history).unwrap();
    let e = trace_asm(&emulated, &history).unwrap();
    for (i, x) in history.iter().enumerate() {
        println!(
            "{:4}  ({},{})    {:11}  {}",
            i,
            x.get("a1").unwrap(),
            x.get("a2").unwrap(),
            m[i].action.name(),
            e[i].action.name()
        );
    }

    let alphabet = InputAlphabet::booleans(&["a1", "a2"]).unwrap();
    let report = check_equivalence(&memory, &emulated, &alphabet, 4, SearchMode::default())
        .unwrap();
    println!(
        "\nexhaustive check to history length {}: {}",
        report.max_len,
        if report.is_equivalent() { "equivalent" } else { "distinguished" }
    );
}
