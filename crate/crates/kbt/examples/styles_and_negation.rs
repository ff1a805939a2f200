//! Tree transformations: styles and negation push-down.
//!
//! A style disables named subtrees at load time, specialising one tree into
//! several behaviours. Negation push-down removes `!` decorators by
//! swapping Sequence/Fallback and Success/Failure beneath them, yielding a
//! trace-equivalent decorator-free tree.

use kbt::cond::ConditionExpr;
use kbt::extensions::{apply_style, negation_free, push_down_negations, Style};
use kbt::tree::{action, fallback, negation, sequence};
use kbt::{InputAlphabet, InputState, KBTree, ReturnRule, ValueName};

fn leaf(name: &str, done: &str) -> kbt::tree::Node {
    action(
        name,
        ReturnRule::running().when(ConditionExpr::eq(done, 1), ValueName::success()),
    )
}

fn main() {
    // A patrol tree with an optional photography side task.
    let tree = KBTree::classic(
        fallback(vec![leaf("TakePhoto", "photo_done"), leaf("Patrol", "lap_done")]).unwrap(),
    )
    .unwrap();
    let photo_node = tree.node_ids()[1];
    let quiet = apply_style(&tree, &Style::new("no_photos", [photo_node])).unwrap();

    let x = InputState::of(&[("photo_done", 0), ("lap_done", 0)]);
    println!(
        "full tree selects {:9}; with style `no_photos` it selects {}",
        tree.tick_once(&x).unwrap().selection.action.name(),
        quiet.tick_once(&x).unwrap().selection.action.name()
    );

    // !(A -> B) ? C  becomes a fallback of swapped leaves over C.
    let negated = KBTree::classic(
        fallback(vec![
            negation(sequence(vec![leaf("A", "a"), leaf("B", "b")]).unwrap()),
            leaf("C", "c"),
        ])
        .unwrap(),
    )
    .unwrap();
    let pushed = push_down_negations(&negated).unwrap();
    println!("\nafter push_down_negations: negation_free = {}", negation_free(&pushed));

    let alphabet = InputAlphabet::booleans(&["a", "b", "c"]).unwrap();
    let same = alphabet.states().iter().all(|x| {
        let s1 = negated.tick_once(x).unwrap().selection;
        let s2 = pushed.tick_once(x).unwrap().selection;
        s1.action == s2.action && s1.value == s2.value
    });
    println!("selections and values unchanged on all {} inputs: {same}", alphabet.len());
}
