//! Tree-to-tree transformations layered on the engine: styles (runtime
//! subtree disabling) and negation push-down.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::input::ValueName;
use crate::cond::ConditionExpr;
use crate::tree::{condition_expr, DecoratorKind, KBTree, Node, NodeId, NodeKind};

/// A named set of disabled subtrees. While a style is active the tree
/// behaves as if the disabled subtrees were absent.
#[derive(Debug, Clone)]
pub struct Style {
    pub name: String,
    pub disabled: BTreeSet<NodeId>,
}

impl Style {
    pub fn new(name: &str, disabled: impl IntoIterator<Item = NodeId>) -> Style {
        Style { name: name.to_string(), disabled: disabled.into_iter().collect() }
    }
}

/// Physically prunes the disabled subtrees, yielding a valid tree with the
/// surviving node identifiers unchanged. Pruning may not empty any control
/// node's child list or remove the root.
pub fn apply_style(t: &KBTree, s: &Style) -> Result<KBTree> {
    for id in &s.disabled {
        if t.node(*id).is_none() {
            return Err(Error::UnknownNode(id.0));
        }
    }
    if s.disabled.contains(&t.root.id) {
        return Err(Error::StyleRemovesRoot { style: s.name.clone() });
    }
    let mut root = t.root.clone();
    prune(&mut root, s)?;
    // Revalidate without renumbering: ids stay stable across styles.
    KBTree::with_existing_ids(t.value_set.clone(), root)
}

fn prune(n: &mut Node, s: &Style) -> Result<()> {
    match &mut n.kind {
        NodeKind::Control { children, .. } | NodeKind::Parallel { children, .. } => {
            children.retain(|c| !s.disabled.contains(&c.id));
            if children.is_empty() {
                return Err(Error::StyleEmpties { style: s.name.clone(), node: n.id.0 });
            }
            // A parallel threshold may now exceed the child count.
            if let NodeKind::Parallel { threshold, children } = &mut n.kind {
                if *threshold > children.len() {
                    return Err(Error::StyleEmpties { style: s.name.clone(), node: n.id.0 });
                }
            }
            if let NodeKind::Control { children, .. } | NodeKind::Parallel { children, .. } =
                &mut n.kind
            {
                for c in children {
                    prune(c, s)?;
                }
            }
            Ok(())
        }
        NodeKind::Decorator { child, .. } => {
            if s.disabled.contains(&child.id) {
                return Err(Error::StyleEmpties { style: s.name.clone(), node: n.id.0 });
            }
            prune(child, s)
        }
        NodeKind::Utility { children } => {
            children.retain(|(c, _)| !s.disabled.contains(&c.id));
            if children.is_empty() {
                return Err(Error::StyleEmpties { style: s.name.clone(), node: n.id.0 });
            }
            for (c, _) in children {
                prune(c, s)?;
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Removes every Negation decorator from a two-valued Sequence/Fallback tree
/// by swapping operators beneath removed negations and exchanging Success
/// and Failure in leaf return rules. The result is trace-equivalent to the
/// input and contains no Negation nodes.
pub fn push_down_negations(t: &KBTree) -> Result<KBTree> {
    let root = pdn(&t.root, false)?;
    KBTree::new(t.value_set.clone(), root)
}

fn pdn(n: &Node, neg: bool) -> Result<Node> {
    match &n.kind {
        NodeKind::Decorator { kind: DecoratorKind::Negation, child } => pdn(child, !neg),
        NodeKind::Action(a) => {
            let returns = if neg { a.returns.swapped() } else { a.returns.clone() };
            Ok(Node::unnumbered(NodeKind::Action(crate::tree::ActionLeaf {
                action: a.action.clone(),
                returns,
            })))
        }
        NodeKind::Condition { name, expr } => {
            if neg {
                Ok(condition_expr(ConditionExpr::not(expr.clone())))
            } else {
                Ok(Node::unnumbered(NodeKind::Condition {
                    name: name.clone(),
                    expr: expr.clone(),
                }))
            }
        }
        NodeKind::Control { handled, memory: false, children } => {
            let handled = if neg { handled.swapped() } else { handled.clone() };
            if neg && !(handled.is_success() || handled.is_failure()) {
                return Err(Error::UnsupportedUnderNegation(format!("*{handled}")));
            }
            let children = children
                .iter()
                .map(|c| pdn(c, neg))
                .collect::<Result<Vec<_>>>()?;
            crate::tree::control(handled, children)
        }
        other if neg => Err(Error::UnsupportedUnderNegation(kind_name(other).into())),
        NodeKind::Control { handled, memory: true, children } => {
            let children = children
                .iter()
                .map(|c| pdn(c, false))
                .collect::<Result<Vec<_>>>()?;
            crate::tree::memory_control(handled.clone(), children)
        }
        NodeKind::Decorator { kind, child } => {
            let child = pdn(child, false)?;
            Ok(Node::unnumbered(NodeKind::Decorator {
                kind: kind.clone(),
                child: Box::new(child),
            }))
        }
        NodeKind::Parallel { threshold, children } => {
            let children = children
                .iter()
                .map(|c| pdn(c, false))
                .collect::<Result<Vec<_>>>()?;
            crate::tree::parallel(*threshold, children)
        }
        NodeKind::Utility { children } => {
            let children = children
                .iter()
                .map(|(c, s)| Ok((pdn(c, false)?, s.clone())))
                .collect::<Result<Vec<_>>>()?;
            crate::tree::utility(children)
        }
        NodeKind::Embedded { .. } => Ok(Node::unnumbered(n.kind.clone())),
    }
}

fn kind_name(k: &NodeKind) -> &'static str {
    match k {
        NodeKind::Control { memory: true, .. } => "memory",
        NodeKind::Control { .. } => "control",
        NodeKind::Action(_) => "action",
        NodeKind::Condition { .. } => "condition",
        NodeKind::Decorator { .. } => "decorator",
        NodeKind::Parallel { .. } => "parallel",
        NodeKind::Utility { .. } => "utility",
        NodeKind::Embedded { .. } => "embedded",
    }
}

/// True when the tree contains no Negation nodes.
pub fn negation_free(t: &KBTree) -> bool {
    fn walk(n: &Node) -> bool {
        if matches!(&n.kind, NodeKind::Decorator { kind: DecoratorKind::Negation, .. }) {
            return false;
        }
        n.children().iter().all(|c| walk(c))
    }
    walk(&t.root)
}

// Value swap helper for completeness where only the name is at hand.
#[allow(dead_code)]
fn swap(v: &ValueName) -> ValueName {
    v.swapped()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cond::ConditionExpr;
    use crate::input::{ActionId, InputAlphabet, InputState, ValueName};
    use crate::tree::{
        action, fallback, memory_sequence, negation, sequence, KBTree, ReturnRule, TreeCtx,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn leaf(name: &str, succ_when: &str) -> crate::tree::Node {
        action(
            name,
            ReturnRule::running()
                .when(ConditionExpr::eq(succ_when, 1), ValueName::success()),
        )
    }

    fn two_leaf_fallback() -> KBTree {
        KBTree::classic(fallback(vec![leaf("A", "a"), leaf("B", "b")]).unwrap()).unwrap()
    }

    #[test]
    fn empty_style_is_identity() {
        let t = two_leaf_fallback();
        let t2 = apply_style(&t, &Style::new("none", [])).unwrap();
        for x in InputAlphabet::booleans(&["a", "b"]).unwrap().states() {
            assert_eq!(
                t.tick_once(x).unwrap().selection.action,
                t2.tick_once(x).unwrap().selection.action
            );
        }
    }

    #[test]
    fn disabling_a_child_removes_it_from_selection() {
        let t = two_leaf_fallback();
        // disable the first leaf: B is always selected afterwards
        let a_id = t.node_ids()[1];
        assert_eq!(t.node(a_id).unwrap().label(), "A");
        let t2 = apply_style(&t, &Style::new("no_a", [a_id])).unwrap();
        let x = InputState::of(&[("a", 1), ("b", 0)]);
        assert_eq!(t.tick_once(&x).unwrap().selection.action, ActionId::new("A"));
        assert_eq!(t2.tick_once(&x).unwrap().selection.action, ActionId::new("B"));
    }

    #[test]
    fn surviving_ids_are_stable() {
        let t = two_leaf_fallback();
        let a_id = t.node_ids()[1];
        let b_id = t.node_ids()[2];
        let t2 = apply_style(&t, &Style::new("no_a", [a_id])).unwrap();
        assert_eq!(t2.node(b_id).unwrap().label(), "B");
        assert!(t2.node(a_id).is_none());
    }

    #[test]
    fn style_errors() {
        let t = two_leaf_fallback();
        let root = t.root.id;
        assert!(matches!(
            apply_style(&t, &Style::new("r", [root])),
            Err(Error::StyleRemovesRoot { .. })
        ));
        let all: Vec<_> = t.node_ids().into_iter().skip(1).collect();
        assert!(matches!(
            apply_style(&t, &Style::new("all", all)),
            Err(Error::StyleEmpties { .. })
        ));
        assert!(matches!(
            apply_style(&t, &Style::new("bogus", [crate::tree::NodeId(999)])),
            Err(Error::UnknownNode(999))
        ));
    }

    #[test]
    fn style_emptying_parallel_threshold_rejected() {
        let t = KBTree::classic(
            crate::tree::parallel(2, vec![leaf("A", "a"), leaf("B", "b")]).unwrap(),
        )
        .unwrap();
        let a_id = t.node_ids()[1];
        assert!(matches!(
            apply_style(&t, &Style::new("thin", [a_id])),
            Err(Error::StyleEmpties { .. })
        ));
    }

    #[test]
    fn negation_over_condition_negates_the_condition() {
        let t = KBTree::classic(
            sequence(vec![
                negation(crate::tree::condition_expr(ConditionExpr::eq("a", 1))),
                leaf("B", "b"),
            ])
            .unwrap(),
        )
        .unwrap();
        let t2 = push_down_negations(&t).unwrap();
        assert!(negation_free(&t2));
        for x in InputAlphabet::booleans(&["a", "b"]).unwrap().states() {
            assert_eq!(
                t.tick_once(x).unwrap().selection,
                t2.tick_once(x).unwrap().selection
            );
        }
    }

    #[test]
    fn double_negation_cancels() {
        let t = KBTree::classic(negation(negation(leaf("A", "a")))).unwrap();
        let t2 = push_down_negations(&t).unwrap();
        assert!(negation_free(&t2));
        let x = InputState::of(&[("a", 1)]);
        assert_eq!(
            t2.tick_once(&x).unwrap().selection.value,
            t.tick_once(&x).unwrap().selection.value
        );
    }

    #[test]
    fn negated_sequence_becomes_fallback_with_swapped_leaves() {
        // !(A -> B) under De Morgan: ?(A', B') with Success/Failure swapped
        let t = KBTree::classic(negation(
            sequence(vec![leaf("A", "a"), leaf("B", "b")]).unwrap(),
        ))
        .unwrap();
        let t2 = push_down_negations(&t).unwrap();
        assert!(negation_free(&t2));
        for x in InputAlphabet::booleans(&["a", "b"]).unwrap().states() {
            let o1 = t.tick_once(x).unwrap();
            let o2 = t2.tick_once(x).unwrap();
            assert_eq!(o1.selection.action, o2.selection.action, "at {x}");
            assert_eq!(o1.selection.value, o2.selection.value, "at {x}");
        }
    }

    #[test]
    fn negation_over_memory_node_is_rejected() {
        let t = KBTree::classic(negation(
            memory_sequence(vec![leaf("A", "a"), leaf("B", "b")]).unwrap(),
        ))
        .unwrap();
        assert!(matches!(
            push_down_negations(&t),
            Err(Error::UnsupportedUnderNegation(_))
        ));
    }

    #[test]
    fn push_down_preserves_traces_on_random_trees() {
        // Random two-valued trees with nested negations, compared tick by
        // tick against the original over every input.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let vars = ["p", "q", "r"];
        fn gen(rng: &mut ChaCha8Rng, vars: &[&str], depth: usize, next: &mut u32) -> crate::tree::Node {
            if depth == 0 || rng.gen_bool(0.35) {
                let n = *next;
                *next += 1;
                let v = vars[rng.gen_range(0..vars.len())];
                return action(
                    &format!("act{n}"),
                    ReturnRule::running()
                        .when(ConditionExpr::eq(v, 1), ValueName::success())
                        .when(ConditionExpr::eq(vars[0], 0), ValueName::failure()),
                );
            }
            match rng.gen_range(0..4) {
                0 => negation(gen(rng, vars, depth - 1, next)),
                1 => crate::tree::condition_expr(ConditionExpr::eq(
                    vars[rng.gen_range(0..vars.len())],
                    rng.gen_range(0..2),
                )),
                k => {
                    let n = rng.gen_range(2..4);
                    let children = (0..n).map(|_| gen(rng, vars, depth - 1, next)).collect();
                    if k == 2 {
                        sequence(children).unwrap()
                    } else {
                        fallback(children).unwrap()
                    }
                }
            }
        }
        let alphabet = InputAlphabet::booleans(&vars).unwrap();
        for _ in 0..250 {
            let mut next = 0;
            let t = match KBTree::classic(gen(&mut rng, &vars, 3, &mut next)) {
                Ok(t) => t,
                Err(_) => continue, // bare condition at the root
            };
            let t2 = push_down_negations(&t).unwrap();
            assert!(negation_free(&t2));
            let mut c1 = TreeCtx::default();
            let mut c2 = TreeCtx::default();
            for x in alphabet.states() {
                let o1 = t.tick(x, &mut c1).unwrap();
                let o2 = t2.tick(x, &mut c2).unwrap();
                assert_eq!(o1.selection.action, o2.selection.action);
                assert_eq!(o1.selection.value, o2.selection.value);
            }
        }
    }
}
