//! Deterministic DOT export of trees, state machines and decision trees.
//! Output is byte-reproducible: nodes are emitted in pre-order (trees) or
//! declaration order (FSMs).

use std::fmt::Write;

use crate::classic::{Dt, Fsm, StateLabel};
use crate::tree::{KBTree, Node, NodeKind};

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn tree_to_dot(t: &KBTree) -> String {
    let mut out = String::new();
    out.push_str("digraph kbt {\n");
    out.push_str("  node [fontname=\"monospace\"];\n");
    fn walk(n: &Node, out: &mut String) {
        let shape = match &n.kind {
            NodeKind::Action(_) | NodeKind::Embedded { .. } => "box",
            NodeKind::Condition { .. } => "ellipse",
            _ => "square",
        };
        writeln!(
            out,
            "  {} [label=\"{}\", shape={}];",
            n.id,
            esc(&n.label()),
            shape
        )
        .unwrap();
        for c in n.children() {
            writeln!(out, "  {} -> {};", n.id, c.id).unwrap();
            walk(c, out);
        }
    }
    walk(&t.root, &mut out);
    out.push_str("}\n");
    out
}

pub fn fsm_to_dot(f: &Fsm) -> String {
    let mut out = String::new();
    out.push_str("digraph fsm {\n");
    out.push_str("  node [shape=ellipse, fontname=\"monospace\"];\n");
    for s in &f.states {
        let label = match &f.labels[s] {
            StateLabel::Action(a) => format!("{s}\\n{a}"),
            StateLabel::Arch(_) => format!("{s}\\n[nested]"),
        };
        let init = if *s == f.init { ", peripheries=2" } else { "" };
        writeln!(out, "  \"{}\" [label=\"{}\"{}];", esc(s), label, init).unwrap();
    }
    for r in &f.rules {
        writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"];",
            esc(&r.from),
            esc(&r.to),
            esc(&format!("{}", r.guard))
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn dt_to_dot(d: &Dt) -> String {
    let mut out = String::new();
    out.push_str("digraph dt {\n");
    out.push_str("  node [fontname=\"monospace\"];\n");
    fn walk(d: &Dt, id: &mut u32, out: &mut String) -> u32 {
        let me = *id;
        *id += 1;
        match d {
            Dt::Leaf(a) => {
                writeln!(out, "  n{} [label=\"{}\", shape=box];", me, esc(a.name())).unwrap();
            }
            Dt::If { cond, yes, no } => {
                writeln!(
                    out,
                    "  n{} [label=\"{}\", shape=diamond];",
                    me,
                    esc(&format!("{cond}"))
                )
                .unwrap();
                let y = walk(yes, id, out);
                writeln!(out, "  n{me} -> n{y} [label=\"T\"];").unwrap();
                let n = walk(no, id, out);
                writeln!(out, "  n{me} -> n{n} [label=\"F\"];").unwrap();
            }
        }
        me
    }
    let mut id = 0;
    walk(d, &mut id, &mut out);
    out.push_str("}\n");
    out
}
