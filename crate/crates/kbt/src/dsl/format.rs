//! Canonical model formatter. Output is deterministic, reparses to the same
//! abstract model, and is idempotent (formatting a formatted file changes
//! nothing).

use std::fmt::Write;

use super::ast::*;

fn fmt_label(l: &LabelRef) -> String {
    match l {
        LabelRef::Action(a) => a.clone(),
        LabelRef::Arch(k, n) => format!("{} {n}", k.keyword()),
    }
}

fn is_infix(e: &TreeExpr) -> bool {
    matches!(
        e,
        TreeExpr::Control { value, .. } if value == "Success" || value == "Failure"
    )
}

/// Renders a tree expression; anything that would re-associate under an
/// enclosing infix operator gets parentheses.
fn fmt_texpr(e: &TreeExpr) -> String {
    match e {
        TreeExpr::Ref(n) => n.clone(),
        TreeExpr::Control { value, memory, children } => {
            let op = match (value.as_str(), memory) {
                ("Success", false) => Some(" -> "),
                ("Success", true) => Some(" mem-> "),
                ("Failure", false) => Some(" ? "),
                ("Failure", true) => Some(" mem? "),
                _ => None,
            };
            match op {
                Some(op) => children
                    .iter()
                    .map(|c| {
                        if is_infix(c) {
                            format!("({})", fmt_texpr(c))
                        } else {
                            fmt_texpr(c)
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(op),
                None => format!(
                    "*{value}[{}]",
                    children.iter().map(fmt_texpr).collect::<Vec<_>>().join(", ")
                ),
            }
        }
        TreeExpr::Neg(c) => {
            if is_infix(c) {
                format!("!({})", fmt_texpr(c))
            } else {
                format!("!{}", fmt_texpr(c))
            }
        }
        TreeExpr::Par(m, children) => format!(
            "par({m})[{}]",
            children.iter().map(fmt_texpr).collect::<Vec<_>>().join(", ")
        ),
        TreeExpr::UntilSuccess(c) => format!("until_success({})", fmt_texpr(c)),
        TreeExpr::Times(n, c) => format!("times({n})({})", fmt_texpr(c)),
    }
}

fn fmt_dtexpr(e: &DtExpr) -> String {
    match e {
        DtExpr::Leaf(n) => n.clone(),
        DtExpr::If(c, yes, no) => {
            let wrap = |b: &DtExpr| match b {
                DtExpr::If(..) => format!("({})", fmt_dtexpr(b)),
                DtExpr::Leaf(_) => fmt_dtexpr(b),
            };
            format!("if {c} then {} else {}", wrap(yes), wrap(no))
        }
    }
}

fn fmt_decl(out: &mut String, d: &Decl) {
    match d {
        Decl::Values(vs) => {
            let _ = writeln!(out, "values [{}]", vs.join(", "));
        }
        Decl::Var { name, hidden, domain } => {
            let h = if *hidden { "hidden " } else { "" };
            match domain {
                VarDomain::Bool => {
                    let _ = writeln!(out, "{h}var {name}: bool");
                }
                VarDomain::Range(lo, hi) => {
                    let _ = writeln!(out, "{h}var {name}: {lo}..{hi}");
                }
            }
        }
        Decl::Action { name, returns } => {
            if returns.is_empty() {
                let _ = writeln!(out, "action {name} {{ }}");
            } else {
                let _ = writeln!(out, "action {name} {{");
                for r in returns {
                    match &r.when {
                        Some(c) => {
                            let _ = writeln!(out, "  returns {} when {c};", r.value);
                        }
                        None => {
                            let _ = writeln!(out, "  returns {};", r.value);
                        }
                    }
                }
                let _ = writeln!(out, "}}");
            }
        }
        Decl::Cond { name, expr } => {
            let _ = writeln!(out, "cond {name} = {expr}");
        }
        Decl::Tree { name, expr } => {
            let _ = writeln!(out, "tree {name} = {}", fmt_texpr(expr));
        }
        Decl::Dt { name, expr } => {
            let _ = writeln!(out, "dt {name} = {}", fmt_dtexpr(expr));
        }
        Decl::Tr { name, rules } => {
            let _ = writeln!(out, "tr {name} {{");
            for (c, a) in rules {
                let _ = writeln!(out, "  {c} -> {a};");
            }
            let _ = writeln!(out, "}}");
        }
        Decl::Fsm(f) => {
            let _ = writeln!(out, "fsm {} {{", f.name);
            let _ = writeln!(out, "  init {};", f.init);
            for (from, guard, to) in &f.transitions {
                let _ = writeln!(out, "  {from} -[{guard}]-> {to};");
            }
            for (state, l) in &f.labels {
                let _ = writeln!(out, "  label {state}: {};", fmt_label(l));
            }
            let _ = writeln!(out, "}}");
        }
        Decl::Blackboard(b) => {
            let _ = writeln!(out, "blackboard {} over {} {{", b.name, fmt_label(&b.inner));
            for s in &b.stmts {
                match s {
                    BbStmt::Init(v, n) => {
                        let _ = writeln!(out, "  init {v} = {n};");
                    }
                    BbStmt::Set(v, n, c) => {
                        let _ = writeln!(out, "  set {v} = {n} when {c};");
                    }
                }
            }
            let _ = writeln!(out, "}}");
        }
        Decl::Stack { name, layers } => {
            let _ = writeln!(out, "stack {name} {{");
            for (l, r) in layers {
                let _ = writeln!(out, "  layer {l}: {};", fmt_label(r));
            }
            let _ = writeln!(out, "}}");
        }
        Decl::Alphabet { name, vars } => {
            let _ = writeln!(out, "alphabet {name} {{");
            for (v, dom) in vars {
                match dom {
                    AlphabetVar::Bool => {
                        let _ = writeln!(out, "  {v}: bool;");
                    }
                    AlphabetVar::List(vals) => {
                        let vals: Vec<String> = vals.iter().map(|n| n.to_string()).collect();
                        let _ = writeln!(out, "  {v}: [{}];", vals.join(", "));
                    }
                }
            }
            let _ = writeln!(out, "}}");
        }
        Decl::World { name, spec } => match spec {
            WorldDecl::Battery { initial, drain, charge, track_recharging } => {
                let _ = writeln!(out, "world {name} = battery {{");
                let _ = writeln!(out, "  initial {initial};");
                let _ = writeln!(out, "  drain {drain};");
                let _ = writeln!(out, "  charge {charge};");
                if *track_recharging {
                    let _ = writeln!(out, "  track_recharging;");
                }
                let _ = writeln!(out, "}}");
            }
            WorldDecl::Grid { width, height, walls, markers, agent } => {
                let _ = writeln!(out, "world {name} = grid {{");
                let _ = writeln!(out, "  size {width} {height};");
                for (x, y) in walls {
                    let _ = writeln!(out, "  wall {x} {y};");
                }
                for (x, y) in markers {
                    let _ = writeln!(out, "  marker {x} {y};");
                }
                let _ = writeln!(out, "  agent {} {} {};", agent.0, agent.1, agent.2);
                let _ = writeln!(out, "}}");
            }
            WorldDecl::Door { locked, key } => {
                let _ = writeln!(out, "world {name} = door {{");
                let _ = writeln!(out, "  locked {};", *locked as i64);
                let _ = writeln!(out, "  key {};", *key as i64);
                let _ = writeln!(out, "}}");
            }
        },
    }
}

/// Renders a model in canonical form.
pub fn format_model(m: &ModelFile) -> String {
    let mut out = String::new();
    for (i, d) in m.decls.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        fmt_decl(&mut out, d);
    }
    out
}
