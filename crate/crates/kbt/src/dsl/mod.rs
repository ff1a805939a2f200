//! Textual model format: one file declares values, variables, actions,
//! conditions, and any number of architectures, stacks, alphabets and
//! worlds. See `parse_model` for the entry point and the repository README
//! for the grammar.

mod ast;
mod build;
mod format;
mod lexer;
mod parser;

pub use ast::*;
pub use build::{build_model, Model};
pub use format::format_model;
pub use lexer::Diag;
pub use parser::parse_model;

use crate::error::{Error, Result};

/// Parses and resolves in one step, folding parser diagnostics into a
/// single error (the library surface for callers that don't need the
/// diagnostic list).
pub fn load_model(text: &str) -> Result<Model> {
    let file = parse_model(text).map_err(|diags| {
        let first = &diags[0];
        Error::Parse {
            line: first.line as u32,
            col: first.col as u32,
            msg: diags
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        }
    })?;
    build_model(&file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_leaf_tree() {
        let m = parse_model("tree T = A").unwrap();
        assert_eq!(
            m.decls,
            vec![Decl::Tree { name: "T".into(), expr: TreeExpr::Ref("A".into()) }]
        );
    }

    #[test]
    fn precedence_arrow_tighter_than_query() {
        let m = parse_model("tree T = A -> B ? C").unwrap();
        let Decl::Tree { expr, .. } = &m.decls[0] else { panic!() };
        assert_eq!(
            *expr,
            TreeExpr::Control {
                value: "Failure".into(),
                memory: false,
                children: vec![
                    TreeExpr::Control {
                        value: "Success".into(),
                        memory: false,
                        children: vec![TreeExpr::Ref("A".into()), TreeExpr::Ref("B".into())],
                    },
                    TreeExpr::Ref("C".into()),
                ],
            }
        );
    }

    #[test]
    fn mixed_infix_chain() {
        // A -> (B ? C) -> D is a three-child Sequence
        let m = parse_model("tree T = A -> (B ? C) -> D").unwrap();
        let Decl::Tree { expr, .. } = &m.decls[0] else { panic!() };
        let TreeExpr::Control { value, children, .. } = expr else { panic!() };
        assert_eq!(value, "Success");
        assert_eq!(children.len(), 3);
    }

    #[test]
    fn adjacent_same_operator_flattens() {
        let a = parse_model("tree T = (A -> B) -> C").unwrap();
        let b = parse_model("tree T = A -> B -> C").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn memory_chains_do_not_flatten() {
        let a = parse_model("tree T = (A mem-> B) mem-> C").unwrap();
        let b = parse_model("tree T = A mem-> B mem-> C").unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn errors_carry_positions() {
        let diags = parse_model("tree T = ->").unwrap_err();
        assert_eq!(diags[0].line, 1);
        assert_eq!(diags[0].col, 10);
    }

    #[test]
    fn duplicate_declarations_rejected() {
        let diags = parse_model("tree T = A\ntree T = B").unwrap_err();
        assert!(diags[0].msg.contains("duplicate"));
    }

    #[test]
    fn roundtrip_on_fixtures() {
        for f in [
            "../../crates/kbt/fixtures/recharge.kbt",
            "../../crates/kbt/fixtures/door.kbt",
            "../../crates/kbt/fixtures/wall_follow.kbt",
            "../../crates/kbt/fixtures/memory.kbt",
            "../../crates/kbt/fixtures/showcase.kbt",
        ] {
            let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
                .join(f.trim_start_matches("../../crates/kbt/"));
            let text = std::fs::read_to_string(&path).unwrap();
            let m = parse_model(&text).unwrap_or_else(|e| panic!("{f}: {e:?}"));
            let out = format_model(&m);
            let m2 = parse_model(&out).unwrap_or_else(|e| panic!("{f} reparse: {e:?}"));
            assert_eq!(m, m2, "{f} round trip");
            // formatting is idempotent
            assert_eq!(out, format_model(&m2), "{f} idempotence");
            build_model(&m).unwrap_or_else(|e| panic!("{f} build: {e}"));
        }
    }
}
