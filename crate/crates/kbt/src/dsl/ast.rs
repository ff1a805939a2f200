//! Abstract model: what a model file declares, independent of surface
//! syntax. Declaration order is significant (names must be declared before
//! use) and is preserved by the formatter.

use crate::cond::ConditionExpr;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelFile {
    pub decls: Vec<Decl>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarDomain {
    Bool,
    Range(i64, i64),
}

/// One `returns V [when c]` clause; no condition means unconditional.
#[derive(Debug, Clone, PartialEq)]
pub struct RetClause {
    pub value: String,
    pub when: Option<ConditionExpr>,
}

/// Which kind of named architecture a reference points at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArchKind {
    Tree,
    Fsm,
    Dt,
    Tr,
    Blackboard,
}

impl ArchKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ArchKind::Tree => "tree",
            ArchKind::Fsm => "fsm",
            ArchKind::Dt => "dt",
            ArchKind::Tr => "tr",
            ArchKind::Blackboard => "blackboard",
        }
    }
}

/// Either a bare action name or a kind-qualified architecture reference,
/// e.g. `Recharge` vs `tree Main`.
#[derive(Debug, Clone, PartialEq)]
pub enum LabelRef {
    Action(String),
    Arch(ArchKind, String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeExpr {
    /// Action, condition or tree name.
    Ref(String),
    /// `->` / `?` / `mem->` / `mem?` / `*V[...]` — a node continuing on
    /// `value`. Plain same-value nodes are flattened at parse time.
    Control {
        value: String,
        memory: bool,
        children: Vec<TreeExpr>,
    },
    Neg(Box<TreeExpr>),
    Par(u32, Vec<TreeExpr>),
    UntilSuccess(Box<TreeExpr>),
    Times(u32, Box<TreeExpr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum DtExpr {
    Leaf(String),
    If(ConditionExpr, Box<DtExpr>, Box<DtExpr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FsmDecl {
    pub name: String,
    pub init: String,
    pub transitions: Vec<(String, ConditionExpr, String)>,
    pub labels: Vec<(String, LabelRef)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BbStmt {
    Init(String, i64),
    Set(String, i64, ConditionExpr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BbDecl {
    pub name: String,
    pub inner: LabelRef,
    pub stmts: Vec<BbStmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WorldDecl {
    Battery {
        initial: i64,
        drain: i64,
        charge: i64,
        track_recharging: bool,
    },
    Grid {
        width: i64,
        height: i64,
        walls: Vec<(i64, i64)>,
        markers: Vec<(i64, i64)>,
        agent: (i64, i64, char),
    },
    Door {
        locked: bool,
        key: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlphabetVar {
    Bool,
    List(Vec<i64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decl {
    Values(Vec<String>),
    Var {
        name: String,
        hidden: bool,
        domain: VarDomain,
    },
    Action {
        name: String,
        returns: Vec<RetClause>,
    },
    Cond {
        name: String,
        expr: ConditionExpr,
    },
    Tree {
        name: String,
        expr: TreeExpr,
    },
    Dt {
        name: String,
        expr: DtExpr,
    },
    Tr {
        name: String,
        rules: Vec<(ConditionExpr, String)>,
    },
    Fsm(FsmDecl),
    Blackboard(BbDecl),
    Stack {
        name: String,
        layers: Vec<(String, LabelRef)>,
    },
    Alphabet {
        name: String,
        vars: Vec<(String, AlphabetVar)>,
    },
    World {
        name: String,
        spec: WorldDecl,
    },
}

impl Decl {
    /// The declared name, used for duplicate detection. `values` blocks are
    /// anonymous and a model may hold only one.
    pub fn name(&self) -> Option<&str> {
        match self {
            Decl::Values(_) => None,
            Decl::Var { name, .. }
            | Decl::Action { name, .. }
            | Decl::Cond { name, .. }
            | Decl::Tree { name, .. }
            | Decl::Dt { name, .. }
            | Decl::Tr { name, .. }
            | Decl::Stack { name, .. }
            | Decl::Alphabet { name, .. }
            | Decl::World { name, .. } => Some(name),
            Decl::Fsm(f) => Some(&f.name),
            Decl::Blackboard(b) => Some(&b.name),
        }
    }
}
