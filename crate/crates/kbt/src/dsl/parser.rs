//! Recursive-descent parser for model files. Errors carry line/column and
//! the parser recovers at declaration boundaries so a broken file reports as
//! many problems as possible in one pass.

use std::collections::HashSet;

use crate::cond::{CmpOp, ConditionExpr};

use super::ast::*;
use super::lexer::{lex, Diag, Tok, Token};

const TOP_KEYWORDS: &[&str] = &[
    "values", "var", "hidden", "action", "cond", "tree", "dt", "tr", "fsm", "stack", "world",
    "alphabet", "blackboard",
];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    diags: Vec<Diag>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, off: usize) -> &Tok {
        &self.toks[(self.pos + off).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&mut self, msg: impl Into<String>) {
        let (line, col) = self.here();
        self.diags.push(Diag { line, col, msg: msg.into() });
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Option<()> {
        if self.eat(t) {
            Some(())
        } else {
            let found = self.peek().clone();
            self.err(format!("expected {t}, found {found}"));
            None
        }
    }

    fn ident(&mut self, what: &str) -> Option<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Some(s)
            }
            found => {
                self.err(format!("expected {what}, found {found}"));
                None
            }
        }
    }

    fn keyword(&mut self, kw: &str) -> Option<()> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Some(())
            }
            found => {
                let found = found.clone();
                self.err(format!("expected `{kw}`, found {found}"));
                None
            }
        }
    }

    fn int(&mut self, what: &str) -> Option<i64> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Some(n)
            }
            found => {
                self.err(format!("expected {what}, found {found}"));
                None
            }
        }
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    /// Skips to the next top-level declaration keyword (at brace depth 0).
    fn recover_top(&mut self) {
        let mut depth = 0i32;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::LBrace => {
                    depth += 1;
                    self.bump();
                }
                Tok::RBrace => {
                    depth -= 1;
                    self.bump();
                    if depth <= 0 {
                        depth = 0;
                    }
                }
                Tok::Ident(s) if depth == 0 && TOP_KEYWORDS.contains(&s.as_str()) => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    // --- condition expressions -------------------------------------------

    fn cexpr(&mut self) -> Option<ConditionExpr> {
        let mut terms = vec![self.cand()?];
        while self.at_kw("or") {
            self.bump();
            terms.push(self.cand()?);
        }
        Some(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            ConditionExpr::or(terms)
        })
    }

    fn cand(&mut self) -> Option<ConditionExpr> {
        let mut terms = vec![self.cnot()?];
        while self.at_kw("and") {
            self.bump();
            terms.push(self.cnot()?);
        }
        Some(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            ConditionExpr::and(terms)
        })
    }

    fn cnot(&mut self) -> Option<ConditionExpr> {
        if self.at_kw("not") {
            self.bump();
            return Some(ConditionExpr::not(self.cnot()?));
        }
        self.cprim()
    }

    fn cprim(&mut self) -> Option<ConditionExpr> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.cexpr()?;
                self.expect(&Tok::RParen)?;
                Some(e)
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Some(ConditionExpr::True)
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Some(ConditionExpr::False)
            }
            Tok::Ident(var) => {
                self.bump();
                let op = match self.peek() {
                    Tok::Eq => CmpOp::Eq,
                    Tok::Ne => CmpOp::Ne,
                    Tok::Lt => CmpOp::Lt,
                    Tok::Le => CmpOp::Le,
                    Tok::Gt => CmpOp::Gt,
                    Tok::Ge => CmpOp::Ge,
                    found => {
                        let found = found.clone();
                        self.err(format!(
                            "expected comparison operator after `{var}`, found {found}"
                        ));
                        return None;
                    }
                };
                self.bump();
                let lit = self.int("integer literal")?;
                Some(ConditionExpr::cmp(var, op, lit))
            }
            found => {
                self.err(format!("expected condition, found {found}"));
                None
            }
        }
    }

    // --- tree expressions -------------------------------------------------

    fn texpr(&mut self) -> Option<TreeExpr> {
        // `?` level: lowest precedence
        let first = self.tseq()?;
        let memory = match self.peek() {
            Tok::Query => false,
            Tok::MemQuery => true,
            _ => return Some(first),
        };
        let op = self.peek().clone();
        let mut children = vec![first];
        while self.peek() == &op {
            self.bump();
            children.push(self.tseq()?);
        }
        if matches!(self.peek(), Tok::Query | Tok::MemQuery) {
            self.err("mixed `?` and `mem?` in one chain; parenthesize");
            return None;
        }
        Some(make_control("Failure", memory, children))
    }

    fn tseq(&mut self) -> Option<TreeExpr> {
        let first = self.tunary()?;
        let memory = match self.peek() {
            Tok::Arrow => false,
            Tok::MemArrow => true,
            _ => return Some(first),
        };
        let op = self.peek().clone();
        let mut children = vec![first];
        while self.peek() == &op {
            self.bump();
            children.push(self.tunary()?);
        }
        if matches!(self.peek(), Tok::Arrow | Tok::MemArrow) {
            self.err("mixed `->` and `mem->` in one chain; parenthesize");
            return None;
        }
        Some(make_control("Success", memory, children))
    }

    fn tunary(&mut self) -> Option<TreeExpr> {
        if self.eat(&Tok::Bang) {
            return Some(TreeExpr::Neg(Box::new(self.tunary()?)));
        }
        self.tprim()
    }

    fn tlist(&mut self) -> Option<Vec<TreeExpr>> {
        self.expect(&Tok::LBrack)?;
        let mut children = Vec::new();
        loop {
            children.push(self.texpr()?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::RBrack)?;
        Some(children)
    }

    fn tprim(&mut self) -> Option<TreeExpr> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.texpr()?;
                self.expect(&Tok::RParen)?;
                Some(e)
            }
            Tok::Star => {
                self.bump();
                let value = self.ident("value name after `*`")?;
                let children = self.tlist()?;
                Some(make_control(&value, false, children))
            }
            Tok::Ident(s) if s == "par" => {
                self.bump();
                self.expect(&Tok::LParen)?;
                let m = self.int("success threshold")?;
                if m < 1 {
                    self.err("parallel threshold must be at least 1");
                    return None;
                }
                self.expect(&Tok::RParen)?;
                let children = self.tlist()?;
                Some(TreeExpr::Par(m as u32, children))
            }
            Tok::Ident(s) if s == "until_success" => {
                self.bump();
                self.expect(&Tok::LParen)?;
                let e = self.texpr()?;
                self.expect(&Tok::RParen)?;
                Some(TreeExpr::UntilSuccess(Box::new(e)))
            }
            Tok::Ident(s) if s == "times" => {
                self.bump();
                self.expect(&Tok::LParen)?;
                let n = self.int("tick count")?;
                if n < 0 {
                    self.err("tick count must be non-negative");
                    return None;
                }
                self.expect(&Tok::RParen)?;
                self.expect(&Tok::LParen)?;
                let e = self.texpr()?;
                self.expect(&Tok::RParen)?;
                Some(TreeExpr::Times(n as u32, Box::new(e)))
            }
            Tok::Ident(name) => {
                self.bump();
                Some(TreeExpr::Ref(name))
            }
            found => {
                self.err(format!("expected tree expression, found {found}"));
                None
            }
        }
    }

    // --- dt expressions ---------------------------------------------------

    fn dtexpr(&mut self) -> Option<DtExpr> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.dtexpr()?;
                self.expect(&Tok::RParen)?;
                Some(e)
            }
            Tok::Ident(s) if s == "if" => {
                self.bump();
                let c = self.cexpr()?;
                self.keyword("then")?;
                let yes = self.dtexpr()?;
                self.keyword("else")?;
                let no = self.dtexpr()?;
                Some(DtExpr::If(c, Box::new(yes), Box::new(no)))
            }
            Tok::Ident(name) => {
                self.bump();
                Some(DtExpr::Leaf(name))
            }
            found => {
                self.err(format!("expected decision-tree expression, found {found}"));
                None
            }
        }
    }

    // --- shared pieces ----------------------------------------------------

    fn label_ref(&mut self) -> Option<LabelRef> {
        let kind = match self.peek() {
            Tok::Ident(s) if s == "tree" => Some(ArchKind::Tree),
            Tok::Ident(s) if s == "fsm" => Some(ArchKind::Fsm),
            Tok::Ident(s) if s == "dt" => Some(ArchKind::Dt),
            Tok::Ident(s) if s == "tr" => Some(ArchKind::Tr),
            Tok::Ident(s) if s == "blackboard" => Some(ArchKind::Blackboard),
            _ => None,
        };
        match kind {
            Some(k) => {
                self.bump();
                Some(LabelRef::Arch(k, self.ident("architecture name")?))
            }
            None => Some(LabelRef::Action(self.ident("action or architecture name")?)),
        }
    }

    /// `; `-separated statements inside `{ ... }`; trailing `;` optional.
    fn block<T>(&mut self, mut stmt: impl FnMut(&mut Self) -> Option<T>) -> Option<Vec<T>> {
        self.expect(&Tok::LBrace)?;
        let mut out = Vec::new();
        loop {
            if self.eat(&Tok::RBrace) {
                return Some(out);
            }
            out.push(stmt(self)?);
            if !self.eat(&Tok::Semi) {
                self.expect(&Tok::RBrace)?;
                return Some(out);
            }
        }
    }

    // --- declarations -----------------------------------------------------

    fn var_domain(&mut self) -> Option<VarDomain> {
        if self.at_kw("bool") {
            self.bump();
            return Some(VarDomain::Bool);
        }
        let lo = self.int("domain (`bool` or `lo..hi`)")?;
        self.expect(&Tok::DotDot)?;
        let hi = self.int("domain upper bound")?;
        if hi < lo {
            self.err("empty variable domain");
            return None;
        }
        Some(VarDomain::Range(lo, hi))
    }

    fn decl(&mut self) -> Option<Decl> {
        let kw = self.ident("declaration keyword")?;
        match kw.as_str() {
            "values" => {
                self.expect(&Tok::LBrack)?;
                let mut vs = vec![self.ident("value name")?];
                while self.eat(&Tok::Comma) {
                    vs.push(self.ident("value name")?);
                }
                self.expect(&Tok::RBrack)?;
                Some(Decl::Values(vs))
            }
            "var" | "hidden" => {
                let hidden = kw == "hidden";
                if hidden {
                    self.keyword("var")?;
                }
                let name = self.ident("variable name")?;
                self.expect(&Tok::Colon)?;
                let domain = self.var_domain()?;
                Some(Decl::Var { name, hidden, domain })
            }
            "action" => {
                let name = self.ident("action name")?;
                let returns = self.block(|p| {
                    p.keyword("returns")?;
                    let value = p.ident("value name")?;
                    let when = if p.at_kw("when") {
                        p.bump();
                        Some(p.cexpr()?)
                    } else {
                        None
                    };
                    Some(RetClause { value, when })
                })?;
                Some(Decl::Action { name, returns })
            }
            "cond" => {
                let name = self.ident("condition name")?;
                self.expect(&Tok::Assign)?;
                Some(Decl::Cond { name, expr: self.cexpr()? })
            }
            "tree" => {
                let name = self.ident("tree name")?;
                self.expect(&Tok::Assign)?;
                Some(Decl::Tree { name, expr: self.texpr()? })
            }
            "dt" => {
                let name = self.ident("decision tree name")?;
                self.expect(&Tok::Assign)?;
                Some(Decl::Dt { name, expr: self.dtexpr()? })
            }
            "tr" => {
                let name = self.ident("program name")?;
                let rules = self.block(|p| {
                    let c = p.cexpr()?;
                    p.expect(&Tok::Arrow)?;
                    let a = p.ident("action name")?;
                    Some((c, a))
                })?;
                if rules.is_empty() {
                    self.err(format!("`tr {name}` has no rules"));
                    return None;
                }
                Some(Decl::Tr { name, rules })
            }
            "fsm" => {
                let name = self.ident("machine name")?;
                let mut init: Option<String> = None;
                let mut transitions = Vec::new();
                let mut labels = Vec::new();
                self.block(|p| {
                    if p.at_kw("init") {
                        p.bump();
                        let s = p.ident("state name")?;
                        if init.replace(s).is_some() {
                            p.err("duplicate `init`");
                            return None;
                        }
                    } else if p.at_kw("label") && matches!(p.peek_at(1), Tok::Ident(_)) && p.peek_at(2) == &Tok::Colon {
                        p.bump();
                        let s = p.ident("state name")?;
                        p.expect(&Tok::Colon)?;
                        labels.push((s, p.label_ref()?));
                    } else {
                        let from = p.ident("state name")?;
                        p.expect(&Tok::DashLBrack)?;
                        let guard = p.cexpr()?;
                        p.expect(&Tok::RBrack)?;
                        p.expect(&Tok::Arrow)?;
                        let to = p.ident("state name")?;
                        transitions.push((from, guard, to));
                    }
                    Some(())
                })?;
                let init = match init {
                    Some(i) => i,
                    None => {
                        self.err(format!("`fsm {name}` is missing `init`"));
                        return None;
                    }
                };
                Some(Decl::Fsm(FsmDecl { name, init, transitions, labels }))
            }
            "blackboard" => {
                let name = self.ident("blackboard name")?;
                self.keyword("over")?;
                let inner = self.label_ref()?;
                let stmts = self.block(|p| {
                    if p.at_kw("init") {
                        p.bump();
                        let v = p.ident("variable name")?;
                        p.expect(&Tok::Assign)?;
                        Some(BbStmt::Init(v, p.int("initial value")?))
                    } else {
                        p.keyword("set")?;
                        let v = p.ident("variable name")?;
                        p.expect(&Tok::Assign)?;
                        let n = p.int("value")?;
                        p.keyword("when")?;
                        Some(BbStmt::Set(v, n, p.cexpr()?))
                    }
                })?;
                Some(Decl::Blackboard(BbDecl { name, inner, stmts }))
            }
            "stack" => {
                let name = self.ident("stack name")?;
                let layers = self.block(|p| {
                    p.keyword("layer")?;
                    let l = p.ident("layer name")?;
                    p.expect(&Tok::Colon)?;
                    Some((l, p.label_ref()?))
                })?;
                if layers.is_empty() {
                    self.err(format!("`stack {name}` has no layers"));
                    return None;
                }
                Some(Decl::Stack { name, layers })
            }
            "alphabet" => {
                let name = self.ident("alphabet name")?;
                let vars = self.block(|p| {
                    let v = p.ident("variable name")?;
                    p.expect(&Tok::Colon)?;
                    if p.at_kw("bool") {
                        p.bump();
                        return Some((v, AlphabetVar::Bool));
                    }
                    p.expect(&Tok::LBrack)?;
                    let mut vals = vec![p.int("integer")?];
                    while p.eat(&Tok::Comma) {
                        vals.push(p.int("integer")?);
                    }
                    p.expect(&Tok::RBrack)?;
                    Some((v, AlphabetVar::List(vals)))
                })?;
                if vars.is_empty() {
                    self.err(format!("`alphabet {name}` has no variables"));
                    return None;
                }
                Some(Decl::Alphabet { name, vars })
            }
            "world" => {
                let name = self.ident("world name")?;
                self.expect(&Tok::Assign)?;
                let kind = self.ident("world kind (battery, grid, door)")?;
                match kind.as_str() {
                    "battery" => {
                        let (mut initial, mut drain, mut charge, mut track) = (100, 1, 5, false);
                        self.block(|p| {
                            if p.at_kw("initial") {
                                p.bump();
                                initial = p.int("value")?;
                            } else if p.at_kw("drain") {
                                p.bump();
                                drain = p.int("value")?;
                            } else if p.at_kw("charge") {
                                p.bump();
                                charge = p.int("value")?;
                            } else if p.at_kw("track_recharging") {
                                p.bump();
                                track = true;
                            } else {
                                p.err("expected `initial`, `drain`, `charge` or `track_recharging`");
                                return None;
                            }
                            Some(())
                        })?;
                        Some(Decl::World {
                            name,
                            spec: WorldDecl::Battery {
                                initial,
                                drain,
                                charge,
                                track_recharging: track,
                            },
                        })
                    }
                    "grid" => {
                        let (mut width, mut height) = (0, 0);
                        let mut walls = Vec::new();
                        let mut markers = Vec::new();
                        let mut agent = (0, 0, 'E');
                        self.block(|p| {
                            if p.at_kw("size") {
                                p.bump();
                                width = p.int("width")?;
                                height = p.int("height")?;
                            } else if p.at_kw("wall") {
                                p.bump();
                                walls.push((p.int("x")?, p.int("y")?));
                            } else if p.at_kw("marker") {
                                p.bump();
                                markers.push((p.int("x")?, p.int("y")?));
                            } else if p.at_kw("agent") {
                                p.bump();
                                let x = p.int("x")?;
                                let y = p.int("y")?;
                                let h = p.ident("heading (N, E, S or W)")?;
                                if h.len() != 1 || !"NESW".contains(&h) {
                                    p.err("heading must be N, E, S or W");
                                    return None;
                                }
                                agent = (x, y, h.chars().next().unwrap());
                            } else {
                                p.err("expected `size`, `wall`, `marker` or `agent`");
                                return None;
                            }
                            Some(())
                        })?;
                        if width < 1 || height < 1 {
                            self.err(format!("`world {name}` is missing `size`"));
                            return None;
                        }
                        Some(Decl::World {
                            name,
                            spec: WorldDecl::Grid { width, height, walls, markers, agent },
                        })
                    }
                    "door" => {
                        let (mut locked, mut key) = (true, true);
                        self.block(|p| {
                            if p.at_kw("locked") {
                                p.bump();
                                locked = p.int("0 or 1")? != 0;
                            } else if p.at_kw("key") {
                                p.bump();
                                key = p.int("0 or 1")? != 0;
                            } else {
                                p.err("expected `locked` or `key`");
                                return None;
                            }
                            Some(())
                        })?;
                        Some(Decl::World { name, spec: WorldDecl::Door { locked, key } })
                    }
                    other => {
                        self.err(format!("unknown world kind `{other}`"));
                        None
                    }
                }
            }
            other => {
                self.err(format!("unknown declaration `{other}`"));
                None
            }
        }
    }

    fn model(&mut self) -> ModelFile {
        let mut decls = Vec::new();
        let mut names: HashSet<String> = HashSet::new();
        let mut have_values = false;
        while self.peek() != &Tok::Eof {
            let at = self.here();
            match self.decl() {
                Some(d) => {
                    if let Some(n) = d.name() {
                        if !names.insert(n.to_string()) {
                            self.diags.push(Diag {
                                line: at.0,
                                col: at.1,
                                msg: format!("duplicate declaration `{n}`"),
                            });
                        }
                    } else if std::mem::replace(&mut have_values, true) {
                        self.diags.push(Diag {
                            line: at.0,
                            col: at.1,
                            msg: "duplicate `values` block".into(),
                        });
                    }
                    decls.push(d);
                }
                None => self.recover_top(),
            }
        }
        ModelFile { decls }
    }
}

/// Builds a control node, flattening directly nested plain controls with the
/// same handled value (memory nodes are never flattened: their remembered
/// indices are per-node).
fn make_control(value: &str, memory: bool, children: Vec<TreeExpr>) -> TreeExpr {
    if children.len() == 1 {
        return children.into_iter().next().unwrap();
    }
    let mut flat = Vec::with_capacity(children.len());
    for c in children {
        match c {
            TreeExpr::Control { value: v, memory: false, children: cs }
                if !memory && v == value =>
            {
                flat.extend(cs)
            }
            other => flat.push(other),
        }
    }
    TreeExpr::Control { value: value.to_string(), memory, children: flat }
}

/// Parses a whole model file, reporting every diagnostic found.
pub fn parse_model(text: &str) -> Result<ModelFile, Vec<Diag>> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, diags: Vec::new() };
    let m = p.model();
    if p.diags.is_empty() {
        Ok(m)
    } else {
        Err(p.diags)
    }
}
