//! Reference implementations of the classical architectures: Moore-machine
//! FSMs with guarded transition rules, binary decision trees, and
//! teleo-reactive rule lists, plus the BT-to-DT emulation.

use std::collections::{BTreeMap, BTreeSet};

use crate::asm::{Arch, ArchCtx, Selection, TickValue};
use crate::cond::ConditionExpr;
use crate::error::{Error, Result};
use crate::input::{ActionId, InputAlphabet, InputState, ValueName};
use crate::tree::{KBTree, NodeKind};

// ---------------------------------------------------------------------------
// Finite state machines.
// ---------------------------------------------------------------------------

/// What a state outputs: a concrete action, or a nested architecture that is
/// consulted at the current input while the state is active (the layered
/// controller pattern).
#[derive(Debug, Clone)]
pub enum StateLabel {
    Action(ActionId),
    Arch(Box<Arch>),
}

#[derive(Debug, Clone)]
pub struct FsmRule {
    pub from: String,
    pub guard: ConditionExpr,
    pub to: String,
}

/// A Moore machine with rule-based transitions. "No rule triggered" (or a
/// triggered self-loop) means the machine is quiescent in its current state.
#[derive(Debug, Clone)]
pub struct Fsm {
    pub states: Vec<String>,
    pub init: String,
    pub rules: Vec<FsmRule>,
    pub labels: BTreeMap<String, StateLabel>,
}

/// Mutable FSM run state: the current state and, when the current state's
/// label is a nested architecture, that architecture's state. The nested
/// state is dropped whenever the machine leaves the state, so nested
/// controllers restart when re-entered.
#[derive(Debug)]
pub struct FsmCtx {
    pub current: String,
    sub: Option<(String, Box<ArchCtx>)>,
}

impl Fsm {
    pub fn new(
        states: Vec<String>,
        init: String,
        rules: Vec<FsmRule>,
        labels: BTreeMap<String, StateLabel>,
    ) -> Result<Fsm> {
        let known: BTreeSet<&String> = states.iter().collect();
        if !known.contains(&init) {
            return Err(Error::UnknownState(init));
        }
        for r in &rules {
            if !known.contains(&r.from) {
                return Err(Error::UnknownState(r.from.clone()));
            }
            if !known.contains(&r.to) {
                return Err(Error::UnknownState(r.to.clone()));
            }
        }
        for s in &states {
            if !labels.contains_key(s) {
                return Err(Error::UnknownState(format!("unlabelled state `{s}`")));
            }
        }
        Ok(Fsm { states, init, rules, labels })
    }

    pub fn new_ctx(&self) -> FsmCtx {
        FsmCtx { current: self.init.clone(), sub: None }
    }

    /// Applies triggered transitions under the fixed input until quiescent.
    /// A triggered self-loop counts as quiescence. Revisiting a state within
    /// one step is a cycle error; two guards triggered at once is an
    /// overlapping-guard error.
    pub fn settle(&self, from: &str, x: &InputState) -> Result<String> {
        let mut q = from.to_string();
        let mut visited = vec![q.clone()];
        loop {
            let mut triggered: Option<&FsmRule> = None;
            for r in self.rules.iter().filter(|r| r.from == q) {
                if r.guard.eval(x)? {
                    if let Some(prev) = triggered {
                        return Err(Error::OverlappingGuards {
                            state: q,
                            a: prev.to.clone(),
                            b: r.to.clone(),
                        });
                    }
                    triggered = Some(r);
                }
            }
            match triggered {
                None => return Ok(q),
                Some(r) if r.to == q => return Ok(q),
                Some(r) => {
                    if visited.contains(&r.to) {
                        return Err(Error::TransitionCycle {
                            state: r.to.clone(),
                            path: visited,
                        });
                    }
                    visited.push(r.to.clone());
                    q = r.to.clone();
                }
            }
        }
    }

    /// One Moore-machine step: input first, then output the settled state's
    /// label.
    pub fn step(&self, ctx: &mut FsmCtx, x: &InputState) -> Result<Selection> {
        let next = self.settle(&ctx.current, x)?;
        ctx.current = next.clone();
        match self.labels.get(&next).expect("labels validated total") {
            StateLabel::Action(a) => {
                ctx.sub = None;
                Ok(Selection { action: a.clone(), value: TickValue::Unhandled(None) })
            }
            StateLabel::Arch(inner) => {
                let keep = matches!(&ctx.sub, Some((s, _)) if *s == next);
                if !keep {
                    ctx.sub = Some((next.clone(), Box::new(inner.new_ctx())));
                }
                let (_, sub) = ctx.sub.as_mut().unwrap();
                inner.step(sub, x)
            }
        }
    }

    /// Variables referenced by any transition guard.
    pub fn guard_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            r.guard.collect_vars(&mut out);
        }
        out
    }

    /// Exhaustively checks guard disjointness per (state, input) over an
    /// alphabet.
    pub fn check_disjoint_guards(&self, a: &InputAlphabet) -> Result<()> {
        for x in a.states() {
            for q in &self.states {
                let mut hit: Option<&FsmRule> = None;
                for r in self.rules.iter().filter(|r| r.from == *q) {
                    if r.guard.eval(x)? {
                        if let Some(prev) = hit {
                            return Err(Error::OverlappingGuards {
                                state: q.clone(),
                                a: prev.to.clone(),
                                b: r.to.clone(),
                            });
                        }
                        hit = Some(r);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Single-step convenience over a plain (action-labelled) FSM: settles from
/// `q` under `x` and reports the new state plus its selection. Nested
/// architectures in labels are stepped from a fresh context.
pub fn fsm_step(f: &Fsm, q: &str, x: &InputState) -> Result<(String, Selection)> {
    let mut ctx = FsmCtx { current: q.to_string(), sub: None };
    let sel = f.step(&mut ctx, x)?;
    Ok((ctx.current, sel))
}

// ---------------------------------------------------------------------------
// Decision trees.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum Dt {
    Leaf(ActionId),
    If {
        cond: ConditionExpr,
        yes: Box<Dt>,
        no: Box<Dt>,
    },
}

impl Dt {
    pub fn leaf(name: &str) -> Dt {
        Dt::Leaf(ActionId::new(name))
    }

    pub fn branch(cond: ConditionExpr, yes: Dt, no: Dt) -> Dt {
        Dt::If { cond, yes: Box::new(yes), no: Box::new(no) }
    }

    /// Root-to-leaf descent. A DT handles no return values, so the value is
    /// always unhandled.
    pub fn select(&self, x: &InputState) -> Result<Selection> {
        match self {
            Dt::Leaf(a) => Ok(Selection { action: a.clone(), value: TickValue::Unhandled(None) }),
            Dt::If { cond, yes, no } => {
                if cond.eval(x)? {
                    yes.select(x)
                } else {
                    no.select(x)
                }
            }
        }
    }
}

pub fn dt_select(d: &Dt, x: &InputState) -> Result<Selection> {
    d.select(x)
}

// ---------------------------------------------------------------------------
// Teleo-reactive programs.
// ---------------------------------------------------------------------------

/// A priority-ordered condition -> action rule list.
#[derive(Debug, Clone)]
pub struct Tr {
    pub rules: Vec<(ConditionExpr, ActionId)>,
}

impl Tr {
    pub fn new(rules: Vec<(ConditionExpr, ActionId)>) -> Result<Tr> {
        if rules.is_empty() {
            return Err(Error::EmptyProgram);
        }
        Ok(Tr { rules })
    }

    /// True when the last rule's condition is the literal catch-all; callers
    /// may warn otherwise.
    pub fn has_catch_all(&self) -> bool {
        matches!(self.rules.last(), Some((ConditionExpr::True, _)))
    }

    /// First rule whose condition holds wins.
    pub fn select(&self, x: &InputState) -> Result<Selection> {
        for (k, a) in &self.rules {
            if k.eval(x)? {
                return Ok(Selection { action: a.clone(), value: TickValue::Unhandled(None) });
            }
        }
        Err(Error::NoRuleSatisfied)
    }
}

pub fn tr_select(t: &Tr, x: &InputState) -> Result<Selection> {
    t.select(x)
}

// ---------------------------------------------------------------------------
// BT -> DT emulation: the encapsulation-loss construction. Return-value
// metadata is deliberately discarded; only the selection function survives.
// ---------------------------------------------------------------------------

/// Compiles a decorator-free two-valued tree into a decision tree whose
/// selection equals the tree's tick selection on every input.
pub fn bt_to_dt(t: &KBTree) -> Result<Dt> {
    if !t.value_set.has_success_failure() || t.value_set.k() != 2 {
        return Err(Error::UnsupportedForDt("non-classical value set".into()));
    }
    compile(&t.root, None, None)
}

/// Continuations: where control flows when this node produces Success or
/// Failure. `None` means the value escapes the whole tree, in which case the
/// producing leaf is the selection.
fn compile(n: &crate::tree::Node, succ: Option<&Dt>, fail: Option<&Dt>) -> Result<Dt> {
    let success = ValueName::success();
    let failure = ValueName::failure();
    match &n.kind {
        NodeKind::Action(a) => {
            let own = Dt::Leaf(a.action.clone());
            let mut dt = match &a.returns.default {
                Some(v) if *v == success => succ.cloned().unwrap_or_else(|| own.clone()),
                Some(v) if *v == failure => fail.cloned().unwrap_or_else(|| own.clone()),
                _ => own.clone(),
            };
            for (c, v) in a.returns.cases.iter().rev() {
                let taken = if *v == success {
                    succ.cloned().unwrap_or_else(|| own.clone())
                } else if *v == failure {
                    fail.cloned().unwrap_or_else(|| own.clone())
                } else {
                    own.clone()
                };
                dt = Dt::branch(c.clone(), taken, dt);
            }
            Ok(dt)
        }
        NodeKind::Condition { expr, .. } => {
            let yes = succ.cloned().unwrap_or(Dt::Leaf(ActionId::noop()));
            let no = fail.cloned().unwrap_or(Dt::Leaf(ActionId::noop()));
            Ok(Dt::branch(expr.clone(), yes, no))
        }
        NodeKind::Control { handled, memory: false, children } => {
            let mut acc = compile(children.last().unwrap(), succ, fail)?;
            for c in children[..children.len() - 1].iter().rev() {
                acc = if *handled == success {
                    compile(c, Some(&acc), fail)?
                } else if *handled == failure {
                    compile(c, succ, Some(&acc))?
                } else {
                    return Err(Error::UnsupportedForDt(format!("*{handled}")));
                };
            }
            Ok(acc)
        }
        NodeKind::Control { memory: true, .. } => {
            Err(Error::UnsupportedForDt("memory".into()))
        }
        NodeKind::Decorator { .. } => Err(Error::UnsupportedForDt("decorator".into())),
        NodeKind::Parallel { .. } => Err(Error::UnsupportedForDt("parallel".into())),
        NodeKind::Utility { .. } => Err(Error::UnsupportedForDt("utility".into())),
        NodeKind::Embedded { .. } => Err(Error::UnsupportedForDt("embedded".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn recharge_fsm() -> Fsm {
        Fsm::new(
            vec!["OtherTask".into(), "Recharging".into()],
            "OtherTask".into(),
            vec![
                FsmRule {
                    from: "OtherTask".into(),
                    guard: ConditionExpr::lt("battery", 10),
                    to: "Recharging".into(),
                },
                FsmRule {
                    from: "Recharging".into(),
                    guard: ConditionExpr::eq("battery", 100),
                    to: "OtherTask".into(),
                },
            ],
            BTreeMap::from([
                ("OtherTask".to_string(), StateLabel::Action(ActionId::new("Work"))),
                ("Recharging".to_string(), StateLabel::Action(ActionId::new("Recharge"))),
            ]),
        )
        .unwrap()
    }

    #[test]
    fn no_triggered_guard_stays_put() {
        let f = recharge_fsm();
        let (q, sel) = fsm_step(&f, "OtherTask", &InputState::of(&[("battery", 50)])).unwrap();
        assert_eq!(q, "OtherTask");
        assert_eq!(sel.action, ActionId::new("Work"));
    }

    #[test]
    fn low_battery_switches_to_recharging() {
        let f = recharge_fsm();
        let (q, sel) = fsm_step(&f, "OtherTask", &InputState::of(&[("battery", 5)])).unwrap();
        assert_eq!(q, "Recharging");
        assert_eq!(sel.action, ActionId::new("Recharge"));
    }

    #[test]
    fn transition_chain_settles_to_fixpoint() {
        let f = Fsm::new(
            vec!["q1".into(), "q2".into(), "q3".into()],
            "q1".into(),
            vec![
                FsmRule { from: "q1".into(), guard: ConditionExpr::eq("go", 1), to: "q2".into() },
                FsmRule { from: "q2".into(), guard: ConditionExpr::eq("go", 1), to: "q3".into() },
            ],
            BTreeMap::from([
                ("q1".to_string(), StateLabel::Action(ActionId::new("a1"))),
                ("q2".to_string(), StateLabel::Action(ActionId::new("a2"))),
                ("q3".to_string(), StateLabel::Action(ActionId::new("a3"))),
            ]),
        )
        .unwrap();
        let (q, sel) = fsm_step(&f, "q1", &InputState::of(&[("go", 1)])).unwrap();
        assert_eq!(q, "q3");
        assert_eq!(sel.action, ActionId::new("a3"));
    }

    #[test]
    fn triggered_self_loop_is_quiescent() {
        let f = Fsm::new(
            vec!["q".into()],
            "q".into(),
            vec![FsmRule { from: "q".into(), guard: ConditionExpr::True, to: "q".into() }],
            BTreeMap::from([("q".to_string(), StateLabel::Action(ActionId::new("a")))]),
        )
        .unwrap();
        let (q, _) = fsm_step(&f, "q", &InputState::new()).unwrap();
        assert_eq!(q, "q");
    }

    #[test]
    fn transition_cycle_is_an_error_naming_the_loop() {
        let f = Fsm::new(
            vec!["q1".into(), "q2".into()],
            "q1".into(),
            vec![
                FsmRule { from: "q1".into(), guard: ConditionExpr::True, to: "q2".into() },
                FsmRule { from: "q2".into(), guard: ConditionExpr::True, to: "q1".into() },
            ],
            BTreeMap::from([
                ("q1".to_string(), StateLabel::Action(ActionId::new("a"))),
                ("q2".to_string(), StateLabel::Action(ActionId::new("a"))),
            ]),
        )
        .unwrap();
        match fsm_step(&f, "q1", &InputState::new()) {
            Err(Error::TransitionCycle { path, .. }) => assert!(path.contains(&"q1".to_string())),
            other => panic!("expected cycle error, got {other:?}"),
        }
    }

    #[test]
    fn overlapping_guards_rejected_over_alphabet() {
        let f = Fsm::new(
            vec!["q".into(), "r".into(), "s".into()],
            "q".into(),
            vec![
                FsmRule { from: "q".into(), guard: ConditionExpr::ge("x", 0), to: "r".into() },
                FsmRule { from: "q".into(), guard: ConditionExpr::eq("x", 1), to: "s".into() },
            ],
            BTreeMap::from([
                ("q".to_string(), StateLabel::Action(ActionId::new("a"))),
                ("r".to_string(), StateLabel::Action(ActionId::new("a"))),
                ("s".to_string(), StateLabel::Action(ActionId::new("a"))),
            ]),
        )
        .unwrap();
        let a = InputAlphabet::booleans(&["x"]).unwrap();
        assert!(matches!(
            f.check_disjoint_guards(&a),
            Err(Error::OverlappingGuards { .. })
        ));
    }

    #[test]
    fn dt_single_leaf() {
        let d = Dt::leaf("A");
        let sel = dt_select(&d, &InputState::new()).unwrap();
        assert_eq!(sel.action, ActionId::new("A"));
        assert!(sel.value.is_unhandled());
    }

    #[test]
    fn dt_two_level_battery() {
        let d = Dt::branch(
            ConditionExpr::lt("battery", 10),
            Dt::leaf("Recharge"),
            Dt::leaf("Work"),
        );
        assert_eq!(
            dt_select(&d, &InputState::of(&[("battery", 5)])).unwrap().action,
            ActionId::new("Recharge")
        );
        assert_eq!(
            dt_select(&d, &InputState::of(&[("battery", 50)])).unwrap().action,
            ActionId::new("Work")
        );
    }

    #[test]
    fn dt_select_agrees_with_path_enumeration() {
        use rand::{Rng, SeedableRng};
        let vars = ["u", "v", "w"];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        // random DTs of depth <= 3 vs explicit path enumeration
        fn gen(rng: &mut rand_chacha::ChaCha8Rng, vars: &[&str], depth: usize) -> Dt {
            if depth == 0 || rng.gen_bool(0.3) {
                Dt::leaf(&format!("a{}", rng.gen_range(0..4)))
            } else {
                let v = vars[rng.gen_range(0..vars.len())];
                Dt::branch(
                    ConditionExpr::eq(v, rng.gen_range(0..2)),
                    gen(rng, vars, depth - 1),
                    gen(rng, vars, depth - 1),
                )
            }
        }
        // oracle: collect all root-to-leaf paths as (conditions, polarity) lists
        fn paths(d: &Dt, acc: Vec<(ConditionExpr, bool)>, out: &mut Vec<(Vec<(ConditionExpr, bool)>, String)>) {
            match d {
                Dt::Leaf(a) => out.push((acc, a.name().to_string())),
                Dt::If { cond, yes, no } => {
                    let mut y = acc.clone();
                    y.push((cond.clone(), true));
                    paths(yes, y, out);
                    let mut n = acc;
                    n.push((cond.clone(), false));
                    paths(no, n, out);
                }
            }
        }
        let alphabet = InputAlphabet::booleans(&vars).unwrap();
        for _ in 0..50 {
            let d = gen(&mut rng, &vars, 3);
            let mut all = Vec::new();
            paths(&d, vec![], &mut all);
            for x in alphabet.states() {
                let expected = all
                    .iter()
                    .find(|(conds, _)| {
                        conds.iter().all(|(c, pol)| c.eval(x).unwrap() == *pol)
                    })
                    .map(|(_, a)| a.clone())
                    .unwrap();
                assert_eq!(dt_select(&d, x).unwrap().action, ActionId::new(expected));
            }
        }
    }

    #[test]
    fn tr_first_satisfied_rule_wins() {
        let t = Tr::new(vec![
            (ConditionExpr::eq("k1", 1), ActionId::new("a1")),
            (ConditionExpr::eq("k2", 1), ActionId::new("a2")),
        ])
        .unwrap();
        let x = InputState::of(&[("k1", 0), ("k2", 1)]);
        assert_eq!(tr_select(&t, &x).unwrap().action, ActionId::new("a2"));
    }

    #[test]
    fn tr_catch_all_only() {
        let t = Tr::new(vec![(ConditionExpr::True, ActionId::new("a"))]).unwrap();
        assert!(t.has_catch_all());
        assert_eq!(tr_select(&t, &InputState::new()).unwrap().action, ActionId::new("a"));
    }

    #[test]
    fn tr_no_satisfied_rule_is_an_error() {
        let t = Tr::new(vec![(ConditionExpr::False, ActionId::new("a"))]).unwrap();
        assert!(!t.has_catch_all());
        assert!(matches!(
            tr_select(&t, &InputState::new()),
            Err(Error::NoRuleSatisfied)
        ));
    }

    #[test]
    fn bt_to_dt_single_leaf() {
        let t = KBTree::classic(crate::tree::action(
            "A",
            crate::tree::ReturnRule::running(),
        ))
        .unwrap();
        let d = bt_to_dt(&t).unwrap();
        assert_eq!(dt_select(&d, &InputState::new()).unwrap().action, ActionId::new("A"));
    }

    #[test]
    fn bt_to_dt_preserves_selection_exhaustively() {
        use crate::tree::{action, condition_expr, fallback, sequence, ReturnRule};
        let t = KBTree::classic(
            fallback(vec![
                sequence(vec![
                    condition_expr(ConditionExpr::lt("battery", 10)),
                    action(
                        "Recharge",
                        ReturnRule::running()
                            .when(ConditionExpr::eq("battery", 100), ValueName::success()),
                    ),
                ])
                .unwrap(),
                action("OtherTask", ReturnRule::running()),
            ])
            .unwrap(),
        )
        .unwrap();
        let d = bt_to_dt(&t).unwrap();
        let a = InputAlphabet::product(&[("battery", vec![5, 9, 10, 50, 100])]).unwrap();
        for x in a.states() {
            assert_eq!(
                dt_select(&d, x).unwrap().action,
                t.tick_once(x).unwrap().selection.action,
                "at {x}"
            );
        }
    }

    #[test]
    fn bt_to_dt_rejects_decorated_trees() {
        let t = KBTree::classic(crate::tree::negation(crate::tree::action(
            "A",
            crate::tree::ReturnRule::running(),
        )))
        .unwrap();
        assert!(matches!(bt_to_dt(&t), Err(Error::UnsupportedForDt(_))));
    }
}
