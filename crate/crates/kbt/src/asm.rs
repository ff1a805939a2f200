//! The uniform action-selection interface: every architecture maps a history
//! of inputs to a selected action, stepping one input at a time.

use std::collections::BTreeMap;
use std::fmt;

use crate::classic::{Dt, Fsm, FsmCtx, Tr};
use crate::cond::ConditionExpr;
use crate::error::{Error, Result};
use crate::input::{ActionId, History, InputState, ValueName};
use crate::tree::{KBTree, TreeCtx};

/// Return value carried by a selection. `Unhandled` marks a value outside
/// the handling structure's value set; `Unhandled(None)` is the classical
/// "Running" case where no value was produced at all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TickValue {
    Value(ValueName),
    Unhandled(Option<ValueName>),
}

impl TickValue {
    pub fn is_unhandled(&self) -> bool {
        matches!(self, TickValue::Unhandled(_))
    }
}

impl fmt::Display for TickValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TickValue::Value(v) => write!(f, "{v}"),
            TickValue::Unhandled(Some(v)) => write!(f, "~{v}"),
            TickValue::Unhandled(None) => write!(f, "Running"),
        }
    }
}

/// One action-selection result: the chosen action and the return value that
/// accompanied it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    pub action: ActionId,
    pub value: TickValue,
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.action, self.value)
    }
}

/// A hidden-variable update rule: `var := value` when the condition holds on
/// the pre-update state (current input plus current hidden values).
#[derive(Debug, Clone)]
pub struct BbRule {
    pub var: String,
    pub value: i64,
    pub when: ConditionExpr,
}

/// Wraps an architecture with hidden blackboard variables whose dynamics run
/// outside the wrapped structure. This is the implicit-memory anti-pattern
/// made executable: the wrapped architecture sees the hidden bindings, the
/// checkers do not, so the composite shows up as non-reactive.
#[derive(Debug, Clone)]
pub struct Blackboard {
    pub inner: Box<Arch>,
    pub init: BTreeMap<String, i64>,
    /// Ordered; for each variable the first rule whose condition holds wins.
    /// All rules are evaluated against the pre-update state.
    pub rules: Vec<BbRule>,
}

/// Any of the supported architectures, viewed as an action-selection
/// mechanism. Definitions are immutable; all stepping state lives in an
/// [`ArchCtx`].
#[derive(Debug, Clone)]
pub enum Arch {
    Tree(KBTree),
    Fsm(Fsm),
    Dt(Dt),
    Tr(Tr),
    Blackboard(Blackboard),
}

/// Per-run mutable state for one architecture instance.
#[derive(Debug)]
pub enum ArchCtx {
    Tree(TreeCtx),
    Fsm(FsmCtx),
    Stateless,
    Blackboard {
        hidden: BTreeMap<String, i64>,
        inner: Box<ArchCtx>,
    },
}

impl Arch {
    pub fn new_ctx(&self) -> ArchCtx {
        match self {
            Arch::Tree(_) => ArchCtx::Tree(TreeCtx::default()),
            Arch::Fsm(f) => ArchCtx::Fsm(f.new_ctx()),
            Arch::Dt(_) | Arch::Tr(_) => ArchCtx::Stateless,
            Arch::Blackboard(b) => ArchCtx::Blackboard {
                hidden: b.init.clone(),
                inner: Box::new(b.inner.new_ctx()),
            },
        }
    }

    /// Feeds one input and returns the resulting selection.
    pub fn step(&self, ctx: &mut ArchCtx, x: &InputState) -> Result<Selection> {
        match (self, ctx) {
            (Arch::Tree(t), ArchCtx::Tree(tc)) => Ok(t.tick(x, tc)?.selection),
            (Arch::Fsm(f), ArchCtx::Fsm(fc)) => f.step(fc, x),
            (Arch::Dt(d), _) => d.select(x),
            (Arch::Tr(t), _) => t.select(x),
            (Arch::Blackboard(b), ArchCtx::Blackboard { hidden, inner }) => {
                let extended = x.with_hidden(hidden);
                let sel = b.inner.step(inner, &extended)?;
                // Post-step update: first matching rule per variable, all
                // judged against the pre-update state.
                let mut updated: BTreeMap<String, i64> = BTreeMap::new();
                for r in &b.rules {
                    if updated.contains_key(&r.var) {
                        continue;
                    }
                    if r.when.eval(&extended)? {
                        updated.insert(r.var.clone(), r.value);
                    }
                }
                hidden.extend(updated);
                Ok(sel)
            }
            _ => unreachable!("context constructed from a different architecture"),
        }
    }
}

/// Runs an architecture over a full history and returns the final selection.
pub fn run_asm(m: &Arch, h: &History) -> Result<Selection> {
    if h.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let mut ctx = m.new_ctx();
    let mut last = None;
    for x in h {
        last = Some(m.step(&mut ctx, x)?);
    }
    Ok(last.unwrap())
}

/// One selection per input, in order. The last element equals
/// `run_asm(m, h)`.
pub fn trace_asm(m: &Arch, h: &History) -> Result<Vec<Selection>> {
    if h.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let mut ctx = m.new_ctx();
    let mut out = Vec::with_capacity(h.len());
    for x in h {
        out.push(m.step(&mut ctx, x)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cond::ConditionExpr;
    use crate::tree::{action, ReturnRule};
    use crate::worlds::scenarios;

    #[test]
    fn run_asm_rejects_empty_history() {
        let m = Arch::Tree(scenarios::recharge_bt());
        assert!(matches!(run_asm(&m, &vec![]), Err(Error::EmptyHistory)));
    }

    #[test]
    fn trace_last_equals_run() {
        let m = scenarios::recharge_bt_hidden_flag();
        let h = scenarios::oscillating_battery_history(12);
        let trace = trace_asm(&m, &h).unwrap();
        assert_eq!(trace.len(), h.len());
        for i in 1..=h.len() {
            let prefix: History = h[..i].to_vec();
            assert_eq!(trace[i - 1], run_asm(&m, &prefix).unwrap(), "prefix {i}");
        }
    }

    #[test]
    fn blackboard_rules_see_pre_update_state() {
        // Two rules: b copies a's OLD value, a flips to the input. On input
        // (x=1) from (a=0, b=0): a becomes 1, b stays 0 because it reads the
        // pre-update a.
        let inner = Arch::Tree(
            crate::tree::KBTree::classic(action("Sink", ReturnRule::running())).unwrap(),
        );
        let b = Arch::Blackboard(Blackboard {
            inner: Box::new(inner),
            init: BTreeMap::from([("a".to_string(), 0), ("b".to_string(), 0)]),
            rules: vec![
                BbRule { var: "b".into(), value: 1, when: ConditionExpr::eq("a", 1) },
                BbRule { var: "a".into(), value: 1, when: ConditionExpr::eq("x", 1) },
            ],
        });
        let mut ctx = b.new_ctx();
        b.step(&mut ctx, &InputState::of(&[("x", 1)])).unwrap();
        let ArchCtx::Blackboard { hidden, .. } = &ctx else { panic!() };
        assert_eq!(hidden.get("a"), Some(&1));
        assert_eq!(hidden.get("b"), Some(&0));
        // second step: now a==1 held over, so b updates
        b.step(&mut ctx, &InputState::of(&[("x", 0)])).unwrap();
        let ArchCtx::Blackboard { hidden, .. } = &ctx else { panic!() };
        assert_eq!(hidden.get("b"), Some(&1));
    }

    #[test]
    fn blackboard_first_matching_rule_per_var_wins() {
        let inner = Arch::Tree(
            crate::tree::KBTree::classic(action("Sink", ReturnRule::running())).unwrap(),
        );
        let b = Arch::Blackboard(Blackboard {
            inner: Box::new(inner),
            init: BTreeMap::from([("v".to_string(), 0)]),
            rules: vec![
                BbRule { var: "v".into(), value: 7, when: ConditionExpr::True },
                BbRule { var: "v".into(), value: 9, when: ConditionExpr::True },
            ],
        });
        let mut ctx = b.new_ctx();
        b.step(&mut ctx, &InputState::new()).unwrap();
        let ArchCtx::Blackboard { hidden, .. } = &ctx else { panic!() };
        assert_eq!(hidden.get("v"), Some(&7));
    }

    #[test]
    fn hidden_flag_wrapper_latches_recharge() {
        // battery dips below 10 once, then hovers at 50: the wrapped tree
        // keeps selecting Recharge until 100 is seen. Rules fire after the
        // tick, so the flag still holds on the tick that first reads 100.
        let m = scenarios::recharge_bt_hidden_flag();
        let mk = |b: i64| InputState::of(&[("battery", b)]);
        let h = vec![mk(50), mk(5), mk(50), mk(50), mk(100), mk(50)];
        let trace = trace_asm(&m, &h).unwrap();
        let names: Vec<_> = trace.iter().map(|s| s.action.name().to_string()).collect();
        assert_eq!(names, ["Work", "Recharge", "Recharge", "Recharge", "Recharge", "Work"]);
    }
}
