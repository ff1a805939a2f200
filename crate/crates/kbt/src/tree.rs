//! Generalised behavior trees: k-valued control nodes over action and
//! condition leaves, plus the memory, decorator, parallel and utility node
//! variants and the tick semantics shared by all of them.
//!
//! Trees are immutable values. All per-tick mutable state (memory sets,
//! decorator latches and counters, embedded-architecture state) lives in a
//! [`TreeCtx`] owned by the caller, keyed by stable node identifiers.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::asm::{Arch, ArchCtx, Selection, TickValue};
use crate::cond::ConditionExpr;
use crate::error::{Error, Result};
use crate::input::{ActionId, InputState, ValueName, ValueSet};

/// Stable identifier of a node within one tree. Assigned pre-order at
/// construction; used by styles, substitution and DOT export.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Return-value function of an action: ordered (condition, value) cases with
/// a default. `default: None` means the default result is unhandled
/// ("running" — no value produced).
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnRule {
    pub cases: Vec<(ConditionExpr, ValueName)>,
    pub default: Option<ValueName>,
}

impl ReturnRule {
    /// Always unhandled ("running").
    pub fn running() -> Self {
        ReturnRule { cases: vec![], default: None }
    }

    /// Always the given value.
    pub fn always(v: ValueName) -> Self {
        ReturnRule { cases: vec![], default: Some(v) }
    }

    pub fn when(mut self, cond: ConditionExpr, v: ValueName) -> Self {
        self.cases.push((cond, v));
        self
    }

    /// First matching case wins; falls through to the default.
    pub fn eval(&self, x: &InputState) -> Result<Option<ValueName>> {
        for (c, v) in &self.cases {
            if c.eval(x)? {
                return Ok(Some(v.clone()));
            }
        }
        Ok(self.default.clone())
    }

    /// Success and Failure exchanged everywhere.
    pub fn swapped(&self) -> Self {
        ReturnRule {
            cases: self
                .cases
                .iter()
                .map(|(c, v)| (c.clone(), v.swapped()))
                .collect(),
            default: self.default.as_ref().map(|v| v.swapped()),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        for (c, _) in &self.cases {
            c.collect_vars(out);
        }
    }
}

/// Action leaf: an action identity plus its return-value function.
#[derive(Debug, Clone)]
pub struct ActionLeaf {
    pub action: ActionId,
    pub returns: ReturnRule,
}

/// Decorator kinds. Negation is stateless; the others keep per-context state.
#[derive(Debug, Clone)]
pub enum DecoratorKind {
    Negation,
    RunUntilSuccess,
    RunNTimes(u32),
    Custom(ValueMap),
}

impl DecoratorKind {
    pub fn label(&self) -> String {
        match self {
            DecoratorKind::Negation => "!".into(),
            DecoratorKind::RunUntilSuccess => "until_success".into(),
            DecoratorKind::RunNTimes(n) => format!("times({n})"),
            DecoratorKind::Custom(_) => "custom".into(),
        }
    }
}

/// A custom decorator policy: a total map from the child's result (a value
/// name, or `None` for unhandled) to the decorator's result.
#[derive(Debug, Clone)]
pub struct ValueMap {
    pub entries: Vec<(Option<ValueName>, Option<ValueName>)>,
}

impl ValueMap {
    pub fn lookup(&self, v: &Option<ValueName>) -> Option<&Option<ValueName>> {
        self.entries.iter().find(|(k, _)| k == v).map(|(_, out)| out)
    }
}

/// Per-child utility scoring: ordered (condition, score) cases with a
/// default, evaluated on the current input only.
#[derive(Debug, Clone)]
pub struct Score {
    pub cases: Vec<(ConditionExpr, i64)>,
    pub default: i64,
}

impl Score {
    pub fn constant(v: i64) -> Self {
        Score { cases: vec![], default: v }
    }

    pub fn eval(&self, x: &InputState) -> Result<i64> {
        for (c, s) in &self.cases {
            if c.eval(x)? {
                return Ok(*s);
            }
        }
        Ok(self.default)
    }
}

#[derive(Debug, Clone)]
pub enum NodeKind {
    /// A `*_v` control node: advances past children returning `handled`,
    /// propagates any other result. With `memory` set, children whose
    /// handled result was remembered are skipped without ticking.
    Control {
        handled: ValueName,
        memory: bool,
        children: Vec<Node>,
    },
    Action(ActionLeaf),
    /// Returns Success when the proposition holds, Failure otherwise.
    Condition {
        name: Option<String>,
        expr: ConditionExpr,
    },
    Decorator {
        kind: DecoratorKind,
        child: Box<Node>,
    },
    /// Ticks all children; Success when >= threshold return Success,
    /// Failure when >= N-M+1 return Failure, otherwise unhandled.
    Parallel {
        threshold: usize,
        children: Vec<Node>,
    },
    /// Fallback whose children are stably re-sorted by descending score
    /// before each tick.
    Utility {
        children: Vec<(Node, Score)>,
    },
    /// A nested architecture used as an action. Its selection, when chosen,
    /// is the nested architecture's selection at the current input; its
    /// return value comes from `returns`.
    Embedded {
        id: ActionId,
        asm: Box<Arch>,
        returns: ReturnRule,
    },
}

#[derive(Debug, Clone)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
}

impl Node {
    fn new(kind: NodeKind) -> Node {
        Node { id: NodeId(0), kind }
    }

    /// A node awaiting identifier assignment by `KBTree::new`.
    pub fn unnumbered(kind: NodeKind) -> Node {
        Node::new(kind)
    }

    pub fn children(&self) -> Vec<&Node> {
        match &self.kind {
            NodeKind::Control { children, .. } | NodeKind::Parallel { children, .. } => {
                children.iter().collect()
            }
            NodeKind::Decorator { child, .. } => vec![child.as_ref()],
            NodeKind::Utility { children } => children.iter().map(|(n, _)| n).collect(),
            _ => vec![],
        }
    }

    /// Short label for exports and traces.
    pub fn label(&self) -> String {
        match &self.kind {
            NodeKind::Control { handled, memory, .. } => {
                let m = if *memory { "*" } else { "" };
                if handled.is_success() {
                    format!("\u{2192}{m}")
                } else if handled.is_failure() {
                    format!("?{m}")
                } else {
                    format!("*{handled}{m}")
                }
            }
            NodeKind::Action(a) => a.action.name().to_string(),
            NodeKind::Condition { name, expr } => name
                .clone()
                .unwrap_or_else(|| format!("{expr}")),
            NodeKind::Decorator { kind, .. } => kind.label(),
            NodeKind::Parallel { threshold, .. } => format!("par({threshold})"),
            NodeKind::Utility { .. } => "utility".into(),
            NodeKind::Embedded { id, .. } => format!("[{id}]"),
        }
    }
}

// ---------------------------------------------------------------------------
// Builders. These produce unnumbered nodes; `KBTree::new` validates and
// assigns identifiers. Adjacent same-operator plain control nodes are
// flattened at construction, which is what makes `*_i` associative.
// ---------------------------------------------------------------------------

pub fn action(name: &str, returns: ReturnRule) -> Node {
    Node::new(NodeKind::Action(ActionLeaf { action: ActionId::new(name), returns }))
}

pub fn condition(name: &str, expr: ConditionExpr) -> Node {
    Node::new(NodeKind::Condition { name: Some(name.to_string()), expr })
}

pub fn condition_expr(expr: ConditionExpr) -> Node {
    Node::new(NodeKind::Condition { name: None, expr })
}

/// A `*_handled` control node; flattens plain children handling the same value.
pub fn control(handled: ValueName, children: Vec<Node>) -> Result<Node> {
    if children.is_empty() {
        return Err(Error::EmptyChildren);
    }
    let mut flat = Vec::with_capacity(children.len());
    for c in children {
        match c.kind {
            NodeKind::Control { handled: ref h, memory: false, .. } if *h == handled => {
                if let NodeKind::Control { children: cs, .. } = c.kind {
                    flat.extend(cs);
                }
            }
            _ => flat.push(c),
        }
    }
    Ok(Node::new(NodeKind::Control { handled, memory: false, children: flat }))
}

pub fn sequence(children: Vec<Node>) -> Result<Node> {
    control(ValueName::success(), children)
}

pub fn fallback(children: Vec<Node>) -> Result<Node> {
    control(ValueName::failure(), children)
}

pub fn memory_control(handled: ValueName, children: Vec<Node>) -> Result<Node> {
    if children.is_empty() {
        return Err(Error::EmptyChildren);
    }
    Ok(Node::new(NodeKind::Control { handled, memory: true, children }))
}

pub fn memory_sequence(children: Vec<Node>) -> Result<Node> {
    memory_control(ValueName::success(), children)
}

pub fn memory_fallback(children: Vec<Node>) -> Result<Node> {
    memory_control(ValueName::failure(), children)
}

pub fn negation(child: Node) -> Node {
    Node::new(NodeKind::Decorator { kind: DecoratorKind::Negation, child: Box::new(child) })
}

pub fn until_success(child: Node) -> Node {
    Node::new(NodeKind::Decorator { kind: DecoratorKind::RunUntilSuccess, child: Box::new(child) })
}

pub fn times(n: u32, child: Node) -> Node {
    Node::new(NodeKind::Decorator { kind: DecoratorKind::RunNTimes(n), child: Box::new(child) })
}

pub fn custom_decorator(map: ValueMap, child: Node) -> Node {
    Node::new(NodeKind::Decorator { kind: DecoratorKind::Custom(map), child: Box::new(child) })
}

pub fn parallel(threshold: usize, children: Vec<Node>) -> Result<Node> {
    if children.is_empty() {
        return Err(Error::EmptyChildren);
    }
    let n = children.len();
    if threshold < 1 || threshold > n {
        return Err(Error::BadThreshold { m: threshold, n });
    }
    Ok(Node::new(NodeKind::Parallel { threshold, children }))
}

pub fn utility(children: Vec<(Node, Score)>) -> Result<Node> {
    if children.is_empty() {
        return Err(Error::EmptyChildren);
    }
    Ok(Node::new(NodeKind::Utility { children }))
}

/// Wraps an architecture as an action leaf so it can be nested in any tree.
pub fn embed_asm_as_action(asm: Arch, returns: ReturnRule, id: ActionId) -> Node {
    Node::new(NodeKind::Embedded { id, asm: Box::new(asm), returns })
}

// ---------------------------------------------------------------------------
// The tree itself.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct KBTree {
    pub value_set: ValueSet,
    pub root: Node,
    next_id: u32,
}

impl KBTree {
    /// Validates the whole tree (so `tick` is total on valid trees) and
    /// assigns pre-order node identifiers.
    pub fn new(value_set: ValueSet, mut root: Node) -> Result<KBTree> {
        let mut next = 0u32;
        number(&mut root, &mut next);
        validate(&root, &value_set)?;
        Ok(KBTree { value_set, root, next_id: next })
    }

    /// Classical two-valued tree.
    pub fn classic(root: Node) -> Result<KBTree> {
        KBTree::new(ValueSet::classic(), root)
    }

    /// Rebuilds a tree from a root whose identifiers are already assigned
    /// and must stay stable (style pruning). Validates but does not
    /// renumber.
    pub fn with_existing_ids(value_set: ValueSet, root: Node) -> Result<KBTree> {
        validate(&root, &value_set)?;
        let max = {
            fn walk(n: &Node, max: &mut u32) {
                *max = (*max).max(n.id.0);
                for c in n.children() {
                    walk(c, max);
                }
            }
            let mut m = 0;
            walk(&root, &mut m);
            m
        };
        Ok(KBTree { value_set, root, next_id: max + 1 })
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        fn find(n: &Node, id: NodeId) -> Option<&Node> {
            if n.id == id {
                return Some(n);
            }
            for c in n.children() {
                if let Some(hit) = find(c, id) {
                    return Some(hit);
                }
            }
            None
        }
        find(&self.root, id)
    }

    /// All node ids in pre-order.
    pub fn node_ids(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        fn walk(n: &Node, out: &mut Vec<NodeId>) {
            out.push(n.id);
            for c in n.children() {
                walk(c, out);
            }
        }
        walk(&self.root, &mut out);
        out
    }

    /// Every value name handled by some control node of this tree, plus
    /// Success/Failure where condition leaves or classic decorators occur.
    pub fn handled_values(&self) -> BTreeSet<ValueName> {
        let mut out = BTreeSet::new();
        fn walk(n: &Node, out: &mut BTreeSet<ValueName>) {
            match &n.kind {
                NodeKind::Control { handled, children, .. } => {
                    out.insert(handled.clone());
                    for c in children {
                        walk(c, out);
                    }
                }
                NodeKind::Condition { .. } | NodeKind::Parallel { .. } => {
                    out.insert(ValueName::success());
                    out.insert(ValueName::failure());
                    for c in n.children() {
                        walk(c, out);
                    }
                }
                NodeKind::Decorator { child, .. } => walk(child, out),
                NodeKind::Utility { children } => {
                    out.insert(ValueName::failure());
                    for (c, _) in children {
                        walk(c, out);
                    }
                }
                _ => {}
            }
        }
        walk(&self.root, &mut out);
        out
    }

    /// Replaces the subtree rooted at `node_id` by `sub`'s root, assigning
    /// fresh identifiers in the replaced region. `sub`'s handled values must
    /// be a subset of this tree's value set.
    pub fn substitute_subtree(&self, node_id: NodeId, sub: &KBTree) -> Result<KBTree> {
        for v in sub.handled_values() {
            if !self.value_set.contains(&v) {
                return Err(Error::IncompatibleValues(v.name().to_string()));
            }
        }
        if self.node(node_id).is_none() {
            return Err(Error::UnknownNode(node_id.0));
        }
        let mut root = self.root.clone();
        let mut fresh = self.next_id;
        let mut replacement = sub.root.clone();
        number_from(&mut replacement, &mut fresh);
        replace(&mut root, node_id, replacement);
        validate(&root, &self.value_set)?;
        Ok(KBTree { value_set: self.value_set.clone(), root, next_id: fresh })
    }

    /// True when the tree contains no memory, decorator, parallel, utility
    /// or embedded nodes: its tick is a pure function of the input.
    pub fn is_memoryless(&self) -> bool {
        fn pure(n: &Node) -> bool {
            match &n.kind {
                NodeKind::Control { memory, children, .. } => {
                    !*memory && children.iter().all(pure)
                }
                NodeKind::Action(_) | NodeKind::Condition { .. } => true,
                NodeKind::Decorator { kind: DecoratorKind::Negation, child } => pure(child),
                NodeKind::Decorator { .. } => false,
                NodeKind::Parallel { children, .. } => children.iter().all(pure),
                NodeKind::Utility { children } => children.iter().all(|(c, _)| pure(c)),
                NodeKind::Embedded { .. } => false,
            }
        }
        pure(&self.root)
    }

    /// One tick with fresh (empty) per-context state. Sufficient for
    /// memoryless trees, where the outcome depends only on the input.
    pub fn tick_once(&self, x: &InputState) -> Result<TickOutcome> {
        let mut ctx = TreeCtx::default();
        self.tick(x, &mut ctx)
    }

    /// Ticks the root with the given input, threading mutable node state
    /// through `ctx`.
    pub fn tick(&self, x: &InputState, ctx: &mut TreeCtx) -> Result<TickOutcome> {
        let mut out = TickOutcome {
            selection: Selection {
                action: ActionId::noop(),
                value: TickValue::Unhandled(None),
            },
            visited: Vec::new(),
            scores: Vec::new(),
        };
        let r = tick_node(&self.root, x, ctx, &self.value_set, &mut out)?;
        out.selection = Selection {
            action: r.action,
            value: classify(r.value, &self.value_set),
        };
        // Embedded architectures keep internal state only while continuously
        // selected; deselection resets them to their initial state.
        let selected = r.leaf;
        ctx.embedded.retain(|id, _| NodeId(*id) == selected);
        Ok(out)
    }
}

/// Result of one tick: the selection, the ticked nodes in visit order, and
/// any utility scores computed along the way.
#[derive(Debug, Clone)]
pub struct TickOutcome {
    pub selection: Selection,
    pub visited: Vec<NodeId>,
    pub scores: Vec<(NodeId, Vec<i64>)>,
}

/// Mutable per-evaluation-context state, keyed by node id. Trees never hold
/// state themselves; independent contexts make parallel simulations of one
/// tree safe.
#[derive(Debug, Default)]
pub struct TreeCtx {
    /// Memory nodes: remembered child indices.
    pub mem: HashMap<u32, BTreeSet<usize>>,
    /// RunUntilSuccess latches (monotone per context).
    pub latch: BTreeSet<u32>,
    /// RunNTimes delivered-tick counters.
    pub counter: HashMap<u32, u32>,
    /// Embedded-architecture state.
    pub embedded: HashMap<u32, ArchCtx>,
}

struct NodeResult {
    /// `None` is "running": no value produced.
    value: Option<ValueName>,
    action: ActionId,
    leaf: NodeId,
}

fn classify(v: Option<ValueName>, set: &ValueSet) -> TickValue {
    match v {
        Some(v) if set.contains(&v) => TickValue::Value(v),
        other => TickValue::Unhandled(other),
    }
}

/// The selection reported for a child that is not ticked (a remembered
/// memory-node child, or a latched decorator's child): its rightmost leaf.
fn representative(n: &Node) -> (ActionId, NodeId) {
    match &n.kind {
        NodeKind::Control { children, .. } | NodeKind::Parallel { children, .. } => {
            representative(children.last().expect("children validated non-empty"))
        }
        NodeKind::Utility { children } => representative(&children.last().unwrap().0),
        NodeKind::Decorator { child, .. } => representative(child),
        NodeKind::Action(a) => (a.action.clone(), n.id),
        NodeKind::Condition { .. } => (ActionId::noop(), n.id),
        NodeKind::Embedded { id, .. } => (id.clone(), n.id),
    }
}

fn tick_node(
    node: &Node,
    x: &InputState,
    ctx: &mut TreeCtx,
    set: &ValueSet,
    out: &mut TickOutcome,
) -> Result<NodeResult> {
    out.visited.push(node.id);
    match &node.kind {
        NodeKind::Action(a) => Ok(NodeResult {
            value: a.returns.eval(x)?,
            action: a.action.clone(),
            leaf: node.id,
        }),
        NodeKind::Condition { expr, .. } => {
            let v = if expr.eval(x)? {
                ValueName::success()
            } else {
                ValueName::failure()
            };
            Ok(NodeResult { value: Some(v), action: ActionId::noop(), leaf: node.id })
        }
        NodeKind::Embedded { id, asm, returns } => {
            let sub = ctx
                .embedded
                .entry(node.id.0)
                .or_insert_with(|| asm.new_ctx());
            let inner = asm.step(sub, x)?;
            let _ = id; // identity is used for labels; the world action is the inner one
            Ok(NodeResult {
                value: returns.eval(x)?,
                action: inner.action,
                leaf: node.id,
            })
        }
        NodeKind::Control { handled, memory: false, children } => {
            let mut last = None;
            for c in children {
                let r = tick_node(c, x, ctx, set, out)?;
                if r.value.as_ref() != Some(handled) {
                    return Ok(r);
                }
                last = Some(r);
            }
            Ok(last.expect("children validated non-empty"))
        }
        NodeKind::Control { handled, memory: true, children } => {
            let mut last = None;
            let mut newly_remembered = Vec::new();
            for (i, c) in children.iter().enumerate() {
                let remembered = ctx
                    .mem
                    .get(&node.id.0)
                    .map_or(false, |s| s.contains(&i));
                let r = if remembered {
                    let (action, leaf) = representative(c);
                    NodeResult { value: Some(handled.clone()), action, leaf }
                } else {
                    let r = tick_node(c, x, ctx, set, out)?;
                    if r.value.as_ref() == Some(handled) {
                        newly_remembered.push(i);
                    }
                    r
                };
                if r.value.as_ref() != Some(handled) {
                    // Memory persists on unhandled results and clears when
                    // the node itself returns any handled value.
                    let mem = ctx.mem.entry(node.id.0).or_default();
                    mem.extend(newly_remembered);
                    if r.value.as_ref().map_or(false, |v| set.contains(v)) {
                        ctx.mem.remove(&node.id.0);
                    }
                    return Ok(r);
                }
                last = Some(r);
            }
            ctx.mem.remove(&node.id.0);
            Ok(last.expect("children validated non-empty"))
        }
        NodeKind::Decorator { kind, child } => match kind {
            DecoratorKind::Negation => {
                let r = tick_node(child, x, ctx, set, out)?;
                Ok(NodeResult {
                    value: r.value.map(|v| v.swapped()),
                    ..r
                })
            }
            DecoratorKind::RunUntilSuccess => {
                if ctx.latch.contains(&node.id.0) {
                    let (action, leaf) = representative(child);
                    return Ok(NodeResult { value: Some(ValueName::success()), action, leaf });
                }
                let r = tick_node(child, x, ctx, set, out)?;
                if r.value.as_ref().map_or(false, |v| v.is_success()) {
                    ctx.latch.insert(node.id.0);
                }
                Ok(r)
            }
            DecoratorKind::RunNTimes(n) => {
                let c = ctx.counter.entry(node.id.0).or_insert(0);
                if *c < *n {
                    *c += 1;
                    tick_node(child, x, ctx, set, out)
                } else {
                    let (action, leaf) = representative(child);
                    Ok(NodeResult { value: Some(ValueName::success()), action, leaf })
                }
            }
            DecoratorKind::Custom(map) => {
                let r = tick_node(child, x, ctx, set, out)?;
                let mapped = map
                    .lookup(&r.value)
                    .ok_or_else(|| {
                        Error::PolicyNotTotal(
                            r.value
                                .as_ref()
                                .map(|v| v.name().to_string())
                                .unwrap_or_else(|| "<unhandled>".into()),
                        )
                    })?
                    .clone();
                Ok(NodeResult { value: mapped, ..r })
            }
        },
        NodeKind::Parallel { threshold, children } => {
            let n = children.len();
            let mut results = Vec::with_capacity(n);
            for c in children {
                results.push(tick_node(c, x, ctx, set, out)?);
            }
            let succ = results
                .iter()
                .filter(|r| r.value.as_ref().map_or(false, |v| v.is_success()))
                .count();
            let fail = results
                .iter()
                .filter(|r| r.value.as_ref().map_or(false, |v| v.is_failure()))
                .count();
            if succ >= *threshold {
                let first = results
                    .iter()
                    .find(|r| r.value.as_ref().map_or(false, |v| v.is_success()))
                    .unwrap();
                Ok(NodeResult {
                    value: Some(ValueName::success()),
                    action: first.action.clone(),
                    leaf: first.leaf,
                })
            } else if fail >= n - threshold + 1 {
                let first = results
                    .iter()
                    .find(|r| r.value.as_ref().map_or(false, |v| v.is_failure()))
                    .unwrap();
                Ok(NodeResult {
                    value: Some(ValueName::failure()),
                    action: first.action.clone(),
                    leaf: first.leaf,
                })
            } else {
                // Neither threshold met: at least one child is neither
                // Success nor Failure; report the leftmost such child.
                let first = results
                    .iter()
                    .find(|r| {
                        !r.value
                            .as_ref()
                            .map_or(false, |v| v.is_success() || v.is_failure())
                    })
                    .expect("threshold arithmetic guarantees a running child");
                Ok(NodeResult {
                    value: None,
                    action: first.action.clone(),
                    leaf: first.leaf,
                })
            }
        }
        NodeKind::Utility { children } => {
            let mut scored: Vec<(usize, i64)> = Vec::with_capacity(children.len());
            for (i, (_, s)) in children.iter().enumerate() {
                scored.push((i, s.eval(x)?));
            }
            out.scores
                .push((node.id, scored.iter().map(|(_, s)| *s).collect()));
            // Stable sort: ties keep original child order.
            scored.sort_by(|a, b| b.1.cmp(&a.1));
            let failure = ValueName::failure();
            let mut last = None;
            for (i, _) in &scored {
                let r = tick_node(&children[*i].0, x, ctx, set, out)?;
                if r.value.as_ref() != Some(&failure) {
                    return Ok(r);
                }
                last = Some(r);
            }
            Ok(last.expect("children validated non-empty"))
        }
    }
}

// ---------------------------------------------------------------------------
// Construction helpers.
// ---------------------------------------------------------------------------

fn number(n: &mut Node, next: &mut u32) {
    number_from(n, next)
}

fn number_from(n: &mut Node, next: &mut u32) {
    n.id = NodeId(*next);
    *next += 1;
    match &mut n.kind {
        NodeKind::Control { children, .. } | NodeKind::Parallel { children, .. } => {
            for c in children {
                number_from(c, next);
            }
        }
        NodeKind::Decorator { child, .. } => number_from(child, next),
        NodeKind::Utility { children } => {
            for (c, _) in children {
                number_from(c, next);
            }
        }
        _ => {}
    }
}

fn replace(n: &mut Node, target: NodeId, replacement: Node) -> bool {
    if n.id == target {
        *n = replacement;
        return true;
    }
    match &mut n.kind {
        NodeKind::Control { children, .. } | NodeKind::Parallel { children, .. } => {
            for c in children {
                if replace(c, target, replacement.clone()) {
                    return true;
                }
            }
        }
        NodeKind::Decorator { child, .. } => {
            return replace(child, target, replacement);
        }
        NodeKind::Utility { children } => {
            for (c, _) in children {
                if replace(c, target, replacement.clone()) {
                    return true;
                }
            }
        }
        _ => {}
    }
    false
}

fn validate(n: &Node, set: &ValueSet) -> Result<()> {
    let mut ids = BTreeSet::new();
    validate_rec(n, set, &mut ids)
}

fn validate_rec(n: &Node, set: &ValueSet, ids: &mut BTreeSet<u32>) -> Result<()> {
    if !ids.insert(n.id.0) {
        return Err(Error::UnknownNode(n.id.0));
    }
    match &n.kind {
        NodeKind::Control { handled, children, .. } => {
            if !set.contains(handled) {
                return Err(Error::UnknownValue(handled.name().to_string()));
            }
            if children.is_empty() {
                return Err(Error::EmptyChildren);
            }
            for c in children {
                validate_rec(c, set, ids)?;
            }
        }
        NodeKind::Condition { .. } => {
            if !set.has_success_failure() {
                return Err(Error::UnknownValue(
                    "condition leaves require Success and Failure".into(),
                ));
            }
        }
        NodeKind::Action(a) => {
            for (_, v) in &a.returns.cases {
                // Action rules may name values outside the set (they become
                // unhandled), but reserveless sanity: nothing to check here.
                let _ = v;
            }
        }
        NodeKind::Decorator { kind, child } => {
            match kind {
                DecoratorKind::Custom(map) => {
                    // Totality over the possible child results: every value
                    // in the set, plus the unhandled case.
                    for v in set.values() {
                        if map.lookup(&Some(v.clone())).is_none() {
                            return Err(Error::PolicyNotTotal(v.name().to_string()));
                        }
                    }
                    if map.lookup(&None).is_none() {
                        return Err(Error::PolicyNotTotal("<unhandled>".into()));
                    }
                }
                DecoratorKind::Negation
                | DecoratorKind::RunUntilSuccess
                | DecoratorKind::RunNTimes(_) => {
                    if !set.has_success_failure() {
                        return Err(Error::UnknownValue(
                            "classic decorators require Success and Failure".into(),
                        ));
                    }
                }
            }
            validate_rec(child, set, ids)?;
        }
        NodeKind::Parallel { threshold, children } => {
            if !set.has_success_failure() {
                return Err(Error::UnknownValue(
                    "parallel nodes require Success and Failure".into(),
                ));
            }
            if children.is_empty() {
                return Err(Error::EmptyChildren);
            }
            if *threshold < 1 || *threshold > children.len() {
                return Err(Error::BadThreshold { m: *threshold, n: children.len() });
            }
            for c in children {
                validate_rec(c, set, ids)?;
            }
        }
        NodeKind::Utility { children } => {
            if !set.has_success_failure() {
                return Err(Error::UnknownValue(
                    "utility nodes require Success and Failure".into(),
                ));
            }
            if children.is_empty() {
                return Err(Error::EmptyChildren);
            }
            for (c, _) in children {
                validate_rec(c, set, ids)?;
            }
        }
        NodeKind::Embedded { .. } => {}
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// TR embedding: the 1-valued special case.
// ---------------------------------------------------------------------------

/// Converts a teleo-reactive rule list into the equivalent 1-valued tree:
/// one `*_PrecondFalse` node whose i-th child is an action returning
/// `PrecondFalse` exactly when the i-th precondition is false.
pub fn tr_to_kbt(tr: &crate::classic::Tr) -> Result<KBTree> {
    if tr.rules.is_empty() {
        return Err(Error::EmptyProgram);
    }
    let precond_false = ValueName::new("PrecondFalse");
    let children = tr
        .rules
        .iter()
        .map(|(k, a)| {
            action(
                a.name(),
                ReturnRule::running()
                    .when(ConditionExpr::not(k.clone()), precond_false.clone()),
            )
        })
        .collect();
    let root = control(precond_false.clone(), children)?;
    KBTree::new(ValueSet::new(vec![precond_false])?, root)
}


#[cfg(test)]
mod stateful_tests {
    use super::*;
    use crate::input::InputAlphabet;

    fn leaf(name: &str, var: &str) -> Node {
        action(
            name,
            ReturnRule::running()
                .when(ConditionExpr::eq(var, 1), ValueName::success())
                .when(ConditionExpr::eq(var, 2), ValueName::failure()),
        )
    }

    fn mem_seq() -> KBTree {
        KBTree::classic(memory_sequence(vec![leaf("A", "a"), leaf("B", "b")]).unwrap()).unwrap()
    }

    #[test]
    fn memory_sequence_skips_succeeded_children_without_ticking() {
        let t = mem_seq();
        let mut ctx = TreeCtx::default();
        // step 1: A succeeds, B running -> B selected, remembered index {0}
        let o = t
            .tick(&InputState::of(&[("a", 1), ("b", 0)]), &mut ctx)
            .unwrap();
        assert_eq!(o.selection.action, ActionId::new("B"));
        // step 2: a has turned off; a plain sequence would re-select A,
        // the memory node does not even visit it
        let o = t
            .tick(&InputState::of(&[("a", 0), ("b", 0)]), &mut ctx)
            .unwrap();
        assert_eq!(o.selection.action, ActionId::new("B"));
        let visited_labels: Vec<_> = o
            .visited
            .iter()
            .map(|id| t.node(*id).unwrap().label())
            .collect();
        assert!(!visited_labels.contains(&"A".to_string()), "{visited_labels:?}");
    }

    #[test]
    fn memory_clears_on_any_handled_return() {
        let t = mem_seq();
        let mut ctx = TreeCtx::default();
        t.tick(&InputState::of(&[("a", 1), ("b", 0)]), &mut ctx).unwrap();
        // whole sequence succeeds: memory cleared
        let o = t.tick(&InputState::of(&[("a", 0), ("b", 1)]), &mut ctx).unwrap();
        assert!(matches!(&o.selection.value, TickValue::Value(v) if v.is_success()));
        assert!(ctx.mem.values().all(|s| s.is_empty()));
        // next tick starts from A again
        let o = t.tick(&InputState::of(&[("a", 0), ("b", 0)]), &mut ctx).unwrap();
        assert_eq!(o.selection.action, ActionId::new("A"));

        // failure clears too
        let mut ctx = TreeCtx::default();
        t.tick(&InputState::of(&[("a", 1), ("b", 0)]), &mut ctx).unwrap();
        let o = t.tick(&InputState::of(&[("a", 0), ("b", 2)]), &mut ctx).unwrap();
        assert!(matches!(&o.selection.value, TickValue::Value(v) if v.is_failure()));
        assert!(ctx.mem.values().all(|s| s.is_empty()));
    }

    #[test]
    fn memory_persists_while_running() {
        let t = mem_seq();
        let mut ctx = TreeCtx::default();
        t.tick(&InputState::of(&[("a", 1), ("b", 0)]), &mut ctx).unwrap();
        for _ in 0..5 {
            let o = t.tick(&InputState::of(&[("a", 0), ("b", 0)]), &mut ctx).unwrap();
            assert_eq!(o.selection.action, ActionId::new("B"));
        }
    }

    #[test]
    fn until_success_latch_is_monotone() {
        // Sequence(until_success(A), B): before A first succeeds the
        // sequence sits in A; afterwards it stays in B even if a drops.
        let t = KBTree::classic(
            sequence(vec![until_success(leaf("A", "a")), leaf("B", "b")]).unwrap(),
        )
        .unwrap();
        let mut ctx = TreeCtx::default();
        let o = t.tick(&InputState::of(&[("a", 0), ("b", 0)]), &mut ctx).unwrap();
        assert_eq!(o.selection.action, ActionId::new("A"));
        let o = t.tick(&InputState::of(&[("a", 1), ("b", 0)]), &mut ctx).unwrap();
        assert_eq!(o.selection.action, ActionId::new("B"));
        for _ in 0..3 {
            let o = t.tick(&InputState::of(&[("a", 0), ("b", 0)]), &mut ctx).unwrap();
            assert_eq!(o.selection.action, ActionId::new("B"));
        }
    }

    #[test]
    fn until_success_passes_child_value_before_latching() {
        let t = KBTree::classic(until_success(leaf("A", "a"))).unwrap();
        let mut ctx = TreeCtx::default();
        let o = t.tick(&InputState::of(&[("a", 2)]), &mut ctx).unwrap();
        assert!(matches!(&o.selection.value, TickValue::Value(v) if v.is_failure()));
        assert_eq!(o.selection.action, ActionId::new("A"));
        assert!(ctx.latch.is_empty());
    }

    #[test]
    fn times_counts_delivered_ticks_then_succeeds_forever() {
        // times(2) over an always-running child: unhandled twice, then
        // Success on every later tick without ticking the child.
        let t = KBTree::classic(times(2, action("A", ReturnRule::running()))).unwrap();
        let mut ctx = TreeCtx::default();
        let x = InputState::new();
        for _ in 0..2 {
            let o = t.tick(&x, &mut ctx).unwrap();
            assert!(o.selection.value.is_unhandled());
            assert_eq!(o.selection.action, ActionId::new("A"));
        }
        for _ in 0..4 {
            let o = t.tick(&x, &mut ctx).unwrap();
            assert!(matches!(&o.selection.value, TickValue::Value(v) if v.is_success()));
        }
    }

    #[test]
    fn custom_decorator_total_map_applies() {
        // swap Success and Failure via an explicit table, identity on running
        let map = ValueMap {
            entries: vec![
                (Some(ValueName::success()), Some(ValueName::failure())),
                (Some(ValueName::failure()), Some(ValueName::success())),
                (None, None),
            ],
        };
        let t = KBTree::classic(custom_decorator(map, leaf("A", "a"))).unwrap();
        let o = t.tick_once(&InputState::of(&[("a", 1)])).unwrap();
        assert!(matches!(&o.selection.value, TickValue::Value(v) if v.is_failure()));
    }

    #[test]
    fn custom_decorator_partial_map_rejected() {
        let map = ValueMap { entries: vec![(Some(ValueName::success()), None)] };
        assert!(KBTree::classic(custom_decorator(map, leaf("A", "a"))).is_err());
    }

    #[test]
    fn parallel_matches_counting_oracle() {
        // every N<=3, M<=N, over all per-child outcome combinations
        let alphabet = InputAlphabet::product(&[
            ("v0", vec![0, 1, 2]),
            ("v1", vec![0, 1, 2]),
            ("v2", vec![0, 1, 2]),
        ])
        .unwrap();
        for n in 1..=3usize {
            for m in 1..=n {
                let children: Vec<Node> =
                    (0..n).map(|i| leaf(&format!("c{i}"), &format!("v{i}"))).collect();
                let t = KBTree::classic(parallel(m, children).unwrap()).unwrap();
                for x in alphabet.states() {
                    let succ = (0..n).filter(|i| x.get(&format!("v{i}")) == Some(1)).count();
                    let fail = (0..n).filter(|i| x.get(&format!("v{i}")) == Some(2)).count();
                    let o = t.tick_once(x).unwrap();
                    if succ >= m {
                        assert!(
                            matches!(&o.selection.value, TickValue::Value(v) if v.is_success()),
                            "n={n} m={m} at {x}"
                        );
                    } else if fail >= n - m + 1 {
                        assert!(
                            matches!(&o.selection.value, TickValue::Value(v) if v.is_failure()),
                            "n={n} m={m} at {x}"
                        );
                    } else {
                        assert!(o.selection.value.is_unhandled(), "n={n} m={m} at {x}");
                        // leftmost running child is the selection
                        let first_running =
                            (0..n).find(|i| x.get(&format!("v{i}")) == Some(0)).unwrap();
                        assert_eq!(o.selection.action, ActionId::new(format!("c{first_running}")));
                    }
                }
            }
        }
    }

    #[test]
    fn utility_orders_children_by_score_stable() {
        let t = KBTree::classic(
            utility(vec![
                (leaf("Low", "a"), Score::constant(1)),
                (
                    leaf("Spiky", "b"),
                    Score { cases: vec![(ConditionExpr::eq("boost", 1), 5)], default: 1 },
                ),
                (leaf("High", "c"), Score::constant(3)),
            ])
            .unwrap(),
        )
        .unwrap();
        // nobody succeeds: highest score first, so High is tried, fails
        // nothing, stays selected
        let x = InputState::of(&[("a", 0), ("b", 0), ("c", 0), ("boost", 0)]);
        let o = t.tick_once(&x).unwrap();
        assert_eq!(o.selection.action, ActionId::new("High"));
        assert_eq!(o.scores.len(), 1);
        assert_eq!(o.scores[0].1, vec![1, 1, 3]);

        // boost lifts Spiky above High
        let x = InputState::of(&[("a", 0), ("b", 0), ("c", 0), ("boost", 1)]);
        let o = t.tick_once(&x).unwrap();
        assert_eq!(o.selection.action, ActionId::new("Spiky"));

        // ties keep declaration order: Low before Spiky at equal scores
        let t2 = KBTree::classic(
            utility(vec![
                (leaf("Low", "a"), Score::constant(2)),
                (leaf("Spiky", "b"), Score::constant(2)),
            ])
            .unwrap(),
        )
        .unwrap();
        let o = t2.tick_once(&InputState::of(&[("a", 0), ("b", 0)])).unwrap();
        assert_eq!(o.selection.action, ActionId::new("Low"));
    }

    #[test]
    fn embedded_asm_state_resets_when_deselected() {
        use crate::classic::{Fsm, FsmRule, StateLabel};
        use std::collections::BTreeMap;
        // Fallback(Cond(skip==1) ? Noise, Embedded FSM). The FSM flips to a
        // second state on go==1 and stays. Deselecting it (skip==1) must
        // restart it in its initial state.
        let fsm = Fsm::new(
            vec!["P".into(), "Q".into()],
            "P".into(),
            vec![FsmRule { from: "P".into(), guard: ConditionExpr::eq("go", 1), to: "Q".into() }],
            BTreeMap::from([
                ("P".to_string(), StateLabel::Action(ActionId::new("p"))),
                ("Q".to_string(), StateLabel::Action(ActionId::new("q"))),
            ]),
        )
        .unwrap();
        let t = KBTree::classic(
            fallback(vec![
                sequence(vec![
                    condition_expr(ConditionExpr::eq("skip", 1)),
                    action("Noise", ReturnRule::running()),
                ])
                .unwrap(),
                embed_asm_as_action(
                    crate::asm::Arch::Fsm(fsm),
                    ReturnRule::running(),
                    ActionId::new("machine"),
                ),
            ])
            .unwrap(),
        )
        .unwrap();
        let mut ctx = TreeCtx::default();
        let step = |ctx: &mut TreeCtx, skip: i64, go: i64| {
            t.tick(&InputState::of(&[("skip", skip), ("go", go)]), ctx)
                .unwrap()
                .selection
                .action
        };
        assert_eq!(step(&mut ctx, 0, 0), ActionId::new("p"));
        assert_eq!(step(&mut ctx, 0, 1), ActionId::new("q"));
        assert_eq!(step(&mut ctx, 0, 0), ActionId::new("q")); // state held
        assert_eq!(step(&mut ctx, 1, 0), ActionId::new("Noise")); // deselected
        assert_eq!(step(&mut ctx, 0, 0), ActionId::new("p")); // restarted
    }
}
