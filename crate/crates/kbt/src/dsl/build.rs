//! Resolution of a parsed model into executable objects. Declarations
//! resolve strictly top-down: anything referenced must already have been
//! declared, which also rules out reference cycles.

use std::collections::BTreeMap;

use crate::asm::{Arch, BbRule, Blackboard};
use crate::classic::{Fsm, FsmRule, StateLabel, Tr};
use crate::cond::ConditionExpr;
use crate::error::{Error, Result};
use crate::input::{ActionId, InputAlphabet, ValueName, ValueSet};
use crate::tree::{
    self, memory_control, parallel, times, until_success, KBTree, Node, ReturnRule,
};
use crate::worlds::{BatteryWorld, ControllerStack, DoorWorld, GridWorld, Heading, World};

use super::ast::*;

/// A fully resolved model: every declared architecture, stack, alphabet and
/// world, ready to run.
pub struct Model {
    pub values: ValueSet,
    pub vars: BTreeMap<String, (bool, VarDomain)>,
    pub archs: BTreeMap<String, Arch>,
    pub stacks: BTreeMap<String, ControllerStack>,
    pub alphabets: BTreeMap<String, InputAlphabet>,
    worlds: BTreeMap<String, WorldDecl>,
    actions: BTreeMap<String, ReturnRule>,
    conds: BTreeMap<String, ConditionExpr>,
    trees: BTreeMap<String, Node>,
}

impl Model {
    pub fn arch(&self, name: &str) -> Result<&Arch> {
        self.archs
            .get(name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn alphabet(&self, name: &str) -> Result<&InputAlphabet> {
        self.alphabets
            .get(name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    /// A named stack, or a declared architecture wrapped as one layer.
    pub fn stack(&self, name: &str) -> Result<ControllerStack> {
        if let Some(s) = self.stacks.get(name) {
            return Ok(s.clone());
        }
        Ok(ControllerStack::single(name, self.arch(name)?.clone()))
    }

    /// Instantiates a fresh copy of a declared world.
    pub fn make_world(&self, name: &str) -> Result<Box<dyn World>> {
        let spec = self
            .worlds
            .get(name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))?;
        Ok(match spec {
            WorldDecl::Battery { initial, drain, charge, track_recharging } => {
                let mut w = BatteryWorld::new(*initial).with_rates(*drain, *charge);
                if *track_recharging {
                    w = w.tracking_recharging();
                }
                Box::new(w)
            }
            WorldDecl::Grid { width, height, walls, markers, agent } => {
                let mut w = GridWorld::new(*width, *height);
                for (x, y) in walls {
                    w.add_wall(*x, *y);
                }
                for (x, y) in markers {
                    w.markers.insert((*x, *y));
                }
                let heading = match agent.2 {
                    'N' => Heading::North,
                    'S' => Heading::South,
                    'W' => Heading::West,
                    _ => Heading::East,
                };
                w.place_agent(agent.0, agent.1, heading);
                Box::new(w)
            }
            WorldDecl::Door { locked, key } => Box::new(DoorWorld::new(*locked, *key)),
        })
    }

    fn check_vars(&self, expr: &ConditionExpr) -> Result<()> {
        let mut used = std::collections::BTreeSet::new();
        expr.collect_vars(&mut used);
        for v in used {
            if !self.vars.contains_key(&v) {
                return Err(Error::UnboundVariable(v));
            }
        }
        Ok(())
    }

    fn value(&self, name: &str) -> Result<ValueName> {
        let v = ValueName::new(name);
        if self.values.contains(&v) {
            Ok(v)
        } else {
            Err(Error::UnknownValue(name.to_string()))
        }
    }

    fn build_tree_node(&self, e: &TreeExpr) -> Result<Node> {
        match e {
            TreeExpr::Ref(name) => {
                if let Some(r) = self.actions.get(name) {
                    Ok(tree::action(name, r.clone()))
                } else if let Some(c) = self.conds.get(name) {
                    Ok(tree::condition(name, c.clone()))
                } else if let Some(n) = self.trees.get(name) {
                    Ok(n.clone())
                } else {
                    Err(Error::UnknownName(name.clone()))
                }
            }
            TreeExpr::Control { value, memory, children } => {
                let v = self.value(value)?;
                let cs = children
                    .iter()
                    .map(|c| self.build_tree_node(c))
                    .collect::<Result<Vec<_>>>()?;
                if *memory {
                    memory_control(v, cs)
                } else {
                    tree::control(v, cs)
                }
            }
            TreeExpr::Neg(c) => Ok(tree::negation(self.build_tree_node(c)?)),
            TreeExpr::Par(m, children) => {
                let cs = children
                    .iter()
                    .map(|c| self.build_tree_node(c))
                    .collect::<Result<Vec<_>>>()?;
                parallel(*m as usize, cs)
            }
            TreeExpr::UntilSuccess(c) => Ok(until_success(self.build_tree_node(c)?)),
            TreeExpr::Times(n, c) => Ok(times(*n, self.build_tree_node(c)?)),
        }
    }

    fn build_dt(&self, e: &DtExpr) -> Result<crate::classic::Dt> {
        match e {
            DtExpr::Leaf(a) => {
                if !self.actions.contains_key(a) {
                    return Err(Error::UnknownName(a.clone()));
                }
                Ok(crate::classic::Dt::leaf(a))
            }
            DtExpr::If(c, yes, no) => {
                self.check_vars(c)?;
                Ok(crate::classic::Dt::branch(
                    c.clone(),
                    self.build_dt(yes)?,
                    self.build_dt(no)?,
                ))
            }
        }
    }

    fn resolve_ref(&self, r: &LabelRef) -> Result<Arch> {
        match r {
            LabelRef::Action(_) => unreachable!("callers handle action labels"),
            LabelRef::Arch(kind, name) => {
                let arch = self.arch(name)?;
                let matches = matches!(
                    (kind, arch),
                    (ArchKind::Tree, Arch::Tree(_))
                        | (ArchKind::Fsm, Arch::Fsm(_))
                        | (ArchKind::Dt, Arch::Dt(_))
                        | (ArchKind::Tr, Arch::Tr(_))
                        | (ArchKind::Blackboard, Arch::Blackboard(_))
                );
                if !matches {
                    return Err(Error::UnknownName(format!("{} {name}", kind.keyword())));
                }
                Ok(arch.clone())
            }
        }
    }
}

/// Resolves a parsed model file.
pub fn build_model(file: &ModelFile) -> Result<Model> {
    let mut m = Model {
        values: ValueSet::classic(),
        vars: BTreeMap::new(),
        archs: BTreeMap::new(),
        stacks: BTreeMap::new(),
        alphabets: BTreeMap::new(),
        worlds: BTreeMap::new(),
        actions: BTreeMap::new(),
        conds: BTreeMap::new(),
        trees: BTreeMap::new(),
    };
    for d in &file.decls {
        if let Decl::Values(vs) = d {
            m.values = ValueSet::new(vs.iter().map(ValueName::new).collect())?;
        }
    }
    for d in &file.decls {
        match d {
            Decl::Values(_) => {}
            Decl::Var { name, hidden, domain } => {
                m.vars.insert(name.clone(), (*hidden, *domain));
            }
            Decl::Action { name, returns } => {
                let mut rule = ReturnRule::running();
                for r in returns {
                    let v = m.value(&r.value)?;
                    match &r.when {
                        Some(c) => {
                            m.check_vars(c)?;
                            rule = rule.when(c.clone(), v);
                        }
                        None => rule = rule.when(ConditionExpr::True, v),
                    }
                }
                m.actions.insert(name.clone(), rule);
            }
            Decl::Cond { name, expr } => {
                m.check_vars(expr)?;
                m.conds.insert(name.clone(), expr.clone());
            }
            Decl::Tree { name, expr } => {
                let root = m.build_tree_node(expr)?;
                // Validate the whole tree now so errors name the declaration.
                let t = KBTree::new(m.values.clone(), root.clone())?;
                m.trees.insert(name.clone(), root);
                m.archs.insert(name.clone(), Arch::Tree(t));
            }
            Decl::Dt { name, expr } => {
                let d = m.build_dt(expr)?;
                m.archs.insert(name.clone(), Arch::Dt(d));
            }
            Decl::Tr { name, rules } => {
                let rs = rules
                    .iter()
                    .map(|(c, a)| {
                        m.check_vars(c)?;
                        if !m.actions.contains_key(a) {
                            return Err(Error::UnknownName(a.clone()));
                        }
                        Ok((c.clone(), ActionId::new(a)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                m.archs.insert(name.clone(), Arch::Tr(Tr::new(rs)?));
            }
            Decl::Fsm(f) => {
                let states: Vec<String> = {
                    let mut ss = vec![f.init.clone()];
                    for (from, _, to) in &f.transitions {
                        for s in [from, to] {
                            if !ss.contains(s) {
                                ss.push(s.clone());
                            }
                        }
                    }
                    for (s, _) in &f.labels {
                        if !ss.contains(s) {
                            ss.push(s.clone());
                        }
                    }
                    ss
                };
                let rules = f
                    .transitions
                    .iter()
                    .map(|(from, guard, to)| {
                        m.check_vars(guard)?;
                        Ok(FsmRule {
                            from: from.clone(),
                            guard: guard.clone(),
                            to: to.clone(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let labels = f
                    .labels
                    .iter()
                    .map(|(s, l)| {
                        let label = match l {
                            LabelRef::Action(a) => {
                                if !m.actions.contains_key(a) {
                                    return Err(Error::UnknownName(a.clone()));
                                }
                                StateLabel::Action(ActionId::new(a))
                            }
                            arch => StateLabel::Arch(Box::new(m.resolve_ref(arch)?)),
                        };
                        Ok((s.clone(), label))
                    })
                    .collect::<Result<BTreeMap<_, _>>>()?;
                let fsm = Fsm::new(states, f.init.clone(), rules, labels)?;
                m.archs.insert(f.name.clone(), Arch::Fsm(fsm));
            }
            Decl::Blackboard(b) => {
                let inner = m.resolve_ref(&b.inner)?;
                let mut init = BTreeMap::new();
                let mut rules = Vec::new();
                for s in &b.stmts {
                    match s {
                        BbStmt::Init(v, n) => {
                            init.insert(v.clone(), *n);
                        }
                        BbStmt::Set(v, n, c) => {
                            m.check_vars(c)?;
                            rules.push(BbRule { var: v.clone(), value: *n, when: c.clone() });
                        }
                    }
                }
                for r in &rules {
                    if !init.contains_key(&r.var) {
                        return Err(Error::UnboundVariable(r.var.clone()));
                    }
                }
                m.archs.insert(
                    b.name.clone(),
                    Arch::Blackboard(Blackboard { inner: Box::new(inner), init, rules }),
                );
            }
            Decl::Stack { name, layers } => {
                let ls = layers
                    .iter()
                    .map(|(l, r)| {
                        let arch = match r {
                            LabelRef::Action(a) => {
                                // A constant layer: always that action.
                                if !m.actions.contains_key(a) {
                                    return Err(Error::UnknownName(a.clone()));
                                }
                                Arch::Tr(Tr::new(vec![(
                                    ConditionExpr::True,
                                    ActionId::new(a),
                                )])?)
                            }
                            arch => m.resolve_ref(arch)?,
                        };
                        Ok((l.clone(), arch))
                    })
                    .collect::<Result<Vec<_>>>()?;
                m.stacks.insert(name.clone(), ControllerStack::new(ls));
            }
            Decl::Alphabet { name, vars } => {
                let spec = vars
                    .iter()
                    .map(|(v, dom)| {
                        match m.vars.get(v) {
                            None => return Err(Error::UnboundVariable(v.clone())),
                            Some((true, _)) => {
                                // Hidden variables model implicit memory and
                                // must not appear in checker alphabets.
                                return Err(Error::UnboundVariable(v.clone()));
                            }
                            Some((false, _)) => {}
                        }
                        let vals = match dom {
                            AlphabetVar::Bool => vec![0, 1],
                            AlphabetVar::List(vs) => vs.clone(),
                        };
                        Ok((v.as_str(), vals))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let a = InputAlphabet::product(&spec)?;
                // An alphabet that covers an FSM's guard variables doubles as
                // a load-time disjointness check for that machine.
                for arch in m.archs.values() {
                    if let Arch::Fsm(f) = arch {
                        if f.guard_vars().iter().all(|v| {
                            spec.iter().any(|(name, _)| name == v)
                        }) {
                            f.check_disjoint_guards(&a)?;
                        }
                    }
                }
                m.alphabets.insert(name.clone(), a);
            }
            Decl::World { name, spec } => {
                m.worlds.insert(name.clone(), spec.clone());
            }
        }
    }
    Ok(m)
}
