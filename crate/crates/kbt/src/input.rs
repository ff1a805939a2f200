//! Common vocabulary shared by every architecture: actions, return values,
//! input states and input alphabets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// Name of an action the robot can execute.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(String);

impl ActionId {
    /// Creates an action id. Panics on an empty name; ids always come from
    /// validated construction paths (builders or the model loader).
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "action id must be non-empty");
        ActionId(name)
    }

    /// The designated do-nothing command issued when a condition leaf ends up
    /// as the final selection.
    pub fn noop() -> Self {
        ActionId::new("NoOp")
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Name of a return value. `Success` and `Failure` are conventional; there is
/// no reserved `Running` name, a "running" result is the absence of a value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueName(String);

impl ValueName {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "value name must be non-empty");
        ValueName(name)
    }

    pub fn success() -> Self {
        ValueName::new("Success")
    }

    pub fn failure() -> Self {
        ValueName::new("Failure")
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_success(&self) -> bool {
        self.0 == "Success"
    }

    pub fn is_failure(&self) -> bool {
        self.0 == "Failure"
    }

    /// Success <-> Failure, other names unchanged.
    pub fn swapped(&self) -> Self {
        if self.is_success() {
            ValueName::failure()
        } else if self.is_failure() {
            ValueName::success()
        } else {
            self.clone()
        }
    }
}

impl fmt::Display for ValueName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The ordered set of return values a tree handles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueSet {
    values: Vec<ValueName>,
}

impl ValueSet {
    pub fn new(values: Vec<ValueName>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::UnknownValue("<empty value set>".into()));
        }
        let mut seen = BTreeSet::new();
        for v in &values {
            if !seen.insert(v.clone()) {
                return Err(Error::UnknownValue(format!("duplicate value `{v}`")));
            }
        }
        Ok(ValueSet { values })
    }

    /// The classical two-valued set {Success, Failure}.
    pub fn classic() -> Self {
        ValueSet::new(vec![ValueName::success(), ValueName::failure()]).unwrap()
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn contains(&self, v: &ValueName) -> bool {
        self.values.contains(v)
    }

    pub fn values(&self) -> &[ValueName] {
        &self.values
    }

    pub fn has_success_failure(&self) -> bool {
        self.contains(&ValueName::success()) && self.contains(&ValueName::failure())
    }
}

/// A snapshot of named environment variables; the sole decision basis for
/// reactive architectures. Booleans are encoded 0/1. Variables flagged hidden
/// model implicit memory and are excluded from input alphabets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct InputState {
    bindings: BTreeMap<String, i64>,
    hidden: BTreeSet<String>,
}

impl InputState {
    pub fn new() -> Self {
        InputState::default()
    }

    /// Builds a visible-only state from pairs.
    pub fn of(pairs: &[(&str, i64)]) -> Self {
        let mut s = InputState::new();
        for (k, v) in pairs {
            s.bind(*k, *v);
        }
        s
    }

    pub fn bind(&mut self, name: impl Into<String>, value: i64) -> &mut Self {
        self.bindings.insert(name.into(), value);
        self
    }

    pub fn bind_hidden(&mut self, name: impl Into<String>, value: i64) -> &mut Self {
        let name = name.into();
        self.hidden.insert(name.clone());
        self.bindings.insert(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<i64> {
        self.bindings.get(name).copied()
    }

    pub fn is_hidden(&self, name: &str) -> bool {
        self.hidden.contains(name)
    }

    pub fn bindings(&self) -> impl Iterator<Item = (&str, i64)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Visible bindings only, in deterministic order. Two histories "end in
    /// the same input" when their final visible projections are equal.
    pub fn visible_key(&self) -> Vec<(String, i64)> {
        self.bindings
            .iter()
            .filter(|(k, _)| !self.hidden.contains(*k))
            .map(|(k, v)| (k.clone(), *v))
            .collect()
    }

    /// A copy with extra hidden bindings merged in (overriding same names).
    pub fn with_hidden(&self, extra: &BTreeMap<String, i64>) -> InputState {
        let mut out = self.clone();
        for (k, v) in extra {
            out.bind_hidden(k.clone(), *v);
        }
        out
    }
}

impl fmt::Display for InputState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let mark = if self.hidden.contains(k) { "~" } else { "" };
            write!(f, "{mark}{k}={v}")?;
        }
        write!(f, "}}")
    }
}

/// A finite input alphabet: the distinct visible input states a checker
/// enumerates over.
#[derive(Debug, Clone)]
pub struct InputAlphabet {
    states: Vec<InputState>,
}

impl InputAlphabet {
    pub fn new(states: Vec<InputState>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyHistory);
        }
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s.visible_key()) {
                return Err(Error::UnknownName(format!("duplicate alphabet state {s}")));
            }
        }
        Ok(InputAlphabet { states })
    }

    /// Cartesian product over per-variable value lists.
    pub fn product(vars: &[(&str, Vec<i64>)]) -> Result<Self> {
        let mut states = vec![InputState::new()];
        for (name, vals) in vars {
            let mut next = Vec::with_capacity(states.len() * vals.len());
            for s in &states {
                for v in vals {
                    let mut s2 = s.clone();
                    s2.bind(*name, *v);
                    next.push(s2);
                }
            }
            states = next;
        }
        InputAlphabet::new(states)
    }

    /// All 0/1 assignments to the given boolean variables.
    pub fn booleans(vars: &[&str]) -> Result<Self> {
        let spec: Vec<(&str, Vec<i64>)> = vars.iter().map(|v| (*v, vec![0, 1])).collect();
        InputAlphabet::product(&spec)
    }

    pub fn states(&self) -> &[InputState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// A finite sequence of input states fed to an architecture in order.
pub type History = Vec<InputState>;
