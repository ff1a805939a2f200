//! Condition expressions: variable comparisons against integer literals,
//! combined with boolean connectives. Total on any input binding their
//! variables.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::input::InputState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn apply(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConditionExpr {
    True,
    False,
    Cmp { var: String, op: CmpOp, lit: i64 },
    Not(Box<ConditionExpr>),
    And(Vec<ConditionExpr>),
    Or(Vec<ConditionExpr>),
}

impl ConditionExpr {
    pub fn cmp(var: impl Into<String>, op: CmpOp, lit: i64) -> Self {
        ConditionExpr::Cmp { var: var.into(), op, lit }
    }

    pub fn eq(var: impl Into<String>, lit: i64) -> Self {
        Self::cmp(var, CmpOp::Eq, lit)
    }

    pub fn ne(var: impl Into<String>, lit: i64) -> Self {
        Self::cmp(var, CmpOp::Ne, lit)
    }

    pub fn lt(var: impl Into<String>, lit: i64) -> Self {
        Self::cmp(var, CmpOp::Lt, lit)
    }

    pub fn ge(var: impl Into<String>, lit: i64) -> Self {
        Self::cmp(var, CmpOp::Ge, lit)
    }

    pub fn not(e: ConditionExpr) -> Self {
        ConditionExpr::Not(Box::new(e))
    }

    pub fn and(es: Vec<ConditionExpr>) -> Self {
        ConditionExpr::And(es)
    }

    pub fn or(es: Vec<ConditionExpr>) -> Self {
        ConditionExpr::Or(es)
    }

    /// Standard boolean evaluation; errors name the first unbound variable.
    pub fn eval(&self, x: &InputState) -> Result<bool> {
        match self {
            ConditionExpr::True => Ok(true),
            ConditionExpr::False => Ok(false),
            ConditionExpr::Cmp { var, op, lit } => {
                let v = x
                    .get(var)
                    .ok_or_else(|| Error::UnboundVariable(var.clone()))?;
                Ok(op.apply(v, *lit))
            }
            ConditionExpr::Not(e) => Ok(!e.eval(x)?),
            ConditionExpr::And(es) => {
                for e in es {
                    if !e.eval(x)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            ConditionExpr::Or(es) => {
                for e in es {
                    if e.eval(x)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            ConditionExpr::True | ConditionExpr::False => {}
            ConditionExpr::Cmp { var, .. } => {
                out.insert(var.clone());
            }
            ConditionExpr::Not(e) => e.collect_vars(out),
            ConditionExpr::And(es) | ConditionExpr::Or(es) => {
                for e in es {
                    e.collect_vars(out);
                }
            }
        }
    }
}

impl fmt::Display for ConditionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionExpr::True => write!(f, "true"),
            ConditionExpr::False => write!(f, "false"),
            ConditionExpr::Cmp { var, op, lit } => write!(f, "{var} {} {lit}", op.symbol()),
            ConditionExpr::Not(e) => write!(f, "not ({e})"),
            ConditionExpr::And(es) => {
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        write!(f, " and ")?;
                    }
                    write!(f, "({e})")?;
                }
                Ok(())
            }
            ConditionExpr::Or(es) => {
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        write!(f, " or ")?;
                    }
                    write!(f, "({e})")?;
                }
                Ok(())
            }
        }
    }
}
