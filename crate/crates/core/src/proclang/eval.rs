use std::collections::BTreeMap;

use thiserror::Error;

use super::ast::{BoolExpr, StrExpr};
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("tail of the empty word")]
    TailOfEmpty,
}

/// Finite partial map from variables to words.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Environment(BTreeMap<String, Word>);

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&Word> {
        self.0.get(name)
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Word) {
        self.0.insert(name.into(), value);
    }

    pub fn with(mut self, name: &str, value: impl Into<Word>) -> Self {
        self.insert(name, value.into());
        self
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Word)> {
        self.0.iter()
    }

    /// `Σ (|M(x)| + 1)` over the domain.
    pub fn size(&self) -> u64 {
        self.0.values().map(|w| w.len() as u64 + 1).sum()
    }
}

impl FromIterator<(String, Word)> for Environment {
    fn from_iter<I: IntoIterator<Item = (String, Word)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

pub fn env_size(m: &Environment) -> u64 {
    m.size()
}

pub fn eval_str(e: &StrExpr, m: &Environment) -> Result<Word, EvalError> {
    match e {
        StrExpr::Var(x) => m
            .get(x)
            .cloned()
            .ok_or_else(|| EvalError::UnboundVariable(x.clone())),
        StrExpr::Lit(w) => Ok(w.clone()),
        StrExpr::Prepend0(inner) => Ok(eval_str(inner, m)?.with_prefix_bit(false)),
        StrExpr::Prepend1(inner) => Ok(eval_str(inner, m)?.with_prefix_bit(true)),
        StrExpr::Tail(inner) => eval_str(inner, m)?.tail().ok_or(EvalError::TailOfEmpty),
    }
}

pub fn eval_bool(b: &BoolExpr, m: &Environment) -> Result<bool, EvalError> {
    match b {
        BoolExpr::True => Ok(true),
        BoolExpr::False => Ok(false),
        BoolExpr::IsZero(e) => Ok(eval_str(e, m)?.starts_with_zero()),
        BoolExpr::IsEmpty(e) => Ok(eval_str(e, m)?.is_empty()),
    }
}

impl StrExpr {
    /// Structural cost: 1 per variable or operator, `|w| + 1` per literal.
    pub fn cost(&self) -> u64 {
        match self {
            StrExpr::Var(_) => 1,
            StrExpr::Lit(w) => w.len() as u64 + 1,
            StrExpr::Prepend0(e) | StrExpr::Prepend1(e) | StrExpr::Tail(e) => 1 + e.cost(),
        }
    }
}

impl BoolExpr {
    pub fn cost(&self) -> u64 {
        match self {
            BoolExpr::True | BoolExpr::False => 1,
            BoolExpr::IsZero(e) | BoolExpr::IsEmpty(e) => 1 + e.cost(),
        }
    }
}

/// Time to compute `val_M(e)`. Fails exactly when evaluation fails.
pub fn str_time_cost(e: &StrExpr, m: &Environment) -> Result<u64, EvalError> {
    eval_str(e, m)?;
    Ok(e.cost())
}

pub fn bool_time_cost(b: &BoolExpr, m: &Environment) -> Result<u64, EvalError> {
    eval_bool(b, m)?;
    Ok(b.cost())
}
