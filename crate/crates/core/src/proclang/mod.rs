//! The process language: syntax, parsing, printing and expression evaluation.

mod ast;
mod eval;
mod parser;
mod print;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

pub use ast::{BoolExpr, Channel, Name, ProcDef, Process, Program, StrExpr};
pub use eval::{
    bool_time_cost, env_size, eval_bool, eval_str, str_time_cost, Environment, EvalError,
};
pub use parser::{parse_process, parse_program};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticError {
    #[error("free variable `{var}` in {scope}")]
    FreeVariable { var: String, scope: String },
    #[error("undeclared channel `{0}`")]
    UndeclaredChannel(String),
    #[error("channel `{channel}` is declared as {declared} but used for {used}")]
    DirectionMisuse {
        channel: String,
        declared: &'static str,
        used: &'static str,
    },
    #[error("channel `{0}` is declared both as input and as output")]
    ChannelBothWays(String),
    #[error("unknown process identifier `{0}`")]
    UnknownProcess(String),
    #[error("`{name}` takes {expected} argument(s), called with {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("`{0}` is defined twice")]
    DuplicateDefinition(String),
    #[error("parameter `{param}` repeated in definition of `{def}`")]
    DuplicateParameter { def: String, param: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {col}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    #[error("semantic error: {0}")]
    Semantic(#[from] SemanticError),
}

impl Program {
    /// Validates and normalizes a program: bound variables are renamed apart,
    /// then closedness, channel declarations and call arities are checked.
    pub fn new<S: Into<String>>(
        inputs: impl IntoIterator<Item = S>,
        outputs: impl IntoIterator<Item = S>,
        defs: Vec<ProcDef>,
        main: Process,
    ) -> Result<Program, SemanticError> {
        Self::from_parts(
            inputs.into_iter().map(Into::into).collect(),
            outputs.into_iter().map(Into::into).collect(),
            defs,
            main,
        )
    }

    pub(crate) fn from_parts(
        inputs: Vec<String>,
        outputs: Vec<String>,
        defs: Vec<ProcDef>,
        main: Process,
    ) -> Result<Program, SemanticError> {
        let inputs: BTreeSet<Name> = inputs.into_iter().collect();
        let outputs: BTreeSet<Name> = outputs.into_iter().collect();
        if let Some(c) = inputs.intersection(&outputs).next() {
            return Err(SemanticError::ChannelBothWays(c.clone()));
        }
        let mut table = BTreeMap::new();
        for d in defs {
            let mut seen = BTreeSet::new();
            for p in &d.params {
                if !seen.insert(p) {
                    return Err(SemanticError::DuplicateParameter {
                        def: d.name.clone(),
                        param: p.clone(),
                    });
                }
            }
            if table.contains_key(&d.name) {
                return Err(SemanticError::DuplicateDefinition(d.name));
            }
            let body = rename_apart(&d.body, &d.params);
            table.insert(
                d.name.clone(),
                ProcDef {
                    name: d.name,
                    params: d.params,
                    body: Arc::new(body),
                },
            );
        }
        let main = rename_apart(&main, &[]);
        let prog = Program {
            inputs,
            outputs,
            defs: table,
            main: Arc::new(main),
        };
        prog.validate()?;
        Ok(prog)
    }

    fn validate(&self) -> Result<(), SemanticError> {
        for d in self.defs.values() {
            let params: BTreeSet<&String> = d.params.iter().collect();
            if let Some(v) = d.body.free_vars().into_iter().find(|v| !params.contains(v)) {
                return Err(SemanticError::FreeVariable {
                    var: v,
                    scope: format!("definition of `{}`", d.name),
                });
            }
        }
        if let Some(v) = self.main.free_vars().into_iter().next() {
            return Err(SemanticError::FreeVariable {
                var: v,
                scope: "main".into(),
            });
        }
        for d in self.defs.values() {
            self.check_term(&d.body)?;
        }
        self.check_term(&self.main)
    }

    fn check_term(&self, p: &Process) -> Result<(), SemanticError> {
        match p {
            Process::Nil => Ok(()),
            Process::Call(name, args) => {
                let def = self
                    .defs
                    .get(name)
                    .ok_or_else(|| SemanticError::UnknownProcess(name.clone()))?;
                if def.arity() != args.len() {
                    return Err(SemanticError::ArityMismatch {
                        name: name.clone(),
                        expected: def.arity(),
                        found: args.len(),
                    });
                }
                Ok(())
            }
            Process::Send(ch, _, k) | Process::Recv(ch, _, k) => {
                let sending = matches!(p, Process::Send(..));
                self.check_channel(ch, sending)?;
                self.check_term(k)
            }
            Process::Cond(_, a, b) | Process::Par(a, b) => {
                self.check_term(a)?;
                self.check_term(b)
            }
        }
    }

    fn check_channel(&self, ch: &Channel, sending: bool) -> Result<(), SemanticError> {
        let name = match ch {
            Channel::Internal(_) => return Ok(()),
            Channel::ExternalIn(n) | Channel::ExternalOut(n) => n,
        };
        let wrong_way = match ch {
            Channel::ExternalIn(_) if sending => true,
            Channel::ExternalOut(_) if !sending => true,
            _ => false,
        };
        let (ok_set, other_set) = if sending {
            (&self.outputs, &self.inputs)
        } else {
            (&self.inputs, &self.outputs)
        };
        if !wrong_way && ok_set.contains(name) {
            return Ok(());
        }
        if wrong_way || other_set.contains(name) {
            let (declared, used) = if sending {
                ("input", "output")
            } else {
                ("output", "input")
            };
            return Err(SemanticError::DirectionMisuse {
                channel: name.clone(),
                declared,
                used,
            });
        }
        Err(SemanticError::UndeclaredChannel(name.clone()))
    }
}

/// Renames input binders so that they are pairwise distinct and distinct from
/// `params`. Already-distinct terms come back unchanged.
fn rename_apart(p: &Process, params: &[String]) -> Process {
    let mut all = BTreeSet::new();
    collect_names(p, &mut all);
    all.extend(params.iter().cloned());
    let mut used: BTreeSet<String> = params.iter().cloned().collect();
    rename_rec(p, &mut used, &mut all)
}

fn collect_names(p: &Process, out: &mut BTreeSet<String>) {
    out.extend(p.free_vars());
    out.extend(p.binders().into_iter().map(str::to_string));
}

fn fresh(base: &str, taken: &BTreeSet<String>) -> String {
    (1..)
        .map(|k| format!("{base}_{k}"))
        .find(|c| !taken.contains(c))
        .expect("unbounded supply of names")
}

fn rename_rec(p: &Process, used: &mut BTreeSet<String>, all: &mut BTreeSet<String>) -> Process {
    match p {
        Process::Nil | Process::Call(..) => p.clone(),
        Process::Send(ch, e, k) => Process::send(ch.clone(), e.clone(), rename_rec(k, used, all)),
        Process::Recv(ch, x, k) => {
            if used.insert(x.clone()) {
                Process::recv(ch.clone(), x, rename_rec(k, used, all))
            } else {
                let y = fresh(x, all);
                all.insert(y.clone());
                used.insert(y.clone());
                let k = subst_process(k, x, &y);
                Process::recv(ch.clone(), &y, rename_rec(&k, used, all))
            }
        }
        Process::Cond(b, a, c) => {
            let a = rename_rec(a, used, all);
            Process::cond(b.clone(), a, rename_rec(c, used, all))
        }
        Process::Par(a, c) => {
            let a = rename_rec(a, used, all);
            Process::par(a, rename_rec(c, used, all))
        }
    }
}

fn subst_expr(e: &StrExpr, from: &str, to: &str) -> StrExpr {
    match e {
        StrExpr::Var(x) if x == from => StrExpr::var(to),
        StrExpr::Var(_) | StrExpr::Lit(_) => e.clone(),
        StrExpr::Prepend0(i) => StrExpr::p0(subst_expr(i, from, to)),
        StrExpr::Prepend1(i) => StrExpr::p1(subst_expr(i, from, to)),
        StrExpr::Tail(i) => StrExpr::tl(subst_expr(i, from, to)),
    }
}

fn subst_bool(b: &BoolExpr, from: &str, to: &str) -> BoolExpr {
    match b {
        BoolExpr::True | BoolExpr::False => b.clone(),
        BoolExpr::IsZero(e) => BoolExpr::IsZero(subst_expr(e, from, to)),
        BoolExpr::IsEmpty(e) => BoolExpr::IsEmpty(subst_expr(e, from, to)),
    }
}

fn subst_channel(ch: &Channel, from: &str, to: &str) -> Channel {
    match ch {
        Channel::Internal(k) => Channel::Internal(subst_expr(k, from, to)),
        _ => ch.clone(),
    }
}

/// Replaces free occurrences of `from` by `to`.
fn subst_process(p: &Process, from: &str, to: &str) -> Process {
    match p {
        Process::Nil => Process::Nil,
        Process::Call(n, args) => {
            Process::Call(n.clone(), args.iter().map(|a| subst_expr(a, from, to)).collect())
        }
        Process::Send(ch, e, k) => Process::send(
            subst_channel(ch, from, to),
            subst_expr(e, from, to),
            subst_process(k, from, to),
        ),
        Process::Recv(ch, x, k) => {
            let k = if x == from {
                (**k).clone()
            } else {
                subst_process(k, from, to)
            };
            Process::recv(subst_channel(ch, from, to), x, k)
        }
        Process::Cond(b, a, c) => Process::cond(
            subst_bool(b, from, to),
            subst_process(a, from, to),
            subst_process(c, from, to),
        ),
        Process::Par(a, c) => Process::par(subst_process(a, from, to), subst_process(c, from, to)),
    }
}
