use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::word::Word;

pub type Name = String;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrExpr {
    Var(Name),
    Lit(Word),
    Prepend0(Box<StrExpr>),
    Prepend1(Box<StrExpr>),
    Tail(Box<StrExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoolExpr {
    True,
    False,
    IsZero(StrExpr),
    IsEmpty(StrExpr),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    ExternalIn(Name),
    ExternalOut(Name),
    /// A machine queue, keyed by the value of the expression.
    Internal(StrExpr),
}

/// Process terms. Continuations are shared so that unfolding a definition or
/// advancing a prefix never copies the remaining term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Process {
    Nil,
    Call(Name, Vec<StrExpr>),
    Send(Channel, StrExpr, Arc<Process>),
    Recv(Channel, Name, Arc<Process>),
    Cond(BoolExpr, Arc<Process>, Arc<Process>),
    Par(Arc<Process>, Arc<Process>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProcDef {
    pub name: Name,
    pub params: Vec<Name>,
    pub body: Arc<Process>,
}

impl ProcDef {
    pub fn new(name: impl Into<Name>, params: &[&str], body: Process) -> Self {
        Self {
            name: name.into(),
            params: params.iter().map(|p| p.to_string()).collect(),
            body: Arc::new(body),
        }
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

/// A validated program. Construct through [`Program::new`] or the parser so
/// that the well-formedness invariants always hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub(crate) inputs: BTreeSet<Name>,
    pub(crate) outputs: BTreeSet<Name>,
    pub(crate) defs: BTreeMap<Name, ProcDef>,
    pub(crate) main: Arc<Process>,
}

impl Program {
    pub fn inputs(&self) -> &BTreeSet<Name> {
        &self.inputs
    }

    pub fn outputs(&self) -> &BTreeSet<Name> {
        &self.outputs
    }

    pub fn defs(&self) -> &BTreeMap<Name, ProcDef> {
        &self.defs
    }

    pub fn def(&self, name: &str) -> Option<&ProcDef> {
        self.defs.get(name)
    }

    pub fn main(&self) -> &Arc<Process> {
        &self.main
    }

    /// True if some reachable term (main or any definition) contains `Par`.
    pub fn uses_par(&self) -> bool {
        self.main.contains_par() || self.defs.values().any(|d| d.body.contains_par())
    }
}

impl StrExpr {
    pub fn var(name: &str) -> Self {
        StrExpr::Var(name.to_string())
    }

    pub fn lit(w: impl Into<Word>) -> Self {
        StrExpr::Lit(w.into())
    }

    pub fn eps() -> Self {
        StrExpr::Lit(Word::empty())
    }

    pub fn p0(e: StrExpr) -> Self {
        StrExpr::Prepend0(Box::new(e))
    }

    pub fn p1(e: StrExpr) -> Self {
        StrExpr::Prepend1(Box::new(e))
    }

    pub fn prepend(bit: bool, e: StrExpr) -> Self {
        if bit {
            Self::p1(e)
        } else {
            Self::p0(e)
        }
    }

    /// `w` prepended bit by bit onto `e`, so the value is `w · val(e)`.
    pub fn prepend_word(w: &Word, e: StrExpr) -> Self {
        w.iter().rev().fold(e, |acc, b| Self::prepend(b, acc))
    }

    pub fn tl(e: StrExpr) -> Self {
        StrExpr::Tail(Box::new(e))
    }

    pub fn tail_n(e: StrExpr, n: usize) -> Self {
        (0..n).fold(e, |acc, _| Self::tl(acc))
    }

    pub fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            StrExpr::Var(x) => {
                out.insert(x);
            }
            StrExpr::Lit(_) => {}
            StrExpr::Prepend0(e) | StrExpr::Prepend1(e) | StrExpr::Tail(e) => e.collect_vars(out),
        }
    }

    pub fn has_literal(&self) -> bool {
        match self {
            StrExpr::Var(_) => false,
            StrExpr::Lit(_) => true,
            StrExpr::Prepend0(e) | StrExpr::Prepend1(e) | StrExpr::Tail(e) => e.has_literal(),
        }
    }
}

impl BoolExpr {
    pub fn is0(e: StrExpr) -> Self {
        BoolExpr::IsZero(e)
    }

    pub fn nil(e: StrExpr) -> Self {
        BoolExpr::IsEmpty(e)
    }

    pub fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            BoolExpr::True | BoolExpr::False => {}
            BoolExpr::IsZero(e) | BoolExpr::IsEmpty(e) => e.collect_vars(out),
        }
    }
}

impl Channel {
    pub fn input(name: &str) -> Self {
        Channel::ExternalIn(name.to_string())
    }

    pub fn output(name: &str) -> Self {
        Channel::ExternalOut(name.to_string())
    }

    pub fn queue(key: StrExpr) -> Self {
        Channel::Internal(key)
    }

    pub fn queue_lit(key: &Word) -> Self {
        Channel::Internal(StrExpr::Lit(key.clone()))
    }
}

impl Process {
    pub fn nil() -> Self {
        Process::Nil
    }

    pub fn call(name: &str, args: Vec<StrExpr>) -> Self {
        Process::Call(name.to_string(), args)
    }

    pub fn send(ch: Channel, e: StrExpr, then: Process) -> Self {
        Process::Send(ch, e, Arc::new(then))
    }

    pub fn recv(ch: Channel, var: &str, then: Process) -> Self {
        Process::Recv(ch, var.to_string(), Arc::new(then))
    }

    pub fn cond(b: BoolExpr, then: Process, otherwise: Process) -> Self {
        Process::Cond(b, Arc::new(then), Arc::new(otherwise))
    }

    pub fn par(p: Process, q: Process) -> Self {
        Process::Par(Arc::new(p), Arc::new(q))
    }

    /// Right-nested parallel composition; `Nil` for an empty list.
    pub fn par_all(mut ps: Vec<Process>) -> Self {
        match ps.len() {
            0 => Process::Nil,
            1 => ps.pop().unwrap(),
            _ => {
                let first = ps.remove(0);
                Process::par(first, Process::par_all(ps))
            }
        }
    }

    pub fn contains_par(&self) -> bool {
        match self {
            Process::Nil | Process::Call(..) => false,
            Process::Par(..) => true,
            Process::Send(_, _, p) | Process::Recv(_, _, p) => p.contains_par(),
            Process::Cond(_, p, q) => p.contains_par() || q.contains_par(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut Vec::new(), &mut out);
        out
    }

    fn free_vars_into(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut add = |vars: BTreeSet<&str>, bound: &Vec<String>| {
            for v in vars {
                if !bound.iter().any(|b| b == v) {
                    out.insert(v.to_string());
                }
            }
        };
        match self {
            Process::Nil => {}
            Process::Call(_, args) => {
                let mut vs = BTreeSet::new();
                args.iter().for_each(|a| a.collect_vars(&mut vs));
                add(vs, bound);
            }
            Process::Send(ch, e, p) => {
                let mut vs = BTreeSet::new();
                if let Channel::Internal(k) = ch {
                    k.collect_vars(&mut vs);
                }
                e.collect_vars(&mut vs);
                add(vs, bound);
                p.free_vars_into(bound, out);
            }
            Process::Recv(ch, x, p) => {
                let mut vs = BTreeSet::new();
                if let Channel::Internal(k) = ch {
                    k.collect_vars(&mut vs);
                }
                add(vs, bound);
                bound.push(x.clone());
                p.free_vars_into(bound, out);
                bound.pop();
            }
            Process::Cond(b, p, q) => {
                let mut vs = BTreeSet::new();
                b.collect_vars(&mut vs);
                add(vs, bound);
                p.free_vars_into(bound, out);
                q.free_vars_into(bound, out);
            }
            Process::Par(p, q) => {
                p.free_vars_into(bound, out);
                q.free_vars_into(bound, out);
            }
        }
    }

    /// Every binder introduced by an input prefix, in pre-order.
    pub fn binders(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.binders_into(&mut out);
        out
    }

    fn binders_into<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Process::Nil | Process::Call(..) => {}
            Process::Send(_, _, p) => p.binders_into(out),
            Process::Recv(_, x, p) => {
                out.push(x);
                p.binders_into(out);
            }
            Process::Cond(_, p, q) | Process::Par(p, q) => {
                p.binders_into(out);
                q.binders_into(out);
            }
        }
    }
}
