//! Concrete syntax printer. Output re-parses to the same program.

use std::fmt::{self, Display, Formatter};

use super::ast::{BoolExpr, Channel, ProcDef, Process, Program, StrExpr};

impl Display for StrExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            StrExpr::Var(x) => f.write_str(x),
            StrExpr::Lit(w) => f.write_str(&w.quoted()),
            StrExpr::Prepend0(e) => write!(f, "0:{e}"),
            StrExpr::Prepend1(e) => write!(f, "1:{e}"),
            StrExpr::Tail(e) => write!(f, "tl {e}"),
        }
    }
}

impl Display for BoolExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            BoolExpr::True => f.write_str("tt"),
            BoolExpr::False => f.write_str("ff"),
            BoolExpr::IsZero(e) => write!(f, "is0 {e}"),
            BoolExpr::IsEmpty(e) => write!(f, "nil {e}"),
        }
    }
}

impl Display for Channel {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Channel::ExternalIn(n) | Channel::ExternalOut(n) => f.write_str(n),
            Channel::Internal(e) => write!(f, "[{e}]"),
        }
    }
}

fn write_args(f: &mut Formatter<'_>, args: &[StrExpr]) -> fmt::Result {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

impl Display for Process {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Process::Nil => f.write_str("0"),
            Process::Call(name, args) => {
                write!(f, "{name}<")?;
                write_args(f, args)?;
                f.write_str(">")
            }
            Process::Send(ch, e, p) => write!(f, "{ch}!{e}.{p}"),
            Process::Recv(ch, x, p) => write!(f, "{ch}?{x}.{p}"),
            Process::Cond(b, p, q) => write!(f, "if {b} then {p} else {q}"),
            Process::Par(p, q) => write!(f, "({p} | {q})"),
        }
    }
}

impl Display for ProcDef {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}) := {};", self.name, self.params.join(", "), self.body)
    }
}

impl Display for Program {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for i in &self.inputs {
            writeln!(f, "input {i};")?;
        }
        for o in &self.outputs {
            writeln!(f, "output {o};")?;
        }
        for d in self.defs.values() {
            writeln!(f, "{d}")?;
        }
        writeln!(f, "main := {}", self.main)
    }
}
