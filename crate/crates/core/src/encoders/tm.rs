use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::dispatch::finite_dispatch;
use super::{code_width, spec_lines, EncodeError, Move, Sym};
use crate::proclang::{BoolExpr, Channel, ProcDef, Process, Program, StrExpr};
use crate::word::Word;

/// A deterministic single-tape machine over {0,1} with a tape that is finite
/// to the left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TmSpec {
    pub states: Vec<String>,
    pub initial: usize,
    pub halting: BTreeSet<usize>,
    pub trans: BTreeMap<(usize, Sym), (usize, Sym, Move)>,
}

impl TmSpec {
    /// Builds and validates a machine from named states.
    pub fn new(
        states: &[&str],
        initial: &str,
        halting: &[&str],
        trans: &[(&str, Sym, &str, Sym, Move)],
    ) -> Result<Self, EncodeError> {
        let states: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let idx = |n: &str| {
            states
                .iter()
                .position(|s| s == n)
                .ok_or_else(|| EncodeError::Invalid(format!("unknown state `{n}`")))
        };
        let mut m = TmSpec {
            initial: idx(initial)?,
            halting: halting.iter().map(|h| idx(h)).collect::<Result<_, _>>()?,
            trans: BTreeMap::new(),
            states: states.clone(),
        };
        for &(s, a, t, b, mv) in trans {
            if m.trans.insert((idx(s)?, a), (idx(t)?, b, mv)).is_some() {
                return Err(EncodeError::Invalid(format!("two transitions for `{s}` on {a}")));
            }
        }
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), EncodeError> {
        let n = self.states.len();
        if n == 0 || self.initial >= n || self.halting.iter().any(|&h| h >= n) {
            return Err(EncodeError::Invalid("state index out of range".into()));
        }
        for (&(s, a), &(t, b, mv)) in &self.trans {
            if s >= n || t >= n {
                return Err(EncodeError::Invalid("state index out of range".into()));
            }
            let name = &self.states[s];
            if self.halting.contains(&s) {
                return Err(EncodeError::Invalid(format!("halting state `{name}` has a transition")));
            }
            if b == Sym::Blank && mv == Move::R {
                // a blank left behind the head has no place in the left string
                return Err(EncodeError::Invalid(format!(
                    "`{name}` on {a} writes a blank and moves right"
                )));
            }
        }
        Ok(())
    }

    pub fn code(&self, state: usize) -> Word {
        Word::fixed_width(state, code_width(self.states.len()))
    }

    /// Line format: `states: a b c`, `initial: a`, `halting: c`, and one
    /// `trans: q x -> q' y L|R` per transition with symbols `0`, `1`, `_`.
    pub fn parse(text: &str) -> Result<Self, EncodeError> {
        let mut states: Vec<String> = Vec::new();
        let mut initial = None;
        let mut halting: Vec<String> = Vec::new();
        let mut trans = Vec::new();
        for (line, key, rest) in spec_lines(text)? {
            let syn = |m: &str| EncodeError::Syntax {
                line,
                message: m.to_string(),
            };
            match key {
                "states" => states.extend(rest.split_whitespace().map(str::to_string)),
                "initial" => initial = Some(rest.trim().to_string()),
                "halting" => halting.extend(rest.split_whitespace().map(str::to_string)),
                "trans" => {
                    let toks: Vec<&str> = rest.split_whitespace().collect();
                    let [q, a, "->", t, b, mv] = toks[..] else {
                        return Err(syn("expected `trans: q x -> q' y L|R`"));
                    };
                    let a = Sym::parse(a).ok_or_else(|| syn("bad read symbol"))?;
                    let b = Sym::parse(b).ok_or_else(|| syn("bad write symbol"))?;
                    let mv = Move::parse(mv).ok_or_else(|| syn("move must be L or R"))?;
                    trans.push((q.to_string(), a, t.to_string(), b, mv));
                }
                _ => return Err(syn(&format!("unknown key `{key}`"))),
            }
        }
        let initial = initial.ok_or_else(|| EncodeError::Invalid("missing `initial:`".into()))?;
        let st: Vec<&str> = states.iter().map(String::as_str).collect();
        let hl: Vec<&str> = halting.iter().map(String::as_str).collect();
        let tr: Vec<(&str, Sym, &str, Sym, Move)> =
            trans.iter().map(|(q, a, t, b, m)| (q.as_str(), *a, t.as_str(), *b, *m)).collect();
        TmSpec::new(&st, &initial, &hl, &tr)
    }
}

impl fmt::Display for TmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states: {}", self.states.join(" "))?;
        writeln!(f, "initial: {}", self.states[self.initial])?;
        let h: Vec<&str> = self.halting.iter().map(|&i| self.states[i].as_str()).collect();
        writeln!(f, "halting: {}", h.join(" "))?;
        for (&(s, a), &(t, b, mv)) in &self.trans {
            writeln!(f, "trans: {} {a} -> {} {b} {mv}", self.states[s], self.states[t])?;
        }
        Ok(())
    }
}

fn var(n: &str) -> StrExpr {
    StrExpr::var(n)
}

fn call_t(q: &Word, l: StrExpr, r: StrExpr) -> Process {
    Process::call("T", vec![StrExpr::Lit(q.clone()), l, r])
}

/// One tape step after reading `read`: writes `write`, moves, and continues
/// with `cont(l', r')`. Moving off the left end, or erasing a cell that still
/// has symbols to its right, ends in `0`.
pub(crate) fn tape_step(read: Sym, write: Sym, mv: Move, cont: &dyn Fn(StrExpr, StrExpr) -> Process) -> Process {
    // the tape right of the current cell; the empty tail of a blank read is
    // written out rather than computed
    let rest = match read {
        Sym::Blank => StrExpr::eps(),
        _ => StrExpr::tl(var("r")),
    };
    match mv {
        Move::R => {
            let bit = write.bit().expect("validated: no blank write on a right move");
            cont(StrExpr::prepend(bit, var("l")), rest)
        }
        Move::L => {
            let new_r = match write.bit() {
                Some(bit) => StrExpr::prepend(bit, rest),
                None => StrExpr::eps(),
            };
            let back = Process::cond(
                BoolExpr::nil(var("l")),
                Process::nil(),
                Process::cond(
                    BoolExpr::is0(var("l")),
                    cont(StrExpr::tl(var("l")), StrExpr::p0(new_r.clone())),
                    cont(StrExpr::tl(var("l")), StrExpr::p1(new_r)),
                ),
            );
            if write == Sym::Blank && read != Sym::Blank {
                // erasing is only representable at the right end of the tape
                Process::cond(BoolExpr::nil(StrExpr::tl(var("r"))), back, Process::nil())
            } else {
                back
            }
        }
    }
}

pub(crate) fn dispatch_name(read: Sym) -> &'static str {
    match read {
        Sym::Blank => "Fe",
        Sym::Zero => "F0",
        Sym::One => "F1",
    }
}

/// `i?x.T<code(s0), "", x>` with `T` testing the head symbol and one finite
/// dispatch per symbol over the state code. No parallel composition.
pub fn encode_tm(m: &TmSpec) -> Result<Program, EncodeError> {
    m.validate()?;
    let args = || vec![var("s"), var("l"), var("r")];
    let mut defs = Vec::new();
    for read in [Sym::Blank, Sym::Zero, Sym::One] {
        let mut table = BTreeMap::new();
        for &h in &m.halting {
            table.insert(m.code(h), Process::send(Channel::output("o"), var("r"), Process::nil()));
        }
        for (&(s, a), &(t, b, mv)) in &m.trans {
            if a == read {
                let q = m.code(t);
                table.insert(m.code(s), tape_step(read, b, mv, &|l, r| call_t(&q, l, r)));
            }
        }
        defs.push(finite_dispatch(dispatch_name(read), &["s", "l", "r"], 0, &table, &Process::nil()));
    }
    let t_body = Process::cond(
        BoolExpr::nil(var("r")),
        Process::call("Fe", args()),
        Process::cond(
            BoolExpr::is0(var("r")),
            Process::call("F0", args()),
            Process::call("F1", args()),
        ),
    );
    defs.push(ProcDef::new("T", &["s", "l", "r"], t_body));
    let main = Process::recv(
        Channel::input("i"),
        "x",
        call_t(&m.code(m.initial), StrExpr::eps(), var("x")),
    );
    Ok(Program::new(["i"], ["o"], defs, main)?)
}
