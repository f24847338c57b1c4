use std::collections::BTreeMap;
use std::fmt;

use super::dispatch::finite_dispatch;
use super::tm::{dispatch_name, tape_step};
use super::{code_width, spec_lines, EncodeError, Move, Sym};
use crate::proclang::{BoolExpr, Channel, ProcDef, Process, Program, StrExpr};
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Existential,
    Universal,
    Accepting,
    Rejecting,
}

impl Polarity {
    pub fn is_final(self) -> bool {
        matches!(self, Polarity::Accepting | Polarity::Rejecting)
    }

    fn parse(s: &str) -> Option<Polarity> {
        Some(match s {
            "E" => Polarity::Existential,
            "U" => Polarity::Universal,
            "A" => Polarity::Accepting,
            "R" => Polarity::Rejecting,
            _ => return None,
        })
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Existential => "E",
            Polarity::Universal => "U",
            Polarity::Accepting => "A",
            Polarity::Rejecting => "R",
        })
    }
}

/// An alternating machine on the same tape as [`super::TmSpec`]; every step
/// branches in two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtmSpec {
    pub states: Vec<String>,
    pub polarity: Vec<Polarity>,
    pub initial: usize,
    /// `(state, read, branch) -> (state, write, move)`
    pub trans: BTreeMap<(usize, Sym, bool), (usize, Sym, Move)>,
}

impl AtmSpec {
    pub fn validate(&self) -> Result<(), EncodeError> {
        let n = self.states.len();
        let bad = |m: String| Err(EncodeError::Invalid(m));
        if n == 0 || self.polarity.len() != n || self.initial >= n {
            return bad("state table inconsistent".into());
        }
        for (&(s, a, br), &(t, b, mv)) in &self.trans {
            if s >= n || t >= n {
                return bad("state index out of range".into());
            }
            let name = &self.states[s];
            if self.polarity[s].is_final() {
                return bad(format!("final state `{name}` has a transition"));
            }
            if !self.trans.contains_key(&(s, a, !br)) {
                return bad(format!("`{name}` on {a} has only branch {}", u8::from(br)));
            }
            if b == Sym::Blank && mv == Move::R {
                return bad(format!("`{name}` on {a} writes a blank and moves right"));
            }
        }
        Ok(())
    }

    pub fn code(&self, state: usize) -> Word {
        Word::fixed_width(state, code_width(self.states.len()))
    }

    /// As the TM format, with `polarity: q E|U|A|R` lines and transitions
    /// `trans: q x branch 0|1 -> q' y L|R`.
    pub fn parse(text: &str) -> Result<Self, EncodeError> {
        let mut states: Vec<String> = Vec::new();
        let mut initial = None;
        let mut pol: BTreeMap<String, Polarity> = BTreeMap::new();
        let mut trans = Vec::new();
        for (line, key, rest) in spec_lines(text)? {
            let syn = |m: &str| EncodeError::Syntax {
                line,
                message: m.to_string(),
            };
            let toks: Vec<&str> = rest.split_whitespace().collect();
            match key {
                "states" => states.extend(toks.iter().map(|s| s.to_string())),
                "initial" => initial = Some(rest.to_string()),
                "polarity" => {
                    let [q, p] = toks[..] else {
                        return Err(syn("expected `polarity: q E|U|A|R`"));
                    };
                    let p = Polarity::parse(p).ok_or_else(|| syn("polarity must be E, U, A or R"))?;
                    pol.insert(q.to_string(), p);
                }
                "trans" => {
                    let [q, a, "branch", br, "->", t, b, mv] = toks[..] else {
                        return Err(syn("expected `trans: q x branch 0|1 -> q' y L|R`"));
                    };
                    let a = Sym::parse(a).ok_or_else(|| syn("bad read symbol"))?;
                    let b = Sym::parse(b).ok_or_else(|| syn("bad write symbol"))?;
                    let br = match br {
                        "0" => false,
                        "1" => true,
                        _ => return Err(syn("branch must be 0 or 1")),
                    };
                    let mv = Move::parse(mv).ok_or_else(|| syn("move must be L or R"))?;
                    trans.push((line, q.to_string(), a, br, t.to_string(), b, mv));
                }
                _ => return Err(syn(&format!("unknown key `{key}`"))),
            }
        }
        let idx = |n: &str| {
            states
                .iter()
                .position(|s| s == n)
                .ok_or_else(|| EncodeError::Invalid(format!("unknown state `{n}`")))
        };
        let initial = idx(&initial.ok_or_else(|| EncodeError::Invalid("missing `initial:`".into()))?)?;
        let mut polarity = Vec::new();
        for s in &states {
            polarity.push(
                *pol.get(s)
                    .ok_or_else(|| EncodeError::Invalid(format!("state `{s}` has no polarity")))?,
            );
        }
        let mut map = BTreeMap::new();
        for (line, q, a, br, t, b, mv) in trans {
            if map.insert((idx(&q)?, a, br), (idx(&t)?, b, mv)).is_some() {
                return Err(EncodeError::Syntax {
                    line,
                    message: "duplicate transition".into(),
                });
            }
        }
        let m = AtmSpec {
            states,
            polarity,
            initial,
            trans: map,
        };
        m.validate()?;
        Ok(m)
    }
}

impl fmt::Display for AtmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states: {}", self.states.join(" "))?;
        writeln!(f, "initial: {}", self.states[self.initial])?;
        for (s, p) in self.states.iter().zip(&self.polarity) {
            writeln!(f, "polarity: {s} {p}")?;
        }
        for (&(s, a, br), &(t, b, mv)) in &self.trans {
            writeln!(
                f,
                "trans: {} {a} branch {} -> {} {b} {mv}",
                self.states[s],
                u8::from(br),
                self.states[t]
            )?;
        }
        Ok(())
    }
}

fn var(n: &str) -> StrExpr {
    StrExpr::var(n)
}

fn answer(bit: &str) -> Process {
    Process::send(Channel::queue(var("d")), StrExpr::lit(bit), Process::nil())
}

fn and_body() -> Process {
    Process::cond(
        BoolExpr::is0(var("y")),
        answer("0"),
        Process::cond(BoolExpr::is0(var("z")), answer("0"), answer("1")),
    )
}

fn or_body() -> Process {
    Process::cond(
        BoolExpr::is0(var("y")),
        Process::cond(BoolExpr::is0(var("z")), answer("0"), answer("1")),
        answer("1"),
    )
}

/// `N` spawns the two branches on result keys `0·d` and `1·d` next to a
/// collector that combines their answers with `And` or `Or` onto `d`; the
/// root answer on key `ε` is forwarded to `o`.
pub fn encode_atm(m: &AtmSpec) -> Result<Program, EncodeError> {
    m.validate()?;
    let params = ["s", "l", "r", "d"];
    let mut defs = Vec::new();
    for br in [false, true] {
        let suffix = if br { "_1" } else { "_0" };
        for read in [Sym::Blank, Sym::Zero, Sym::One] {
            let mut table = BTreeMap::new();
            for (s, p) in m.polarity.iter().enumerate() {
                match p {
                    Polarity::Accepting => {
                        table.insert(m.code(s), answer("1"));
                    }
                    Polarity::Rejecting => {
                        table.insert(m.code(s), answer("0"));
                    }
                    _ => {}
                }
            }
            for (&(s, a, b), &(t, w, mv)) in &m.trans {
                if a == read && b == br {
                    let q = m.code(t);
                    let step = tape_step(read, w, mv, &|l, r| {
                        Process::call("N", vec![StrExpr::Lit(q.clone()), l, r, var("d")])
                    });
                    table.insert(m.code(s), step);
                }
            }
            let name = format!("{}{suffix}", dispatch_name(read));
            defs.push(finite_dispatch(&name, &params, 0, &table, &Process::nil()));
        }
        let args = || params.iter().map(|p| var(p)).collect::<Vec<_>>();
        let f = |read: Sym| Process::call(&format!("{}{suffix}", dispatch_name(read)), args());
        let t_body = Process::cond(
            BoolExpr::nil(var("r")),
            f(Sym::Blank),
            Process::cond(BoolExpr::is0(var("r")), f(Sym::Zero), f(Sym::One)),
        );
        defs.push(ProcDef::new(format!("T{suffix}"), &params, t_body));
    }
    let ops: BTreeMap<Word, Process> = m
        .polarity
        .iter()
        .enumerate()
        .filter(|(_, p)| **p == Polarity::Existential)
        .map(|(s, _)| (m.code(s), or_body()))
        .collect();
    defs.push(finite_dispatch("Op", &["s", "y", "z", "d"], 0, &ops, &and_body()));
    let branch = |name: &str, bit: bool| {
        Process::call(name, vec![var("s"), var("l"), var("r"), StrExpr::prepend(bit, var("d"))])
    };
    let collect = Process::recv(
        Channel::queue(StrExpr::p0(var("d"))),
        "y",
        Process::recv(
            Channel::queue(StrExpr::p1(var("d"))),
            "z",
            Process::call("Op", vec![var("s"), var("y"), var("z"), var("d")]),
        ),
    );
    defs.push(ProcDef::new(
        "N",
        &params,
        Process::par(Process::par(branch("T_0", false), branch("T_1", true)), collect),
    ));
    let main = Process::recv(
        Channel::input("i"),
        "x",
        Process::par(
            Process::call(
                "N",
                vec![StrExpr::Lit(m.code(m.initial)), StrExpr::eps(), var("x"), StrExpr::eps()],
            ),
            Process::recv(
                Channel::queue(StrExpr::eps()),
                "y",
                Process::send(Channel::output("o"), var("y"), Process::nil()),
            ),
        ),
    );
    Ok(Program::new(["i"], ["o"], defs, main)?)
}
