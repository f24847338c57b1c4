use std::collections::BTreeMap;
use std::fmt;

use super::choice::internal_choice;
use super::dispatch::dispatch_expr;
use super::{code_width, spec_lines, EncodeError, Move};
use crate::proclang::{BoolExpr, Channel, ProcDef, Process, Program, StrExpr};
use crate::word::Word;

/// `from --action[read/write]move--> to`. `None` is `τ` for the action and
/// the blank for data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RtmTransition {
    pub from: usize,
    pub action: Option<usize>,
    pub read: Option<usize>,
    pub write: Option<usize>,
    pub mv: Move,
    pub to: usize,
}

/// A reactive Turing machine without final states, on a tape unbounded in
/// both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RtmSpec {
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub data: Vec<String>,
    pub trans: Vec<RtmTransition>,
    pub initial: usize,
}

/// `w · reverse(w)` for the fixed-width code `w` of `i`: nonempty and a
/// palindrome.
fn palindrome_code(i: usize, n: usize) -> Word {
    let w = Word::fixed_width(i, code_width(n));
    w.concat(&w.reversed())
}

impl RtmSpec {
    pub fn validate(&self) -> Result<(), EncodeError> {
        let bad = |m: &str| Err(EncodeError::Invalid(m.into()));
        if self.states.is_empty() || self.initial >= self.states.len() {
            return bad("no initial state");
        }
        for t in &self.trans {
            if t.from >= self.states.len() || t.to >= self.states.len() {
                return bad("state index out of range");
            }
            if t.action.is_some_and(|a| a >= self.actions.len()) {
                return bad("action index out of range");
            }
            if [t.read, t.write].iter().flatten().any(|&d| d >= self.data.len()) {
                return bad("data index out of range");
            }
        }
        Ok(())
    }

    pub fn state_code(&self, s: usize) -> Word {
        Word::fixed_width(s, code_width(self.states.len()))
    }

    pub fn action_code(&self, a: usize) -> Word {
        palindrome_code(a, self.actions.len())
    }

    /// Data codes are palindromes too: popping a cell rebuilds its code back
    /// to front.
    pub fn data_code(&self, d: Option<usize>) -> Word {
        let n = self.data.len() + 1;
        palindrome_code(d.map_or(0, |i| i + 1), n)
    }

    /// `states:`, `initial:`, `actions:`, `data:` and one
    /// `trans: from action|tau read write L|R to` per step, `_` for blank.
    pub fn parse(text: &str) -> Result<Self, EncodeError> {
        let mut m = RtmSpec {
            states: Vec::new(),
            actions: Vec::new(),
            data: Vec::new(),
            trans: Vec::new(),
            initial: 0,
        };
        let mut initial = None;
        let mut raw = Vec::new();
        for (line, key, rest) in spec_lines(text)? {
            let toks: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            match key {
                "states" => m.states.extend(toks),
                "actions" => m.actions.extend(toks),
                "data" => m.data.extend(toks),
                "initial" => initial = Some((line, rest.to_string())),
                "trans" => raw.push((line, toks)),
                _ => {
                    return Err(EncodeError::Syntax {
                        line,
                        message: format!("unknown key `{key}`"),
                    })
                }
            }
        }
        let find = |names: &[String], n: &str, line: usize, what: &str| {
            names.iter().position(|x| x == n).ok_or_else(|| EncodeError::Syntax {
                line,
                message: format!("unknown {what} `{n}`"),
            })
        };
        let (iline, iname) = initial.ok_or_else(|| EncodeError::Invalid("missing `initial:`".into()))?;
        m.initial = find(&m.states, &iname, iline, "state")?;
        for (line, toks) in raw {
            let [from, act, read, write, mv, to] = &toks[..] else {
                return Err(EncodeError::Syntax {
                    line,
                    message: "expected `trans: from action read write L|R to`".into(),
                });
            };
            let datum = |d: &str| if d == "_" { Ok(None) } else { find(&m.data, d, line, "symbol").map(Some) };
            m.trans.push(RtmTransition {
                from: find(&m.states, from, line, "state")?,
                action: if act == "tau" { None } else { Some(find(&m.actions, act, line, "action")?) },
                read: datum(read)?,
                write: datum(write)?,
                mv: Move::parse(mv).ok_or_else(|| EncodeError::Syntax {
                    line,
                    message: "move must be L or R".into(),
                })?,
                to: find(&m.states, to, line, "state")?,
            });
        }
        m.validate()?;
        Ok(m)
    }
}

impl fmt::Display for RtmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states: {}", self.states.join(" "))?;
        writeln!(f, "initial: {}", self.states[self.initial])?;
        writeln!(f, "actions: {}", self.actions.join(" "))?;
        writeln!(f, "data: {}", self.data.join(" "))?;
        let datum = |d: Option<usize>| d.map_or("_", |i| self.data[i].as_str());
        for t in &self.trans {
            writeln!(
                f,
                "trans: {} {} {} {} {} {}",
                self.states[t.from],
                t.action.map_or("tau", |a| self.actions[a].as_str()),
                datum(t.read),
                datum(t.write),
                t.mv,
                self.states[t.to]
            )?;
        }
        Ok(())
    }
}

fn var(n: &str) -> StrExpr {
    StrExpr::var(n)
}

fn pop_key() -> Channel {
    Channel::queue(StrExpr::lit("0"))
}

/// The step taken by one transition: emit its action, pop the cell the head
/// moves onto and push the written one on the other side.
fn step(m: &RtmSpec, t: &RtmTransition) -> Process {
    let written = m.data_code(t.write);
    let pushed = |stack: &str, cells: &str| {
        (
            StrExpr::prepend_word(&written, var(stack)),
            StrExpr::prepend_word(&Word::ones(written.len()).child(false), var(cells)),
        )
    };
    let (popped, args) = match t.mv {
        Move::R => {
            let (l, lc) = pushed("l", "lc");
            (("r", "rc"), vec![l, lc, var("h"), var("p"), var("c")])
        }
        Move::L => {
            let (r, rc) = pushed("r", "rc");
            (("l", "lc"), vec![var("p"), var("c"), var("h"), r, rc])
        }
    };
    let mut all = vec![StrExpr::Lit(m.state_code(t.to))];
    all.extend(args);
    let resume = Process::recv(
        pop_key(),
        "h",
        Process::recv(pop_key(), "p", Process::recv(pop_key(), "c", Process::call("T", all))),
    );
    let body = Process::par(
        Process::call("Pop", vec![var(popped.0), var(popped.1), StrExpr::eps()]),
        resume,
    );
    match t.action {
        Some(a) => Process::send(Channel::output("o"), StrExpr::Lit(m.action_code(a)), body),
        None => body,
    }
}

/// `T<code(init), ε, ε, code(blank), ε, ε>`. Each side of the tape is a
/// stack: the concatenated cell codes, and the cell lengths in unary, each
/// closed by a `0`. `Pop` answers on key `0` with the top cell, the rest of
/// the content and the rest of the lengths.
pub fn encode_rtm(m: &RtmSpec) -> Result<Program, EncodeError> {
    m.validate()?;
    let mut by_state: BTreeMap<Word, Process> = BTreeMap::new();
    for s in 0..m.states.len() {
        let mut by_symbol: BTreeMap<Word, Vec<Process>> = BTreeMap::new();
        for t in m.trans.iter().filter(|t| t.from == s) {
            by_symbol.entry(m.data_code(t.read)).or_default().push(step(m, t));
        }
        let table: BTreeMap<Word, Process> = by_symbol
            .into_iter()
            .map(|(d, steps)| (d, internal_choice(&Word::empty(), steps)))
            .collect();
        if !table.is_empty() {
            by_state.insert(m.state_code(s), dispatch_expr(&var("d"), &table, &Process::nil()));
        }
    }
    let t_def = ProcDef::new(
        "T",
        &["s", "l", "lc", "d", "r", "rc"],
        dispatch_expr(&var("s"), &by_state, &Process::nil()),
    );
    let answer = |a: StrExpr, b: StrExpr, c: StrExpr| {
        Process::send(pop_key(), a, Process::send(pop_key(), b, Process::send(pop_key(), c, Process::nil())))
    };
    let shift = |bit: bool| {
        Process::call(
            "Pop",
            vec![StrExpr::tl(var("xs")), StrExpr::tl(var("xc")), StrExpr::prepend(bit, var("acc"))],
        )
    };
    let pop = Process::cond(
        BoolExpr::nil(var("xc")),
        answer(StrExpr::Lit(m.data_code(None)), StrExpr::eps(), StrExpr::eps()),
        Process::cond(
            BoolExpr::is0(var("xc")),
            answer(var("acc"), var("xs"), StrExpr::tl(var("xc"))),
            Process::cond(BoolExpr::is0(var("xs")), shift(false), shift(true)),
        ),
    );
    let pop_def = ProcDef::new("Pop", &["xs", "xc", "acc"], pop);
    let main = Process::call(
        "T",
        vec![
            StrExpr::Lit(m.state_code(m.initial)),
            StrExpr::eps(),
            StrExpr::eps(),
            StrExpr::Lit(m.data_code(None)),
            StrExpr::eps(),
            StrExpr::eps(),
        ],
    );
    Ok(Program::new(Vec::<String>::new(), vec!["o".to_string()], vec![t_def, pop_def], main)?)
}
