use std::fmt;

use super::EncodeError;
use crate::proclang::{BoolExpr, Channel, ProcDef, Process, Program, StrExpr};
use crate::word::Word;

/// Integers are unary: `n` is `0^n`. Addresses `k` name the cell on key
/// `0^k`; key `ε` is the accumulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RamInstr {
    Load(usize),
    /// Load from the address stored at `k`.
    LoadI(usize),
    Store(usize),
    /// Store to the address stored at `k`.
    StoreI(usize),
    Inc,
    /// Removes the first symbol; no effect on the empty word.
    Dec,
    /// Jumps unless the accumulator starts with `0`, i.e. when it is zero in
    /// unary.
    JZero(usize),
    Jump(usize),
    Halt,
}

impl fmt::Display for RamInstr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RamInstr::Load(k) => write!(f, "LOAD {k}"),
            RamInstr::LoadI(k) => write!(f, "LOADI {k}"),
            RamInstr::Store(k) => write!(f, "STORE {k}"),
            RamInstr::StoreI(k) => write!(f, "STOREI {k}"),
            RamInstr::Inc => write!(f, "INC"),
            RamInstr::Dec => write!(f, "DEC"),
            RamInstr::JZero(t) => write!(f, "JZERO {t}"),
            RamInstr::Jump(t) => write!(f, "JUMP {t}"),
            RamInstr::Halt => write!(f, "HALT"),
        }
    }
}

/// Instructions are numbered from 1; jump targets use those numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamProgram {
    pub instrs: Vec<RamInstr>,
}

impl RamProgram {
    pub fn new(instrs: Vec<RamInstr>) -> Result<Self, EncodeError> {
        let p = RamProgram { instrs };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), EncodeError> {
        let n = self.instrs.len();
        for (j, ins) in self.instrs.iter().enumerate() {
            if let RamInstr::JZero(t) | RamInstr::Jump(t) = ins {
                if *t == 0 || *t > n {
                    return Err(EncodeError::Invalid(format!("instruction {}: target {t} out of range", j + 1)));
                }
            }
        }
        match self.instrs.last() {
            Some(RamInstr::Halt | RamInstr::Jump(_)) => Ok(()),
            _ => Err(EncodeError::Invalid("control can run past the last instruction".into())),
        }
    }

    /// One instruction per line, e.g. `LOAD 2`, `JZERO 7`, `HALT`; `#`
    /// comments.
    pub fn parse(text: &str) -> Result<Self, EncodeError> {
        let mut instrs = Vec::new();
        for (line, raw) in text.lines().enumerate() {
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            instrs.push(parse_instr(l).map_err(|message| EncodeError::Syntax {
                line: line + 1,
                message,
            })?);
        }
        RamProgram::new(instrs)
    }
}

fn parse_instr(l: &str) -> Result<RamInstr, String> {
    let toks: Vec<&str> = l.split_whitespace().collect();
    let op = toks[0].to_ascii_uppercase();
    let arg = || -> Result<usize, String> {
        match toks.get(1..) {
            Some([a]) => a.parse().map_err(|_| format!("`{a}` is not a number")),
            _ => Err(format!("{op} takes one argument")),
        }
    };
    let none = |i: RamInstr| if toks.len() == 1 { Ok(i) } else { Err(format!("{op} takes no argument")) };
    match op.as_str() {
        "LOAD" => Ok(RamInstr::Load(arg()?)),
        "LOADI" => Ok(RamInstr::LoadI(arg()?)),
        "STORE" => Ok(RamInstr::Store(arg()?)),
        "STOREI" => Ok(RamInstr::StoreI(arg()?)),
        "JZERO" => Ok(RamInstr::JZero(arg()?)),
        "JUMP" => Ok(RamInstr::Jump(arg()?)),
        "INC" => none(RamInstr::Inc),
        "DEC" => none(RamInstr::Dec),
        "HALT" => none(RamInstr::Halt),
        _ => Err(format!("unknown instruction `{}`", toks[0])),
    }
}

impl fmt::Display for RamProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.instrs {
            writeln!(f, "{i}")?;
        }
        Ok(())
    }
}

/// Components run in lockstep; component `i` (from 1) reads `i<i>`, writes
/// `o<i>` and keeps its accumulator at address `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PramProgram {
    pub components: Vec<RamProgram>,
}

impl PramProgram {
    pub fn new(components: Vec<RamProgram>) -> Result<Self, EncodeError> {
        if components.is_empty() {
            return Err(EncodeError::Invalid("a PRAM needs at least one component".into()));
        }
        for c in &components {
            c.validate()?;
        }
        Ok(PramProgram { components })
    }

    /// RAM programs, each introduced by a `component` line.
    pub fn parse(text: &str) -> Result<Self, EncodeError> {
        let mut parts: Vec<(usize, String)> = Vec::new();
        for (line, raw) in text.lines().enumerate() {
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.eq_ignore_ascii_case("component") {
                parts.push((line, String::new()));
            } else if let Some((_, body)) = parts.last_mut() {
                body.push_str(raw);
                body.push('\n');
            } else if !l.is_empty() {
                return Err(EncodeError::Syntax {
                    line: line + 1,
                    message: "expected `component`".into(),
                });
            }
        }
        let comps = parts
            .into_iter()
            .map(|(start, body)| {
                RamProgram::parse(&body).map_err(|e| match e {
                    EncodeError::Syntax { line, message } => EncodeError::Syntax {
                        line: line + start + 1,
                        message,
                    },
                    e => e,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        PramProgram::new(comps)
    }
}

impl fmt::Display for PramProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.components {
            writeln!(f, "component")?;
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Key of the allocator; sending an address there creates every missing
/// cell up to it.
const ALLOC: &str = "1";

fn var(n: &str) -> StrExpr {
    StrExpr::var(n)
}

fn lit(w: &Word) -> StrExpr {
    StrExpr::Lit(w.clone())
}

fn q(e: StrExpr) -> Channel {
    Channel::queue(e)
}

/// Where one RAM's instructions live and how they talk to the rest.
struct Component {
    acc: Word,
    reply: Word,
    /// `(tick, ack)` keys when driven by a clock.
    clock: Option<(Word, Word)>,
    output: String,
    prefix: String,
}

impl Component {
    fn def_name(&self, j: usize) -> String {
        format!("{}{j}", self.prefix)
    }

    fn goto(&self, j: usize) -> Process {
        let call = Process::call(&self.def_name(j), vec![]);
        match &self.clock {
            Some((_, ack)) => Process::send(q(lit(ack)), StrExpr::eps(), call),
            None => call,
        }
    }

    /// Reads the cell at `addr` into `v`, through this component's reply key.
    fn read(&self, addr: StrExpr, v: &str, then: Process) -> Process {
        let request = Word::from("0").concat(&self.reply);
        Process::send(q(addr), lit(&request), Process::recv(q(lit(&self.reply)), v, then))
    }

    fn alloc(addr: StrExpr, then: Process) -> Process {
        Process::send(q(StrExpr::lit(ALLOC)), addr, then)
    }

    fn write(addr: StrExpr, value: StrExpr, then: Process) -> Process {
        Process::send(q(addr), StrExpr::p1(value), then)
    }

    fn instr(&self, j: usize, ins: RamInstr) -> Process {
        let acc = || lit(&self.acc);
        let cell = |k: usize| lit(&Word::zeros(k));
        let next = self.goto(j + 1);
        match ins {
            RamInstr::Load(k) => Self::alloc(
                cell(k),
                self.read(cell(k), "v", Self::write(acc(), var("v"), next)),
            ),
            RamInstr::Store(k) => self.read(
                acc(),
                "v",
                Self::alloc(cell(k), Self::write(cell(k), var("v"), next)),
            ),
            RamInstr::LoadI(k) => Self::alloc(
                cell(k),
                self.read(
                    cell(k),
                    "a",
                    Self::alloc(
                        var("a"),
                        self.read(var("a"), "v", Self::write(acc(), var("v"), next)),
                    ),
                ),
            ),
            RamInstr::StoreI(k) => self.read(
                acc(),
                "v",
                Self::alloc(
                    cell(k),
                    self.read(
                        cell(k),
                        "a",
                        Self::alloc(var("a"), Self::write(var("a"), var("v"), next)),
                    ),
                ),
            ),
            RamInstr::Inc => self.read(acc(), "v", Self::write(acc(), StrExpr::p0(var("v")), next)),
            RamInstr::Dec => self.read(
                acc(),
                "v",
                Process::cond(
                    BoolExpr::nil(var("v")),
                    next.clone(),
                    Self::write(acc(), StrExpr::tl(var("v")), next),
                ),
            ),
            RamInstr::JZero(t) => self.read(
                acc(),
                "v",
                Process::cond(BoolExpr::is0(var("v")), next, self.goto(t)),
            ),
            RamInstr::Jump(t) => self.goto(t),
            RamInstr::Halt => {
                let done = match &self.clock {
                    Some((_, ack)) => Process::send(q(lit(ack)), StrExpr::lit("1"), Process::nil()),
                    None => Process::nil(),
                };
                self.read(
                    acc(),
                    "v",
                    Process::send(Channel::output(&self.output), var("v"), done),
                )
            }
        }
    }

    fn defs(&self, prog: &RamProgram) -> Vec<ProcDef> {
        prog.instrs
            .iter()
            .enumerate()
            .map(|(j, &ins)| {
                let body = self.instr(j + 1, ins);
                let body = match &self.clock {
                    Some((tick, _)) => Process::recv(q(lit(tick)), "u", body),
                    None => body,
                };
                ProcDef::new(self.def_name(j + 1), &[], body)
            })
            .collect()
    }
}

/// Cells, the allocator and its comparison helpers.
fn memory_defs() -> Vec<ProcDef> {
    let cell = Process::recv(
        q(var("x")),
        "y",
        Process::cond(
            BoolExpr::nil(var("y")),
            Process::call("C", vec![var("x"), var("v")]),
            Process::cond(
                BoolExpr::is0(var("y")),
                Process::send(
                    q(StrExpr::tl(var("y"))),
                    var("v"),
                    Process::call("C", vec![var("x"), var("v")]),
                ),
                Process::call("C", vec![var("x"), StrExpr::tl(var("y"))]),
            ),
        ),
    );
    let alloc = Process::recv(
        q(StrExpr::lit(ALLOC)),
        "x",
        Process::call("Dle", vec![var("x"), var("c"), var("c"), var("x")]),
    );
    // Dle<m, n, c, x>: M<c> when |m| <= |n|, otherwise fill c+1..x
    let dle = Process::cond(
        BoolExpr::nil(var("m")),
        Process::call("M", vec![var("c")]),
        Process::cond(
            BoolExpr::nil(var("n")),
            Process::par(
                Process::call("Fill", vec![StrExpr::p0(var("c")), var("x")]),
                Process::call("M", vec![var("x")]),
            ),
            Process::call("Dle", vec![StrExpr::tl(var("m")), StrExpr::tl(var("n")), var("c"), var("x")]),
        ),
    );
    let fill = Process::par(
        Process::call("C", vec![var("m"), StrExpr::eps()]),
        Process::call("Eq", vec![var("m"), var("n"), var("m"), var("n")]),
    );
    let more = || Process::call("Fill", vec![StrExpr::p0(var("m")), var("n")]);
    let eq = Process::cond(
        BoolExpr::nil(var("a")),
        Process::cond(BoolExpr::nil(var("b")), Process::nil(), more()),
        Process::cond(
            BoolExpr::nil(var("b")),
            more(),
            Process::call("Eq", vec![StrExpr::tl(var("a")), StrExpr::tl(var("b")), var("m"), var("n")]),
        ),
    );
    vec![
        ProcDef::new("C", &["x", "v"], cell),
        ProcDef::new("M", &["c"], alloc),
        ProcDef::new("Dle", &["m", "n", "c", "x"], dle),
        ProcDef::new("Fill", &["m", "n"], fill),
        ProcDef::new("Eq", &["a", "b", "m", "n"], eq),
    ]
}

/// `(i?x.(I_1<> | C<"", x>)) | M<"">`: the input becomes the accumulator.
pub fn encode_ram(p: &RamProgram) -> Result<Program, EncodeError> {
    p.validate()?;
    let comp = Component {
        acc: Word::empty(),
        reply: Word::from("10"),
        clock: None,
        output: "o".into(),
        prefix: "I_".into(),
    };
    let mut defs = memory_defs();
    defs.extend(comp.defs(p));
    let main = Process::par(
        Process::recv(
            Channel::input("i"),
            "x",
            Process::par(comp.goto(1), Process::call("C", vec![StrExpr::eps(), var("x")])),
        ),
        Process::call("M", vec![StrExpr::eps()]),
    );
    Ok(Program::new(["i"], ["o"], defs, main)?)
}

fn bit_of(f: &str, k: usize) -> StrExpr {
    StrExpr::tail_n(var(f), k)
}

/// The clock over `n` components. Its parameter holds one flag per
/// component, `1` once that component has halted; halted components get no
/// more ticks and the clock stops when all have halted.
fn clock_defs(keys: &[(Word, Word)]) -> Vec<ProcDef> {
    let n = keys.len();
    let mut defs = Vec::new();
    let mut all_halted = Process::nil();
    for k in (0..n).rev() {
        all_halted = Process::cond(
            BoolExpr::is0(bit_of("f", k)),
            Process::call("Tick_1", vec![var("f")]),
            all_halted,
        );
    }
    defs.push(ProcDef::new("K", &["f"], all_halted));
    for (k, (tick, _)) in keys.iter().enumerate() {
        let next = if k + 1 < n {
            Process::call(&format!("Tick_{}", k + 2), vec![var("f")])
        } else {
            Process::call(&format!("Ack_{n}"), vec![var("f"), StrExpr::eps()])
        };
        let body = Process::cond(
            BoolExpr::is0(bit_of("f", k)),
            Process::send(q(lit(tick)), StrExpr::eps(), next.clone()),
            next,
        );
        defs.push(ProcDef::new(format!("Tick_{}", k + 1), &["f"], body));
    }
    // acknowledgements are collected last to first so that prepending
    // rebuilds the flags in order
    for (k, (_, ack)) in keys.iter().enumerate().rev() {
        let then = |g: StrExpr| {
            if k == 0 {
                Process::call("K", vec![g])
            } else {
                Process::call(&format!("Ack_{k}"), vec![var("f"), g])
            }
        };
        let body = Process::cond(
            BoolExpr::is0(bit_of("f", k)),
            Process::recv(
                q(lit(ack)),
                "y",
                Process::cond(
                    BoolExpr::nil(var("y")),
                    then(StrExpr::p0(var("g"))),
                    then(StrExpr::p1(var("g"))),
                ),
            ),
            then(StrExpr::p1(var("g"))),
        );
        defs.push(ProcDef::new(format!("Ack_{}", k + 1), &["f", "g"], body));
    }
    defs
}

/// Components in parallel with the shared memory and a clock. Component `i`
/// waits for a tick on `1^(i+1)` before each instruction and acknowledges on
/// `1^(i+1)·0`; its last acknowledgement, after `HALT`, is `1`.
pub fn encode_pram(p: &PramProgram) -> Result<Program, EncodeError> {
    let n = p.components.len();
    if n == 0 {
        return Err(EncodeError::Invalid("a PRAM needs at least one component".into()));
    }
    let mut defs = memory_defs();
    let mut keys = Vec::new();
    let mut parts = Vec::new();
    let (mut inputs, mut outputs) = (Vec::new(), Vec::new());
    for (idx, prog) in p.components.iter().enumerate() {
        prog.validate()?;
        let i = idx + 1;
        let tick = Word::ones(i + 1);
        let ack = tick.child(false);
        let comp = Component {
            acc: Word::zeros(i),
            reply: Word::from("1").concat(&Word::zeros(i)),
            clock: Some((tick.clone(), ack.clone())),
            output: format!("o{i}"),
            prefix: format!("J{i}_"),
        };
        keys.push((tick, ack));
        defs.extend(comp.defs(prog));
        inputs.push(format!("i{i}"));
        outputs.push(comp.output.clone());
        parts.push(Process::recv(
            Channel::input(&format!("i{i}")),
            "x",
            Process::par(
                Process::call(&comp.def_name(1), vec![]),
                Process::call("C", vec![lit(&comp.acc), var("x")]),
            ),
        ));
    }
    defs.extend(clock_defs(&keys));
    parts.push(Process::call("M", vec![lit(&Word::zeros(n))]));
    parts.push(Process::call("K", vec![lit(&Word::zeros(n))]));
    Ok(Program::new(inputs, outputs, defs, Process::par_all(parts))?)
}
