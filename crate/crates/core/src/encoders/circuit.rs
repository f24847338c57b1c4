use std::collections::BTreeMap;
use std::fmt;

use super::{code_width, spec_lines, EncodeError};
use crate::proclang::{BoolExpr, Channel, ProcDef, Process, Program, StrExpr};
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    And(usize, usize),
    Or(usize, usize),
    Not(usize),
}

impl Gate {
    pub fn operands(&self) -> Vec<usize> {
        match *self {
            Gate::And(a, b) | Gate::Or(a, b) => vec![a, b],
            Gate::Not(a) => vec![a],
        }
    }
}

/// Wires `0..inputs` carry the inputs; gate `g` drives wire `inputs + g` and
/// may only read lower wires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitSpec {
    pub inputs: usize,
    pub gates: Vec<Gate>,
    pub outputs: Vec<usize>,
}

impl CircuitSpec {
    pub fn wires(&self) -> usize {
        self.inputs + self.gates.len()
    }

    pub fn validate(&self) -> Result<(), EncodeError> {
        for (g, gate) in self.gates.iter().enumerate() {
            let w = self.inputs + g;
            if gate.operands().iter().any(|&a| a >= w) {
                return Err(EncodeError::Invalid(format!("gate {g} reads a wire that is not below it")));
            }
        }
        if let Some(o) = self.outputs.iter().find(|&&o| o >= self.wires()) {
            return Err(EncodeError::Invalid(format!("output wire {o} is not driven")));
        }
        Ok(())
    }

    /// Evaluates the circuit directly.
    pub fn eval(&self, input: &[bool]) -> Vec<bool> {
        let mut w = input.to_vec();
        for g in &self.gates {
            let v = match *g {
                Gate::And(a, b) => w[a] && w[b],
                Gate::Or(a, b) => w[a] || w[b],
                Gate::Not(a) => !w[a],
            };
            w.push(v);
        }
        self.outputs.iter().map(|&o| w[o]).collect()
    }

    /// `inputs: a b`, one `gate: w = and|or x y` or `gate: w = not x` per
    /// gate in order, and `outputs: w …`.
    pub fn parse(text: &str) -> Result<Self, EncodeError> {
        let mut names: BTreeMap<String, usize> = BTreeMap::new();
        let mut c = CircuitSpec {
            inputs: 0,
            gates: Vec::new(),
            outputs: Vec::new(),
        };
        for (line, key, rest) in spec_lines(text)? {
            let syn = |m: String| EncodeError::Syntax { line, message: m };
            let toks: Vec<&str> = rest.split_whitespace().collect();
            let wire = |n: &str, names: &BTreeMap<String, usize>| {
                names.get(n).copied().ok_or_else(|| syn(format!("unknown wire `{n}`")))
            };
            match key {
                "inputs" => {
                    if !c.gates.is_empty() {
                        return Err(syn("inputs must come before gates".into()));
                    }
                    for t in toks {
                        let id = names.len();
                        if names.insert(t.to_string(), id).is_some() {
                            return Err(syn(format!("wire `{t}` declared twice")));
                        }
                        c.inputs += 1;
                    }
                }
                "gate" => {
                    let g = match toks[..] {
                        [_, "=", "and", a, b] => Gate::And(wire(a, &names)?, wire(b, &names)?),
                        [_, "=", "or", a, b] => Gate::Or(wire(a, &names)?, wire(b, &names)?),
                        [_, "=", "not", a] => Gate::Not(wire(a, &names)?),
                        _ => return Err(syn("expected `gate: w = and|or x y` or `gate: w = not x`".into())),
                    };
                    let id = names.len();
                    if names.insert(toks[0].to_string(), id).is_some() {
                        return Err(syn(format!("wire `{}` declared twice", toks[0])));
                    }
                    c.gates.push(g);
                }
                "outputs" => {
                    for t in toks {
                        c.outputs.push(wire(t, &names)?);
                    }
                }
                _ => return Err(syn(format!("unknown key `{key}`"))),
            }
        }
        c.validate()?;
        Ok(c)
    }
}

impl fmt::Display for CircuitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |w: usize| format!("w{w}");
        let ins: Vec<String> = (0..self.inputs).map(name).collect();
        writeln!(f, "inputs: {}", ins.join(" "))?;
        for (g, gate) in self.gates.iter().enumerate() {
            let w = name(self.inputs + g);
            match *gate {
                Gate::And(a, b) => writeln!(f, "gate: {w} = and {} {}", name(a), name(b))?,
                Gate::Or(a, b) => writeln!(f, "gate: {w} = or {} {}", name(a), name(b))?,
                Gate::Not(a) => writeln!(f, "gate: {w} = not {}", name(a))?,
            }
        }
        let outs: Vec<String> = self.outputs.iter().map(|&o| name(o)).collect();
        writeln!(f, "outputs: {}", outs.join(" "))
    }
}

fn var(n: &str) -> StrExpr {
    StrExpr::var(n)
}

/// Input `k` is read from `i<k+1>` and output `k` written to `o<k+1>`, one
/// bit each. A word starting with `1` is a one; anything else is a zero.
/// Every use of a wire gets its own queue, keyed `1·wire·use` in fixed width.
pub fn encode_circuit(c: &CircuitSpec) -> Result<Program, EncodeError> {
    c.validate()?;
    let wires = c.wires();
    // consumers of each wire: gate reads first, then outputs
    let mut uses: Vec<Vec<Option<usize>>> = vec![Vec::new(); wires];
    let mut gate_keys: Vec<Vec<Word>> = vec![Vec::new(); c.gates.len()];
    let max_uses = {
        let mut count = vec![0usize; wires];
        for g in &c.gates {
            for a in g.operands() {
                count[a] += 1;
            }
        }
        for &o in &c.outputs {
            count[o] += 1;
        }
        count.into_iter().max().unwrap_or(1)
    };
    let (ww, uw) = (code_width(wires), code_width(max_uses));
    let key = |w: usize, u: usize| {
        Word::from("1")
            .concat(&Word::fixed_width(w, ww))
            .concat(&Word::fixed_width(u, uw))
    };
    for (g, gate) in c.gates.iter().enumerate() {
        for a in gate.operands() {
            gate_keys[g].push(key(a, uses[a].len()));
            uses[a].push(None);
        }
    }
    for (k, &o) in c.outputs.iter().enumerate() {
        uses[o].push(Some(k));
    }
    let mut defs = Vec::new();
    for (w, us) in uses.iter().enumerate() {
        let sends: Vec<Process> = us
            .iter()
            .enumerate()
            .map(|(u, out)| {
                let ch = match out {
                    Some(k) => Channel::output(&format!("o{}", k + 1)),
                    None => Channel::queue(StrExpr::Lit(key(w, u))),
                };
                Process::send(ch, var("v"), Process::nil())
            })
            .collect();
        defs.push(ProcDef::new(format!("W{w}"), &["v"], Process::par_all(sends)));
    }
    let drive = |w: usize, bit: &str| Process::call(&format!("W{w}"), vec![StrExpr::lit(bit)]);
    let mut parts = Vec::new();
    for k in 0..c.inputs {
        parts.push(Process::recv(
            Channel::input(&format!("i{}", k + 1)),
            "x",
            Process::cond(
                BoolExpr::nil(var("x")),
                drive(k, "0"),
                Process::cond(BoolExpr::is0(var("x")), drive(k, "0"), drive(k, "1")),
            ),
        ));
    }
    for (g, gate) in c.gates.iter().enumerate() {
        let w = c.inputs + g;
        let keys = &gate_keys[g];
        let body = match gate {
            Gate::And(..) => Process::cond(
                BoolExpr::is0(var("x")),
                drive(w, "0"),
                Process::cond(BoolExpr::is0(var("y")), drive(w, "0"), drive(w, "1")),
            ),
            Gate::Or(..) => Process::cond(
                BoolExpr::is0(var("x")),
                Process::cond(BoolExpr::is0(var("y")), drive(w, "0"), drive(w, "1")),
                drive(w, "1"),
            ),
            Gate::Not(_) => Process::cond(BoolExpr::is0(var("x")), drive(w, "1"), drive(w, "0")),
        };
        let body = if keys.len() == 2 {
            Process::recv(Channel::queue(StrExpr::Lit(keys[1].clone())), "y", body)
        } else {
            body
        };
        parts.push(Process::recv(Channel::queue(StrExpr::Lit(keys[0].clone())), "x", body));
    }
    let inputs: Vec<String> = (1..=c.inputs).map(|k| format!("i{k}")).collect();
    let outputs: Vec<String> = (1..=c.outputs.len()).map(|k| format!("o{k}")).collect();
    Ok(Program::new(inputs, outputs, defs, Process::par_all(parts))?)
}
