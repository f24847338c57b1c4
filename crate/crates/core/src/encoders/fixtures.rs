//! Ready-made machines and prefix tables used by the tests, the CLI and the
//! examples.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use super::{
    dispatch_expr, AtmSpec, CircuitSpec, EncodeError, Gate, Move, Polarity, PramProgram, RamInstr,
    RamProgram, RtmSpec, RtmTransition, Sym, TmSpec,
};
use crate::proclang::{BoolExpr, Channel, ProcDef, Process, Program, StrExpr};
use crate::word::Word;

/// Binary increment, least significant bit first. The first cell is left
/// holding a `0` whenever a carry has to travel, which lets the machine find
/// its way back without a left-end marker.
pub fn inc_tm() -> TmSpec {
    use Move::{L, R};
    use Sym::{Blank as B, One as I, Zero as O};
    TmSpec::new(
        &["start", "fix", "scan", "back", "halt"],
        "start",
        &["halt"],
        &[
            ("start", B, "fix", I, R),
            ("start", O, "fix", I, R),
            ("start", I, "scan", O, R),
            ("fix", O, "halt", O, L),
            ("fix", I, "halt", I, L),
            ("fix", B, "halt", B, L),
            ("scan", I, "scan", I, R),
            ("scan", O, "back", I, L),
            ("scan", B, "back", I, L),
            ("back", I, "back", O, L),
            ("back", O, "fix", O, R),
        ],
    )
    .expect("increment machine is well formed")
}

/// Palindrome recognition for inputs of length at most `max_len`, output `ε`
/// for yes and a nonempty word for no. The input is remembered in the finite
/// control: on this tape a machine that has walked right can never locate the
/// left end again, so it cannot compare the two ends by shuttling.
pub fn palindrome_tm(max_len: usize) -> TmSpec {
    let name = |w: &Word| format!("q{}", w.to_bit_string());
    let mut words = vec![Word::empty()];
    for len in 1..=max_len {
        words.extend((0..1usize << len).map(|v| Word::fixed_width(v, len)));
    }
    let mut states: Vec<String> = words.iter().map(name).collect();
    states.push("halt".into());
    let index: BTreeMap<&str, usize> = states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let halt = states.len() - 1;
    let mut trans = BTreeMap::new();
    for w in &words {
        let s = index[name(w).as_str()];
        if w.len() < max_len {
            for bit in [false, true] {
                let t = index[name(&w.child(bit)).as_str()];
                trans.insert((s, Sym::from_bit(bit)), (t, Sym::from_bit(bit), Move::R));
            }
        }
        let verdict = if w.is_palindrome() {
            (halt, Sym::Zero, Move::R)
        } else {
            (halt, Sym::One, Move::L)
        };
        trans.insert((s, Sym::Blank), verdict);
    }
    let m = TmSpec {
        states,
        initial: 0,
        halting: BTreeSet::from([halt]),
        trans,
    };
    m.validate().expect("palindrome machine is well formed");
    m
}

/// A balanced AND-OR tree over the first `2^depth` tape cells: level `k`
/// below the root is universal for even `k` and existential otherwise.
/// Branch 0 descends into the left half, branch 1 walks right into the
/// other half; a leaf accepts on `1` and rejects on `0` or blank. Moving
/// states are universal with an accepting second branch, so they pass the
/// value of their first branch through without doubling the tree.
pub fn and_or_atm(depth: usize) -> AtmSpec {
    assert!(depth >= 1, "the tree needs at least one level");
    let mut states: Vec<String> = Vec::new();
    let mut polarity = Vec::new();
    let mut add = |name: String, p: Polarity| {
        states.push(name);
        polarity.push(p);
        states.len() - 1
    };
    let accept = add("acc".into(), Polarity::Accepting);
    let reject = add("rej".into(), Polarity::Rejecting);
    let leaf = add("leaf".into(), Polarity::Universal);
    let nodes: Vec<usize> = (0..depth)
        .map(|k| {
            let p = if k % 2 == 0 { Polarity::Universal } else { Polarity::Existential };
            add(format!("n{k}"), p)
        })
        .collect();
    let below = |k: usize| if k + 1 == depth { leaf } else { nodes[k + 1] };
    // the left child sits on the same cell: step right and back
    let lefts: Vec<usize> = (0..depth).map(|k| add(format!("l{k}"), Polarity::Universal)).collect();
    // walks[k][j - 1]: j more cells to the right before entering level k+1
    let walks: Vec<Vec<usize>> = (0..depth)
        .map(|k| {
            let span = 1usize << (depth - k - 1);
            (1..span).map(|j| add(format!("w{k}_{j}"), Polarity::Universal)).collect()
        })
        .collect();
    let mut trans = BTreeMap::new();
    let mut both = |s: usize, a: Sym, t0: (usize, Sym, Move), t1: (usize, Sym, Move)| {
        trans.insert((s, a, false), t0);
        trans.insert((s, a, true), t1);
    };
    // blanks are overwritten with 0 so that right moves stay legal
    let keep = |a: Sym| if a == Sym::Blank { Sym::Zero } else { a };
    let syms = [Sym::Blank, Sym::Zero, Sym::One];
    for a in syms {
        let verdict = if a == Sym::One { accept } else { reject };
        both(leaf, a, (verdict, keep(a), Move::R), (verdict, keep(a), Move::R));
        for k in 0..depth {
            let span = 1usize << (depth - k - 1);
            let right = if span == 1 { below(k) } else { walks[k][span - 2] };
            both(nodes[k], a, (lefts[k], keep(a), Move::R), (right, keep(a), Move::R));
            both(lefts[k], a, (below(k), keep(a), Move::L), (accept, keep(a), Move::R));
            for j in 1..span {
                let next = if j == 1 { below(k) } else { walks[k][j - 2] };
                both(walks[k][j - 1], a, (next, keep(a), Move::R), (accept, keep(a), Move::R));
            }
        }
    }
    let m = AtmSpec {
        states,
        polarity,
        initial: nodes[0],
        trans,
    };
    m.validate().expect("AND-OR machine is well formed");
    m
}

/// Value of the tree [`and_or_atm`] decides, evaluated directly.
pub fn and_or_value(depth: usize, leaves: &[bool]) -> bool {
    fn node(k: usize, depth: usize, leaves: &[bool]) -> bool {
        if k == depth {
            return leaves.first().copied().unwrap_or(false);
        }
        let half = 1usize << (depth - k - 1);
        let left = node(k + 1, depth, &leaves[..half.min(leaves.len())]);
        let right = node(k + 1, depth, leaves.get(half..).unwrap_or(&[]));
        if k.is_multiple_of(2) {
            left && right
        } else {
            left || right
        }
    }
    node(0, depth, leaves)
}

/// Adds `0^a` and `0^b` given as `0^a 1 0^b`, leaving `0^(a+b)`. Cell 1
/// counts `a`, cell 2 holds the rest of the input and then the sum.
pub fn unary_add_ram() -> RamProgram {
    use RamInstr::*;
    RamProgram::new(vec![
        JZero(9),
        Dec,
        Store(2),
        Load(1),
        Inc,
        Store(1),
        Load(2),
        Jump(1),
        Dec,
        Store(2),
        Load(1),
        JZero(20),
        Dec,
        Store(1),
        Load(2),
        Inc,
        Store(2),
        Load(1),
        Jump(12),
        Load(2),
        Halt,
    ])
    .expect("adder program is well formed")
}

/// Two components that output their own input, after one and two idle
/// instructions respectively, so that one halts while the other still runs.
pub fn echo_pram() -> PramProgram {
    use RamInstr::*;
    let first = RamProgram::new(vec![Jump(2), Halt]).expect("well formed");
    let second = RamProgram::new(vec![Jump(2), Jump(3), Halt]).expect("well formed");
    PramProgram::new(vec![first, second]).expect("well formed")
}

/// Two-bit adder, least significant bit first: inputs `a0 a1 b0 b1`,
/// outputs `s0 s1 carry`.
pub fn adder_circuit() -> CircuitSpec {
    use Gate::*;
    let c = CircuitSpec {
        inputs: 4,
        gates: vec![
            Or(0, 2),   // 4
            And(0, 2),  // 5: carry out of bit 0
            Not(5),     // 6
            And(4, 6),  // 7: s0
            Or(1, 3),   // 8
            And(1, 3),  // 9
            Not(9),     // 10
            And(8, 10), // 11: a1 xor b1
            Or(11, 5),  // 12
            And(11, 5), // 13
            Not(13),    // 14
            And(12, 14), // 15: s1
            Or(9, 13),  // 16: carry
        ],
        outputs: vec![7, 15, 16],
    };
    c.validate().expect("adder circuit is well formed");
    c
}

fn rtm(states: &[&str], actions: &[&str], data: &[&str], trans: &[(&str, &str, &str, &str, Move, &str)]) -> RtmSpec {
    let pos = |names: &[&str], n: &str| names.iter().position(|x| *x == n).expect("declared name");
    let datum = |d: &str| (d != "_").then(|| pos(data, d));
    let m = RtmSpec {
        states: states.iter().map(|s| s.to_string()).collect(),
        actions: actions.iter().map(|s| s.to_string()).collect(),
        data: data.iter().map(|s| s.to_string()).collect(),
        trans: trans
            .iter()
            .map(|&(from, act, read, write, mv, to)| RtmTransition {
                from: pos(states, from),
                action: (act != "tau").then(|| pos(actions, act)),
                read: datum(read),
                write: datum(write),
                mv,
                to: pos(states, to),
            })
            .collect(),
        initial: 0,
    };
    m.validate().expect("reactive machine is well formed");
    m
}

/// Marks its first cell silently, then alternates `a` and `b` while the head
/// shuttles between the first two cells.
pub fn toggle_rtm() -> RtmSpec {
    rtm(
        &["p", "q", "r"],
        &["a", "b"],
        &["x"],
        &[
            ("p", "tau", "_", "x", Move::R, "q"),
            ("q", "a", "_", "_", Move::L, "r"),
            ("r", "b", "x", "x", Move::R, "q"),
        ],
    )
}

/// Emits `a` forever while walking right over blanks.
pub fn loop_rtm() -> RtmSpec {
    rtm(&["p"], &["a"], &[], &[("p", "a", "_", "_", Move::R, "p")])
}

/// `main := i?x.o!x.0`.
pub fn identity_program() -> Program {
    Program::new(
        ["i"],
        ["o"],
        Vec::new(),
        Process::recv(
            Channel::input("i"),
            "x",
            Process::send(Channel::output("o"), StrExpr::var("x"), Process::nil()),
        ),
    )
    .expect("identity is well formed")
}

/// A string function on all words up to length `depth`, given by its table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixTable {
    pub depth: usize,
    pub map: BTreeMap<Word, Word>,
}

/// All words of length at most `depth`, shortest first.
pub fn words_up_to(depth: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    for len in 1..=depth {
        out.extend((0..1usize << len).map(|v| Word::fixed_width(v, len)));
    }
    out
}

fn parent(s: &Word) -> Word {
    Word::from_bits(s.iter().take(s.len().saturating_sub(1)))
}

impl PrefixTable {
    pub fn from_fn(depth: usize, f: impl Fn(&Word) -> Word) -> Self {
        let map = words_up_to(depth).into_iter().map(|s| (s.clone(), f(&s))).collect();
        PrefixTable { depth, map }
    }

    pub fn identity(depth: usize) -> Self {
        Self::from_fn(depth, Word::clone)
    }

    pub fn prepend_one(depth: usize) -> Self {
        Self::from_fn(depth, |s| s.clone().with_prefix_bit(true))
    }

    /// Grows every entry from its parent's by a random suffix of length at
    /// most 2.
    pub fn random_monotone(depth: usize, rng: &mut impl Rng) -> Self {
        let mut map: BTreeMap<Word, Word> = BTreeMap::new();
        for s in words_up_to(depth) {
            let base = if s.is_empty() { Word::empty() } else { map[&parent(&s)].clone() };
            let len = rng.gen_range(0..=2);
            let suffix = Word::from_bits((0..len).map(|_| rng.gen_bool(0.5)));
            map.insert(s, base.concat(&suffix));
        }
        PrefixTable { depth, map }
    }

    pub fn get(&self, s: &Word) -> Option<&Word> {
        self.map.get(s)
    }

    /// `h(s)` extends `h(s')` whenever `s` extends `s'`.
    pub fn is_monotone(&self) -> bool {
        self.map
            .iter()
            .filter(|(s, _)| !s.is_empty())
            .all(|(s, h)| self.map[&parent(s)].is_prefix_of(h))
    }

    /// What the online behavior emits after reading `s`: `h(ε)` at the start,
    /// then the growth of `h` from the previous prefix.
    pub fn diff(&self, s: &Word) -> Option<Word> {
        let h = self.map.get(s)?;
        if s.is_empty() {
            return Some(h.clone());
        }
        self.map[&parent(s)].strip_from(h)
    }

    /// `i?x.F<x>`, answering `h(x)` and nothing for inputs off the table.
    pub fn functional_program(&self) -> Program {
        let table: BTreeMap<Word, Process> = self
            .map
            .iter()
            .map(|(s, h)| (s.clone(), Process::send(Channel::output("o"), StrExpr::Lit(h.clone()), Process::nil())))
            .collect();
        let f = ProcDef::new("F", &["x"], dispatch_expr(&StrExpr::var("x"), &table, &Process::nil()));
        Program::new(
            ["i"],
            ["o"],
            vec![f],
            Process::recv(Channel::input("i"), "x", Process::call("F", vec![StrExpr::var("x")])),
        )
        .expect("table program is well formed")
    }

    /// `X<ε>`, where `X(rs)` holds the input so far reversed, emits the
    /// difference for it and waits for the next bit (`ε` for 0).
    pub fn online_program(&self) -> Result<Program, EncodeError> {
        if !self.is_monotone() {
            return Err(EncodeError::Invalid("online behavior needs a monotone table".into()));
        }
        let rs = || StrExpr::var("rs");
        let next = |b: bool| Process::call("X", vec![StrExpr::prepend(b, rs())]);
        let table: BTreeMap<Word, Process> = self
            .map
            .keys()
            .map(|s| {
                let d = self.diff(s).expect("monotone");
                let body = Process::send(
                    Channel::output("o"),
                    StrExpr::Lit(d),
                    Process::recv(
                        Channel::input("i"),
                        "y",
                        Process::cond(BoolExpr::nil(StrExpr::var("y")), next(false), next(true)),
                    ),
                );
                (s.reversed(), body)
            })
            .collect();
        let x = ProcDef::new("X", &["rs"], dispatch_expr(&rs(), &table, &Process::nil()));
        Ok(Program::new(["i"], ["o"], vec![x], Process::call("X", vec![StrExpr::eps()]))?)
    }
}
