//! Direct simulators for the machine models, written against the textual
//! semantics rather than the encoders.

use std::collections::HashMap;

use procmachine::encoders::{AtmSpec, Move, Polarity, RamInstr, RamProgram, Sym, TmSpec};
use procmachine::Word;

/// A tape over {0,1}, finite to the left, blank beyond its last cell.
#[derive(Clone, Debug)]
struct Tape {
    cells: Vec<bool>,
    head: usize,
}

impl Tape {
    fn new(input: &Word) -> Self {
        Tape {
            cells: input.iter().collect(),
            head: 0,
        }
    }

    fn read(&self) -> Sym {
        match self.cells.get(self.head) {
            Some(&b) => Sym::from_bit(b),
            None => Sym::Blank,
        }
    }

    /// `false` when the step has no defined outcome: moving off the left
    /// end, or blanking a cell with symbols to its right.
    fn step(&mut self, write: Sym, mv: Move) -> bool {
        match write.bit() {
            Some(b) if self.head == self.cells.len() => self.cells.push(b),
            Some(b) => self.cells[self.head] = b,
            None if self.head >= self.cells.len() => {}
            None if self.head + 1 == self.cells.len() => {
                self.cells.pop();
            }
            None => return false,
        }
        match mv {
            Move::L if self.head == 0 => false,
            Move::L => {
                self.head -= 1;
                true
            }
            Move::R => {
                self.head += 1;
                true
            }
        }
    }

    fn rest_from_head(&self) -> Word {
        Word::from_bits(self.cells.get(self.head..).unwrap_or(&[]).iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TmOutcome {
    /// The tape from the head rightwards on halting; `None` when the machine
    /// gets stuck.
    pub output: Option<Word>,
    /// Transitions taken, plus one for the halting step.
    pub steps: u64,
}

pub fn simulate_tm(m: &TmSpec, input: &Word, fuel: u64) -> TmOutcome {
    let mut tape = Tape::new(input);
    let mut state = m.initial;
    let mut taken = 0;
    while taken < fuel {
        if m.halting.contains(&state) {
            return TmOutcome {
                output: Some(tape.rest_from_head()),
                steps: taken + 1,
            };
        }
        let Some(&(next, write, mv)) = m.trans.get(&(state, tape.read())) else {
            break;
        };
        taken += 1;
        if !tape.step(write, mv) {
            break;
        }
        state = next;
    }
    TmOutcome {
        output: None,
        steps: taken + 1,
    }
}

/// Accepts or rejects by recursive evaluation of the computation tree;
/// `None` if some branch gets stuck.
pub fn eval_atm(m: &AtmSpec, input: &Word) -> Option<bool> {
    fn go(m: &AtmSpec, state: usize, tape: Tape, fuel: usize) -> Option<bool> {
        match m.polarity[state] {
            Polarity::Accepting => return Some(true),
            Polarity::Rejecting => return Some(false),
            _ if fuel == 0 => return None,
            _ => {}
        }
        let mut answers = [false; 2];
        for (k, branch) in [false, true].into_iter().enumerate() {
            let &(next, write, mv) = m.trans.get(&(state, tape.read(), branch))?;
            let mut t = tape.clone();
            if !t.step(write, mv) {
                return None;
            }
            answers[k] = go(m, next, t, fuel - 1)?;
        }
        Some(match m.polarity[state] {
            Polarity::Existential => answers[0] || answers[1],
            _ => answers[0] && answers[1],
        })
    }
    go(m, m.initial, Tape::new(input), 1000)
}

/// Runs a RAM on its input (placed in the accumulator) and returns the
/// accumulator on HALT. Memory is keyed by words; address `k` is `0^k`.
pub fn run_ram(p: &RamProgram, input: &Word, fuel: usize) -> Option<Word> {
    let mut mem: HashMap<Word, Word> = HashMap::new();
    let acc = Word::empty();
    mem.insert(acc.clone(), input.clone());
    let get = |mem: &HashMap<Word, Word>, k: &Word| mem.get(k).cloned().unwrap_or_default();
    let mut pc = 1;
    for _ in 0..fuel {
        let a = get(&mem, &acc);
        match p.instrs[pc - 1] {
            RamInstr::Load(k) => {
                let v = get(&mem, &Word::zeros(k));
                mem.insert(acc.clone(), v);
            }
            RamInstr::LoadI(k) => {
                let at = get(&mem, &Word::zeros(k));
                let v = get(&mem, &at);
                mem.insert(acc.clone(), v);
            }
            RamInstr::Store(k) => {
                mem.insert(Word::zeros(k), a);
            }
            RamInstr::StoreI(k) => {
                let at = get(&mem, &Word::zeros(k));
                mem.insert(at, a);
            }
            RamInstr::Inc => {
                mem.insert(acc.clone(), a.with_prefix_bit(false));
            }
            RamInstr::Dec => {
                let rest = Word::from_bits(a.iter().skip(1));
                mem.insert(acc.clone(), rest);
            }
            RamInstr::JZero(t) if a.first() != Some(false) => {
                pc = t;
                continue;
            }
            RamInstr::JZero(_) => {}
            RamInstr::Jump(t) => {
                pc = t;
                continue;
            }
            RamInstr::Halt => return Some(a),
        }
        pc += 1;
    }
    None
}

/// Number of configurations in the computation tree of an ATM that does not
/// get stuck, final ones included.
pub fn atm_tree_size(m: &AtmSpec, input: &Word) -> usize {
    fn go(m: &AtmSpec, state: usize, tape: Tape) -> usize {
        if m.polarity[state].is_final() {
            return 1;
        }
        let mut n = 1;
        for branch in [false, true] {
            let &(next, write, mv) = &m.trans[&(state, tape.read(), branch)];
            let mut t = tape.clone();
            assert!(t.step(write, mv), "the machine does not get stuck");
            n += go(m, next, t);
        }
        n
    }
    go(m, m.initial, Tape::new(input))
}
