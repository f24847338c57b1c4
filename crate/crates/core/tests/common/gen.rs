//! Random closed programs exercising every construct: parallel composition,
//! internal queues on literal and computed keys, external input and output,
//! conditionals and calls.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use procmachine::machine::ScriptedInput;
use procmachine::proclang::{BoolExpr, Channel, ProcDef, Process, Program, StrExpr};
use procmachine::Word;

pub struct Gen {
    rng: ChaCha8Rng,
    fresh: usize,
    /// Whether `Tail` may appear; it can fail at run time on `ε`.
    pub allow_tail: bool,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: rng(seed),
            fresh: 0,
            allow_tail: true,
        }
    }

    fn word(&mut self, max: usize) -> Word {
        let len = self.rng.gen_range(0..=max);
        Word::from_bits((0..len).map(|_| self.rng.gen_bool(0.5)))
    }

    fn expr(&mut self, scope: &[String], depth: usize) -> StrExpr {
        let pick = self.rng.gen_range(0..if depth == 0 { 2 } else { 5 });
        match pick {
            0 if !scope.is_empty() => StrExpr::var(&scope[self.rng.gen_range(0..scope.len())]),
            0 | 1 => StrExpr::Lit(self.word(3)),
            2 => StrExpr::p0(self.expr(scope, depth - 1)),
            3 => StrExpr::p1(self.expr(scope, depth - 1)),
            _ if self.allow_tail => StrExpr::tl(self.expr(scope, depth - 1)),
            _ => StrExpr::p1(self.expr(scope, depth - 1)),
        }
    }

    fn boolean(&mut self, scope: &[String]) -> BoolExpr {
        match self.rng.gen_range(0..4) {
            0 => BoolExpr::True,
            1 => BoolExpr::False,
            2 => BoolExpr::is0(self.expr(scope, 2)),
            _ => BoolExpr::nil(self.expr(scope, 2)),
        }
    }

    /// Keys are short so that senders and receivers meet.
    fn key(&mut self, scope: &[String]) -> StrExpr {
        if self.rng.gen_bool(0.8) || scope.is_empty() {
            StrExpr::Lit(self.word(1))
        } else {
            StrExpr::p1(StrExpr::var(&scope[self.rng.gen_range(0..scope.len())]))
        }
    }

    fn binder(&mut self) -> String {
        self.fresh += 1;
        format!("x{}", self.fresh)
    }

    pub fn process(&mut self, scope: &mut Vec<String>, budget: usize, call: Option<&str>) -> Process {
        if budget == 0 {
            return Process::nil();
        }
        let b = budget - 1;
        match self.rng.gen_range(0..9) {
            0 => Process::nil(),
            1 => {
                let e = self.expr(scope, 2);
                Process::send(Channel::output("o"), e, self.process(scope, b, call))
            }
            2 => {
                let x = self.binder();
                scope.push(x.clone());
                let p = self.process(scope, b, call);
                scope.pop();
                Process::recv(Channel::input("i"), &x, p)
            }
            3 => {
                let (k, e) = (self.key(scope), self.expr(scope, 2));
                Process::send(Channel::queue(k), e, self.process(scope, b, call))
            }
            4 => {
                let k = self.key(scope);
                let x = self.binder();
                scope.push(x.clone());
                let p = self.process(scope, b, call);
                scope.pop();
                Process::recv(Channel::queue(k), &x, p)
            }
            5 => {
                let c = self.boolean(scope);
                Process::cond(c, self.process(scope, b / 2, call), self.process(scope, b / 2, call))
            }
            6 | 7 => Process::par(self.process(scope, b / 2, call), self.process(scope, b / 2, call)),
            _ => match call {
                Some(name) => {
                    let arg = self.expr(scope, 2);
                    Process::call(name, vec![arg])
                }
                None => Process::nil(),
            },
        }
    }

    /// A program over `input i; output o;` with one unary definition `D`.
    pub fn program(&mut self, budget: usize) -> Program {
        let mut scope = vec!["y".to_string()];
        // D may call itself; runs are cut by the step limit
        let body = self.process(&mut scope, budget / 2, Some("D"));
        let main = self.process(&mut Vec::new(), budget, Some("D"));
        Program::new(["i"], ["o"], vec![ProcDef::new("D", &["y"], body)], main).expect("generated programs are closed")
    }

    pub fn script(&mut self, words: usize) -> ScriptedInput {
        let mut s = ScriptedInput::new();
        for _ in 0..words {
            let w = self.word(3);
            s.push("i", w);
        }
        s
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}
