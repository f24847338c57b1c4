use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::machine::{apply, enabled_with, Action, Configuration};
use crate::proclang::Program;
use crate::word::Word;

pub type StateId = usize;

/// A finite labelled transition system. State 0 is initial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteLts {
    pub(crate) states: usize,
    pub(crate) transitions: Vec<(StateId, Action, StateId)>,
    /// States whose outgoing transitions were not (all) explored.
    pub(crate) truncated: Vec<bool>,
}

impl FiniteLts {
    pub fn new(states: usize) -> Self {
        assert!(states > 0, "an LTS has an initial state");
        FiniteLts {
            states,
            transitions: Vec::new(),
            truncated: vec![false; states],
        }
    }

    pub fn add_state(&mut self) -> StateId {
        self.states += 1;
        self.truncated.push(false);
        self.states - 1
    }

    pub fn add_transition(&mut self, from: StateId, action: Action, to: StateId) {
        assert!(from < self.states && to < self.states);
        self.transitions.push((from, action, to));
    }

    pub fn mark_truncated(&mut self, s: StateId) {
        self.truncated[s] = true;
    }

    pub fn initial(&self) -> StateId {
        0
    }

    pub fn num_states(&self) -> usize {
        self.states
    }

    pub fn transitions(&self) -> &[(StateId, Action, StateId)] {
        &self.transitions
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated.iter().any(|&t| t)
    }

    pub fn truncated_states(&self) -> Vec<StateId> {
        (0..self.states).filter(|&s| self.truncated[s]).collect()
    }

    pub fn successors(&self) -> Vec<Vec<(Action, StateId)>> {
        let mut out = vec![Vec::new(); self.states];
        for (s, a, t) in &self.transitions {
            out[*s].push((a.clone(), *t));
        }
        out
    }
}

impl fmt::Display for FiniteLts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states {} initial 0", self.states)?;
        for (s, a, t) in &self.transitions {
            writeln!(f, "{s} --{a}--> {t}")?;
        }
        for s in self.truncated_states() {
            writeln!(f, "truncated {s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExploreOptions {
    pub state_limit: usize,
    /// Visible transitions are not taken from states already this many
    /// visible actions deep. The result is the exact restriction of the LTS to
    /// traces of at most this many visible actions, not a truncation.
    pub visible_depth: Option<usize>,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions {
            state_limit: 10_000,
            visible_depth: None,
        }
    }
}

/// Breadth-first exploration of the machine from the program's initial
/// configuration. Every pending input branches over `input_words`.
pub fn explore_lts(prog: &Program, input_words: &[Word], opts: ExploreOptions) -> FiniteLts {
    let root = Configuration::initial(prog);
    let mut index: HashMap<(Configuration, usize), StateId> = HashMap::new();
    let mut lts = FiniteLts::new(1);
    index.insert((root.clone(), 0), 0);
    let mut queue = VecDeque::from([(root, 0usize, 0 as StateId)]);
    while let Some((c, depth, id)) = queue.pop_front() {
        let at_depth_limit = opts.visible_depth.is_some_and(|d| depth >= d);
        let cands = enabled_with(&c, |_| input_words.to_vec());
        for cand in cands {
            let mut next = c.clone();
            let Ok(rec) = apply(prog, &mut next, &cand) else {
                // a runtime error has no successor
                continue;
            };
            let visible = !rec.action.is_tau();
            if visible && at_depth_limit {
                continue;
            }
            let nd = depth + usize::from(visible && opts.visible_depth.is_some());
            let key = (next, nd);
            let target = match index.get(&key) {
                Some(&t) => t,
                None => {
                    if lts.states >= opts.state_limit {
                        lts.mark_truncated(id);
                        continue;
                    }
                    let t = lts.add_state();
                    index.insert(key.clone(), t);
                    queue.push_back((key.0, nd, t));
                    t
                }
            };
            lts.add_transition(id, rec.action, target);
        }
    }
    lts
}

/// A finite function table, the test domain of a functional behavior.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FunTable(pub BTreeMap<Word, Word>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("function table line {line}: {message}")]
pub struct FunTableError {
    pub line: usize,
    pub message: String,
}

impl FunTable {
    pub fn from_fn(domain: impl IntoIterator<Item = Word>, f: impl Fn(&Word) -> Word) -> Self {
        FunTable(domain.into_iter().map(|w| {
            let v = f(&w);
            (w, v)
        }).collect())
    }

    pub fn domain(&self) -> Vec<Word> {
        self.0.keys().cloned().collect()
    }

    pub fn get(&self, w: &Word) -> Option<&Word> {
        self.0.get(w)
    }

    /// Lines `<word> -> <word>`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, FunTableError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let err = |message: String| FunTableError {
                line: i + 1,
                message,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (a, b) = line
                .split_once("->")
                .ok_or_else(|| err("expected `<word> -> <word>`".into()))?;
            let a = Word::parse_token(a.trim()).map_err(|e| err(e.to_string()))?;
            let b = Word::parse_token(b.trim()).map_err(|e| err(e.to_string()))?;
            if map.insert(a.clone(), b).is_some() {
                return Err(err(format!("{} listed twice", a.quoted())));
            }
        }
        Ok(FunTable(map))
    }
}

impl fmt::Display for FunTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, b) in &self.0 {
            writeln!(f, "{} -> {}", a.quoted(), b.quoted())?;
        }
        Ok(())
    }
}

/// `i(x).o<f(x)>` restricted to the table's domain.
pub fn functional_lts(t: &FunTable) -> FiniteLts {
    functional_lts_on(t, "i", "o")
}

pub fn functional_lts_on(t: &FunTable, input: &str, output: &str) -> FiniteLts {
    let mut lts = FiniteLts::new(1);
    for (w, v) in &t.0 {
        let mid = lts.add_state();
        let end = lts.add_state();
        lts.add_transition(
            0,
            Action::Input {
                channel: input.into(),
                word: w.clone(),
            },
            mid,
        );
        lts.add_transition(
            mid,
            Action::Output {
                channel: output.into(),
                word: v.clone(),
            },
            end,
        );
    }
    lts
}
