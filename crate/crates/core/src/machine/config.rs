use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::proclang::{Environment, Process, Program};
use crate::word::Word;

/// `(P, M)` at some tag; the tag is the key in [`Configuration::procs`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProcessorState {
    pub process: Arc<Process>,
    pub env: Environment,
}

/// Processors keyed by tag, plus the queue function. Keys whose queue is empty
/// are never stored, so structural equality is configuration equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub(crate) procs: BTreeMap<Word, ProcessorState>,
    pub(crate) queues: BTreeMap<Word, VecDeque<Word>>,
    pub(crate) size: u64,
}

impl Configuration {
    pub fn initial(prog: &Program) -> Self {
        let mut procs = BTreeMap::new();
        procs.insert(
            Word::empty(),
            ProcessorState {
                process: prog.main().clone(),
                env: Environment::new(),
            },
        );
        Configuration {
            procs,
            queues: BTreeMap::new(),
            size: 0,
        }
    }

    /// Builds a configuration directly; used by tests and tools that start
    /// from an intermediate state.
    pub fn from_parts(
        procs: impl IntoIterator<Item = (Word, ProcessorState)>,
        queues: impl IntoIterator<Item = (Word, Vec<Word>)>,
    ) -> Self {
        let procs: BTreeMap<_, _> = procs.into_iter().collect();
        let queues: BTreeMap<_, VecDeque<Word>> = queues
            .into_iter()
            .filter(|(_, q)| !q.is_empty())
            .map(|(k, q)| (k, q.into()))
            .collect();
        let mut c = Configuration {
            procs,
            queues,
            size: 0,
        };
        c.size = c.recompute_size();
        c
    }

    pub fn processors(&self) -> &BTreeMap<Word, ProcessorState> {
        &self.procs
    }

    pub fn queues(&self) -> &BTreeMap<Word, VecDeque<Word>> {
        &self.queues
    }

    pub fn queue(&self, key: &Word) -> Option<&VecDeque<Word>> {
        self.queues.get(key)
    }

    pub fn is_empty(&self) -> bool {
        self.procs.is_empty() && self.queues.is_empty()
    }

    /// `|C|`: queue contents' total length plus every environment's size.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub(crate) fn recompute_size(&self) -> u64 {
        let q: u64 = self
            .queues
            .values()
            .flat_map(|q| q.iter())
            .map(|w| w.len() as u64)
            .sum();
        q + self.procs.values().map(|s| s.env.size()).sum::<u64>()
    }

    /// No tag is a prefix of another.
    pub fn tags_incompatible(&self) -> bool {
        let tags: Vec<&Word> = self.procs.keys().collect();
        tags.iter().enumerate().all(|(i, a)| {
            tags.iter()
                .enumerate()
                .all(|(j, b)| i == j || !a.is_prefix_of(b))
        })
    }
}

pub fn config_size(c: &Configuration) -> u64 {
    c.size()
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (tag, st) in &self.procs {
            let env: Vec<String> = st.env.iter().map(|(k, v)| format!("{k}={}", v.quoted())).collect();
            writeln!(f, "proc {} {{{}}} {}", tag.quoted(), env.join(", "), st.process)?;
        }
        for (k, q) in &self.queues {
            let ws: Vec<String> = q.iter().map(Word::quoted).collect();
            writeln!(f, "queue {} [{}]", k.quoted(), ws.join(", "))?;
        }
        Ok(())
    }
}
