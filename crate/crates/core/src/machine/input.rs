use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::word::Word;

/// The environment's side of external input. `peek` may be called several
/// times before the machine commits with `take`.
pub trait InputProvider {
    fn peek(&mut self, channel: &str) -> Option<Word>;
    fn take(&mut self, channel: &str);
}

/// Fixed per-channel word lists, each word delivered once, in order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScriptedInput {
    queues: BTreeMap<String, VecDeque<Word>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("input script line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

impl ScriptedInput {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, channel: &str, word: Word) {
        self.queues.entry(channel.to_string()).or_default().push_back(word);
    }

    pub fn with(mut self, channel: &str, words: &[&str]) -> Self {
        for w in words {
            self.push(channel, Word::from(*w));
        }
        self
    }

    pub fn single(channel: &str, word: Word) -> Self {
        let mut s = Self::new();
        s.push(channel, word);
        s
    }

    /// Parses lines `channel <name>: <word> <word> …`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ScriptError> {
        let mut s = Self::new();
        for (i, raw) in text.lines().enumerate() {
            let err = |message: String| ScriptError {
                line: i + 1,
                message,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let rest = line
                .strip_prefix("channel")
                .ok_or_else(|| err("expected `channel <name>: <words>`".into()))?;
            let (name, words) = rest
                .split_once(':')
                .ok_or_else(|| err("missing `:` after the channel name".into()))?;
            let name = name.trim();
            if name.is_empty() {
                return Err(err("missing channel name".into()));
            }
            s.queues.entry(name.to_string()).or_default();
            for tok in words.split_whitespace() {
                let w = Word::parse_token(tok).map_err(|e| err(e.to_string()))?;
                s.push(name, w);
            }
        }
        Ok(s)
    }

    pub fn remaining(&self, channel: &str) -> usize {
        self.queues.get(channel).map_or(0, VecDeque::len)
    }

    pub fn channels(&self) -> impl Iterator<Item = &str> {
        self.queues.keys().map(String::as_str)
    }
}

impl InputProvider for ScriptedInput {
    fn peek(&mut self, channel: &str) -> Option<Word> {
        self.queues.get(channel).and_then(|q| q.front().cloned())
    }

    fn take(&mut self, channel: &str) {
        if let Some(q) = self.queues.get_mut(channel) {
            q.pop_front();
        }
    }
}
