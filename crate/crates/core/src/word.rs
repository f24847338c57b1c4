//! Binary words, the only data values of the process machine.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// A finite string over `{0,1}`; `Word::empty()` is ε.
///
/// Backed by a deque so that prepending a bit and dropping the first bit are
/// both amortized O(1), which is what the expression cost model charges.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    bits: VecDeque<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid binary word {0:?}")]
pub struct ParseWordError(pub String);

impl Word {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        Self {
            bits: bits.into_iter().collect(),
        }
    }

    /// `0^n`, the unary numeral for `n`.
    pub fn zeros(n: usize) -> Self {
        Self::from_bits(std::iter::repeat_n(false, n))
    }

    pub fn ones(n: usize) -> Self {
        Self::from_bits(std::iter::repeat_n(true, n))
    }

    /// Fixed-width big-endian binary code of `value`.
    pub fn fixed_width(value: usize, width: usize) -> Self {
        Self::from_bits((0..width).rev().map(|i| (value >> i) & 1 == 1))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn first(&self) -> Option<bool> {
        self.bits.front().copied()
    }

    pub fn starts_with_zero(&self) -> bool {
        self.first() == Some(false)
    }

    pub fn prepend(&mut self, bit: bool) {
        self.bits.push_front(bit);
    }

    pub fn with_prefix_bit(mut self, bit: bool) -> Self {
        self.prepend(bit);
        self
    }

    /// `self · bit`, the tag of a spawned child.
    pub fn child(&self, bit: bool) -> Self {
        let mut w = self.clone();
        w.push(bit);
        w
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push_back(bit);
    }

    /// Drops the first bit; `None` on ε.
    pub fn tail(mut self) -> Option<Self> {
        self.bits.pop_front().map(|_| self)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = bool> + ExactSizeIterator + '_ {
        self.bits.iter().copied()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_bits(self.iter().chain(other.iter()))
    }

    pub fn reversed(&self) -> Word {
        Word::from_bits(self.iter().rev())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        self.len() <= other.len() && self.iter().zip(other.iter()).all(|(a, b)| a == b)
    }

    /// `other` with `self` removed from its front, when `self` is a prefix.
    pub fn strip_from(&self, other: &Word) -> Option<Word> {
        self.is_prefix_of(other)
            .then(|| Word::from_bits(other.iter().skip(self.len())))
    }

    pub fn is_palindrome(&self) -> bool {
        self.iter().eq(self.iter().rev())
    }

    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Quoted form used by every text format: `"0110"`, `""` for ε.
    pub fn quoted(&self) -> String {
        format!("\"{}\"", self.to_bit_string())
    }

    /// Accepts bare bits or a quoted literal (`""` is ε).
    pub fn parse_token(token: &str) -> Result<Word, ParseWordError> {
        let inner = token
            .strip_prefix('"')
            .and_then(|t| t.strip_suffix('"'))
            .unwrap_or(token);
        inner.parse()
    }
}

impl FromStr for Word {
    type Err = ParseWordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(ParseWordError(s.to_string())),
            })
            .collect::<Result<VecDeque<_>, _>>()
            .map(|bits| Word { bits })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.quoted())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_bit_string())
    }
}

impl From<&str> for Word {
    /// Panics on non-binary input; meant for literals in code and tests.
    fn from(s: &str) -> Self {
        s.parse().expect("binary literal")
    }
}
