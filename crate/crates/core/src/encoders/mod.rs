//! Compilers from classical machine descriptions to process programs, and
//! the behavior wrappers (servers, online/offline conversions).

mod atm;
mod choice;
mod circuit;
mod dispatch;
pub mod fixtures;
mod ram;
mod rtm;
mod tm;
mod wrappers;

use std::fmt;

use thiserror::Error;

use crate::proclang::SemanticError;

pub use atm::{encode_atm, AtmSpec, Polarity};
pub use choice::internal_choice;
pub use circuit::{encode_circuit, CircuitSpec, Gate};
pub use dispatch::{dispatch_expr, finite_dispatch};
pub use ram::{encode_pram, encode_ram, PramProgram, RamInstr, RamProgram};
pub use rtm::{encode_rtm, RtmSpec, RtmTransition};
pub use tm::{encode_tm, TmSpec};
pub use wrappers::{offline_from_online, online_from_offline, serverize};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid machine: {0}")]
    Invalid(String),
    #[error("emitted program is ill-formed: {0}")]
    Emit(#[from] SemanticError),
}

/// A tape symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    Blank,
    Zero,
    One,
}

impl Sym {
    pub fn parse(s: &str) -> Option<Sym> {
        match s {
            "_" => Some(Sym::Blank),
            "0" => Some(Sym::Zero),
            "1" => Some(Sym::One),
            _ => None,
        }
    }

    pub fn bit(self) -> Option<bool> {
        match self {
            Sym::Blank => None,
            Sym::Zero => Some(false),
            Sym::One => Some(true),
        }
    }

    pub fn from_bit(b: bool) -> Sym {
        if b {
            Sym::One
        } else {
            Sym::Zero
        }
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sym::Blank => "_",
            Sym::Zero => "0",
            Sym::One => "1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    L,
    R,
}

impl Move {
    pub fn parse(s: &str) -> Option<Move> {
        match s {
            "L" => Some(Move::L),
            "R" => Some(Move::R),
            _ => None,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::L => "L",
            Move::R => "R",
        })
    }
}

/// Bits needed for fixed-width codes of `n` things (at least one).
pub fn code_width(n: usize) -> usize {
    let mut w = 1;
    while (1usize << w) < n {
        w += 1;
    }
    w
}

/// `(line, key, rest)` for every `key: rest` line, skipping blanks and `#`
/// comments.
pub(crate) fn spec_lines(text: &str) -> Result<Vec<(usize, &str, &str)>, EncodeError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(':').ok_or_else(|| EncodeError::Syntax {
            line: i + 1,
            message: "expected `key: value`".into(),
        })?;
        out.push((i + 1, key.trim(), rest.trim()));
    }
    Ok(out)
}
