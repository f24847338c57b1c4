//! Process machine: an interpreter for a small message-passing process
//! language, with causal cost analysis, behavioral equivalence checking and
//! compilers from classical machine models.

pub mod behavior;
pub mod causality;
pub mod complexity;
pub mod encoders;
pub mod machine;
pub mod proclang;
pub mod word;

pub use word::Word;
