// Each test target uses a different subset of the oracles.
#![allow(dead_code)]

pub mod costs;
pub mod gen;
pub mod machines;
pub mod rtm;
