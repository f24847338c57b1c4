//! Finite LTS extraction, weak bisimilarity and divergence.

mod bisim;
mod lts;

pub use bisim::{
    check_functional, divergence, divergent_states, weak_bisim, BehaviorError, BisimVerdict,
    Distinction, Side,
};
pub use lts::{
    explore_lts, functional_lts, functional_lts_on, ExploreOptions, FiniteLts, FunTable,
    FunTableError, StateId,
};
