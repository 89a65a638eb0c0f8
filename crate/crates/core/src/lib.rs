//! Concurrence of small multiqubit states and tightened monogamy lower bounds.

pub mod bounds;
pub mod cli;
pub mod entanglement;
pub mod linalg;
pub mod states;
