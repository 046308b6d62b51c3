//! Forgetting in CTL over bounded spaces of initial K-structures.

pub mod bisim;
pub mod cli;
pub mod charform;
pub mod conditions;
pub mod forgetting;
pub mod formula;
pub mod kripke;
pub mod modelcheck;
pub mod modelspace;
pub mod sample;
