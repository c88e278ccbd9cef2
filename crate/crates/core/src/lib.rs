//! Planning and evaluation toolkit for wireless AP agility: range-mutation
//! and topology-mutation scheduling over a finite-domain constraint solver,
//! an independent constraint validator with brute-force oracles, and an
//! eavesdrop/jam adversary simulator.

pub mod generate;
pub mod rnm;
pub mod rtm;
pub mod scenario;
pub mod sim;
pub mod solver;
pub mod validate;
