//! Model checking for the coalgebraic μ-calculus.
//!
//! Formulas are interpreted over finite coalgebras for five functors
//! (powerset, multiset, distribution, monotone neighbourhoods and concurrent
//! games). Two engines decide satisfaction: a local fixpoint engine that can
//! explore the state space lazily, and a reduction to parity games solved
//! with Zielonka's algorithm.

pub mod batch;
pub mod benchgen;
pub mod formula;
pub mod game;
pub mod model;
pub mod rational;
pub mod local;

mod error;

pub use error::{CheckError, Deadline};
