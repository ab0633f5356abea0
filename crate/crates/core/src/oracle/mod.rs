//! Deliberately naive reference implementations used to check the engine.
//!
//! Nothing here shares code with the matrix backends or the planner: dense
//! matrices use textbook triple loops, and path queries are answered by
//! breadth-first search over the product of a Thompson automaton and the
//! graph.

pub mod dense;
mod nfa;

pub use nfa::{eval_rpq_oracle, Nfa, OracleGraph};
