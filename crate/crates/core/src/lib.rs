//! Exact solving, constructive strategies and hypercube coverings for the
//! q-round Renyi-Ulam liar games with k lies.
//!
//! * [`game`]: positions, questions, the Berlekamp weight and its relatives.
//! * [`solver`]: memoized minimax for the pathological and original games.
//! * [`closed_forms`]: exact win conditions and thresholds for one and two lies.
//! * [`strategy`]: move policies and exhaustive policy verification.
//! * [`quasiball`]: adaptive Hamming balls, coverings, packings and certificates.

pub mod closed_forms;
pub mod error;
pub mod game;
pub mod quasiball;
pub mod solver;
pub mod strategy;
pub mod tree;

pub use error::{Error, Result};
pub use game::{
    binom, binom_le, character, covers, imbalance, imbalance_closed_form, majorizes, pow2,
    sphere_bound, transition, weight, GameSpec, GameVariant, QuestionVector, Response,
    StateVector, MAX_ROUNDS,
};
pub use quasiball::{CoverMode, LieSet, Quasiball, QuasiballCollection, Vertex};
pub use solver::{SolveOutcome, SolveStats, Solver, SolverConfig, Winner};
pub use strategy::{Policy, VerificationReport};
pub use tree::DecisionTree;
