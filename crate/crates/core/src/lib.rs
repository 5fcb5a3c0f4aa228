//! Desk-scale laboratory for two exhaustive experiments and the statistics
//! connecting them:
//!
//! * halting-time censuses of the complete `(n,2)` Turing machine spaces,
//!   run against Busy Beaver step budgets, and
//! * decision-time censuses of equational formulas proved or disproved
//!   against enumerated axiom systems.
//!
//! Both pipelines produce the same shape of data (a decision-time
//! distribution), which feeds the timeout machinery in [`stats`] and the
//! field renderer in [`viz`].

pub mod census;
pub mod prover;
pub mod stats;
pub mod terms;
pub mod tm;
pub mod viz;

pub use census::{BusyBeaverRecord, HaltingCensus, OutputCensus, OutputRule};
pub use prover::{DecisionBudget, FiniteModel, ProofResult, TruthSpace};
pub use stats::DecisionDistribution;
pub use terms::{AxiomSystem, Equation, Op, Term};
pub use tm::{Action, Configuration, Dir, RunResult, RunStatus, TuringMachine};
pub use viz::FieldImage;
