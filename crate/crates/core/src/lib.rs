//! Offline conformance checking of distributed-system logs against interaction
//! models.
//!
//! A *multi-trace* is one locally observed action sequence per subsystem
//! interface (lifeline), with no ordering between components. An *interaction
//! model* describes the intended communication scenario. The engine in
//! [`engine`] decides whether a multi-trace is a multi-prefix of an accepted
//! multi-trace of the model, handling partially observed executions (missing
//! or truncated local logs) through lifeline removal.

pub mod engine;
pub mod interaction;
pub mod model;
pub mod multitrace;
pub mod sat;
pub mod semantics;
pub mod syntax;

pub use engine::{analyze, analyze_logged, successors, EngineError, ExplorationReport, RuleTag, SearchConfig, Strategy, Verdict, Vertex};
pub use interaction::{Interaction, InteractionModel};
pub use model::{Action, ActionKind, Lifeline, Message, ModelError, Signature};
pub use multitrace::{CombineOp, MultiTrace, MultiTraceSet, Side};
pub use sat::{
    brute_force_sat, parse_dimacs, reduce_cnf, sat_solve_via_rv, Clause, CnfFormula, Literal,
    SatError,
};
pub use semantics::{
    enumerate_denotational, enumerate_denotational_capped, enumerate_operational, frontier,
    terminates,
};
pub use syntax::{parse_interaction, parse_multitrace, ParseError};

#[cfg(test)]
pub(crate) mod testkit;
