//! Experiment harness around [`mtrv_core`]: generation of accepted
//! multi-traces, random prefix selection, the three trace mutation operators,
//! and a CSV benchmark pipeline. The `mtrv` binary exposes all of it, plus the
//! core analyzer, on the command line.

pub mod bench;
pub mod generate;
pub mod mutate;
pub mod rng;

pub use bench::{run_bench, BenchRecord, RecordKind, CSV_HEADER};
pub use generate::{generate_accepted, select_prefixes, GenerationCriteria, GenerationMode};
pub use mutate::{mutate, MutationAux, MutationError, MutationKind};
pub use rng::SplitMix64;
