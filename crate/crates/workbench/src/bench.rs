//! Benchmark pipeline: generate accepted multi-traces, cut random prefixes,
//! derive one mutant per mutation kind, analyze everything, and report one
//! CSV row per analysis.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{self, Write};

use mtrv_core::{analyze, Action, InteractionModel, MultiTrace, SearchConfig, Verdict};

use crate::generate::{generate_accepted, select_prefixes, GenerationCriteria};
use crate::mutate::{mutate, MutationAux, MutationKind};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordKind {
    Acpt,
    Pref,
    Sact,
    Scmp,
    Nois,
}

impl RecordKind {
    pub fn label(self) -> &'static str {
        match self {
            RecordKind::Acpt => "ACPT",
            RecordKind::Pref => "PREF",
            RecordKind::Sact => "SACT",
            RecordKind::Scmp => "SCMP",
            RecordKind::Nois => "NOIS",
        }
    }
}

impl fmt::Display for RecordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl From<MutationKind> for RecordKind {
    fn from(kind: MutationKind) -> Self {
        match kind {
            MutationKind::Sact => RecordKind::Sact,
            MutationKind::Scmp => RecordKind::Scmp,
            MutationKind::Nois => RecordKind::Nois,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub name: String,
    pub kind: RecordKind,
    pub verdict: Verdict,
    pub time_seconds: f64,
    pub nodes_explored: usize,
}

pub const CSV_HEADER: &str = "name,kind,verdict,time_seconds,nodes_explored";

/// Run the ACPT -> PREF -> {SACT, SCMP, NOIS} pipeline on `model`, write one
/// CSV row per analyzed multi-trace to `out`, and return the records.
///
/// `criteria` drives trace generation; `seed` drives prefix selection and
/// mutation. Each prefix gets `mutants_per_prefix` mutants of every kind,
/// skipping draws whose precondition cannot hold (e.g. nothing to swap in an
/// all-empty prefix). SCMP mixes a prefix with the next prefix of the same
/// accepted trace, falling back to the accepted trace itself when only one
/// prefix was requested. The NOIS pool is the model's own action set. With
/// identical inputs and seeds every column except `time_seconds` reproduces
/// exactly.
pub fn run_bench<W: Write>(
    model: &InteractionModel,
    criteria: &GenerationCriteria,
    prefixes_per_trace: usize,
    mutants_per_prefix: usize,
    seed: u64,
    out: &mut W,
) -> io::Result<Vec<BenchRecord>> {
    let config = SearchConfig::default();
    let noise_pool: BTreeSet<Action> = model.term().actions();
    let mut rng = SplitMix64::new(seed);
    let mut records = Vec::new();
    writeln!(out, "{CSV_HEADER}")?;

    for (t, accepted) in generate_accepted(model, criteria).iter().enumerate() {
        emit(out, &mut records, model, &config, format!("t{t}"), RecordKind::Acpt, accepted)?;
        let prefixes = select_prefixes(accepted, prefixes_per_trace, rng.next_u64());
        for (p, prefix) in prefixes.iter().enumerate() {
            emit(
                out,
                &mut records,
                model,
                &config,
                format!("t{t}_p{p}"),
                RecordKind::Pref,
                prefix,
            )?;
            let scmp_aux = if prefixes.len() > 1 {
                &prefixes[(p + 1) % prefixes.len()]
            } else {
                accepted
            };
            for n in 0..mutants_per_prefix {
                for kind in [MutationKind::Sact, MutationKind::Scmp, MutationKind::Nois] {
                    let aux = match kind {
                        MutationKind::Sact => MutationAux::None,
                        MutationKind::Scmp => MutationAux::Trace(scmp_aux),
                        MutationKind::Nois => MutationAux::Alphabet(&noise_pool),
                    };
                    let Ok(mutant) = mutate(prefix, kind, rng.next_u64(), aux) else {
                        continue;
                    };
                    let record_kind = RecordKind::from(kind);
                    let name =
                        format!("t{t}_p{p}_{}{n}", record_kind.label().to_ascii_lowercase());
                    emit(out, &mut records, model, &config, name, record_kind, &mutant)?;
                }
            }
        }
    }
    Ok(records)
}

fn emit<W: Write>(
    out: &mut W,
    records: &mut Vec<BenchRecord>,
    model: &InteractionModel,
    config: &SearchConfig,
    name: String,
    kind: RecordKind,
    mu: &MultiTrace,
) -> io::Result<()> {
    let report = analyze(model, mu, config).expect("pipeline traces match the model signature");
    let record = BenchRecord {
        name,
        kind,
        verdict: report.verdict,
        time_seconds: report.elapsed.as_secs_f64(),
        nodes_explored: report.nodes_explored,
    };
    writeln!(
        out,
        "{},{},{},{:.6},{}",
        record.name, record.kind, record.verdict, record.time_seconds, record.nodes_explored
    )?;
    records.push(record);
    Ok(())
}
