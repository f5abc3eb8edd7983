use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mtrv_core::{
    analyze, analyze_logged, brute_force_sat, enumerate_denotational, enumerate_operational,
    parse_dimacs, parse_interaction, parse_multitrace, sat_solve_via_rv, EngineError,
    InteractionModel, MultiTrace, SearchConfig, Strategy, Verdict,
};
use mtrv_workbench::{
    generate_accepted, mutate, run_bench, GenerationCriteria, MutationAux, MutationKind,
};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_LIMIT: u8 = 3;

/// Conformance checking of distributed-system logs against interaction models.
#[derive(Parser)]
#[command(name = "mtrv", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check one multi-trace against a model; exits 0 on Pass, 1 on Fail.
    Analyze {
        #[arg(long)]
        interaction: PathBuf,
        #[arg(long)]
        multitrace: PathBuf,
        #[arg(long, value_enum, default_value_t = StrategyArg::Dfs)]
        strategy: StrategyArg,
        /// Re-expand already seen vertices.
        #[arg(long)]
        no_memo: bool,
        /// Remove unobserved lifelines one edge at a time.
        #[arg(long)]
        single_removal: bool,
        /// Give up (exit 3) after this many expansions.
        #[arg(long)]
        node_limit: Option<usize>,
        /// Write the exploration log (NODE/EDGE/VERDICT lines) to this file.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Enumerate accepted multi-traces, one blank-line-separated block each.
    Semantics {
        #[arg(long)]
        interaction: PathBuf,
        /// Unfold every loop at most this many times.
        #[arg(long)]
        loop_bound: usize,
        /// Keep only multi-traces of at most this cumulative length.
        #[arg(long)]
        max_len: Option<usize>,
        /// Enumerate by bounded execution steps instead; needs --max-len.
        #[arg(long)]
        operational: bool,
    },
    /// Generate accepted multi-traces into a directory, one file per trace.
    Generate {
        #[arg(long)]
        interaction: PathBuf,
        #[arg(long)]
        loop_bound: usize,
        /// Sample random paths instead of exhausting all of them.
        #[arg(long, requires = "node_limit")]
        random: bool,
        /// Stop random sampling after visiting this many vertices.
        #[arg(long, requires = "random")]
        node_limit: Option<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mutate a multi-trace and print the result.
    Mutate {
        #[arg(long)]
        multitrace: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Second multi-trace to mix components in from (scmp).
        #[arg(long)]
        aux: Option<PathBuf>,
        /// Interaction file whose actions form the noise pool (nois).
        #[arg(long)]
        alphabet_from: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
    },
    /// Decide satisfiability of a DIMACS CNF formula via trace analysis.
    Sat {
        #[arg(long)]
        cnf: PathBuf,
        /// Require exactly three distinct literals per clause.
        #[arg(long)]
        strict3: bool,
        /// Cross-check the verdict against brute-force enumeration.
        #[arg(long)]
        oracle: bool,
    },
    /// Run the generation/prefix/mutation pipeline and write a CSV report.
    Bench {
        #[arg(long)]
        interaction: PathBuf,
        #[arg(long)]
        loop_bound: usize,
        /// Prefixes selected per generated trace.
        #[arg(long)]
        prefixes: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        csv: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Dfs,
    Bfs,
}

impl From<StrategyArg> for Strategy {
    fn from(arg: StrategyArg) -> Self {
        match arg {
            StrategyArg::Dfs => Strategy::DepthFirst,
            StrategyArg::Bfs => Strategy::BreadthFirst,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Sact,
    Scmp,
    Nois,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure::new(EXIT_USAGE, message)
    }

    /// Downstream closed the pipe; stop quietly with a success exit.
    fn pipe_closed() -> Self {
        Failure::new(0, "")
    }
}

fn say(text: impl std::fmt::Display) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            Failure::pipe_closed()
        } else {
            Failure::from(e)
        }
    })
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_USAGE, e.to_string())
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let code = match e {
            EngineError::NodeLimitExceeded(_) => EXIT_LIMIT,
            EngineError::Model(_) => EXIT_USAGE,
        };
        Failure::new(code, e.to_string())
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(failure) => {
            if !failure.message.is_empty() {
                eprintln!("error: {}", failure.message);
            }
            ExitCode::from(failure.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<InteractionModel, Failure> {
    parse_interaction(&read(path)?)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_trace(path: &Path) -> Result<MultiTrace, Failure> {
    parse_multitrace(&read(path)?)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn verdict_exit(verdict: Verdict) -> ExitCode {
    match verdict {
        Verdict::Pass => ExitCode::SUCCESS,
        Verdict::Fail => ExitCode::from(EXIT_FAIL),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Analyze {
            interaction,
            multitrace,
            strategy,
            no_memo,
            single_removal,
            node_limit,
            log,
        } => {
            let model = load_model(&interaction)?;
            let trace = load_trace(&multitrace)?;
            let config = SearchConfig {
                strategy: strategy.into(),
                memoize: !no_memo,
                simultaneous_removal: !single_removal,
                node_limit,
            };
            let report = if let Some(log_path) = log {
                let (report, log_text) = analyze_logged(&model, &trace, &config)?;
                fs::write(&log_path, log_text)?;
                report
            } else {
                analyze(&model, &trace, &config)?
            };
            say(report.verdict)?;
            Ok(verdict_exit(report.verdict))
        }
        Command::Semantics {
            interaction,
            loop_bound,
            max_len,
            operational,
        } => {
            let model = load_model(&interaction)?;
            let set = if operational {
                let budget =
                    max_len.ok_or_else(|| Failure::usage("--operational requires --max-len"))?;
                enumerate_operational(&model, budget)
            } else {
                enumerate_denotational(&model, loop_bound)
            };
            let mut first = true;
            for mu in set.iter().filter(|mu| max_len.is_none_or(|n| mu.total_len() <= n)) {
                if !first {
                    say("")?;
                }
                first = false;
                say(mu)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Generate {
            interaction,
            loop_bound,
            random,
            node_limit,
            seed,
            out,
        } => {
            let model = load_model(&interaction)?;
            let criteria = match node_limit {
                Some(limit) if random => GenerationCriteria::random_partial(loop_bound, limit, seed),
                _ => GenerationCriteria::exhaustive(loop_bound),
            };
            let traces = generate_accepted(&model, &criteria);
            fs::create_dir_all(&out)?;
            for (i, mu) in traces.iter().enumerate() {
                fs::write(out.join(format!("trace_{i:04}.mt")), format!("{mu}\n"))?;
            }
            say(format_args!("wrote {} multi-traces to {}", traces.len(), out.display()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Mutate {
            multitrace,
            kind,
            aux,
            alphabet_from,
            seed,
        } => {
            let trace = load_trace(&multitrace)?;
            let aux_trace = aux.as_deref().map(load_trace).transpose()?;
            let pool = alphabet_from
                .as_deref()
                .map(load_model)
                .transpose()?
                .map(|m| m.term().actions());
            let (kind, aux) = match kind {
                KindArg::Sact => (MutationKind::Sact, MutationAux::None),
                KindArg::Scmp => {
                    let other = aux_trace
                        .as_ref()
                        .ok_or_else(|| Failure::usage("--kind scmp requires --aux"))?;
                    (MutationKind::Scmp, MutationAux::Trace(other))
                }
                KindArg::Nois => {
                    let pool = pool
                        .as_ref()
                        .ok_or_else(|| Failure::usage("--kind nois requires --alphabet-from"))?;
                    (MutationKind::Nois, MutationAux::Alphabet(pool))
                }
            };
            let mutant = mutate(&trace, kind, seed, aux)
                .map_err(|e| Failure::usage(e.to_string()))?;
            say(mutant)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sat { cnf, strict3, oracle } => {
            let phi = parse_dimacs(&read(&cnf)?)
                .map_err(|e| Failure::usage(format!("{}: {e}", cnf.display())))?;
            if strict3 && !phi.is_strict_three() {
                return Err(Failure::usage(
                    "formula is not strict 3SAT; drop --strict3 to solve it anyway",
                ));
            }
            let satisfiable = sat_solve_via_rv(&phi, &SearchConfig::default())?;
            if oracle {
                let expected =
                    brute_force_sat(&phi).map_err(|e| Failure::usage(e.to_string()))?;
                if expected != satisfiable {
                    return Err(Failure::new(
                        EXIT_FAIL,
                        "verdict disagrees with the brute-force oracle",
                    ));
                }
            }
            if satisfiable {
                say("SAT")?;
                Ok(ExitCode::SUCCESS)
            } else {
                say("UNSAT")?;
                Ok(ExitCode::from(EXIT_FAIL))
            }
        }
        Command::Bench {
            interaction,
            loop_bound,
            prefixes,
            seed,
            csv,
        } => {
            let model = load_model(&interaction)?;
            let criteria = GenerationCriteria::exhaustive(loop_bound);
            let mut writer = BufWriter::new(fs::File::create(&csv)?);
            let records = run_bench(&model, &criteria, prefixes, 1, seed, &mut writer)?;
            writer.flush()?;
            say(format_args!("wrote {} records to {}", records.len(), csv.display()))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
