//! `sfb`: semiring forward-backward tools.
//!
//! Exit codes: 0 success, 1 usage/parse/dimension errors, 2 empty lattice.

mod bench;
mod commands;
mod container;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use sfb_core::fsm::GraphKind;
use sfb_core::inference::InferenceError;
use sfb_core::lfmmi::LfmmiError;

use crate::bench::{run_bench, BenchConfig, BenchRecord};
use crate::container::ScalarCode;

/// Reference benchmark mini-batch size; --scale divides it.
const REFERENCE_BATCH: usize = 128;

#[derive(Parser)]
#[command(
    name = "sfb",
    version,
    about = "Forward-backward, Viterbi and LF-MMI over semiring sparse matrices"
)]
struct Cli {
    /// Worker threads for the kernels (default: all logical processors).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SemiringArg {
    /// Log-semifield (numerically stable, the default).
    Log,
    /// Plain probability semiring (underflows on long sequences).
    Prob,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    /// Left-to-right alignment shape (numerator-like).
    Alignment,
    /// Ergodic n-gram shape (denominator-like).
    Ngram,
}

impl From<KindArg> for GraphKind {
    fn from(kind: KindArg) -> GraphKind {
        match kind {
            KindArg::Alignment => GraphKind::LeftToRightAlignment,
            KindArg::Ngram => GraphKind::ErgodicNgram,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScalarArg {
    F32,
    F64,
}

impl From<ScalarArg> for ScalarCode {
    fn from(scalar: ScalarArg) -> ScalarCode {
        match scalar {
            ScalarArg::F32 => ScalarCode::F32,
            ScalarArg::F64 => ScalarCode::F64,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run forward-backward: write posteriors, print logZ.
    Fb {
        /// Graph in text format.
        graph: PathBuf,
        /// Log-likelihoods as an SFBL container.
        likelihoods: PathBuf,
        /// Output container of probability-domain posteriors.
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = SemiringArg::Log)]
        semiring: SemiringArg,
    },
    /// Decode the best state sequence, print it and its score.
    Viterbi {
        graph: PathBuf,
        likelihoods: PathBuf,
    },
    /// Compute the LF-MMI loss and gradient.
    Lfmmi {
        numerator: PathBuf,
        denominator: PathBuf,
        likelihoods: PathBuf,
        /// Output container for ∂L/∂φ.
        grad_output: PathBuf,
    },
    /// Generate a synthetic graph with matching pseudo-loglikelihoods.
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 454)]
        states: usize,
        /// Arc budget: transition entries plus final weights.
        #[arg(long, default_value_t = 1036)]
        arcs: usize,
        #[arg(long, default_value_t = 700)]
        frames: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Lower bound of the uniform log-likelihood range.
        #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
        lik_min: f64,
        /// Upper bound of the uniform log-likelihood range.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lik_max: f64,
        #[arg(long, value_enum, default_value_t = ScalarArg::F64)]
        scalar: ScalarArg,
        graph_output: PathBuf,
        lik_output: PathBuf,
    },
    /// Replicate a synthetic graph into a mini-batch and time the batched
    /// forward-backward.
    Bench {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Batch size; default is 128 divided by --scale.
        #[arg(long)]
        batch: Option<usize>,
        /// Desk-scale divisor applied to the reference batch of 128.
        #[arg(long, default_value_t = 16)]
        scale: usize,
        /// States of the base graph; default depends on --kind.
        #[arg(long)]
        states: Option<usize>,
        /// Arc budget of the base graph; default depends on --kind.
        #[arg(long)]
        arcs: Option<usize>,
        #[arg(long, default_value_t = 700)]
        frames: usize,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Refuse configurations estimated to need more memory than this.
        #[arg(long, default_value_t = 8.0)]
        mem_limit_gb: f64,
        /// Emit the report as a JSON array instead of CSV.
        #[arg(long)]
        json: bool,
        /// Emit the report as CSV (the default).
        #[arg(long)]
        csv: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{err}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{err}");
                    ExitCode::from(1)
                }
            };
        }
    };

    let threads = cli.threads.unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(err) => {
            eprintln!("error: building thread pool: {err}");
            return ExitCode::from(1);
        }
    };

    match pool.install(|| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

/// 2 for empty-lattice outcomes, 1 for everything else.
fn classify(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<InferenceError>() {
            if matches!(e, InferenceError::EmptyLattice { .. }) {
                return 2;
            }
        }
        if let Some(e) = cause.downcast_ref::<LfmmiError>() {
            match e {
                LfmmiError::EmptyNumerator { .. } | LfmmiError::EmptyDenominator { .. } => {
                    return 2;
                }
                LfmmiError::Inference(InferenceError::EmptyLattice { .. }) => return 2,
                _ => {}
            }
        }
    }
    1
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Fb {
            graph,
            likelihoods,
            output,
            semiring,
        } => commands::cmd_fb(
            &graph,
            &likelihoods,
            &output,
            matches!(semiring, SemiringArg::Prob),
        ),
        Command::Viterbi { graph, likelihoods } => commands::cmd_viterbi(&graph, &likelihoods),
        Command::Lfmmi {
            numerator,
            denominator,
            likelihoods,
            grad_output,
        } => commands::cmd_lfmmi(&numerator, &denominator, &likelihoods, &grad_output),
        Command::Gen {
            kind,
            states,
            arcs,
            frames,
            seed,
            lik_min,
            lik_max,
            scalar,
            graph_output,
            lik_output,
        } => commands::cmd_gen(
            kind.into(),
            states,
            arcs,
            frames,
            seed,
            (lik_min, lik_max),
            scalar.into(),
            &graph_output,
            &lik_output,
        ),
        Command::Bench {
            kind,
            batch,
            scale,
            states,
            arcs,
            frames,
            reps,
            seed,
            mem_limit_gb,
            json,
            csv,
        } => {
            anyhow::ensure!(scale > 0, "--scale must be positive");
            anyhow::ensure!(!(json && csv), "choose one of --json and --csv, not both");
            let (default_states, default_arcs) = match kind {
                KindArg::Alignment => (454, 1036),
                KindArg::Ngram => (3022, 50984),
            };
            let config = BenchConfig {
                kind: kind.into(),
                states: states.unwrap_or(default_states),
                arcs: arcs.unwrap_or(default_arcs),
                batch: batch.unwrap_or_else(|| (REFERENCE_BATCH / scale).max(1)),
                frames,
                reps,
                seed,
                mem_limit_bytes: (mem_limit_gb * (1u64 << 30) as f64) as u64,
            };
            let record = run_bench(&config)?;
            emit_report(&[record], json);
            Ok(())
        }
    }
}

fn emit_report(records: &[BenchRecord], json: bool) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(records).expect("bench records serialize")
        );
    } else {
        println!("{}", BenchRecord::CSV_HEADER);
        for record in records {
            println!("{}", record.csv_row());
        }
    }
}
