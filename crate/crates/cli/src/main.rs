//! `txf`: compile, run and verify exact hard-attention Transformers.
//!
//! Exit codes: 0 success or PASS, 1 verification FAIL, 2 malformed input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use turing_xf::directional::compile_directional;
use turing_xf::exec::Exec;
use turing_xf::harness::{ablation_demo_on, cosimulate, enumerate_reachable, run_fuzz, FuzzConfig};
use turing_xf::numeric::{Rat, RatVec};
use turing_xf::seq::{rnn_run, Alphabet, RnnSpec, BEGIN};
use turing_xf::tm::{compile_two_stack, tm_alphabet, tm_to_two_stack, TmSpec};
use turing_xf::transformer::{run, TransformerSpec};
use turing_xf::vanilla::compile_vanilla;

#[derive(Parser)]
#[command(name = "txf", version, about = "Exact-rational RNN and Turing machine to Transformer compiler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Turing machine -> two-stack machine -> RNN.
    CompileTm {
        #[arg(long)]
        tm: PathBuf,
        /// Also write the tape alphabet here.
        #[arg(long)]
        alphabet: Option<PathBuf>,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// RNN -> Transformer with positional encodings.
    CompileVanilla(CompileArgs),
    /// RNN -> Transformer with directional (masked) attention.
    CompileDirectional(CompileArgs),
    /// Run a Transformer (or, with --rnn, the RNN) and emit its trace.
    Run {
        #[arg(long, conflicts_with = "rnn")]
        transformer: Option<PathBuf>,
        #[arg(long, requires = "alphabet")]
        rnn: Option<PathBuf>,
        #[arg(long)]
        alphabet: Option<PathBuf>,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        max_steps: usize,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Co-simulate an RNN against a Transformer compiled from it, or run a
    /// randomized campaign with --fuzz.
    Verify {
        #[arg(long, required_unless_present = "fuzz")]
        rnn: Option<PathBuf>,
        #[arg(long, required_unless_present = "fuzz")]
        transformer: Option<PathBuf>,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, required_unless_present = "fuzz")]
        max_steps: Option<usize>,
        /// Number of random RNNs to check with both compilers; each case
        /// decodes for its input length plus a few steps.
        #[arg(long, conflicts_with_all = ["rnn", "transformer", "max_steps"])]
        fuzz: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Counting task with and without the decoder-encoder residual.
    Ablate {
        /// Counting increment in (0, 1], e.g. 1/5.
        #[arg(long, default_value = "1/5")]
        delta: String,
        #[arg(long, default_value = "c")]
        input: String,
        #[arg(long)]
        max_steps: usize,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Every average of a nonempty subset of the given vectors.
    Enumerate {
        /// JSON list of vectors.
        #[arg(long)]
        values: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CompileArgs {
    #[arg(long)]
    rnn: PathBuf,
    #[arg(long)]
    alphabet: PathBuf,
    #[arg(short)]
    o: Option<PathBuf>,
}

#[derive(Args)]
struct InputArgs {
    /// Space-separated symbols, e.g. "a b $".
    #[arg(long, allow_hyphen_values = true)]
    input: Option<String>,
    /// Do not prepend '#' for directional Transformers.
    #[arg(long)]
    no_hash_prefix: bool,
}

impl InputArgs {
    fn symbols(&self, alphabet: &Alphabet, directional: bool) -> Result<Vec<String>> {
        let text = self.input.as_deref().context("--input is required")?;
        let mut syms = alphabet.tokenize(text)?;
        if directional && !self.no_hash_prefix && syms.first().map(String::as_str) != Some(BEGIN) {
            syms.insert(0, BEGIN.to_string());
        }
        Ok(syms)
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Pretty JSON with a trailing newline; field order is fixed by the types,
/// so identical values give identical bytes.
fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verdict(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::CompileTm { tm, alphabet, o } => {
            let tm: TmSpec = read_json(&tm)?;
            let compiled = compile_two_stack(&tm_to_two_stack(&tm)?)?;
            if let Some(p) = alphabet {
                emit(&tm_alphabet(), Some(&p))?;
            }
            eprintln!(
                "compiled {} TM states into an RNN with d_h = {}",
                tm.states.len(),
                compiled.rnn.d_h
            );
            emit(&compiled.rnn, o.as_deref())?;
        }
        Command::CompileVanilla(a) => {
            let (rnn, alphabet): (RnnSpec, Alphabet) = (read_json(&a.rnn)?, read_json(&a.alphabet)?);
            emit(&compile_vanilla(&rnn, &alphabet)?, a.o.as_deref())?;
        }
        Command::CompileDirectional(a) => {
            let (rnn, alphabet): (RnnSpec, Alphabet) = (read_json(&a.rnn)?, read_json(&a.alphabet)?);
            emit(&compile_directional(&rnn, &alphabet)?, a.o.as_deref())?;
        }
        Command::Run {
            transformer,
            rnn,
            alphabet,
            input,
            max_steps,
            o,
        } => match (transformer, rnn) {
            (Some(t), _) => {
                let spec: TransformerSpec = read_json(&t)?;
                spec.validate()?;
                let syms = input.symbols(&spec.alphabet, spec.directional)?;
                emit(&run(&spec, &syms, max_steps)?, o.as_deref())?;
            }
            (None, Some(r)) => {
                let rnn: RnnSpec = read_json(&r)?;
                let alphabet: Alphabet = read_json(alphabet.as_deref().expect("clap requires it"))?;
                let syms = input.symbols(&alphabet, false)?;
                emit(&rnn_run(&rnn, &alphabet, &syms, max_steps)?, o.as_deref())?;
            }
            (None, None) => bail!("run needs --transformer or --rnn"),
        },
        Command::Verify {
            fuzz: Some(cases),
            seed,
            o,
            ..
        } => {
            let cfg = FuzzConfig {
                cases,
                seed,
                ..FuzzConfig::default()
            };
            let summary = run_fuzz(&cfg, Exec::Parallel)?;
            eprintln!(
                "{}: {}/{} cases pass",
                if summary.all_passed() { "PASS" } else { "FAIL" },
                summary.passed,
                summary.cases
            );
            emit(&summary, o.as_deref())?;
            return Ok(verdict(summary.all_passed()));
        }
        Command::Verify {
            rnn,
            transformer,
            input,
            max_steps,
            o,
            ..
        } => {
            let rnn: RnnSpec = read_json(&rnn.context("--rnn is required")?)?;
            let spec: TransformerSpec = read_json(&transformer.context("--transformer is required")?)?;
            spec.validate()?;
            let syms = input.symbols(&spec.alphabet, spec.directional)?;
            let report = cosimulate(&rnn, &spec, &syms, max_steps.context("--max-steps is required")?)?;
            let word = if report.passed() { "PASS" } else { "FAIL" };
            eprintln!("{word}: {} steps checked", report.steps_checked);
            emit(&report, o.as_deref())?;
            return Ok(verdict(report.passed()));
        }
        Command::Ablate {
            delta,
            input,
            max_steps,
            o,
        } => {
            let delta: Rat = delta.parse()?;
            let syms: Vec<String> = input.split_whitespace().map(str::to_string).collect();
            let report = ablation_demo_on(&delta, &syms, max_steps)?;
            emit(&report, o.as_deref())?;
            return Ok(verdict(report.passed()));
        }
        Command::Enumerate { values, o } => {
            let values: Vec<RatVec> = read_json(&values)?;
            let set = enumerate_reachable(&values)?;
            eprintln!("{} distinct outputs from {} nonempty subsets", set.len(), set.subset_count);
            emit(&set, o.as_deref())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
