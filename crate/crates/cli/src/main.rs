//! `pcrf`: run inference commands on a pattern CRF model file.

use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use pattern_crf::io::{parse_model, run_command, Algorithm, Command, RunOptions};
use pattern_crf::{Error, SamplerMode};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Partition,
    Map,
    Marginals,
    Sample,
    Stats,
    Check,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Alg {
    Auto,
    Alg1,
    Alg4,
    Alg5,
    Alg6,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Direct,
    Alias,
}

#[derive(Debug, Parser)]
#[command(name = "pcrf", version, about = "Exact inference for pattern-based CRFs on chains")]
struct Args {
    command: Cmd,
    /// Model file, or `-` for stdin.
    model: String,
    /// Seed for `sample`.
    #[arg(long, env = "PCRF_SEED", default_value_t = 0)]
    seed: u64,
    /// Number of samples.
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, value_enum, default_value = "auto")]
    algorithm: Alg,
    /// Build pattern costs for `map` with FFT correlation.
    #[arg(long)]
    fft: bool,
    /// Use the exact tilde pattern set in `map`.
    #[arg(long)]
    exact_pi_tilde: bool,
    /// Longest word whose costs come from the FFT path.
    #[arg(long, default_value_t = 1)]
    delta: usize,
    #[arg(long, value_enum, default_value = "direct")]
    sampler: Mode,
    /// Append a wall-clock record.
    #[arg(long)]
    timing: bool,
}

fn read_model(path: &str) -> io::Result<String> {
    let mut text = String::new();
    if path == "-" {
        io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(path)?;
    }
    Ok(text)
}

fn exit_for(e: &Error) -> ExitCode {
    ExitCode::from(if e.is_validation() { 1 } else { 2 })
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let text = match read_model(&args.model) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.model);
            return ExitCode::from(1);
        }
    };
    let parsed = match parse_model(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
    };
    for w in parsed.warnings() {
        eprintln!("warning: {w}");
    }
    let command = match args.command {
        Cmd::Partition => Command::Partition,
        Cmd::Map => Command::Map,
        Cmd::Marginals => Command::Marginals,
        Cmd::Sample => Command::Sample,
        Cmd::Stats => Command::Stats,
        Cmd::Check => Command::Check,
    };
    let opts = RunOptions {
        seed: args.seed,
        count: args.count,
        algorithm: match args.algorithm {
            Alg::Auto => Algorithm::Auto,
            Alg::Alg1 => Algorithm::Alg1,
            Alg::Alg4 => Algorithm::Alg4,
            Alg::Alg5 => Algorithm::Alg5,
            Alg::Alg6 => Algorithm::Alg6,
        },
        fft: args.fft,
        exact_pi_tilde: args.exact_pi_tilde,
        delta: args.delta,
        sampler: match args.sampler {
            Mode::Direct => SamplerMode::Direct,
            Mode::Alias => SamplerMode::Alias,
        },
        timing: args.timing,
    };
    match run_command(command, &parsed.model, &opts) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            if write!(stdout, "{out}").and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            if out.success { ExitCode::SUCCESS } else { ExitCode::from(2) }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}
