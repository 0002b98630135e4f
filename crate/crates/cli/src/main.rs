//! `fibrekit`: exact invariants of point configurations with a function panel.

use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use fibrekit_cli::{
    cmd_analyze, cmd_equations, cmd_gen, cmd_jordan, cmd_loop, cmd_macdonald, cmd_mu00, cmd_verify, input_hash,
    load_equations, load_panel, render, run_record, CliError, EqKind, EXIT_INVARIANT,
};

#[derive(Parser)]
#[command(name = "fibrekit", version, about = "Exact invariants of point configurations with a function panel")]
struct Cli {
    /// Pretty-print the JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    /// Compact JSON output (the default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct InputArgs {
    /// Instance JSON file, or `-` for standard input.
    #[arg(long)]
    input: String,
}

#[derive(clap::Args)]
struct TArgs {
    /// Values of the panel function on the points, as `p/q,...`.
    #[arg(long)]
    t: Option<String>,
    /// Seed for the random panel function used when `--t` is absent.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Filtration, reduction, decomposition, Lie structure, classification and Torelli index.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Graded Jordan data of the degree +1 and -1 parts of multiplication by t.
    Jordan {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        t: TArgs,
        /// Also sample this many random panel functions for the generic stratum.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Equations of the configuration with an exact evaluation certificate.
    Equations {
        /// monomial, monomial-affine, chain-end, rank4 or scroll.
        kind: String,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        t: TArgs,
        /// Largest degree of monomial relations.
        #[arg(long, default_value_t = 4)]
        degree_cap: u32,
    },
    /// Splitting of the points by a function vanishing on a hyperplane's worth of them.
    Mu00 {
        #[command(flatten)]
        input: InputArgs,
        /// Random panel functions used to estimate the generic value.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Loop exponents of the sl2 semisimple element.
    Loop {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        t: TArgs,
    },
    /// Graded character of the Springer fibre cohomology as a Schur expansion.
    Macdonald {
        /// Partition as comma-separated parts, e.g. `2,1`.
        #[arg(long)]
        mu: String,
        /// Weight; defaults to that of the partition.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Re-evaluate every polynomial of an equations file at every point.
    Verify {
        /// Equations JSON produced by `equations`.
        #[arg(long)]
        equations: String,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Generate a synthetic instance, e.g. `general:8:2`, `chain:5`, `blocks:2:3`, `rnc:4`, `chain:3+rnc:2`.
    Gen {
        spec: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read_source(path: &str) -> Result<String, CliError> {
    let io = |source| CliError::Io { path: path.to_string(), source };
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}

/// Runs the command; the flag is false when `verify` found a failure.
fn run(command: Command) -> Result<(Value, bool), CliError> {
    let with_input = |name: &str, args: &InputArgs, seed: Option<u64>, f: &dyn Fn(&str) -> Result<Value, CliError>| {
        let text = read_source(&args.input)?;
        let result = f(&text)?;
        Ok::<_, CliError>(run_record(name, seed, Some(input_hash(text.as_bytes())), result))
    };
    let out = match command {
        Command::Analyze { input } => {
            with_input("analyze", &input, None, &|s| cmd_analyze(load_panel(s, &input.input)?))?
        }
        Command::Jordan { input, t, samples } => with_input("jordan", &input, Some(t.seed), &|s| {
            cmd_jordan(load_panel(s, &input.input)?, t.t.as_deref(), t.seed, samples)
        })?,
        Command::Equations { kind, input, t, degree_cap } => {
            let kind: EqKind = kind.parse()?;
            with_input("equations", &input, Some(t.seed), &|s| {
                cmd_equations(load_panel(s, &input.input)?, kind, t.t.as_deref(), t.seed, degree_cap)
            })?
        }
        Command::Mu00 { input, samples, seed } => {
            with_input("mu00", &input, Some(seed), &|s| cmd_mu00(load_panel(s, &input.input)?, samples, seed))?
        }
        Command::Loop { input, t } => with_input("loop", &input, Some(t.seed), &|s| {
            cmd_loop(load_panel(s, &input.input)?, t.t.as_deref(), t.seed)
        })?,
        Command::Macdonald { mu, n } => run_record("macdonald", None, None, cmd_macdonald(&mu, n)?),
        Command::Verify { equations, input } => {
            let eq_text = read_source(&equations)?;
            let text = read_source(&input.input)?;
            let rec = load_equations(&eq_text, &equations)?;
            let panel = load_panel(&text, &input.input)?;
            let (result, ok) = cmd_verify(&rec, &panel)?;
            let mut bytes = eq_text.into_bytes();
            bytes.extend_from_slice(text.as_bytes());
            return Ok((run_record("verify", None, Some(input_hash(&bytes)), result), ok));
        }
        Command::Gen { spec, seed } => run_record("gen", Some(seed), None, cmd_gen(&spec, seed)?),
    };
    Ok((out, true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pretty = cli.pretty && !cli.json;
    match run(cli.command) {
        Ok((out, ok)) => {
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{}", render(&out, pretty));
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: verification failed");
                ExitCode::from(EXIT_INVARIANT as u8)
            }
        }
        Err(e) => {
            let code = e.exit_code();
            if code == EXIT_INVARIANT {
                eprintln!("INVARIANT VIOLATION: {e}");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(code as u8)
        }
    }
}
