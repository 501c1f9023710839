mod commands;
mod config;
mod error;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Corrupt, Outcome, Settings};
use config::ProblemConfig;
use error::CliError;

#[derive(Parser)]
#[command(name = "cycpair", version, about = "Exact checks of the canonical pairing against the residue pairing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Milnor number, monomial basis, socle and Hessian class.
    Milnor(Args),
    /// Bar-operator identities on the test algebras and a truncation of A_f.
    Identities(Args),
    /// Bridge identities, then GramF = const GramA.
    Verify(Args),
}

#[derive(clap::Args)]
struct Args {
    /// TOML problem file.
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Longest bar tensor in the cycle search.
    #[arg(long)]
    length_cap: Option<usize>,
    /// Retract window as `LO,HI`.
    #[arg(long, allow_hyphen_values = true)]
    weight_window: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    margin: Option<i64>,
    /// Chern character truncation.
    #[arg(long)]
    u_order: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "OUT")]
    json: Option<PathBuf>,
    /// Test fixture: deliberately break one operator.
    #[arg(long, value_enum)]
    corrupt: Option<Corrupt>,
}

fn parse_window(s: &str) -> Result<[i64; 2], CliError> {
    let bad = || CliError::Config(format!("--weight-window expects LO,HI, got {s:?}"));
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    let lo = lo.trim().parse().map_err(|_| bad())?;
    let hi = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok([lo, hi])
}

fn settings(args: &Args, cfg: &ProblemConfig) -> Result<Settings, CliError> {
    let mut c = cfg.cutoffs.clone();
    if let Some(v) = args.seed {
        c.seed = v;
    }
    if let Some(v) = args.samples {
        c.samples = v;
    }
    if let Some(v) = args.length_cap {
        c.length_cap = v;
    }
    if let Some(w) = &args.weight_window {
        c.weight_window = Some(parse_window(w)?);
    }
    if let Some(v) = args.margin {
        c.margin = Some(v);
    }
    if let Some(v) = args.u_order {
        c.u_order = v;
    }
    Ok(Settings { cutoffs: c, corrupt: args.corrupt })
}

fn run(command: &Command) -> Result<Outcome, CliError> {
    let (Command::Milnor(args) | Command::Identities(args) | Command::Verify(args)) = command;
    let cfg = ProblemConfig::load(&args.config)?;
    let s = settings(args, &cfg)?;
    let p = cfg.problem()?;
    match command {
        Command::Milnor(_) => commands::milnor(&p, &s),
        Command::Identities(_) => commands::identities(&p, &s),
        Command::Verify(_) => commands::verify(&p, &s),
    }
}

fn emit(args: &Args, report: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report).expect("reports serialize");
    match &args.json {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| CliError::Resource(format!("{}: {e}", path.display()))),
        None => {
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout(), "{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (Command::Milnor(args) | Command::Identities(args) | Command::Verify(args)) = &cli.command;
    let (report, code) = match run(&cli.command) {
        Ok(o) => (o.report, o.code),
        Err(e) => {
            eprintln!("error: {e}");
            (serde_json::json!({ "error": e.to_string(), "exit_code": e.exit_code() }), e.exit_code())
        }
    };
    if let Err(e) = emit(args, &report) {
        eprintln!("error: {e}");
        return ExitCode::from(3);
    }
    ExitCode::from(code as u8)
}
