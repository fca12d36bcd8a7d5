use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;
use superrep_cli::{execute, CliError, CommandKind, Format, RunConfig};

#[derive(Parser)]
#[command(name = "superrep", version, about = "Cloning and superreplication evaluators")]
struct Cli {
    /// Read the whole run from a JSON RunConfig instead of flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file, written atomically; standard output when absent.
    #[arg(long, short, global = true)]
    output: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Parallel workers; SUPERREP_WORKERS takes precedence.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Fidelity of one N -> M equatorial cloner.
    Fidelity {
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        m: Option<u64>,
    },
    /// Data behind the figures.
    #[command(subcommand)]
    Figure(Figure),
    /// Replication reports over a grid of N and M = ratio * N.
    Table {
        #[arg(long)]
        kind: Option<String>,
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<u64>>,
        #[arg(long, value_delimiter = ',')]
        ratio: Option<Vec<u64>>,
    },
    /// Monte Carlo fidelity of the dense gate-replication network.
    GateSim {
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        probe: Option<String>,
    },
    /// Total-spin sectors of K qubits.
    Schur {
        #[arg(long)]
        k: Option<u64>,
    },
    /// Gate-estimation bounds; several N give a sweep.
    Estimate {
        #[arg(long)]
        d: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<u64>>,
        #[arg(long)]
        c_est: Option<f64>,
        #[arg(long)]
        outputs: Option<u64>,
    },
    /// Smallest interaction size for a divide-and-clone network.
    Plan {
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        target: Option<f64>,
    },
}

#[derive(Subcommand)]
enum Figure {
    /// Sequential network against one-shot cloners at M = K N.
    Sequential(SequentialArgs),
    /// Repeated probabilistic attempts: fidelity against cumulative success.
    QubitRecycle(RecycleArgs),
}

#[derive(Args)]
struct SequentialArgs {
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    k_max: Option<u64>,
}

#[derive(Args)]
struct RecycleArgs {
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    attempts: Option<u64>,
    #[arg(long)]
    policy: Option<String>,
}

struct ParamMap(BTreeMap<String, Value>);

impl ParamMap {
    fn set(&mut self, key: &str, value: Option<impl Into<Value>>) -> &mut Self {
        if let Some(v) = value {
            self.0.insert(key.to_string(), v.into());
        }
        self
    }
}

fn from_command(command: Command) -> (CommandKind, BTreeMap<String, Value>) {
    let mut p = ParamMap(BTreeMap::new());
    let kind = match command {
        Command::Fidelity { kind, n, m } => {
            p.set("kind", kind).set("n", n).set("m", m);
            CommandKind::Fidelity
        }
        Command::Figure(Figure::Sequential(a)) => {
            p.set("name", Some("sequential")).set("n", a.n).set("k_max", a.k_max);
            CommandKind::Figure
        }
        Command::Figure(Figure::QubitRecycle(a)) => {
            p.set("name", Some("qubit-recycle")).set("n", a.n).set("m", a.m).set("attempts", a.attempts);
            p.set("policy", a.policy);
            CommandKind::Figure
        }
        Command::Table { kind, n, ratio } => {
            p.set("kind", kind).set("n", n).set("ratio", ratio);
            CommandKind::Table
        }
        Command::GateSim { n, m, samples, probe } => {
            p.set("n", n).set("m", m).set("samples", samples).set("probe", probe);
            CommandKind::GateSim
        }
        Command::Schur { k } => {
            p.set("k", k);
            CommandKind::Schur
        }
        Command::Estimate { d, n, c_est, outputs } => {
            p.set("d", d).set("n", n).set("c_est", c_est).set("outputs", outputs);
            CommandKind::Estimate
        }
        Command::Plan { n, m, target } => {
            p.set("n", n).set("m", m).set("target", target);
            CommandKind::Plan
        }
    };
    (kind, p.0)
}

fn build(cli: Cli) -> Result<(RunConfig, usize), CliError> {
    let mut config = match (cli.config, cli.command) {
        (Some(_), Some(_)) => return Err(CliError::config("config", "give either --config or a subcommand, not both")),
        (None, None) => return Err(CliError::config("command", "no subcommand given")),
        (Some(path), None) => RunConfig::from_json_file(&path)?,
        (None, Some(command)) => {
            let (command, parameters) = from_command(command);
            RunConfig { command, parameters, seed: 0, output_path: String::new(), format: Format::Csv }
        }
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(output) = cli.output {
        config.output_path = output;
    }
    if let Some(format) = cli.format {
        config.format = format;
    }
    let workers = match std::env::var("SUPERREP_WORKERS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::config("SUPERREP_WORKERS", format!("expected a positive integer, got {v:?}")))?,
        Err(_) => cli.workers,
    };
    Ok((config, workers))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build(cli).and_then(|(config, workers)| execute(&config, workers).map(|out| (config, out)));
    match result {
        Ok((config, out)) => {
            if config.output_path.is_empty() {
                print!("{}", out.rendered);
                eprintln!("{}", out.summary);
            } else {
                println!("{} -> {}", out.summary, config.output_path);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("superrep: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
