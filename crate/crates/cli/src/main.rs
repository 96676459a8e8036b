use std::path::PathBuf;
use std::process::ExitCode;

use bohmlab::runner::{self, ExperimentConfig, RunRequest, EXIT_CONFIG};
use clap::{Parser, Subcommand};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "bohmlab", version, about = "Pilot-wave and lattice-field numerical experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment; exits 0 pass, 1 assertion failure, 2 bad config,
    /// 3 unknown experiment, 4 runtime error.
    Run {
        experiment: String,
        /// JSON config file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory [default: $BOHMLAB_OUT/<experiment> or bohmlab-out/<experiment>].
        #[arg(long)]
        out: Option<PathBuf>,
        /// Lattice site count, for experiments that take one.
        #[arg(long)]
        sites: Option<usize>,
        /// Parameter override KEY=VALUE; VALUE is JSON, or a plain string.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// List experiments.
    List {
        #[arg(long)]
        json: bool,
    },
}

fn parse_set(item: &str) -> Result<(String, Value), String> {
    let (key, raw) = item.split_once('=').ok_or_else(|| format!("--set expects KEY=VALUE, got `{item}`"))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok((key.to_string(), value))
}

fn list(json: bool) -> ExitCode {
    let catalog = runner::list_experiments();
    if json {
        println!("{}", serde_json::to_string_pretty(catalog).expect("catalog serializes"));
    } else {
        let width = catalog.iter().map(|e| e.name.len()).max().unwrap_or(0);
        for e in catalog {
            println!("{:width$}  {}  [{}]", e.name, e.description, e.reference);
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, config, seed, out, sites, set) = match cli.command {
        Command::List { json } => return list(json),
        Command::Run { experiment, config, seed, out, sites, set } => (experiment, config, seed, out, sites, set),
    };
    let mut req = RunRequest::new(&experiment);
    req.seed = seed;
    req.output = out;
    if let Some(path) = config {
        match ExperimentConfig::load(&path) {
            Ok(c) => req.config = c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        }
    }
    if let Some(n) = sites {
        req.params.insert("sites".into(), n.into());
    }
    for item in &set {
        match parse_set(item) {
            Ok((k, v)) => {
                req.params.insert(k, v);
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        }
    }

    let result = runner::run(&req);
    let code = runner::exit_code(&result);
    match &result {
        Ok(o) => {
            for a in &o.metadata.assertions {
                let mark = if a.passed { "ok  " } else { "FAIL" };
                println!("{mark} {} = {:.6e} ({} {:.3e})", a.name, a.value, a.relation, a.bound);
            }
            for w in &o.metadata.warnings {
                eprintln!("warning: {w}");
            }
            println!("{} {} -> {}", if o.passed() { "PASS" } else { "FAIL" }, experiment, o.output.display());
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(code as u8)
}
