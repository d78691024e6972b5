use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use skewlab_cli::params::{load_config_file, parse_assignment};
use skewlab_cli::{list_experiments, report_path, run, CliError, ExperimentConfig, EXIT_CHECK_FAILED, EXIT_PASS};

#[derive(Parser)]
#[command(name = "skewlab", version, about = "Run skewlab experiments and write JSON/CSV reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run {
        #[arg(long)]
        experiment: String,
        /// Flat JSON object of parameters.
        #[arg(long)]
        config: Option<PathBuf>,
        /// `key=value` override, applied after the config file. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// List the registered experiments.
    List {
        #[arg(long)]
        json: bool,
    },
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::List { json } => {
            let list = list_experiments();
            if json {
                println!("{}", serde_json::to_string_pretty(&list).expect("registry serializes"));
            } else {
                let width = list.iter().map(|e| e.name.len()).max().unwrap_or(0);
                for e in list {
                    println!("{:width$}  [{}]  {}", e.name, e.paper_anchor, e.summary);
                }
            }
            Ok(EXIT_PASS)
        }
        Command::Run { experiment, config, set, out } => {
            let mut params = match config {
                Some(path) => load_config_file(&path)?,
                None => BTreeMap::new(),
            };
            for raw in &set {
                let (key, value) = parse_assignment(raw)?;
                params.insert(key, value);
            }
            let config = ExperimentConfig { name: experiment, params, output_dir: out };
            let report = run(&config)?;
            print!("{}", report.summary());
            println!("report: {}", report_path(&config.output_dir, &report.name).display());
            Ok(if report.passed() { EXIT_PASS } else { EXIT_CHECK_FAILED })
        }
    }
}

fn main() -> ExitCode {
    let code = match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
