//! `cqm`: run continuous-measurement scenarios from config files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cqm::scenario::{emit, parse_config, run_scenario, RunError, ScenarioKind};

#[derive(Parser)]
#[command(name = "cqm", version, about = "Continuous quantum measurement scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario, writing `<stem>.csv` and `<stem>.report.json`.
    Run {
        config: PathBuf,
        /// Output directory, overriding `[output] dir`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Parse and validate a config without running it.
    Validate { config: PathBuf },
    /// List the registered scenarios and their matrices.
    ListScenarios,
}

fn run(command: Command) -> Result<(), RunError> {
    match command {
        Command::Run {
            config,
            out_dir,
            t_final,
            dt,
        } => {
            let mut cfg = parse_config(&config)?;
            if let Some(dir) = out_dir {
                cfg.output_dir = dir;
            }
            if let Some(t) = t_final {
                cfg.t_final = t;
            }
            if let Some(h) = dt {
                cfg.dt = h;
            }
            let out = run_scenario(&cfg)?;
            let (csv, json) = emit(&cfg, &out)?;
            print!("{}", out.report.summary());
            println!("wrote {}", csv.display());
            println!("wrote {}", json.display());
        }
        Command::Validate { config } => {
            let cfg = parse_config(&config)?;
            println!(
                "{}: valid {} config (n = {})",
                config.display(),
                cfg.scenario,
                cfg.n
            );
        }
        Command::ListScenarios => {
            for kind in ScenarioKind::ALL {
                println!("{:<15} {}", kind.name(), kind.description());
                let names: Vec<String> = kind
                    .matrices()
                    .iter()
                    .map(|m| {
                        if m.required {
                            m.name.to_string()
                        } else {
                            format!("[{}]", m.name)
                        }
                    })
                    .collect();
                if !names.is_empty() {
                    println!("{:<15} matrices: {}", "", names.join(" "));
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
