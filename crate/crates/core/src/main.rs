use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use headstab::metrics_harness::{run_experiment, MetricsReport, Scenario};
use headstab::{Config, Mode, Result};

#[derive(Parser)]
#[command(name = "headstab", version, about = "Wheeled-biped head-height stabilization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Exp1,
    Exp2,
    Exp3,
    Flat,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::Exp1 => Scenario::Exp1,
            ScenarioArg::Exp2 => Scenario::Exp2,
            ScenarioArg::Exp3 => Scenario::Exp3,
            ScenarioArg::Flat => Scenario::Flat,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Baseline,
    Proposed,
    Both,
}

impl ModeArg {
    fn modes(self) -> &'static [Mode] {
        match self {
            ModeArg::Baseline => &[Mode::Baseline],
            ModeArg::Proposed => &[Mode::Proposed],
            ModeArg::Both => &[Mode::Baseline, Mode::Proposed],
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write traces and a report.
    Run {
        #[arg(long, value_enum)]
        scenario: ScenarioArg,
        #[arg(long, value_enum, default_value = "both")]
        mode: ModeArg,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Sensor-noise seed; overrides `run.seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the metrics table stored in a run directory.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Re-run a scenario for each value of one config key.
    Sweep {
        /// Dotted config key, e.g. `admittance.k_ad`.
        #[arg(long)]
        param: String,
        /// Comma-separated TOML literals.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        values: Vec<String>,
        #[arg(long, value_enum, default_value = "exp1")]
        scenario: ScenarioArg,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Optional CSV file for the sweep table.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: Option<&PathBuf>, seed: Option<u64>) -> Result<Config> {
    let mut cfg = match path {
        Some(p) => Config::load(p)?,
        None => Config::default().resolved()?,
    };
    if let Some(seed) = seed {
        cfg.run.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            scenario,
            mode,
            config,
            out,
            seed,
        } => {
            let cfg = load_config(config.as_ref(), seed)?;
            let result = run_experiment(&cfg, scenario.into(), mode.modes())?;
            result.write(&out, cfg.run.plot_stride)?;
            std::fs::write(out.join("config_used.toml"), cfg.to_toml_string()?)?;
            print!("{}", result.report.to_table());
            println!("wrote {}", out.display());
        }
        Command::Report { input } => {
            let text = std::fs::read_to_string(input.join("report.json"))?;
            print!("{}", MetricsReport::from_json(&text)?.to_table());
        }
        Command::Sweep {
            param,
            values,
            scenario,
            config,
            seed,
            out,
        } => {
            let base = load_config(config.as_ref(), seed)?;
            let mut rows = Vec::new();
            let header = {
                let names: Vec<String> = MetricsReport::build("", 0.0, None, None)
                    .rows
                    .iter()
                    .map(|r| format!("{}_improvement_pct", r.metric))
                    .collect();
                format!("{param},{}", names.join(","))
            };
            println!("{header}");
            for value in &values {
                let cfg = base.with_override(&param, value)?;
                let line = match run_experiment(&cfg, scenario.into(), &[Mode::Baseline, Mode::Proposed]) {
                    Ok(result) => {
                        let cells: Vec<String> = result
                            .report
                            .rows
                            .iter()
                            .map(|r| r.improvement.map_or_else(String::new, |v| format!("{v:.3}")))
                            .collect();
                        format!("{value},{}", cells.join(","))
                    }
                    Err(e) => {
                        eprintln!("{param} = {value}: {e}");
                        format!("{value}{}", ",".repeat(6))
                    }
                };
                println!("{line}");
                rows.push(line);
            }
            if let Some(path) = out {
                std::fs::write(path, format!("{header}\n{}\n", rows.join("\n")))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
