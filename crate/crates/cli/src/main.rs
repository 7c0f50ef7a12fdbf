use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use hannay_lab::{execute, render_table, sweep, verify, write_artifacts, Scenario, Suite};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Equivalence,
    Multipliers,
    Phases,
    All,
}

#[derive(Parser)]
#[command(name = "hannay-lab", version, about = "Adiabatic phases, canonical equivalences and last multipliers")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Integrator tolerance, overriding the scenario.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write SVG plots.
    #[arg(long, global = true, value_enum)]
    plots: Option<Switch>,
    /// Worker threads for sweeps and verification.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write trajectory, summary and plots.
    Run { scenario: PathBuf },
    /// Repeat a scenario across slowness values.
    Sweep {
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        epsilons: Vec<f64>,
    },
    /// Run an acceptance suite and print a pass/fail table.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
    },
}

fn load(path: &Path, tol: Option<f64>) -> Result<Scenario> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let s = Scenario::parse(&text).with_context(|| format!("in {}", path.display()))?;
    Ok(match tol {
        Some(t) => s.with_tolerance(t)?,
        None => s,
    })
}

fn out_dir(cli: &Cli, s: &Scenario) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| s.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("hannay-out").join(&s.name))
}

fn main_inner(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Run { scenario } => {
            let mut s = load(scenario, cli.tol)?;
            if let Some(p) = cli.plots {
                s.output.plots = p == Switch::On;
            }
            let out = execute(&s)?;
            let dir = out_dir(cli, &s);
            write_artifacts(&out, &dir)?;
            println!("{}", serde_json::to_string_pretty(&out.summary)?);
            eprintln!("wrote {} ({:.3} s)", dir.display(), out.summary.wall_time);
            Ok(true)
        }
        Command::Sweep { scenario, epsilons } => {
            let s = load(scenario, cli.tol)?;
            let table = sweep(&s, epsilons, cli.jobs)?;
            let dir = out_dir(cli, &s);
            let plots = cli.plots.map_or(s.output.plots, |p| p == Switch::On);
            hannay_lab::sweep::write_sweep(&table, &dir, plots)?;
            print!("{}", hannay_lab::sweep::to_csv(&table));
            Ok(table.iter().all(|(_, r)| r.is_ok()))
        }
        Command::Verify { suite } => {
            let suites: Vec<Suite> = match suite {
                SuiteArg::Equivalence => vec![Suite::Equivalence],
                SuiteArg::Multipliers => vec![Suite::Multipliers],
                SuiteArg::Phases => vec![Suite::Phases],
                SuiteArg::All => Suite::ALL.to_vec(),
            };
            let checks = verify(&suites, cli.jobs)?;
            print!("{}", render_table(&checks));
            if let Some(dir) = &cli.out {
                fs::create_dir_all(dir)?;
                fs::write(dir.join("verify.json"), serde_json::to_string_pretty(&checks)? + "\n")?;
            }
            Ok(hannay_lab::verify::all_pass(&checks))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
