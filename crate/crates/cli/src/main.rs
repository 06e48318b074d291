//! `llsim`: run scenarios, list the presets, run the verification suites.
//!
//! Exit status: 0 success, 1 invalid input, 2 numerical blow-up,
//! 3 verification failure.

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use llcontrol::batch::{self, Execution};
use llcontrol::config;
use llcontrol::integrator::RunError;
use llcontrol::output;
use llcontrol::presets;
use llcontrol::report;
use llcontrol::scenario::ScenarioConfig;
use llcontrol::verify;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "llsim", version, about = "Controlled Landau-Lifshitz simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenarios; several run concurrently, each in its own directory.
    Run {
        /// Scenario file (repeatable).
        #[arg(long = "config", value_name = "FILE")]
        configs: Vec<PathBuf>,
        /// Built-in scenario name, fig1 ... fig6 (repeatable).
        #[arg(long = "preset", value_name = "NAME")]
        presets: Vec<String>,
        /// Output directory; with several scenarios each writes to DIR/<name>.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Override the number of elements.
        #[arg(long, value_name = "N")]
        elements: Option<usize>,
        /// Override the time step.
        #[arg(long, value_name = "DT")]
        dt: Option<f64>,
        /// Run scenarios one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// List the built-in scenarios.
    Presets {
        /// Print the full scenario file of one preset.
        #[arg(long, value_name = "NAME")]
        show: Option<String>,
    },
    /// Run the property suites.
    Verify {
        #[arg(value_enum, default_value_t = Level::Fast)]
        level: Level,
        /// Seed for the randomized sweeps.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Run suites one after another.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Fast,
    Full,
}

enum Failure {
    Invalid(anyhow::Error),
    BlowUp,
    Verification,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Invalid(e)
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn collect_scenarios(
    configs: &[PathBuf],
    names: &[String],
    out: Option<PathBuf>,
    elements: Option<usize>,
    dt: Option<f64>,
) -> anyhow::Result<Vec<ScenarioConfig>> {
    let mut scenarios = Vec::new();
    for path in configs {
        scenarios.push(config::parse_file(path).with_context(|| format!("in {}", path.display()))?);
    }
    for name in names {
        match presets::preset(name) {
            Some(p) => scenarios.push(p),
            None => bail!("unknown preset `{name}` (known: {})", presets::NAMES.join(", ")),
        }
    }
    if scenarios.is_empty() {
        bail!("nothing to run: give --config FILE or --preset NAME");
    }
    let several = scenarios.len() > 1;
    for s in &mut scenarios {
        if let Some(n) = elements {
            s.n_elements = n;
        }
        if let Some(dt) = dt {
            if !(dt > 0.0 && dt.is_finite()) {
                bail!("--dt must be finite and > 0, got {dt}");
            }
            s.integrator.dt = Some(dt);
        }
        if let Some(out) = &out {
            s.output.dir = if several { out.join(&s.name) } else { out.clone() };
        }
    }
    let mut dirs: Vec<_> = scenarios.iter().map(|s| &s.output.dir).collect();
    dirs.sort();
    if let Some(w) = dirs.windows(2).find(|w| w[0] == w[1]) {
        bail!("two scenarios would write to {}", w[0].display());
    }
    for s in &scenarios {
        s.prepare().with_context(|| format!("scenario `{}`", s.name))?;
    }
    Ok(scenarios)
}

enum Outcome {
    Done(String),
    BlownUp(String),
}

fn run_one(s: &ScenarioConfig) -> anyhow::Result<Outcome> {
    let prep = s.prepare()?;
    match prep.execute() {
        Ok(traj) => {
            let summary = report::summarize(&s.name, &prep, &traj, s.reference_settle)?;
            let written = output::write_run(s, &traj, Some(&summary))?;
            Ok(Outcome::Done(format!("{summary}  wrote {} files to {}\n", written.len(), s.output.dir.display())))
        }
        Err(RunError::BlowUp { t, phase, partial }) => {
            let written = output::write_run(s, &partial, None)?;
            Ok(Outcome::BlownUp(format!(
                "scenario {}: numerical blow-up at t = {t:.6} in phase {}; partial output ({} files) in {}\n",
                s.name,
                phase + 1,
                written.len(),
                s.output.dir.display()
            )))
        }
        Err(RunError::Invalid(e)) => Err(e.into()),
    }
}

fn cmd_run(
    configs: Vec<PathBuf>,
    names: Vec<String>,
    out: Option<PathBuf>,
    elements: Option<usize>,
    dt: Option<f64>,
    sequential: bool,
) -> Result<(), Failure> {
    let scenarios = collect_scenarios(&configs, &names, out, elements, dt)?;
    let results = batch::map(execution(sequential), &scenarios, run_one);
    let mut blown = false;
    let mut first_err = None;
    for (s, r) in scenarios.iter().zip(results) {
        match r {
            Ok(Outcome::Done(text)) => print!("{text}"),
            Ok(Outcome::BlownUp(text)) => {
                eprint!("{text}");
                blown = true;
            }
            Err(e) => {
                let e = e.context(format!("scenario `{}`", s.name));
                eprintln!("error: {e:#}");
                first_err.get_or_insert(e);
            }
        }
    }
    if let Some(e) = first_err {
        return Err(Failure::Invalid(e));
    }
    if blown {
        return Err(Failure::BlowUp);
    }
    Ok(())
}

fn cmd_presets(show: Option<String>) -> Result<(), Failure> {
    match show {
        Some(name) => match presets::preset(&name) {
            Some(p) => print!("{}", config::to_config_string(&p)),
            None => {
                return Err(anyhow::anyhow!("unknown preset `{name}` (known: {})", presets::NAMES.join(", ")).into())
            }
        },
        None => {
            for name in presets::NAMES {
                println!("{name}  {}", presets::description(name).unwrap_or_default());
            }
            println!("all: 12 elements, nu = 0.02, L = 1, m0 = (sin 2πx, cos 2πx, 0); phases end on settle");
        }
    }
    Ok(())
}

fn cmd_verify(level: Level, seed: u64, sequential: bool) -> Result<(), Failure> {
    let level = match level {
        Level::Fast => verify::Level::Fast,
        Level::Full => verify::Level::Full,
    };
    let report = verify::run_all(&verify::Options {
        level,
        seed,
        execution: execution(sequential),
    });
    println!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run {
            configs,
            presets,
            out,
            elements,
            dt,
            sequential,
        } => cmd_run(configs, presets, out, elements, dt, sequential),
        Command::Presets { show } => cmd_presets(show),
        Command::Verify { level, seed, sequential } => cmd_verify(level, seed, sequential),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::BlowUp) => ExitCode::from(2),
        Err(Failure::Verification) => ExitCode::from(3),
    }
}
