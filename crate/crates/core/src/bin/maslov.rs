use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use maslov::io::{
    run, BrakeSpec, BrakeTask, CoefficientSpec, FlowTask, FrameSpec, HillTask, HormanderTask, ModelSpec,
    OscillatorTask, Report, RunConfig, Task, TripleTask,
};
use maslov::models::{OscillatorFamily, PotentialModel, SyntheticSystem};

/// Maslov-type indices of Lagrangian paths and Morse indices of brake orbits.
#[derive(Parser, Debug)]
#[command(name = "maslov", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON configuration; its "command" must match the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Rank tolerance for frames and intersections.
    #[arg(long, env = "MASLOV_TOL", global = true)]
    tol: Option<f64>,
    /// Number of grid cells of the crossing pre-scan.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print a one-line summary instead of the JSON report.
    #[arg(long, global = true)]
    summary: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// CLM index of t -> psi(t) W against a fixed Lagrangian.
    Clm(FlowArgs),
    /// Robbin-Salamon index of the same pair.
    Rs(FlowArgs),
    /// Triple index of three named Lagrangians.
    Triple(TripleArgs),
    /// Hörmander index of four named Lagrangians.
    Hormander(HormanderArgs),
    /// Morse index of a periodic brake orbit.
    BrakeIndex(BrakeArgs),
    /// Anisotropic oscillator families with the expected index.
    Oscillator(OscillatorArgs),
    /// Hill region of an example potential.
    Hill(HillArgs),
    /// Run a configuration file whatever its command.
    Run(Common),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FrameName {
    Dirichlet,
    Neumann,
    Diagonal,
}

fn frame(name: FrameName, n: usize) -> FrameSpec {
    match name {
        FrameName::Dirichlet => FrameSpec::Dirichlet { n },
        FrameName::Neumann => FrameSpec::Neumann { n },
        FrameName::Diagonal => FrameSpec::Diagonal { n },
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum ModelName {
    Oscillator,
    Ball,
    Synthetic,
    Kepler,
    Singular,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SystemName {
    CoupledPair,
    ThreeDof,
    Saddle,
    PeriodicIdentity,
}

impl From<SystemName> for SyntheticSystem {
    fn from(s: SystemName) -> Self {
        match s {
            SystemName::CoupledPair => SyntheticSystem::CoupledPair,
            SystemName::ThreeDof => SyntheticSystem::ThreeDof,
            SystemName::Saddle => SyntheticSystem::Saddle,
            SystemName::PeriodicIdentity => SyntheticSystem::PeriodicIdentity,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Family {
    I,
    Ii,
}

impl From<Family> for OscillatorFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::I => OscillatorFamily::I,
            Family::Ii => OscillatorFamily::II,
        }
    }
}

#[derive(Args, Debug)]
struct FlowArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    model: Option<ModelName>,
    #[arg(long)]
    mu: Option<f64>,
    /// Degrees of freedom of the ballistic model.
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, value_enum)]
    system: Option<SystemName>,
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    interval: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "neumann")]
    start: FrameName,
    #[arg(long, value_enum, default_value = "dirichlet")]
    reference: FrameName,
}

#[derive(Args, Debug)]
struct TripleArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, value_enum)]
    alpha: Option<FrameName>,
    #[arg(long, value_enum)]
    beta: Option<FrameName>,
    #[arg(long, value_enum)]
    gamma: Option<FrameName>,
}

#[derive(Args, Debug)]
struct HormanderArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, value_enum)]
    lambda1: Option<FrameName>,
    #[arg(long, value_enum)]
    lambda2: Option<FrameName>,
    #[arg(long, value_enum)]
    mu1: Option<FrameName>,
    #[arg(long, value_enum)]
    mu2: Option<FrameName>,
}

#[derive(Args, Debug)]
struct BrakeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    model: Option<ModelName>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, value_enum, default_value = "i")]
    family: Family,
    #[arg(long, value_enum)]
    system: Option<SystemName>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    period: Option<f64>,
    /// Also evaluate the half-period doubling formula.
    #[arg(long)]
    shear: bool,
    /// Skip the decomposition and geometric-index cross-checks.
    #[arg(long)]
    fast: bool,
}

#[derive(Args, Debug)]
struct OscillatorArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    e: f64,
    #[arg(long, default_value_t = 0.0)]
    d0: f64,
    #[arg(long, value_enum, default_value = "i")]
    family: Family,
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args, Debug)]
struct HillArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    model: Option<ModelName>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Energy level.
    #[arg(long, allow_hyphen_values = true)]
    k: Option<f64>,
}

fn need<T>(v: Option<T>, flag: &str) -> anyhow::Result<T> {
    v.with_context(|| format!("missing --{flag} (or pass --config)"))
}

fn load_config(path: &PathBuf, expected: Option<&str>) -> anyhow::Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config = RunConfig::from_json(&text)?;
    if let Some(name) = expected {
        if config.task.name() != name {
            bail!("config command `{}` does not match subcommand `{name}`", config.task.name());
        }
    }
    Ok(config)
}

fn build(command: &Command) -> anyhow::Result<(RunConfig, Common)> {
    let (common, name) = match command {
        Command::Clm(a) => (&a.common, Some("clm")),
        Command::Rs(a) => (&a.common, Some("rs")),
        Command::Triple(a) => (&a.common, Some("triple")),
        Command::Hormander(a) => (&a.common, Some("hormander")),
        Command::BrakeIndex(a) => (&a.common, Some("brake-index")),
        Command::Oscillator(a) => (&a.common, Some("oscillator")),
        Command::Hill(a) => (&a.common, Some("hill")),
        Command::Run(c) => (c, None),
    };
    let mut config = match &common.config {
        Some(path) => load_config(path, name)?,
        None => RunConfig::new(task_from_flags(command)?),
    };
    if let Some(t) = common.tol {
        config.tolerances.tol = Some(t);
    }
    if let Some(g) = common.grid {
        config.tolerances.grid = Some(g);
    }
    config.tolerances.validate()?;
    if common.out.is_some() {
        config.out = common.out.clone();
    }
    Ok((config, common.clone()))
}

fn task_from_flags(command: &Command) -> anyhow::Result<Task> {
    Ok(match command {
        Command::Clm(a) | Command::Rs(a) => {
            let coefficients = match need(a.model, "model")? {
                ModelName::Oscillator => CoefficientSpec::Model(ModelSpec::Oscillator { mu: need(a.mu, "mu")? }),
                ModelName::Ball => CoefficientSpec::Model(ModelSpec::Ball { n: a.n }),
                ModelName::Synthetic => CoefficientSpec::Model(ModelSpec::Synthetic {
                    system: need(a.system, "system")?.into(),
                    epsilon: None,
                }),
                other => bail!("model {other:?} has no coefficient path"),
            };
            let n = match &coefficients {
                CoefficientSpec::Model(ModelSpec::Oscillator { .. }) => 2,
                CoefficientSpec::Model(ModelSpec::Ball { n }) => n - 1,
                CoefficientSpec::Model(ModelSpec::Synthetic { system, .. }) => system.n(),
                _ => unreachable!(),
            };
            let interval = need(a.interval.clone(), "interval")?;
            let flow = FlowTask {
                coefficients,
                interval: [interval[0], interval[1]],
                start: frame(a.start, n),
                reference: frame(a.reference, n),
            };
            if matches!(command, Command::Clm(_)) {
                Task::Clm(flow)
            } else {
                Task::Rs(flow)
            }
        }
        Command::Triple(a) => Task::Triple(TripleTask {
            alpha: frame(need(a.alpha, "alpha")?, a.n),
            beta: frame(need(a.beta, "beta")?, a.n),
            gamma: frame(need(a.gamma, "gamma")?, a.n),
        }),
        Command::Hormander(a) => Task::Hormander(HormanderTask {
            lambda1: frame(need(a.lambda1, "lambda1")?, a.n),
            lambda2: frame(need(a.lambda2, "lambda2")?, a.n),
            mu1: frame(need(a.mu1, "mu1")?, a.n),
            mu2: frame(need(a.mu2, "mu2")?, a.n),
        }),
        Command::BrakeIndex(a) => {
            let system = match need(a.model, "model")? {
                ModelName::Oscillator => BrakeSpec::Oscillator {
                    mu: need(a.mu, "mu")?,
                    family: a.family.into(),
                    epsilon: a.epsilon,
                },
                ModelName::Synthetic => BrakeSpec::Synthetic {
                    system: need(a.system, "system")?.into(),
                    epsilon: a.epsilon,
                    period: a.period,
                },
                other => bail!("model {other:?} is not a brake-orbit model"),
            };
            Task::BrakeIndex(BrakeTask {
                system,
                shear: a.shear,
                fast: a.fast,
            })
        }
        Command::Oscillator(a) => Task::Oscillator(OscillatorTask {
            mu: need(a.mu, "mu")?,
            e: a.e,
            d0: a.d0,
            family: a.family.into(),
            epsilon: a.epsilon,
        }),
        Command::Hill(a) => {
            let model = match need(a.model, "model")? {
                ModelName::Oscillator => PotentialModel::AnisotropicOscillator { mu: need(a.mu, "mu")? },
                ModelName::Kepler => PotentialModel::AnisotropicKepler { nu: need(a.nu, "nu")? },
                ModelName::Singular => PotentialModel::HomogeneousSingular { alpha: need(a.alpha, "alpha")? },
                other => bail!("model {other:?} has no potential"),
            };
            Task::Hill(HillTask { model, k: need(a.k, "k")? })
        }
        Command::Run(_) => bail!("run needs --config"),
    })
}

fn summary(report: &Report) -> String {
    let value = report
        .result
        .get("total")
        .or_else(|| report.result.get("index"))
        .or_else(|| report.result.get("region"))
        .map(|v| v.to_string())
        .unwrap_or_default();
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    format!("{}: {} ({} checks, {} failed)", report.command, value, report.checks.len(), failed)
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    let (config, common) = build(&cli.command)?;
    let report = run(&config)?;
    let text = if common.summary {
        summary(&report)
    } else {
        serde_json::to_string_pretty(&report)?
    };
    match &config.out {
        Some(path) => fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = writeln!(stdout, "{text}") {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(e.into());
                }
            }
        }
    }
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("warning: check failed: {} ({})", c.name, c.detail);
    }
    Ok(())
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
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let degenerate = e.downcast_ref::<maslov::Error>().is_some_and(|e| e.is_degenerate());
            ExitCode::from(if degenerate { 2 } else { 1 })
        }
    }
}
