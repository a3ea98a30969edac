use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spinlattice::analysis::Axis;
use spinlattice::beamline::Objective;
use spinlattice::run::{run, Command, OutputSet, RunSpec};
use spinlattice::Execution;

#[derive(Parser)]
#[command(name = "spinlattice", version, about = "Spin-orbit lattice beamline simulator")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate one configuration and analyze the camera image.
    Run(Common),
    /// Repeat a run over the values of the config's [sweep] section.
    Sweep(Common),
    /// Tune coil currents to maximize an image objective.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        objective: Option<ObjectiveArg>,
        /// Comma-separated 1-based coil numbers; all coils when omitted.
        #[arg(long, value_delimiter = ',')]
        free: Option<Vec<usize>>,
    },
    /// Parse and validate a configuration without running it.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Packaged scenario: fig2a, fig2b, fig2c, fig3.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rays: Option<usize>,
    /// Also write every image as CSV.
    #[arg(long)]
    csv: bool,
    /// Run on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    VisibilityX,
    VisibilityY,
    Contrast,
    Fidelity,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::VisibilityX => Objective::Visibility(Axis::X),
            ObjectiveArg::VisibilityY => Objective::Visibility(Axis::Y),
            ObjectiveArg::Contrast => Objective::LatticeContrast,
            ObjectiveArg::Fidelity => Objective::FidelityToIdeal,
        }
    }
}

fn spec(c: Common) -> RunSpec {
    RunSpec {
        config: c.config,
        scenario: c.scenario,
        out: c.out,
        seed: c.seed,
        rays: c.rays,
        csv: c.csv,
        outputs: OutputSet::default(),
        exec: if c.sequential { Execution::Sequential } else { Execution::Parallel },
        objective: None,
        free: None,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, spec) = match cli.command {
        Cmd::Run(c) => (Command::Run, spec(c)),
        Cmd::Sweep(c) => (Command::Sweep, spec(c)),
        Cmd::Validate(c) => (Command::Validate, spec(c)),
        Cmd::Optimize { common, objective, free } => {
            if let Some(f) = &free {
                if f.contains(&0) {
                    eprintln!("error: coil numbers start at 1");
                    return ExitCode::from(2);
                }
            }
            let mut s = spec(common);
            s.objective = objective.map(Into::into);
            s.free = free.map(|f| f.into_iter().map(|i| i - 1).collect());
            (Command::Optimize, s)
        }
    };
    match run(command, &spec) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error [{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
