use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use raxcode::{execute, write_atomic, CliError, CliResult, Command, Experiment, Format};

#[derive(Parser)]
#[command(name = "raxcode", version, about = "Error exponents, bounds and simulation for random access channel coding")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Achievability of every rate vector
    Region(Args),
    /// Exponent terms and the system exponent lower bound
    Exponent(Args),
    /// Error probability bound over the block lengths
    Bound(Args),
    /// Monte Carlo estimates next to the bound
    Simulate(Args),
    /// Exponent and bound over a rate grid
    Sweep(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Overrides the simulation seed
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for simulation (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy)]
enum FormatArg {
    Csv,
    Json,
}

fn run(cmd: Command, args: Args) -> CliResult<()> {
    let mut exp = Experiment::load(&args.config)?;
    if let (Some(seed), Some(sim)) = (args.seed, exp.simulation.as_mut()) {
        sim.seed = seed;
    }
    let format = match args.format {
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Json) => Format::Json,
        None => exp.format,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = args.threads {
        if t == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let table = pool.install(|| execute(cmd, &exp))?;
    let text = table.render(format);
    match args.out {
        Some(p) => write_atomic(&p, text.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Write {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, args) = match cli.command {
        Cmd::Region(a) => (Command::Region, a),
        Cmd::Exponent(a) => (Command::Exponent, a),
        Cmd::Bound(a) => (Command::Bound, a),
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
    };
    match run(cmd, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("raxcode: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
