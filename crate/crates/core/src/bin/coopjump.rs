use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coopjump::cli::{self, Options};
use coopjump::Result;

#[derive(Parser)]
#[command(name = "coopjump", version, about = "Intensity-period transition rates and jump statistics of three coupled atoms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// All rate columns over the sweep grid, or at one distance with --r.
    Rates(Common),
    /// Requested columns over the sweep grid.
    Sweep(Common),
    /// Monte Carlo trajectories compared with the predicted rates.
    Trajectories(Common),
    /// Double and triple jump rates over the sweep grid.
    Djtj(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of trajectory seeds, 0..N.
    #[arg(long)]
    seeds: Option<u64>,
    /// Simulated time per trajectory in seconds.
    #[arg(long)]
    duration: Option<f64>,
    /// Resolution time T_m in seconds.
    #[arg(long)]
    tm: Option<f64>,
    /// Distance in units of λ3.
    #[arg(long)]
    r: Option<f64>,
}

impl Common {
    fn options(&self) -> Options {
        Options {
            config: self.config.clone(),
            preset: self.preset.clone(),
            out: self.out.clone(),
            seeds: self.seeds,
            duration: self.duration,
            t_m: self.tm,
            r: self.r,
        }
    }
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli::threads_from_env()? {
        // Fails only if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Rates(c) => {
            let res = cli::resolve(&c.options())?;
            cli::run_rates(&res, c.r.is_some(), &mut sink(&c.out)?)
        }
        Command::Sweep(c) => cli::run_sweep(&cli::resolve(&c.options())?, &mut sink(&c.out)?),
        Command::Djtj(c) => cli::run_djtj(&cli::resolve(&c.options())?, &mut sink(&c.out)?),
        Command::Trajectories(c) => {
            let res = cli::resolve(&c.options())?;
            let report = cli::trajectories(&res.trajectories)?;
            cli::write_per_seed(&report, &mut sink(&c.out)?)?;
            match &c.out {
                Some(p) => cli::write_pooled(&report, &mut BufWriter::new(File::create(cli::pooled_path(p))?)),
                None => cli::write_pooled(&report, &mut io::stderr().lock()),
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("coopjump: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
