use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use duality_core::Execution;
use duality_lab::commands::{self, Options};
use duality_lab::CliError;

const THREADS_ENV: &str = "DUALITY_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "duality-lab", version, about = "Multipath interference and wave-particle duality measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario (or sweep) config, JSON.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Write/read screen positions in units of the fringe width.
    #[arg(long)]
    scale_w: bool,
    /// Overrides every seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pattern, duality report, analysis and (if enabled) oracle outputs.
    Run(Common),
    /// Analytic pattern CSV.
    Pattern(Common),
    /// Duality report JSON.
    Measures(Common),
    /// Operational visibilities from a pattern CSV.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Pattern CSV to analyze.
        #[arg(long)]
        input: PathBuf,
    },
    /// Monte-Carlo pattern and convergence report.
    McValidate(Common),
    /// Ensemble sweep table.
    Sweep(Common),
    /// n-point degree of coherence of a scenario or coherence-matrix file.
    GammaN(Common),
}

fn execution() -> Execution {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0);
    match threads {
        Some(1) => Execution::Sequential,
        Some(t) => {
            #[cfg(feature = "parallel")]
            {
                // Fails only if the pool was already built.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
            let _ = t;
            Execution::default()
        }
        None => Execution::default(),
    }
}

fn options(c: &Common) -> Options {
    Options {
        out: c.out.clone(),
        scale_w: c.scale_w,
        seed: c.seed,
        exec: execution(),
    }
}

fn dispatch(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Run(c) => {
            let r = commands::run_scenario(&c.config, &options(c))?;
            println!("v_c={} d={} d_prime={} pyth_lhs={} lin_lhs={}", r.v_c, r.d, r.d_prime, r.pyth_lhs, r.lin_lhs);
        }
        Command::Pattern(c) => commands::cmd_pattern(&c.config, &options(c))?,
        Command::Measures(c) => {
            let r = commands::cmd_measures(&c.config, &options(c))?;
            println!("{}", r.to_json_pretty());
        }
        Command::Analyze { common, input } => {
            let a = commands::cmd_analyze(&common.config, input, &options(common))?;
            println!(
                "v_c_operational={} v_c_analytic={} agree={}",
                a.v_c_operational, a.v_c_analytic, a.agree
            );
        }
        Command::McValidate(c) => commands::cmd_mc_validate(&c.config, &options(c))?,
        Command::Sweep(c) => {
            let r = commands::cmd_sweep(&c.config, &options(c))?;
            let s = r.summary;
            println!(
                "instances={} max_pyth_lhs={} max_lin_lhs={} max_residual={:e}",
                s.instances,
                s.max_pyth_lhs,
                s.max_lin_lhs,
                s.max_pyth_residual.max(s.max_lin_residual)
            );
        }
        Command::GammaN(c) => println!("{}", commands::cmd_gamma_n(&c.config, &options(c))?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
