use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use biaxframe::io::{self, output::fmt17};
use biaxframe::lp::WeakMetricConfig;
use biaxframe::{Error, Result};

/// Biaxial nematic frame hydrodynamics: simulation and dyadic diagnostics.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a configuration and print the coefficient inequalities.
    CheckCoeffs { config: PathBuf },
    /// Run one simulation.
    Run { config: PathBuf },
    /// Run a state and its perturbed twin and record the weak metrics.
    Twin {
        config: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
    },
    /// Weak metrics between two snapshots.
    LpAnalyze {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = WeakMetricConfig::DEFAULT_S)]
        s: f64,
    },
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("BIAXFRAME_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Configuration(vec![format!("BIAXFRAME_THREADS: {raw:?} is not a positive integer")]))?;
    // Fails only if a pool already exists, which cannot happen this early.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::CheckCoeffs { config } => {
            let cfg = io::parse_config(&config)?;
            cfg.elastic_params()?;
            for c in io::check_coeffs(&cfg) {
                println!("ok  {:<18} {:<14} lhs = {:.6e}, rhs = {:.6e}", c.key, c.inequality, c.lhs, c.rhs);
            }
            println!("all coefficient conditions hold");
        }
        Command::Run { config } => {
            let cfg = io::parse_config(&config)?;
            let s = io::run_job(&cfg)?;
            println!(
                "run finished: {} steps of dt = {:.6e} to t = {}; max relative energy residual {:.3e}; output in {}",
                s.steps,
                s.dt,
                s.final_state.t,
                s.max_relative_residual,
                s.dir.display()
            );
        }
        Command::Twin { config, eps } => {
            let cfg = io::parse_config(&config)?;
            let s = io::twin_job(&cfg, eps)?;
            let last = s.rows.last().expect("twin runs record at least two samples");
            println!(
                "twin finished: Φ(0) = {}, Φ(t_end) = {}",
                fmt17(s.rows[0].phi),
                fmt17(last.phi)
            );
            match s.gronwall {
                Some(c) => println!("fitted growth constant C = {c:.6e}"),
                None => println!("fitted growth constant undefined (Φ(0) = 0)"),
            }
            println!("output in {}", s.dir.display());
        }
        Command::LpAnalyze { a, b, s } => {
            let m = io::lp_analyze(&a, &b, s)?;
            println!("s,phi,u,v");
            println!("{},{},{},{}", fmt17(s), fmt17(m.phi), fmt17(m.u), fmt17(m.v));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("biaxframe: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
