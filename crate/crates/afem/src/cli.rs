use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::config::{ConfigFile, Mode, RunConfig};
use crate::error::{AfemError, Result};
use crate::rates::{fit_rates, Quantity, Window};
use crate::runner::{cross_check, execute};

#[derive(Debug, Parser)]
#[command(name = "afem", version, about = "Adaptive P1 finite elements for obstacle problems with Dirichlet data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the adaptive or uniform loop and write one CSV row per level.
    Run(RunArgs),
    /// Fit log(quantity) against log(N) from a level CSV.
    Fit(FitArgs),
    /// Compare the active set solver with projected SOR on random problems.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// example1, example2 or custom:<path>
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Marking parameter in (0, 1).
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub max_elements: Option<usize>,
    #[arg(long)]
    pub max_level: Option<usize>,
    /// Level CSV path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the final mesh here.
    #[arg(long)]
    pub dump_mesh: Option<PathBuf>,
    /// Write the final edge indicators here.
    #[arg(long)]
    pub dump_indicators: Option<PathBuf>,
    /// Element budget of the reference solve for problems without a known energy (0 disables).
    #[arg(long)]
    pub reference_elements: Option<usize>,
    /// Seed for randomized checks; runs themselves are deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl RunArgs {
    pub fn to_config(&self) -> Result<RunConfig> {
        let flags = ConfigFile {
            problem: self.problem.clone(),
            mode: self.mode,
            theta: self.theta,
            max_elements: self.max_elements,
            max_level: self.max_level,
            out: self.out.clone(),
            dump_mesh: self.dump_mesh.clone(),
            dump_indicators: self.dump_indicators.clone(),
            reference_elements: self.reference_elements,
            seed: self.seed,
        };
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        RunConfig::from_file(flags.over(file))
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub csv: PathBuf,
    /// rho, rho_tilde, apx, eps or sqrt_eps
    #[arg(long, default_value = "sqrt_eps")]
    pub quantity: String,
    /// all, last:K, A:B, A: or :B (levels, inclusive)
    #[arg(long, default_value = "all")]
    pub window: String,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub cases: usize,
    #[arg(long, default_value_t = 200)]
    pub max_nodes: usize,
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let io = |e| AfemError::io("<stdout>", e);
    match cli.command {
        Command::Run(args) => {
            let cfg = args.to_config()?;
            let out = execute(&cfg, stdout)?;
            if let Some(r) = &out.reference {
                writeln!(stderr, "reference energy {} on {} elements", r.energy, r.elements).map_err(io)?;
            }
            if let Some(last) = out.records.last() {
                writeln!(stderr, "{} levels, final N = {}, rho = {:e}", out.records.len(), last.elements, last.rho)
                    .map_err(io)?;
            }
        }
        Command::Fit(args) => {
            let quantity: Quantity = args.quantity.parse()?;
            let window: Window = args.window.parse()?;
            let fit = fit_rates(&args.csv, quantity, window)?;
            writeln!(stdout, "slope {} intercept {} points {}", fit.slope, fit.intercept, fit.points).map_err(io)?;
        }
        Command::Check(args) => {
            let results = cross_check(args.seed, args.cases, args.max_nodes)?;
            writeln!(stdout, "case,nodes,active,max_difference,pdas_kkt,sor_kkt").map_err(io)?;
            for (i, c) in results.iter().enumerate() {
                writeln!(
                    stdout,
                    "{i},{},{},{:e},{:e},{:e}",
                    c.nodes,
                    c.active,
                    c.max_difference,
                    c.pdas_kkt.max_violation(),
                    c.sor_kkt.max_violation()
                )
                .map_err(io)?;
            }
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code: 0 on success, 1 for usage and input errors, 2 for numerical failures.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    1
                }
            };
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
