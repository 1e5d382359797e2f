//! `meanmotion`: switching-point density of bang-bang controls from the command line.

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use meanmotion_cli::{commands, AnalyzeArgs, BesselArgs, ConvergenceArgs, SimulateArgs, WvolumeArgs, ZerosArgs};

#[derive(Parser)]
#[command(name = "meanmotion", version, about = "Asymptotic density of bang-bang switching points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum, oscillator terms, resonance, mean motion and zero count.
    Analyze(AnalyzeArgs),
    /// Empirical rate and zero density against the formula as T grows (CSV).
    Convergence(ConvergenceArgs),
    /// Torus volume W_m(r; a_1, ..., a_m).
    Wvolume(WvolumeArgs),
    /// Zeros of the switching function on [0, T].
    Zeros(ZerosArgs),
    /// Bessel functions J_0 and J_1.
    Bessel(BesselArgs),
    /// Integrate the bang-bang closed loop.
    Simulate(SimulateArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MEANMOTION_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => commands::analyze(&a),
        Command::Convergence(a) => commands::convergence(&a),
        Command::Wvolume(a) => commands::wvolume(&a),
        Command::Zeros(a) => commands::zeros(&a),
        Command::Bessel(a) => commands::bessel(&a),
        Command::Simulate(a) => commands::simulate(&a),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.exit_code())
        }
    }
}
