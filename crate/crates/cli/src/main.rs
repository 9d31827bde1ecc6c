//! Command-line front end: run scenarios from JSON configs, write series and
//! reports, and drive the invariant suite.
//!
//! Exit codes: 0 on success, 1 when a run completes but a check fails, 2 on
//! config errors (bad file, bad schema, invalid parameters, or a scenario
//! kind the chosen subcommand does not handle).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spinray::scenario::{load_config, run_scenario, Report};
use spinray::Error;

#[derive(Parser)]
#[command(
    name = "spinray",
    version,
    about = "Spin and polarization transport along classical trajectories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the ray of a free/circle/helix scenario and dump the path.
    Trace(RunArgs),
    /// Transport a spin along a free/circle/helix scenario trajectory.
    Transport(RunArgs),
    /// Sample an exact Dirac-oscillator discontinuity solution.
    Oscillator(RunArgs),
    /// Trace a light ray with polarization transport (em_helix / em_grin).
    Em(RunArgs),
    /// Compare matter and light per-pitch rotation angles on one geometry.
    ComparePitch(RunArgs),
    /// Run the invariant suite named by the config and report every check.
    Verify(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario configuration file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Directory for the CSV series, report.json, and plot script.
    #[arg(long)]
    out: PathBuf,
    /// Seed for randomized checks; recorded in the report either way.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Command {
    fn args(&self) -> &RunArgs {
        match self {
            Command::Trace(a)
            | Command::Transport(a)
            | Command::Oscillator(a)
            | Command::Em(a)
            | Command::ComparePitch(a)
            | Command::Verify(a) => a,
        }
    }

    /// Scenario kinds this subcommand accepts.
    fn allowed_kinds(&self) -> &'static [&'static str] {
        match self {
            Command::Trace(_) | Command::Transport(_) => &["free", "circle", "helix"],
            Command::Oscillator(_) => &["dirac_oscillator"],
            Command::Em(_) => &["em_helix", "em_grin"],
            Command::ComparePitch(_) => &["compare_pitch"],
            Command::Verify(_) => &["verify"],
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(report) if report.passed => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(command: &Command) -> spinray::Result<Report> {
    let args = command.args();
    let cfg = load_config(&args.config)?;
    let allowed = command.allowed_kinds();
    let kind = cfg.kind();
    if !allowed.contains(&kind) {
        return Err(Error::Config(format!(
            "scenario kind {kind:?} does not belong to this subcommand (expected one of {allowed:?})"
        )));
    }

    let report = run_scenario(&cfg, &args.out, args.seed)?;
    for chk in &report.checks {
        println!(
            "[{}] {:<32} measured {:>12.5e}  bound {:>9.1e}  {}",
            if chk.pass { "PASS" } else { "FAIL" },
            chk.id,
            chk.measured,
            chk.bound,
            chk.description
        );
    }
    let failed = report.checks.iter().filter(|c| !c.pass).count();
    println!(
        "{kind}: {} ({}/{} checks passed) -> {}",
        if report.passed { "ok" } else { "FAILED" },
        report.checks.len() - failed,
        report.checks.len(),
        args.out.display()
    );
    Ok(report)
}
