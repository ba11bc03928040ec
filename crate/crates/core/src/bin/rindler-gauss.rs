use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rindler_gauss::config::{PartitionChoice, SweepConfig, SweepKind};
use rindler_gauss::sweep::run_and_write;
use rindler_gauss::verify::{run_group, run_verify, Report, VerifyOptions, GROUPS};

/// Entanglement of fermionic wave packets seen by accelerated observers.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bound on the vacuum entanglement between the two wedges over an
    /// acceleration grid.
    VacuumSweep(SweepArgs),
    /// Degradation of a Bell state shared by the two accelerated observers.
    BellSweep(SweepArgs),
    /// Radial profiles of the Rindler and Minkowski packets.
    Modes(SweepArgs),
    /// Runs the invariant and oracle suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// `key = value` file applied before the command-line flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    mass: Option<f64>,
    /// Packet width L.
    #[arg(long)]
    width: Option<f64>,
    /// Packet frequency Ω₀.
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    accel_min: Option<f64>,
    #[arg(long)]
    accel_max: Option<f64>,
    /// Fix the wedge I acceleration.
    #[arg(long)]
    accel_i: Option<f64>,
    /// Fix the wedge II acceleration.
    #[arg(long)]
    accel_ii: Option<f64>,
    /// Points per acceleration axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Sweep only the diagonal 𝒜_I = 𝒜_II.
    #[arg(long)]
    diagonal: bool,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    max_subdivisions: Option<usize>,
    /// Upper frequency cutoff of the spectral integrals.
    #[arg(long)]
    omega_max: Option<f64>,
    /// Rindler chart parameter a.
    #[arg(long)]
    chart_accel: Option<f64>,
    /// Wavenumber of the Minkowski packets.
    #[arg(long)]
    wavenumber: Option<f64>,
    /// Vacuum bipartition: default or mirrored.
    #[arg(long)]
    partition: Option<PartitionChoice>,
    /// Bell diagnostic with every packet overlap set to one.
    #[arg(long)]
    unit_overlap: bool,
    /// Radial samples for the modes command.
    #[arg(long)]
    samples: Option<usize>,
    /// Rerun with halved tolerances and report the largest relative change.
    #[arg(long)]
    self_test: bool,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a plotting script next to the CSV.
    #[arg(long)]
    emit_plot_script: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only the named group (repeatable).
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(GROUPS))]
    group: Vec<String>,
    /// Seed of the random oracle states.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of random oracle states.
    #[arg(long)]
    states: Option<usize>,
}

impl SweepArgs {
    fn into_config(self, kind: SweepKind) -> rindler_gauss::Result<SweepConfig> {
        let mut cfg = SweepConfig::new(kind);
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        macro_rules! assign {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    cfg.$field = v;
                }
            )*};
        }
        macro_rules! assign_some {
            ($($field:ident),*) => {$(
                if self.$field.is_some() {
                    cfg.$field = self.$field;
                }
            )*};
        }
        assign!(mass, width, omega0, accel_min, accel_max, grid, abs_tol, rel_tol);
        assign!(max_subdivisions, partition, samples);
        assign_some!(accel_i, accel_ii, omega_max, chart_accel, wavenumber, threads);
        cfg.diagonal |= self.diagonal;
        cfg.unit_overlap |= self.unit_overlap;
        cfg.self_test |= self.self_test;
        cfg.emit_plot_script |= self.emit_plot_script;
        if self.out.is_some() {
            cfg.output = self.out;
        }
        Ok(cfg)
    }
}

fn sweep(args: SweepArgs, kind: SweepKind) -> rindler_gauss::Result<bool> {
    let cfg = args.into_config(kind)?;
    cfg.validate()?;
    for w in cfg.warnings() {
        eprintln!("warning: {w}");
    }
    let out = run_and_write(&cfg)?;
    let mut ok = true;
    if out.failed_points > 0 {
        eprintln!("{} point(s) failed; see the status column", out.failed_points);
        ok = false;
    }
    if let Some(change) = out.self_test_change {
        eprintln!("self-test: largest relative change at halved tolerances {change:.3e}");
        if !(change < 0.01) {
            eprintln!("self-test failed: change is not below 1%");
            ok = false;
        }
    }
    Ok(ok)
}

fn verify(args: VerifyArgs) -> bool {
    let defaults = VerifyOptions::default();
    let opts = VerifyOptions {
        seed: args.seed.unwrap_or(defaults.seed),
        random_states: args.states.unwrap_or(defaults.random_states),
        ..defaults
    };
    let report = if args.group.is_empty() {
        run_verify(&opts)
    } else {
        let groups = GROUPS
            .iter()
            .filter(|g| args.group.iter().any(|a| a == *g))
            .map(|g| run_group(g, &opts))
            .collect();
        Report { groups }
    };
    println!("{report}");
    report.passed()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::VacuumSweep(a) => sweep(a, SweepKind::Vacuum),
        Command::BellSweep(a) => sweep(a, SweepKind::Bell),
        Command::Modes(a) => sweep(a, SweepKind::Modes),
        Command::Verify(a) => Ok(verify(a)),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
