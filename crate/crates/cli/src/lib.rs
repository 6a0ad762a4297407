//! Command-line front end for the `virasoro` crate.
//!
//! Exit codes: 0 on success, 1 when a verification check fails or a run
//! errors, 2 on bad arguments or configuration.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use virasoro::integrate::{simulate, SimConfig};
use virasoro::verify::{self, GeodesicField, SuiteOptions, SuiteReport};
use virasoro::NamedEquation;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "virasoro", version, about = "Euler-Arnold equations on Virasoro-type groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a simulation from a TOML config file or an embedded preset name.
    Simulate {
        #[arg(long, value_name = "PATH|PRESET")]
        config: String,
        /// Directory for snapshots.csv, conserved.csv and meta.json.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Bracket, coadjoint action, pairing and inertia identities.
    VerifyAlgebra(SuiteArgs),
    /// Hamiltonian vector fields, gradients and the Poisson bracket.
    VerifyHamiltonian(SuiteArgs),
    /// Bott and Euler cocycles and the connection cochain.
    VerifyCocycles(SuiteArgs),
    /// Geodesic residual and velocity of a flow.
    VerifyGeodesic {
        /// constant, sin or cos
        #[arg(long, default_value = "constant")]
        field: String,
        #[command(flatten)]
        suite: SuiteArgs,
    },
    /// Equation catalogue, fixed points and constant-shift reductions.
    VerifyShifts(SuiteArgs),
    /// Print the named equations with their (inertia, alpha, beta) signatures.
    ListEquations,
    /// Print an embedded preset config, or list preset names.
    Preset { name: Option<String> },
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Replace every check's tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Grid size.
    #[arg(long, default_value_t = 128)]
    pub n: usize,
    /// Also write report.json into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl SuiteArgs {
    fn options(&self) -> SuiteOptions {
        SuiteOptions {
            trials: self.trials,
            seed: self.seed,
            tolerance: self.tolerance,
            n: self.n,
        }
    }
}

fn load_config(spec: &str) -> Result<SimConfig, String> {
    let path = Path::new(spec);
    if path.exists() {
        return SimConfig::from_file(path).map_err(|e| e.to_string());
    }
    SimConfig::preset(spec).ok_or_else(|| {
        let names: Vec<_> = SimConfig::preset_names().collect();
        format!("no config file or preset named {spec:?} (presets: {})", names.join(", "))
    })
}

fn emit_report(report: &SuiteReport, out: Option<&Path>) -> u8 {
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    println!("{json}");
    if let Some(dir) = out {
        if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(dir.join("report.json"), json + "\n")) {
            eprintln!("error: writing report to {}: {e}", dir.display());
            return EXIT_CHECK_FAILED;
        }
    }
    if report.pass {
        EXIT_OK
    } else {
        for c in report.failed() {
            eprintln!("failed: {} ({:e} vs tolerance {:e})", c.name, c.max_defect, c.tolerance);
        }
        EXIT_CHECK_FAILED
    }
}

fn run_suite(args: &SuiteArgs, suite: impl FnOnce(SuiteOptions) -> virasoro::Result<SuiteReport>) -> u8 {
    if args.trials == 0 {
        eprintln!("error: --trials must be at least 1");
        return EXIT_CONFIG;
    }
    match suite(args.options()) {
        Ok(report) => emit_report(&report, args.out.as_deref()),
        Err(virasoro::Error::InvalidGrid(n)) => {
            eprintln!("error: invalid grid size {n}");
            EXIT_CONFIG
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CHECK_FAILED
        }
    }
}

fn run_simulate(config: &str, out: &Path) -> u8 {
    let cfg = match load_config(config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let traj = match simulate(&cfg) {
        Ok(t) => t,
        Err(e @ (virasoro::Error::KernelObstruction { .. } | virasoro::Error::Config(_))) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CHECK_FAILED;
        }
    };
    if let Err(e) = traj.write_outputs(&cfg, out) {
        eprintln!("error: writing outputs to {}: {e}", out.display());
        return EXIT_CHECK_FAILED;
    }
    println!(
        "{}: {} after {} steps, {} samples written to {}",
        cfg.equation,
        traj.status.name(),
        traj.steps,
        traj.times.len(),
        out.display()
    );
    EXIT_OK
}

fn list_equations() -> u8 {
    for name in NamedEquation::NAMES {
        let eq = NamedEquation::from_name(name, 1.0, 1.0, 1.0).expect("catalogue name");
        println!("{name:<20} {}", eq.signature());
    }
    EXIT_OK
}

fn preset(name: Option<&str>) -> u8 {
    match name {
        None => {
            for n in SimConfig::preset_names() {
                println!("{n}");
            }
            EXIT_OK
        }
        Some(n) => match SimConfig::preset_source(n) {
            Some(src) => {
                print!("{src}");
                EXIT_OK
            }
            None => {
                eprintln!("error: unknown preset {n:?}");
                EXIT_CONFIG
            }
        },
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match &cli.command {
        Command::Simulate { config, out } => run_simulate(config, out),
        Command::VerifyAlgebra(a) => run_suite(a, verify::verify_algebra),
        Command::VerifyHamiltonian(a) => run_suite(a, verify::verify_hamiltonian),
        Command::VerifyCocycles(a) => run_suite(a, verify::verify_cocycles),
        Command::VerifyGeodesic { field, suite } => match GeodesicField::from_name(field) {
            Some(f) => run_suite(suite, |o| verify::verify_geodesic(f, o)),
            None => {
                eprintln!(
                    "error: unknown field {field:?} (expected one of {})",
                    GeodesicField::NAMES.join(", ")
                );
                EXIT_CONFIG
            }
        },
        Command::VerifyShifts(a) => run_suite(a, verify::verify_shifts),
        Command::ListEquations => list_equations(),
        Command::Preset { name } => preset(name.as_deref()),
    }
}
