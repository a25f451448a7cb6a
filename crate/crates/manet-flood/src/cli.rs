//! Command-line front end: parse arguments, run the sweep, write outputs,
//! and print a one-line-per-cell summary.
//!
//! Exit codes: 0 on success (including `--help`/`--version`), 1 for
//! invalid arguments or configuration, 2 for runtime and I/O failures.

use std::ffi::OsString;
use std::fs;
use std::io;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

use crate::config::{pc_grid, validate_grid_spec, Algorithm, RunSetup};
use crate::emit::{write_outputs, write_trace_bundle};
use crate::error::{ConfigError, SimError};
use crate::fixture::run_grid_fixture;
use crate::harness::{run_sweep, trace_cell};

#[derive(Debug, Parser)]
#[command(
    name = "manet-flood",
    version,
    about = "Seeded route-discovery flooding experiments over random unreliable networks"
)]
struct Cli {
    /// Config file in `key = value` form; defaults apply for absent keys.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Master seed, overriding the config file.
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory for results and manifest.
    #[arg(long, default_value = "out", value_name = "DIR")]
    out: PathBuf,

    /// Algorithms to sweep, overriding the config file.
    #[arg(long, value_delimiter = ',', value_name = "ALG,ALG,...")]
    algorithms: Option<Vec<Algorithm>>,

    /// Reception probability grid, overriding the config file.
    #[arg(long, value_name = "MIN:MAX:STEP")]
    pc: Option<String>,

    /// Additionally dump per-delivery traces, link realizations, and relay
    /// diagnostics for loop 0 of every cell (under OUT/trace).
    #[arg(long)]
    trace: bool,

    /// Print the 7x7 lattice worked example and exit.
    #[arg(long)]
    grid_fixture: bool,
}

enum CliFailure {
    Config(ConfigError),
    Sim(SimError),
    Io(io::Error),
}

impl From<ConfigError> for CliFailure {
    fn from(e: ConfigError) -> Self {
        CliFailure::Config(e)
    }
}

impl From<SimError> for CliFailure {
    fn from(e: SimError) -> Self {
        CliFailure::Sim(e)
    }
}

impl From<io::Error> for CliFailure {
    fn from(e: io::Error) -> Self {
        CliFailure::Io(e)
    }
}

fn parse_pc_spec(spec: &str) -> Result<Vec<f64>, ConfigError> {
    let bad = |reason: String| ConfigError::OutOfRange {
        key: "--pc".to_string(),
        reason,
    };
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad(format!("expected MIN:MAX:STEP, got {spec:?}")));
    }
    let mut values = [0.0; 3];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|e| bad(format!("{part:?}: {e}")))?;
    }
    let [min, max, step] = values;
    validate_grid_spec(min, max, step)?;
    Ok(pc_grid(min, max, step))
}

fn build_setup(cli: &Cli) -> Result<RunSetup, CliFailure> {
    let mut setup = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            RunSetup::parse(&text)?
        }
        None => RunSetup::default(),
    };
    if let Some(seed) = cli.seed {
        setup.config.master_seed = seed;
    }
    if let Some(algorithms) = &cli.algorithms {
        let mut algs = Vec::new();
        for &a in algorithms {
            if !algs.contains(&a) {
                algs.push(a);
            }
        }
        setup.algorithms = algs;
    }
    if let Some(spec) = &cli.pc {
        setup.p_c_grid = parse_pc_spec(spec)?;
    }
    setup.validate()?;
    Ok(setup)
}

fn run(cli: &Cli) -> Result<(), CliFailure> {
    if cli.grid_fixture {
        print!("{}", run_grid_fixture().render());
        return Ok(());
    }

    let setup = build_setup(cli)?;
    let result = run_sweep(&setup)?;
    write_outputs(&cli.out, &result)?;

    println!("algorithm    p_c  rch_mean  rch_sd    ret_mean  ret_sd    loops");
    for row in &result.rows {
        println!(
            "{:<10} {:>5.2}  {:<8.6}  {:<8.6}  {:<8.6}  {:<8.6}  {}",
            row.algorithm.label(),
            row.p_c,
            row.rch_mean,
            row.rch_stddev,
            row.ret_mean,
            row.ret_stddev,
            row.loops
        );
    }

    if cli.trace {
        let trace_dir = cli.out.join("trace");
        for &algorithm in &setup.algorithms {
            for &p_c in &setup.p_c_grid {
                let cfg = crate::config::SimConfig {
                    p_c,
                    ..setup.config.clone()
                };
                let trace = trace_cell(&cfg, algorithm)?;
                write_trace_bundle(&trace_dir, &trace, cfg.branch_cap)?;
            }
        }
        println!("trace bundles in {}", trace_dir.display());
    }
    println!("results in {}", cli.out.display());
    Ok(())
}

/// Entry point shared by `main` and tests; returns the process exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(CliFailure::Config(e)) => {
            eprintln!("configuration error: {e}");
            1
        }
        Err(CliFailure::Sim(e)) => {
            eprintln!("run failed: {e}");
            2
        }
        Err(CliFailure::Io(e)) => {
            eprintln!("i/o error: {e}");
            2
        }
    }
}
