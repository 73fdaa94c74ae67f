use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use latdual::entropy::GammaScheme;
use latdual::geometry::Boundary;
use latdual::models::{build, ModelKind, ModelSpec};
use latdual_cli::{
    circuit_json, model_spectrum, render_json, render_text, run_suite, spectrum_json, suite_circuit, CliError,
    RegionArg, RunOptions, Suite, SuiteParams,
};

#[derive(Parser)]
#[command(
    name = "latdual",
    version,
    about = "Verify cluster, Wen and toric-code lattice dualities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more verification suites.
    Run(RunArgs),
    /// Write a model's terms as a JSON model file.
    Model(ModelArgs),
    /// List the available suites with their default lattices.
    Suites,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Cluster1d,
    Cluster2d,
    Wen,
    Toric,
}

#[derive(Clone, Copy, ValueEnum)]
enum BcArg {
    Open,
    Periodic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    /// Three-region additive combination.
    Kp,
    /// Intercept of entropy against boundary size.
    Fit,
}

fn parse_sign(s: &str) -> Result<i8, String> {
    match s {
        "+1" | "1" | "+" => Ok(1),
        "-1" | "-" => Ok(-1),
        _ => Err(format!("sign must be +1 or -1, got '{s}'")),
    }
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long, value_enum)]
    bc: Option<BcArg>,
    /// Coupling sign of the Hamiltonian.
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
    sign: Option<i8>,
}

impl SpecArgs {
    fn apply(&self, mut spec: ModelSpec) -> ModelSpec {
        if let Some(m) = self.model {
            spec.model = match m {
                ModelArg::Cluster1d => ModelKind::Cluster1d,
                ModelArg::Cluster2d => ModelKind::Cluster2d,
                ModelArg::Wen => ModelKind::Wen,
                ModelArg::Toric => ModelKind::Toric,
            };
            if spec.model == ModelKind::Cluster1d && self.rows.is_none() {
                spec.rows = 1;
            }
        }
        spec.rows = self.rows.unwrap_or(spec.rows);
        spec.cols = self.cols.unwrap_or(spec.cols);
        if let Some(bc) = self.bc {
            spec.boundary = match bc {
                BcArg::Open => Boundary::Open,
                BcArg::Periodic => Boundary::Periodic,
            };
        }
        spec.coupling_sign = self.sign.unwrap_or(spec.coupling_sign);
        spec
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(value_enum, required = true)]
    suites: Vec<Suite>,
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Inclusive rectangle i1,j1:i2,j2 in 1-based coordinates.
    #[arg(long)]
    region: Option<String>,
    #[arg(long, value_enum, default_value = "kp")]
    scheme: SchemeArg,
    /// Write the report to FILE instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Write the suite's circuit as a JSON gate list (stdout without FILE).
    #[arg(long, value_name = "FILE", num_args = 0..=1)]
    emit_circuit: Option<Option<PathBuf>>,
    /// Write the model spectrum as JSON (stdout without FILE).
    #[arg(long, value_name = "FILE", num_args = 0..=1)]
    dump_spectrum: Option<Option<PathBuf>>,
    /// Worker threads for suites and their checks.
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    /// Report wall_ms as 0 so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
    /// Shift every reference value so that each suite must fail.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Args)]
struct ModelArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn run(args: RunArgs) -> Result<bool, CliError> {
    let region = args.region.as_deref().map(str::parse::<RegionArg>).transpose()?;
    let scheme = match args.scheme {
        SchemeArg::Kp => GammaScheme::Additive,
        SchemeArg::Fit => GammaScheme::LinearFit,
    };
    let options = RunOptions {
        inject_fault: args.inject_fault,
        no_timing: args.no_timing,
    };
    let jobs: Vec<(Suite, SuiteParams)> = args
        .suites
        .iter()
        .map(|&s| {
            (
                s,
                SuiteParams {
                    spec: args.spec.apply(s.default_spec()),
                    scheme,
                    region,
                },
            )
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.parallel.max(1))
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let reports = pool.install(|| {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|(s, p)| run_suite(*s, p, &options))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let rendered = match args.format {
        Format::Json => render_json(&reports),
        Format::Text => render_text(&reports),
    };
    emit(args.out.as_ref(), &rendered)?;
    if let Some(path) = &args.emit_circuit {
        let (suite, params) = &jobs[0];
        emit(path.as_ref(), &circuit_json(&suite_circuit(*suite, params)?))?;
    }
    if let Some(path) = &args.dump_spectrum {
        emit(path.as_ref(), &spectrum_json(&model_spectrum(&jobs[0].1.spec)?))?;
    }
    Ok(reports.iter().all(|r| r.passed()))
}

fn model(args: ModelArgs) -> Result<(), CliError> {
    let spec = args
        .spec
        .apply(ModelSpec::new(ModelKind::Cluster2d, 4, 4, Boundary::Periodic));
    spec.validate()?;
    let set = build(&spec)?;
    let mut text = serde_json::to_string_pretty(&set.to_json()).expect("model serializes");
    text.push('\n');
    emit(args.out.as_ref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Model(args) => model(args).map(|()| true),
        Command::Suites => {
            for s in Suite::ALL {
                println!("{:<18} {}", s.name(), s.default_spec());
            }
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
