//! Command-line entry point for the link-level simulator.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use zcqo_sim::campaign::{run_campaign, sweep};
use zcqo_sim::config::SimConfig;
use zcqo_sim::results::{emit_results, OutputFormat, SimResult};
use zcqo_sim::vectors;
use zcqo_sim::verify::run_verify;
use zcqo_sim::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "zcqo-sim",
    about = "Link-level Monte-Carlo simulator for pilot-less ZC-QO sparse superposition coding",
    version
)]
struct Cli {
    /// Worker threads for trial execution (default: all cores). Results are
    /// identical for any value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one campaign from a config file.
    Simulate {
        /// Flat key-value config file.
        #[arg(long)]
        config: PathBuf,
        /// key=value settings applied after the file, in order.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// csv or json; inferred from the output extension when omitted.
        #[arg(long)]
        format: Option<String>,
    },
    /// Run one campaign per value of a numeric config key.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Config key to vary.
        #[arg(long)]
        axis: String,
        /// Comma-separated values for the axis.
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
    },
    /// Run the analytic/oracle property suite.
    Verify,
    /// Write or re-check the codec test-vector corpus.
    Vectors {
        /// Write the reference corpus to this path.
        #[arg(long, conflicts_with = "check")]
        emit: Option<PathBuf>,
        /// Re-encode and compare the records in this file.
        #[arg(long)]
        check: Option<PathBuf>,
    },
}

fn parse_format(name: Option<&str>, out: Option<&PathBuf>) -> CliResult<OutputFormat> {
    match name {
        Some("csv") => Ok(OutputFormat::Csv),
        Some("json") => Ok(OutputFormat::Json),
        Some(other) => Err(CliError::Config(format!(
            "format '{other}' is not csv or json"
        ))),
        None => Ok(out.map_or(OutputFormat::Csv, |p| OutputFormat::from_path(p))),
    }
}

fn write_results(
    results: &[SimResult],
    out: Option<&PathBuf>,
    format: OutputFormat,
) -> CliResult<()> {
    match out {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            emit_results(results, format, &mut file)?;
            file.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            emit_results(results, format, &mut stdout.lock())?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Simulate {
            config,
            overrides,
            out,
            format,
        } => {
            let mut cfg = SimConfig::from_file(&config)?;
            cfg.apply_overrides(&overrides)?;
            let result = run_campaign(&cfg)?;
            eprintln!(
                "{} trials, {} block errors, bler {:.4e}, {:.1}s",
                result.row.trials, result.row.block_errors, result.row.bler, result.wall_time_s
            );
            let format = parse_format(format.as_deref(), out.as_ref())?;
            write_results(&[result], out.as_ref(), format)?;
            Ok(0)
        }
        Command::Sweep {
            config,
            axis,
            values,
            overrides,
            out,
            format,
        } => {
            let mut cfg = SimConfig::from_file(&config)?;
            cfg.apply_overrides(&overrides)?;
            let results = sweep(&cfg, &axis, &values)?;
            let format = parse_format(format.as_deref(), out.as_ref())?;
            write_results(&results, out.as_ref(), format)?;
            Ok(0)
        }
        Command::Verify => Ok(if run_verify() { 0 } else { 1 }),
        Command::Vectors { emit, check } => match (emit, check) {
            (Some(path), None) => {
                let mut file = std::fs::File::create(&path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                vectors::emit(&mut file)?;
                Ok(0)
            }
            (None, Some(path)) => {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                let n = vectors::check(&text)?;
                eprintln!("{n} vector records verified");
                Ok(0)
            }
            _ => Err(CliError::Config(
                "vectors needs exactly one of --emit or --check".to_string(),
            )),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
