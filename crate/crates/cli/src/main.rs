use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hazbench::dsl::{parse_bundle, parse_feeder, parse_model, parse_testspec};
use hazbench::gridsim::{self, solve_power_flow, PowerFlowOptions};
use hazbench::model::ModelBundle;
use hazbench::runner::{emit_csv, emit_report, execute, RunnerError};
use hazbench::trace::{
    coverage_report, error_count, gen_test_skeleton, hca_table, scenario_trace, validate, warning_count,
};

const VALIDATION_FAILED: u8 = 1;
const USAGE: u8 = 2;
const RUNTIME: u8 = 3;

/// Hazard model and test specification workbench.
#[derive(Parser)]
#[command(name = "hazbench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check cross references and coverage.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the loss-to-threat chain of a hazard scenario.
    Trace {
        scenario: String,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the hazardous control action table of an action.
    Table {
        action: String,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Draft a test specification from a hazard scenario.
    Skeleton {
        scenario: String,
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Write the draft here instead of standard output.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Execute an experiment sweep.
    Run {
        experiment: String,
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Write the results CSV here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write a plain-text report.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write one voltage trace CSV per run into this directory.
        #[arg(long)]
        traces: Option<PathBuf>,
    },
    /// Parse a feeder and print its initial operating point.
    CheckFeeder { file: PathBuf },
}

/// A diagnostic already printed, carrying the exit code.
struct Exit(u8);

fn fail(code: u8, msg: impl std::fmt::Display) -> Exit {
    eprintln!("hazbench: {msg}");
    Exit(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Exit(code)) => ExitCode::from(code),
    }
}

fn dispatch(command: Command) -> Result<(), Exit> {
    match command {
        Command::Validate { files } => {
            let bundle = load(&files)?;
            let findings = validate(&bundle);
            for f in &findings {
                eprintln!("{f}");
            }
            let errors = error_count(&findings);
            print(&format!("{}\n", coverage_report(&bundle)))?;
            print(&format!("{errors} errors, {} warnings\n", warning_count(&findings)))?;
            if errors > 0 {
                return Err(Exit(VALIDATION_FAILED));
            }
        }
        Command::Trace { scenario, files } => {
            let bundle = load(&files)?;
            let chain = scenario_trace(&bundle, &scenario).map_err(|e| fail(USAGE, e))?;
            print(&chain.render())?;
        }
        Command::Table { action, files } => {
            let bundle = load(&files)?;
            let table = hca_table(&bundle, &action).map_err(|e| fail(USAGE, e))?;
            print(&table.render())?;
        }
        Command::Skeleton { scenario, files, output } => {
            let bundle = load(&files)?;
            let draft = gen_test_skeleton(&bundle, &scenario).map_err(|e| fail(USAGE, e))?;
            let text = draft.render();
            match output {
                Some(path) => write_file(&path, text.as_bytes())?,
                None => print(&text)?,
            }
        }
        Command::Run { experiment, files, csv, report, traces } => {
            let bundle = load(&files)?;
            let findings = validate(&bundle);
            if error_count(&findings) > 0 {
                for f in findings.iter().filter(|f| f.severity == hazbench::trace::Severity::Error) {
                    eprintln!("{f}");
                }
                return Err(fail(VALIDATION_FAILED, "model has validation errors"));
            }
            let results = execute(&bundle, &experiment).map_err(|e| match e {
                RunnerError::FeederIo { .. } | RunnerError::Feeder { .. } => fail(USAGE, e),
                RunnerError::UnknownExperiment(_) => fail(USAGE, e),
                other => fail(USAGE, format!("{experiment}: {other}")),
            })?;
            let mut table = Vec::new();
            emit_csv(&results, &mut table).map_err(|e| fail(RUNTIME, e))?;
            match csv {
                Some(path) => write_file(&path, &table)?,
                None => print(&String::from_utf8_lossy(&table))?,
            }
            if let Some(path) = report {
                write_file(&path, emit_report(&bundle, &results).as_bytes())?;
            }
            if let Some(dir) = traces {
                fs::create_dir_all(&dir).map_err(|e| fail(RUNTIME, format!("{}: {e}", dir.display())))?;
                for r in &results.runs {
                    let Some(trace) = &r.trace else { continue };
                    let mut buf = Vec::new();
                    gridsim::write_trace_csv(trace, &mut buf).map_err(|e| fail(RUNTIME, e))?;
                    let name = format!("{}_run{}.csv", results.experiment, r.point.point.index);
                    write_file(&dir.join(name), &buf)?;
                }
            }
            for r in &results.runs {
                if let Some(why) = &r.verdict.failure {
                    eprintln!("hazbench: run {} failed: {why}", r.point.point.index);
                }
            }
            if results.failed_runs() == results.runs.len() {
                return Err(fail(RUNTIME, "all runs failed"));
            }
        }
        Command::CheckFeeder { file } => {
            let text = read(&file)?;
            let feeder = parse_feeder(&text, &file).map_err(|e| fail(USAGE, e))?;
            let sol = solve_power_flow(&feeder, &feeder.base_net_load(), &PowerFlowOptions::default())
                .map_err(|e| fail(RUNTIME, format!("{}: {e}", file.display())))?;
            let nominal = feeder.slack().voltage;
            let mut out = format!(
                "{} buses, {} lines, {} bems; power flow converged in {} iterations\n",
                feeder.bus_count(),
                feeder.lines().len(),
                feeder.bems().len(),
                sol.iterations
            );
            for (id, v) in feeder.bus_ids().iter().zip(&sol.voltages) {
                out.push_str(&format!("{id:<8}{:>10.3} V  {:.4} pu\n", v.norm(), v.norm() / nominal));
            }
            print(&out)?;
        }
    }
    Ok(())
}

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| fail(USAGE, format!("{}: {e}", path.display())))
}

/// Parses every file and merges them into one bundle in argument order.
fn load(files: &[PathBuf]) -> Result<ModelBundle, Exit> {
    let mut bundle = ModelBundle::new();
    for path in files {
        let text = read(path)?;
        let parsed = match path.extension().and_then(|e| e.to_str()) {
            Some("haz") => parse_model(&text, path),
            Some("htd") => parse_testspec(&text, path),
            _ => parse_bundle(&text, path),
        }
        .map_err(|e| fail(USAGE, e))?;
        bundle
            .merge(parsed)
            .map_err(|e| fail(USAGE, format!("{}: {e}", path.display())))?;
    }
    Ok(bundle)
}

fn print(text: &str) -> Result<(), Exit> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|()| out.flush())
        .map_err(|e| fail(RUNTIME, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Exit> {
    fs::write(path, bytes).map_err(|e| fail(RUNTIME, format!("{}: {e}", path.display())))
}
