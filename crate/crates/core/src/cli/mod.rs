//! Command-line front end: scenario files in, spectra, kernels and reports out.
//!
//! Exit codes: 0 every check passed, 2 some check failed, 3 some check was
//! inconclusive and none failed, 4 invalid scenario or arguments, 1 I/O or
//! other runtime failure.

pub mod checks;
pub mod scenario;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::regcheck::Status;
use crate::space::SpaceDocument;
use checks::{catalogue_index, run_check, Check, CheckOutcome, CATALOGUE};
use scenario::{build_model, parse_scenario, validate_scenario, Instance, Model, Scenario};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "heatlab", version, about = "Heat kernel spectra and regularity checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario and write its artifacts.
    Run {
        scenario: PathBuf,
        /// Output directory, replacing the scenario's `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        quiet: bool,
    },
    /// Print every named check with its anchor.
    ListChecks,
    /// Print the sampled space of a scenario as JSON.
    ExportSpace {
        scenario: PathBuf,
        /// Write to a file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub instance: Instance,
    pub dimension: usize,
    pub status: Status,
    pub artifacts: Vec<String>,
    pub checks: Vec<CheckOutcome>,
}

/// Outcome of `run`: the report and where it was written.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub report: RunReport,
    pub output_dir: PathBuf,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        status_exit_code(self.report.status)
    }
}

pub fn status_exit_code(s: Status) -> i32 {
    match s {
        Status::Pass => EXIT_PASS,
        Status::Fail => EXIT_FAIL,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Json(_) | Error::Ellipticity { .. } | Error::Graph(_) | Error::Disconnected(_) => {
            EXIT_CONFIG
        }
        _ => EXIT_RUNTIME,
    }
}

fn overall(outcomes: &[CheckOutcome]) -> Status {
    if outcomes.iter().any(|o| o.status == Status::Fail) {
        Status::Fail
    } else if outcomes.iter().any(|o| o.status == Status::Inconclusive) {
        Status::Inconclusive
    } else {
        Status::Pass
    }
}

/// Reads, parses and validates a scenario, including every check's
/// parameters. Returns the checks in catalogue order.
pub fn load_scenario(path: &Path) -> Result<(Scenario, PathBuf, Vec<Check>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let sc = parse_scenario(&text)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    validate_scenario(&sc, &base)?;
    let kind = sc.instance.kind();
    let mut parsed = Vec::with_capacity(sc.checks.len());
    for (i, c) in sc.checks.iter().enumerate() {
        let check = Check::parse(&c.name, &c.params, kind, &format!("checks[{i}]"))?;
        parsed.push((catalogue_index(&c.name).expect("parsed"), i, check));
    }
    parsed.sort_by_key(|(cat, i, _)| (*cat, *i));
    Ok((sc, base, parsed.into_iter().map(|(_, _, c)| c).collect()))
}

fn kernel_file_name(t: f64) -> String {
    format!("kernel_t{t}.csv")
}

/// Runs a scenario end to end. `out` replaces the scenario's output directory.
pub fn run(path: &Path, out: Option<&Path>, quiet: bool) -> Result<RunSummary> {
    let started = Instant::now();
    let (sc, base, checks) = load_scenario(path)?;
    let dir = match (out, &sc.output_dir) {
        (Some(o), _) => o.to_path_buf(),
        (None, Some(d)) => base.join(d),
        (None, None) => PathBuf::from("out").join(&sc.name),
    };
    let model = build_model(&sc, &base)?;
    fs::create_dir_all(&dir)?;

    let mut artifacts = vec!["spectrum.csv".to_string()];
    let mut spectrum = String::from("index,eigenvalue\n");
    for (i, l) in model.spectrum()?.iter().enumerate() {
        spectrum.push_str(&format!("{i},{l}\n"));
    }
    fs::write(dir.join("spectrum.csv"), spectrum)?;

    for &t in &sc.times {
        let k = model.kernel(t)?;
        let name = kernel_file_name(t);
        let mut buf = Vec::new();
        k.write_csv(&mut buf)?;
        fs::write(dir.join(&name), buf)?;
        artifacts.push(name);
    }

    let mut outcomes = Vec::with_capacity(checks.len());
    for (i, c) in checks.iter().enumerate() {
        let o = run_check(c, &model, i)?;
        if !quiet {
            eprintln!("{:<20} {:?}", o.name, o.status);
        }
        for (name, body) in &o.csv {
            fs::write(dir.join(name), body)?;
            artifacts.push(name.clone());
        }
        outcomes.push(o);
    }

    let report = RunReport {
        scenario: sc.name.clone(),
        instance: sc.instance.clone(),
        dimension: model.dimension(),
        status: overall(&outcomes),
        artifacts,
        checks: outcomes,
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    fs::write(dir.join("report.json"), text)?;

    let metadata = serde_json::json!({
        "tool": "heatlab",
        "version": env!("CARGO_PKG_VERSION"),
        "scenario_file": path.display().to_string(),
        "finished_unix_seconds": SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        "elapsed_seconds": started.elapsed().as_secs_f64(),
    });
    fs::write(dir.join("metadata.json"), serde_json::to_string_pretty(&metadata)? + "\n")?;
    Ok(RunSummary { report, output_dir: dir })
}

pub fn list_checks<W: Write>(out: &mut W) -> std::io::Result<()> {
    for e in CATALOGUE {
        writeln!(out, "{:<20} [{}] {}", e.name, e.anchor, e.summary)?;
    }
    Ok(())
}

/// Space document of the scenario's instance; gasket exports carry the
/// gasket block.
pub fn export_space(path: &Path) -> Result<String> {
    let (sc, base, _) = load_scenario(path)?;
    let model = build_model(&sc, &base)?;
    let text = match &model {
        Model::Static(m) if m.gasket.is_some() => {
            serde_json::to_string_pretty(&m.gasket.as_ref().expect("checked").to_document())?
        }
        _ => serde_json::to_string_pretty(&SpaceDocument::from(model.space().as_ref()))?,
    };
    Ok(text + "\n")
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Run { scenario, out, quiet } => match run(&scenario, out.as_deref(), quiet) {
            Ok(s) => {
                if !quiet {
                    println!("{:?}: report written to {}", s.report.status, s.output_dir.join("report.json").display());
                }
                s.exit_code()
            }
            Err(e) => {
                eprintln!("error: {e}");
                error_exit_code(&e)
            }
        },
        Command::ListChecks => {
            let stdout = std::io::stdout();
            match list_checks(&mut stdout.lock()) {
                Ok(()) => EXIT_PASS,
                Err(_) => EXIT_RUNTIME,
            }
        }
        Command::ExportSpace { scenario, out } => match export_space(&scenario) {
            Ok(text) => match out {
                Some(p) => match fs::write(&p, text) {
                    Ok(()) => EXIT_PASS,
                    Err(e) => {
                        eprintln!("error: {}: {e}", p.display());
                        EXIT_RUNTIME
                    }
                },
                None => {
                    print!("{text}");
                    EXIT_PASS
                }
            },
            Err(e) => {
                eprintln!("error: {e}");
                error_exit_code(&e)
            }
        },
    }
}
