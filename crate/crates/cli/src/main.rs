//! `spinsep`: runs declarative scenario files against the spinsep toolkit.

mod analysis;
mod error;
mod scenario;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use analysis::{Entry, Report};
use error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "spinsep",
    version,
    about = "Spin reduction scenarios for identical particles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Default tolerance for expectations that do not set their own.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tolerance: f64,
    /// `text` prints a summary and writes JSON reports; `json` prints the
    /// reports on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Directory for JSON reports and sweep CSV files.
    #[arg(long, global = true, default_value = "reports")]
    out_dir: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a single scenario file.
    Run { file: PathBuf },
    /// Run every `*.json` scenario in a directory and check expectations.
    Suite { dir: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

struct Outcome {
    file: PathBuf,
    result: Result<Report, CliError>,
    elapsed: Duration,
}

impl Outcome {
    fn key(&self) -> String {
        match &self.result {
            Ok(r) => r.scenario.name.clone(),
            Err(_) => self
                .file
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
        }
    }
}

fn execute(file: &Path, tolerance: f64) -> Outcome {
    let start = Instant::now();
    let result = scenario::load(file).and_then(|s| {
        let plan = scenario::validate(&s)?;
        analysis::run(&s, &plan, tolerance)
    });
    Outcome {
        file: file.to_path_buf(),
        result,
        elapsed: start.elapsed(),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the sweep CSV and, unless `json_only`, the JSON report.
fn write_outputs(report: &Report, out_dir: &Path, json_only: bool) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    let name = &report.scenario.name;
    if let Some(sweep) = &report.overlap_sweep {
        let path = out_dir.join(format!("{name}.sweep.csv"));
        write_file(&path, &analysis::sweep_csv(sweep))?;
        written.push(path);
    }
    if !json_only {
        let path = out_dir.join(format!("{name}.json"));
        write_file(&path, &to_json(report))?;
        written.push(path);
    }
    Ok(written)
}

fn fmt_entry<T>(out: &mut String, label: &str, entry: &Option<Entry<T>>, show: impl Fn(&T) -> String) {
    match entry {
        Some(Entry::Ok(v)) => writeln!(out, "  {label}: {}", show(v)).unwrap(),
        Some(Entry::Err { error }) => writeln!(out, "  {label}: error: {error}").unwrap(),
        None => {}
    }
}

fn summary(report: &Report, elapsed: Duration) -> String {
    let mut out = String::new();
    let verdict = if report.passed { "PASS" } else { "FAIL" };
    writeln!(
        out,
        "{}: {verdict} ({:.1} ms)",
        report.scenario.name,
        elapsed.as_secs_f64() * 1e3
    )
    .unwrap();
    fmt_entry(&mut out, "state", &report.state, |s| match s.raw_norm {
        Some(n) => format!("dim {}, raw norm {n:.6}", s.dim),
        None => format!("dim {}", s.dim),
    });
    fmt_entry(&mut out, "reduction", &report.reduction, |r| {
        format!(
            "regions {:?}, trace {:.6}, min eigenvalue {:.3e}, symmetry {}, {}",
            r.regions,
            r.trace,
            r.min_eigenvalue,
            r.symmetry,
            if r.valid_state { "valid state" } else { "not a state" }
        )
    });
    fmt_entry(&mut out, "symmetry", &report.symmetry, |s| {
        format!("global {}, spin trace {}", s.global, s.spin_symmetry)
    });
    fmt_entry(&mut out, "entanglement", &report.entanglement, |e| {
        format!(
            "negativity {:.6}, ppt {}, entropy {:.6} bits, separable {}",
            e.negativity,
            e.ppt,
            e.entropy,
            e.separable.map_or("unknown".to_string(), |b| b.to_string())
        )
    });
    for a in &report.algebra_check {
        match a {
            Entry::Ok(a) => writeln!(
                out,
                "  algebra {}|{}: commutes {}, max norm {:.3e}{}",
                a.p,
                a.q,
                a.commutes,
                a.max_commutator_norm,
                a.witness
                    .as_ref()
                    .map_or(String::new(), |(x, y)| format!(", witness ({x}, {y})"))
            )
            .unwrap(),
            Entry::Err { error } => writeln!(out, "  algebra: error: {error}").unwrap(),
        }
    }
    if let Some(s) = &report.overlap_sweep {
        writeln!(out, "  overlap sweep: {} steps", s.rows.len()).unwrap();
    }
    for c in &report.expectations {
        let mark = if c.passed { "ok" } else { "FAILED" };
        writeln!(out, "  expect {}: {mark} ({})", c.check, c.detail).unwrap();
    }
    out
}

fn cmd_run(cli: &Cli, file: &Path) -> Result<bool, CliError> {
    let outcome = execute(file, cli.tolerance);
    let report = outcome.result?;
    match cli.format {
        Format::Json => {
            write_outputs(&report, &cli.out_dir, true)?;
            print!("{}", to_json(&report));
        }
        Format::Text => {
            let written = write_outputs(&report, &cli.out_dir, false)?;
            print!("{}", summary(&report, outcome.elapsed));
            for p in written {
                println!("wrote {}", p.display());
            }
        }
    }
    Ok(report.passed)
}

#[derive(Serialize)]
struct SuiteEntry {
    scenario: String,
    file: String,
    passed: bool,
    exit_code: u8,
    error: Option<String>,
}

#[derive(Serialize)]
struct SuiteSummary {
    passed: usize,
    failed: usize,
    scenarios: Vec<SuiteEntry>,
}

fn scenario_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let read = std::fs::read_dir(dir).map_err(|source| CliError::Read {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut files = Vec::new();
    for entry in read {
        let path = entry
            .map_err(|source| CliError::Read {
                path: dir.to_path_buf(),
                source,
            })?
            .path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(CliError::Validation(format!("no scenario files in {}", dir.display())));
    }
    Ok(files)
}

/// Returns the exit code: 0 when every scenario passes, the code of the
/// first erroring scenario when any errors, 1 otherwise.
fn cmd_suite(cli: &Cli, dir: &Path) -> Result<u8, CliError> {
    let files = scenario_files(dir)?;
    let tolerance = cli.tolerance;
    let mut outcomes: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> = files.iter().map(|f| s.spawn(move || execute(f, tolerance))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario thread panicked"))
            .collect()
    });
    outcomes.sort_by_key(Outcome::key);

    let mut entries = Vec::new();
    let mut text = String::new();
    let mut reports = Vec::new();
    for o in &outcomes {
        let file = o
            .file
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let entry = match &o.result {
            Ok(report) => {
                write_outputs(report, &cli.out_dir, cli.format == Format::Json)?;
                text.push_str(&summary(report, o.elapsed));
                reports.push(report);
                SuiteEntry {
                    scenario: o.key(),
                    file,
                    passed: report.passed,
                    exit_code: if report.passed { 0 } else { 1 },
                    error: None,
                }
            }
            Err(e) => {
                writeln!(
                    text,
                    "{}: ERROR ({:.1} ms)\n  {e}",
                    o.key(),
                    o.elapsed.as_secs_f64() * 1e3
                )
                .unwrap();
                SuiteEntry {
                    scenario: o.key(),
                    file,
                    passed: false,
                    exit_code: e.exit_code(),
                    error: Some(e.to_string()),
                }
            }
        };
        entries.push(entry);
    }
    let passed = entries.iter().filter(|e| e.passed).count();
    let summary_doc = SuiteSummary {
        passed,
        failed: entries.len() - passed,
        scenarios: entries,
    };
    let code = summary_doc
        .scenarios
        .iter()
        .find(|e| e.error.is_some())
        .map(|e| e.exit_code)
        .unwrap_or(if summary_doc.failed > 0 { 1 } else { 0 });

    match cli.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Full<'a> {
                summary: &'a SuiteSummary,
                reports: Vec<&'a Report>,
            }
            print!(
                "{}",
                to_json(&Full {
                    summary: &summary_doc,
                    reports
                })
            );
        }
        Format::Text => {
            write_file(&cli.out_dir.join("suite.json"), &to_json(&summary_doc))?;
            print!("{text}");
            println!("{} passed, {} failed", summary_doc.passed, summary_doc.failed);
        }
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { file } => cmd_run(&cli, file).map(|ok| if ok { 0 } else { 1 }),
        Command::Suite { dir } => cmd_suite(&cli, dir),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
