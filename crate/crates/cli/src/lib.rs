//! Scenario runner: reads a TOML config, evaluates `A(t)` by the requested
//! methods, checks them against each other and against the closed-form
//! diagnostics, and writes CSV series, Argand SVGs and a JSON report.

pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod presets;
pub mod scenario;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{ConfigFile, ScenarioConfig};
pub use error::CliError;
pub use pipeline::{Check, ScenarioResult};

use config::Output;
use scenario::Scenario;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub tolerance_scale: f64,
    pub quiet: bool,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            out_dir: out_dir.into(),
            tolerance_scale: 1.0,
            quiet: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub name: String,
    pub checks: Vec<Check>,
    pub artifacts: Vec<PathBuf>,
}

impl ScenarioOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub scenarios: Vec<ScenarioOutcome>,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.scenarios.iter().all(ScenarioOutcome::passed)
    }

    /// 0 when every check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

/// Validates every scenario of `text` first (so config errors surface before
/// any work), then runs them in order and writes their artifacts.
pub fn run_config_text(text: &str, options: &RunOptions) -> Result<RunSummary, CliError> {
    if !(options.tolerance_scale.is_finite() && options.tolerance_scale > 0.0) {
        return Err(CliError::config(
            "--tolerance-scale",
            "must be finite and > 0",
        ));
    }
    let file = ConfigFile::parse(text)?;
    let mut names = std::collections::HashSet::new();
    let mut scenarios = Vec::with_capacity(file.scenarios.len());
    for (i, cfg) in file.scenarios.iter().enumerate() {
        if !names.insert(cfg.name.clone()) {
            return Err(CliError::config(
                format!("scenario[{i}].name"),
                format!("duplicate name `{}`", cfg.name),
            ));
        }
        scenarios.push(scenario::resolve(cfg, i)?);
    }
    create_dir(&options.out_dir)?;
    let mut outcomes = Vec::with_capacity(scenarios.len());
    for s in &scenarios {
        let result = pipeline::run_scenario(s, options.tolerance_scale)?;
        let artifacts = write_artifacts(s, &result, &options.out_dir)?;
        if !options.quiet {
            print_summary(s, &result);
        }
        outcomes.push(ScenarioOutcome {
            name: s.name().to_owned(),
            checks: result.checks,
            artifacts,
        });
    }
    Ok(RunSummary {
        scenarios: outcomes,
    })
}

pub fn run_config_file(path: &Path, options: &RunOptions) -> Result<RunSummary, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(path.display().to_string(), format!("cannot read: {e}")))?;
    run_config_text(&text, options)
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_owned(),
        source,
    })
}

fn write(path: PathBuf, contents: &str, written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    written.push(path);
    Ok(())
}

fn write_artifacts(
    s: &Scenario,
    result: &ScenarioResult,
    dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let cfg = &s.resolved;
    let mut written = Vec::new();
    for run in &result.runs {
        let stem = format!("{}.{}", cfg.name, run.method.as_str());
        if cfg.outputs.contains(&Output::SeriesCsv) {
            let csv = output::series_csv(&run.series, cfg.anticorrelation);
            write(dir.join(format!("{stem}.csv")), &csv, &mut written)?;
        }
        if cfg.outputs.contains(&Output::ArgandSvg) {
            let svg = output::argand_svg(&run.series, &stem, cfg.anticorrelation);
            write(dir.join(format!("{stem}.svg")), &svg, &mut written)?;
        }
    }
    if cfg.outputs.contains(&Output::ReportJson) {
        write(
            dir.join(format!("{}.report.json", cfg.name)),
            &output::report_json(cfg, result),
            &mut written,
        )?;
    }
    let resolved = ConfigFile {
        schema_version: config::SCHEMA_VERSION,
        scenarios: vec![cfg.clone()],
    };
    write(
        dir.join(format!("{}.resolved.toml", cfg.name)),
        &resolved.to_toml(),
        &mut written,
    )?;
    Ok(written)
}

fn print_summary(s: &Scenario, result: &ScenarioResult) {
    let status = if result.passed() { "PASS" } else { "FAIL" };
    println!("{status} {}", s.name());
    for run in &result.runs {
        println!("  {:<15} {:>9.3} s", run.method.as_str(), run.runtime_s);
    }
    for c in &result.checks {
        let mark = if c.pass { "ok  " } else { "FAIL" };
        println!(
            "  {mark} {:<45} {:>12.3e} (tol {:.1e})",
            c.name, c.value, c.tolerance
        );
    }
}
