//! Executes configurations and writes their outputs.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use lognls_core::{scenarios, Error, Trajectory};

use crate::config::{parse_config, RunConfig};
use crate::record::{series_csv, summary_csv, RunRecord, Status, SummaryRow, VERSION};

/// A finished run: its record and, for evolving scenarios, the time series.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub record: RunRecord,
    pub trajectory: Option<Trajectory>,
}

/// Runs the scenario in memory.
pub fn execute(config: &RunConfig) -> RunOutput {
    let start = Instant::now();
    let mut record = RunRecord {
        version: VERSION.to_string(),
        scenario: config.scenario_name().to_string(),
        status: Status::Pass,
        config: config.to_toml(),
        report: None,
        abort_step: None,
        error: None,
        duration_seconds: 0.0,
    };
    let mut trajectory = None;
    match scenarios::run(&config.spec()) {
        Ok(outcome) => {
            record.status = if outcome.report.pass {
                Status::Pass
            } else {
                Status::Fail
            };
            record.report = Some(outcome.report);
            trajectory = outcome.trajectory;
        }
        Err(Error::NumericalAbort { step }) => {
            record.status = Status::NumericalAbort;
            record.abort_step = Some(step);
            record.error = Some(Error::NumericalAbort { step }.to_string());
        }
        Err(e) => {
            record.status = Status::ConfigError;
            record.error = Some(e.to_string());
        }
    }
    record.duration_seconds = start.elapsed().as_secs_f64();
    RunOutput { record, trajectory }
}

/// Writes `report.json` and `series.csv` into `dir`, creating it if needed.
pub fn write_outputs(dir: &Path, config: &RunConfig, output: &RunOutput) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), output.record.to_json())?;
    fs::write(
        dir.join("series.csv"),
        series_csv(config.grid.dims(), output.trajectory.as_ref()),
    )
}

pub fn run(config: &RunConfig, dir: &Path) -> io::Result<RunRecord> {
    let output = execute(config);
    log::info!(
        "{}: {:?} in {:.3}s",
        output.record.scenario,
        output.record.status,
        output.record.duration_seconds
    );
    write_outputs(dir, config, &output)?;
    Ok(output.record)
}

/// Applies `f` to every item on up to `threads` worker threads. Results keep
/// the input order.
pub fn parallel_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = threads.clamp(1, items.len().max(1));
    if threads == 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                slots.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("worker panicked")
        .into_iter()
        .map(|r| r.expect("every slot filled"))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub rows: Vec<SummaryRow>,
    pub status: Status,
}

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("no *.toml configs in {0}")]
    Empty(PathBuf),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
}

/// Config files in `dir`, sorted by name.
pub fn suite_configs(dir: &Path) -> Result<Vec<PathBuf>, SuiteError> {
    let read_err = |source| SuiteError::Read {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(read_err)? {
        let path = entry.map_err(read_err)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "toml") {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(SuiteError::Empty(dir.to_path_buf()));
    }
    Ok(paths)
}

fn suite_member(path: &Path, out: &Path, seed: Option<u64>) -> Result<SummaryRow, SuiteError> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let text = fs::read_to_string(path).map_err(|source| SuiteError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            log::error!("{}: {e}", path.display());
            return Ok(SummaryRow {
                name,
                status: Status::ConfigError,
                max_discrepancy: None,
                duration_seconds: 0.0,
            });
        }
    };
    if let Some(seed) = seed {
        config.set_seed(seed);
    }
    let dir = out.join(&name);
    let record = run(&config, &dir).map_err(|source| SuiteError::Write { path: dir, source })?;
    if let Some(e) = &record.error {
        log::error!("{}: {e}", path.display());
    }
    Ok(SummaryRow {
        name,
        status: record.status,
        max_discrepancy: record.report.as_ref().map(|r| r.max_discrepancy()),
        duration_seconds: record.duration_seconds,
    })
}

/// Runs every config in `dir`, each into `out/<file stem>/`, then writes
/// `out/summary.csv`.
pub fn run_suite(dir: &Path, out: &Path, threads: usize, seed: Option<u64>) -> Result<SuiteOutcome, SuiteError> {
    let paths = suite_configs(dir)?;
    let rows = parallel_map(&paths, threads, |p| suite_member(p, out, seed))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let summary = out.join("summary.csv");
    fs::create_dir_all(out)
        .and_then(|_| fs::write(&summary, summary_csv(&rows)))
        .map_err(|source| SuiteError::Write { path: summary, source })?;
    let status = Status::worst(rows.iter().map(|r| r.status));
    Ok(SuiteOutcome { rows, status })
}
