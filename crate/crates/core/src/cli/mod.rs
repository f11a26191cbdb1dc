//! Scenario-driven front end: parse, validate, run one task, write a report.
//!
//! Exit codes: 0 success, 1 a verify property failed, 2 the scenario is
//! invalid (nothing is written), 3 the solver failed (the report carries the
//! error).

mod scenario;
mod tasks;
pub mod verify;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

pub use scenario::{EdgeSpec, ManifoldSpec, RegionSpec, Scenario, SolverConfig, Task, TaskParams, OutputSpec};
pub use tasks::TaskOutput;

use crate::catalog::BuiltPotential;
use crate::error::{Error, Result};
use crate::geometry::DiscreteManifold;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    PropertyFailed,
    SolverError,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub status: Status,
    pub task: Task,
    pub seed: u64,
    pub scenario: Scenario,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub results: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub traces: Vec<String>,
    pub wall_time_s: f64,
    pub version: &'static str,
}

/// A validated scenario with its manifold and potential built.
pub struct Prepared {
    pub scenario: Scenario,
    pub manifold: DiscreteManifold,
    pub potential: BuiltPotential,
}

/// Everything that can fail before any solver runs.
pub fn prepare(text: &str, seed: Option<u64>, task: Option<Task>) -> Result<Prepared> {
    let mut scenario = Scenario::from_toml(text)?;
    if let Some(s) = seed {
        scenario.seed = s;
    }
    if let Some(t) = task {
        scenario.task = t;
    }
    let manifold = scenario.manifold.build().map_err(|e| Error::Scenario(format!("manifold: {e}")))?;
    let potential = scenario.potential.build(&manifold).map_err(|e| Error::Scenario(format!("potential: {e}")))?;
    Ok(Prepared { scenario, manifold, potential })
}

pub struct Outcome {
    pub exit_code: i32,
    pub report: Option<Report>,
    pub report_path: Option<PathBuf>,
}

/// Runs a prepared scenario and writes `report.json`, the manifold tables and
/// any traces into `out`.
pub fn execute(prepared: &Prepared, out: &Path) -> Result<(i32, Report)> {
    std::fs::create_dir_all(out)?;
    prepared.manifold.write_nodes_csv(out.join("manifold.csv"))?;
    prepared.manifold.write_edges_csv(out.join("manifold_edges.csv"))?;
    let start = Instant::now();
    let s = &prepared.scenario;
    log::info!("{} on {} nodes, seed {}", s.task.name(), prepared.manifold.node_count(), s.seed);
    let outcome = tasks::run_task(prepared, out);
    let wall_time_s = start.elapsed().as_secs_f64();
    let (status, exit, results, error, traces) = match outcome {
        Ok(o) => {
            let (status, exit) = if o.all_passed { (Status::Ok, EXIT_OK) } else { (Status::PropertyFailed, EXIT_PROPERTY_FAILED) };
            (status, exit, Some(o.results), None, o.traces)
        }
        Err(e) => (Status::SolverError, EXIT_SOLVER, None, Some(e.to_string()), Vec::new()),
    };
    let report = Report {
        status,
        task: s.task,
        seed: s.seed,
        scenario: s.clone(),
        results,
        error,
        traces,
        wall_time_s,
        version: env!("CARGO_PKG_VERSION"),
    };
    let file = std::fs::File::create(out.join("report.json"))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), &report)?;
    Ok((exit, report))
}

/// Reads, validates and runs a scenario file. `task` overrides the file's task.
pub fn run_file(path: &Path, out: Option<&Path>, seed: Option<u64>, task: Option<Task>) -> Outcome {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Outcome { exit_code: EXIT_INVALID, report: None, report_path: None };
        }
    };
    let prepared = match prepare(&text, seed, task) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: invalid scenario {}: {e}", path.display());
            return Outcome { exit_code: EXIT_INVALID, report: None, report_path: None };
        }
    };
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| prepared.scenario.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    match execute(&prepared, &dir) {
        Ok((exit_code, report)) => {
            if let Some(e) = &report.error {
                eprintln!("error: {} failed: {e}", report.task.name());
            }
            Outcome { exit_code, report: Some(report), report_path: Some(dir.join("report.json")) }
        }
        Err(e) => {
            eprintln!("error: cannot write outputs to {}: {e}", dir.display());
            Outcome { exit_code: EXIT_SOLVER, report: None, report_path: None }
        }
    }
}
