//! Running configured experiments and writing their results.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use socialhk::bounds::{conditional_upper_bound, conductance_lower_bound, link_break_budget};
use socialhk::dynamics::{eps_convergence_time, steady_state, StopReason};
use socialhk::io::{atomic_write, write_energy_csv, write_events_jsonl, write_trajectory_csv};
use socialhk::{simulate, BoundReport, DynamicsError, Energy, Graph, Limits, OpinionState, Trajectory};

use crate::config::{ExperimentConfig, GraphSource, PointEcho, RunPoint, StopMode};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// The resolved settings of one run, repeated on every row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunEcho {
    pub graph: GraphSource,
    #[serde(rename = "R")]
    pub r: f64,
    pub eps: Vec<f64>,
    pub max_steps: usize,
    pub stop_on: StopMode,
    pub initial: PointEcho,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsTime {
    pub eps: f64,
    /// `None` when the run stopped before its influence graph locked.
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EventCounts {
    pub link_breaks: usize,
    pub link_forms: usize,
    pub merges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub config: RunEcho,
    pub merge_times: Vec<usize>,
    pub predicted_merge: Option<usize>,
    pub k_eps: Vec<EpsTime>,
    pub terminated: bool,
    pub termination_step: Option<usize>,
    pub lock_step: Option<usize>,
    pub stop_reason: StopReason,
    /// The step budget ran out first.
    pub partial: bool,
    pub events: EventCounts,
    pub energy_at_lock: Option<Energy>,
    pub bounds: Vec<BoundReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub partial: bool,
}

/// Simulates one point and summarizes it.
pub fn execute(
    g: &Graph,
    cfg: &ExperimentConfig,
    index: usize,
    point: &RunPoint,
) -> Result<(SweepRow, Trajectory), CliError> {
    let limits = Limits::new(cfg.max_steps, cfg.stop_on.stop_on(&cfg.eps));
    let (traj, partial) = match simulate(g, &point.state, limits) {
        Ok(t) => (t, false),
        Err(DynamicsError::BudgetExhausted(t)) => (*t, true),
        Err(e) => return Err(e.into()),
    };
    let k_eps = match traj.lock_step() {
        Some(_) => {
            let ss = steady_state(&traj)?;
            cfg.eps
                .iter()
                .map(|&eps| Ok(EpsTime { eps, k: Some(eps_convergence_time(&traj, &ss, eps)?) }))
                .collect::<Result<_, DynamicsError>>()?
        }
        None => cfg.eps.iter().map(|&eps| EpsTime { eps, k: None }).collect(),
    };
    let row = SweepRow {
        index,
        config: RunEcho {
            graph: cfg.graph.clone(),
            r: cfg.r,
            eps: cfg.eps.clone(),
            max_steps: cfg.max_steps,
            stop_on: cfg.stop_on,
            initial: point.echo.clone(),
        },
        merge_times: traj.merge_times(),
        predicted_merge: point.predicted_merge,
        k_eps,
        terminated: traj.termination_step().is_some(),
        termination_step: traj.termination_step(),
        lock_step: traj.lock_step(),
        stop_reason: traj.stop_reason(),
        partial,
        events: EventCounts {
            link_breaks: traj.count("LinkBreak"),
            link_forms: traj.count("LinkForm"),
            merges: traj.count("Merge"),
        },
        energy_at_lock: traj.lock_step().map(|k| traj.energy()[k]),
        bounds: row_bounds(g, &point.state, &cfg.eps, cfg.r)?,
    };
    Ok((row, traj))
}

fn row_bounds(g: &Graph, s: &OpinionState, eps: &[f64], r: f64) -> Result<Vec<BoundReport>, CliError> {
    let n = g.n();
    let mut out = vec![link_break_budget(n, r)?.report(n, r)];
    if n < 2 || !g.is_connected() {
        return Ok(out);
    }
    let phi = g.conductance()?.value;
    for &e in eps {
        out.push(conductance_lower_bound(phi, e, r)?);
    }
    // The conditional bound presumes the influence graph never changes.
    if s.spread() < r {
        let d = g.diameter()?;
        for &e in eps {
            out.push(conditional_upper_bound(n, d, e, r)?.report(n, d, e, r));
        }
    }
    Ok(out)
}

/// Trajectory, events and energy files for one run.
pub fn write_run_files(dir: &Path, traj: &Trajectory, format: Format) -> Result<(), CliError> {
    let mut traj_buf = Vec::new();
    let name = match format {
        Format::Csv => {
            write_trajectory_csv(&mut traj_buf, traj).expect("writing to memory");
            "trajectory.csv"
        }
        Format::Json => {
            for (k, x) in traj.states().iter().enumerate() {
                writeln!(traj_buf, "{}", serde_json::json!({"k": k, "x": x})).expect("writing to memory");
            }
            "trajectory.jsonl"
        }
    };
    let mut events = Vec::new();
    write_events_jsonl(&mut events, traj).expect("writing to memory");
    let mut energy = Vec::new();
    write_energy_csv(&mut energy, traj).expect("writing to memory");
    for (file, bytes) in [(name, traj_buf), ("events.jsonl", events), ("energy.csv", energy)] {
        write_file(&dir.join(file), &bytes)?;
    }
    Ok(())
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    atomic_write(path, bytes).map_err(|source| CliError::Output { path: path.into(), source })
}

/// Runs every point of the config in parallel. With an output directory each
/// run gets its own `run-NNNN` folder and the rows go to `sweep.jsonl` or
/// `sweep.csv`.
pub fn run_experiment(cfg: &ExperimentConfig, out: Option<&Path>, format: Format) -> Result<SweepResult, CliError> {
    cfg.validate()?;
    let g = cfg.graph.build()?;
    let points = cfg.initial.points(&g, cfg.r)?;
    let rows = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let (row, traj) = execute(&g, cfg, i + 1, p)?;
            if let Some(dir) = out {
                write_run_files(&run_dir(dir, i + 1), &traj, format)?;
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let result = SweepResult { partial: rows.iter().any(|r| r.partial), rows };
    if let Some(dir) = out {
        let (name, bytes) = match format {
            Format::Json => ("sweep.jsonl", rows_jsonl(&result.rows)),
            Format::Csv => ("sweep.csv", rows_csv(&result.rows)),
        };
        write_file(&dir.join(name), &bytes)?;
    }
    Ok(result)
}

pub fn run_dir(out: &Path, index: usize) -> PathBuf {
    out.join(format!("run-{index:04}"))
}

fn rows_jsonl(rows: &[SweepRow]) -> Vec<u8> {
    let mut buf = Vec::new();
    for r in rows {
        writeln!(buf, "{}", serde_json::to_string(r).expect("row serializes")).expect("writing to memory");
    }
    buf
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Flat columns plus the config echo and bound reports as quoted JSON.
fn rows_csv(rows: &[SweepRow]) -> Vec<u8> {
    let eps: Vec<f64> = rows.first().map(|r| r.config.eps.clone()).unwrap_or_default();
    let mut buf = String::from("index,config,merge_times,predicted_merge");
    for e in &eps {
        buf.push_str(&format!(",k_eps_{e}"));
    }
    buf.push_str(",terminated,termination_step,lock_step,stop_reason,partial,link_breaks,link_forms,merges,E_lock,E_act_lock,bounds\n");
    for r in rows {
        let merges: Vec<String> = r.merge_times.iter().map(usize::to_string).collect();
        let mut line = vec![
            r.index.to_string(),
            quoted(&serde_json::to_string(&r.config).expect("echo serializes")),
            merges.join(";"),
            opt(r.predicted_merge),
        ];
        line.extend(r.k_eps.iter().map(|t| opt(t.k)));
        line.extend([
            r.terminated.to_string(),
            opt(r.termination_step),
            opt(r.lock_step),
            format!("{:?}", r.stop_reason),
            r.partial.to_string(),
            r.events.link_breaks.to_string(),
            r.events.link_forms.to_string(),
            r.events.merges.to_string(),
            opt(r.energy_at_lock.map(|e| e.e)),
            opt(r.energy_at_lock.map(|e| e.e_act)),
            quoted(&serde_json::to_string(&r.bounds).expect("bounds serialize")),
        ]);
        buf.push_str(&line.join(","));
        buf.push('\n');
    }
    buf.into_bytes()
}
