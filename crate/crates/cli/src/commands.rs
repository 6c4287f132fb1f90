//! Subcommand definitions and handlers.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use socialhk::bounds::{conditional_upper_bound, conductance_lower_bound, lambda2_report, link_break_budget};
use socialhk::io::state_to_json;
use socialhk::slowmerge::{construct_slow_state, necessary_check, sufficient_check};
use socialhk::spectral::{max_residual, rpartite_eigenbasis, verify_rpartite_basis, check_spectrum_shape};
use socialhk::{decompose, Graph, SplitSpec};

use crate::config::{list, zero_based, ExperimentConfig, GraphSource, InitialSource, StopMode, DEFAULT_MAX_STEPS};
use crate::run::{execute, run_experiment, write_file, write_run_files, Format};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "socialhk", version, about = "Social Hegselmann-Krause dynamics on physical graphs")]
pub struct Cli {
    /// Seed for random graphs and initial states given on the command line.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory [default: out, or `out` from a sweep config].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Trajectory and sweep table format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

/// Graphs are a JSON file or `name:n` (path, star, cycle, complete,
/// dumbbell, empty), `partite:a,b,..` or `random:n,p`. Vertices are numbered
/// from 1.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the dynamics and write trajectory, events and energy files.
    Simulate {
        #[arg(long)]
        graph: String,
        /// A state file or `values:a,b,..`, `uniform:lo,hi`,
        /// `narrow:center,width`, `witness:scale`.
        #[arg(long)]
        x0: String,
        #[arg(long = "R")]
        r: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        #[arg(long, value_enum, default_value_t = StopMode::Eps)]
        stop_on: StopMode,
    },
    /// Run every point of a TOML experiment config.
    Sweep { config: PathBuf },
    /// Eigenvalues, clusters and structural checks as JSON.
    Spectra {
        #[arg(long)]
        graph: String,
    },
    /// Convergence-time and link-break bounds as JSON.
    Bounds {
        #[arg(long)]
        graph: String,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long = "R")]
        r: f64,
    },
    /// Write a slowly merging initial state and its predicted merge time.
    Construct {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        vp: String,
        #[arg(long)]
        vq: String,
        #[arg(long)]
        delta: f64,
        #[arg(long = "R")]
        r: f64,
    },
    /// Decide whether the split `vp | vq` admits arbitrarily slow merging.
    CheckMerge {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        vp: String,
        #[arg(long)]
        vq: String,
        #[arg(long, value_enum, default_value_t = Check::Sufficient)]
        check: Check,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Sufficient,
    Necessary,
}

/// What a command printed and whether it ran out of budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub partial: bool,
}

impl Outcome {
    fn done(stdout: String) -> Self {
        Outcome { stdout, partial: false }
    }
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let out = |fallback: Option<&Path>| -> PathBuf {
        cli.out.clone().or_else(|| fallback.map(Path::to_path_buf)).unwrap_or_else(|| "out".into())
    };
    match &cli.command {
        Command::Simulate { graph, x0, r, max_steps, eps, stop_on } => {
            let cfg = ExperimentConfig {
                r: *r,
                eps: eps.clone(),
                max_steps: *max_steps,
                stop_on: *stop_on,
                out: None,
                graph: GraphSource::parse_arg(graph, cli.seed)?,
                initial: InitialSource::parse_arg(x0, cli.seed)?,
            };
            cfg.validate()?;
            let g = cfg.graph.build()?;
            let point = cfg.initial.points(&g, cfg.r)?.remove(0);
            let (row, traj) = execute(&g, &cfg, 1, &point)?;
            write_run_files(&out(None), &traj, cli.format)?;
            Ok(Outcome { stdout: pretty(&row), partial: row.partial })
        }
        Command::Sweep { config } => {
            let cfg = ExperimentConfig::load(config)?;
            let res = run_experiment(&cfg, Some(&out(cfg.out.as_deref())), cli.format)?;
            let summary: Vec<_> = res
                .rows
                .iter()
                .map(|r| json!({"index": r.index, "merge_times": r.merge_times, "k_eps": r.k_eps, "partial": r.partial}))
                .collect();
            Ok(Outcome { stdout: pretty(&summary), partial: res.partial })
        }
        Command::Spectra { graph } => {
            let src = GraphSource::parse_arg(graph, cli.seed)?;
            spectra(&src.build()?, &src).map(Outcome::done)
        }
        Command::Bounds { graph, eps, r } => {
            let g = GraphSource::parse_arg(graph, cli.seed)?.build()?;
            bounds(&g, eps, *r).map(Outcome::done)
        }
        Command::Construct { graph, vp, vq, delta, r } => {
            let g = GraphSource::parse_arg(graph, cli.seed)?.build()?;
            let split = split(&g, vp, vq)?;
            let verdict = sufficient_check(&g, &split)?;
            let st = construct_slow_state(&g, &split, &verdict, *delta, *r)?;
            let path = out(None).join("state.json");
            write_file(&path, state_to_json(&st.state).as_bytes())?;
            Ok(Outcome::done(pretty(&json!({
                "state_file": path,
                "opinions": st.state.opinions(),
                "lambda": st.lambda,
                "v0": st.v0,
                "delta": st.delta,
                "predicted_merge": st.predicted_merge,
            }))))
        }
        Command::CheckMerge { graph, vp, vq, check } => {
            let g = GraphSource::parse_arg(graph, cli.seed)?.build()?;
            let split = split(&g, vp, vq)?;
            let verdict = match check {
                Check::Sufficient => sufficient_check(&g, &split)?,
                Check::Necessary => necessary_check(&g, &split)?,
            };
            Ok(Outcome::done(pretty(&verdict)))
        }
    }
}

fn split(g: &Graph, vp: &str, vq: &str) -> Result<SplitSpec, CliError> {
    SplitSpec::new(g, &zero_based(&list(vp)?)?, &zero_based(&list(vq)?)?).map_err(CliError::usage)
}

fn spectra(g: &Graph, src: &GraphSource) -> Result<String, CliError> {
    let dec = decompose(g)?;
    let by_value: Vec<f64> = dec.order_by_value().iter().map(|&i| dec.eigenvalues()[i]).collect();
    let shape = if g.is_connected() && !g.is_complete() { Some(check_spectrum_shape(g, &dec)?) } else { None };
    let partite = match src.partite_spec() {
        Some(spec) => Some(verify_rpartite_basis(&spec, &rpartite_eigenbasis(&spec)?)?),
        None => None,
    };
    Ok(pretty(&json!({
        "n": g.n(),
        "eigenvalues": dec.eigenvalues(),
        "eigenvalues_by_value": by_value,
        "clusters": dec.clusters(),
        "lambda2": if dec.n() > 1 { Some(dec.lambda2()) } else { None },
        "max_residual": max_residual(g, &dec),
        "spectrum_shape": shape,
        "partite": partite,
    })))
}

fn bounds(g: &Graph, eps: &[f64], r: f64) -> Result<String, CliError> {
    let n = g.n();
    let mut reports = Vec::new();
    if n >= 2 && g.is_connected() {
        let phi = g.conductance()?.value;
        let d = g.diameter()?;
        for &e in eps {
            reports.push(conductance_lower_bound(phi, e, r)?);
            reports.push(conditional_upper_bound(n, d, e, r)?.report(n, d, e, r));
        }
        reports.push(lambda2_report(n, d));
    }
    reports.push(link_break_budget(n, r)?.report(n, r));
    Ok(pretty(&reports))
}
