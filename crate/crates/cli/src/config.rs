//! Experiment configuration: where the graph and the initial states come
//! from, and how long to run.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use socialhk::graph::standard_graph;
use socialhk::io::{parse_graph_json, parse_state_json};
use socialhk::slowmerge::{construct_slow_state, four_path_family, sufficient_check};
use socialhk::{
    sample_initial_state, CounterRng, Graph, OpinionState, PartiteSpec, SampleMode, SplitSpec, StopOn,
};

use crate::CliError;

pub const DEFAULT_MAX_STEPS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSource {
    File { path: PathBuf },
    /// `path`, `star`, `cycle`, `complete`, `dumbbell` or `empty`.
    Constructor { name: String, n: usize },
    Partite { parts: Vec<usize> },
    Random { n: usize, extra_p: f64, seed: u64 },
}

impl GraphSource {
    pub fn build(&self) -> Result<Graph, CliError> {
        let g = match self {
            GraphSource::File { path } => parse_graph_json(&read(path)?).map_err(|e| CliError::input(path, e))?,
            GraphSource::Constructor { name, n } => standard_graph(name, *n).map_err(CliError::usage)?,
            GraphSource::Partite { parts } => {
                Graph::complete_r_partite(&PartiteSpec::new(parts.clone()).map_err(CliError::usage)?)
            }
            GraphSource::Random { n, extra_p, seed } => {
                let mut rng = CounterRng::new(*seed).map_err(CliError::usage)?;
                Graph::random_connected(*n, *extra_p, &mut rng).map_err(CliError::usage)?
            }
        };
        Ok(g)
    }

    pub fn partite_spec(&self) -> Option<PartiteSpec> {
        match self {
            GraphSource::Partite { parts } => PartiteSpec::new(parts.clone()).ok(),
            _ => None,
        }
    }

    fn rebase(&mut self, dir: &Path) {
        if let GraphSource::File { path } = self {
            *path = dir.join(&*path);
        }
    }

    /// Command-line form: a file path, `name:n`, `partite:a,b,..` or
    /// `random:n,p` (seeded by `--seed`).
    pub fn parse_arg(s: &str, seed: Option<u64>) -> Result<Self, CliError> {
        if Path::new(s).is_file() {
            return Ok(GraphSource::File { path: s.into() });
        }
        let Some((head, rest)) = s.split_once(':') else {
            return Err(CliError::Usage(format!("graph `{s}` is neither a file nor `name:n`")));
        };
        Ok(match head {
            "partite" => GraphSource::Partite { parts: list(rest)? },
            "random" => {
                let [n, p] = fixed::<2>(rest)?;
                GraphSource::Random { n: n as usize, extra_p: p, seed: require_seed(seed)? }
            }
            name => GraphSource::Constructor { name: name.into(), n: number(rest)? },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSource {
    File {
        path: PathBuf,
    },
    Values {
        opinions: Vec<f64>,
    },
    Uniform {
        lo: f64,
        hi: f64,
        seed: u64,
        #[serde(default = "one")]
        samples: usize,
    },
    Narrow {
        center: f64,
        width: f64,
        seed: u64,
        #[serde(default = "one")]
        samples: usize,
    },
    /// The four-agent path family, one run per `δ`.
    FourPath {
        delta: Vec<f64>,
    },
    /// A slow-merge construction on the split `vp | vq` (1-based), one run
    /// per `δ`.
    Slow {
        vp: Vec<usize>,
        vq: Vec<usize>,
        delta: Vec<f64>,
    },
    /// A second eigenvector scaled to spread `scale · R`.
    Witness {
        scale: f64,
    },
}

fn one() -> usize {
    1
}

impl InitialSource {
    fn rebase(&mut self, dir: &Path) {
        if let InitialSource::File { path } = self {
            *path = dir.join(&*path);
        }
    }

    /// Command-line form: a file path, `values:a,b,..`, `uniform:lo,hi`,
    /// `narrow:center,width` or `witness:scale`.
    pub fn parse_arg(s: &str, seed: Option<u64>) -> Result<Self, CliError> {
        if Path::new(s).is_file() {
            return Ok(InitialSource::File { path: s.into() });
        }
        let Some((head, rest)) = s.split_once(':') else {
            return Err(CliError::Usage(format!("initial state `{s}` is neither a file nor `kind:params`")));
        };
        Ok(match head {
            "values" => InitialSource::Values { opinions: list(rest)? },
            "uniform" => {
                let [lo, hi] = fixed::<2>(rest)?;
                InitialSource::Uniform { lo, hi, seed: require_seed(seed)?, samples: 1 }
            }
            "narrow" => {
                let [center, width] = fixed::<2>(rest)?;
                InitialSource::Narrow { center, width, seed: require_seed(seed)?, samples: 1 }
            }
            "witness" => InitialSource::Witness { scale: number(rest)? },
            other => return Err(CliError::Usage(format!("unknown initial-state kind `{other}`"))),
        })
    }

    /// Expands the source into concrete runs.
    pub fn points(&self, g: &Graph, r: f64) -> Result<Vec<RunPoint>, CliError> {
        let n = g.n();
        let single = |echo: PointEcho, state| vec![RunPoint { echo, state, predicted_merge: None }];
        let pts = match self {
            InitialSource::File { path } => {
                let s = parse_state_json(&read(path)?).map_err(|e| CliError::input(path, e))?;
                if s.r() != r {
                    return Err(CliError::Usage(format!("{}: R = {} but the run uses R = {r}", path.display(), s.r())));
                }
                single(PointEcho::File { path: path.clone() }, s)
            }
            InitialSource::Values { opinions } => {
                let s = OpinionState::new(opinions.clone(), r).map_err(CliError::usage)?;
                single(PointEcho::Values { opinions: opinions.clone() }, s)
            }
            InitialSource::Uniform { lo, hi, seed, samples } => (0..*samples as u64)
                .map(|i| {
                    let mode = SampleMode::UniformBox { lo: *lo, hi: *hi };
                    let s = sample_initial_state(n, r, mode, seed + i).map_err(CliError::usage)?;
                    Ok(RunPoint {
                        echo: PointEcho::Uniform { lo: *lo, hi: *hi, seed: seed + i },
                        state: s,
                        predicted_merge: None,
                    })
                })
                .collect::<Result<_, CliError>>()?,
            InitialSource::Narrow { center, width, seed, samples } => (0..*samples as u64)
                .map(|i| {
                    let mode = SampleMode::NarrowSpread { center: *center, width: *width };
                    let s = sample_initial_state(n, r, mode, seed + i).map_err(CliError::usage)?;
                    Ok(RunPoint {
                        echo: PointEcho::Narrow { center: *center, width: *width, seed: seed + i },
                        state: s,
                        predicted_merge: None,
                    })
                })
                .collect::<Result<_, CliError>>()?,
            InitialSource::FourPath { delta } => delta
                .iter()
                .map(|&d| {
                    let (s, k) = four_path_family(d, r).map_err(CliError::usage)?;
                    Ok(RunPoint { echo: PointEcho::FourPath { delta: d }, state: s, predicted_merge: Some(k) })
                })
                .collect::<Result<_, CliError>>()?,
            InitialSource::Slow { vp, vq, delta } => {
                let split = SplitSpec::new(g, &zero_based(vp)?, &zero_based(vq)?).map_err(CliError::usage)?;
                let verdict = sufficient_check(g, &split)?;
                delta
                    .iter()
                    .map(|&d| {
                        let st = construct_slow_state(g, &split, &verdict, d, r)?;
                        Ok(RunPoint {
                            echo: PointEcho::Slow { vp: vp.clone(), vq: vq.clone(), delta: d },
                            state: st.state,
                            predicted_merge: Some(st.predicted_merge),
                        })
                    })
                    .collect::<Result<_, CliError>>()?
            }
            InitialSource::Witness { scale } => {
                let s = socialhk::bounds::witness_lower_bound(g, r, *scale)?;
                single(PointEcho::Witness { scale: *scale }, s)
            }
        };
        if let Some(p) = pts.iter().find(|p| p.state.n() != n) {
            return Err(CliError::Usage(format!("initial state has {} opinions but the graph has {n} vertices", p.state.n())));
        }
        Ok(pts)
    }
}

/// One concrete run of a sweep: the resolved initial state and how it was
/// produced.
#[derive(Debug, Clone)]
pub struct RunPoint {
    pub echo: PointEcho,
    pub state: OpinionState,
    pub predicted_merge: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointEcho {
    File { path: PathBuf },
    Values { opinions: Vec<f64> },
    Uniform { lo: f64, hi: f64, seed: u64 },
    Narrow { center: f64, width: f64, seed: u64 },
    FourPath { delta: f64 },
    Slow { vp: Vec<usize>, vq: Vec<usize>, delta: f64 },
    Witness { scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum StopMode {
    Lock,
    /// Lock plus the smallest requested `ε`.
    #[default]
    Eps,
    Termination,
    Horizon,
}

impl StopMode {
    pub fn stop_on(self, eps: &[f64]) -> StopOn {
        match self {
            StopMode::Eps => match eps.iter().copied().reduce(f64::min) {
                Some(e) => StopOn::EpsConv(e),
                None => StopOn::Lock,
            },
            StopMode::Lock => StopOn::Lock,
            StopMode::Termination => StopOn::Termination,
            StopMode::Horizon => StopOn::Horizon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(default)]
    pub eps: Vec<f64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default)]
    pub stop_on: StopMode,
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    pub graph: GraphSource,
    pub initial: InitialSource,
}

fn default_max_steps() -> usize {
    DEFAULT_MAX_STEPS
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.r.is_finite() && self.r > 0.0) {
            return Err(CliError::Usage(format!("R must be positive, got {}", self.r)));
        }
        if let Some(e) = self.eps.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(CliError::Usage(format!("eps values must be positive, got {e}")));
        }
        if self.max_steps == 0 {
            return Err(CliError::Usage("max_steps must be at least 1".into()));
        }
        Ok(())
    }

    /// Reads a TOML config. Relative file paths inside it are taken relative
    /// to the config file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read(path)?;
        let mut cfg: ExperimentConfig =
            toml::from_str(&text).map_err(|e| CliError::Config { path: path.into(), msg: e.to_string() })?;
        let dir = path.parent().unwrap_or(Path::new(""));
        cfg.graph.rebase(dir);
        cfg.initial.rebase(dir);
        if let Some(out) = &mut cfg.out {
            *out = dir.join(&*out);
        }
        cfg.validate()
            .map_err(|e| CliError::Config { path: path.into(), msg: e.to_string() })?;
        Ok(cfg)
    }
}

impl FromStr for ExperimentConfig {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let cfg: ExperimentConfig =
            toml::from_str(s).map_err(|e| CliError::Config { path: "<inline>".into(), msg: e.to_string() })?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn require_seed(seed: Option<u64>) -> Result<u64, CliError> {
    seed.ok_or_else(|| CliError::Usage("random sources need --seed".into()))
}

fn number<T: FromStr>(s: &str) -> Result<T, CliError> {
    s.trim().parse().map_err(|_| CliError::Usage(format!("cannot parse `{s}`")))
}

pub fn list<T: FromStr>(s: &str) -> Result<Vec<T>, CliError> {
    s.split(',').map(number).collect()
}

fn fixed<const K: usize>(s: &str) -> Result<[f64; K], CliError> {
    let v: Vec<f64> = list(s)?;
    v.try_into().map_err(|_| CliError::Usage(format!("expected {K} comma-separated numbers in `{s}`")))
}

/// Converts 1-based vertex labels to indices.
pub fn zero_based(vs: &[usize]) -> Result<Vec<usize>, CliError> {
    vs.iter()
        .map(|&v| v.checked_sub(1).ok_or_else(|| CliError::Usage("vertices are numbered from 1".into())))
        .collect()
}
