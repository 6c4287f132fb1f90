//! Social Hegselmann-Krause opinion dynamics on physical connectivity graphs:
//! simulation with structural events and energy certificates, spectral
//! analysis of normalized adjacency matrices, convergence-time bounds, and
//! decision procedures for arbitrarily slow merging.

pub mod bounds;
pub mod dynamics;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod sampling;
pub mod slowmerge;
pub mod spectral;

pub use bounds::{BoundKind, BoundReport, BoundsError};
pub use dynamics::{
    simulate, DynamicsError, Energy, Event, EventKind, InfluenceGraph, Limits, OpinionState, SteadyState, StopOn,
    Trajectory,
};
pub use graph::{Graph, GraphError, PartiteSpec, StandardGraph};
pub use io::IoError;
pub use sampling::{sample_initial_state, CounterRng, SampleError, SampleMode};
pub use slowmerge::{MergeVerdict, SlowMergeError, SplitSpec, VerdictKind};
pub use spectral::{decompose, RPartiteEigenbasis, SpectralDecomposition, SpectralError};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    SlowMerge(#[from] SlowMergeError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Io(#[from] IoError),
}
