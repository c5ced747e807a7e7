//! Inverse shadowing made computable.
//!
//! This crate turns inverse-shadowing questions about concrete dynamical
//! systems into finite computations: perturbation methods around catalog maps
//! on compact spaces, searches for method trajectories that track exact
//! orbits, a geometric-series tracer for hyperbolic toral automorphisms,
//! exact Wasserstein-1 comparisons of empirical and invariant measures, and
//! Birkhoff-average gap statistics.
//!
//! Start with the runnable examples in `examples/` (one per capability), or
//! the `shadowlab` binary which runs the packaged experiments from JSON
//! configs.

pub mod ergodic;
pub mod error;
pub mod harness;
pub mod methods;
pub mod shadowing;
pub mod space;
pub mod systems;
pub mod transport;

pub use ergodic::{birkhoff_avg, default_dictionary, eis_gap, LipFunction};
pub use error::{Error, Result};
pub use harness::{ExperimentConfig, ExperimentKind, ExperimentReport, ResolvedConfig};
pub use methods::{Method, Trajectory};
pub use shadowing::{best_shadow, hyperbolic_trace, SearchConfig, ShadowReport};
pub use space::{Point, Space};
pub use systems::MapSystem;
pub use transport::{w1, DiscreteMeasure, MeasureSet};
