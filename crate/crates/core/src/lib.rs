//! Park and Frenet frames for multi-phase electrical signals.
//!
//! Voltages are treated as curves in phase space. [`park`] holds the
//! fixed-speed rotating reference frame, [`frenet`] the curve-adapted
//! three-phase frame and its invariants, and [`frenet_nd`] the generalized
//! frame for any number of phases. [`signal`] generates and stores sampled
//! series and [`analysis`] runs the per-sample pipelines used by the CLI.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod frenet;
pub mod frenet_nd;
pub mod geometry;
pub mod park;
pub mod signal;

pub use error::{Error, Result};
pub use frenet::{frenet3, DerivativeBundle, FrenetState, FrenetTolerances};
pub use frenet_nd::{gram_schmidt_frame, GeneralizedFrame};
pub use geometry::{cross, dot, hodge_complement, project, PhaseVector, SquareMatrix};
pub use park::{park_apply, park_matrix, park_rotation};
pub use signal::{builtin_scenario, sample_series, SampledSeries, WaveformScenario};
