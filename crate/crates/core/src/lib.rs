//! Complex probability on trajectory pairs.
//!
//! Elementary events are pairs of a forward path and a backward path on a
//! one-dimensional space-time lattice. The complex measure of an event is the
//! sum of `φ(γ₊)·conj(φ(γ̌₋))` over its pairs, where `φ` is the discrete
//! Feynman amplitude of a forward path. On top of that this crate builds slit
//! experiments, non-normalized density matrices and the sampling check that
//! connects normalized C-probabilities with observed relative frequencies.
//!
//! Module map:
//!
//! * [`measure`] – sample space, events, adjoints, classification, the measure
//!   itself and the axiom verifier.
//! * [`lattice`] – lattice geometry, path amplitudes, enumeration and the two
//!   path-sum evaluators.
//! * [`experiments`] – n-slit experiments, screen patterns and event classes.
//! * [`density`] – per-slit wave functions and density matrices.
//! * [`sampling`] – normalization, seeded sampling and frequency checks.

pub mod density;
pub mod error;
pub mod experiments;
pub mod lattice;
pub mod measure;
pub mod sampling;
pub mod tolerance;

pub use num_complex::Complex64;

pub use density::{DensityMatrix, DensityReport, WaveFunction};
pub use error::{CtpError, Result};
pub use experiments::{EventClass, ScreenPattern, ScreenRow, SlitExperiment};
pub use lattice::{HopRange, LatticeConfig, PropagatorMatrix};
pub use measure::{
    AxiomReport, Classification, Constraints, Event, MeasureContext, Orientation, PairSet, Path,
    SpaceTimePoint, TrajectoryPair,
};
pub use sampling::{BornReport, FrequencyReport, LlnOutcome, NormalizedDistribution};
