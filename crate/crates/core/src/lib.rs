//! Numerical laboratory for a family of quartic surfaces with a `U(1)`-action
//! and their double covers: admissibility of the surface parameters, the
//! three families of real touching conics, the radius functions of the 24
//! small resolutions over `P∞`, and the elimination that leaves two of them.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod classifier;
pub mod config;
pub mod conics;
pub mod numeric;
pub mod poly;
pub mod resolution;
pub mod series;
pub mod surface;

pub use analysis::{AnalysisConfig, AnalysisError, HAtlas, LimitClass, NormalBundleVerdict};
pub use classifier::{ClassificationReport, ClassifyError, ComponentSchedule, Status, Survivor};
pub use config::{ConfigError, LabConfig};
pub use conics::{ConicCoeffs, ConicError, ConicType, TangencyReport, TouchingKind};
pub use poly::{PolyError, RealPolynomial, RootCluster, RootConfig};
pub use resolution::{Component, DomainError, LinearForm, RadiusFn, ResolutionChoice};
pub use surface::{
    IntervalLabel, IntervalPartition, Surface, SurfaceError, SurfaceParams, ValidationReport,
};

/// Any failure of the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Conic(#[from] ConicError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate version, embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
