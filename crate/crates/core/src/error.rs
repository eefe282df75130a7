//! Error types shared across the crate.

use thiserror::Error;

/// Errors from geometric constructors and mesh-level operations.
#[derive(Debug, Error)]
pub enum GeomError {
    #[error("window bounds are not strictly increasing on axis {axis}: {lower} >= {upper}")]
    InvalidWindow { axis: usize, lower: f64, upper: f64 },
    #[error("extended window does not contain the observation window")]
    ExtendedWindowTooSmall,
    #[error("interior tessellation length {len} is not a multiple of {stride} indices")]
    MalformedInterior { len: usize, stride: usize },
    #[error("operation requires an interior tessellation but the complex has none")]
    MissingInterior,
    #[error("plane normal has zero length")]
    ZeroNormal,
    #[error("radius must be strictly positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("mesh validation failed for object `{id}`:\n{report}")]
    InvalidMesh { id: String, report: String },
    #[error("object `{id}` extends outside the extended window")]
    OutsideExtendedWindow { id: String },
    #[error("r_max {r_max} exceeds the dilation allowance {allowance} of the extended window")]
    RMaxExceedsAllowance { r_max: f64, allowance: f64 },
    #[error("invalid synthesis parameter: {msg}")]
    InvalidSynthSpec { msg: String },
}

/// Errors from distance-field construction and evaluation.
#[derive(Debug, Error)]
pub enum FieldError {
    #[error("grid spacing must be strictly positive on axis {axis}, got {value}")]
    InvalidSpacing { axis: usize, value: f64 },
    #[error("grid needs at least 2 samples per axis, axis {axis} has {count}")]
    TooFewSamples { axis: usize, count: usize },
    #[error("reference object has no simplices")]
    EmptyReference,
    #[error("query point {point:?} lies outside the grid domain")]
    OutOfDomain { point: Vec<f64> },
    #[error("stored value count {values} does not match grid size {expected}")]
    ValueCountMismatch { values: usize, expected: usize },
}

/// Errors from measure extraction.
#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("vertex {index} of the observed complex lies outside the distance grid")]
    VertexOutsideGrid { index: usize },
    #[error("pair ({eps},{eps_prime}) requires an interior tessellation")]
    MissingTessellation { eps: u8, eps_prime: u8 },
    #[error("radius grid must be non-empty, strictly increasing and non-negative")]
    InvalidRadiusGrid,
    #[error("window is not covered by the distance grid")]
    WindowExceedsGrid,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Errors from summary-statistic estimation over scenes.
#[derive(Debug, Error)]
pub enum SummaryError {
    #[error("estimated {which} intensity is zero; summary statistic is undefined")]
    ZeroIntensity { which: &'static str },
    #[error("point set `{which}` is empty")]
    EmptyPointSet { which: &'static str },
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Errors from file parsing and serialization.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("{path}: {msg}")]
    Format { path: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("scene error: {0}")]
    Scene(#[from] GeomError),
}
