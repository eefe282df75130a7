//! Geometric relation measures between observed objects and the r-parallel
//! sets of reference objects.
//!
//! The crate measures how much of an observed set X lies within distance r of
//! a reference set Y, for the four combinations of taking X or its boundary
//! against the dilated set Y^r or its boundary. On top of the per-object
//! measures it builds normalized densities and cross-K style summary
//! statistics over germ-grain scenes, in 2D and 3D.

pub mod error;
pub mod field;
pub mod geom;
pub mod io;
pub mod kernel;
pub mod measures;
pub mod oracle;
pub mod summary;
pub mod synth;

pub use error::{FieldError, GeomError, IoError, MeasureError, SummaryError};
pub use geom::{GermGrainScene, Point, SimplicialComplex, Window};
