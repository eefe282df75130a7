//! Geometric data model: simplicial complexes, windows, analytic primitives,
//! germ-grain scenes, and the spatial index they share.

pub mod bvh;
pub mod complex;
pub mod primitive;
pub mod scene;
pub mod window;

pub use complex::{Point, SimplicialComplex, Totals, ValidationReport, Violation};
pub use primitive::AnalyticPrimitive;
pub use scene::{GermGrainScene, ObservedGerm, ReferenceGerm, ReferenceShape};
pub use window::Window;
