//! Germ-grain scenes: located observed and reference objects inside an
//! observation window.

use std::sync::Arc;

use crate::error::GeomError;
use crate::geom::complex::{Point, SimplicialComplex};
use crate::geom::primitive::AnalyticPrimitive;
use crate::geom::window::Window;

/// Shape attached to a reference germ. Analytic primitives represent exact
/// unbounded references (a plane has no mesh).
#[derive(Debug, Clone)]
pub enum ReferenceShape<const D: usize> {
    Mesh(Arc<SimplicialComplex<D>>),
    Primitive(AnalyticPrimitive<D>),
}

impl<const D: usize> ReferenceShape<D> {
    /// Shape translated to its germ location.
    pub fn placed(&self, location: Point<D>) -> ReferenceShape<D> {
        match self {
            ReferenceShape::Mesh(m) => ReferenceShape::Mesh(Arc::new(m.translate(location))),
            ReferenceShape::Primitive(p) => ReferenceShape::Primitive(p.translate(location)),
        }
    }
}

/// An observed object: a grain mesh placed at a germ location.
#[derive(Debug, Clone)]
pub struct ObservedGerm<const D: usize> {
    pub id: String,
    pub location: Point<D>,
    pub shape: Arc<SimplicialComplex<D>>,
}

impl<const D: usize> ObservedGerm<D> {
    /// The placed object `location + shape`.
    pub fn placed(&self) -> SimplicialComplex<D> {
        self.shape.translate(self.location)
    }
}

/// A reference object: a grain (mesh or primitive) placed at a germ location.
#[derive(Debug, Clone)]
pub struct ReferenceGerm<const D: usize> {
    pub id: String,
    pub location: Point<D>,
    pub shape: ReferenceShape<D>,
}

impl<const D: usize> ReferenceGerm<D> {
    pub fn placed(&self) -> ReferenceShape<D> {
        self.shape.placed(self.location)
    }
}

/// A complete scene: germs, window, and the extended window inside which all
/// observed material is recorded.
#[derive(Debug, Clone)]
pub struct GermGrainScene<const D: usize> {
    observed: Vec<ObservedGerm<D>>,
    reference: Vec<ReferenceGerm<D>>,
    window: Window<D>,
    extended_window: Window<D>,
}

impl<const D: usize> GermGrainScene<D> {
    /// Builds a scene, rejecting observed objects that are not fully recorded
    /// inside the extended window.
    pub fn new(
        observed: Vec<ObservedGerm<D>>,
        reference: Vec<ReferenceGerm<D>>,
        window: Window<D>,
        extended_window: Window<D>,
    ) -> Result<Self, GeomError> {
        assert!(D == 2 || D == 3, "ambient dimension must be 2 or 3");
        if !extended_window.contains_window(&window) {
            return Err(GeomError::ExtendedWindowTooSmall);
        }
        for germ in &observed {
            if let Some((lo, hi)) = germ.shape.bbox() {
                if !extended_window.contains_box(lo + germ.location, hi + germ.location) {
                    return Err(GeomError::OutsideExtendedWindow { id: germ.id.clone() });
                }
            }
        }
        Ok(GermGrainScene { observed, reference, window, extended_window })
    }

    pub fn observed(&self) -> &[ObservedGerm<D>] {
        &self.observed
    }

    pub fn reference(&self) -> &[ReferenceGerm<D>] {
        &self.reference
    }

    pub fn window(&self) -> &Window<D> {
        &self.window
    }

    pub fn extended_window(&self) -> &Window<D> {
        &self.extended_window
    }

    /// Largest r for which the r-dilation of the window stays inside the
    /// extended window.
    pub fn dilation_allowance(&self) -> f64 {
        self.window.margin_within(&self.extended_window)
    }

    /// Radius grids must not exceed the dilation allowance; the scene cannot
    /// know r_max at construction, so the check runs when radii are chosen.
    pub fn check_r_max(&self, r_max: f64) -> Result<(), GeomError> {
        let allowance = self.dilation_allowance();
        if r_max > allowance {
            return Err(GeomError::RMaxExceedsAllowance { r_max, allowance });
        }
        Ok(())
    }

    /// The whole scene shifted by `v`: germs and both windows.
    pub fn translated(&self, v: Point<D>) -> GermGrainScene<D> {
        GermGrainScene {
            observed: self
                .observed
                .iter()
                .map(|g| ObservedGerm { id: g.id.clone(), location: g.location + v, shape: g.shape.clone() })
                .collect(),
            reference: self
                .reference
                .iter()
                .map(|g| ReferenceGerm { id: g.id.clone(), location: g.location + v, shape: g.shape.clone() })
                .collect(),
            window: self.window.translate(v),
            extended_window: self.extended_window.translate(v),
        }
    }
}
