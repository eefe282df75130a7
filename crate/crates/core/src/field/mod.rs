//! Regular-grid shortest-distance maps to a reference object.
//!
//! Grid nodes hold the exact Euclidean distance to the reference; values in
//! between come from multilinear interpolation. Everything downstream (simplex
//! classification, clipping, normalization) reads distances through this
//! field, so discretization bias is shared and cancels in ratios.

use nalgebra::{Matrix2, Matrix3, SVector, Vector2, Vector3};
use rayon::prelude::*;

use crate::error::{FieldError, GeomError};
use crate::geom::bvh::Bvh;
use crate::geom::complex::{Point, SimplicialComplex};
use crate::geom::primitive::AnalyticPrimitive;
use crate::geom::scene::ReferenceShape;
use crate::geom::window::Window;
use crate::kernel;

mod dump;

pub use dump::{load_field, write_field};

/// Regular sampling lattice: `counts[a]` nodes along axis `a`, starting at
/// `origin` with per-axis step `spacing[a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec<const D: usize> {
    origin: Point<D>,
    spacing: SVector<f64, D>,
    counts: [usize; D],
}

impl<const D: usize> GridSpec<D> {
    pub fn new(
        origin: Point<D>,
        spacing: SVector<f64, D>,
        counts: [usize; D],
    ) -> Result<Self, FieldError> {
        for axis in 0..D {
            if !(spacing[axis] > 0.0 && spacing[axis].is_finite()) {
                return Err(FieldError::InvalidSpacing { axis, value: spacing[axis] });
            }
            if counts[axis] < 2 {
                return Err(FieldError::TooFewSamples { axis, count: counts[axis] });
            }
        }
        Ok(GridSpec { origin, spacing, counts })
    }

    /// Smallest grid with uniform step `h` whose origin is the window's lower
    /// corner and whose top corner reaches at least the upper corner.
    pub fn covering(window: &Window<D>, h: f64) -> Result<Self, FieldError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(FieldError::InvalidSpacing { axis: 0, value: h });
        }
        let mut counts = [0usize; D];
        for axis in 0..D {
            let cells = (window.side(axis) / h - 1e-9).ceil().max(1.0) as usize;
            counts[axis] = cells + 1;
        }
        GridSpec::new(window.lower(), SVector::repeat(h), counts)
    }

    pub fn origin(&self) -> Point<D> {
        self.origin
    }

    pub fn spacing(&self) -> SVector<f64, D> {
        self.spacing
    }

    pub fn counts(&self) -> [usize; D] {
        self.counts
    }

    /// Position of the last node along each axis.
    pub fn upper(&self) -> Point<D> {
        let mut u = self.origin;
        for axis in 0..D {
            u[axis] += self.spacing[axis] * (self.counts[axis] - 1) as f64;
        }
        u
    }

    pub fn node_count(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn covers(&self, window: &Window<D>) -> bool {
        let upper = self.upper();
        (0..D).all(|a| {
            let slack = 1e-9 * self.spacing[a];
            self.origin[a] <= window.lower()[a] + slack && upper[a] >= window.upper()[a] - slack
        })
    }

    /// Flat index with axis 0 varying fastest.
    pub fn flat(&self, idx: [usize; D]) -> usize {
        let mut f = idx[D - 1];
        for axis in (0..D - 1).rev() {
            f = f * self.counts[axis] + idx[axis];
        }
        f
    }

    pub fn unflat(&self, mut flat: usize) -> [usize; D] {
        let mut idx = [0usize; D];
        for axis in 0..D {
            idx[axis] = flat % self.counts[axis];
            flat /= self.counts[axis];
        }
        idx
    }

    pub fn position(&self, idx: [usize; D]) -> Point<D> {
        let mut p = self.origin;
        for axis in 0..D {
            p[axis] += self.spacing[axis] * idx[axis] as f64;
        }
        p
    }
}

/// How a closed reference mesh is interpreted: a solid body (distance 0
/// inside) or a hollow surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolidMode {
    #[default]
    Solid,
    Surface,
}

struct CompiledMesh<const D: usize> {
    facets: Vec<[Point<D>; D]>,
    facet_bvh: Bvh<D>,
    solid: Option<SolidCells<D>>,
}

struct SolidCells<const D: usize> {
    /// Cell vertices flattened with stride D + 1.
    vertices: Vec<Point<D>>,
    bvh: Bvh<D>,
}

/// A reference object prepared for distance queries: closed forms for
/// analytic primitives, a facet hierarchy plus cell containment index for
/// meshes.
pub struct CompiledReference<const D: usize> {
    inner: Compiled<D>,
}

enum Compiled<const D: usize> {
    Primitive(AnalyticPrimitive<D>),
    Mesh(Box<CompiledMesh<D>>),
}

fn points_bbox<const D: usize>(points: &[Point<D>]) -> (Point<D>, Point<D>) {
    let mut lo = points[0];
    let mut hi = points[0];
    for p in &points[1..] {
        for a in 0..D {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    (lo, hi)
}

/// Barycentric containment test with a small inclusive margin so that points
/// on shared cell faces register in at least one cell.
fn point_in_cell<const D: usize>(verts: &[Point<D>], q: &Point<D>) -> bool {
    const EPS: f64 = 1e-10;
    match D {
        2 => {
            let e1 = verts[1] - verts[0];
            let e2 = verts[2] - verts[0];
            let m = Matrix2::new(e1[0], e2[0], e1[1], e2[1]);
            let Some(inv) = m.try_inverse() else { return false };
            let d = q - verts[0];
            let w = inv * Vector2::new(d[0], d[1]);
            w.x >= -EPS && w.y >= -EPS && w.x + w.y <= 1.0 + EPS
        }
        3 => {
            let e1 = verts[1] - verts[0];
            let e2 = verts[2] - verts[0];
            let e3 = verts[3] - verts[0];
            let m = Matrix3::new(
                e1[0], e2[0], e3[0], e1[1], e2[1], e3[1], e1[2], e2[2], e3[2],
            );
            let Some(inv) = m.try_inverse() else { return false };
            let d = q - verts[0];
            let w = inv * Vector3::new(d[0], d[1], d[2]);
            w.x >= -EPS && w.y >= -EPS && w.z >= -EPS && w.x + w.y + w.z <= 1.0 + EPS
        }
        _ => panic!("unsupported dimension {D}"),
    }
}

impl<const D: usize> CompiledReference<D> {
    pub fn from_primitive(p: AnalyticPrimitive<D>) -> Self {
        CompiledReference { inner: Compiled::Primitive(p) }
    }

    pub fn compile(shape: &ReferenceShape<D>, mode: SolidMode) -> Result<Self, GeomError> {
        let inner = match shape {
            ReferenceShape::Primitive(p) => Compiled::Primitive(p.clone()),
            ReferenceShape::Mesh(m) => Compiled::Mesh(Box::new(Self::compile_mesh(m, mode)?)),
        };
        Ok(CompiledReference { inner })
    }

    fn compile_mesh(mesh: &SimplicialComplex<D>, mode: SolidMode) -> Result<CompiledMesh<D>, GeomError> {
        let facets: Vec<[Point<D>; D]> = mesh
            .boundary()
            .iter()
            .map(|f| std::array::from_fn(|k| mesh.vertices()[f[k]]))
            .collect();
        if facets.is_empty() {
            return Err(GeomError::InvalidMesh {
                id: String::new(),
                report: "reference mesh has no boundary simplices".to_string(),
            });
        }
        let boxes: Vec<(Point<D>, Point<D>)> = facets.iter().map(|f| points_bbox(f)).collect();
        let facet_bvh = Bvh::build(&boxes);
        let solid = match mode {
            SolidMode::Surface => None,
            SolidMode::Solid => {
                if !mesh.has_interior() {
                    return Err(GeomError::MissingInterior);
                }
                let mut vertices = Vec::new();
                let mut cell_boxes = Vec::new();
                for cell in mesh.interior_cells() {
                    let start = vertices.len();
                    for &vi in cell {
                        vertices.push(mesh.vertices()[vi]);
                    }
                    cell_boxes.push(points_bbox(&vertices[start..]));
                }
                Some(SolidCells { bvh: Bvh::build(&cell_boxes), vertices })
            }
        };
        Ok(CompiledMesh { facets, facet_bvh, solid })
    }

    /// Exact distance from `p` to the reference set.
    pub fn distance(&self, p: Point<D>) -> f64 {
        match &self.inner {
            Compiled::Primitive(prim) => prim.distance(p),
            Compiled::Mesh(mesh) => {
                if let Some(solid) = &mesh.solid {
                    let stride = D + 1;
                    let contained = solid.bvh.find_containing(&p, &mut |i| {
                        point_in_cell(&solid.vertices[i * stride..(i + 1) * stride], &p)
                    });
                    if contained {
                        return 0.0;
                    }
                }
                let (_, d) = mesh
                    .facet_bvh
                    .nearest(&p, &|i| kernel::point_facet_distance(&p, &mesh.facets[i]));
                d
            }
        }
    }

    /// Bounding box of the reference set, `None` for unbounded primitives.
    pub fn support_bbox(&self) -> Option<(Point<D>, Point<D>)> {
        match &self.inner {
            Compiled::Primitive(AnalyticPrimitive::Hyperplane { .. }) => None,
            Compiled::Primitive(AnalyticPrimitive::Sphere { center, radius, .. }) => {
                let r = SVector::<f64, D>::repeat(*radius);
                Some((center - r, center + r))
            }
            Compiled::Mesh(mesh) => {
                let mut lo = Point::<D>::from_element(f64::INFINITY);
                let mut hi = Point::<D>::from_element(f64::NEG_INFINITY);
                for f in &mesh.facets {
                    let (l, h) = points_bbox(f);
                    for a in 0..D {
                        lo[a] = lo[a].min(l[a]);
                        hi[a] = hi[a].max(h[a]);
                    }
                }
                Some((lo, hi))
            }
        }
    }
}

/// Sampled distance map over a [`GridSpec`] lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField<const D: usize> {
    spec: GridSpec<D>,
    values: Vec<f64>,
}

impl<const D: usize> DistanceField<D> {
    /// Samples the reference distance at every node. Nodes are independent;
    /// the parallel build writes a fixed layout, so output is deterministic.
    pub fn build(reference: &CompiledReference<D>, spec: GridSpec<D>) -> Self
    where
        CompiledReference<D>: Sync,
    {
        let n = spec.node_count();
        let values: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|flat| reference.distance(spec.position(spec.unflat(flat))))
            .collect();
        DistanceField { spec, values }
    }

    /// Distance to the union of several references: the pointwise minimum
    /// over the individual distances. An empty slice yields an everywhere
    /// infinite field (distance to the empty set).
    pub fn build_union(references: &[CompiledReference<D>], spec: GridSpec<D>) -> Self
    where
        CompiledReference<D>: Sync,
    {
        let n = spec.node_count();
        let values: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|flat| {
                let p = spec.position(spec.unflat(flat));
                references
                    .iter()
                    .map(|r| r.distance(p))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        DistanceField { spec, values }
    }

    pub fn from_values(spec: GridSpec<D>, values: Vec<f64>) -> Result<Self, FieldError> {
        if values.len() != spec.node_count() {
            return Err(FieldError::ValueCountMismatch {
                values: values.len(),
                expected: spec.node_count(),
            });
        }
        Ok(DistanceField { spec, values })
    }

    pub fn spec(&self) -> &GridSpec<D> {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, idx: [usize; D]) -> f64 {
        self.values[self.spec.flat(idx)]
    }

    /// Multilinear interpolation of the surrounding 2^D node values. Points
    /// more than a roundoff pad outside the lattice are rejected, never
    /// extrapolated.
    pub fn interpolate(&self, p: Point<D>) -> Result<f64, FieldError> {
        const PAD: f64 = 1e-7;
        let mut cell = [0usize; D];
        let mut frac = [0.0f64; D];
        for axis in 0..D {
            let t = (p[axis] - self.spec.origin[axis]) / self.spec.spacing[axis];
            let top = (self.spec.counts[axis] - 1) as f64;
            if t < -PAD || t > top + PAD {
                return Err(FieldError::OutOfDomain { point: p.iter().copied().collect() });
            }
            let c = (t.floor().max(0.0) as usize).min(self.spec.counts[axis] - 2);
            cell[axis] = c;
            frac[axis] = (t - c as f64).clamp(0.0, 1.0);
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << D) {
            let mut w = 1.0;
            let mut idx = cell;
            for axis in 0..D {
                if corner >> axis & 1 == 1 {
                    idx[axis] += 1;
                    w *= frac[axis];
                } else {
                    w *= 1.0 - frac[axis];
                }
            }
            if w != 0.0 {
                acc += w * self.values[self.spec.flat(idx)];
            }
        }
        Ok(acc)
    }

    /// Largest violation of the 1-Lipschitz bound between adjacent nodes,
    /// as `|delta| - h` (nonpositive when the field is consistent).
    pub fn max_lipschitz_excess(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        let n = self.spec.node_count();
        for flat in 0..n {
            let idx = self.spec.unflat(flat);
            for axis in 0..D {
                if idx[axis] + 1 < self.spec.counts[axis] {
                    let mut next = idx;
                    next[axis] += 1;
                    let delta = (self.values[self.spec.flat(next)] - self.values[flat]).abs();
                    worst = worst.max(delta - self.spec.spacing[axis]);
                }
            }
        }
        worst
    }
}
