//! Piecewise-linear objects: boundary meshes with optional interior tessellation.
//!
//! A `SimplicialComplex<D>` represents a closed d-dimensional object by its
//! boundary (d-1)-simplices (segments in 2D, triangles in 3D) and, optionally,
//! a tessellation of the enclosed region into d-simplices (triangles in 2D,
//! tetrahedra in 3D). Volume-type measures need the tessellation; boundary
//! measures do not.

use std::collections::HashMap;
use std::fmt;

use nalgebra::SVector;

use crate::error::GeomError;
use crate::kernel;

pub type Point<const D: usize> = SVector<f64, D>;

#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialComplex<const D: usize> {
    vertices: Vec<Point<D>>,
    boundary: Vec<[usize; D]>,
    /// Flattened d-simplices, `D + 1` vertex indices each.
    interior: Option<Vec<usize>>,
}

/// Interior (d-volume) and boundary ((d-1)-measure) totals of a complex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Totals {
    pub interior_volume: f64,
    pub boundary_measure: f64,
}

/// One invariant violation found by [`SimplicialComplex::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    IndexOutOfRange { simplex: usize, index: usize },
    /// A (d-2)-face of the boundary is not shared by exactly two facets.
    NonManifoldFace { face: Vec<usize>, count: usize },
    /// A directed boundary face appears more than once: inconsistent winding.
    InconsistentOrientation { face: Vec<usize> },
    DegenerateFacet { simplex: usize },
    DegenerateCell { simplex: usize },
    /// The free faces of the tessellation do not match the boundary facets.
    TessellationMismatch { missing: usize, extra: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IndexOutOfRange { simplex, index } => {
                write!(f, "simplex {simplex} references missing vertex {index}")
            }
            Violation::NonManifoldFace { face, count } => {
                write!(f, "face {face:?} is shared by {count} facets, expected 2")
            }
            Violation::InconsistentOrientation { face } => {
                write!(f, "directed face {face:?} appears twice; winding is inconsistent")
            }
            Violation::DegenerateFacet { simplex } => {
                write!(f, "boundary facet {simplex} has zero measure")
            }
            Violation::DegenerateCell { simplex } => {
                write!(f, "interior cell {simplex} has zero volume")
            }
            Violation::TessellationMismatch { missing, extra } => write!(
                f,
                "tessellation hull differs from boundary: {missing} facets missing, {extra} unmatched free faces"
            ),
        }
    }
}

/// Outcome of `validate`: empty means every invariant holds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "- {v}")?;
        }
        Ok(())
    }
}

impl<const D: usize> SimplicialComplex<D> {
    pub fn new(vertices: Vec<Point<D>>, boundary: Vec<[usize; D]>) -> Self {
        Self { vertices, boundary, interior: None }
    }

    /// Builds a complex with an interior tessellation given as a flat index
    /// list, `D + 1` indices per d-simplex.
    pub fn with_interior(
        vertices: Vec<Point<D>>,
        boundary: Vec<[usize; D]>,
        interior: Vec<usize>,
    ) -> Result<Self, GeomError> {
        if interior.len() % (D + 1) != 0 {
            return Err(GeomError::MalformedInterior { len: interior.len(), stride: D + 1 });
        }
        Ok(Self { vertices, boundary, interior: Some(interior) })
    }

    pub fn vertices(&self) -> &[Point<D>] {
        &self.vertices
    }

    pub fn boundary(&self) -> &[[usize; D]] {
        &self.boundary
    }

    pub fn has_interior(&self) -> bool {
        self.interior.is_some()
    }

    /// Iterates interior d-simplices as index slices of length `D + 1`.
    pub fn interior_cells(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.interior.as_deref().unwrap_or(&[]).chunks_exact(D + 1)
    }

    pub fn interior_cell_count(&self) -> usize {
        self.interior.as_ref().map_or(0, |v| v.len() / (D + 1))
    }

    pub fn translate(&self, v: Point<D>) -> Self {
        Self {
            vertices: self.vertices.iter().map(|p| p + v).collect(),
            boundary: self.boundary.clone(),
            interior: self.interior.clone(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            vertices: self.vertices.iter().map(|p| p * s).collect(),
            boundary: self.boundary.clone(),
            interior: self.interior.clone(),
        }
    }

    /// Red refinement through edge midpoints, applied `levels` times: each
    /// boundary facet splits into 2^(D-1) facets and each interior cell into
    /// 2^D cells. Shared edges reuse one midpoint, so the result stays a
    /// conforming complex describing the same shape at finer resolution.
    pub fn refine(&self, levels: u32) -> Self {
        let mut out = self.clone();
        for _ in 0..levels {
            out = out.refine_once();
        }
        out
    }

    fn refine_once(&self) -> Self {
        struct MidCache<const D: usize> {
            vertices: Vec<Point<D>>,
            seen: HashMap<(usize, usize), usize>,
        }
        impl<const D: usize> MidCache<D> {
            fn mid(&mut self, a: usize, b: usize) -> usize {
                let key = (a.min(b), a.max(b));
                if let Some(&ix) = self.seen.get(&key) {
                    return ix;
                }
                let p = (self.vertices[key.0] + self.vertices[key.1]) * 0.5;
                self.vertices.push(p);
                let ix = self.vertices.len() - 1;
                self.seen.insert(key, ix);
                ix
            }
        }
        let facet_of = |v: &[usize]| -> [usize; D] { std::array::from_fn(|i| v[i]) };

        let mut cache = MidCache { vertices: self.vertices.clone(), seen: HashMap::new() };
        let mut boundary = Vec::with_capacity(self.boundary.len() << (D - 1));
        for facet in &self.boundary {
            let f: &[usize] = facet;
            if D == 2 {
                let m = cache.mid(f[0], f[1]);
                boundary.push(facet_of(&[f[0], m]));
                boundary.push(facet_of(&[m, f[1]]));
            } else {
                let (ab, bc, ca) =
                    (cache.mid(f[0], f[1]), cache.mid(f[1], f[2]), cache.mid(f[2], f[0]));
                boundary.push(facet_of(&[f[0], ab, ca]));
                boundary.push(facet_of(&[f[1], bc, ab]));
                boundary.push(facet_of(&[f[2], ca, bc]));
                boundary.push(facet_of(&[ab, bc, ca]));
            }
        }

        let interior = self.interior.as_deref().map(|cells| {
            let mut refined = Vec::with_capacity(cells.len() << D);
            for cell in cells.chunks_exact(D + 1) {
                if D == 2 {
                    let (a, b, c) = (cell[0], cell[1], cell[2]);
                    let (ab, bc, ca) = (cache.mid(a, b), cache.mid(b, c), cache.mid(c, a));
                    refined.extend_from_slice(&[a, ab, ca, b, bc, ab, c, ca, bc, ab, bc, ca]);
                } else {
                    let (a, b, c, d) = (cell[0], cell[1], cell[2], cell[3]);
                    let (ab, ac, ad) = (cache.mid(a, b), cache.mid(a, c), cache.mid(a, d));
                    let (bc, bd, cd) = (cache.mid(b, c), cache.mid(b, d), cache.mid(c, d));
                    refined.extend_from_slice(&[a, ab, ac, ad, b, ab, bc, bd, c, ac, bc, cd, d, ad, bd, cd]);
                    // Inner octahedron split into a fan of four around the
                    // (ab, cd) diagonal; equator cycle ac, ad, bd, bc.
                    refined.extend_from_slice(&[ab, cd, ac, ad, ab, cd, ad, bd, ab, cd, bd, bc, ab, cd, bc, ac]);
                }
            }
            refined
        });

        Self { vertices: cache.vertices, boundary, interior }
    }

    pub fn bbox(&self) -> Option<(Point<D>, Point<D>)> {
        let first = *self.vertices.first()?;
        let mut lo = first;
        let mut hi = first;
        for p in &self.vertices[1..] {
            for a in 0..D {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        Some((lo, hi))
    }

    pub fn vertex_centroid(&self) -> Point<D> {
        let mut c = Point::<D>::zeros();
        for p in &self.vertices {
            c += p;
        }
        c / self.vertices.len() as f64
    }

    /// Total (d-1)-measure of the boundary facets.
    pub fn boundary_measure(&self) -> f64 {
        let mut buf = [Point::<D>::zeros(); 4];
        self.boundary
            .iter()
            .map(|facet| {
                for (slot, &ix) in buf.iter_mut().zip(facet.iter()) {
                    *slot = self.vertices[ix];
                }
                kernel::facet_measure::<D>(&buf[..D])
            })
            .sum()
    }

    /// Sums interior d-simplex volumes and boundary facet measures.
    pub fn measure_totals(&self) -> Result<Totals, GeomError> {
        let interior = self.interior.as_deref().ok_or(GeomError::MissingInterior)?;
        let mut buf = [Point::<D>::zeros(); 4];
        let mut volume = 0.0;
        for cell in interior.chunks_exact(D + 1) {
            for (slot, &ix) in buf.iter_mut().zip(cell.iter()) {
                *slot = self.vertices[ix];
            }
            volume += kernel::cell_measure::<D>(&buf[..D + 1]);
        }
        Ok(Totals { interior_volume: volume, boundary_measure: self.boundary_measure() })
    }

    /// Checks every structural invariant and reports all violations found.
    pub fn validate(&self) -> ValidationReport {
        let mut out = Vec::new();
        let n = self.vertices.len();

        for (i, facet) in self.boundary.iter().enumerate() {
            for &ix in facet {
                if ix >= n {
                    out.push(Violation::IndexOutOfRange { simplex: i, index: ix });
                }
            }
        }
        if let Some(cells) = self.interior.as_deref() {
            for (i, cell) in cells.chunks_exact(D + 1).enumerate() {
                for &ix in cell {
                    if ix >= n {
                        out.push(Violation::IndexOutOfRange { simplex: i, index: ix });
                    }
                }
            }
        }
        if !out.is_empty() {
            // Geometric checks would index out of bounds; stop here.
            return ValidationReport { violations: out };
        }

        self.check_manifold(&mut out);
        self.check_degenerate(&mut out);
        if self.interior.is_some() {
            self.check_tessellation_hull(&mut out);
        }
        ValidationReport { violations: out }
    }

    /// Every (d-2)-face of the boundary must be shared by exactly two facets,
    /// and each directed face must occur exactly once across the winding.
    fn check_manifold(&self, out: &mut Vec<Violation>) {
        // Undirected sub-face counts. In 3D sub-faces are edges of triangles,
        // in 2D they are the endpoints of segments.
        let mut undirected: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut directed: HashMap<Vec<usize>, usize> = HashMap::new();
        for facet in &self.boundary {
            for omit in 0..D {
                let mut face: Vec<usize> =
                    facet.iter().enumerate().filter(|(k, _)| *k != omit).map(|(_, &v)| v).collect();
                // Directed key keeps the induced orientation; for D=2 the face
                // is a single vertex and direction comes from its position.
                let mut dir_key = face.clone();
                if D == 2 {
                    dir_key.push(omit);
                }
                if D == 3 && omit == 1 {
                    // Keep the cyclic orientation induced by the triangle.
                    dir_key.reverse();
                }
                *directed.entry(dir_key).or_insert(0) += 1;
                face.sort_unstable();
                *undirected.entry(face).or_insert(0) += 1;
            }
        }
        let mut bad: Vec<_> = undirected.iter().filter(|(_, &c)| c != 2).collect();
        bad.sort();
        for (face, &count) in bad {
            out.push(Violation::NonManifoldFace { face: face.clone(), count });
        }
        let mut twice: Vec<_> = directed.iter().filter(|(_, &c)| c > 1).collect();
        twice.sort();
        for (face, _) in twice {
            out.push(Violation::InconsistentOrientation { face: face.clone() });
        }
    }

    fn check_degenerate(&self, out: &mut Vec<Violation>) {
        let scale = self
            .bbox()
            .map(|(lo, hi)| (hi - lo).norm().max(f64::MIN_POSITIVE))
            .unwrap_or(1.0);
        let facet_tol = 1e-14 * scale.powi(D as i32 - 1);
        let cell_tol = 1e-14 * scale.powi(D as i32);

        let mut buf = [Point::<D>::zeros(); 4];
        for (i, facet) in self.boundary.iter().enumerate() {
            for (slot, &ix) in buf.iter_mut().zip(facet.iter()) {
                *slot = self.vertices[ix];
            }
            if kernel::facet_measure::<D>(&buf[..D]) <= facet_tol {
                out.push(Violation::DegenerateFacet { simplex: i });
            }
        }
        if let Some(cells) = self.interior.as_deref() {
            for (i, cell) in cells.chunks_exact(D + 1).enumerate() {
                for (slot, &ix) in buf.iter_mut().zip(cell.iter()) {
                    *slot = self.vertices[ix];
                }
                if kernel::cell_measure::<D>(&buf[..D + 1]) <= cell_tol {
                    out.push(Violation::DegenerateCell { simplex: i });
                }
            }
        }
    }

    /// The free (d-1)-faces of the tessellation (those on exactly one cell)
    /// must coincide with the boundary facet set.
    fn check_tessellation_hull(&self, out: &mut Vec<Violation>) {
        let cells = self.interior.as_deref().unwrap();
        let mut free: HashMap<Vec<usize>, usize> = HashMap::new();
        for cell in cells.chunks_exact(D + 1) {
            for omit in 0..=D {
                let mut face: Vec<usize> =
                    cell.iter().enumerate().filter(|(k, _)| *k != omit).map(|(_, &v)| v).collect();
                face.sort_unstable();
                *free.entry(face).or_insert(0) += 1;
            }
        }
        let hull: Vec<&Vec<usize>> =
            free.iter().filter(|(_, &c)| c == 1).map(|(f, _)| f).collect();
        let mut boundary_set: HashMap<Vec<usize>, bool> = self
            .boundary
            .iter()
            .map(|f| {
                let mut key = f.to_vec();
                key.sort_unstable();
                (key, false)
            })
            .collect();
        let mut extra = 0usize;
        for face in hull {
            match boundary_set.get_mut(face) {
                Some(seen) => *seen = true,
                None => extra += 1,
            }
        }
        let missing = boundary_set.values().filter(|seen| !**seen).count();
        if missing > 0 || extra > 0 {
            out.push(Violation::TessellationMismatch { missing, extra });
        }
    }
}
