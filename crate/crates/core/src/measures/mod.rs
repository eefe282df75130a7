//! Intersection measures of an observed complex X with the r-parallel set of
//! a reference, read through a distance field.
//!
//! For a radius r the parallel set is the sub-level set of the field. The
//! four measures take X or its boundary against that set or its level
//! surface:
//!
//! * (0,0): volume of X inside the parallel set
//! * (0,1): area (2D: length) of the level surface inside X
//! * (1,0): area (2D: length) of X's boundary inside the parallel set
//! * (1,1): length (2D: crossing count) of the level surface on X's boundary
//!
//! Distances are affine per simplex (interpolated at vertices), so every
//! contribution reduces to an exact clip of a single simplex.

mod normalization;

pub use normalization::{normalization, normalization_curve, NormalizationScan};

use rayon::prelude::*;

use crate::error::MeasureError;
use crate::field::{CompiledReference, DistanceField};
use crate::geom::complex::{Point, SimplicialComplex};
use crate::kernel;

/// Which boundary operators are applied: `eps` to X, `eps_prime` to the
/// parallel set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MeasurePair {
    eps: u8,
    eps_prime: u8,
}

impl MeasurePair {
    pub fn new(eps: u8, eps_prime: u8) -> Option<MeasurePair> {
        if eps <= 1 && eps_prime <= 1 {
            Some(MeasurePair { eps, eps_prime })
        } else {
            None
        }
    }

    pub fn all() -> [MeasurePair; 4] {
        [
            MeasurePair { eps: 0, eps_prime: 0 },
            MeasurePair { eps: 0, eps_prime: 1 },
            MeasurePair { eps: 1, eps_prime: 0 },
            MeasurePair { eps: 1, eps_prime: 1 },
        ]
    }

    pub fn eps(&self) -> u8 {
        self.eps
    }

    pub fn eps_prime(&self) -> u8 {
        self.eps_prime
    }

    /// Stable index `2*eps + eps_prime`, used for array-of-curves storage.
    pub fn index(&self) -> usize {
        (self.eps * 2 + self.eps_prime) as usize
    }

    /// Two-digit form, e.g. "01".
    pub fn parse(text: &str) -> Option<MeasurePair> {
        let bytes = text.as_bytes();
        if bytes.len() != 2 || !bytes.iter().all(|b| *b == b'0' || *b == b'1') {
            return None;
        }
        MeasurePair::new(bytes[0] - b'0', bytes[1] - b'0')
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.eps, self.eps_prime)
    }
}

/// Strictly increasing, nonnegative radii.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusGrid {
    radii: Vec<f64>,
}

impl RadiusGrid {
    pub fn new(radii: Vec<f64>) -> Result<RadiusGrid, MeasureError> {
        if radii.is_empty() || !radii[0].is_finite() || radii[0] < 0.0 {
            return Err(MeasureError::InvalidRadiusGrid);
        }
        for pair in radii.windows(2) {
            if !(pair[0] < pair[1]) || !pair[1].is_finite() {
                return Err(MeasureError::InvalidRadiusGrid);
            }
        }
        Ok(RadiusGrid { radii })
    }

    /// `steps` radii evenly spaced over (0, r_max]: zero excluded, r_max
    /// included.
    pub fn uniform_exclusive(r_max: f64, steps: usize) -> Result<RadiusGrid, MeasureError> {
        if !(r_max > 0.0 && r_max.is_finite()) || steps == 0 {
            return Err(MeasureError::InvalidRadiusGrid);
        }
        RadiusGrid::new((1..=steps).map(|i| r_max * i as f64 / steps as f64).collect())
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn r_max(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Simplex partition relative to the parallel set at one radius: fully
/// inside, straddling the level set, or fully outside.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Classification {
    pub interior: Vec<usize>,
    pub intersecting: Vec<usize>,
    pub exterior: Vec<usize>,
}

/// An observed complex bound to per-vertex reference distances. Building the
/// context runs the vertex sweep once; measures at any radius and pair reuse
/// it.
pub struct MeasureContext<'a, const D: usize> {
    x: &'a SimplicialComplex<D>,
    vertex_dist: Vec<f64>,
}

impl<'a, const D: usize> MeasureContext<'a, D> {
    /// Vertex distances interpolated from the field (the default pipeline).
    pub fn interpolated(
        x: &'a SimplicialComplex<D>,
        field: &DistanceField<D>,
    ) -> Result<Self, MeasureError> {
        let mut vertex_dist = Vec::with_capacity(x.vertices().len());
        for (index, v) in x.vertices().iter().enumerate() {
            let d = field
                .interpolate(*v)
                .map_err(|_| MeasureError::VertexOutsideGrid { index })?;
            vertex_dist.push(d);
        }
        Ok(MeasureContext { x, vertex_dist })
    }

    /// Exact vertex distances straight from the reference, bypassing the
    /// grid. Used for convergence studies against the interpolated pipeline.
    pub fn exact(x: &'a SimplicialComplex<D>, reference: &CompiledReference<D>) -> Self {
        let vertex_dist = x.vertices().iter().map(|v| reference.distance(*v)).collect();
        MeasureContext { x, vertex_dist }
    }

    /// Exact vertex distances to a union of references (pointwise minimum).
    pub fn exact_union(x: &'a SimplicialComplex<D>, references: &[CompiledReference<D>]) -> Self {
        let vertex_dist = x
            .vertices()
            .iter()
            .map(|v| {
                references
                    .iter()
                    .map(|r| r.distance(*v))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        MeasureContext { x, vertex_dist }
    }

    pub fn vertex_distances(&self) -> &[f64] {
        &self.vertex_dist
    }

    /// Distance at the vertices of one simplex, shifted by `-r`; `<= 0` is
    /// inside the parallel set.
    fn signs(&self, simplex: &[usize], r: f64, out: &mut [f64]) {
        for (k, &vi) in simplex.iter().enumerate() {
            out[k] = self.vertex_dist[vi] - r;
        }
    }

    fn classify<'b>(&self, simplices: impl Iterator<Item = &'b [usize]>, r: f64) -> Classification {
        let mut c = Classification::default();
        for (i, s) in simplices.enumerate() {
            let mut inside = 0usize;
            for &vi in s {
                if self.vertex_dist[vi] <= r {
                    inside += 1;
                }
            }
            if inside == s.len() {
                c.interior.push(i);
            } else if inside == 0 {
                c.exterior.push(i);
            } else {
                c.intersecting.push(i);
            }
        }
        c
    }

    /// Partition of the interior cells at radius `r`.
    pub fn classify_cells(&self, r: f64) -> Result<Classification, MeasureError> {
        if !self.x.has_interior() {
            return Err(MeasureError::MissingTessellation { eps: 0, eps_prime: 0 });
        }
        Ok(self.classify(self.x.interior_cells(), r))
    }

    /// Partition of the boundary facets at radius `r`.
    pub fn classify_facets(&self, r: f64) -> Classification {
        self.classify(self.x.boundary().iter().map(|f| f.as_slice()), r)
    }

    /// One measure at one radius.
    pub fn mu(&self, r: f64, pair: MeasurePair) -> Result<f64, MeasureError> {
        debug_assert!(r >= 0.0 && r.is_finite());
        let mut points = [Point::<D>::zeros(); 4];
        let mut s = [0.0f64; 4];
        if pair.eps == 0 {
            if !self.x.has_interior() {
                return Err(MeasureError::MissingTessellation {
                    eps: pair.eps,
                    eps_prime: pair.eps_prime,
                });
            }
            let mut total = 0.0;
            for cell in self.x.interior_cells() {
                self.signs(cell, r, &mut s[..D + 1]);
                let all_in = s[..D + 1].iter().all(|v| *v <= 0.0);
                let all_out = s[..D + 1].iter().all(|v| *v > 0.0);
                match pair.eps_prime {
                    0 => {
                        if all_out {
                            continue;
                        }
                        for (k, &vi) in cell.iter().enumerate() {
                            points[k] = self.x.vertices()[vi];
                        }
                        total += if all_in {
                            kernel::cell_measure::<D>(&points[..D + 1])
                        } else {
                            kernel::cell_clip_measure::<D>(&points[..D + 1], &s[..D + 1])
                        };
                    }
                    _ => {
                        if all_in || all_out {
                            continue;
                        }
                        for (k, &vi) in cell.iter().enumerate() {
                            points[k] = self.x.vertices()[vi];
                        }
                        total += kernel::cell_level_measure::<D>(&points[..D + 1], &s[..D + 1]);
                    }
                }
            }
            Ok(total)
        } else {
            let mut total = 0.0;
            for facet in self.x.boundary() {
                self.signs(facet, r, &mut s[..D]);
                let all_in = s[..D].iter().all(|v| *v <= 0.0);
                let all_out = s[..D].iter().all(|v| *v > 0.0);
                match pair.eps_prime {
                    0 => {
                        if all_out {
                            continue;
                        }
                        for (k, &vi) in facet.iter().enumerate() {
                            points[k] = self.x.vertices()[vi];
                        }
                        total += if all_in {
                            kernel::facet_measure::<D>(&points[..D])
                        } else {
                            kernel::facet_clip_measure::<D>(&points[..D], &s[..D])
                        };
                    }
                    _ => {
                        if all_in || all_out {
                            continue;
                        }
                        for (k, &vi) in facet.iter().enumerate() {
                            points[k] = self.x.vertices()[vi];
                        }
                        total += kernel::facet_level_measure::<D>(&points[..D], &s[..D]);
                    }
                }
            }
            Ok(total)
        }
    }

    /// One measure across a radius grid. Radii are independent given the
    /// shared vertex sweep; values equal per-radius `mu` calls exactly.
    pub fn mu_curve(&self, radii: &RadiusGrid, pair: MeasurePair) -> Result<Vec<f64>, MeasureError> {
        if pair.eps == 0 && !self.x.has_interior() {
            return Err(MeasureError::MissingTessellation { eps: pair.eps, eps_prime: pair.eps_prime });
        }
        radii
            .radii()
            .par_iter()
            .map(|&r| self.mu(r, pair))
            .collect()
    }
}

/// Convenience single-shot measure through a field.
pub fn mu<const D: usize>(
    x: &SimplicialComplex<D>,
    field: &DistanceField<D>,
    r: f64,
    pair: MeasurePair,
) -> Result<f64, MeasureError> {
    MeasureContext::interpolated(x, field)?.mu(r, pair)
}

/// Normalized measure: `mu / N`, undefined when the normalization vanishes.
pub fn nu_value(mu: f64, n: f64) -> Option<f64> {
    if n > 0.0 {
        Some(mu / n)
    } else {
        None
    }
}

/// Full per-object result set in the shape of the CSV schema: one slot per
/// pair, `None` for unselected pairs, inner `None` for undefined ratios.
pub struct MeasuresTable {
    pub radii: Vec<f64>,
    pub mu: [Option<Vec<f64>>; 4],
    pub n: [Vec<f64>; 2],
    pub nu: [Option<Vec<Option<f64>>>; 4],
}

impl MeasuresTable {
    /// Computes the selected measure curves plus both normalizations and the
    /// resulting ratios.
    pub fn compute<const D: usize>(
        context: &MeasureContext<'_, D>,
        scan: &NormalizationScan<D>,
        radii: &RadiusGrid,
        pairs: &[MeasurePair],
    ) -> Result<MeasuresTable, MeasureError> {
        let n0 = scan.curve(radii, 0);
        let n1 = scan.curve(radii, 1);
        let mut mu: [Option<Vec<f64>>; 4] = [None, None, None, None];
        for pair in pairs {
            if mu[pair.index()].is_none() {
                mu[pair.index()] = Some(context.mu_curve(radii, *pair)?);
            }
        }
        let nu = std::array::from_fn(|idx| {
            mu[idx].as_ref().map(|curve| {
                let n = if idx % 2 == 0 { &n0 } else { &n1 };
                curve.iter().zip(n).map(|(&m, &nv)| nu_value(m, nv)).collect()
            })
        });
        Ok(MeasuresTable { radii: radii.radii().to_vec(), mu, n: [n0, n1], nu })
    }
}
