//! Window normalizations: the content of the parallel set clipped to the
//! observation window (`eps' = 0`) and of its level surface inside the
//! window (`eps' = 1`).
//!
//! The window is partitioned into axis-aligned cells no coarser than the
//! field spacing. Corner distances are sampled once; each radius then
//! classifies cells by corner min/max and marches only the straddling ones
//! through the fixed simplex decomposition.

use nalgebra::SVector;
use rayon::prelude::*;

use super::RadiusGrid;
use crate::error::MeasureError;
use crate::field::DistanceField;
use crate::geom::complex::Point;
use crate::geom::window::Window;
use crate::kernel;

/// Distance sentinel for corners the field cannot evaluate. Such corners
/// only occur outside the caller-guaranteed reachable region, so their cells
/// never contribute.
const UNREACHABLE: f64 = f64::MAX;

/// Reusable corner-distance scan of a window against one field. Building it
/// is the expensive step; per-radius values are cheap sweeps over the cached
/// per-cell bounds.
pub struct NormalizationScan<const D: usize> {
    cell: SVector<f64, D>,
    lo: [usize; D],
    hi: [usize; D],
    corner_stride: [usize; D],
    corner_offsets: Vec<usize>,
    corners: Vec<f64>,
    cell_min: Vec<f64>,
    cell_max: Vec<f64>,
    // Corner positions of one cell relative to its low corner; clip results
    // are translation invariant so one canonical cell serves all.
    canon: Vec<Point<D>>,
}

fn cell_counts<const D: usize>(window: &Window<D>, spacing: SVector<f64, D>) -> [usize; D] {
    std::array::from_fn(|a| {
        ((window.side(a) / spacing[a] - 1e-9).ceil() as usize).max(1)
    })
}

impl<const D: usize> NormalizationScan<D> {
    /// Scans the full window. The field must cover it.
    pub fn new(field: &DistanceField<D>, window: &Window<D>) -> Result<Self, MeasureError> {
        if !field.spec().covers(window) {
            return Err(MeasureError::WindowExceedsGrid);
        }
        let n = cell_counts(window, field.spec().spacing());
        Ok(Self::over_range(field, window, [0; D], n))
    }

    /// Scans only cells overlapping `[clip_lo, clip_hi]`. Correct when every
    /// window point within the largest queried radius of the reference lies
    /// strictly inside the clip box, so skipped cells contribute nothing.
    pub(crate) fn clipped(
        field: &DistanceField<D>,
        window: &Window<D>,
        clip_lo: Point<D>,
        clip_hi: Point<D>,
    ) -> Self {
        let n = cell_counts(window, field.spec().spacing());
        let side: SVector<f64, D> = window.upper() - window.lower();
        let mut lo = [0usize; D];
        let mut hi = [0usize; D];
        for a in 0..D {
            let cell = side[a] / n[a] as f64;
            let raw_lo = ((clip_lo[a] - window.lower()[a]) / cell).floor();
            let raw_hi = ((clip_hi[a] - window.lower()[a]) / cell).ceil();
            lo[a] = (raw_lo.max(0.0) as usize).min(n[a]);
            hi[a] = (raw_hi.max(0.0) as usize).min(n[a]);
            if hi[a] < lo[a] {
                hi[a] = lo[a];
            }
        }
        Self::over_range(field, window, lo, hi)
    }

    fn over_range(
        field: &DistanceField<D>,
        window: &Window<D>,
        lo: [usize; D],
        hi: [usize; D],
    ) -> Self {
        let n = cell_counts(window, field.spec().spacing());
        let cell: SVector<f64, D> =
            SVector::from_fn(|a, _| window.side(a) / n[a] as f64);
        let corner_counts: [usize; D] = std::array::from_fn(|a| hi[a] - lo[a] + 1);
        let mut corner_stride = [1usize; D];
        for a in 1..D {
            corner_stride[a] = corner_stride[a - 1] * corner_counts[a - 1];
        }
        let corner_total: usize = corner_counts.iter().product();

        // Axis 0 varies fastest, matching the flat order used everywhere.
        let corners: Vec<f64> = (0..corner_total)
            .into_par_iter()
            .map(|flat| {
                let mut rem = flat;
                let mut p = window.lower();
                for a in 0..D {
                    let k = lo[a] + rem % corner_counts[a];
                    rem /= corner_counts[a];
                    p[a] += k as f64 * cell[a];
                }
                field.interpolate(p).unwrap_or(UNREACHABLE)
            })
            .collect();

        // Corner id bit a selects the high face along axis a, matching the
        // kernel's cube decomposition convention.
        let corner_offsets: Vec<usize> = (0..1usize << D)
            .map(|id| {
                (0..D)
                    .map(|a| ((id >> a) & 1) * corner_stride[a])
                    .sum()
            })
            .collect();
        let canon: Vec<Point<D>> = (0..1usize << D)
            .map(|id| Point::from_fn(|a, _| ((id >> a) & 1) as f64 * cell[a]))
            .collect();

        let cell_counts_range: [usize; D] = std::array::from_fn(|a| hi[a] - lo[a]);
        let cell_total: usize = cell_counts_range.iter().product();
        let mut cell_min = vec![0.0; cell_total];
        let mut cell_max = vec![0.0; cell_total];
        let bounds: Vec<(f64, f64)> = (0..cell_total)
            .into_par_iter()
            .map(|flat| {
                let mut rem = flat;
                let mut base = 0usize;
                for a in 0..D {
                    base += (rem % cell_counts_range[a]) * corner_stride[a];
                    rem /= cell_counts_range[a];
                }
                let mut mn = f64::MAX;
                let mut mx = f64::MIN;
                for &off in &corner_offsets {
                    let v = corners[base + off];
                    mn = mn.min(v);
                    mx = mx.max(v);
                }
                (mn, mx)
            })
            .collect();
        for (i, (mn, mx)) in bounds.into_iter().enumerate() {
            cell_min[i] = mn;
            cell_max[i] = mx;
        }

        NormalizationScan {
            cell,
            lo,
            hi,
            corner_stride,
            corner_offsets,
            corners,
            cell_min,
            cell_max,
            canon,
        }
    }

    fn cell_volume(&self) -> f64 {
        self.cell.iter().product()
    }

    /// Marches one straddling cell, returning its clipped volume
    /// (`eps' = 0`) or level-surface content (`eps' = 1`).
    fn march(&self, corner_base: usize, r: f64, eps_prime: u8) -> f64 {
        let mut vals = [0.0f64; 8];
        for (c, &off) in self.corner_offsets.iter().enumerate() {
            let v = self.corners[corner_base + off];
            debug_assert!(v < UNREACHABLE, "straddling cell with unreachable corner");
            if v >= UNREACHABLE {
                return 0.0;
            }
            vals[c] = v;
        }
        let mut total = 0.0;
        match D {
            2 => {
                let mut p = [Point::<D>::zeros(); 3];
                let mut s = [0.0f64; 3];
                for tri in &kernel::TRIS_PER_SQUARE {
                    for k in 0..3 {
                        p[k] = self.canon[tri[k]];
                        s[k] = vals[tri[k]] - r;
                    }
                    total += if eps_prime == 0 {
                        kernel::cell_clip_measure::<D>(&p, &s)
                    } else {
                        kernel::cell_level_measure::<D>(&p, &s)
                    };
                }
            }
            3 => {
                let mut p = [Point::<D>::zeros(); 4];
                let mut s = [0.0f64; 4];
                for tet in &kernel::TETS_PER_CUBE {
                    for k in 0..4 {
                        p[k] = self.canon[tet[k]];
                        s[k] = vals[tet[k]] - r;
                    }
                    total += if eps_prime == 0 {
                        kernel::cell_clip_measure::<D>(&p, &s)
                    } else {
                        kernel::cell_level_measure::<D>(&p, &s)
                    };
                }
            }
            _ => panic!("unsupported dimension {D}"),
        }
        total
    }

    /// Normalization at one radius, summed in fixed cell order.
    pub fn value(&self, r: f64, eps_prime: u8) -> f64 {
        debug_assert!(eps_prime <= 1);
        let cell_counts_range: [usize; D] = std::array::from_fn(|a| self.hi[a] - self.lo[a]);
        let vol = self.cell_volume();
        let mut total = 0.0;
        for (flat, (&mn, &mx)) in self.cell_min.iter().zip(&self.cell_max).enumerate() {
            if mn > r {
                continue;
            }
            if eps_prime == 0 && mx <= r {
                total += vol;
                continue;
            }
            if mx <= r {
                // Level surface at most grazes this cell's corners.
                continue;
            }
            let mut rem = flat;
            let mut base = 0usize;
            for a in 0..D {
                base += (rem % cell_counts_range[a]) * self.corner_stride[a];
                rem /= cell_counts_range[a];
            }
            total += self.march(base, r, eps_prime);
        }
        total
    }

    /// Normalization across a radius grid, radii evaluated independently.
    pub fn curve(&self, radii: &RadiusGrid, eps_prime: u8) -> Vec<f64> {
        radii
            .radii()
            .par_iter()
            .map(|&r| self.value(r, eps_prime))
            .collect()
    }
}

/// Single-shot normalization through a fresh scan.
pub fn normalization<const D: usize>(
    field: &DistanceField<D>,
    window: &Window<D>,
    r: f64,
    eps_prime: u8,
) -> Result<f64, MeasureError> {
    Ok(NormalizationScan::new(field, window)?.value(r, eps_prime))
}

/// Normalization curve through a fresh scan.
pub fn normalization_curve<const D: usize>(
    field: &DistanceField<D>,
    window: &Window<D>,
    radii: &RadiusGrid,
    eps_prime: u8,
) -> Result<Vec<f64>, MeasureError> {
    Ok(NormalizationScan::new(field, window)?.curve(radii, eps_prime))
}
