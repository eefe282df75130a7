//! Functional summary statistics over germ-grain scenes: cross-K curves
//! built from pairwise intersection measures, their normalized variants, and
//! the classic point-process cross-K as the degenerate case.
//!
//! The estimator averages over reference germs located in the observation
//! window; observed objects may extend into the extended window so that
//! every object within reach of the largest radius is fully recorded.

use rayon::prelude::*;

use crate::error::SummaryError;
use crate::field::{CompiledReference, DistanceField, GridSpec, SolidMode};
use crate::geom::complex::Point;
use crate::geom::scene::{GermGrainScene, ReferenceShape};
use crate::geom::window::Window;
use crate::measures::{MeasureContext, MeasurePair, NormalizationScan, RadiusGrid};

/// Count-per-volume intensity estimates over the observation window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityEstimates {
    pub rho_x: f64,
    pub rho_y: f64,
    pub n_obs_in_window: usize,
    pub n_ref_in_window: usize,
}

/// Germs whose location lies in the window, counted per unit volume.
pub fn estimate_intensities<const D: usize>(scene: &GermGrainScene<D>) -> IntensityEstimates {
    let volume = scene.window().volume();
    let n_obs = scene
        .observed()
        .iter()
        .filter(|g| scene.window().contains_point(g.location))
        .count();
    let n_ref = scene
        .reference()
        .iter()
        .filter(|g| scene.window().contains_point(g.location))
        .count();
    IntensityEstimates {
        rho_x: n_obs as f64 / volume,
        rho_y: n_ref as f64 / volume,
        n_obs_in_window: n_obs,
        n_ref_in_window: n_ref,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummaryKind {
    KHat,
    LHat,
    PointCross,
}

impl SummaryKind {
    pub fn label(&self) -> &'static str {
        match self {
            SummaryKind::KHat => "khat",
            SummaryKind::LHat => "lhat",
            SummaryKind::PointCross => "point-cross",
        }
    }
}

/// One summary curve with the metadata the CSV schema carries. `None` values
/// mark radii where a normalization vanished.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryCurve {
    pub kind: SummaryKind,
    pub pair: MeasurePair,
    pub radii: Vec<f64>,
    pub values: Vec<Option<f64>>,
    pub n_ref: usize,
    pub n_obs: usize,
    pub rho_x: f64,
    pub rho_y: f64,
    pub window_volume: f64,
}

/// How measure extraction runs: the scene-wide field spacing, and whether
/// vertex distances come from the grid or straight from the reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryOptions {
    pub grid_spacing: f64,
    pub exact_vertex_distance: bool,
}

/// Indices sorted by (id, location); summation follows this order so any
/// input permutation of the germ lists produces bitwise-identical sums.
fn canonical_order<const D: usize, T>(
    items: &[T],
    id: impl Fn(&T) -> &str,
    location: impl Fn(&T) -> Point<D>,
) -> Vec<usize> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| {
        id(&items[a]).cmp(id(&items[b])).then_with(|| {
            let pa = location(&items[a]);
            let pb = location(&items[b]);
            (0..D)
                .map(|k| pa[k].total_cmp(&pb[k]))
                .fold(std::cmp::Ordering::Equal, |acc, c| acc.then(c))
        })
    });
    order
}

fn boxes_overlap<const D: usize>(
    a_lo: Point<D>,
    a_hi: Point<D>,
    b_lo: Point<D>,
    b_hi: Point<D>,
) -> bool {
    (0..D).all(|k| a_lo[k] <= b_hi[k] && a_hi[k] >= b_lo[k])
}

struct ReferenceTerm {
    /// Sum of measures over observed objects, one entry per radius.
    mu_sums: Vec<f64>,
    /// Normalization per radius when the normalized statistic is requested.
    n: Option<Vec<f64>>,
}

fn reference_term<const D: usize>(
    scene: &GermGrainScene<D>,
    placed_x: &[(usize, Option<(Point<D>, Point<D>)>)],
    germ_index: usize,
    radii: &RadiusGrid,
    pair: MeasurePair,
    options: &SummaryOptions,
    want_n: bool,
) -> Result<ReferenceTerm, SummaryError> {
    let germ = &scene.reference()[germ_index];
    let placed_shape = germ.placed();
    let mode = match &placed_shape {
        ReferenceShape::Mesh(m) if !m.has_interior() => SolidMode::Surface,
        _ => SolidMode::Solid,
    };
    let compiled = CompiledReference::compile(&placed_shape, mode)?;
    let r_max = radii.r_max();
    let h = options.grid_spacing;
    let pad = r_max + 3.0 * h * (D as f64).sqrt();

    // Observed objects that can touch the reference's largest parallel set;
    // all others contribute exactly zero.
    let support = compiled.support_bbox();
    let candidates: Vec<usize> = match support {
        Some((lo, hi)) => (0..placed_x.len())
            .filter(|&i| match placed_x[i].1 {
                Some((xlo, xhi)) => boxes_overlap(
                    xlo,
                    xhi,
                    lo.add_scalar(-r_max),
                    hi.add_scalar(r_max),
                ),
                None => false,
            })
            .collect(),
        None => (0..placed_x.len()).collect(),
    };

    let field: Option<DistanceField<D>> = if options.exact_vertex_distance && !want_n {
        None
    } else {
        let (mut lo, mut hi) = match support {
            Some((blo, bhi)) => (blo.add_scalar(-pad), bhi.add_scalar(pad)),
            None => (scene.extended_window().lower(), scene.extended_window().upper()),
        };
        if !options.exact_vertex_distance {
            for &i in &candidates {
                if let Some((xlo, xhi)) = placed_x[i].1 {
                    for k in 0..D {
                        lo[k] = lo[k].min(xlo[k] - h);
                        hi[k] = hi[k].max(xhi[k] + h);
                    }
                }
            }
        }
        let domain = Window::new(lo, hi)?;
        Some(DistanceField::build(&compiled, GridSpec::covering(&domain, h)?))
    };

    // Candidates are placed on demand; non-candidates never materialize, so
    // memory stays proportional to the local neighborhood, not the scene.
    let mut mu_sums = vec![0.0; radii.len()];
    for &i in &candidates {
        let placed = scene.observed()[placed_x[i].0].placed();
        let ctx = if options.exact_vertex_distance {
            MeasureContext::exact(&placed, &compiled)
        } else {
            MeasureContext::interpolated(&placed, field.as_ref().unwrap())?
        };
        let curve = ctx.mu_curve(radii, pair)?;
        for (acc, v) in mu_sums.iter_mut().zip(curve) {
            *acc += v;
        }
    }

    let n = if want_n {
        let field = field.as_ref().unwrap();
        let scan = match support {
            Some((blo, bhi)) => NormalizationScan::clipped(
                field,
                scene.window(),
                blo.add_scalar(-pad),
                bhi.add_scalar(pad),
            ),
            None => NormalizationScan::clipped(
                field,
                scene.window(),
                scene.window().lower(),
                scene.window().upper(),
            ),
        };
        Some(scan.curve(radii, pair.eps_prime()))
    } else {
        None
    };

    Ok(ReferenceTerm { mu_sums, n })
}

fn summary_over_scene<const D: usize>(
    scene: &GermGrainScene<D>,
    radii: &RadiusGrid,
    pair: MeasurePair,
    options: &SummaryOptions,
    kind: SummaryKind,
) -> Result<SummaryCurve, SummaryError> {
    scene.check_r_max(radii.r_max())?;
    let intensities = estimate_intensities(scene);
    if intensities.n_obs_in_window == 0 {
        return Err(SummaryError::ZeroIntensity { which: "observed" });
    }
    if intensities.n_ref_in_window == 0 {
        return Err(SummaryError::ZeroIntensity { which: "reference" });
    }

    let obs_order = canonical_order::<D, _>(scene.observed(), |g| &g.id, |g| g.location);
    let placed_x: Vec<(usize, Option<(Point<D>, Point<D>)>)> = obs_order
        .into_iter()
        .map(|i| {
            let g = &scene.observed()[i];
            let bbox = g.shape.bbox().map(|(lo, hi)| (lo + g.location, hi + g.location));
            (i, bbox)
        })
        .collect();

    let ref_order: Vec<usize> = canonical_order::<D, _>(scene.reference(), |g| &g.id, |g| g.location)
        .into_iter()
        .filter(|&i| scene.window().contains_point(scene.reference()[i].location))
        .collect();

    let want_n = kind == SummaryKind::LHat;
    let terms: Vec<ReferenceTerm> = ref_order
        .par_iter()
        .map(|&i| reference_term(scene, &placed_x, i, radii, pair, options, want_n))
        .collect::<Result<_, _>>()?;

    // Fixed-order reduction over canonical reference order.
    let mut totals: Vec<Option<f64>> = vec![Some(0.0); radii.len()];
    for term in &terms {
        match &term.n {
            None => {
                for (acc, m) in totals.iter_mut().zip(&term.mu_sums) {
                    *acc = acc.map(|v| v + m);
                }
            }
            Some(n) => {
                for ((acc, m), nv) in totals.iter_mut().zip(&term.mu_sums).zip(n) {
                    if *nv > 0.0 {
                        *acc = acc.map(|v| v + m / nv);
                    } else {
                        *acc = None;
                    }
                }
            }
        }
    }

    let volume = scene.window().volume();
    let scale = volume / (intensities.n_obs_in_window as f64 * intensities.n_ref_in_window as f64);
    let values = totals.into_iter().map(|t| t.map(|v| v * scale)).collect();
    Ok(SummaryCurve {
        kind,
        pair,
        radii: radii.radii().to_vec(),
        values,
        n_ref: intensities.n_ref_in_window,
        n_obs: intensities.n_obs_in_window,
        rho_x: intensities.rho_x,
        rho_y: intensities.rho_y,
        window_volume: volume,
    })
}

/// Cross-K estimate: window-and-intensity normalized sum of pairwise
/// measures between each in-window reference object and every observed
/// object.
pub fn k_hat<const D: usize>(
    scene: &GermGrainScene<D>,
    radii: &RadiusGrid,
    pair: MeasurePair,
    options: &SummaryOptions,
) -> Result<SummaryCurve, SummaryError> {
    summary_over_scene(scene, radii, pair, options, SummaryKind::KHat)
}

/// Cross-K with each pairwise measure divided by that reference's window
/// normalization. Radii where any in-window reference has zero
/// normalization carry no value.
pub fn l_hat<const D: usize>(
    scene: &GermGrainScene<D>,
    radii: &RadiusGrid,
    pair: MeasurePair,
    options: &SummaryOptions,
) -> Result<SummaryCurve, SummaryError> {
    summary_over_scene(scene, radii, pair, options, SummaryKind::LHat)
}

/// Classic point cross-K: mean over in-window reference points of the count
/// of observed points within distance r.
pub fn cross_k_points<const D: usize>(
    points_x: &[Point<D>],
    points_y: &[Point<D>],
    radii: &RadiusGrid,
    window: &Window<D>,
) -> Result<SummaryCurve, SummaryError> {
    if points_x.is_empty() {
        return Err(SummaryError::EmptyPointSet { which: "observed" });
    }
    if points_y.is_empty() {
        return Err(SummaryError::EmptyPointSet { which: "reference" });
    }
    let in_window: Vec<Point<D>> = points_y
        .iter()
        .copied()
        .filter(|y| window.contains_point(*y))
        .collect();
    if in_window.is_empty() {
        return Err(SummaryError::ZeroIntensity { which: "reference" });
    }
    let mut counts = vec![0usize; radii.len()];
    for y in &in_window {
        let mut d: Vec<f64> = points_x.iter().map(|x| (x - y).norm()).collect();
        d.sort_by(f64::total_cmp);
        let mut j = 0;
        for (k, &r) in radii.radii().iter().enumerate() {
            while j < d.len() && d[j] <= r {
                j += 1;
            }
            counts[k] += j;
        }
    }
    let volume = window.volume();
    let n_x_in = points_x.iter().filter(|x| window.contains_point(**x)).count();
    Ok(SummaryCurve {
        kind: SummaryKind::PointCross,
        pair: MeasurePair::new(0, 0).unwrap(),
        radii: radii.radii().to_vec(),
        values: counts
            .into_iter()
            .map(|c| Some(c as f64 / in_window.len() as f64))
            .collect(),
        n_ref: in_window.len(),
        n_obs: n_x_in,
        rho_x: n_x_in as f64 / volume,
        rho_y: in_window.len() as f64 / volume,
        window_volume: volume,
    })
}
