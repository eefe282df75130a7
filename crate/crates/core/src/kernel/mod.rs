//! Exact measure kernels on simplices.
//!
//! Cells are top-dimensional simplices (triangles in 2D, tetrahedra in 3D),
//! facets are their boundary counterparts (segments in 2D, triangles in 3D).
//! Every kernel takes the signed values `s[i] = f(v_i) - r` of an affine
//! field at the simplex vertices; the sub-level side `s <= 0` is inside.
//! Ties sit on the inside so that degenerate cuts collapse to measure zero
//! instead of being double counted.
//!
//! Dimensions other than 2 and 3 are rejected at scene construction, so the
//! dispatchers may panic on them.

mod dist;
mod tet;
mod tri;

use nalgebra::{SVector, Vector2, Vector3};

/// Kuhn decomposition of the unit cube into six tetrahedra sharing the main
/// diagonal. Corner ids encode offsets as `bx + 2*by + 4*bz`. Applying the
/// same decomposition to every grid cube keeps shared faces triangulated
/// identically, so interpolated level surfaces are continuous across cells.
pub const TETS_PER_CUBE: [[usize; 4]; 6] = [
    [0, 1, 3, 7],
    [0, 1, 5, 7],
    [0, 2, 3, 7],
    [0, 2, 6, 7],
    [0, 4, 5, 7],
    [0, 4, 6, 7],
];

/// Square analogue: two triangles sharing the main diagonal, corner ids
/// `bx + 2*by`.
pub const TRIS_PER_SQUARE: [[usize; 3]; 2] = [[0, 1, 3], [0, 2, 3]];

fn v2<const D: usize>(p: &SVector<f64, D>) -> Vector2<f64> {
    Vector2::new(p[0], p[1])
}

fn v3<const D: usize>(p: &SVector<f64, D>) -> Vector3<f64> {
    Vector3::new(p[0], p[1], p[2])
}

fn a2<const D: usize, const N: usize>(p: &[SVector<f64, D>]) -> [Vector2<f64>; N] {
    std::array::from_fn(|i| v2(&p[i]))
}

fn a3<const D: usize, const N: usize>(p: &[SVector<f64, D>]) -> [Vector3<f64>; N] {
    std::array::from_fn(|i| v3(&p[i]))
}

fn sa<const N: usize>(s: &[f64]) -> [f64; N] {
    std::array::from_fn(|i| s[i])
}

/// Lebesgue measure of a cell given its `D + 1` vertices.
pub fn cell_measure<const D: usize>(p: &[SVector<f64, D>]) -> f64 {
    match D {
        2 => tri::area2(&a2(p)),
        3 => tet::volume(&a3(p)),
        _ => panic!("unsupported dimension {D}"),
    }
}

/// Hausdorff measure of a facet given its `D` vertices.
pub fn facet_measure<const D: usize>(p: &[SVector<f64, D>]) -> f64 {
    match D {
        2 => tri::length(&a2(p)),
        3 => tri::area3(&a3(p)),
        _ => panic!("unsupported dimension {D}"),
    }
}

/// Measure of the sub-level part of a cell.
pub fn cell_clip_measure<const D: usize>(p: &[SVector<f64, D>], s: &[f64]) -> f64 {
    match D {
        2 => tri::clip_area2(&a2(p), &sa(s)),
        3 => tet::clip_volume(&a3(p), &sa(s)),
        _ => panic!("unsupported dimension {D}"),
    }
}

/// Measure of the level set inside a cell (area in 3D, length in 2D).
pub fn cell_level_measure<const D: usize>(p: &[SVector<f64, D>], s: &[f64]) -> f64 {
    match D {
        2 => tri::level_length2(&a2(p), &sa(s)),
        3 => tet::level_area(&a3(p), &sa(s)),
        _ => panic!("unsupported dimension {D}"),
    }
}

/// Measure of the sub-level part of a facet.
pub fn facet_clip_measure<const D: usize>(p: &[SVector<f64, D>], s: &[f64]) -> f64 {
    match D {
        2 => tri::clip_length(&a2(p), &sa(s)),
        3 => tri::clip_area3(&a3(p), &sa(s)),
        _ => panic!("unsupported dimension {D}"),
    }
}

/// Measure of the level set restricted to a facet (length in 3D, crossing
/// count in 2D).
pub fn facet_level_measure<const D: usize>(p: &[SVector<f64, D>], s: &[f64]) -> f64 {
    match D {
        2 => tri::level_count(&sa(s)),
        3 => tri::level_length3(&a3(p), &sa(s)),
        _ => panic!("unsupported dimension {D}"),
    }
}

/// Euclidean distance from a point to a closed facet.
pub fn point_facet_distance<const D: usize>(q: &SVector<f64, D>, facet: &[SVector<f64, D>]) -> f64 {
    match D {
        2 => dist::point_segment(&v2(q), &v2(&facet[0]), &v2(&facet[1])),
        3 => dist::point_triangle(&v3(q), &v3(&facet[0]), &v3(&facet[1]), &v3(&facet[2])),
        _ => panic!("unsupported dimension {D}"),
    }
}

/// Euclidean distance from a point to a closed segment, any dimension.
pub fn point_segment_distance<const D: usize>(
    q: &SVector<f64, D>,
    a: &SVector<f64, D>,
    b: &SVector<f64, D>,
) -> f64 {
    dist::point_segment(q, a, b)
}
