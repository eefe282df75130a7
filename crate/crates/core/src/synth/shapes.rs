//! Mesh generators for the synthetic scenes.
//!
//! All generated solids are star-shaped around their center, so the interior
//! tessellation cones every boundary simplex to a center vertex.

use std::collections::HashMap;

use nalgebra::{Vector2, Vector3};
use rand::Rng;

use crate::geom::complex::SimplicialComplex;

/// Axis-aligned cube: 8 corners plus a center vertex, 12 boundary triangles,
/// 12 interior tetrahedra.
pub fn cube_mesh(side: f64, center: Vector3<f64>) -> SimplicialComplex<3> {
    let h = side / 2.0;
    let mut vertices: Vec<Vector3<f64>> = (0..8)
        .map(|id| {
            Vector3::new(
                center.x + if id & 1 == 0 { -h } else { h },
                center.y + if id & 2 == 0 { -h } else { h },
                center.z + if id & 4 == 0 { -h } else { h },
            )
        })
        .collect();
    vertices.push(center);
    // Outward-oriented triangles, two per face.
    let boundary: Vec<[usize; 3]> = vec![
        [0, 2, 3],
        [0, 3, 1],
        [4, 5, 7],
        [4, 7, 6],
        [0, 1, 5],
        [0, 5, 4],
        [2, 6, 7],
        [2, 7, 3],
        [0, 4, 6],
        [0, 6, 2],
        [1, 3, 7],
        [1, 7, 5],
    ];
    cone_to_center(vertices, boundary, 8)
}

/// Icosphere with a vertex exactly at the south pole `center - (0,0,radius)`.
/// The pole vertex makes tangent configurations exact: the generated mesh
/// touches a plane below it at distance zero.
pub fn icosphere(radius: f64, subdivisions: u32, center: Vector3<f64>) -> SimplicialComplex<3> {
    // Icosahedron as a gyroelongated pentagonal bipyramid: two exact poles
    // and two rings of five vertices at height +-1/sqrt(5).
    let ring_r = 2.0 / 5.0_f64.sqrt();
    let ring_z = 1.0 / 5.0_f64.sqrt();
    let mut dirs: Vec<Vector3<f64>> = Vec::with_capacity(12);
    dirs.push(Vector3::new(0.0, 0.0, 1.0));
    for k in 0..5 {
        let a = 2.0 * std::f64::consts::PI * k as f64 / 5.0;
        dirs.push(Vector3::new(ring_r * a.cos(), ring_r * a.sin(), ring_z));
    }
    for k in 0..5 {
        let a = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / 5.0;
        dirs.push(Vector3::new(ring_r * a.cos(), ring_r * a.sin(), -ring_z));
    }
    dirs.push(Vector3::new(0.0, 0.0, -1.0));

    let upper = |k: usize| 1 + k % 5;
    let lower = |k: usize| 6 + k % 5;
    let mut tris: Vec<[usize; 3]> = Vec::with_capacity(20);
    for k in 0..5 {
        tris.push([0, upper(k), upper(k + 1)]);
        tris.push([upper(k), lower(k), upper(k + 1)]);
        tris.push([lower(k), lower(k + 1), upper(k + 1)]);
        tris.push([11, lower(k + 1), lower(k)]);
    }

    for _ in 0..subdivisions {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(tris.len() * 4);
        for t in &tris {
            let mut mid = |a: usize, b: usize, dirs: &mut Vec<Vector3<f64>>| {
                let key = (a.min(b), a.max(b));
                *midpoint.entry(key).or_insert_with(|| {
                    let m = (dirs[a] + dirs[b]).normalize();
                    dirs.push(m);
                    dirs.len() - 1
                })
            };
            let ab = mid(t[0], t[1], &mut dirs);
            let bc = mid(t[1], t[2], &mut dirs);
            let ca = mid(t[2], t[0], &mut dirs);
            next.push([t[0], ab, ca]);
            next.push([t[1], bc, ab]);
            next.push([t[2], ca, bc]);
            next.push([ab, bc, ca]);
        }
        tris = next;
    }

    let n = dirs.len();
    let mut vertices: Vec<Vector3<f64>> = dirs
        .into_iter()
        .map(|d| center + d * (radius / d.norm()))
        .collect();
    vertices.push(center);
    cone_to_center(vertices, tris, n)
}

/// Star-shaped blob: an icosphere with a smooth random radial modulation.
/// Modulation stays within +-30% of the base radius, so the shape remains
/// star-shaped around its center.
pub fn blob(
    base_radius: f64,
    subdivisions: u32,
    center: Vector3<f64>,
    rng: &mut impl Rng,
) -> SimplicialComplex<3> {
    let sphere = icosphere(1.0, subdivisions, Vector3::zeros());
    let axes: Vec<Vector3<f64>> = (0..3)
        .map(|_| {
            loop {
                let v = Vector3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                if v.norm() > 0.1 {
                    break v.normalize();
                }
            }
        })
        .collect();
    let coeff: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.1..0.1)).collect();

    let n_boundary = sphere.vertices().len() - 1;
    let mut vertices: Vec<Vector3<f64>> = sphere.vertices()[..n_boundary]
        .iter()
        .map(|u| {
            let m = 1.0
                + coeff[0] * u.dot(&axes[0]).powi(2)
                + coeff[1] * u.dot(&axes[1]).powi(3)
                + coeff[2] * u.dot(&axes[0]) * u.dot(&axes[2]);
            center + u * (base_radius * m)
        })
        .collect();
    vertices.push(center);
    cone_to_center(vertices, sphere.boundary().to_vec(), n_boundary)
}

/// Regular n-gon of the given circumradius. The first vertex sits exactly at
/// `center - (0, circumradius)`, so tangent configurations against a line
/// below are exact.
pub fn regular_polygon(circumradius: f64, n: usize, center: Vector2<f64>) -> SimplicialComplex<2> {
    assert!(n >= 3, "polygon needs at least 3 vertices");
    let mut vertices: Vec<Vector2<f64>> = (0..n)
        .map(|k| {
            if k == 0 {
                return Vector2::new(center.x, center.y - circumradius);
            }
            let a = -std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            center + Vector2::new(circumradius * a.cos(), circumradius * a.sin())
        })
        .collect();
    vertices.push(center);
    let boundary: Vec<[usize; 2]> = (0..n).map(|k| [k, (k + 1) % n]).collect();
    let interior: Vec<usize> = (0..n).flat_map(|k| [k, (k + 1) % n, n]).collect();
    SimplicialComplex::with_interior(vertices, boundary, interior)
        .expect("generated polygon tessellation is well-formed")
}

fn cone_to_center(
    vertices: Vec<Vector3<f64>>,
    boundary: Vec<[usize; 3]>,
    center_index: usize,
) -> SimplicialComplex<3> {
    let interior: Vec<usize> = boundary
        .iter()
        .flat_map(|t| [t[0], t[1], t[2], center_index])
        .collect();
    SimplicialComplex::with_interior(vertices, boundary, interior)
        .expect("generated cone tessellation is well-formed")
}
