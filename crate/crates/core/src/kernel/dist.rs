//! Point-to-facet distance primitives.

use nalgebra::{SVector, Vector3};

/// Distance from `q` to the closed segment `[a, b]`, any dimension.
pub fn point_segment<const D: usize>(
    q: &SVector<f64, D>,
    a: &SVector<f64, D>,
    b: &SVector<f64, D>,
) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (q - a).norm();
    }
    let t = ((q - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (q - (a + ab * t)).norm()
}

/// Distance from `q` to the closed triangle `abc` via Voronoi region
/// classification of the barycentric projection.
pub fn point_triangle(q: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
    let ab = b - a;
    let ac = c - a;
    let aq = q - a;

    let d1 = ab.dot(&aq);
    let d2 = ac.dot(&aq);
    if d1 <= 0.0 && d2 <= 0.0 {
        return aq.norm();
    }

    let bq = q - b;
    let d3 = ab.dot(&bq);
    let d4 = ac.dot(&bq);
    if d3 >= 0.0 && d4 <= d3 {
        return bq.norm();
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let t = d1 / (d1 - d3);
        return (aq - ab * t).norm();
    }

    let cq = q - c;
    let d5 = ab.dot(&cq);
    let d6 = ac.dot(&cq);
    if d6 >= 0.0 && d5 <= d6 {
        return cq.norm();
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let t = d2 / (d2 - d6);
        return (aq - ac * t).norm();
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (bq - (c - b) * t).norm();
    }

    let denom = va + vb + vc;
    if denom > 0.0 && denom.is_finite() {
        let v = vb / denom;
        let w = vc / denom;
        (aq - ab * v - ac * w).norm()
    } else {
        // Degenerate triangle: fall back to the nearest edge.
        point_segment(q, a, b)
            .min(point_segment(q, b, c))
            .min(point_segment(q, c, a))
    }
}
