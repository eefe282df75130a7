//! Clipping triangles (3D boundary facets, 2D interior cells) and segments
//! (2D boundary facets) against the sub-level set of an affine field.
//!
//! Same tie convention as the tetrahedron kernel: `value <= threshold` is
//! inside.

use nalgebra::{Vector2, Vector3};

type P3 = Vector3<f64>;
type P2 = Vector2<f64>;

pub fn area3(p: &[P3; 3]) -> f64 {
    0.5 * (p[1] - p[0]).cross(&(p[2] - p[0])).norm()
}

pub fn area2(p: &[P2; 3]) -> f64 {
    0.5 * ((p[1] - p[0]).perp(&(p[2] - p[0]))).abs()
}

pub fn length(p: &[P2; 2]) -> f64 {
    (p[1] - p[0]).norm()
}

/// Clips the triangle to `{s <= 0}` and returns the resulting polygon
/// (at most 4 vertices) through the closure.
fn clip_polygon<P: Copy, F: FnMut(P)>(p: &[P; 3], s: &[f64; 3], lerp: impl Fn(P, P, f64) -> P, mut emit: F) {
    for i in 0..3 {
        let j = (i + 1) % 3;
        let (si, sj) = (s[i], s[j]);
        if si <= 0.0 {
            emit(p[i]);
        }
        if (si <= 0.0) != (sj <= 0.0) {
            let t = si / (si - sj);
            emit(lerp(p[i], p[j], t));
        }
    }
}

/// Area of the triangle part where the affine interpolant of `s` is `<= 0`.
pub fn clip_area3(p: &[P3; 3], s: &[f64; 3]) -> f64 {
    let mut poly = [P3::zeros(); 4];
    let mut n = 0;
    clip_polygon(p, s, |a, b, t| a + (b - a) * t, |q| {
        poly[n] = q;
        n += 1;
    });
    if n < 3 {
        return 0.0;
    }
    let mut acc = P3::zeros();
    for k in 1..n - 1 {
        acc += (poly[k] - poly[0]).cross(&(poly[k + 1] - poly[0]));
    }
    0.5 * acc.norm()
}

pub fn clip_area2(p: &[P2; 3], s: &[f64; 3]) -> f64 {
    let mut poly = [P2::zeros(); 4];
    let mut n = 0;
    clip_polygon(p, s, |a, b, t| a + (b - a) * t, |q| {
        poly[n] = q;
        n += 1;
    });
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for k in 1..n - 1 {
        acc += (poly[k] - poly[0]).perp(&(poly[k + 1] - poly[0]));
    }
    0.5 * acc.abs()
}

/// Endpoints of the level segment `{s == 0}` crossing the triangle, if the
/// level set meets the triangle transversally.
fn crossings<P: Copy>(p: &[P; 3], s: &[f64; 3], lerp: impl Fn(P, P, f64) -> P) -> Option<(P, P)> {
    let mut out: [Option<P>; 2] = [None, None];
    let mut n = 0;
    for i in 0..3 {
        let j = (i + 1) % 3;
        if (s[i] <= 0.0) != (s[j] <= 0.0) {
            if n == 2 {
                return None;
            }
            let t = s[i] / (s[i] - s[j]);
            out[n] = Some(lerp(p[i], p[j], t));
            n += 1;
        }
    }
    match (out[0], out[1]) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => None,
    }
}

/// Length of the level segment inside a 3D triangle.
pub fn level_length3(p: &[P3; 3], s: &[f64; 3]) -> f64 {
    match crossings(p, s, |a, b, t| a + (b - a) * t) {
        Some((a, b)) => (b - a).norm(),
        None => 0.0,
    }
}

/// Length of the level segment inside a 2D triangle.
pub fn level_length2(p: &[P2; 3], s: &[f64; 3]) -> f64 {
    match crossings(p, s, |a, b, t| a + (b - a) * t) {
        Some((a, b)) => (b - a).norm(),
        None => 0.0,
    }
}

/// Length of the sub-level part of a 2D segment.
pub fn clip_length(p: &[P2; 2], s: &[f64; 2]) -> f64 {
    match (s[0] <= 0.0, s[1] <= 0.0) {
        (true, true) => length(p),
        (false, false) => 0.0,
        (true, false) => length(p) * (s[0] / (s[0] - s[1])),
        (false, true) => length(p) * (s[1] / (s[1] - s[0])),
    }
}

/// Number of transversal level-set crossings of a 2D segment (0 or 1).
pub fn level_count(s: &[f64; 2]) -> f64 {
    if (s[0] <= 0.0) != (s[1] <= 0.0) {
        1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tri3(rng: &mut ChaCha8Rng) -> [P3; 3] {
        loop {
            let p: [P3; 3] = std::array::from_fn(|_| {
                P3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
            });
            if area3(&p) > 0.05 {
                return p;
            }
        }
    }

    fn random_tri2(rng: &mut ChaCha8Rng) -> [P2; 3] {
        loop {
            let p: [P2; 3] =
                std::array::from_fn(|_| P2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
            if area2(&p) > 0.05 {
                return p;
            }
        }
    }

    fn mc_fraction(s: &[f64; 3], rng: &mut ChaCha8Rng, n: usize) -> f64 {
        let mut hits = 0usize;
        for _ in 0..n {
            let (mut a, mut b) = (rng.gen::<f64>(), rng.gen::<f64>());
            if a + b > 1.0 {
                a = 1.0 - a;
                b = 1.0 - b;
            }
            let w = [1.0 - a - b, a, b];
            if s[0] * w[0] + s[1] * w[1] + s[2] * w[2] <= 0.0 {
                hits += 1;
            }
        }
        hits as f64 / n as f64
    }

    #[test]
    fn clip_area_matches_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 200_000;
        for case in 0..16 {
            let s: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let mc = mc_fraction(&s, &mut rng, n);
            let sigma = (mc.max(1e-3) * (1.0 - mc).max(1e-3) / n as f64).sqrt();
            let t3 = random_tri3(&mut rng);
            let f3 = clip_area3(&t3, &s) / area3(&t3);
            assert!((f3 - mc).abs() <= 5.0 * sigma + 1e-4, "case {case}: 3d {f3} vs mc {mc}");
            let t2 = random_tri2(&mut rng);
            let f2 = clip_area2(&t2, &s) / area2(&t2);
            assert!((f2 - mc).abs() <= 5.0 * sigma + 1e-4, "case {case}: 2d {f2} vs mc {mc}");
        }
    }

    #[test]
    fn clip_area_complement_fills_triangle() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..200 {
            let t = random_tri3(&mut rng);
            let s: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let s_neg: [f64; 3] = std::array::from_fn(|i| -s[i]);
            let total = clip_area3(&t, &s) + clip_area3(&t, &s_neg);
            let a = area3(&t);
            assert!((total - a).abs() <= 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn level_length_is_derivative_of_clip_area() {
        // d/dr area{f <= r} = length{f == r} / |tangential gradient|.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let p = random_tri3(&mut rng);
            let f: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let r = rng.gen_range(-0.5..0.5);
            let delta = 1e-5;
            if f.iter().any(|v| (v - r).abs() < 10.0 * delta) {
                continue;
            }
            let e1 = p[1] - p[0];
            let e2 = p[2] - p[0];
            let (g11, g12, g22) = (e1.dot(&e1), e1.dot(&e2), e2.dot(&e2));
            let det = g11 * g22 - g12 * g12;
            let (d1, d2) = (f[1] - f[0], f[2] - f[0]);
            let alpha = (g22 * d1 - g12 * d2) / det;
            let beta = (g11 * d2 - g12 * d1) / det;
            let grad_norm = (e1 * alpha + e2 * beta).norm();
            let sv = |rr: f64| -> [f64; 3] { std::array::from_fn(|i| f[i] - rr) };
            let da = (clip_area3(&p, &sv(r + delta)) - clip_area3(&p, &sv(r - delta))) / (2.0 * delta);
            let len = level_length3(&p, &sv(r));
            let expect = da * grad_norm;
            if expect > 1e-3 {
                assert!((len - expect).abs() / expect < 1e-3, "len {len} vs fd {expect}");
            } else {
                assert!(len < 1e-2);
            }
        }
    }

    #[test]
    fn segment_clip_is_exact() {
        let p = [P2::new(0.0, 0.0), P2::new(10.0, 0.0)];
        assert_eq!(clip_length(&p, &[-1.0, -2.0]), 10.0);
        assert_eq!(clip_length(&p, &[1.0, 2.0]), 0.0);
        // Crossing at 1/4 of the way from the inside end.
        assert!((clip_length(&p, &[-1.0, 3.0]) - 2.5).abs() < 1e-12);
        assert!((clip_length(&p, &[3.0, -1.0]) - 2.5).abs() < 1e-12);
        assert_eq!(level_count(&[-1.0, 3.0]), 1.0);
        assert_eq!(level_count(&[-1.0, -3.0]), 0.0);
        // A tie endpoint is inside.
        assert_eq!(level_count(&[0.0, 3.0]), 1.0);
        assert_eq!(level_count(&[0.0, -3.0]), 0.0);
    }

    #[test]
    fn tie_vertices_collapse_consistently() {
        let p = [P3::zeros(), P3::new(2.0, 0.0, 0.0), P3::new(0.0, 2.0, 0.0)];
        // Level exactly along edge (0,1): the edge is reported once.
        let s = [0.0, 0.0, 1.0];
        assert_eq!(clip_area3(&p, &s), 0.0);
        assert!((level_length3(&p, &s) - 2.0).abs() < 1e-12);
        // Level through one vertex: degenerate, zero length.
        let s = [0.0, 1.0, 1.0];
        assert_eq!(clip_area3(&p, &s), 0.0);
        assert_eq!(level_length3(&p, &s), 0.0);
        // All-inside triangle contributes its full area and no crossing.
        let s = [0.0, 0.0, 0.0];
        assert_eq!(clip_area3(&p, &s), area3(&p));
        assert_eq!(level_length3(&p, &s), 0.0);
    }
}
