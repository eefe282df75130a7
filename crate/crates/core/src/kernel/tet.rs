//! Clipping a tetrahedron against the sub-level set of an affine scalar field.
//!
//! The field is given by its values at the four vertices; inside means
//! `value <= threshold` (ties count as inside, so a cut collapsing onto a
//! vertex or face contributes zero measure without special cases).

use nalgebra::Vector3;

type P3 = Vector3<f64>;

pub fn volume(p: &[P3; 4]) -> f64 {
    ((p[1] - p[0]).cross(&(p[2] - p[0])).dot(&(p[3] - p[0])) / 6.0).abs()
}

#[inline]
fn cross_point(p: &[P3; 4], s: &[f64; 4], from: usize, to: usize) -> P3 {
    let t = s[from] / (s[from] - s[to]);
    p[from] + (p[to] - p[from]) * t
}

#[inline]
fn tet_abs(a: P3, b: P3, c: P3, d: P3) -> f64 {
    ((b - a).cross(&(c - a)).dot(&(d - a)) / 6.0).abs()
}

fn partition(s: &[f64; 4]) -> ([usize; 4], usize) {
    let mut ix = [0usize; 4];
    let mut n_in = 0;
    let mut n_out = 0;
    for i in 0..4 {
        if s[i] <= 0.0 {
            ix[n_in] = i;
            n_in += 1;
        } else {
            n_out += 1;
            ix[4 - n_out] = i;
        }
    }
    (ix, n_in)
}

/// Volume of the part of the tetrahedron where the affine interpolant of
/// `s` is `<= 0`.
pub fn clip_volume(p: &[P3; 4], s: &[f64; 4]) -> f64 {
    let (ix, n_in) = partition(s);
    match n_in {
        0 => 0.0,
        4 => volume(p),
        1 => {
            // Corner tetrahedron around the single inside vertex.
            let i = ix[0];
            let frac: f64 =
                ix[1..].iter().map(|&j| s[i] / (s[i] - s[j])).product();
            frac * volume(p)
        }
        3 => {
            let l = ix[3];
            let frac: f64 =
                ix[..3].iter().map(|&j| s[l] / (s[l] - s[j])).product();
            (1.0 - frac) * volume(p)
        }
        2 => {
            // Wedge between the inside edge (i,j) and the cut quadrilateral.
            let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
            let cik = cross_point(p, s, i, k);
            let cil = cross_point(p, s, i, l);
            let cjk = cross_point(p, s, j, k);
            let cjl = cross_point(p, s, j, l);
            tet_abs(p[i], p[j], cjk, cjl)
                + tet_abs(p[i], cik, cil, cjl)
                + tet_abs(p[i], cik, cjl, cjk)
        }
        _ => unreachable!(),
    }
}

fn tri_area(a: P3, b: P3, c: P3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

/// Area of the level-set patch `{interpolant == 0}` inside the tetrahedron.
pub fn level_area(p: &[P3; 4], s: &[f64; 4]) -> f64 {
    let (ix, n_in) = partition(s);
    match n_in {
        0 | 4 => 0.0,
        1 => {
            let i = ix[0];
            tri_area(
                cross_point(p, s, i, ix[1]),
                cross_point(p, s, i, ix[2]),
                cross_point(p, s, i, ix[3]),
            )
        }
        3 => {
            let l = ix[3];
            tri_area(
                cross_point(p, s, l, ix[0]),
                cross_point(p, s, l, ix[1]),
                cross_point(p, s, l, ix[2]),
            )
        }
        2 => {
            let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
            let cik = cross_point(p, s, i, k);
            let cil = cross_point(p, s, i, l);
            let cjk = cross_point(p, s, j, k);
            let cjl = cross_point(p, s, j, l);
            tri_area(cik, cil, cjl) + tri_area(cik, cjl, cjk)
        }
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tet(rng: &mut ChaCha8Rng) -> [P3; 4] {
        loop {
            let p: [P3; 4] = std::array::from_fn(|_| {
                P3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
            });
            if volume(&p) > 0.05 {
                return p;
            }
        }
    }

    fn mc_fraction(s: &[f64; 4], rng: &mut ChaCha8Rng, n: usize) -> f64 {
        let mut hits = 0usize;
        for _ in 0..n {
            let mut u = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
            u.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let w = [u[0], u[1] - u[0], u[2] - u[1], 1.0 - u[2]];
            let val = s[0] * w[0] + s[1] * w[1] + s[2] * w[2] + s[3] * w[3];
            if val <= 0.0 {
                hits += 1;
            }
        }
        hits as f64 / n as f64
    }

    #[test]
    fn clip_volume_matches_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        for _ in 0..16 {
            let p = random_tet(&mut rng);
            let s: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.5..1.5));
            let frac = clip_volume(&p, &s) / volume(&p);
            let mc = mc_fraction(&s, &mut rng, n);
            let sigma = (frac.max(1e-3) * (1.0 - frac).max(1e-3) / n as f64).sqrt();
            assert!(
                (frac - mc).abs() <= 5.0 * sigma + 1e-4,
                "frac {frac} vs mc {mc} for s={s:?}"
            );
        }
    }

    #[test]
    fn clip_volume_and_complement_fill_the_tet() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let p = random_tet(&mut rng);
            let s: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let s_neg: [f64; 4] = std::array::from_fn(|i| -s[i]);
            let v = volume(&p);
            let sum = clip_volume(&p, &s) + clip_volume(&p, &s_neg);
            assert!((sum - v).abs() <= 1e-12 * v.max(1.0), "sum {sum} vs {v}");
        }
    }

    #[test]
    fn axis_tet_slab_is_exact() {
        let p = [
            P3::zeros(),
            P3::new(1.0, 0.0, 0.0),
            P3::new(0.0, 1.0, 0.0),
            P3::new(0.0, 0.0, 1.0),
        ];
        for r in [0.1f64, 0.25, 0.5, 0.75, 0.9] {
            let s = [0.0 - r, 0.0 - r, 0.0 - r, 1.0 - r];
            let expect = (1.0 - (1.0 - r).powi(3)) / 6.0;
            assert!((clip_volume(&p, &s) - expect).abs() < 1e-14, "r={r}");
        }
    }

    #[test]
    fn level_area_is_derivative_of_clip_volume() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let p = random_tet(&mut rng);
            let f: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let r = rng.gen_range(-0.5..0.5);
            // Skip configurations where the cut passes within FD reach of a vertex.
            let delta = 1e-5;
            if f.iter().any(|v| (v - r).abs() < 10.0 * delta) {
                continue;
            }
            let m = Matrix3::from_rows(&[
                (p[1] - p[0]).transpose(),
                (p[2] - p[0]).transpose(),
                (p[3] - p[0]).transpose(),
            ]);
            let rhs = P3::new(f[1] - f[0], f[2] - f[0], f[3] - f[0]);
            let grad = m.lu().solve(&rhs).unwrap();
            let sv = |rr: f64| -> [f64; 4] { std::array::from_fn(|i| f[i] - rr) };
            let dv = (clip_volume(&p, &sv(r + delta)) - clip_volume(&p, &sv(r - delta))) / (2.0 * delta);
            let area = level_area(&p, &sv(r));
            let expect = dv * grad.norm();
            if expect > 1e-3 {
                assert!(
                    (area - expect).abs() / expect < 1e-3,
                    "area {area} vs fd {expect}"
                );
            } else {
                assert!(area < 1e-2);
            }
        }
    }

    #[test]
    fn tie_patterns_collapse_consistently() {
        let p = [
            P3::zeros(),
            P3::new(2.0, 0.0, 0.0),
            P3::new(0.0, 2.0, 0.0),
            P3::new(0.0, 0.0, 2.0),
        ];
        let v = volume(&p);
        let face = tri_area(p[0], p[1], p[2]);

        // Cut exactly on the (0,1,2) face: face counts as the level patch once.
        let s = [0.0, 0.0, 0.0, 1.0];
        assert_eq!(clip_volume(&p, &s), 0.0);
        assert!((level_area(&p, &s) - face).abs() < 1e-12);

        // All four on the level: everything inside, no patch.
        let s = [0.0; 4];
        assert!((clip_volume(&p, &s) - v).abs() < 1e-12);
        assert_eq!(level_area(&p, &s), 0.0);

        // Level through a single vertex from outside.
        let s = [0.0, 1.0, 1.0, 1.0];
        assert_eq!(clip_volume(&p, &s), 0.0);
        assert_eq!(level_area(&p, &s), 0.0);

        // Level through an edge.
        let s = [0.0, 0.0, 0.5, 0.5];
        assert_eq!(clip_volume(&p, &s), 0.0);
        assert_eq!(level_area(&p, &s), 0.0);
    }

    #[test]
    fn clip_volume_is_monotone_in_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..50 {
            let p = random_tet(&mut rng);
            let f: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let mut prev = 0.0;
            for k in 0..40 {
                let r = -1.2 + 2.4 * k as f64 / 39.0;
                let s: [f64; 4] = std::array::from_fn(|i| f[i] - r);
                let v = clip_volume(&p, &s);
                assert!(v >= prev - 1e-12, "not monotone at r={r}");
                prev = v;
            }
        }
    }
}
