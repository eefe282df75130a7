//! Randomized invariant checks: laws the measures must satisfy for any
//! placement, and serialization fixed points for arbitrary table contents.

use nalgebra::{Vector2, Vector3};
use proptest::collection::vec;
use proptest::option;
use proptest::prelude::*;

use parset::field::{CompiledReference, SolidMode};
use parset::geom::{AnalyticPrimitive, GermGrainScene, ObservedGerm, ReferenceGerm, ReferenceShape, Window};
use parset::io::csv::{parse_measures_csv, parse_summary_csv, render_measures_csv, render_summary_csv};
use parset::io::scene::{parse_scene, write_scene};
use parset::measures::{MeasureContext, MeasurePair, MeasuresTable, RadiusGrid};
use parset::summary::{estimate_intensities, k_hat, SummaryCurve, SummaryKind, SummaryOptions};
use parset::synth::{generate, shapes, SynthSpec};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

/// Any finite f64, including negatives, zeros, and subnormals.
fn finite_f64() -> impl Strategy<Value = f64> {
    prop::num::f64::POSITIVE
        | prop::num::f64::NEGATIVE
        | prop::num::f64::NORMAL
        | prop::num::f64::SUBNORMAL
        | prop::num::f64::ZERO
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    /// Volume and boundary-area measures are nonnegative, nondecreasing in r,
    /// bounded by the object's totals, and saturate exactly once the whole
    /// object is covered.
    #[test]
    fn measure_laws_hold_for_random_placements(
        cx in -80.0f64..80.0,
        cy in -80.0f64..80.0,
        rx in 5.0f64..40.0,
        n in 8usize..32,
        ry in 10.0f64..60.0,
    ) {
        let x = shapes::regular_polygon(rx, n, Vector2::new(cx, cy));
        let totals = x.measure_totals().unwrap();
        let disk = CompiledReference::from_primitive(
            AnalyticPrimitive::solid_sphere(Vector2::zeros(), ry).unwrap(),
        );
        let ctx = MeasureContext::exact(&x, &disk);
        let r_sat = (cx * cx + cy * cy).sqrt() + rx + ry + 5.0;
        let radii = RadiusGrid::uniform_exclusive(r_sat, 12).unwrap();

        let curves: Vec<Vec<f64>> = MeasurePair::all()
            .iter()
            .map(|&p| ctx.mu_curve(&radii, p).unwrap())
            .collect();
        for curve in &curves {
            for &v in curve {
                prop_assert!(v >= 0.0, "negative measure {v}");
            }
        }
        for idx in [0usize, 2] {
            for w in curves[idx].windows(2) {
                prop_assert!(w[1] >= w[0] - 1e-12 * (1.0 + w[1].abs()));
            }
        }
        for &v in &curves[0] {
            prop_assert!(v <= totals.interior_volume * (1.0 + 1e-12));
        }
        for &v in &curves[2] {
            prop_assert!(v <= totals.boundary_measure * (1.0 + 1e-12));
        }
        prop_assert!(close(curves[0][11], totals.interior_volume, 1e-12));
        prop_assert!(close(curves[2][11], totals.boundary_measure, 1e-12));
        prop_assert_eq!(curves[1][11], 0.0);
        prop_assert_eq!(curves[3][11], 0.0);
    }

    /// Translating object and reference together leaves every measure
    /// unchanged up to roundoff.
    #[test]
    fn measures_are_translation_invariant(
        cx in -60.0f64..60.0,
        cy in -60.0f64..60.0,
        rx in 5.0f64..30.0,
        yx in -60.0f64..60.0,
        yy in -60.0f64..60.0,
        ry in 10.0f64..50.0,
        tx in -500.0f64..500.0,
        ty in -500.0f64..500.0,
        frac in 0.2f64..0.9,
    ) {
        let x = shapes::regular_polygon(rx, 16, Vector2::new(cx, cy));
        let y = AnalyticPrimitive::solid_sphere(Vector2::new(yx, yy), ry).unwrap();
        let t = Vector2::new(tx, ty);
        let r = frac * ((Vector2::new(cx, cy) - Vector2::new(yx, yy)).norm() + rx + ry);

        let base_ref = CompiledReference::from_primitive(y.clone());
        let base_ctx = MeasureContext::exact(&x, &base_ref);
        let moved = x.translate(t);
        let moved_ref = CompiledReference::from_primitive(y.translate(t));
        let moved_ctx = MeasureContext::exact(&moved, &moved_ref);
        for p in MeasurePair::all() {
            let a = base_ctx.mu(r, p).unwrap();
            let b = moved_ctx.mu(r, p).unwrap();
            prop_assert!(close(a, b, 1e-9), "pair {} moved {a} -> {b}", p.label());
        }
    }

    /// mu_{e,e'}(sX, (sY)^{sr}) = s^{d-e-e'} mu_{e,e'}(X, Y^r).
    #[test]
    fn measures_scale_covariantly(
        cx in -60.0f64..60.0,
        cy in -60.0f64..60.0,
        rx in 5.0f64..30.0,
        ry in 10.0f64..50.0,
        s in 0.3f64..3.5,
        frac in 0.2f64..0.9,
    ) {
        let x = shapes::regular_polygon(rx, 16, Vector2::new(cx, cy));
        let y = AnalyticPrimitive::solid_sphere(Vector2::zeros(), ry).unwrap();
        let r = frac * ((cx * cx + cy * cy).sqrt() + rx + ry);

        let ctx = MeasureContext::exact(&x, &CompiledReference::from_primitive(y.clone()));
        let x_scaled = x.scale(s);
        let scaled_ref = CompiledReference::from_primitive(y.scale(s));
        let ctx_scaled = MeasureContext::exact(&x_scaled, &scaled_ref);
        for p in MeasurePair::all() {
            let base = ctx.mu(r, p).unwrap();
            let scaled = ctx_scaled.mu(s * r, p).unwrap();
            let power = 2 - p.eps() as i32 - p.eps_prime() as i32;
            let expected = s.powi(power) * base;
            prop_assert!(
                close(scaled, expected, 1e-9),
                "pair {} expected {expected}, got {scaled}",
                p.label()
            );
        }
    }

    /// The summary engine's K-hat equals the direct double sum over germs,
    /// up to summation order.
    #[test]
    fn k_hat_matches_direct_double_sum(
        xs in vec((10.0f64..190.0, 10.0f64..190.0, 4.0f64..12.0), 1..5),
        ys in vec((20.0f64..180.0, 20.0f64..180.0, 5.0f64..15.0), 1..3),
    ) {
        let window = Window::new(Vector2::zeros(), Vector2::new(200.0, 200.0)).unwrap();
        let extended = window.dilate(60.0).unwrap();
        let observed: Vec<ObservedGerm<2>> = xs
            .iter()
            .enumerate()
            .map(|(i, &(px, py, r))| ObservedGerm {
                id: format!("x{i}"),
                location: Vector2::new(px, py),
                shape: std::sync::Arc::new(shapes::regular_polygon(r, 12, Vector2::zeros())),
            })
            .collect();
        let reference: Vec<ReferenceGerm<2>> = ys
            .iter()
            .enumerate()
            .map(|(i, &(px, py, r))| ReferenceGerm {
                id: format!("y{i}"),
                location: Vector2::new(px, py),
                shape: ReferenceShape::Primitive(
                    AnalyticPrimitive::solid_sphere(Vector2::zeros(), r).unwrap(),
                ),
            })
            .collect();
        let scene = GermGrainScene::new(observed, reference, window, extended).unwrap();
        let radii = RadiusGrid::new(vec![8.0, 20.0, 40.0]).unwrap();
        let options = SummaryOptions { grid_spacing: 8.0, exact_vertex_distance: true };

        let ints = estimate_intensities(&scene);
        let scale = scene.window().volume()
            / (ints.n_obs_in_window as f64 * ints.n_ref_in_window as f64);
        for p in MeasurePair::all() {
            let curve = k_hat(&scene, &radii, p, &options).unwrap();
            for (ri, &r) in radii.radii().iter().enumerate() {
                let mut total = 0.0;
                for germ in scene.reference() {
                    let compiled =
                        CompiledReference::compile(&germ.placed(), SolidMode::Solid).unwrap();
                    for obs in scene.observed() {
                        let placed = obs.placed();
                        total += MeasureContext::exact(&placed, &compiled).mu(r, p).unwrap();
                    }
                }
                let direct = scale * total;
                let engine = curve.values[ri].unwrap();
                prop_assert!(
                    close(engine, direct, 1e-11),
                    "pair {} r={r}: engine {engine} direct {direct}",
                    p.label()
                );
            }
        }
    }

    /// Valid radius grids are accepted; duplicates, disorder, negatives, and
    /// non-finite entries are rejected.
    #[test]
    fn radius_grid_validation(
        raw in vec(0.001f64..1e6, 1..30),
        corruption in 0usize..4,
        at in 0usize..30,
    ) {
        let mut radii = raw;
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        prop_assert!(RadiusGrid::new(radii.clone()).is_ok());

        let at = at % radii.len();
        match corruption {
            0 => radii[at] = -radii[at],
            1 => radii[at] = f64::NAN,
            2 => radii[at] = f64::INFINITY,
            _ => radii.insert(at, radii[at]),
        }
        prop_assert!(RadiusGrid::new(radii).is_err());
    }

    /// Windows require strictly positive extent on every axis.
    #[test]
    fn window_validation(
        lx in -100.0f64..100.0,
        ly in -100.0f64..100.0,
        sx in -50.0f64..50.0,
        sy in -50.0f64..50.0,
    ) {
        let lower = Vector2::new(lx, ly);
        let upper = Vector2::new(lx + sx, ly + sy);
        let ok = Window::new(lower, upper).is_ok();
        prop_assert_eq!(ok, sx > 0.0 && sy > 0.0);
    }

    /// Summary CSV text is a fixed point of render/parse, and parsing
    /// restores the curve exactly.
    #[test]
    fn summary_csv_round_trips(
        kind in prop_oneof![
            Just(SummaryKind::KHat),
            Just(SummaryKind::LHat),
            Just(SummaryKind::PointCross)
        ],
        pair_idx in 0usize..4,
        rows in vec((finite_f64(), option::of(finite_f64())), 1..20),
        n_ref in any::<usize>(),
        n_obs in any::<usize>(),
        rho_x in finite_f64(),
        rho_y in finite_f64(),
        window_volume in finite_f64(),
    ) {
        let curve = SummaryCurve {
            kind,
            pair: MeasurePair::all()[pair_idx],
            radii: rows.iter().map(|r| r.0).collect(),
            values: rows.iter().map(|r| r.1).collect(),
            n_ref,
            n_obs,
            rho_x,
            rho_y,
            window_volume,
        };
        let text = render_summary_csv(&curve);
        let back = parse_summary_csv(std::path::Path::new("p.csv"), &text).unwrap();
        prop_assert_eq!(&back, &curve);
        prop_assert_eq!(render_summary_csv(&back), text);
    }

    /// Measures CSV text is a fixed point of render/parse; dense columns and
    /// infinite normalizations survive exactly.
    #[test]
    fn measures_csv_round_trips(
        radii in vec(finite_f64(), 1..15),
        present in [any::<bool>(), any::<bool>(), any::<bool>(), any::<bool>()],
        fill in vec(finite_f64(), 200),
        n_inf in vec((any::<bool>(), any::<bool>()), 15),
        nu_missing in vec(any::<bool>(), 200),
    ) {
        let rows = radii.len();
        let mut pool = fill.into_iter();
        let mut take = |n: usize| -> Vec<f64> { pool.by_ref().take(n).collect() };
        let mu: [Option<Vec<f64>>; 4] =
            std::array::from_fn(|k| present[k].then(|| take(rows)));
        let n: [Vec<f64>; 2] = std::array::from_fn(|k| {
            (0..rows)
                .map(|i| {
                    let inf = if k == 0 { n_inf[i].0 } else { n_inf[i].1 };
                    if inf { f64::INFINITY } else { 1.0 + i as f64 }
                })
                .collect()
        });
        let nu: [Option<Vec<Option<f64>>>; 4] = std::array::from_fn(|k| {
            mu[k].as_ref().map(|col| {
                col.iter()
                    .enumerate()
                    .map(|(i, &v)| (!nu_missing[(k * rows + i) % 200]).then_some(v))
                    .collect()
            })
        });
        let table = MeasuresTable { radii, mu, n, nu };
        let text = render_measures_csv(&table);
        let back = parse_measures_csv(std::path::Path::new("p.csv"), &text).unwrap();
        prop_assert_eq!(&back.radii, &table.radii);
        prop_assert_eq!(&back.mu, &table.mu);
        prop_assert_eq!(&back.n, &table.n);
        prop_assert_eq!(&back.nu, &table.nu);
        prop_assert_eq!(render_measures_csv(&back), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    /// Generated scenes are deterministic in the seed and survive a
    /// write/parse round trip bit for bit.
    #[test]
    fn scene_round_trips_bitwise(seed in any::<u64>(), clustered in any::<bool>()) {
        let spec = SynthSpec::sphere_process(15.0, 4, 2, 240.0, 60.0, clustered, 20.0, 1, seed);
        let scene = generate(&spec).unwrap();
        let again = generate(&spec).unwrap();
        for (a, b) in scene.observed().iter().zip(again.observed()) {
            prop_assert_eq!(a.location, b.location);
        }

        let dir = tempfile::tempdir().unwrap();
        let path = write_scene(&scene, dir.path(), Some(seed)).unwrap();
        let back: GermGrainScene<3> = parse_scene(&path).unwrap();
        prop_assert_eq!(back.window().lower(), scene.window().lower());
        prop_assert_eq!(back.window().upper(), scene.window().upper());
        prop_assert_eq!(back.observed().len(), scene.observed().len());
        for (a, b) in back.observed().iter().zip(scene.observed()) {
            prop_assert_eq!(&a.id, &b.id);
            prop_assert_eq!(a.location, b.location);
            prop_assert_eq!(a.shape.vertices(), b.shape.vertices());
            prop_assert_eq!(a.shape.boundary(), b.shape.boundary());
        }
        prop_assert_eq!(back.reference().len(), scene.reference().len());
        for (a, b) in back.reference().iter().zip(scene.reference()) {
            prop_assert_eq!(a.location, b.location);
            match (&a.shape, &b.shape) {
                (ReferenceShape::Mesh(m), ReferenceShape::Mesh(n)) => {
                    prop_assert_eq!(m.vertices(), n.vertices());
                }
                (ReferenceShape::Primitive(p), ReferenceShape::Primitive(q)) => {
                    prop_assert_eq!(format!("{p:?}"), format!("{q:?}"));
                }
                _ => prop_assert!(false, "shape kind changed in round trip"),
            }
        }
    }

    /// Translating a whole scene leaves K-hat unchanged up to roundoff.
    #[test]
    fn k_hat_is_translation_invariant(
        tx in -300.0f64..300.0,
        ty in -300.0f64..300.0,
        tz in -300.0f64..300.0,
        seed in any::<u64>(),
    ) {
        let spec = SynthSpec::sphere_process(15.0, 5, 2, 240.0, 60.0, false, 20.0, 1, seed);
        let scene = generate(&spec).unwrap();
        // Observed germs live in the extended window, so a small draw can
        // leave the observation window empty; those scenes have no estimate.
        prop_assume!(estimate_intensities(&scene).n_obs_in_window > 0);
        let radii = RadiusGrid::new(vec![10.0, 25.0, 45.0]).unwrap();
        let options = SummaryOptions { grid_spacing: 8.0, exact_vertex_distance: true };
        let base = k_hat(&scene, &radii, MeasurePair::all()[0], &options).unwrap();
        let moved_scene = scene.translated(Vector3::new(tx, ty, tz));
        let moved = k_hat(&moved_scene, &radii, MeasurePair::all()[0], &options).unwrap();
        for (a, b) in base.values.iter().zip(&moved.values) {
            let (a, b) = (a.unwrap(), b.unwrap());
            prop_assert!(close(a, b, 1e-9), "k00 moved {a} -> {b}");
        }
    }
}
