//! Seeded generators for synthetic scenes: a ball or cube near a plane, and
//! random sphere collections, uniform or clustered around reference
//! locations.

pub mod shapes;

use std::sync::Arc;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::GeomError;
use crate::geom::complex::SimplicialComplex;
use crate::geom::primitive::AnalyticPrimitive;
use crate::geom::scene::{GermGrainScene, ObservedGerm, ReferenceGerm, ReferenceShape};
use crate::geom::window::Window;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthKind {
    PlaneBall,
    PlaneCube,
    SphereProcess,
}

/// Parameters for scene generation. Unused fields are ignored by kinds that
/// do not need them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub seed: u64,
    /// Ball radius (plane-ball) or sphere radius (sphere-process).
    pub radius: f64,
    pub cube_side: f64,
    /// Minimum distance between the observed object and the plane.
    pub offset: f64,
    pub window_side: f64,
    /// Margin of the extended window beyond the observation window.
    pub extension_margin: f64,
    pub n_observed: usize,
    pub n_reference: usize,
    pub clustered: bool,
    /// Isotropic displacement scale for clustered placement.
    pub cluster_scale: f64,
    pub subdivision: u32,
}

impl SynthSpec {
    pub fn plane_ball(radius: f64, offset: f64, window_side: f64, margin: f64, subdivision: u32) -> SynthSpec {
        SynthSpec {
            kind: SynthKind::PlaneBall,
            seed: 0,
            radius,
            cube_side: 0.0,
            offset,
            window_side,
            extension_margin: margin,
            n_observed: 1,
            n_reference: 1,
            clustered: false,
            cluster_scale: 0.0,
            subdivision,
        }
    }

    pub fn plane_cube(side: f64, offset: f64, window_side: f64, margin: f64) -> SynthSpec {
        SynthSpec { kind: SynthKind::PlaneCube, cube_side: side, radius: 0.0, ..SynthSpec::plane_ball(1.0, offset, window_side, margin, 0) }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn sphere_process(
        radius: f64,
        n_observed: usize,
        n_reference: usize,
        window_side: f64,
        margin: f64,
        clustered: bool,
        cluster_scale: f64,
        subdivision: u32,
        seed: u64,
    ) -> SynthSpec {
        SynthSpec {
            kind: SynthKind::SphereProcess,
            seed,
            radius,
            cube_side: 0.0,
            offset: 0.0,
            window_side,
            extension_margin: margin,
            n_observed,
            n_reference,
            clustered,
            cluster_scale,
            subdivision,
        }
    }

    pub fn validate(&self) -> Result<(), GeomError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(GeomError::InvalidSynthSpec { msg: format!("{name} must be positive, got {v}") })
            }
        };
        positive("window side", self.window_side)?;
        positive("extension margin", self.extension_margin)?;
        match self.kind {
            SynthKind::PlaneBall => positive("radius", self.radius)?,
            SynthKind::PlaneCube => positive("cube side", self.cube_side)?,
            SynthKind::SphereProcess => {
                positive("radius", self.radius)?;
                if self.n_observed == 0 || self.n_reference == 0 {
                    return Err(GeomError::InvalidSynthSpec {
                        msg: "sphere process needs at least one germ per role".into(),
                    });
                }
                if self.clustered {
                    positive("cluster scale", self.cluster_scale)?;
                }
            }
        }
        if !(self.offset >= 0.0) {
            return Err(GeomError::InvalidSynthSpec {
                msg: format!("offset must be nonnegative, got {}", self.offset),
            });
        }
        Ok(())
    }
}

fn validated_mesh(id: &str, mesh: SimplicialComplex<3>) -> Result<Arc<SimplicialComplex<3>>, GeomError> {
    let report = mesh.validate();
    if report.is_clean() {
        Ok(Arc::new(mesh))
    } else {
        Err(GeomError::InvalidMesh { id: id.to_string(), report: format!("{report}") })
    }
}

/// Plane scene: the reference is the plane z = 0 and the window sits on it,
/// `[-s/2, s/2]^2 x [0, s]`. The observed ball or cube floats above at the
/// requested minimum distance.
pub fn gen_plane_scene(spec: &SynthSpec) -> Result<GermGrainScene<3>, GeomError> {
    spec.validate()?;
    let s = spec.window_side;
    let window = Window::new(
        Vector3::new(-s / 2.0, -s / 2.0, 0.0),
        Vector3::new(s / 2.0, s / 2.0, s),
    )?;
    let extended = window.dilate(spec.extension_margin)?;
    let (id, mesh, lift) = match spec.kind {
        SynthKind::PlaneBall => (
            "ball",
            shapes::icosphere(spec.radius, spec.subdivision, Vector3::zeros()),
            spec.offset + spec.radius,
        ),
        SynthKind::PlaneCube => (
            "cube",
            shapes::cube_mesh(spec.cube_side, Vector3::zeros()),
            spec.offset + spec.cube_side / 2.0,
        ),
        SynthKind::SphereProcess => {
            return Err(GeomError::InvalidSynthSpec { msg: "plane scene generator got a sphere-process spec".into() })
        }
    };
    let observed = vec![ObservedGerm {
        id: id.to_string(),
        location: Vector3::new(0.0, 0.0, lift),
        shape: validated_mesh(id, mesh)?,
    }];
    let reference = vec![ReferenceGerm {
        id: "plane".to_string(),
        location: Vector3::zeros(),
        shape: ReferenceShape::Primitive(AnalyticPrimitive::hyperplane(
            Vector3::new(0.0, 0.0, 1.0),
            0.0,
        )?),
    }];
    GermGrainScene::new(observed, reference, window, extended)
}

/// Random sphere collections: reference spheres uniform in the window;
/// observed spheres uniform in the extended window, or displaced from
/// uniformly chosen reference locations by an isotropic normal with the
/// cluster scale, resampled until the grain fits the extended window.
///
/// Draw order is fixed (references first, then observed, axis by axis), so a
/// seed pins the scene bitwise.
pub fn gen_sphere_process(spec: &SynthSpec) -> Result<GermGrainScene<3>, GeomError> {
    spec.validate()?;
    if spec.kind != SynthKind::SphereProcess {
        return Err(GeomError::InvalidSynthSpec { msg: "sphere process generator got a plane spec".into() });
    }
    let s = spec.window_side;
    let window = Window::new(
        Vector3::new(-s / 2.0, -s / 2.0, -s / 2.0),
        Vector3::new(s / 2.0, s / 2.0, s / 2.0),
    )?;
    let extended = window.dilate(spec.extension_margin)?;
    let grain = validated_mesh(
        "sphere-grain",
        shapes::icosphere(spec.radius, spec.subdivision, Vector3::zeros()),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let uniform_in = |rng: &mut ChaCha8Rng, lo: Vector3<f64>, hi: Vector3<f64>| {
        Vector3::from_fn(|a, _| rng.gen_range(lo[a]..hi[a]))
    };

    let reference: Vec<ReferenceGerm<3>> = (0..spec.n_reference)
        .map(|i| ReferenceGerm {
            id: format!("y{i:04}"),
            location: uniform_in(&mut rng, window.lower(), window.upper()),
            shape: ReferenceShape::Mesh(Arc::clone(&grain)),
        })
        .collect();

    // Locations such that the grain's bounding box fits inside the extended
    // window; for uniform placement this is exactly a uniform draw over the
    // shrunk box.
    let fit_lo = extended.lower().add_scalar(spec.radius);
    let fit_hi = extended.upper().add_scalar(-spec.radius);
    if (0..3).any(|a| fit_lo[a] >= fit_hi[a]) {
        return Err(GeomError::InvalidSynthSpec {
            msg: "grain radius exceeds the extended window".into(),
        });
    }
    let mut observed = Vec::with_capacity(spec.n_observed);
    for i in 0..spec.n_observed {
        let location = if spec.clustered {
            let parent = reference[rng.gen_range(0..reference.len())].location;
            let normal = Normal::new(0.0, spec.cluster_scale)
                .map_err(|_| GeomError::InvalidSynthSpec { msg: "bad cluster scale".into() })?;
            let mut attempts = 0;
            loop {
                let p = parent + Vector3::from_fn(|_, _| normal.sample(&mut rng));
                if (0..3).all(|a| fit_lo[a] <= p[a] && p[a] <= fit_hi[a]) {
                    break p;
                }
                attempts += 1;
                if attempts > 100_000 {
                    return Err(GeomError::OutsideExtendedWindow { id: format!("x{i:04}") });
                }
            }
        } else {
            uniform_in(&mut rng, fit_lo, fit_hi)
        };
        observed.push(ObservedGerm {
            id: format!("x{i:04}"),
            location,
            shape: Arc::clone(&grain),
        });
    }
    GermGrainScene::new(observed, reference, window, extended)
}

/// Dispatch on the spec kind.
pub fn generate(spec: &SynthSpec) -> Result<GermGrainScene<3>, GeomError> {
    match spec.kind {
        SynthKind::PlaneBall | SynthKind::PlaneCube => gen_plane_scene(spec),
        SynthKind::SphereProcess => gen_sphere_process(spec),
    }
}
