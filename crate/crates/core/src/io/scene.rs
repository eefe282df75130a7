//! Scene description files: JSON listing the windows and the placed
//! objects, with mesh sources resolved relative to the scene file.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, IoError};
use crate::geom::complex::{Point, SimplicialComplex};
use crate::geom::primitive::AnalyticPrimitive;
use crate::geom::scene::{GermGrainScene, ObservedGerm, ReferenceGerm, ReferenceShape};
use crate::geom::window::Window;

#[derive(Debug, Serialize, Deserialize)]
struct BoxSpec {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum PrimitiveSpec {
    Hyperplane { normal: Vec<f64>, offset: f64 },
    Sphere { center: Vec<f64>, radius: f64, solid: bool },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum SourceSpec {
    Mesh { mesh: String },
    Primitive { primitive: PrimitiveSpec },
}

#[derive(Debug, Serialize, Deserialize)]
struct ObjectSpec {
    id: String,
    role: String,
    source: SourceSpec,
    translation: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SceneFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    window: BoxSpec,
    extended_window: BoxSpec,
    objects: Vec<ObjectSpec>,
}

fn format_err(path: &Path, msg: impl Into<String>) -> IoError {
    IoError::Format { path: path.display().to_string(), msg: msg.into() }
}

fn point_from<const D: usize>(path: &Path, what: &str, v: &[f64]) -> Result<Point<D>, IoError> {
    if v.len() != D {
        return Err(format_err(path, format!("{what} must have {D} coordinates, got {}", v.len())));
    }
    Ok(Point::from_fn(|k, _| v[k]))
}

fn window_from<const D: usize>(path: &Path, what: &str, spec: &BoxSpec) -> Result<Window<D>, IoError> {
    let lo = point_from::<D>(path, what, &spec.lower)?;
    let hi = point_from::<D>(path, what, &spec.upper)?;
    Window::new(lo, hi).map_err(IoError::Scene)
}

/// Ambient dimension recorded in a scene file, read without loading meshes.
/// Lets callers pick the right concrete dimension before a full parse.
pub fn scene_dimension(path: &Path) -> Result<usize, IoError> {
    let text = std::fs::read_to_string(path)?;
    let file: SceneFile = serde_json::from_str(&text)
        .map_err(|e| format_err(path, format!("invalid JSON: {e}")))?;
    Ok(file.window.lower.len())
}

/// Parses and fully validates a scene: every mesh is loaded once, checked
/// with the mesh validator, and placed; window containment is enforced by
/// the scene constructor.
pub fn parse_scene<const D: usize>(path: &Path) -> Result<GermGrainScene<D>, IoError> {
    let text = std::fs::read_to_string(path)?;
    let file: SceneFile = serde_json::from_str(&text)
        .map_err(|e| format_err(path, format!("invalid JSON: {e}")))?;
    let window = window_from::<D>(path, "window.lower/upper", &file.window)?;
    let extended = window_from::<D>(path, "extended_window.lower/upper", &file.extended_window)?;
    let base = path.parent().unwrap_or(Path::new("."));

    let mut mesh_cache: HashMap<PathBuf, Arc<SimplicialComplex<D>>> = HashMap::new();
    let mut load = |id: &str, rel: &str| -> Result<Arc<SimplicialComplex<D>>, IoError> {
        let mesh_path = base.join(rel);
        if let Some(found) = mesh_cache.get(&mesh_path) {
            return Ok(Arc::clone(found));
        }
        let mesh = super::mesh::load_mesh::<D>(&mesh_path)?;
        let report = mesh.validate();
        if !report.is_clean() {
            return Err(IoError::Scene(GeomError::InvalidMesh {
                id: id.to_string(),
                report: format!("{report}"),
            }));
        }
        let mesh = Arc::new(mesh);
        mesh_cache.insert(mesh_path, Arc::clone(&mesh));
        Ok(mesh)
    };

    let mut observed = Vec::new();
    let mut reference = Vec::new();
    for obj in &file.objects {
        let location = point_from::<D>(path, &format!("translation of `{}`", obj.id), &obj.translation)?;
        match obj.role.as_str() {
            "observed" => {
                let mesh = match &obj.source {
                    SourceSpec::Mesh { mesh } => load(&obj.id, mesh)?,
                    SourceSpec::Primitive { .. } => {
                        return Err(format_err(
                            path,
                            format!("observed object `{}` must reference a mesh", obj.id),
                        ))
                    }
                };
                observed.push(ObservedGerm { id: obj.id.clone(), location, shape: mesh });
            }
            "reference" => {
                let shape = match &obj.source {
                    SourceSpec::Mesh { mesh } => ReferenceShape::Mesh(load(&obj.id, mesh)?),
                    SourceSpec::Primitive { primitive } => {
                        let p = match primitive {
                            PrimitiveSpec::Hyperplane { normal, offset } => {
                                let n = point_from::<D>(path, "hyperplane normal", normal)?;
                                AnalyticPrimitive::hyperplane(n, *offset).map_err(IoError::Scene)?
                            }
                            PrimitiveSpec::Sphere { center, radius, solid } => {
                                let c = point_from::<D>(path, "sphere center", center)?;
                                if *solid {
                                    AnalyticPrimitive::solid_sphere(c, *radius)
                                        .map_err(IoError::Scene)?
                                } else {
                                    AnalyticPrimitive::sphere_surface(c, *radius)
                                        .map_err(IoError::Scene)?
                                }
                            }
                        };
                        ReferenceShape::Primitive(p)
                    }
                };
                reference.push(ReferenceGerm { id: obj.id.clone(), location, shape });
            }
            other => {
                return Err(format_err(
                    path,
                    format!("object `{}` has unknown role `{other}`", obj.id),
                ))
            }
        }
    }
    GermGrainScene::new(observed, reference, window, extended).map_err(IoError::Scene)
}

/// Seed recorded in a scene file, if any.
pub fn scene_seed(path: &Path) -> Result<Option<u64>, IoError> {
    let text = std::fs::read_to_string(path)?;
    let file: SceneFile = serde_json::from_str(&text)
        .map_err(|e| format_err(path, format!("invalid JSON: {e}")))?;
    Ok(file.seed)
}

/// Writes `scene.json` plus one mesh file per distinct grain into `dir`.
/// Grains shared between germs are written once and referenced by path.
pub fn write_scene<const D: usize>(
    scene: &GermGrainScene<D>,
    dir: &Path,
    seed: Option<u64>,
) -> Result<PathBuf, IoError> {
    std::fs::create_dir_all(dir)?;
    let mut mesh_names: HashMap<*const SimplicialComplex<D>, String> = HashMap::new();
    let mut next_mesh = 0usize;
    let mut name_for = |mesh: &Arc<SimplicialComplex<D>>| -> Result<String, IoError> {
        let key = Arc::as_ptr(mesh);
        if let Some(name) = mesh_names.get(&key) {
            return Ok(name.clone());
        }
        let name = format!("mesh-{next_mesh}.off");
        next_mesh += 1;
        super::mesh::write_mesh(&dir.join(&name), mesh)?;
        mesh_names.insert(key, name.clone());
        Ok(name)
    };

    let mut objects = Vec::new();
    for germ in scene.observed() {
        objects.push(ObjectSpec {
            id: germ.id.clone(),
            role: "observed".into(),
            source: SourceSpec::Mesh { mesh: name_for(&germ.shape)? },
            translation: (0..D).map(|k| germ.location[k]).collect(),
        });
    }
    for germ in scene.reference() {
        let source = match &germ.shape {
            ReferenceShape::Mesh(m) => SourceSpec::Mesh { mesh: name_for(m)? },
            ReferenceShape::Primitive(p) => SourceSpec::Primitive {
                primitive: match p {
                    AnalyticPrimitive::Hyperplane { normal, offset } => PrimitiveSpec::Hyperplane {
                        normal: (0..D).map(|k| normal[k]).collect(),
                        offset: *offset,
                    },
                    AnalyticPrimitive::Sphere { center, radius, solid } => PrimitiveSpec::Sphere {
                        center: (0..D).map(|k| center[k]).collect(),
                        radius: *radius,
                        solid: *solid,
                    },
                },
            },
        };
        objects.push(ObjectSpec {
            id: germ.id.clone(),
            role: "reference".into(),
            source,
            translation: (0..D).map(|k| germ.location[k]).collect(),
        });
    }

    let file = SceneFile {
        seed,
        window: BoxSpec {
            lower: (0..D).map(|k| scene.window().lower()[k]).collect(),
            upper: (0..D).map(|k| scene.window().upper()[k]).collect(),
        },
        extended_window: BoxSpec {
            lower: (0..D).map(|k| scene.extended_window().lower()[k]).collect(),
            upper: (0..D).map(|k| scene.extended_window().upper()[k]).collect(),
        },
        objects,
    };
    let text = serde_json::to_string_pretty(&file)
        .map_err(|e| format_err(dir, format!("serialization failed: {e}")))?;
    let scene_path = dir.join("scene.json");
    super::write_atomic(&scene_path, text.as_bytes())?;
    Ok(scene_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{self, SynthSpec};

    fn fingerprint<const D: usize>(scene: &GermGrainScene<D>) -> Vec<(String, Vec<u64>)> {
        let loc_bits = |p: &Point<D>| (0..D).map(|k| p[k].to_bits()).collect::<Vec<_>>();
        let mesh_bits = |m: &SimplicialComplex<D>| {
            m.vertices()
                .iter()
                .flat_map(|v| (0..D).map(|k| v[k].to_bits()).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        };
        let mut out = Vec::new();
        for g in scene.observed() {
            let mut bits = loc_bits(&g.location);
            bits.extend(mesh_bits(&g.shape));
            out.push((g.id.clone(), bits));
        }
        for g in scene.reference() {
            let mut bits = loc_bits(&g.location);
            if let ReferenceShape::Mesh(m) = &g.shape {
                bits.extend(mesh_bits(m));
            }
            out.push((g.id.clone(), bits));
        }
        out.push(("window".into(), loc_bits(&scene.window().lower())));
        out.push(("ext".into(), loc_bits(&scene.extended_window().upper())));
        out
    }

    #[test]
    fn round_trip_preserves_generated_scenes() {
        for seed in [11u64, 12, 13] {
            let spec = SynthSpec::sphere_process(25.0, 6, 3, 300.0, 120.0, seed % 2 == 0, 50.0, 1, seed);
            let scene = synth::gen_sphere_process(&spec).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let path = write_scene(&scene, dir.path(), Some(seed)).unwrap();
            let back: GermGrainScene<3> = parse_scene(&path).unwrap();
            assert_eq!(fingerprint(&scene), fingerprint(&back), "seed {seed}");
            assert_eq!(scene_seed(&path).unwrap(), Some(seed));
            assert_eq!(scene_dimension(&path).unwrap(), 3);
        }
    }

    #[test]
    fn plane_scene_round_trips_with_primitive_reference() {
        let spec = SynthSpec::plane_ball(80.0, 20.0, 400.0, 220.0, 1);
        let scene = synth::gen_plane_scene(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = write_scene(&scene, dir.path(), None).unwrap();
        let back: GermGrainScene<3> = parse_scene(&path).unwrap();
        assert_eq!(fingerprint(&scene), fingerprint(&back));
        assert!(matches!(
            back.reference()[0].shape,
            ReferenceShape::Primitive(AnalyticPrimitive::Hyperplane { .. })
        ));
        // The shared grain file is written once.
        let mesh_files: Vec<_> = std::fs::read_dir(dir.path())
            .unwrap()
            .filter_map(|e| {
                let name = e.unwrap().file_name().into_string().unwrap();
                name.ends_with(".off").then_some(name)
            })
            .collect();
        assert_eq!(mesh_files, vec!["mesh-0.off".to_string()]);
    }

    #[test]
    fn leaking_object_is_rejected_by_id() {
        let spec = SynthSpec::plane_ball(80.0, 20.0, 400.0, 220.0, 1);
        let scene = synth::gen_plane_scene(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = write_scene(&scene, dir.path(), None).unwrap();
        // Push the ball far outside the extended window.
        let mut value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        value["objects"][0]["translation"][2] = serde_json::json!(9000.0);
        std::fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();
        match parse_scene::<3>(&path) {
            Err(IoError::Scene(GeomError::OutsideExtendedWindow { id })) => assert_eq!(id, "ball"),
            other => panic!("expected containment rejection, got {other:?}"),
        }
    }

    #[test]
    fn malformed_scenes_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scene.json");
        let base = |objects: &str| {
            format!(
                "{{\"window\":{{\"lower\":[0,0,0],\"upper\":[10,10,10]}},\
                  \"extended_window\":{{\"lower\":[-5,-5,-5],\"upper\":[15,15,15]}},\
                  \"objects\":[{objects}]}}"
            )
        };
        // Observed object with a primitive source.
        std::fs::write(
            &path,
            base("{\"id\":\"a\",\"role\":\"observed\",\"source\":{\"primitive\":{\"kind\":\"sphere\",\"center\":[0,0,0],\"radius\":1,\"solid\":true}},\"translation\":[0,0,0]}"),
        )
        .unwrap();
        assert!(matches!(parse_scene::<3>(&path), Err(IoError::Format { .. })));
        // Unknown role.
        std::fs::write(
            &path,
            base("{\"id\":\"a\",\"role\":\"ghost\",\"source\":{\"mesh\":\"m.off\"},\"translation\":[0,0,0]}"),
        )
        .unwrap();
        assert!(matches!(parse_scene::<3>(&path), Err(IoError::Format { .. })));
        // Wrong translation arity.
        std::fs::write(
            &path,
            base("{\"id\":\"a\",\"role\":\"reference\",\"source\":{\"primitive\":{\"kind\":\"hyperplane\",\"normal\":[0,0,1],\"offset\":0}},\"translation\":[0,0]}"),
        )
        .unwrap();
        assert!(matches!(parse_scene::<3>(&path), Err(IoError::Format { .. })));
        // Invalid JSON reports the path.
        std::fs::write(&path, "{not json").unwrap();
        assert!(matches!(parse_scene::<3>(&path), Err(IoError::Format { .. })));
    }
}
