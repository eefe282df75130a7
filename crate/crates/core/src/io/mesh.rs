//! Boundary mesh files in ASCII OFF and PLY, plus the interior companion
//! format.
//!
//! 3D meshes carry triangles; 2D meshes use the same containers with two
//! coordinates per vertex and two indices per face (boundary segments). An
//! optional companion file at `<mesh path>.cells` lists the interior
//! tessellation, `D + 1` vertex indices per line.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::IoError;
use crate::geom::complex::{Point, SimplicialComplex};

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse { path: path.display().to_string(), line, msg: msg.into() }
}

fn format_err(path: &Path, msg: impl Into<String>) -> IoError {
    IoError::Format { path: path.display().to_string(), msg: msg.into() }
}

/// Lines with their 1-based numbers, comments (`#`) stripped, blanks
/// skipped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

fn parse_counts(path: &Path, line: usize, text: &str, want: usize) -> Result<Vec<usize>, IoError> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() < want {
        return Err(parse_err(path, line, format!("expected {want} counts, got {}", fields.len())));
    }
    fields[..want]
        .iter()
        .map(|f| f.parse::<usize>().map_err(|_| parse_err(path, line, format!("bad count `{f}`"))))
        .collect()
}

fn parse_vertex<const D: usize>(path: &Path, line: usize, text: &str) -> Result<Point<D>, IoError> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    // A trailing zero third coordinate is tolerated for 2D data written by
    // tools that always emit three columns.
    if fields.len() < D || (fields.len() > D && !(D == 2 && fields.len() == 3)) {
        return Err(parse_err(path, line, format!("expected {D} coordinates, got {}", fields.len())));
    }
    if D == 2 && fields.len() == 3 {
        let z: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad coordinate `{}`", fields[2])))?;
        if z != 0.0 {
            return Err(parse_err(path, line, "2D vertex with nonzero third coordinate"));
        }
    }
    let mut p = Point::<D>::zeros();
    for k in 0..D {
        p[k] = fields[k]
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad coordinate `{}`", fields[k])))?;
    }
    Ok(p)
}

fn parse_face<const D: usize>(
    path: &Path,
    line: usize,
    text: &str,
    n_vertices: usize,
) -> Result<[usize; D], IoError> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.is_empty() {
        return Err(parse_err(path, line, "empty face line"));
    }
    let k: usize = fields[0]
        .parse()
        .map_err(|_| parse_err(path, line, format!("bad face arity `{}`", fields[0])))?;
    if k != D || fields.len() != D + 1 {
        return Err(parse_err(path, line, format!("face must list exactly {D} vertices")));
    }
    let mut out = [0usize; D];
    for (slot, f) in out.iter_mut().zip(&fields[1..]) {
        *slot = f
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad vertex index `{f}`")))?;
        if *slot >= n_vertices {
            return Err(parse_err(path, line, format!("vertex index {slot} out of range")));
        }
    }
    Ok(out)
}

fn read_off<const D: usize>(path: &Path, text: &str) -> Result<SimplicialComplex<D>, IoError> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| format_err(path, "empty file"))?;
    if header != "OFF" {
        return Err(parse_err(path, line, "missing OFF header"));
    }
    let (line, counts_text) = lines.next().ok_or_else(|| format_err(path, "missing counts"))?;
    let counts = parse_counts(path, line, counts_text, 2)?;
    let (nv, nf) = (counts[0], counts[1]);
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, text) = lines.next().ok_or_else(|| format_err(path, "truncated vertex list"))?;
        vertices.push(parse_vertex::<D>(path, line, text)?);
    }
    let mut boundary = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (line, text) = lines.next().ok_or_else(|| format_err(path, "truncated face list"))?;
        boundary.push(parse_face::<D>(path, line, text, nv)?);
    }
    if let Some((line, _)) = lines.next() {
        return Err(parse_err(path, line, "trailing content after face list"));
    }
    Ok(SimplicialComplex::new(vertices, boundary))
}

fn read_ply<const D: usize>(path: &Path, text: &str) -> Result<SimplicialComplex<D>, IoError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (line, magic) = lines.next().ok_or_else(|| format_err(path, "empty file"))?;
    if magic != "ply" {
        return Err(parse_err(path, line, "missing ply magic"));
    }
    let mut nv = None;
    let mut nf = None;
    let mut vertex_props = 0usize;
    let mut in_element: Option<&str> = None;
    loop {
        let (line, text) = lines.next().ok_or_else(|| format_err(path, "unterminated header"))?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        match fields.as_slice() {
            ["format", "ascii", "1.0"] => {}
            ["format", ..] => return Err(parse_err(path, line, "only ascii 1.0 is supported")),
            ["comment", ..] | [] => {}
            ["element", "vertex", n] => {
                nv = Some(n.parse::<usize>().map_err(|_| parse_err(path, line, "bad vertex count"))?);
                in_element = Some("vertex");
            }
            ["element", "face", n] => {
                nf = Some(n.parse::<usize>().map_err(|_| parse_err(path, line, "bad face count"))?);
                in_element = Some("face");
            }
            ["element", ..] => return Err(parse_err(path, line, "unsupported element")),
            ["property", "list", _, _, _] => {
                if in_element != Some("face") {
                    return Err(parse_err(path, line, "list property outside face element"));
                }
            }
            ["property", kind, _name] => {
                if in_element != Some("vertex") {
                    return Err(parse_err(path, line, "scalar property outside vertex element"));
                }
                if *kind != "float" && *kind != "double" {
                    return Err(parse_err(path, line, "vertex properties must be float or double"));
                }
                vertex_props += 1;
            }
            ["end_header"] => break,
            _ => return Err(parse_err(path, line, format!("unrecognized header line `{text}`"))),
        }
    }
    let nv = nv.ok_or_else(|| format_err(path, "missing vertex element"))?;
    let nf = nf.ok_or_else(|| format_err(path, "missing face element"))?;
    if vertex_props != D {
        return Err(format_err(path, format!("expected {D} vertex properties, found {vertex_props}")));
    }
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, text) = lines.next().ok_or_else(|| format_err(path, "truncated vertex list"))?;
        vertices.push(parse_vertex::<D>(path, line, text)?);
    }
    let mut boundary = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (line, text) = lines.next().ok_or_else(|| format_err(path, "truncated face list"))?;
        boundary.push(parse_face::<D>(path, line, text, nv)?);
    }
    Ok(SimplicialComplex::new(vertices, boundary))
}

fn read_cells(path: &Path, text: &str, stride: usize, n_vertices: usize) -> Result<Vec<usize>, IoError> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| format_err(path, "empty file"))?;
    if header != "cells" {
        return Err(parse_err(path, line, "missing cells header"));
    }
    let (line, count_text) = lines.next().ok_or_else(|| format_err(path, "missing cell count"))?;
    let n = parse_counts(path, line, count_text, 1)?[0];
    let mut indices = Vec::with_capacity(n * stride);
    for _ in 0..n {
        let (line, text) = lines.next().ok_or_else(|| format_err(path, "truncated cell list"))?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != stride {
            return Err(parse_err(path, line, format!("cell must list {stride} vertices")));
        }
        for f in fields {
            let idx: usize = f
                .parse()
                .map_err(|_| parse_err(path, line, format!("bad vertex index `{f}`")))?;
            if idx >= n_vertices {
                return Err(parse_err(path, line, format!("vertex index {idx} out of range")));
            }
            indices.push(idx);
        }
    }
    Ok(indices)
}

/// Companion path for the interior tessellation of a mesh file.
pub fn cells_path(mesh_path: &Path) -> std::path::PathBuf {
    let mut name = mesh_path.as_os_str().to_os_string();
    name.push(".cells");
    std::path::PathBuf::from(name)
}

/// Loads a boundary mesh (`.off` or `.ply`), attaching the interior
/// tessellation if the companion file exists.
pub fn load_mesh<const D: usize>(path: &Path) -> Result<SimplicialComplex<D>, IoError> {
    let text = std::fs::read_to_string(path)?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let mesh = match ext {
        "off" => read_off::<D>(path, &text),
        "ply" => read_ply::<D>(path, &text),
        _ => Err(format_err(path, format!("unsupported mesh extension `{ext}`"))),
    }?;
    let companion = cells_path(path);
    if companion.exists() {
        let cells_text = std::fs::read_to_string(&companion)?;
        let interior = read_cells(&companion, &cells_text, D + 1, mesh.vertices().len())?;
        Ok(SimplicialComplex::with_interior(
            mesh.vertices().to_vec(),
            mesh.boundary().to_vec(),
            interior,
        )
        .map_err(|e| IoError::Scene(e))?)
    } else {
        Ok(mesh)
    }
}

fn render_off<const D: usize>(mesh: &SimplicialComplex<D>) -> String {
    let mut out = String::new();
    out.push_str("OFF\n");
    let _ = writeln!(out, "{} {} 0", mesh.vertices().len(), mesh.boundary().len());
    for v in mesh.vertices() {
        for k in 0..D {
            if k > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:.16e}", v[k]);
        }
        out.push('\n');
    }
    for f in mesh.boundary() {
        let _ = write!(out, "{}", D);
        for idx in f {
            let _ = write!(out, " {idx}");
        }
        out.push('\n');
    }
    out
}

fn render_ply<const D: usize>(mesh: &SimplicialComplex<D>) -> String {
    let mut out = String::new();
    out.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(out, "element vertex {}", mesh.vertices().len());
    for name in ["x", "y", "z"].iter().take(D) {
        let _ = writeln!(out, "property double {name}");
    }
    let _ = writeln!(out, "element face {}", mesh.boundary().len());
    out.push_str("property list uchar int vertex_indices\nend_header\n");
    for v in mesh.vertices() {
        for k in 0..D {
            if k > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:.16e}", v[k]);
        }
        out.push('\n');
    }
    for f in mesh.boundary() {
        let _ = write!(out, "{}", D);
        for idx in f {
            let _ = write!(out, " {idx}");
        }
        out.push('\n');
    }
    out
}

fn render_cells<const D: usize>(mesh: &SimplicialComplex<D>) -> String {
    let mut out = String::new();
    out.push_str("cells\n");
    let _ = writeln!(out, "{}", mesh.interior_cell_count());
    for cell in mesh.interior_cells() {
        for (k, idx) in cell.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{idx}");
        }
        out.push('\n');
    }
    out
}

/// Writes a mesh in the format chosen by the path extension, plus the
/// interior companion when the mesh has one.
pub fn write_mesh<const D: usize>(path: &Path, mesh: &SimplicialComplex<D>) -> Result<(), IoError> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let body = match ext {
        "off" => render_off(mesh),
        "ply" => render_ply(mesh),
        _ => return Err(format_err(path, format!("unsupported mesh extension `{ext}`"))),
    };
    crate::io::write_atomic(path, body.as_bytes())?;
    if mesh.has_interior() {
        crate::io::write_atomic(&cells_path(path), render_cells(mesh).as_bytes())?;
    }
    Ok(())
}
