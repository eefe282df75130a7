//! Flat binary field dump: one ASCII header line with the grid geometry,
//! then the node values as little-endian 64-bit floats in storage order.

use std::io::{Read, Write};

use nalgebra::SVector;

use crate::error::IoError;
use crate::field::{DistanceField, GridSpec};
use crate::geom::complex::Point;

pub fn write_field<const D: usize>(
    field: &DistanceField<D>,
    out: &mut impl Write,
) -> std::io::Result<()> {
    let spec = field.spec();
    let join = |v: &[f64]| {
        v.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(" ")
    };
    let origin: Vec<f64> = spec.origin().iter().copied().collect();
    let spacing: Vec<f64> = spec.spacing().iter().copied().collect();
    let counts = spec
        .counts()
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    writeln!(
        out,
        "distance-field dim={D} origin={} spacing={} counts={counts}",
        join(&origin),
        join(&spacing),
    )?;
    let mut buf = Vec::with_capacity(field.values().len() * 8);
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)
}

pub fn load_field<const D: usize>(
    input: &mut impl Read,
    path: &str,
) -> Result<DistanceField<D>, IoError> {
    let parse_err = |msg: String| IoError::Parse { path: path.to_string(), line: 1, msg };

    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let header_end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| parse_err("missing header line".to_string()))?;
    let header = std::str::from_utf8(&bytes[..header_end])
        .map_err(|_| parse_err("header is not valid UTF-8".to_string()))?;

    #[derive(PartialEq)]
    enum Section {
        None,
        Origin,
        Spacing,
        Counts,
    }
    let mut dim = None;
    let mut section = Section::None;
    let mut origin_toks: Vec<&str> = Vec::new();
    let mut spacing_toks: Vec<&str> = Vec::new();
    let mut count_toks: Vec<&str> = Vec::new();

    for token in header.split_whitespace() {
        if token == "distance-field" {
            continue;
        }
        let (key, rest) = match token.split_once('=') {
            Some((k, v)) => (Some(k), v),
            None => (None, token),
        };
        match key {
            Some("dim") => {
                dim = Some(
                    rest.parse::<usize>()
                        .map_err(|e| parse_err(format!("bad dim `{rest}`: {e}")))?,
                );
                section = Section::None;
            }
            Some("origin") => {
                origin_toks.push(rest);
                section = Section::Origin;
            }
            Some("spacing") => {
                spacing_toks.push(rest);
                section = Section::Spacing;
            }
            Some("counts") => {
                count_toks.push(rest);
                section = Section::Counts;
            }
            Some(other) => return Err(parse_err(format!("unknown header key `{other}`"))),
            None => match section {
                Section::Origin => origin_toks.push(rest),
                Section::Spacing => spacing_toks.push(rest),
                Section::Counts => count_toks.push(rest),
                Section::None => {
                    return Err(parse_err(format!("unexpected token `{rest}`")));
                }
            },
        }
    }

    if dim != Some(D) {
        return Err(parse_err(format!("dimension mismatch: file has {dim:?}, expected {D}")));
    }
    if origin_toks.len() != D || spacing_toks.len() != D || count_toks.len() != D {
        return Err(parse_err(format!(
            "expected {D} origin/spacing/count entries, got {}/{}/{}",
            origin_toks.len(),
            spacing_toks.len(),
            count_toks.len()
        )));
    }
    let origin = origin_toks
        .iter()
        .map(|t| t.parse::<f64>().map_err(|e| parse_err(format!("bad origin value `{t}`: {e}"))))
        .collect::<Result<Vec<f64>, _>>()?;
    let spacing = spacing_toks
        .iter()
        .map(|t| t.parse::<f64>().map_err(|e| parse_err(format!("bad spacing value `{t}`: {e}"))))
        .collect::<Result<Vec<f64>, _>>()?;
    let counts = count_toks
        .iter()
        .map(|t| t.parse::<usize>().map_err(|e| parse_err(format!("bad count value `{t}`: {e}"))))
        .collect::<Result<Vec<usize>, _>>()?;

    let spec = GridSpec::new(
        Point::<D>::from_iterator(origin.iter().copied()),
        SVector::<f64, D>::from_iterator(spacing.iter().copied()),
        std::array::from_fn(|a| counts[a]),
    )
    .map_err(|e| parse_err(e.to_string()))?;

    let payload = &bytes[header_end + 1..];
    if payload.len() != spec.node_count() * 8 {
        return Err(parse_err(format!(
            "payload holds {} bytes, grid needs {}",
            payload.len(),
            spec.node_count() * 8
        )));
    }
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DistanceField::from_values(spec, values).map_err(|e| parse_err(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::CompiledReference;
    use crate::geom::primitive::AnalyticPrimitive;
    use crate::geom::window::Window;
    use nalgebra::Vector3;

    #[test]
    fn dump_roundtrip_is_bitwise() {
        let reference = CompiledReference::from_primitive(
            AnalyticPrimitive::solid_sphere(Vector3::new(0.5, -0.25, 1.0), 5.0).unwrap(),
        );
        let w = Window::new(Vector3::repeat(-10.0), Vector3::repeat(10.0)).unwrap();
        let field = DistanceField::build(&reference, GridSpec::covering(&w, 1.7).unwrap());
        let mut buf = Vec::new();
        write_field(&field, &mut buf).unwrap();
        let back: DistanceField<3> = load_field(&mut buf.as_slice(), "mem").unwrap();
        assert_eq!(back.spec(), field.spec());
        assert_eq!(back.values(), field.values());
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let reference = CompiledReference::from_primitive(
            AnalyticPrimitive::solid_sphere(Vector3::zeros(), 5.0).unwrap(),
        );
        let w = Window::new(Vector3::repeat(-8.0), Vector3::repeat(8.0)).unwrap();
        let field = DistanceField::build(&reference, GridSpec::covering(&w, 2.0).unwrap());
        let mut buf = Vec::new();
        write_field(&field, &mut buf).unwrap();
        buf.truncate(buf.len() - 5);
        let res: Result<DistanceField<3>, _> = load_field(&mut buf.as_slice(), "mem");
        assert!(res.is_err());
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let reference = CompiledReference::from_primitive(
            AnalyticPrimitive::solid_sphere(Vector3::zeros(), 5.0).unwrap(),
        );
        let w = Window::new(Vector3::repeat(-8.0), Vector3::repeat(8.0)).unwrap();
        let field = DistanceField::build(&reference, GridSpec::covering(&w, 2.0).unwrap());
        let mut buf = Vec::new();
        write_field(&field, &mut buf).unwrap();
        let res: Result<DistanceField<2>, _> = load_field(&mut buf.as_slice(), "mem");
        assert!(res.is_err());
    }
}
