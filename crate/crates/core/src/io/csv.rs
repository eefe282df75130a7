//! CSV emission and parsing for the two table schemas. Floats use 17
//! significant digits so values survive a round trip bit for bit; missing
//! values are empty cells.

use std::path::Path;

use crate::error::IoError;
use crate::measures::{MeasurePair, MeasuresTable};
use crate::summary::{SummaryCurve, SummaryKind};

pub const MEASURES_HEADER: &str = "r,mu00,mu01,mu10,mu11,N0,N1,nu00,nu01,nu10,nu11";
pub const SUMMARY_HEADER: &str = "r,value,kind,pair,n_ref,n_obs,rho_x,rho_y,window_volume";

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Finite values print; infinities (unbounded normalizations) and missing
/// entries become empty cells.
fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => fmt(x),
        _ => String::new(),
    }
}

pub fn render_measures_csv(table: &MeasuresTable) -> String {
    let mut out = String::with_capacity(64 * (table.radii.len() + 1));
    out.push_str(MEASURES_HEADER);
    out.push('\n');
    for (i, &r) in table.radii.iter().enumerate() {
        let mut row = vec![fmt(r)];
        for idx in 0..4 {
            row.push(fmt_opt(table.mu[idx].as_ref().map(|c| c[i])));
        }
        for n in &table.n {
            row.push(fmt_opt(Some(n[i])));
        }
        for idx in 0..4 {
            row.push(fmt_opt(table.nu[idx].as_ref().and_then(|c| c[i])));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn parse_cell(path: &Path, line: usize, text: &str) -> Result<Option<f64>, IoError> {
    if text.is_empty() {
        return Ok(None);
    }
    text.parse::<f64>().map(Some).map_err(|_| IoError::Parse {
        path: path.display().to_string(),
        line,
        msg: format!("bad number `{text}`"),
    })
}

/// Parses a measures CSV. Empty normalization columns read back as
/// infinite (the unbounded-reference convention); a measure column is
/// treated as absent only when every row is empty.
pub fn parse_measures_csv(path: &Path, text: &str) -> Result<MeasuresTable, IoError> {
    let mut lines = text.lines().enumerate();
    let (line, header) = lines
        .next()
        .ok_or_else(|| IoError::Format { path: path.display().to_string(), msg: "empty file".into() })?;
    if header.trim_end() != MEASURES_HEADER {
        return Err(IoError::Parse {
            path: path.display().to_string(),
            line: line + 1,
            msg: format!("expected header `{MEASURES_HEADER}`"),
        });
    }
    let mut radii = Vec::new();
    let mut cells: Vec<Vec<Option<f64>>> = vec![Vec::new(); 10];
    for (i, row) in lines {
        let row = row.trim_end();
        if row.is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 11 {
            return Err(IoError::Parse {
                path: path.display().to_string(),
                line: i + 1,
                msg: format!("expected 11 columns, got {}", fields.len()),
            });
        }
        let r = parse_cell(path, i + 1, fields[0])?.ok_or_else(|| IoError::Parse {
            path: path.display().to_string(),
            line: i + 1,
            msg: "radius cell is empty".into(),
        })?;
        radii.push(r);
        for (slot, field) in cells.iter_mut().zip(&fields[1..]) {
            slot.push(parse_cell(path, i + 1, field)?);
        }
    }
    let dense = |col: &[Option<f64>], name: &str| -> Result<Option<Vec<f64>>, IoError> {
        if col.iter().all(|v| v.is_none()) {
            return Ok(None);
        }
        col.iter()
            .map(|v| {
                v.ok_or_else(|| IoError::Format {
                    path: path.display().to_string(),
                    msg: format!("column {name} mixes present and missing values"),
                })
            })
            .collect::<Result<Vec<f64>, _>>()
            .map(Some)
    };
    let mu = [
        dense(&cells[0], "mu00")?,
        dense(&cells[1], "mu01")?,
        dense(&cells[2], "mu10")?,
        dense(&cells[3], "mu11")?,
    ];
    let n = [
        cells[4].iter().map(|v| v.unwrap_or(f64::INFINITY)).collect(),
        cells[5].iter().map(|v| v.unwrap_or(f64::INFINITY)).collect(),
    ];
    let nu = std::array::from_fn(|k| {
        let col = &cells[6 + k];
        if col.iter().all(|v| v.is_none()) && mu[k].is_none() {
            None
        } else {
            Some(col.clone())
        }
    });
    Ok(MeasuresTable { radii, mu, n, nu })
}

fn kind_from_label(path: &Path, line: usize, text: &str) -> Result<SummaryKind, IoError> {
    match text {
        "khat" => Ok(SummaryKind::KHat),
        "lhat" => Ok(SummaryKind::LHat),
        "point-cross" => Ok(SummaryKind::PointCross),
        other => Err(IoError::Parse {
            path: path.display().to_string(),
            line,
            msg: format!("unknown summary kind `{other}`"),
        }),
    }
}

pub fn render_summary_csv(curve: &SummaryCurve) -> String {
    let mut out = String::with_capacity(96 * (curve.radii.len() + 1));
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for (i, &r) in curve.radii.iter().enumerate() {
        let row = [
            fmt(r),
            fmt_opt(curve.values[i]),
            curve.kind.label().to_string(),
            curve.pair.label(),
            curve.n_ref.to_string(),
            curve.n_obs.to_string(),
            fmt(curve.rho_x),
            fmt(curve.rho_y),
            fmt(curve.window_volume),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_summary_csv(path: &Path, text: &str) -> Result<SummaryCurve, IoError> {
    let mut lines = text.lines().enumerate();
    let (line, header) = lines
        .next()
        .ok_or_else(|| IoError::Format { path: path.display().to_string(), msg: "empty file".into() })?;
    if header.trim_end() != SUMMARY_HEADER {
        return Err(IoError::Parse {
            path: path.display().to_string(),
            line: line + 1,
            msg: format!("expected header `{SUMMARY_HEADER}`"),
        });
    }
    let mut curve: Option<SummaryCurve> = None;
    for (i, row) in lines {
        let row = row.trim_end();
        if row.is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 9 {
            return Err(IoError::Parse {
                path: path.display().to_string(),
                line: i + 1,
                msg: format!("expected 9 columns, got {}", fields.len()),
            });
        }
        let bad = |msg: String| IoError::Parse { path: path.display().to_string(), line: i + 1, msg };
        let r = parse_cell(path, i + 1, fields[0])?
            .ok_or_else(|| bad("radius cell is empty".into()))?;
        let value = parse_cell(path, i + 1, fields[1])?;
        let kind = kind_from_label(path, i + 1, fields[2])?;
        let pair = MeasurePair::parse(fields[3])
            .ok_or_else(|| bad(format!("bad pair `{}`", fields[3])))?;
        let n_ref: usize = fields[4].parse().map_err(|_| bad(format!("bad n_ref `{}`", fields[4])))?;
        let n_obs: usize = fields[5].parse().map_err(|_| bad(format!("bad n_obs `{}`", fields[5])))?;
        let rho_x = parse_cell(path, i + 1, fields[6])?
            .ok_or_else(|| bad("rho_x cell is empty".into()))?;
        let rho_y = parse_cell(path, i + 1, fields[7])?
            .ok_or_else(|| bad("rho_y cell is empty".into()))?;
        let window_volume = parse_cell(path, i + 1, fields[8])?
            .ok_or_else(|| bad("window_volume cell is empty".into()))?;
        match &mut curve {
            None => {
                curve = Some(SummaryCurve {
                    kind,
                    pair,
                    radii: vec![r],
                    values: vec![value],
                    n_ref,
                    n_obs,
                    rho_x,
                    rho_y,
                    window_volume,
                })
            }
            Some(c) => {
                if c.kind != kind || c.pair != pair {
                    return Err(bad("kind/pair changes within one file".into()));
                }
                c.radii.push(r);
                c.values.push(value);
            }
        }
    }
    curve.ok_or_else(|| IoError::Format { path: path.display().to_string(), msg: "no data rows".into() })
}
