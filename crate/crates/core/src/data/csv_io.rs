use std::path::Path;

use super::dataset::{PuData, PuDataset};
use super::point::DataPoint;
use crate::error::{PuError, Result};

/// Column mapping for CSV datasets.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSchema {
    /// Feature columns in order; empty means every `f<i>` column, sorted by `i`.
    pub features: Vec<String>,
    /// Role column of training files, values `p` or `u`.
    pub role: String,
    /// Optional latent-label column on `u` rows, values `0` or `1`.
    pub latent: Option<String>,
    /// Class column of test files, values `0` or `1`.
    pub label: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            features: Vec::new(),
            role: "s".into(),
            latent: Some("y_latent".into()),
            label: "y".into(),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> PuError {
    PuError::Io(format!("{}: {e}", path.display()))
}

fn parse_err(path: &Path, line: usize, reason: impl Into<String>) -> PuError {
    PuError::Parse {
        path: path.display().to_string(),
        line,
        reason: reason.into(),
    }
}

struct Columns {
    features: Vec<usize>,
    role: Option<usize>,
    latent: Option<usize>,
    label: Option<usize>,
}

fn resolve_columns(path: &Path, headers: &csv::StringRecord, schema: &CsvSchema) -> Result<Columns> {
    let find = |name: &str| headers.iter().position(|h| h == name);
    let features = if schema.features.is_empty() {
        let mut fs: Vec<(usize, usize)> = headers
            .iter()
            .enumerate()
            .filter_map(|(col, h)| h.strip_prefix('f')?.parse::<usize>().ok().map(|i| (i, col)))
            .collect();
        fs.sort_unstable();
        if fs.iter().enumerate().any(|(k, &(i, _))| k != i) {
            return Err(parse_err(path, 1, "feature columns must be f0..f{d-1} without gaps"));
        }
        fs.into_iter().map(|(_, col)| col).collect()
    } else {
        schema
            .features
            .iter()
            .map(|f| find(f).ok_or_else(|| parse_err(path, 1, format!("missing feature column `{f}`"))))
            .collect::<Result<Vec<_>>>()?
    };
    if features.is_empty() {
        return Err(parse_err(path, 1, "no feature columns"));
    }
    Ok(Columns {
        features,
        role: find(&schema.role),
        latent: schema.latent.as_deref().and_then(find),
        label: find(&schema.label),
    })
}

fn parse_features(path: &Path, line: usize, rec: &csv::StringRecord, cols: &[usize]) -> Result<DataPoint> {
    let coords = cols
        .iter()
        .map(|&c| {
            let cell = rec[c].trim();
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(path, line, format!("cannot parse `{cell}` as a number")))?;
            if !v.is_finite() {
                return Err(parse_err(path, line, format!("non-finite value `{cell}`")));
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DataPoint::from_vec_unchecked(coords))
}

fn records(path: &Path) -> Result<(csv::StringRecord, Vec<(usize, csv::StringRecord)>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| io_err(path, e))?;
    let headers = rdr.headers().map_err(|e| io_err(path, e))?.clone();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != headers.len() {
            return Err(parse_err(
                path,
                line,
                format!("expected {} columns, found {}", headers.len(), rec.len()),
            ));
        }
        out.push((line, rec));
    }
    Ok((headers, out))
}

/// Reads a training file: features plus a `p`/`u` role column and an
/// optional latent label on unlabeled rows.
pub fn load_csv_dataset(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<PuDataset> {
    let path = path.as_ref();
    let (headers, rows) = records(path)?;
    let cols = resolve_columns(path, &headers, schema)?;
    let role_col = cols
        .role
        .ok_or_else(|| parse_err(path, 1, format!("missing role column `{}`", schema.role)))?;

    let mut positive = Vec::new();
    let mut unlabeled = Vec::new();
    let mut latent = Vec::new();
    let mut any_latent = false;
    for (line, rec) in &rows {
        let point = parse_features(path, *line, rec, &cols.features)?;
        match rec[role_col].trim() {
            "p" => positive.push(point),
            "u" => {
                unlabeled.push(point);
                if let Some(c) = cols.latent {
                    let cell = rec[c].trim();
                    let v = match cell {
                        "0" => 0,
                        "1" => 1,
                        "" => {
                            return Err(parse_err(path, *line, "missing latent label on unlabeled row"));
                        }
                        other => return Err(parse_err(path, *line, format!("invalid latent label `{other}`"))),
                    };
                    any_latent = true;
                    latent.push(v);
                }
            }
            other => return Err(parse_err(path, *line, format!("unknown role `{other}`, expected p or u"))),
        }
    }
    if positive.is_empty() && unlabeled.is_empty() {
        return Err(PuError::Empty("csv dataset"));
    }
    let data = PuData::new(positive, unlabeled)?;
    PuDataset::new(data, any_latent.then_some(latent), None)
}

/// Reads a labeled test file, returning (positives, negatives).
pub fn load_test_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<(Vec<DataPoint>, Vec<DataPoint>)> {
    let path = path.as_ref();
    let (headers, rows) = records(path)?;
    let cols = resolve_columns(path, &headers, schema)?;
    let label_col = cols
        .label
        .ok_or_else(|| parse_err(path, 1, format!("missing label column `{}`", schema.label)))?;
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (line, rec) in &rows {
        let point = parse_features(path, *line, rec, &cols.features)?;
        match rec[label_col].trim() {
            "1" => pos.push(point),
            "0" => neg.push(point),
            other => return Err(parse_err(path, *line, format!("invalid label `{other}`, expected 0 or 1"))),
        }
    }
    Ok((pos, neg))
}

fn feature_header(dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("f{i}")).collect()
}

// `{}` on f64 prints the shortest string that parses back to the same bits.
fn push_coords(row: &mut Vec<String>, p: &DataPoint) {
    row.extend(p.iter().map(|v| format!("{v}")));
}

pub fn write_train_csv(path: impl AsRef<Path>, ds: &PuDataset) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    let mut header = feature_header(ds.dim());
    header.push("s".into());
    let with_latent = ds.latent_labels.is_some();
    if with_latent {
        header.push("y_latent".into());
    }
    w.write_record(&header).map_err(|e| io_err(path, e))?;
    for p in ds.positive() {
        let mut row = Vec::with_capacity(header.len());
        push_coords(&mut row, p);
        row.push("p".into());
        if with_latent {
            row.push(String::new());
        }
        w.write_record(&row).map_err(|e| io_err(path, e))?;
    }
    for (i, u) in ds.unlabeled().iter().enumerate() {
        let mut row = Vec::with_capacity(header.len());
        push_coords(&mut row, u);
        row.push("u".into());
        if let Some(l) = &ds.latent_labels {
            row.push(l[i].to_string());
        }
        w.write_record(&row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn write_test_csv(path: impl AsRef<Path>, pos: &[DataPoint], neg: &[DataPoint]) -> Result<()> {
    let path = path.as_ref();
    let dim = pos.first().or(neg.first()).map_or(0, |p| p.dim());
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    let mut header = feature_header(dim);
    header.push("y".into());
    w.write_record(&header).map_err(|e| io_err(path, e))?;
    for (points, label) in [(pos, "1"), (neg, "0")] {
        for p in points {
            let mut row = Vec::with_capacity(header.len());
            push_coords(&mut row, p);
            row.push(label.into());
            w.write_record(&row).map_err(|e| io_err(path, e))?;
        }
    }
    w.flush().map_err(|e| io_err(path, e))
}
