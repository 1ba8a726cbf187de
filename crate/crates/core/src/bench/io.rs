//! CSV datasets and plain-text assignment files.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LoadOptions {
    /// `Some(true)`: skip the first record. `None`: skip it when some
    /// feature cell does not parse as a number.
    pub header: Option<bool>,
    /// The last column holds ground-truth labels (any strings).
    pub label_column: bool,
}

pub fn load_dataset(path: impl AsRef<Path>, options: LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let name = path.file_stem().map_or_else(|| "data".to_string(), |s| s.to_string_lossy().into_owned());
    parse_dataset(&name, &text, options)
}

/// Comma-separated rows; labels are mapped to ids in order of first appearance.
pub fn parse_dataset(name: &str, text: &str, options: LoadOptions) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut label_ids: HashMap<String, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse { line: e.position().map_or(idx + 1, |p| p.line() as usize), msg: e.to_string() })?;
        let line = record.position().map_or(idx + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let n_features = if options.label_column { record.len().saturating_sub(1) } else { record.len() };
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().take(n_features).map(str::parse::<f64>).collect();
        let features = match parsed {
            Ok(f) => f,
            Err(_) if idx == 0 && options.header != Some(false) => continue,
            Err(e) => {
                let bad = record.iter().take(n_features).find(|c| c.parse::<f64>().is_err()).unwrap_or("");
                return Err(Error::Parse { line, msg: format!("non-numeric feature `{bad}`: {e}") });
            }
        };
        if idx == 0 && options.header == Some(true) {
            continue;
        }
        if n_features == 0 {
            return Err(Error::Parse { line, msg: "row has no feature columns".into() });
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::Parse { line, msg: format!("expected {w} columns, found {}", record.len()) });
            }
            _ => {}
        }
        if let Some(f) = features.iter().find(|x| !x.is_finite()) {
            return Err(Error::Parse { line, msg: format!("non-finite feature {f}") });
        }
        if options.label_column {
            let raw = record.get(n_features).expect("label column present").to_string();
            let next = label_ids.len();
            labels.push(*label_ids.entry(raw).or_insert(next));
        }
        rows.push(features);
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Dataset::from_rows(name, rows, options.label_column.then_some(labels))
}

/// Per-column z-scores; constant columns are only centred.
pub fn standardize(data: &Dataset) -> Dataset {
    let (n, p) = (data.len(), data.dim());
    let mut mean = vec![0.0; p];
    for row in data.rows() {
        mean.iter_mut().zip(row).for_each(|(m, x)| *m += x / n as f64);
    }
    let mut sd = vec![0.0; p];
    for row in data.rows() {
        sd.iter_mut().zip(row.iter().zip(&mean)).for_each(|(s, (x, m))| *s += (x - m) * (x - m) / n as f64);
    }
    let sd: Vec<f64> = sd.into_iter().map(|v| if v > 0.0 { v.sqrt() } else { 1.0 }).collect();
    let flat = data.rows().flat_map(|row| row.iter().enumerate().map(|(a, x)| (x - mean[a]) / sd[a]).collect::<Vec<_>>()).collect();
    Dataset::from_flat(data.name(), n, p, flat, data.labels().map(<[usize]>::to_vec)).expect("same shape")
}

/// One cluster id per line.
pub fn format_assignment(labels: &[usize]) -> String {
    let mut out = String::with_capacity(labels.len() * 3);
    for l in labels {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    out
}

pub fn write_assignment(path: impl AsRef<Path>, labels: &[usize]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(format_assignment(labels).as_bytes())?;
    Ok(())
}

pub fn parse_assignment(text: &str) -> Result<Vec<usize>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| l.trim().parse::<usize>().map_err(|e| Error::Parse { line: i + 1, msg: format!("bad cluster id `{}`: {e}", l.trim()) }))
        .collect()
}

pub fn read_assignment(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    parse_assignment(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labelled_csv() {
        let d = parse_dataset("t", "x,y,class\n1,2,a\n3,4,b\n5,6,a\n", LoadOptions { header: None, label_column: true }).unwrap();
        assert_eq!((d.len(), d.dim()), (3, 2));
        assert_eq!(d.labels().unwrap(), &[0, 1, 0]);
        assert_eq!(d.row(2), &[5.0, 6.0]);
    }

    #[test]
    fn non_numeric_cell_reports_line() {
        let err = parse_dataset("t", "1,2\n3,oops\n", LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn ragged_row_is_rejected() {
        let err = parse_dataset("t", "1,2\n3,4,5\n", LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn header_only_is_empty() {
        let err = parse_dataset("t", "x,y\n", LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyDataset));
    }

    #[test]
    fn explicit_no_header_rejects_text() {
        let err = parse_dataset("t", "x,y\n1,2\n", LoadOptions { header: Some(false), label_column: false }).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn assignment_round_trip() {
        let labels = vec![0, 2, 1, 1];
        assert_eq!(parse_assignment(&format_assignment(&labels)).unwrap(), labels);
        assert!(matches!(parse_assignment("0\nx\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn standardized_columns() {
        let d = Dataset::from_flat("t", 3, 2, vec![1.0, 5.0, 2.0, 5.0, 3.0, 5.0], None).unwrap();
        let s = standardize(&d);
        let col0: Vec<f64> = s.rows().map(|r| r[0]).collect();
        assert!((col0.iter().sum::<f64>()).abs() < 1e-12);
        assert!(s.rows().all(|r| r[1] == 0.0));
    }
}
