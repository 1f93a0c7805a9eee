//! CSV data files: a header row, numeric feature columns and an optional label
//! column whose empty cells mark missing labels.

use std::path::Path;

use nalgebra::DMatrix;
use ssllab::{ClassOrder, Dataset};

use crate::error::{CliError, CliResult};
use crate::output::{num, write_atomic};

pub const DEFAULT_LABEL_COL: &str = "Class";

#[derive(Debug, Clone, PartialEq)]
pub struct DataFile {
    pub feature_names: Vec<String>,
    pub x: DMatrix<f64>,
    /// `None` when the file has no label column.
    pub labels: Option<Vec<Option<String>>>,
}

impl DataFile {
    pub fn parse(text: &str, label_col: &str) -> CliResult<DataFile> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let header = rdr
            .headers()
            .map_err(|e| CliError::runtime(format!("bad header: {e}")))?
            .clone();
        if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
            return Err(CliError::runtime("data file has no header row"));
        }
        let label_idx = header.iter().position(|h| h == label_col);
        let feature_idx: Vec<usize> = (0..header.len()).filter(|&i| Some(i) != label_idx).collect();
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for (r, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| CliError::runtime(format!("row {}: {e}", r + 1)))?;
            for &j in &feature_idx {
                let cell = rec[j].trim();
                let v: f64 = cell.parse().map_err(|_| {
                    CliError::runtime(format!("row {}, column '{}': '{cell}' is not a number", r + 1, &header[j]))
                })?;
                if !v.is_finite() {
                    return Err(CliError::runtime(format!(
                        "row {}, column '{}': non-finite value",
                        r + 1,
                        &header[j]
                    )));
                }
                values.push(v);
            }
            if let Some(li) = label_idx {
                let l = rec[li].trim();
                labels.push((!l.is_empty()).then(|| l.to_string()));
            }
        }
        let d = feature_idx.len();
        let n = if d == 0 { labels.len() } else { values.len() / d };
        Ok(DataFile {
            feature_names: feature_idx.iter().map(|&j| header[j].to_string()).collect(),
            x: DMatrix::from_row_slice(n, d, &values),
            labels: label_idx.map(|_| labels),
        })
    }

    pub fn read(path: &Path, label_col: &str) -> CliResult<DataFile> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
        DataFile::parse(&text, label_col).map_err(|e| e.context(&path.display().to_string()))
    }

    /// Like `read`, but a missing label column is a usage error reported
    /// before any cell is parsed.
    pub fn read_labeled(path: &Path, label_col: &str) -> CliResult<DataFile> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
        let header = text.lines().next().unwrap_or("");
        let has = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(header.as_bytes())
            .records()
            .next()
            .and_then(Result::ok)
            .is_some_and(|r| r.iter().any(|h| h == label_col));
        if !has {
            return Err(CliError::usage(format!(
                "{}: label column '{label_col}' not found",
                path.display()
            )));
        }
        DataFile::parse(&text, label_col).map_err(|e| e.context(&path.display().to_string()))
    }

    pub fn require_labels(&self, label_col: &str) -> CliResult<&[Option<String>]> {
        self.labels
            .as_deref()
            .ok_or_else(|| CliError::usage(format!("label column '{label_col}' not found")))
    }

    /// Dataset with class order given or inferred from first appearance.
    pub fn to_dataset(&self, label_col: &str, classes: Option<ClassOrder>) -> CliResult<Dataset> {
        let labels = self.require_labels(label_col)?;
        Ok(Dataset::from_names(self.x.clone(), labels, classes)?)
    }
}

pub fn format_dataset(d: &Dataset, label_col: &str) -> String {
    let mut out = String::new();
    let names: Vec<String> = (1..=d.dim()).map(|j| format!("x{j}")).collect();
    out.push_str(&names.join(","));
    out.push(',');
    out.push_str(label_col);
    out.push('\n');
    let x = d.features();
    for (i, l) in d.labels().iter().enumerate() {
        for j in 0..d.dim() {
            out.push_str(&num(x[(i, j)]));
            out.push(',');
        }
        if let Some(c) = l {
            out.push_str(d.classes().name(*c));
        }
        out.push('\n');
    }
    out
}

pub fn write_dataset(path: &Path, d: &Dataset, label_col: &str) -> CliResult<()> {
    write_atomic(path, format_dataset(d, label_col).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let d = ssllab::datagen::generate_crescent_moon(5, 0.3, 1).unwrap();
        let mut labels = d.labels().to_vec();
        labels[3] = None;
        let d = d.with_labels(labels).unwrap();
        let text = format_dataset(&d, "Class");
        let back = DataFile::parse(&text, "Class").unwrap();
        assert_eq!(back.to_dataset("Class", Some(d.classes().clone())).unwrap(), d);
        assert_eq!(back.feature_names, vec!["x1", "x2"]);
    }

    #[test]
    fn label_column_anywhere() {
        let f = DataFile::parse("y,a,b\nP,1,2\n,3,4\nQ,5,6\n", "y").unwrap();
        assert_eq!(f.x, DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]));
        assert_eq!(
            f.labels.unwrap(),
            vec![Some("P".to_string()), None, Some("Q".to_string())]
        );
    }

    #[test]
    fn missing_label_column_is_usage_error() {
        let f = DataFile::parse("a,b\n1,2\n", "Class").unwrap();
        assert!(f.labels.is_none());
        assert!(matches!(f.to_dataset("Class", None), Err(CliError::Usage(_))));
    }

    #[test]
    fn bad_cells() {
        assert!(matches!(DataFile::parse("a,Class\nx,A\n", "Class"), Err(CliError::Runtime(_))));
        assert!(matches!(DataFile::parse("a,Class\n1,A,3\n", "Class"), Err(CliError::Runtime(_))));
        assert!(matches!(DataFile::parse("a,Class\n1e999,A\n", "Class"), Err(CliError::Runtime(_))));
    }

    #[test]
    fn header_only() {
        let f = DataFile::parse("x1,x2,Class\n", "Class").unwrap();
        assert_eq!((f.x.nrows(), f.x.ncols()), (0, 2));
    }
}
