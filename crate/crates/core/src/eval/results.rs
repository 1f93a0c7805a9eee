use std::io::{self, Write};

use super::measures::Measure;

/// One measurement. `size` is the unlabeled pool size in learning curves and
/// the held-out fold index in cross-validation. `value` is `None` when the
/// trainer or the measure failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub dataset: String,
    pub classifier: String,
    pub repeat: usize,
    pub size: usize,
    pub measure: Measure,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialFailure {
    pub dataset: String,
    pub classifier: String,
    pub repeat: usize,
    pub size: usize,
    pub message: String,
}

/// Long-format results of an experiment.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentResult {
    pub records: Vec<Record>,
    pub failures: Vec<TrialFailure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub dataset: String,
    pub classifier: String,
    pub size: usize,
    pub measure: Measure,
    /// Mean over the non-missing values; `None` when all are missing.
    pub mean: Option<f64>,
    pub count: usize,
    pub missing: usize,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl ExperimentResult {
    pub const CSV_HEADER: &'static str = "dataset,classifier,repeat,size,measure,value";

    /// CSV with LF line endings; values in `{:.16e}` notation, missing values empty.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for r in &self.records {
            let value = r.value.map(|v| format!("{v:.16e}")).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{}",
                csv_field(&r.dataset),
                csv_field(&r.classifier),
                r.repeat,
                r.size,
                r.measure.name(),
                value
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    /// Values for one (dataset, classifier, size, measure) cell across repeats.
    pub fn values(&self, dataset: &str, classifier: &str, size: usize, measure: Measure) -> Vec<Option<f64>> {
        self.records
            .iter()
            .filter(|r| {
                r.dataset == dataset && r.classifier == classifier && r.size == size && r.measure == measure
            })
            .map(|r| r.value)
            .collect()
    }

    /// Means over repeats, in order of first appearance.
    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut rows: Vec<SummaryRow> = Vec::new();
        let mut sums: Vec<f64> = Vec::new();
        for r in &self.records {
            let pos = rows.iter().position(|s| {
                s.dataset == r.dataset && s.classifier == r.classifier && s.size == r.size && s.measure == r.measure
            });
            let i = pos.unwrap_or_else(|| {
                rows.push(SummaryRow {
                    dataset: r.dataset.clone(),
                    classifier: r.classifier.clone(),
                    size: r.size,
                    measure: r.measure,
                    mean: None,
                    count: 0,
                    missing: 0,
                });
                sums.push(0.0);
                rows.len() - 1
            });
            match r.value {
                Some(v) => {
                    sums[i] += v;
                    rows[i].count += 1;
                }
                None => rows[i].missing += 1,
            }
        }
        for (row, s) in rows.iter_mut().zip(sums) {
            if row.count > 0 {
                row.mean = Some(s / row.count as f64);
            }
        }
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(classifier: &str, repeat: usize, value: Option<f64>) -> Record {
        Record {
            dataset: "d".into(),
            classifier: classifier.into(),
            repeat,
            size: 4,
            measure: Measure::Error,
            value,
        }
    }

    #[test]
    fn csv_layout() {
        let r = ExperimentResult {
            records: vec![rec("ls", 0, Some(0.25)), rec("a,b", 1, None)],
            failures: vec![],
        };
        assert_eq!(
            r.to_csv_string(),
            "dataset,classifier,repeat,size,measure,value\n\
             d,ls,0,4,error,2.5000000000000000e-1\n\
             d,\"a,b\",1,4,error,\n"
        );
    }

    #[test]
    fn summary_skips_missing() {
        let r = ExperimentResult {
            records: vec![rec("ls", 0, Some(0.2)), rec("ls", 1, None), rec("ls", 2, Some(0.4))],
            failures: vec![],
        };
        let s = r.summary();
        assert_eq!(s.len(), 1);
        assert!((s[0].mean.unwrap() - 0.3).abs() < 1e-15);
        assert_eq!((s[0].count, s[0].missing), (2, 1));
    }
}
