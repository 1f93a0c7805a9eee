use rand::Rng;

use crate::data::Dataset;
use crate::datagen::rng_from_seed;
use crate::error::{Error, Result};

/// Remove each label independently with probability `prob`.
pub fn add_missing_labels_mar(d: &Dataset, prob: f64, seed: u64) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&prob) {
        return Err(Error::InvalidArgument(format!(
            "removal probability must lie in [0, 1], got {prob}"
        )));
    }
    let labels = d.complete_labels()?;
    let mut rng = rng_from_seed(seed);
    let kept = labels
        .into_iter()
        .map(|c| if rng.random::<f64>() < prob { None } else { Some(c) })
        .collect();
    d.with_labels(kept)
}

/// Original labels of the rows that are unlabeled in `d_missing`, in row order.
pub fn true_labels(d_missing: &Dataset, d_original: &Dataset) -> Result<Vec<usize>> {
    if d_missing.len() != d_original.len() || d_missing.dim() != d_original.dim() {
        return Err(Error::Provenance(format!(
            "{}x{} versus {}x{}",
            d_missing.len(),
            d_missing.dim(),
            d_original.len(),
            d_original.dim()
        )));
    }
    if d_missing.classes() != d_original.classes() {
        return Err(Error::Provenance("class orders differ".into()));
    }
    let (xm, xo) = (d_missing.features(), d_original.features());
    let mut out = Vec::new();
    for (i, (lm, lo)) in d_missing.labels().iter().zip(d_original.labels()).enumerate() {
        if xm.row(i) != xo.row(i) {
            return Err(Error::Provenance(format!("features differ at row {i}")));
        }
        match (lm, lo) {
            (None, Some(c)) => out.push(*c),
            (None, None) => return Err(Error::MissingLabel(i)),
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Provenance(format!("labels differ at row {i}")))
            }
            (Some(_), None) => {
                return Err(Error::Provenance(format!("row {i} is labeled only in the derived data")))
            }
            _ => {}
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ClassOrder;
    use nalgebra::DMatrix;

    fn three() -> Dataset {
        let x = DMatrix::from_row_slice(3, 1, &[0.0, 1.0, 2.0]);
        Dataset::new(x, vec![Some(0), Some(1), Some(1)], ClassOrder::new("A", "B").unwrap()).unwrap()
    }

    #[test]
    fn extremes() {
        let d = three();
        assert_eq!(add_missing_labels_mar(&d, 0.0, 1).unwrap(), d);
        assert_eq!(add_missing_labels_mar(&d, 1.0, 1).unwrap().labeled_count(), 0);
        assert!(add_missing_labels_mar(&d, 1.5, 1).is_err());
        assert!(add_missing_labels_mar(&d.with_labels(vec![None, Some(0), Some(0)]).unwrap(), 0.5, 1).is_err());
    }

    #[test]
    fn positional_lookup() {
        let d = three();
        let m = d.with_labels(vec![Some(0), None, Some(1)]).unwrap();
        assert_eq!(true_labels(&m, &d).unwrap(), vec![1]);
        assert!(true_labels(&d, &d).unwrap().is_empty());
        assert_eq!(true_labels(&d.unlabeled(), &d).unwrap(), vec![0, 1, 1]);
    }

    #[test]
    fn provenance_mismatch() {
        let d = three();
        let other = Dataset::new(
            DMatrix::from_row_slice(3, 1, &[0.0, 1.5, 2.0]),
            vec![None; 3],
            d.classes().clone(),
        )
        .unwrap();
        assert!(matches!(true_labels(&other, &d), Err(Error::Provenance(_))));
    }
}
