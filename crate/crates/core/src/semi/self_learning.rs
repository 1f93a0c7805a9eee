use crate::classifier::Trainer;
use crate::data::{vstack, TrainingData};
use crate::error::{Error, Result};
use crate::model::{Family, TrainedModel};

fn at(iteration: usize) -> impl Fn(Error) -> Error {
    move |e| Error::SelfLearning {
        iteration,
        source: Box::new(e),
    }
}

/// Self-learning around `base`: fit on the labeled data, pseudo-label every
/// unlabeled point, refit on labeled plus pseudo-labeled data, and repeat until
/// the pseudo-labels stop changing or `max_iter` refits have been done.
///
/// The returned model carries the final base parameters and the pseudo-labels
/// it was fitted on (as 0/1 responsibilities).
pub fn self_learning(base: &dyn Trainer, data: &TrainingData, max_iter: usize) -> Result<TrainedModel> {
    let mut model = base.fit(&data.without_unlabeled()).map_err(at(0))?;
    let mut pseudo = if data.n_unlabeled() > 0 {
        model.predict(&data.x_u).map_err(at(0))?
    } else {
        Vec::new()
    };
    let mut iterations = 0;
    let mut converged = data.n_unlabeled() == 0;
    if data.n_unlabeled() > 0 {
        let x_all = vstack(&data.x_l, &data.x_u)?;
        while iterations < max_iter {
            iterations += 1;
            let mut y = data.y_l.clone();
            y.extend_from_slice(&pseudo);
            let round = TrainingData::supervised(x_all.clone(), y, data.classes.clone())?;
            let next_model = base.fit(&round).map_err(at(iterations))?;
            let next = next_model.predict(&data.x_u).map_err(at(iterations))?;
            model = next_model;
            if next == pseudo {
                converged = true;
                break;
            }
            pseudo = next;
        }
    }
    model.family = Family::SelfLearning;
    model.meta.iterations = iterations;
    model.meta.converged = model.meta.converged && converged;
    if !converged {
        model
            .meta
            .warnings
            .push(format!("pseudo-labels still changing after {max_iter} iterations"));
    }
    model.responsibilities = Some(pseudo.iter().map(|&c| c as f64).collect());
    Ok(model)
}
