//! JSON model files.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use ssllab::model::{Covariance, GaussianParams, KernelLoss, KernelParams, LinearParams, Link};
use ssllab::{ClassOrder, Family, Kernel, Params, Target, TrainedModel, TrainingMeta};

use crate::error::{CliError, CliResult};
use crate::output::write_atomic;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema: u32,
    pub tag: String,
    pub class_order: [String; 2],
    pub params: ParamsJson,
    pub kernel: Option<KernelJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub responsibilities: Option<Vec<f64>>,
    pub training_meta: MetaJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ParamsJson {
    Linear {
        weights: Vec<f64>,
        intercept: f64,
        link: LinkJson,
    },
    Kernel {
        alpha: Vec<f64>,
        bias: f64,
        support: Vec<Vec<f64>>,
        target: TargetJson,
        loss: LossJson,
    },
    Gaussian {
        priors: [f64; 2],
        means: Vec<Vec<f64>>,
        covariance: CovarianceJson,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkJson {
    Identity,
    Logistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetJson {
    ZeroOne,
    PlusMinusOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossJson {
    Squared,
    SquaredHinge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovarianceJson {
    Spherical(f64),
    Shared(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelJson {
    Linear,
    Rbf { sigma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaJson {
    pub seed: Option<u64>,
    pub converged: bool,
    pub iterations: usize,
    #[serde(default)]
    pub warnings: Vec<String>,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix(rows: &[Vec<f64>], what: &str) -> CliResult<DMatrix<f64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(CliError::runtime(format!("model file: ragged {what} matrix")));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(rows.len(), ncols, &flat))
}

fn kernel_json(k: &Kernel) -> KernelJson {
    match *k {
        Kernel::Linear => KernelJson::Linear,
        Kernel::Rbf { sigma } => KernelJson::Rbf { sigma },
    }
}

impl ModelFile {
    pub fn from_model(m: &TrainedModel, seed: Option<u64>) -> ModelFile {
        let (params, kernel) = match &m.params {
            Params::Linear(p) => (
                ParamsJson::Linear {
                    weights: p.weights.iter().copied().collect(),
                    intercept: p.intercept,
                    link: match p.link {
                        Link::Identity => LinkJson::Identity,
                        Link::Logistic => LinkJson::Logistic,
                    },
                },
                None,
            ),
            Params::Kernel(p) => (
                ParamsJson::Kernel {
                    alpha: p.alpha.iter().copied().collect(),
                    bias: p.bias,
                    support: rows(&p.support),
                    target: match p.target {
                        Target::ZeroOne => TargetJson::ZeroOne,
                        Target::PlusMinusOne => TargetJson::PlusMinusOne,
                    },
                    loss: match p.loss {
                        KernelLoss::Squared => LossJson::Squared,
                        KernelLoss::SquaredHinge => LossJson::SquaredHinge,
                    },
                },
                Some(kernel_json(&p.kernel)),
            ),
            Params::Gaussian(p) => (
                ParamsJson::Gaussian {
                    priors: p.priors,
                    means: rows(&p.means),
                    covariance: match &p.covariance {
                        Covariance::Spherical(v) => CovarianceJson::Spherical(*v),
                        Covariance::Shared(c) => CovarianceJson::Shared(rows(c)),
                    },
                },
                None,
            ),
        };
        ModelFile {
            schema: SCHEMA,
            tag: m.family.name().to_string(),
            class_order: m.classes.names().clone(),
            params,
            kernel,
            responsibilities: m.responsibilities.clone(),
            training_meta: MetaJson {
                seed,
                converged: m.meta.converged,
                iterations: m.meta.iterations,
                warnings: m.meta.warnings.clone(),
            },
        }
    }

    pub fn to_model(&self) -> CliResult<TrainedModel> {
        if self.schema != SCHEMA {
            return Err(CliError::runtime(format!(
                "model file schema {} is not supported (expected {SCHEMA})",
                self.schema
            )));
        }
        let family = Family::from_name(&self.tag)
            .ok_or_else(|| CliError::runtime(format!("model file: unknown tag '{}'", self.tag)))?;
        let classes = ClassOrder::new(self.class_order[0].as_str(), self.class_order[1].as_str())?;
        let params = match &self.params {
            ParamsJson::Linear {
                weights,
                intercept,
                link,
            } => Params::Linear(LinearParams {
                weights: DVector::from_column_slice(weights),
                intercept: *intercept,
                link: match link {
                    LinkJson::Identity => Link::Identity,
                    LinkJson::Logistic => Link::Logistic,
                },
            }),
            ParamsJson::Kernel {
                alpha,
                bias,
                support,
                target,
                loss,
            } => {
                let kernel = match self.kernel {
                    Some(KernelJson::Linear) => Kernel::Linear,
                    Some(KernelJson::Rbf { sigma }) => Kernel::rbf(sigma)?,
                    None => return Err(CliError::runtime("model file: kernel model without a kernel")),
                };
                let support = matrix(support, "support")?;
                if support.nrows() != alpha.len() {
                    return Err(CliError::runtime(format!(
                        "model file: {} coefficients for {} support points",
                        alpha.len(),
                        support.nrows()
                    )));
                }
                Params::Kernel(KernelParams {
                    alpha: DVector::from_column_slice(alpha),
                    bias: *bias,
                    support,
                    kernel,
                    target: match target {
                        TargetJson::ZeroOne => Target::ZeroOne,
                        TargetJson::PlusMinusOne => Target::PlusMinusOne,
                    },
                    loss: match loss {
                        LossJson::Squared => KernelLoss::Squared,
                        LossJson::SquaredHinge => KernelLoss::SquaredHinge,
                    },
                })
            }
            ParamsJson::Gaussian {
                priors,
                means,
                covariance,
            } => {
                let means = matrix(means, "means")?;
                if means.nrows() != 2 {
                    return Err(CliError::runtime("model file: need one mean per class"));
                }
                let covariance = match covariance {
                    CovarianceJson::Spherical(v) => Covariance::Spherical(*v),
                    CovarianceJson::Shared(c) => {
                        let c = matrix(c, "covariance")?;
                        if c.nrows() != means.ncols() || c.ncols() != means.ncols() {
                            return Err(CliError::runtime("model file: covariance shape does not match the means"));
                        }
                        Covariance::Shared(c)
                    }
                };
                Params::Gaussian(GaussianParams {
                    priors: *priors,
                    means,
                    covariance,
                })
            }
        };
        let meta = TrainingMeta {
            converged: self.training_meta.converged,
            iterations: self.training_meta.iterations,
            warnings: self.training_meta.warnings.clone(),
        };
        let mut m = TrainedModel::new(family, classes, params, meta);
        if let Some(q) = &self.responsibilities {
            m = m.with_responsibilities(q.clone());
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model files serialize");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> CliResult<ModelFile> {
        serde_json::from_str(text).map_err(|e| CliError::runtime(format!("invalid model file: {e}")))
    }

    pub fn read(path: &Path) -> CliResult<ModelFile> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
        ModelFile::parse(&text)
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        write_atomic(path, self.to_json().as_bytes())
    }
}
