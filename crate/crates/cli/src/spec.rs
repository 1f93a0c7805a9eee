//! Named parameter sets shared by command-line flags and JSON configs, and the
//! builders that turn them into classifiers and generated datasets.

use std::collections::BTreeMap;

use ssllab::classifier::Classifier;
use ssllab::datagen;
use ssllab::semi::EmSettings;
use ssllab::{Dataset, GraphConfig, Kernel, LapParams, OptimSettings, WeightScale};

pub const MODEL_NAMES: [&str; 16] = [
    "ls",
    "kls",
    "nm",
    "lda",
    "logistic",
    "svm",
    "self-learning",
    "em-nm",
    "em-lda",
    "mc-nm",
    "usm",
    "icls",
    "icls-projection",
    "erlr",
    "laprls",
    "lapsvm",
];

pub const DATASET_NAMES: [&str; 5] = [
    "two-gaussian",
    "crescent-moon",
    "spirals",
    "parallel-planes",
    "two-circles",
];

const SUPERVISED_BASES: [&str; 6] = ["ls", "kls", "nm", "lda", "logistic", "svm"];

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Text(String),
    Bool(bool),
}

/// A parameter problem, naming the offending field (snake_case key).
#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    pub field: String,
    pub message: String,
}

impl SpecError {
    pub fn new(field: &str, message: impl Into<String>) -> Self {
        SpecError {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// The field as a command-line flag.
    pub fn flag(&self) -> String {
        format!("--{}", self.field.replace('_', "-"))
    }

    /// The message prefixed by the flag, if the error names one.
    pub fn flag_message(&self) -> String {
        if self.field.is_empty() {
            self.message.clone()
        } else {
            format!("{}: {}", self.flag(), self.message)
        }
    }
}

type SpecResult<T> = Result<T, SpecError>;

/// Parameters by name. Every accessor consumes its key so that `finish` can
/// reject parameters the builder did not use.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamSet {
    map: BTreeMap<String, Value>,
}

impl ParamSet {
    pub fn new() -> Self {
        ParamSet::default()
    }

    pub fn set(&mut self, key: &str, v: Value) {
        self.map.insert(key.to_string(), v);
    }

    pub fn set_opt_num(&mut self, key: &str, v: Option<f64>) {
        if let Some(v) = v {
            self.set(key, Value::Num(v));
        }
    }

    pub fn set_opt_text(&mut self, key: &str, v: Option<&str>) {
        if let Some(v) = v {
            self.set(key, Value::Text(v.to_string()));
        }
    }

    pub fn set_opt_bool(&mut self, key: &str, v: Option<bool>) {
        if let Some(v) = v {
            self.set(key, Value::Bool(v));
        }
    }

    pub fn contains(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    pub fn num(&mut self, key: &str) -> SpecResult<Option<f64>> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(Value::Num(v)) if v.is_finite() => Ok(Some(v)),
            Some(_) => Err(SpecError::new(key, "expected a finite number")),
        }
    }

    pub fn count(&mut self, key: &str) -> SpecResult<Option<usize>> {
        match self.num(key)? {
            None => Ok(None),
            Some(v) if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => Ok(Some(v as usize)),
            Some(v) => Err(SpecError::new(key, format!("expected a nonnegative integer, got {v}"))),
        }
    }

    pub fn seed(&mut self, key: &str) -> SpecResult<Option<u64>> {
        match self.num(key)? {
            None => Ok(None),
            Some(v) if v >= 0.0 && v.fract() == 0.0 && v < 2f64.powi(53) => Ok(Some(v as u64)),
            Some(v) => Err(SpecError::new(key, format!("expected an integer seed below 2^53, got {v}"))),
        }
    }

    pub fn text(&mut self, key: &str) -> SpecResult<Option<String>> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(Value::Text(s)) => Ok(Some(s)),
            Some(_) => Err(SpecError::new(key, "expected a string")),
        }
    }

    pub fn flag(&mut self, key: &str) -> SpecResult<Option<bool>> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(Value::Bool(b)) => Ok(Some(b)),
            Some(_) => Err(SpecError::new(key, "expected true or false")),
        }
    }

    /// Error on the first parameter nobody asked for.
    pub fn finish(self, context: &str) -> SpecResult<()> {
        match self.map.into_keys().next() {
            None => Ok(()),
            Some(k) => Err(SpecError::new(&k, format!("not a parameter of {context}"))),
        }
    }
}

fn nonneg(p: &mut ParamSet, key: &str, default: f64) -> SpecResult<f64> {
    let v = p.num(key)?.unwrap_or(default);
    if v < 0.0 {
        return Err(SpecError::new(key, format!("must be nonnegative, got {v}")));
    }
    Ok(v)
}

fn positive(p: &mut ParamSet, key: &str, default: f64) -> SpecResult<f64> {
    let v = p.num(key)?.unwrap_or(default);
    if v <= 0.0 {
        return Err(SpecError::new(key, format!("must be positive, got {v}")));
    }
    Ok(v)
}

fn positive_count(p: &mut ParamSet, key: &str, default: usize) -> SpecResult<usize> {
    let v = p.count(key)?.unwrap_or(default);
    if v == 0 {
        return Err(SpecError::new(key, "must be at least 1"));
    }
    Ok(v)
}

fn kernel(p: &mut ParamSet) -> SpecResult<Kernel> {
    let explicit = p.text("kernel")?;
    let has_sigma = p.contains("sigma");
    match explicit.as_deref() {
        Some("linear") => Ok(Kernel::Linear),
        Some("rbf") => Ok(Kernel::Rbf {
            sigma: positive(p, "sigma", 1.0)?,
        }),
        None if has_sigma => Ok(Kernel::Rbf {
            sigma: positive(p, "sigma", 1.0)?,
        }),
        None => Ok(Kernel::Linear),
        Some(other) => Err(SpecError::new(
            "kernel",
            format!("unknown kernel '{other}' (expected linear or rbf)"),
        )),
    }
}

/// knn graph, `k` default 10, weights `knn-median` (default), `median` or a
/// fixed positive number.
fn graph(p: &mut ParamSet) -> SpecResult<GraphConfig> {
    let k = positive_count(p, "graph_k", 10)?;
    let weights = match p.map.remove("graph_weight") {
        None => WeightScale::KnnMedian,
        Some(Value::Text(s)) => match s.as_str() {
            "knn-median" => WeightScale::KnnMedian,
            "median" => WeightScale::PairwiseMedian,
            other => match other.parse::<f64>() {
                Ok(v) if v > 0.0 && v.is_finite() => WeightScale::Fixed(v),
                _ => {
                    return Err(SpecError::new(
                        "graph_weight",
                        format!("expected knn-median, median or a positive number, got '{other}'"),
                    ))
                }
            },
        },
        Some(Value::Num(v)) if v > 0.0 && v.is_finite() => WeightScale::Fixed(v),
        Some(_) => {
            return Err(SpecError::new(
                "graph_weight",
                "expected knn-median, median or a positive number",
            ))
        }
    };
    Ok(GraphConfig::knn(k, weights))
}

fn settings() -> OptimSettings {
    OptimSettings::default()
}

fn em_settings(p: &mut ParamSet, with_reg: bool) -> SpecResult<EmSettings> {
    let mut s = EmSettings {
        max_iter: positive_count(p, "max_iter", EmSettings::default().max_iter)?,
        ..EmSettings::default()
    };
    if with_reg {
        s.reg = nonneg(p, "reg", 0.0)?;
    }
    Ok(s)
}

/// Build classifier `name` from `p`, consuming every parameter it uses.
pub fn build_classifier(name: &str, p: &mut ParamSet) -> SpecResult<Classifier> {
    let c = match name {
        "ls" => Classifier::LeastSquares {
            lambda: nonneg(p, "lambda", 0.0)?,
        },
        "kls" => Classifier::KernelLeastSquares {
            kernel: kernel(p)?,
            lambda: nonneg(p, "lambda", 1e-3)?,
        },
        "nm" => Classifier::NearestMean,
        "lda" => Classifier::Lda {
            reg: nonneg(p, "reg", 0.0)?,
        },
        "logistic" => Classifier::Logistic {
            lambda: nonneg(p, "lambda", 1e-3)?,
            settings: settings(),
        },
        "svm" => Classifier::Svm {
            kernel: kernel(p)?,
            c: positive(p, "c", 1.0)?,
            settings: settings(),
        },
        "self-learning" => {
            let base = p.text("base")?.unwrap_or_else(|| "ls".to_string());
            if !SUPERVISED_BASES.contains(&base.as_str()) {
                return Err(SpecError::new(
                    "base",
                    format!("base must be one of {}", SUPERVISED_BASES.join(", ")),
                ));
            }
            let max_iter = positive_count(p, "max_iter", 100)?;
            Classifier::SelfLearning {
                base: Box::new(build_classifier(&base, p)?),
                max_iter,
            }
        }
        "em-nm" => Classifier::EmNearestMean {
            settings: em_settings(p, false)?,
        },
        "em-lda" => Classifier::EmLda {
            settings: em_settings(p, true)?,
        },
        "mc-nm" => Classifier::MomentConstrainedNearestMean,
        "usm" => Classifier::UpdatedSecondMoment {
            lambda: nonneg(p, "lambda", 0.0)?,
        },
        "icls" => Classifier::Icls {
            lambda: nonneg(p, "lambda", 0.0)?,
            settings: settings(),
        },
        "icls-projection" => Classifier::IclsProjection {
            lambda: nonneg(p, "lambda", 0.0)?,
            settings: settings(),
        },
        "erlr" => Classifier::EntropyRegularizedLogistic {
            lambda_entropy: nonneg(p, "lambda_entropy", 1.0)?,
            lambda_ridge: nonneg(p, "lambda", 1e-3)?,
            settings: settings(),
        },
        "laprls" => Classifier::LaplacianRls {
            kernel: kernel(p)?,
            params: LapParams {
                lambda: nonneg(p, "lambda", 1e-3)?,
                gamma: nonneg(p, "gamma", 1.0)?,
            },
            graph: graph(p)?,
        },
        "lapsvm" => Classifier::LaplacianSvm {
            kernel: kernel(p)?,
            params: LapParams {
                lambda: nonneg(p, "lambda", 1e-3)?,
                gamma: nonneg(p, "gamma", 1.0)?,
            },
            graph: graph(p)?,
            settings: settings(),
        },
        other => {
            return Err(SpecError::new(
                "model",
                format!("unknown model '{other}'; valid models: {}", MODEL_NAMES.join(", ")),
            ))
        }
    };
    Ok(c)
}

/// Generate dataset `name` from `p`; `seed` is used unless `p` has one.
pub fn generate_dataset(name: &str, p: &mut ParamSet, seed: u64) -> SpecResult<Dataset> {
    let seed = p.seed("seed")?.unwrap_or(seed);
    let require = |p: &mut ParamSet, key: &str| -> SpecResult<usize> {
        p.count(key)?
            .ok_or_else(|| SpecError::new(key, format!("required for {name}")))
    };
    let sigma = |p: &mut ParamSet, default: f64| nonneg(p, "sigma", default);
    let out = match name {
        "two-gaussian" => {
            let n = require(p, "n")?;
            let d = p.count("d")?.unwrap_or(2);
            let variance = positive(p, "variance", 1.0)?;
            let expected = p.flag("expected")?.unwrap_or(true);
            datagen::generate_two_class_gaussian(n, d, variance, expected, seed)
        }
        "crescent-moon" => {
            let n = require(p, "n_per_class")?;
            datagen::generate_crescent_moon(n, sigma(p, 0.3)?, seed)
        }
        "spirals" => {
            let n = require(p, "n_per_class")?;
            let s = sigma(p, 0.025)?;
            let turns = positive(p, "turns", 1.5)?;
            datagen::generate_spirals(n, s, turns, seed)
        }
        "parallel-planes" => {
            let n = require(p, "n_per_class")?;
            datagen::generate_parallel_planes(n, sigma(p, 0.1)?, seed)
        }
        "two-circles" => {
            let n = require(p, "n_per_class")?;
            datagen::generate_two_circles(n, sigma(p, 0.1)?, seed)
        }
        other => {
            return Err(SpecError::new(
                "dataset",
                format!("unknown dataset '{other}'; valid datasets: {}", DATASET_NAMES.join(", ")),
            ))
        }
    };
    out.map_err(|e| SpecError::new("", e.to_string()))
}
