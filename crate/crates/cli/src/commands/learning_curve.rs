use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::{Map, Value as Json};
use ssllab::datagen::derive_seed;
use ssllab::eval::{learning_curve_ssl, ExperimentResult, Measure, NamedTrainer, TrialPlan};
use ssllab::Dataset;

use crate::datafile::{DataFile, DEFAULT_LABEL_COL};
use crate::error::{CliError, CliResult};
use crate::output::write_atomic;
use crate::resolve_seed;
use crate::spec::{build_classifier, generate_dataset, ParamSet, SpecError, Value};

#[derive(Debug, Args)]
pub struct LearningCurveArgs {
    /// JSON experiment description.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's `jobs`.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Base seed when the config has no `base_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short = 'o', long)]
    pub output: PathBuf,
}

/// A config problem at a JSON pointer.
fn at(pointer: &str, msg: impl std::fmt::Display) -> CliError {
    let p = if pointer.is_empty() { "/" } else { pointer };
    CliError::usage(format!("config {p}: {msg}"))
}

fn spec_at(base: &str, e: SpecError) -> CliError {
    let p = if e.field.is_empty() { base.to_string() } else { format!("{base}/{}", e.field) };
    at(&p, e.message)
}

fn field<'a>(obj: &'a Map<String, Json>, base: &str, key: &str) -> CliResult<&'a Json> {
    obj.get(key).ok_or_else(|| at(&format!("{base}/{key}"), "missing"))
}

fn uint(v: &Json, pointer: &str) -> CliResult<u64> {
    v.as_u64().ok_or_else(|| at(pointer, "expected a nonnegative integer"))
}

fn array<'a>(v: &'a Json, pointer: &str) -> CliResult<&'a Vec<Json>> {
    v.as_array().ok_or_else(|| at(pointer, "expected an array"))
}

fn object<'a>(v: &'a Json, pointer: &str) -> CliResult<&'a Map<String, Json>> {
    v.as_object().ok_or_else(|| at(pointer, "expected an object"))
}

fn string<'a>(v: &'a Json, pointer: &str) -> CliResult<&'a str> {
    v.as_str().ok_or_else(|| at(pointer, "expected a string"))
}

/// Scalar members of `obj` other than `skip` as a parameter set.
fn params(obj: &Map<String, Json>, base: &str, skip: &[&str]) -> CliResult<ParamSet> {
    let mut p = ParamSet::new();
    for (k, v) in obj {
        if skip.contains(&k.as_str()) {
            continue;
        }
        let value = match v {
            Json::Number(n) => Value::Num(n.as_f64().ok_or_else(|| at(&format!("{base}/{k}"), "number out of range"))?),
            Json::String(s) => Value::Text(s.clone()),
            Json::Bool(b) => Value::Bool(*b),
            _ => return Err(at(&format!("{base}/{k}"), "expected a number, string or boolean")),
        };
        p.set(k, value);
    }
    Ok(p)
}

#[derive(Debug)]
pub struct Experiment {
    pub datasets: Vec<(String, Dataset)>,
    pub plan: TrialPlan,
}

const TOP_LEVEL: [&str; 8] = ["datasets", "classifiers", "n_l", "sizes", "repeats", "measures", "base_seed", "jobs"];

/// Parse and validate a config. Relative data file paths resolve against `dir`.
pub fn parse_config(text: &str, dir: &Path, default_seed: u64) -> CliResult<Experiment> {
    let root: Json = serde_json::from_str(text).map_err(|e| at("", format!("invalid JSON: {e}")))?;
    let root = object(&root, "")?;
    if let Some(k) = root.keys().find(|k| !TOP_LEVEL.contains(&k.as_str())) {
        return Err(at(&format!("/{k}"), "unknown field"));
    }
    let base_seed = match root.get("base_seed") {
        Some(v) => uint(v, "/base_seed")?,
        None => default_seed,
    };
    let jobs = match root.get("jobs") {
        Some(v) => uint(v, "/jobs")? as usize,
        None => 0,
    };
    let repeats = uint(field(root, "", "repeats")?, "/repeats")? as usize;
    if repeats == 0 {
        return Err(at("/repeats", "must be at least 1"));
    }
    let n_l = uint(field(root, "", "n_l")?, "/n_l")? as usize;
    if n_l < 2 {
        return Err(at("/n_l", "need at least 2 labeled points"));
    }
    let sizes_json = array(field(root, "", "sizes")?, "/sizes")?;
    if sizes_json.is_empty() {
        return Err(at("/sizes", "must not be empty"));
    }
    let mut sizes = Vec::new();
    for (i, v) in sizes_json.iter().enumerate() {
        let s = uint(v, &format!("/sizes/{i}"))? as usize;
        if s == 0 || sizes.last().is_some_and(|&prev| s <= prev) {
            return Err(at(&format!("/sizes/{i}"), "sizes must be positive and strictly increasing"));
        }
        sizes.push(s);
    }
    let mut measures = Vec::new();
    for (i, v) in array(field(root, "", "measures")?, "/measures")?.iter().enumerate() {
        let p = format!("/measures/{i}");
        let name = string(v, &p)?;
        let m = Measure::from_name(name)
            .ok_or_else(|| at(&p, format!("unknown measure '{name}' (expected error, loss-test or loss-all)")))?;
        measures.push(m);
    }
    if measures.is_empty() {
        return Err(at("/measures", "must not be empty"));
    }

    let mut classifiers = Vec::new();
    let cls = array(field(root, "", "classifiers")?, "/classifiers")?;
    if cls.is_empty() {
        return Err(at("/classifiers", "must not be empty"));
    }
    for (i, v) in cls.iter().enumerate() {
        let base = format!("/classifiers/{i}");
        let obj = object(v, &base)?;
        let model = string(field(obj, &base, "model")?, &format!("{base}/model"))?;
        let name = match obj.get("name") {
            Some(n) => string(n, &format!("{base}/name"))?.to_string(),
            None => model.to_string(),
        };
        if classifiers.iter().any(|c: &NamedTrainer| c.name == name) {
            return Err(at(&format!("{base}/name"), format!("duplicate classifier name '{name}'")));
        }
        let mut p = params(obj, &base, &["model", "name"])?;
        let c = build_classifier(model, &mut p).map_err(|e| spec_at(&base, e))?;
        p.finish(model).map_err(|e| spec_at(&base, e))?;
        classifiers.push(NamedTrainer::new(name, c));
    }

    let mut datasets = Vec::new();
    let ds = array(field(root, "", "datasets")?, "/datasets")?;
    if ds.is_empty() {
        return Err(at("/datasets", "must not be empty"));
    }
    for (i, v) in ds.iter().enumerate() {
        let base = format!("/datasets/{i}");
        let obj = object(v, &base)?;
        let d = if let Some(file) = obj.get("file") {
            if let Some(k) = obj.keys().find(|k| !["name", "file", "label_col"].contains(&k.as_str())) {
                return Err(at(&format!("{base}/{k}"), "not a field of a file dataset"));
            }
            let path = dir.join(string(file, &format!("{base}/file"))?);
            let label_col = match obj.get("label_col") {
                Some(l) => string(l, &format!("{base}/label_col"))?,
                None => DEFAULT_LABEL_COL,
            };
            let f = DataFile::read(&path, label_col).map_err(|e| at(&format!("{base}/file"), e))?;
            let d = f.to_dataset(label_col, None).map_err(|e| at(&format!("{base}/file"), e))?;
            if d.labeled_count() != d.len() {
                return Err(at(&format!("{base}/file"), "learning curves need a fully labeled dataset"));
            }
            d
        } else {
            let generator = string(field(obj, &base, "generator")?, &format!("{base}/generator"))?;
            let mut p = params(obj, &base, &["name", "generator"])?;
            let d = generate_dataset(generator, &mut p, derive_seed(base_seed, &[1 << 32, i as u64]))
                .map_err(|e| {
                    let e = if e.field == "dataset" { SpecError { field: "generator".into(), ..e } } else { e };
                    spec_at(&base, e)
                })?;
            p.finish(generator).map_err(|e| spec_at(&base, e))?;
            d
        };
        let name = match obj.get("name") {
            Some(n) => string(n, &format!("{base}/name"))?.to_string(),
            None => format!("dataset{i}"),
        };
        if datasets.iter().any(|(n, _): &(String, Dataset)| *n == name) {
            return Err(at(&format!("{base}/name"), format!("duplicate dataset name '{name}'")));
        }
        let max = *sizes.last().expect("nonempty");
        if n_l + max >= d.len() {
            return Err(at(
                "/sizes",
                format!("dataset '{name}' has {} rows; n_l + largest size must leave a test set", d.len()),
            ));
        }
        datasets.push((name, d));
    }

    Ok(Experiment {
        datasets,
        plan: TrialPlan {
            base_seed,
            repeats,
            n_labeled: n_l,
            sizes,
            measures,
            classifiers,
            jobs,
        },
    })
}

/// One line per (dataset, measure, classifier) with the mean at the largest size.
pub fn summary_lines(r: &ExperimentResult, largest: usize) -> Vec<String> {
    r.summary()
        .into_iter()
        .filter(|s| s.size == largest)
        .map(|s| {
            let mean = s.mean.map_or("NA".to_string(), |m| format!("{m:.4}"));
            let missing = if s.missing > 0 { format!(" ({} failed)", s.missing) } else { String::new() };
            format!("{} {} {}: mean {mean} over {} repeats{missing}", s.dataset, s.measure.name(), s.classifier, s.count)
        })
        .collect()
}

pub fn run(a: &LearningCurveArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&a.config)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", a.config.display())))?;
    let dir = a.config.parent().unwrap_or(Path::new("."));
    let mut exp = parse_config(&text, dir, resolve_seed(a.seed)?)?;
    if let Some(j) = a.jobs {
        exp.plan.jobs = j;
    }
    let r = learning_curve_ssl(&exp.datasets, &exp.plan)?;
    write_atomic(&a.output, r.to_csv_string().as_bytes())?;
    let largest = *exp.plan.sizes.last().expect("validated");
    println!("{}: {} records", a.output.display(), r.records.len());
    println!("means at {largest} unlabeled points:");
    for line in summary_lines(&r, largest) {
        println!("  {line}");
    }
    if !r.failures.is_empty() {
        println!("{} trainer or measure failures, for example:", r.failures.len());
        let f = &r.failures[0];
        println!("  {} / {} repeat {} size {}: {}", f.dataset, f.classifier, f.repeat, f.size, f.message);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{
        "datasets": [{"name": "g", "generator": "two-gaussian", "n": 60, "expected": false}],
        "classifiers": [{"name": "sup", "model": "ls"}, {"model": "self-learning", "base": "ls"}],
        "n_l": 6, "sizes": [2, 4], "repeats": 2, "measures": ["error", "loss-test"], "base_seed": 3
    }"#;

    fn err(text: &str) -> String {
        match parse_config(text, Path::new("."), 1) {
            Err(CliError::Usage(m)) => m,
            other => panic!("expected a usage error, got {other:?}"),
        }
    }

    #[test]
    fn parses_a_valid_config() {
        let e = parse_config(GOOD, Path::new("."), 1).unwrap();
        assert_eq!(e.datasets[0].1.len(), 60);
        assert_eq!(e.plan.classifiers[1].name, "self-learning");
        assert_eq!(e.plan.base_seed, 3);
        let r = learning_curve_ssl(&e.datasets, &e.plan).unwrap();
        assert_eq!(r.records.len(), 2 * 2 * 2 * 2);
    }

    #[test]
    fn errors_carry_json_pointers() {
        let v: Json = serde_json::from_str(GOOD).unwrap();
        let edit = |f: &dyn Fn(&mut Json)| {
            let mut w = v.clone();
            f(&mut w);
            err(&w.to_string())
        };
        assert!(edit(&|w| { w.as_object_mut().unwrap().remove("sizes"); }).starts_with("config /sizes:"));
        assert!(edit(&|w| w["sizes"][1] = 1.into()).starts_with("config /sizes/1:"));
        assert!(edit(&|w| w["classifiers"][0]["lambda"] = (-1.0).into()).starts_with("config /classifiers/0/lambda:"));
        assert!(edit(&|w| w["classifiers"][1]["c"] = 1.0.into()).starts_with("config /classifiers/1/c:"));
        assert!(edit(&|w| w["classifiers"][0]["model"] = "zzz".into()).starts_with("config /classifiers/0/model:"));
        assert!(edit(&|w| w["datasets"][0]["generator"] = "zzz".into()).starts_with("config /datasets/0/generator:"));
        assert!(edit(&|w| w["datasets"][0]["n"] = 10.into()).starts_with("config /sizes:"));
        assert!(edit(&|w| w["measures"][0] = "auc".into()).starts_with("config /measures/0:"));
        assert!(edit(&|w| w["extra"] = 1.into()).starts_with("config /extra:"));
        assert!(err("[1]").starts_with("config /:"));
    }
}
