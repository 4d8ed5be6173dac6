//! Experiment runner: ground-truth construction, repeated seeded trials with
//! per-method scoring against the true frequent itemsets, and deterministic
//! CSV emission.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baselines;
use crate::dataset::{self, GroundTruthModel, Transaction, TransactionDataset};
use crate::error::{Error, Result};
use crate::fim::{self, ItemsetCollection};
use crate::itemset::Itemset;
use crate::sukp::SolveLimits;
use crate::tfi::{self, TfiConfig, TfiReport};

/// The empirical distribution of a dataset: each distinct transaction with
/// probability multiplicity / n. Sampling from it and scoring against its
/// true frequencies is the enlargement protocol for ground-truth evaluation.
pub fn ground_truth_from_dataset(ds: &TransactionDataset) -> Result<GroundTruthModel> {
    if ds.is_empty() {
        return Err(Error::Parameter(
            "cannot build ground truth from an empty dataset".into(),
        ));
    }
    let n = ds.len() as f64;
    let support = ds
        .distinct_counts()
        .into_iter()
        .map(|(t, c)| (t, c as f64 / n))
        .collect();
    GroundTruthModel::new(support)
}

/// Exact set of nonempty itemsets with true frequency at least theta,
/// obtained by mining the model's support with its probabilities as weights.
/// The returned frequencies are the true frequencies.
pub fn true_frequent_itemsets(gt: &GroundTruthModel, theta: f64) -> Result<ItemsetCollection> {
    fim::mine_weighted(gt.support(), 1.0, theta)
}

/// The methods the harness can run and score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Method1,
    Method2,
    Bonferroni,
    Holdout,
}

impl MethodKind {
    pub fn label(&self) -> &'static str {
        match self {
            MethodKind::Method1 => "method1",
            MethodKind::Method2 => "method2",
            MethodKind::Bonferroni => "bonferroni",
            MethodKind::Holdout => "holdout",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One support transaction of a model file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupportEntry {
    pub transaction: Vec<u32>,
    pub probability: f64,
}

/// Where the ground truth comes from: a FIMI dataset (its empirical
/// distribution), a model file, or an inline model.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SourceSpec {
    Fimi { path: String },
    ModelFile { path: String },
    InlineModel { support: Vec<SupportEntry> },
}

fn model_from_entries(entries: &[SupportEntry]) -> Result<GroundTruthModel> {
    let support = entries
        .iter()
        .map(|e| {
            (
                Transaction::from_ids(e.transaction.iter().copied()),
                e.probability,
            )
        })
        .collect();
    GroundTruthModel::new(support)
}

#[derive(Deserialize)]
struct ModelFile {
    support: Vec<SupportEntry>,
}

impl SourceSpec {
    pub fn load(&self) -> Result<GroundTruthModel> {
        match self {
            SourceSpec::Fimi { path } => {
                let file = std::fs::File::open(Path::new(path))?;
                let ds = dataset::parse_fimi(std::io::BufReader::new(file))?;
                ground_truth_from_dataset(&ds)
            }
            SourceSpec::ModelFile { path } => {
                let text = std::fs::read_to_string(Path::new(path))?;
                let spec: ModelFile = serde_json::from_str(&text)?;
                model_from_entries(&spec.support)
            }
            SourceSpec::InlineModel { support } => model_from_entries(support),
        }
    }
}

fn default_split_fraction() -> f64 {
    0.5
}

fn default_delta() -> f64 {
    0.1
}

fn default_trials() -> usize {
    20
}

fn default_vc_constant() -> f64 {
    crate::vcbounds::DEFAULT_VC_CONSTANT
}

fn default_max_sukp_collection() -> usize {
    TfiConfig::default().max_sukp_collection
}

fn default_work_budget() -> u64 {
    SolveLimits::default().work_budget
}

/// Full description of an experiment: the ground truth, the sampling size,
/// the parameter grid, the methods, and the master seed everything derives
/// from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: SourceSpec,
    pub target_n: usize,
    pub thetas: Vec<f64>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<MethodKind>,
    #[serde(default = "default_split_fraction")]
    pub split_fraction: f64,
    #[serde(default = "default_vc_constant")]
    pub vc_constant: f64,
    #[serde(default = "default_max_sukp_collection")]
    pub max_sukp_collection: usize,
    #[serde(default = "default_work_budget")]
    pub sukp_work_budget: u64,
    /// When set, every split/full method run writes its full report JSON
    /// into this directory.
    #[serde(default)]
    pub reports_dir: Option<String>,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Parameter("trials must be at least 1".into()));
        }
        if self.target_n == 0 {
            return Err(Error::Parameter("target_n must be at least 1".into()));
        }
        if self.thetas.is_empty() {
            return Err(Error::Parameter("at least one theta is required".into()));
        }
        for &t in &self.thetas {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::Parameter(format!(
                    "theta values must be in (0,1], got {t}"
                )));
            }
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Parameter(format!(
                "delta must be in (0,1), got {}",
                self.delta
            )));
        }
        if self.methods.is_empty() {
            return Err(Error::Parameter("at least one method is required".into()));
        }
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(Error::Parameter(format!(
                "split fraction must be in (0,1), got {}",
                self.split_fraction
            )));
        }
        Ok(())
    }

    fn tfi_config(&self) -> TfiConfig {
        TfiConfig {
            vc_constant: self.vc_constant,
            split: None,
            max_sukp_collection: self.max_sukp_collection,
            solve_limits: SolveLimits {
                work_budget: self.sukp_work_budget,
            },
        }
    }
}

/// How a method run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    Infeasible,
    ResourceCap,
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowStatus::Ok => "ok",
            RowStatus::Infeasible => "infeasible",
            RowStatus::ResourceCap => "resource_cap",
        })
    }
}

/// Scored outcome of one (method, theta, trial) run.
#[derive(Debug, Clone, Serialize)]
pub struct EvaluationRow {
    pub method: MethodKind,
    pub theta: f64,
    pub trial: usize,
    pub seed: u64,
    pub num_tfis: usize,
    pub num_reported: usize,
    pub true_positives: usize,
    pub false_positives: usize,
    pub power: f64,
    pub runtime_seconds: f64,
    pub status: RowStatus,
}

// splitmix64; the per-trial and per-purpose seed streams derive from the
// master seed through it.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn derive_seed(root: u64, stream: u64) -> u64 {
    mix(root ^ mix(stream))
}

const SPLIT_STREAM: u64 = 0x73706c6974; // "split"

/// Runs every configured method against every theta on `trials` datasets
/// sampled from the ground truth, scoring each run against the exact true
/// frequent itemsets. Rows come back sorted by (method, theta, trial) and
/// the whole run is deterministic given the config.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<EvaluationRow>> {
    cfg.validate()?;
    let gt = cfg.source.load()?;
    let tfi_config = cfg.tfi_config();

    let mut truths: Vec<(f64, BTreeSet<Itemset>)> = Vec::with_capacity(cfg.thetas.len());
    for &theta in &cfg.thetas {
        truths.push((theta, true_frequent_itemsets(&gt, theta)?.to_set()));
    }

    let needs_split = cfg
        .methods
        .iter()
        .any(|m| matches!(m, MethodKind::Method1 | MethodKind::Holdout));

    if let Some(dir) = &cfg.reports_dir {
        std::fs::create_dir_all(dir)?;
    }

    let mut rows = Vec::with_capacity(cfg.trials * cfg.thetas.len() * cfg.methods.len());
    for trial in 0..cfg.trials {
        let trial_seed = derive_seed(cfg.seed, trial as u64);
        let ds = gt.sample(cfg.target_n, trial_seed)?;
        let split = if needs_split {
            let split_seed = derive_seed(trial_seed, SPLIT_STREAM);
            Some(ds.random_split(cfg.split_fraction, split_seed)?)
        } else {
            None
        };

        for &method in &cfg.methods {
            for (theta, truth) in &truths {
                let start = Instant::now();
                let outcome = run_method(method, &ds, &split, *theta, cfg.delta, &tfi_config);
                let runtime_seconds = start.elapsed().as_secs_f64();
                let (reported, status, report) = match outcome {
                    Ok((set, report)) => (set, RowStatus::Ok, report),
                    Err(Error::Infeasible(_)) => (BTreeSet::new(), RowStatus::Infeasible, None),
                    Err(Error::ResourceCap(_)) => (BTreeSet::new(), RowStatus::ResourceCap, None),
                    Err(other) => return Err(other),
                };

                if let (Some(dir), Some(report)) = (&cfg.reports_dir, &report) {
                    let name = format!("{}_theta{}_trial{}.json", method, theta, trial);
                    let file = std::fs::File::create(Path::new(dir).join(name))?;
                    serde_json::to_writer_pretty(file, report)?;
                }

                let true_positives = reported.intersection(truth).count();
                let false_positives = reported.len() - true_positives;
                let power = if truth.is_empty() {
                    1.0
                } else {
                    true_positives as f64 / truth.len() as f64
                };
                rows.push(EvaluationRow {
                    method,
                    theta: *theta,
                    trial,
                    seed: trial_seed,
                    num_tfis: truth.len(),
                    num_reported: reported.len(),
                    true_positives,
                    false_positives,
                    power,
                    runtime_seconds,
                    status,
                });
            }
        }
    }

    rows.sort_by(|a, b| {
        a.method
            .cmp(&b.method)
            .then(a.theta.partial_cmp(&b.theta).unwrap())
            .then(a.trial.cmp(&b.trial))
    });
    Ok(rows)
}

type MethodOutcome = Result<(BTreeSet<Itemset>, Option<TfiReport>)>;

fn run_method(
    method: MethodKind,
    ds: &TransactionDataset,
    split: &Option<(TransactionDataset, TransactionDataset)>,
    theta: f64,
    delta: f64,
    config: &TfiConfig,
) -> MethodOutcome {
    match method {
        MethodKind::Method1 => {
            let (ds_e, ds_v) = split.as_ref().expect("split prepared for method1");
            let report = tfi::method1(ds_e, ds_v, theta, delta, config)?;
            Ok((report.output.to_set(), Some(report)))
        }
        MethodKind::Method2 => {
            let report = tfi::method2(ds, theta, delta, config)?;
            Ok((report.output.to_set(), Some(report)))
        }
        MethodKind::Bonferroni => {
            let out = baselines::bonferroni_method(ds, theta, delta)?;
            Ok((out.to_set(), None))
        }
        MethodKind::Holdout => {
            let (ds_e, ds_v) = split.as_ref().expect("split prepared for holdout");
            let out = baselines::holdout_method(ds_e, ds_v, theta, delta)?;
            Ok((out.to_set(), None))
        }
    }
}

/// Renders rows as CSV. The columns are fixed:
/// method,theta,trial,seed,num_tfis,num_reported,true_positives,false_positives,power,status
/// Runtimes are deliberately left out so identical configs produce
/// byte-identical files; they live in the summary instead.
pub fn rows_to_csv(rows: &[EvaluationRow]) -> String {
    let mut out = String::from(
        "method,theta,trial,seed,num_tfis,num_reported,true_positives,false_positives,power,status\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{:.6},{}\n",
            r.method,
            r.theta,
            r.trial,
            r.seed,
            r.num_tfis,
            r.num_reported,
            r.true_positives,
            r.false_positives,
            r.power,
            r.status
        ));
    }
    out
}

/// Mean/stddev aggregates per (method, theta), including runtimes.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub method: MethodKind,
    pub theta: f64,
    pub trials: usize,
    pub failed: usize,
    pub mean_power: f64,
    pub std_power: f64,
    pub total_false_positives: usize,
    pub trials_with_false_positives: usize,
    pub mean_runtime_seconds: f64,
    pub std_runtime_seconds: f64,
}

pub fn summarize(rows: &[EvaluationRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(MethodKind, f64)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|(m, t)| *m == r.method && *t == r.theta) {
            keys.push((r.method, r.theta));
        }
    }
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.partial_cmp(&b.1).unwrap()));

    keys.into_iter()
        .map(|(method, theta)| {
            let group: Vec<&EvaluationRow> = rows
                .iter()
                .filter(|r| r.method == method && r.theta == theta)
                .collect();
            let powers: Vec<f64> = group.iter().map(|r| r.power).collect();
            let runtimes: Vec<f64> = group.iter().map(|r| r.runtime_seconds).collect();
            let (mean_power, std_power) = mean_std(&powers);
            let (mean_runtime_seconds, std_runtime_seconds) = mean_std(&runtimes);
            SummaryRow {
                method,
                theta,
                trials: group.len(),
                failed: group.iter().filter(|r| r.status != RowStatus::Ok).count(),
                mean_power,
                std_power,
                total_false_positives: group.iter().map(|r| r.false_positives).sum(),
                trials_with_false_positives: group.iter().filter(|r| r.false_positives > 0).count(),
                mean_runtime_seconds,
                std_runtime_seconds,
            }
        })
        .collect()
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
    (mean, var.sqrt())
}
