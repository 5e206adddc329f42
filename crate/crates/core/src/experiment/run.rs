use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::config::{Algorithm, ExperimentConfig, Model, Sweep};
use super::metrics::{auroc, normalized_log_likelihood, selection_scores, support_recovery, test_r2};
use super::synth::{generate_logistic, generate_synthetic};
use crate::concave::{Logistic, SmoothObjective, SupportObjective};
use crate::data::{read_table_path, Table};
use crate::error::{Error, Result};
use crate::greedy::{distributed_with, greedy, greedy_clamped, stochastic_greedy};
use crate::regression::{omp_clamped, omp_select, R2Objective, RegressionInstance};
use crate::rng::RandomSource;
use crate::set_function::{Oracle, SetFunction};

/// One (algorithm, sweep value) result, averaged over iterations.
///
/// `loglik` is the training R² for regression and the fraction of null deviance explained for
/// logistic models. `test_r2` is the held-out counterpart of the same quantity. The `_se`
/// fields are standard errors of the mean.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub algorithm: String,
    pub sweep: f64,
    pub loglik: f64,
    pub test_r2: f64,
    pub auroc: f64,
    pub recovery: f64,
    pub time_s: f64,
    pub evals: u64,
    pub loglik_se: f64,
    pub test_r2_se: f64,
    pub auroc_se: f64,
    pub recovery_se: f64,
}

impl MetricsRow {
    pub fn has_nan(&self) -> bool {
        [self.loglik, self.test_r2, self.auroc, self.recovery, self.time_s, self.loglik_se, self.test_r2_se, self.auroc_se, self.recovery_se]
            .iter()
            .any(|v| v.is_nan())
    }
}

/// A single run of one algorithm on one iteration's data.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub iteration: usize,
    pub algorithm: String,
    pub sweep: f64,
    pub selected: Vec<usize>,
    pub loglik: f64,
    pub test_r2: f64,
    pub auroc: f64,
    pub recovery: f64,
    pub time_s: f64,
    pub evals: u64,
}

#[derive(Debug, Clone)]
struct Job {
    algorithm: Algorithm,
    label: String,
    k: usize,
    delta: f64,
    sweep: f64,
}

fn jobs(cfg: &ExperimentConfig) -> Vec<Job> {
    let mut out = Vec::new();
    for &algorithm in &cfg.algorithms {
        let name = algorithm.name().to_owned();
        match cfg.sweep {
            Sweep::K => {
                for &k in &cfg.k {
                    if algorithm == Algorithm::StochasticGreedy {
                        for &delta in &cfg.delta {
                            let label =
                                if cfg.delta.len() == 1 { name.clone() } else { format!("{name}(delta={delta})") };
                            out.push(Job { algorithm, label, k, delta, sweep: k as f64 });
                        }
                    } else {
                        out.push(Job { algorithm, label: name.clone(), k, delta: f64::NAN, sweep: k as f64 });
                    }
                }
            }
            Sweep::Delta => {
                let k = cfg.k[0];
                if algorithm == Algorithm::StochasticGreedy {
                    for &delta in &cfg.delta {
                        out.push(Job { algorithm, label: name.clone(), k, delta, sweep: delta });
                    }
                } else {
                    // no subsampling corresponds to δ = 0
                    out.push(Job { algorithm, label: name.clone(), k, delta: f64::NAN, sweep: 0.0 });
                }
            }
        }
    }
    out
}

enum Data {
    Regression { train: RegressionInstance, test: RegressionInstance, support: Option<Vec<usize>> },
    Logistic { train: Logistic, test: Logistic, support: Option<Vec<usize>> },
}

/// Per-iteration random streams.
struct Streams {
    data: RandomSource,
    partition: RandomSource,
    subsample: RandomSource,
}

impl Streams {
    fn new(seed: u64, iteration: usize) -> Self {
        let it = RandomSource::new(seed).split(iteration as u64);
        Streams { data: it.split(0), partition: it.split(1), subsample: it.split(2) }
    }
}

fn split_rows(table: &Table, source: RandomSource) -> (Vec<usize>, Vec<usize>) {
    let n = table.features.nrows();
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(&mut source.rng());
    let test = rows.split_off(n.div_ceil(2));
    (rows, test)
}

fn take_rows(table: &Table, rows: &[usize]) -> (DMatrix<f64>, DVector<f64>) {
    (table.features.select_rows(rows), table.response.select_rows(rows))
}

fn load_data(cfg: &ExperimentConfig, input: Option<&Table>, streams: &Streams) -> Result<Data> {
    let mut rng = streams.data.rng();
    match (cfg.model, input) {
        (Model::Regression, None) => {
            let s = generate_synthetic(cfg, &mut rng)?;
            Ok(Data::Regression { train: s.train, test: s.test, support: Some(s.support) })
        }
        (Model::Logistic, None) => {
            let s = generate_logistic(cfg, &mut rng)?;
            Ok(Data::Logistic { train: s.train, test: s.test, support: Some(s.support) })
        }
        (model, Some(table)) => {
            let (tr, te) = split_rows(table, streams.data);
            let (xtr, ytr) = take_rows(table, &tr);
            let (xte, yte) = take_rows(table, &te);
            Ok(match model {
                Model::Regression => Data::Regression {
                    train: RegressionInstance::new(xtr, ytr)?.normalize()?,
                    test: RegressionInstance::new(xte, yte)?.normalize()?,
                    support: None,
                },
                Model::Logistic => {
                    Data::Logistic { train: Logistic::new(xtr, ytr)?, test: Logistic::new(xte, yte)?, support: None }
                }
            })
        }
    }
}

struct Outcome {
    selected: Vec<usize>,
    value: f64,
    evals: u64,
    time_s: f64,
}

fn timed<F: SetFunction>(oracle: &Oracle<F>, run: impl FnOnce() -> Result<(Vec<usize>, f64)>) -> Result<Outcome> {
    oracle.reset_evaluations();
    let start = Instant::now();
    let (selected, value) = run()?;
    let time_s = start.elapsed().as_secs_f64();
    Ok(Outcome { selected, value, evals: oracle.evaluations(), time_s })
}

fn select_fs<F: SetFunction>(oracle: &Oracle<F>, job: &Job, cfg: &ExperimentConfig, streams: &Streams) -> Result<Outcome> {
    let all: Vec<usize> = (0..oracle.ground_size()).collect();
    timed(oracle, || match job.algorithm {
        Algorithm::GreedyFs => greedy(oracle, &all, job.k).map(|t| (t.selected(), t.value())),
        Algorithm::StochasticGreedy => {
            stochastic_greedy(oracle, &all, job.k, job.delta, streams.subsample).map(|t| (t.selected(), t.value()))
        }
        Algorithm::DistributedFs => distributed_with(oracle, &all, cfg.l, job.k, cfg.partition, streams.partition, greedy_clamped)
            .map(|r| (r.selected, r.value)),
        other => Err(Error::config(format!("`{other}` is not available for this model"))),
    })
}

fn select_regression(oracle: &Oracle<R2Objective>, job: &Job, cfg: &ExperimentConfig, streams: &Streams) -> Result<Outcome> {
    match job.algorithm {
        Algorithm::Omp => timed(oracle, || {
            let t = omp_select(oracle.function().instance(), job.k)?;
            oracle.charge(t.len() as u64);
            Ok((t.selected(), t.value()))
        }),
        Algorithm::DistributedOmp => {
            let all: Vec<usize> = (0..oracle.ground_size()).collect();
            timed(oracle, || {
                distributed_with(oracle, &all, cfg.l, job.k, cfg.partition, streams.partition, omp_clamped)
                    .map(|r| (r.selected, r.value))
            })
        }
        _ => select_fs(oracle, job, cfg, streams),
    }
}

fn ranking_metrics(d: usize, selected: &[usize], support: Option<&[usize]>) -> (f64, f64) {
    match support {
        Some(s) => (auroc(&selection_scores(d, selected), s).unwrap_or(f64::NAN), support_recovery(selected, s)),
        None => (f64::NAN, f64::NAN),
    }
}

fn run_iteration(cfg: &ExperimentConfig, input: Option<&Table>, iteration: usize) -> Result<Vec<RunRecord>> {
    let streams = Streams::new(cfg.seed, iteration);
    let data = load_data(cfg, input, &streams)?;
    let mut out = Vec::new();
    for job in jobs(cfg) {
        let record = match &data {
            Data::Regression { train, test, support } => {
                let oracle = Oracle::new(R2Objective::new(train.clone()))?;
                let o = select_regression(&oracle, &job, cfg, &streams)?;
                let test_r2 = train.fit(&o.selected).map_or(f64::NAN, |beta| test_r2(test, &beta));
                let (auroc, recovery) = ranking_metrics(train.d(), &o.selected, support.as_deref());
                RunRecord {
                    iteration,
                    algorithm: job.label.clone(),
                    sweep: job.sweep,
                    loglik: o.value,
                    test_r2,
                    auroc,
                    recovery,
                    time_s: o.time_s,
                    evals: o.evals,
                    selected: o.selected,
                }
            }
            Data::Logistic { train, test, support } => {
                let oracle = Oracle::new(SupportObjective::new(train.clone()))?;
                let o = select_fs(&oracle, &job, cfg, &streams)?;
                let beta = oracle.function().solve(&o.selected, None).coefficients;
                let null = train.value_on(&[], &[]);
                let (auroc, recovery) = ranking_metrics(train.dim(), &o.selected, support.as_deref());
                RunRecord {
                    iteration,
                    algorithm: job.label.clone(),
                    sweep: job.sweep,
                    loglik: o.value / -null,
                    test_r2: normalized_log_likelihood(test, &beta),
                    auroc,
                    recovery,
                    time_s: o.time_s,
                    evals: o.evals,
                    selected: o.selected,
                }
            }
        };
        out.push(record);
    }
    log::info!("iteration {iteration} finished");
    Ok(out)
}

/// Every individual run, ordered by iteration and then by job.
pub fn run_records(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let input = cfg.input.as_ref().map(read_table_path).transpose()?;
    if let Some(t) = &input {
        cfg.validate_dimensions(t.features.ncols())?;
        if t.features.nrows() < 4 {
            return Err(Error::config("input needs at least 4 rows to form train and test halves"));
        }
    }
    let per_iteration: Vec<Vec<RunRecord>> =
        (0..cfg.iterations).into_par_iter().map(|it| run_iteration(cfg, input.as_ref(), it)).collect::<Result<_>>()?;
    Ok(per_iteration.into_iter().flatten().collect())
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Averages run records over iterations, keeping the order in which (algorithm, sweep)
/// pairs first appear.
pub fn aggregate(records: &[RunRecord]) -> Vec<MetricsRow> {
    let mut keys: Vec<(String, f64)> = Vec::new();
    for r in records {
        if !keys.iter().any(|(a, s)| *a == r.algorithm && s.to_bits() == r.sweep.to_bits()) {
            keys.push((r.algorithm.clone(), r.sweep));
        }
    }
    keys.into_iter()
        .map(|(algorithm, sweep)| {
            let group: Vec<&RunRecord> =
                records.iter().filter(|r| r.algorithm == algorithm && r.sweep.to_bits() == sweep.to_bits()).collect();
            let col = |f: fn(&RunRecord) -> f64| mean_se(&group.iter().map(|r| f(r)).collect::<Vec<_>>());
            let (loglik, loglik_se) = col(|r| r.loglik);
            let (test_r2, test_r2_se) = col(|r| r.test_r2);
            let (auroc, auroc_se) = col(|r| r.auroc);
            let (recovery, recovery_se) = col(|r| r.recovery);
            let (time_s, _) = col(|r| r.time_s);
            let (evals, _) = col(|r| r.evals as f64);
            MetricsRow {
                algorithm,
                sweep,
                loglik,
                test_r2,
                auroc,
                recovery,
                time_s,
                evals: evals.round() as u64,
                loglik_se,
                test_r2_se,
                auroc_se,
                recovery_se,
            }
        })
        .collect()
}

/// Runs every configured algorithm and sweep value on every iteration and averages the
/// results. Iterations run in parallel; the output does not depend on the thread count
/// (apart from wall times).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<MetricsRow>> {
    Ok(aggregate(&run_records(cfg)?))
}
