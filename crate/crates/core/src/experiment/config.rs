use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::greedy::PartitionScheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    GreedyFs,
    Omp,
    StochasticGreedy,
    DistributedFs,
    DistributedOmp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::GreedyFs, Algorithm::Omp, Algorithm::StochasticGreedy, Algorithm::DistributedFs, Algorithm::DistributedOmp];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::GreedyFs => "greedy-fs",
            Algorithm::Omp => "omp",
            Algorithm::StochasticGreedy => "stochastic-greedy",
            Algorithm::DistributedFs => "distributed-fs",
            Algorithm::DistributedOmp => "distributed-omp",
        }
    }

    pub fn is_omp(self) -> bool {
        matches!(self, Algorithm::Omp | Algorithm::DistributedOmp)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::config(format!("unknown algorithm `{s}`")))
    }
}

/// Which objective the experiment maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Model {
    /// R² of least squares on normalized data.
    #[default]
    Regression,
    /// Logistic log-likelihood with `±1` labels.
    Logistic,
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regression" => Ok(Model::Regression),
            "logistic" => Ok(Model::Logistic),
            other => Err(Error::config(format!("unknown model `{other}`"))),
        }
    }
}

/// The swept parameter: sparsity `k`, or the stochastic-greedy `δ` at a fixed `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sweep {
    #[default]
    K,
    Delta,
}

impl FromStr for Sweep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "k" => Ok(Sweep::K),
            "delta" => Ok(Sweep::Delta),
            other => Err(Error::config(format!("unknown sweep `{other}`"))),
        }
    }
}

/// Declarative description of an experiment.
///
/// Parsed from flat `key = value` lines; `#` starts a comment. Lists are comma separated
/// and `k` also accepts inclusive ranges such as `1..=15`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub d: usize,
    pub s: usize,
    pub alpha: f64,
    /// Multiplier on the default noise variance `0.01‖Xβ‖`.
    pub noise: f64,
    pub l: usize,
    pub k: Vec<usize>,
    pub delta: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub seed: u64,
    pub iterations: usize,
    /// Data file replacing the synthetic generator. Rows are split into train and test halves.
    pub input: Option<PathBuf>,
    pub model: Model,
    pub sweep: Sweep,
    pub partition: PartitionScheme,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 800,
            d: 1000,
            s: 100,
            alpha: 0.5,
            noise: 1.0,
            l: 10,
            k: (1..=15).collect(),
            delta: vec![0.1],
            algorithms: Algorithm::ALL.to_vec(),
            seed: 0,
            iterations: 10,
            input: None,
            model: Model::Regression,
            sweep: Sweep::K,
            partition: PartitionScheme::Uniform,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::config(format!("`{key}`: cannot parse `{v}`")))
}

fn parse_k_list(v: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = item.split_once("..=") {
            let (a, b): (usize, usize) = (parse_num("k", a.trim())?, parse_num("k", b.trim())?);
            if a > b {
                return Err(Error::config(format!("empty range `{item}`")));
            }
            out.extend(a..=b);
        } else {
            out.push(parse_num("k", item)?);
        }
    }
    Ok(out)
}

impl ExperimentConfig {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.as_ref().display())))?;
        let mut cfg: ExperimentConfig = text.parse()?;
        if let (Some(input), Some(dir)) = (&cfg.input, path.as_ref().parent()) {
            if input.is_relative() {
                cfg.input = Some(dir.join(input));
            }
        }
        Ok(cfg)
    }

    /// Checks ranges and cross-field consistency.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::config(m));
        if self.n < 2 {
            return fail(format!("n = {} must be at least 2", self.n));
        }
        if self.d == 0 {
            return fail("d must be positive".into());
        }
        if self.s == 0 || self.s > self.d {
            return fail(format!("s = {} must lie in 1..={}", self.s, self.d));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return fail(format!("alpha = {} must lie in (0, 1)", self.alpha));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return fail(format!("noise = {} must be finite and nonnegative", self.noise));
        }
        if self.iterations == 0 {
            return fail("iterations must be at least 1".into());
        }
        if self.k.is_empty() || self.k.iter().any(|&k| k == 0) {
            return fail("k values must be positive".into());
        }
        if self.delta.is_empty() || self.delta.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
            return fail("delta values must lie in (0, 1)".into());
        }
        if self.algorithms.is_empty() {
            return fail("no algorithms selected".into());
        }
        if self.l == 0 {
            return fail("l must be positive".into());
        }
        if self.sweep == Sweep::Delta && self.k.len() != 1 {
            return fail("a delta sweep needs exactly one k".into());
        }
        if self.model == Model::Logistic {
            if let Some(a) = self.algorithms.iter().find(|a| a.is_omp()) {
                return fail(format!("`{a}` needs model = regression"));
            }
        }
        if self.input.is_none() {
            self.validate_dimensions(self.d)?;
        }
        Ok(())
    }

    /// Checks `k` and `l` against the number of features actually available.
    pub fn validate_dimensions(&self, d: usize) -> Result<()> {
        if let Some(&k) = self.k.iter().find(|&&k| k > d) {
            return Err(Error::config(format!("k = {k} exceeds the {d} available features")));
        }
        let distributed = self.algorithms.iter().any(|a| matches!(a, Algorithm::DistributedFs | Algorithm::DistributedOmp));
        if distributed && self.l > d {
            return Err(Error::config(format!("l = {} exceeds the {d} available features", self.l)));
        }
        Ok(())
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_owned()) {
                return Err(Error::config(format!("line {}: `{key}` given twice", lineno + 1)));
            }
            match key {
                "n" => cfg.n = parse_num(key, value)?,
                "d" => cfg.d = parse_num(key, value)?,
                "s" => cfg.s = parse_num(key, value)?,
                "alpha" => cfg.alpha = parse_num(key, value)?,
                "noise" => cfg.noise = parse_num(key, value)?,
                "l" => cfg.l = parse_num(key, value)?,
                "k" => cfg.k = parse_k_list(value)?,
                "delta" => {
                    cfg.delta = value.split(',').map(|v| parse_num(key, v.trim())).collect::<Result<_>>()?;
                }
                "algorithms" => {
                    cfg.algorithms = value.split(',').map(|v| v.trim().parse()).collect::<Result<_>>()?;
                }
                "seed" => cfg.seed = parse_num(key, value)?,
                "iterations" => cfg.iterations = parse_num(key, value)?,
                "input" => cfg.input = Some(PathBuf::from(value)),
                "model" => cfg.model = value.parse()?,
                "sweep" => cfg.sweep = value.parse()?,
                "partition" => cfg.partition = value.parse()?,
                other => return Err(Error::config(format!("line {}: unknown key `{other}`", lineno + 1))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
