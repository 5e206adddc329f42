//! Greedy forward selection and its stochastic and distributed variants.
//!
//! Every selection step scans candidates in increasing index order and keeps the first
//! maximizer, so ties always go to the lowest index. This makes all three algorithms
//! deterministic given their [`RandomSource`] and keeps greedy 1-nice: dropping an element
//! greedy never picked does not change its output.

use rand::seq::index;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::RandomSource;
use crate::set_function::{Cursor, Oracle, SelectionTrace, SetFunction};

/// Greedy forward selection of exactly `k` elements from `candidates`.
pub fn greedy<F: SetFunction>(oracle: &Oracle<F>, candidates: &[usize], k: usize) -> Result<SelectionTrace> {
    oracle.ground_set().check_subset(candidates)?;
    check_k(k, candidates.len())?;
    Ok(greedy_clamped(oracle, candidates, k))
}

/// Greedy selecting `min(k, |candidates|)` elements; never fails.
pub fn greedy_clamped<F: SetFunction>(oracle: &Oracle<F>, candidates: &[usize], k: usize) -> SelectionTrace {
    let mut remaining = candidates.to_vec();
    remaining.sort_unstable();
    let mut cursor = oracle.cursor(&remaining);
    for _ in 0..k.min(candidates.len()) {
        let (pos, gain) = best_candidate(&mut cursor, &remaining);
        let chosen = remaining.remove(pos);
        cursor.select(chosen, gain);
    }
    cursor.into_trace()
}

/// Position in `pool` (ascending) of the largest gain, first one on ties. NaN gains never win.
fn best_candidate(cursor: &mut Cursor<'_>, pool: &[usize]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (pos, &j) in pool.iter().enumerate() {
        let g = cursor.gain(j);
        if g > best.1 {
            best = (pos, g);
        }
    }
    best
}

fn check_k(k: usize, available: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::config("sparsity k must be at least 1"));
    }
    if k > available {
        return Err(Error::config(format!("sparsity k = {k} exceeds the {available} available candidates")));
    }
    Ok(())
}

/// Subsample size `⌈d ln(1/δ) / k⌉`.
pub fn subsample_size(d: usize, k: usize, delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::config(format!("subsampling parameter delta = {delta} must lie in (0, 1)")));
    }
    if k == 0 {
        return Err(Error::config("sparsity k must be at least 1"));
    }
    let x = d as f64 * (1.0 / delta).ln() / k as f64;
    // ln(1/δ) for δ = e^{-m} is rarely exactly m in floating point
    let r = x.round();
    let c = if (x - r).abs() <= 1e-9 * x.max(1.0) { r } else { x.ceil() };
    Ok(c.max(1.0) as usize)
}

/// Draws `min(C, |remaining|)` elements of `remaining` uniformly without replacement,
/// returned in increasing order.
pub fn subsample<R: Rng + ?Sized>(remaining: &[usize], d: usize, k: usize, delta: f64, rng: &mut R) -> Result<Vec<usize>> {
    let c = subsample_size(d, k, delta)?;
    if remaining.is_empty() {
        return Err(Error::config("cannot subsample from an empty candidate set"));
    }
    let mut picked: Vec<usize> = if c >= remaining.len() {
        remaining.to_vec()
    } else {
        index::sample(rng, remaining.len(), c).into_iter().map(|i| remaining[i]).collect()
    };
    picked.sort_unstable();
    Ok(picked)
}

/// Stochastic greedy: each step maximizes the marginal gain over a fresh uniform subsample
/// of the not-yet-selected candidates.
pub fn stochastic_greedy<F: SetFunction>(
    oracle: &Oracle<F>,
    candidates: &[usize],
    k: usize,
    delta: f64,
    source: RandomSource,
) -> Result<SelectionTrace> {
    oracle.ground_set().check_subset(candidates)?;
    check_k(k, candidates.len())?;
    subsample_size(candidates.len(), k, delta)?;
    let d = candidates.len();
    let mut rng = source.rng();
    let mut remaining = candidates.to_vec();
    remaining.sort_unstable();
    let mut cursor = oracle.cursor(&remaining);
    for _ in 0..k {
        let pool = subsample(&remaining, d, k, delta, &mut rng)?;
        let (pos, gain) = best_candidate(&mut cursor, &pool);
        let chosen = pool[pos];
        remaining.retain(|&e| e != chosen);
        cursor.select(chosen, gain);
    }
    Ok(cursor.into_trace())
}

/// How candidates are split across solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PartitionScheme {
    /// Each candidate independently picks a part uniformly at random. Parts may be empty.
    #[default]
    Uniform,
    /// Random shuffle dealt round-robin; part sizes differ by at most one.
    Balanced,
}

impl std::str::FromStr for PartitionScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(PartitionScheme::Uniform),
            "balanced" => Ok(PartitionScheme::Balanced),
            other => Err(Error::config(format!("unknown partition scheme `{other}`"))),
        }
    }
}

/// Uniform random partition of `candidates` into `l` parts.
pub fn partition_uniform(candidates: &[usize], l: usize, source: RandomSource) -> Result<Vec<Vec<usize>>> {
    partition(candidates, l, PartitionScheme::Uniform, source)
}

pub fn partition(candidates: &[usize], l: usize, scheme: PartitionScheme, source: RandomSource) -> Result<Vec<Vec<usize>>> {
    if l == 0 {
        return Err(Error::config("number of parts l must be at least 1"));
    }
    if l > candidates.len() {
        return Err(Error::config(format!("cannot split {} candidates into {l} parts", candidates.len())));
    }
    let mut rng = source.rng();
    let mut parts = vec![Vec::new(); l];
    match scheme {
        PartitionScheme::Uniform => {
            for &c in candidates {
                parts[rng.random_range(0..l)].push(c);
            }
        }
        PartitionScheme::Balanced => {
            let mut shuffled = candidates.to_vec();
            shuffled.shuffle(&mut rng);
            for (i, c) in shuffled.into_iter().enumerate() {
                parts[i % l].push(c);
            }
            for p in &mut parts {
                p.sort_unstable();
            }
        }
    }
    Ok(parts)
}

/// Output of a distributed run.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributedResult {
    pub parts: Vec<Vec<usize>>,
    /// Local solutions `G_j`, one per part (empty for empty parts).
    pub locals: Vec<SelectionTrace>,
    /// Selection over the union of the local solutions.
    pub aggregated: SelectionTrace,
    /// Index of the best local solution, `None` when every part is empty.
    pub best_local: Option<usize>,
    /// The returned set: aggregated or best local, whichever is better.
    pub selected: Vec<usize>,
    pub value: f64,
    pub chose_aggregate: bool,
}

impl DistributedResult {
    pub fn best_local_value(&self) -> f64 {
        self.best_local.map_or(0.0, |j| self.locals[j].value())
    }
}

/// Distributed greedy with uniform random partitioning.
pub fn distributed_greedy<F: SetFunction>(
    oracle: &Oracle<F>,
    candidates: &[usize],
    l: usize,
    k: usize,
    source: RandomSource,
) -> Result<DistributedResult> {
    distributed_with(oracle, candidates, l, k, PartitionScheme::Uniform, source, greedy_clamped)
}

/// Distributed selection with a pluggable local solver (greedy, OMP, ...).
///
/// The local solver must select `min(k, |pool|)` elements and is also used for the
/// aggregation round.
pub fn distributed_with<F, S>(
    oracle: &Oracle<F>,
    candidates: &[usize],
    l: usize,
    k: usize,
    scheme: PartitionScheme,
    source: RandomSource,
    local: S,
) -> Result<DistributedResult>
where
    F: SetFunction,
    S: Fn(&Oracle<F>, &[usize], usize) -> SelectionTrace + Sync,
{
    if candidates.is_empty() {
        return Err(Error::config("distributed selection needs a nonempty candidate set"));
    }
    if k == 0 {
        return Err(Error::config("sparsity k must be at least 1"));
    }
    oracle.ground_set().check_subset(candidates)?;
    let parts = partition(candidates, l, scheme, source)?;
    Ok(distributed_on_parts(oracle, parts, k, local))
}

/// Runs the local solves on a given partition, then the aggregation round.
pub fn distributed_on_parts<F, S>(oracle: &Oracle<F>, parts: Vec<Vec<usize>>, k: usize, local: S) -> DistributedResult
where
    F: SetFunction,
    S: Fn(&Oracle<F>, &[usize], usize) -> SelectionTrace + Sync,
{
    let locals: Vec<SelectionTrace> = parts.par_iter().map(|part| local(oracle, part, k)).collect();

    let mut pool: Vec<usize> = locals.iter().flat_map(|t| t.selected()).collect();
    pool.sort_unstable();
    let aggregated = local(oracle, &pool, k);

    let mut best_local = None;
    let mut best_value = f64::NEG_INFINITY;
    for (j, t) in locals.iter().enumerate() {
        if !t.is_empty() && t.value() > best_value {
            best_value = t.value();
            best_local = Some(j);
        }
    }

    let chose_aggregate = best_local.is_none() || aggregated.value() >= best_value;
    let (selected, value) = if chose_aggregate {
        (aggregated.selected(), aggregated.value())
    } else {
        (locals[best_local.unwrap()].selected(), best_value)
    };
    DistributedResult { parts, locals, aggregated, best_local, selected, value, chose_aggregate }
}
