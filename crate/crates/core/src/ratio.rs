//! Exact submodularity and subadditivity ratios, and the exhaustive optimum, by enumeration.
//!
//! Only usable on small ground sets. Every routine visits candidate sets in a fixed
//! lexicographic order (by size, then by elements) and keeps the first strict minimizer,
//! so witnesses are reproducible.

use std::collections::HashMap;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg::{binomial, ENUMERATION_BUDGET};
use crate::set_function::{Oracle, SetFunction, TAU_EQ};

/// Largest ground set the γ enumerations accept.
pub const D_MAX_BRUTEFORCE: usize = 14;

/// Which family of sets a ratio was minimized over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RatioScope {
    /// `γ_{L,S}` for one pair.
    Pair,
    /// `γ_{U,k}`: `L ⊆ U`, `1 ≤ |S| ≤ k`.
    SetVsK { k: usize },
    /// `ν_S` for one set.
    Set,
    /// `γ` with `|L| ≤ k, |S| ≤ k` over the whole ground set, or `ν_k`.
    KUniform { k: usize },
}

/// A brute-forced ratio together with the sets that attain it.
///
/// For γ the witness is `(L, S)`; for ν it is the partition `(A, B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub value: f64,
    pub witness: (Vec<usize>, Vec<usize>),
    pub scope: RatioScope,
}

impl RatioReport {
    pub fn to_lines(&self, prefix: &str) -> Vec<String> {
        vec![
            format!("{prefix}.value={}", self.value),
            format!("{prefix}.witness_first={}", crate::regression::format_support(&self.witness.0)),
            format!("{prefix}.witness_second={}", crate::regression::format_support(&self.witness.1)),
        ]
    }
}

/// `Σ gains / joint gain`, with `0/0 = 1` and `x/0 = +∞`.
pub(crate) fn gain_ratio(singleton_gains: f64, joint_gain: f64) -> f64 {
    if joint_gain <= TAU_EQ {
        if singleton_gains > TAU_EQ {
            f64::INFINITY
        } else {
            1.0
        }
    } else {
        singleton_gains / joint_gain
    }
}

/// Memoized oracle access keyed by bitmask.
struct Memo<'a, F> {
    oracle: &'a Oracle<F>,
    cache: HashMap<u64, f64>,
}

impl<'a, F: SetFunction> Memo<'a, F> {
    fn new(oracle: &'a Oracle<F>) -> Self {
        Memo { oracle, cache: HashMap::new() }
    }

    fn value(&mut self, mask: u64) -> f64 {
        if let Some(&v) = self.cache.get(&mask) {
            return v;
        }
        let set: Vec<usize> = (0..64).filter(|b| mask >> b & 1 == 1).collect();
        let v = self.oracle.value_unchecked(&set);
        self.cache.insert(mask, v);
        v
    }
}

fn mask_of(set: &[usize]) -> u64 {
    set.iter().fold(0u64, |m, &e| m | 1 << e)
}

fn check_small<F: SetFunction>(oracle: &Oracle<F>, limit: usize) -> Result<()> {
    let d = oracle.ground_size();
    if d > limit {
        return Err(Error::resource(format!("exhaustive ratio over a ground set of size {d}"), limit as u64));
    }
    Ok(())
}

/// `γ_{L,S} = Σ_{j∈S} [f(L∪{j}) − f(L)] / (f(L∪S) − f(L))`.
pub fn submodularity_ratio_pair<F: SetFunction>(oracle: &Oracle<F>, l: &[usize], s: &[usize]) -> Result<f64> {
    let ground = oracle.ground_set();
    ground.check_subset(l)?;
    ground.check_subset(s)?;
    if s.is_empty() {
        return Err(Error::domain("S must be nonempty"));
    }
    if s.iter().any(|j| l.contains(j)) {
        return Err(Error::domain("L and S must be disjoint"));
    }
    let base = oracle.value_unchecked(l);
    let mut with = l.to_vec();
    let mut singles = 0.0;
    for &j in s {
        with.push(j);
        singles += oracle.value_unchecked(&with) - base;
        with.pop();
    }
    with.extend_from_slice(s);
    let joint = oracle.value_unchecked(&with) - base;
    Ok(gain_ratio(singles, joint))
}

/// Subsets of `pool` of size `0..=max`, by size then lexicographically.
fn subsets_up_to(pool: &[usize], max: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0..=max.min(pool.len())).flat_map(move |size| pool.iter().copied().combinations(size))
}

fn min_gamma<F: SetFunction>(
    oracle: &Oracle<F>,
    ls: impl Iterator<Item = Vec<usize>>,
    k: usize,
    scope: RatioScope,
) -> RatioReport {
    let d = oracle.ground_size();
    let mut memo = Memo::new(oracle);
    let mut best = RatioReport { value: f64::INFINITY, witness: (Vec::new(), Vec::new()), scope };
    for l in ls {
        let lmask = mask_of(&l);
        let base = memo.value(lmask);
        let complement: Vec<usize> = (0..d).filter(|e| lmask >> e & 1 == 0).collect();
        let gains: Vec<f64> = complement.iter().map(|&j| memo.value(lmask | 1 << j) - base).collect();
        for size in 1..=k.min(complement.len()) {
            for pos in (0..complement.len()).combinations(size) {
                let singles: f64 = pos.iter().map(|&p| gains[p]).sum();
                let smask = pos.iter().fold(0u64, |m, &p| m | 1 << complement[p]);
                let joint = memo.value(lmask | smask) - base;
                let r = gain_ratio(singles, joint);
                if r < best.value {
                    best.value = r;
                    best.witness = (l.clone(), pos.iter().map(|&p| complement[p]).collect());
                }
            }
        }
    }
    best
}

/// `γ_{U,k}`: minimum of `γ_{L,S}` over `L ⊆ U`, `S ∩ L = ∅`, `1 ≤ |S| ≤ k`.
/// Infinite pairs are skipped; the value is `+∞` only if no finite pair exists.
pub fn submodularity_ratio_uk<F: SetFunction>(oracle: &Oracle<F>, u: &[usize], k: usize) -> Result<RatioReport> {
    check_small(oracle, D_MAX_BRUTEFORCE)?;
    oracle.ground_set().check_subset(u)?;
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    let mut u = u.to_vec();
    u.sort_unstable();
    Ok(min_gamma(oracle, subsets_up_to(&u, u.len()), k, RatioScope::SetVsK { k }))
}

/// Uniform γ over every `L` with `|L| ≤ max_l` and every `S` with `1 ≤ |S| ≤ k`.
///
/// With `max_l = k` this lower-bounds `γ_{U,k}` for every selection `U` of size at most `k`,
/// which is what the stochastic and distributed guarantees need when `U` is random.
pub fn submodularity_ratio_uniform<F: SetFunction>(oracle: &Oracle<F>, max_l: usize, k: usize) -> Result<RatioReport> {
    check_small(oracle, D_MAX_BRUTEFORCE)?;
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    let all = oracle.ground_set().elements();
    Ok(min_gamma(oracle, subsets_up_to(&all, max_l), k, RatioScope::KUniform { k }))
}

/// `ν_S`: minimum of `(f(A) + f(B)) / f(S)` over all partitions of `S`, including `(∅, S)`.
pub fn subadditivity_ratio_set<F: SetFunction>(oracle: &Oracle<F>, s: &[usize]) -> Result<RatioReport> {
    oracle.ground_set().check_subset(s)?;
    if s.len() > D_MAX_BRUTEFORCE {
        return Err(Error::resource(format!("partitions of a set of size {}", s.len()), D_MAX_BRUTEFORCE as u64));
    }
    let mut memo = Memo::new(oracle);
    nu_of_set(&mut memo, s)?.ok_or_else(|| {
        Error::Degenerate(format!("f(S) <= {TAU_EQ:e} for S = {s:?}; subadditivity ratio undefined"))
    })
}

fn nu_of_set<F: SetFunction>(memo: &mut Memo<'_, F>, s: &[usize]) -> Result<Option<RatioReport>> {
    let mut sorted = s.to_vec();
    sorted.sort_unstable();
    let full = memo.value(mask_of(&sorted));
    if full <= TAU_EQ {
        return Ok(None);
    }
    let mut best = RatioReport { value: f64::INFINITY, witness: (Vec::new(), sorted.clone()), scope: RatioScope::Set };
    for bits in 0u64..(1 << sorted.len()) {
        let (a, b): (Vec<usize>, Vec<usize>) = sorted.iter().enumerate().partition_map(|(i, &e)| {
            if bits >> i & 1 == 1 {
                itertools::Either::Left(e)
            } else {
                itertools::Either::Right(e)
            }
        });
        let r = (memo.value(mask_of(&a)) + memo.value(mask_of(&b))) / full;
        if r < best.value {
            best.value = r;
            best.witness = (a, b);
        }
    }
    Ok(Some(best))
}

/// `ν_k`: minimum of `ν_S` over all `|S| = k`. Sets with `f(S) ≈ 0` carry no information and
/// are skipped.
pub fn subadditivity_ratio_k<F: SetFunction>(oracle: &Oracle<F>, k: usize) -> Result<RatioReport> {
    subadditivity_ratio_k_with_budget(oracle, k, ENUMERATION_BUDGET)
}

pub fn subadditivity_ratio_k_with_budget<F: SetFunction>(oracle: &Oracle<F>, k: usize, budget: u64) -> Result<RatioReport> {
    let d = oracle.ground_size();
    if k == 0 || k > d {
        return Err(Error::domain(format!("k = {k} must lie in 1..={d}")));
    }
    check_small(oracle, 64)?;
    if k > D_MAX_BRUTEFORCE {
        return Err(Error::resource(format!("partitions of sets of size {k}"), D_MAX_BRUTEFORCE as u64));
    }
    let count = binomial(d, k);
    if count > budget {
        return Err(Error::resource(format!("{count} sets of size {k}"), budget));
    }
    let mut memo = Memo::new(oracle);
    let mut best = RatioReport { value: f64::INFINITY, witness: (Vec::new(), Vec::new()), scope: RatioScope::KUniform { k } };
    for s in (0..d).combinations(k) {
        if let Some(r) = nu_of_set(&mut memo, &s)? {
            if r.value < best.value {
                best.value = r.value;
                best.witness = r.witness;
            }
        }
    }
    Ok(best)
}

/// Best set of size `min(k, d)` (first in lexicographic order among ties) and its value.
pub fn brute_force_opt<F: SetFunction>(oracle: &Oracle<F>, k: usize) -> Result<(Vec<usize>, f64)> {
    brute_force_opt_with_budget(oracle, k, ENUMERATION_BUDGET)
}

pub fn brute_force_opt_with_budget<F: SetFunction>(oracle: &Oracle<F>, k: usize, budget: u64) -> Result<(Vec<usize>, f64)> {
    let d = oracle.ground_size();
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    let k = k.min(d);
    let count = binomial(d, k);
    if count > budget {
        return Err(Error::resource(format!("{count} candidate sets of size {k}"), budget));
    }
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    for s in (0..d).combinations(k) {
        let v = oracle.value_unchecked(&s);
        if v > best.1 {
            best = (s, v);
        }
    }
    Ok(best)
}
