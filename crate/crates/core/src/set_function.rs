//! Set functions over a finite ground set, the counting evaluation oracle and selection traces.
//!
//! A [`SetFunction`] maps subsets of `0..d` to reals. It is wrapped in an [`Oracle`] which
//! subtracts the raw value of the empty set once at construction (so `f(∅) = 0` exactly),
//! validates subsets and counts evaluations. Algorithms walk the ground set through a
//! [`Cursor`], which lets objectives with cheap rank-one updates (the R² objective) avoid
//! recomputing `f(S ∪ {j})` from scratch for every candidate.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Monotonicity slack, relative to `max(1, |f(T)|)`.
pub const TAU_MONO: f64 = 1e-9;
/// Absolute tolerance for value equality and for zero denominators in ratio computations.
pub const TAU_EQ: f64 = 1e-9;

/// The index set `{0, .., d-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundSet {
    size: usize,
}

impl GroundSet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::domain("ground set must contain at least one element"));
        }
        Ok(GroundSet { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> Vec<usize> {
        (0..self.size).collect()
    }

    /// Checks that every index is `< d` and that no index repeats.
    pub fn check_subset(&self, set: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.size];
        for &e in set {
            if e >= self.size {
                return Err(Error::domain(format!(
                    "element {e} out of range for ground set of size {}",
                    self.size
                )));
            }
            if seen[e] {
                return Err(Error::domain(format!("duplicate element {e}")));
            }
            seen[e] = true;
        }
        Ok(())
    }
}

/// A raw (not necessarily normalized) set function.
///
/// Implementations must be deterministic: evaluating the same subset in the same order twice
/// returns bit-identical values.
pub trait SetFunction: Send + Sync {
    fn ground_size(&self) -> usize;

    fn raw_value(&self, set: &[usize]) -> f64;

    /// Incremental evaluation state starting at the empty set, restricted to `candidates`.
    ///
    /// The default recomputes `raw_value` for every gain query.
    fn incremental<'a>(&'a self, candidates: &[usize]) -> Box<dyn Incremental + 'a> {
        let _ = candidates;
        Box::new(Recompute::new(self))
    }
}

/// Incremental evaluation of `raw(S ∪ {j}) - raw(S)` for a growing set `S`.
pub trait Incremental {
    /// Raw value of the current set.
    fn value(&self) -> f64;

    /// `raw(S ∪ {j}) - raw(S)`.
    fn gain(&mut self, j: usize) -> f64;

    /// Adds `j` to the current set. Returns `true` when `j` was degenerate and could not
    /// contribute (e.g. a column already in the span of the selected ones).
    fn push(&mut self, j: usize) -> bool;
}

/// Generic [`Incremental`] that calls [`SetFunction::raw_value`] for every query.
pub struct Recompute<'a, F: ?Sized> {
    function: &'a F,
    selected: Vec<usize>,
    value: f64,
    pending: HashMap<usize, f64>,
}

impl<'a, F: SetFunction + ?Sized> Recompute<'a, F> {
    pub fn new(function: &'a F) -> Self {
        Recompute { value: function.raw_value(&[]), function, selected: Vec::new(), pending: HashMap::new() }
    }

    fn raw_with(&self, j: usize) -> f64 {
        let mut set = self.selected.clone();
        set.push(j);
        self.function.raw_value(&set)
    }
}

impl<F: SetFunction + ?Sized> Incremental for Recompute<'_, F> {
    fn value(&self) -> f64 {
        self.value
    }

    fn gain(&mut self, j: usize) -> f64 {
        let v = self.raw_with(j);
        self.pending.insert(j, v);
        v - self.value
    }

    fn push(&mut self, j: usize) -> bool {
        let v = match self.pending.get(&j) {
            Some(&v) => v,
            None => self.raw_with(j),
        };
        self.selected.push(j);
        self.value = v;
        self.pending.clear();
        false
    }
}

/// Normalized, validating, evaluation-counting wrapper around a [`SetFunction`].
///
/// Safe to share across threads; the counter is atomic.
pub struct Oracle<F> {
    function: F,
    ground: GroundSet,
    offset: f64,
    evaluations: AtomicU64,
}

impl<F: SetFunction> Oracle<F> {
    pub fn new(function: F) -> Result<Self> {
        let ground = GroundSet::new(function.ground_size())?;
        let offset = function.raw_value(&[]);
        if !offset.is_finite() {
            return Err(Error::Degenerate(format!("raw value of the empty set is {offset}")));
        }
        Ok(Oracle { function, ground, offset, evaluations: AtomicU64::new(0) })
    }

    pub fn function(&self) -> &F {
        &self.function
    }

    pub fn ground_set(&self) -> GroundSet {
        self.ground
    }

    pub fn ground_size(&self) -> usize {
        self.ground.size()
    }

    /// Raw value subtracted from every evaluation.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    pub fn reset_evaluations(&self) {
        self.evaluations.store(0, Ordering::Relaxed);
    }

    /// `f(S)`; counts one evaluation.
    pub fn evaluate(&self, set: &[usize]) -> Result<f64> {
        self.ground.check_subset(set)?;
        Ok(self.value_unchecked(set))
    }

    /// `f(S ∪ {j}) - f(S)`. Counts one evaluation when `cached_base = Some(f(S))`, two otherwise.
    pub fn marginal_gain(&self, set: &[usize], j: usize, cached_base: Option<f64>) -> Result<f64> {
        self.ground.check_subset(set)?;
        if j >= self.ground.size() {
            return Err(Error::domain(format!("element {j} out of range")));
        }
        if set.contains(&j) {
            return Err(Error::domain(format!("element {j} already in the set")));
        }
        let base = match cached_base {
            Some(v) => v,
            None => self.value_unchecked(set),
        };
        let mut with = set.to_vec();
        with.push(j);
        Ok(self.value_unchecked(&with) - base)
    }

    /// Starts an incremental walk at `∅` over the given candidates.
    pub fn cursor(&self, candidates: &[usize]) -> Cursor<'_> {
        Cursor {
            counter: &self.evaluations,
            offset: self.offset,
            inner: self.function.incremental(candidates),
            steps: Vec::new(),
            step_evaluations: 0,
        }
    }

    /// Charges `n` evaluations for work done outside [`Oracle::evaluate`] (e.g. an OMP refit).
    pub fn charge(&self, n: u64) {
        self.evaluations.fetch_add(n, Ordering::Relaxed);
    }

    pub(crate) fn value_unchecked(&self, set: &[usize]) -> f64 {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        if set.is_empty() {
            return 0.0;
        }
        self.function.raw_value(set) - self.offset
    }
}

/// Incremental walk used by the greedy family. Each [`Cursor::gain`] costs one evaluation.
pub struct Cursor<'a> {
    counter: &'a AtomicU64,
    offset: f64,
    inner: Box<dyn Incremental + 'a>,
    steps: Vec<Step>,
    step_evaluations: u64,
}

impl Cursor<'_> {
    /// Normalized value of the current set.
    pub fn value(&self) -> f64 {
        if self.steps.is_empty() {
            0.0
        } else {
            self.inner.value() - self.offset
        }
    }

    pub fn gain(&mut self, j: usize) -> f64 {
        self.counter.fetch_add(1, Ordering::Relaxed);
        self.step_evaluations += 1;
        self.inner.gain(j)
    }

    /// Commits `j` with its previously computed gain and closes the current step.
    pub fn select(&mut self, j: usize, gain: f64) {
        let degenerate = self.inner.push(j);
        let value = self.inner.value() - self.offset;
        self.steps.push(Step { element: j, gain, value, evaluations: self.step_evaluations, degenerate });
        self.step_evaluations = 0;
    }

    pub fn selected(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.element).collect()
    }

    pub fn into_trace(self) -> SelectionTrace {
        SelectionTrace { steps: self.steps }
    }
}

/// One greedy pick.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub element: usize,
    pub gain: f64,
    /// `f` of all elements selected so far, including this one.
    pub value: f64,
    /// Oracle evaluations spent choosing this element.
    pub evaluations: u64,
    /// Element could not extend the selection (numerically dependent column).
    pub degenerate: bool,
}

/// Ordered record of a selection run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelectionTrace {
    pub steps: Vec<Step>,
}

impl SelectionTrace {
    pub fn selected(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.element).collect()
    }

    pub fn value(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.value)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn evaluations(&self) -> u64 {
        self.steps.iter().map(|s| s.evaluations).sum()
    }

    /// Values after each step, in order.
    pub fn values(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.value).collect()
    }
}

/// `f(S) = Σ_{j ∈ S} w_j`.
#[derive(Debug, Clone)]
pub struct Modular {
    weights: Vec<f64>,
}

impl Modular {
    pub fn new(weights: Vec<f64>) -> Self {
        Modular { weights }
    }

    /// `f(S) = |S|`.
    pub fn cardinality(d: usize) -> Self {
        Modular { weights: vec![1.0; d] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl SetFunction for Modular {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn raw_value(&self, set: &[usize]) -> f64 {
        set.iter().map(|&j| self.weights[j]).sum()
    }
}

/// Coverage: element `j` covers a list of universe items; `f(S) = |∪_{j ∈ S} items_j|`.
#[derive(Debug, Clone)]
pub struct Coverage {
    sets: Vec<Vec<usize>>,
    universe: usize,
}

impl Coverage {
    pub fn new(sets: Vec<Vec<usize>>) -> Self {
        let universe = sets.iter().flatten().map(|&u| u + 1).max().unwrap_or(0);
        Coverage { sets, universe }
    }
}

impl SetFunction for Coverage {
    fn ground_size(&self) -> usize {
        self.sets.len()
    }

    fn raw_value(&self, set: &[usize]) -> f64 {
        let mut covered = vec![false; self.universe];
        let mut count = 0usize;
        for &j in set {
            for &u in &self.sets[j] {
                if !covered[u] {
                    covered[u] = true;
                    count += 1;
                }
            }
        }
        count as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Raw function with a nonzero value at the empty set.
    struct Shifted;

    impl SetFunction for Shifted {
        fn ground_size(&self) -> usize {
            3
        }
        fn raw_value(&self, set: &[usize]) -> f64 {
            10.0 + set.len() as f64
        }
    }

    #[test]
    fn modular_evaluate() {
        let oracle = Oracle::new(Modular::new(vec![5.0, 3.0, 1.0, 4.0])).unwrap();
        assert_eq!(oracle.evaluate(&[0, 3]).unwrap(), 9.0);
        assert_eq!(oracle.evaluate(&[]).unwrap(), 0.0);
        assert_eq!(oracle.evaluations(), 2);
    }

    #[test]
    fn normalization_subtracts_empty_value() {
        let oracle = Oracle::new(Shifted).unwrap();
        assert_eq!(oracle.offset(), 10.0);
        assert_eq!(oracle.evaluate(&[]).unwrap(), 0.0);
        assert_eq!(oracle.evaluate(&[1, 2]).unwrap(), 2.0);
    }

    #[test]
    fn subset_validation() {
        let oracle = Oracle::new(Modular::cardinality(4)).unwrap();
        assert!(matches!(oracle.evaluate(&[4]), Err(Error::Domain(_))));
        assert!(matches!(oracle.evaluate(&[1, 1]), Err(Error::Domain(_))));
        assert_eq!(oracle.evaluations(), 0);
        assert!(GroundSet::new(0).is_err());
    }

    #[test]
    fn marginal_gain_counts() {
        let oracle = Oracle::new(Modular::new(vec![5.0, 3.0, 1.0, 4.0])).unwrap();
        assert_eq!(oracle.marginal_gain(&[0], 1, None).unwrap(), 3.0);
        assert_eq!(oracle.evaluations(), 2);
        assert_eq!(oracle.marginal_gain(&[0], 1, Some(5.0)).unwrap(), 3.0);
        assert_eq!(oracle.evaluations(), 3);
        assert!(matches!(oracle.marginal_gain(&[0], 0, None), Err(Error::Domain(_))));
    }

    #[test]
    fn coverage_counts_union() {
        let f = Coverage::new(vec![vec![0, 1], vec![1, 2], vec![5]]);
        assert_eq!(f.raw_value(&[0, 1]), 3.0);
        assert_eq!(f.raw_value(&[0, 1, 2]), 4.0);
        assert_eq!(f.raw_value(&[]), 0.0);
    }

    #[test]
    fn cursor_trace_matches_evaluate() {
        let oracle = Oracle::new(Shifted).unwrap();
        let mut cursor = oracle.cursor(&[0, 1, 2]);
        let g = cursor.gain(2);
        cursor.select(2, g);
        let g = cursor.gain(0);
        cursor.select(0, g);
        let trace = cursor.into_trace();
        assert_eq!(trace.selected(), vec![2, 0]);
        assert_eq!(trace.value(), oracle.evaluate(&[2, 0]).unwrap());
        assert_eq!(trace.evaluations(), 2);
    }
}
