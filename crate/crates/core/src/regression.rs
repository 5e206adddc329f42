//! Sparse linear regression as set-function maximization.
//!
//! `f(S) = ‖P_S y‖²` is the squared norm of the projection of the (unit) response onto the
//! span of the selected (unit) columns, i.e. the R² of the least-squares fit on `S`.
//!
//! Everything is computed from the Gram matrix `C = XᵀX` and `b = Xᵀy`. Selecting a column
//! appends one row to the Cholesky factor `L` of `C_SS`; for every candidate `j` we keep
//! `w_j = L⁻¹ C_{S,j}` up to date, so the gain
//!
//! ```text
//! f(S ∪ {j}) − f(S) = (b_j − w_j·z)² / (C_jj − ‖w_j‖²),   z = L⁻¹ b_S
//! ```
//!
//! costs O(1) per candidate and each selection O(|S|·d).

use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::data::read_table_path;
use crate::error::{Error, Result};
use crate::linalg::{self, principal_submatrix, symmetric_extremes, ENUMERATION_BUDGET};
use crate::set_function::{Incremental, Oracle, SelectionTrace, SetFunction, Step};

pub use crate::linalg::SparseEigenBounds;

/// Schur complements `C_jj − ‖w_j‖²` below this are treated as rank deficient.
pub const PIVOT_TOL: f64 = 1e-10;

/// Design matrix, response and their Gram quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionInstance {
    x: DMatrix<f64>,
    y: DVector<f64>,
    gram: DMatrix<f64>,
    xty: DVector<f64>,
}

impl RegressionInstance {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::domain(format!("design has {} rows but response has {} entries", x.nrows(), y.len())));
        }
        if x.ncols() == 0 || x.nrows() == 0 {
            return Err(Error::domain("design matrix must be nonempty"));
        }
        let gram = x.tr_mul(&x);
        let xty = x.tr_mul(&y);
        Ok(RegressionInstance { x, y, gram, xty })
    }

    /// Loads a CSV table whose last column is the response.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let t = read_table_path(path)?;
        RegressionInstance::new(t.features, t.response)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    /// `C = XᵀX`.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// `Xᵀy`.
    pub fn xty(&self) -> &DVector<f64> {
        &self.xty
    }

    /// Scales every column and the response to unit Euclidean norm. Vectors already within
    /// 1e-12 of unit norm are left untouched, so normalizing twice is a no-op.
    pub fn normalize(mut self) -> Result<Self> {
        let mut changed = false;
        for j in 0..self.d() {
            let norm = self.x.column(j).norm();
            if norm == 0.0 || !norm.is_finite() {
                return Err(Error::Degenerate(format!("column {j} has norm {norm}")));
            }
            if (norm - 1.0).abs() > 1e-12 {
                self.x.column_mut(j).unscale_mut(norm);
                changed = true;
            }
        }
        let norm = self.y.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Degenerate(format!("response has norm {norm}")));
        }
        if (norm - 1.0).abs() > 1e-12 {
            self.y.unscale_mut(norm);
            changed = true;
        }
        if changed {
            self.gram = self.x.tr_mul(&self.x);
            self.xty = self.x.tr_mul(&self.y);
        }
        Ok(self)
    }

    /// Least-squares coefficients on `support` as a dense d-vector (zero elsewhere).
    /// Rank-deficient columns get coefficient zero.
    pub fn fit(&self, support: &[usize]) -> Result<DVector<f64>> {
        crate::set_function::GroundSet::new(self.d())?.check_subset(support)?;
        let mut ctx = R2Context::new(self, support);
        for &j in support {
            ctx.push(j);
        }
        Ok(ctx.coefficients())
    }

    /// Same instance with columns reordered: new column `i` is old column `perm[i]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Self> {
        crate::set_function::GroundSet::new(self.d())?.check_subset(perm)?;
        if perm.len() != self.d() {
            return Err(Error::domain("permutation must cover every column"));
        }
        let x = DMatrix::from_fn(self.n(), self.d(), |r, c| self.x[(r, perm[c])]);
        RegressionInstance::new(x, self.y.clone())
    }
}

/// `f(S) = ‖P_S y‖²` over a regression instance.
#[derive(Debug, Clone)]
pub struct R2Objective {
    instance: RegressionInstance,
}

impl R2Objective {
    pub fn new(instance: RegressionInstance) -> Self {
        R2Objective { instance }
    }

    pub fn instance(&self) -> &RegressionInstance {
        &self.instance
    }
}

impl SetFunction for R2Objective {
    fn ground_size(&self) -> usize {
        self.instance.d()
    }

    fn raw_value(&self, set: &[usize]) -> f64 {
        let mut ctx = R2Context::new(&self.instance, set);
        for &j in set {
            ctx.push(j);
        }
        ctx.value
    }

    fn incremental<'a>(&'a self, candidates: &[usize]) -> Box<dyn Incremental + 'a> {
        Box::new(R2Context::new(&self.instance, candidates))
    }
}

/// Incrementally factored state of a growing support.
pub struct R2Context<'a> {
    inst: &'a RegressionInstance,
    slot_of: Vec<usize>,
    slots: Vec<Slot>,
    /// Rows of the Cholesky factor, one per accepted pivot: `(w at time of pivoting, diagonal)`.
    factor: Vec<(Vec<f64>, f64)>,
    pivots: Vec<usize>,
    z: Vec<f64>,
    selected: Vec<usize>,
    value: f64,
}

struct Slot {
    column: usize,
    /// `L⁻¹ C_{S,j}`
    w: Vec<f64>,
    /// `w · z`
    proj: f64,
    /// `‖w‖²`
    sq: f64,
    taken: bool,
}

const NO_SLOT: usize = usize::MAX;

impl<'a> R2Context<'a> {
    pub fn new(inst: &'a RegressionInstance, candidates: &[usize]) -> Self {
        let mut ctx = R2Context {
            inst,
            slot_of: vec![NO_SLOT; inst.d()],
            slots: Vec::with_capacity(candidates.len()),
            factor: Vec::new(),
            pivots: Vec::new(),
            z: Vec::new(),
            selected: Vec::new(),
            value: 0.0,
        };
        for &j in candidates {
            ctx.slot(j);
        }
        ctx
    }

    fn slot(&mut self, j: usize) -> usize {
        if self.slot_of[j] != NO_SLOT {
            return self.slot_of[j];
        }
        // forward substitution against the current factor
        let c = &self.inst.gram;
        let mut w = Vec::with_capacity(self.pivots.len());
        for (i, (row, diag)) in self.factor.iter().enumerate() {
            let acc: f64 = row.iter().zip(&w).map(|(l, wt)| l * wt).sum();
            w.push((c[(self.pivots[i], j)] - acc) / diag);
        }
        let proj = w.iter().zip(&self.z).map(|(a, b)| a * b).sum();
        let sq = w.iter().map(|v| v * v).sum();
        self.slots.push(Slot { column: j, w, proj, sq, taken: false });
        self.slot_of[j] = self.slots.len() - 1;
        self.slots.len() - 1
    }

    /// Squared residual norm of column `j` after projecting out the selected columns.
    fn schur(&self, slot: usize) -> f64 {
        let s = &self.slots[slot];
        self.inst.gram[(s.column, s.column)] - s.sq
    }

    /// `x_jᵀ r` with `r = y − P_S y`.
    pub fn residual_correlation(&mut self, j: usize) -> f64 {
        let slot = self.slot(j);
        self.inst.xty[j] - self.slots[slot].proj
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    /// `β` on the accepted pivots by back substitution `Lᵀβ = z`, scattered into a d-vector.
    pub fn coefficients(&self) -> DVector<f64> {
        let m = self.pivots.len();
        let mut beta = vec![0.0; m];
        for i in (0..m).rev() {
            let mut acc = self.z[i];
            for (t, b) in beta.iter().enumerate().skip(i + 1) {
                acc -= self.factor[t].0[i] * b;
            }
            beta[i] = acc / self.factor[i].1;
        }
        let mut out = DVector::zeros(self.inst.d());
        for (i, &p) in self.pivots.iter().enumerate() {
            out[p] = beta[i];
        }
        out
    }
}

impl Incremental for R2Context<'_> {
    fn value(&self) -> f64 {
        self.value
    }

    fn gain(&mut self, j: usize) -> f64 {
        let slot = self.slot(j);
        if self.slots[slot].taken {
            return 0.0;
        }
        let schur = self.schur(slot);
        if schur < PIVOT_TOL {
            return 0.0;
        }
        let r = self.inst.xty[j] - self.slots[slot].proj;
        r * r / schur
    }

    fn push(&mut self, j: usize) -> bool {
        let slot = self.slot(j);
        if self.slots[slot].taken {
            return true;
        }
        self.slots[slot].taken = true;
        self.selected.push(j);
        let schur = self.schur(slot);
        if schur < PIVOT_TOL {
            return true;
        }
        let diag = schur.sqrt();
        let z_new = (self.inst.xty[j] - self.slots[slot].proj) / diag;
        let pivot_w = self.slots[slot].w.clone();
        let c = &self.inst.gram;
        for s in &mut self.slots {
            let dot: f64 = pivot_w.iter().zip(&s.w).map(|(a, b)| a * b).sum();
            let w_new = (c[(j, s.column)] - dot) / diag;
            s.w.push(w_new);
            s.sq += w_new * w_new;
            s.proj += w_new * z_new;
        }
        self.factor.push((pivot_w, diag));
        self.pivots.push(j);
        self.z.push(z_new);
        self.value += z_new * z_new;
        false
    }
}

/// `‖P_S y‖²` for an explicit support.
pub fn r2_value(instance: &RegressionInstance, support: &[usize]) -> Result<f64> {
    crate::set_function::GroundSet::new(instance.d())?.check_subset(support)?;
    let mut ctx = R2Context::new(instance, support);
    for &j in support {
        ctx.push(j);
    }
    Ok(ctx.value)
}

/// Exact k-sparse eigenvalues of `C` by enumeration.
pub fn sparse_eigenvalues(c: &DMatrix<f64>, k: usize) -> Result<SparseEigenBounds> {
    linalg::sparse_eigenvalues(c, k, ENUMERATION_BUDGET)
}

/// Lower bound `γ_{S,k} ≥ λ_min(C, k + |S|)`, clamped at zero.
pub fn gamma_lower_bound_regression(instance: &RegressionInstance, support: &[usize], k: usize) -> Result<f64> {
    crate::set_function::GroundSet::new(instance.d())?.check_subset(support)?;
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    let order = (k + support.len()).min(instance.d());
    Ok(sparse_eigenvalues(instance.gram(), order)?.lambda_min.max(0.0))
}

/// Lower bound `ν_S ≥ λ_min(C_S) / λ_max(C_S)`.
pub fn nu_lower_bound_regression(instance: &RegressionInstance, support: &[usize]) -> Result<f64> {
    crate::set_function::GroundSet::new(instance.d())?.check_subset(support)?;
    if support.is_empty() {
        return Err(Error::domain("support must be nonempty"));
    }
    let (lo, hi) = symmetric_extremes(&principal_submatrix(instance.gram(), support));
    if hi <= 1e-12 {
        return Err(Error::Degenerate(format!("largest eigenvalue of C_S is {hi}")));
    }
    Ok(lo.max(0.0) / hi)
}

/// Orthogonal matching pursuit over all columns.
pub fn omp_select(instance: &RegressionInstance, k: usize) -> Result<SelectionTrace> {
    if k == 0 || k > instance.d() {
        return Err(Error::config(format!("sparsity k = {k} must lie in 1..={}", instance.d())));
    }
    let all: Vec<usize> = (0..instance.d()).collect();
    Ok(omp_trace(instance, &all, k, None))
}

/// OMP restricted to `candidates`, selecting `min(k, |candidates|)` columns and charging one
/// evaluation per refit to `oracle`. Usable as a local solver for distributed selection.
pub fn omp_clamped(oracle: &Oracle<R2Objective>, candidates: &[usize], k: usize) -> SelectionTrace {
    omp_trace(oracle.function().instance(), candidates, k, Some(oracle))
}

fn omp_trace(inst: &RegressionInstance, candidates: &[usize], k: usize, oracle: Option<&Oracle<R2Objective>>) -> SelectionTrace {
    let mut remaining = candidates.to_vec();
    remaining.sort_unstable();
    let mut ctx = R2Context::new(inst, &remaining);
    let mut steps = Vec::new();
    for _ in 0..k.min(candidates.len()) {
        let mut best = (0, f64::NEG_INFINITY);
        for (pos, &j) in remaining.iter().enumerate() {
            let score = ctx.residual_correlation(j).abs();
            if score > best.1 {
                best = (pos, score);
            }
        }
        let j = remaining.remove(best.0);
        let before = ctx.value;
        let degenerate = ctx.push(j);
        if let Some(o) = oracle {
            o.charge(1);
        }
        steps.push(Step { element: j, gain: ctx.value - before, value: ctx.value, evaluations: 1, degenerate });
    }
    SelectionTrace { steps }
}

/// Comma-separated indices, e.g. `0,3,5`.
pub fn format_support(support: &[usize]) -> String {
    support.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}
