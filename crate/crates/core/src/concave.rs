//! Support selection for smooth concave objectives.
//!
//! For a concave `g: ℝ^d → ℝ` the induced set function is
//! `f(S) = max_{supp(x) ⊆ S} g(x) − g(0)`. The inner maximization runs a damped Newton
//! method on the coordinates in `S`; for quadratics it terminates after a single exact step.
//!
//! Restricted strong concavity `m` and smoothness `L` give `m/L` as a lower bound on both the
//! submodularity and the subadditivity ratio of `f`.

use std::collections::HashMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, DVector};

use crate::certificate::{make_certificate, BoundCertificate, BoundKind, RatioSource};
use crate::data::read_table_path;
use crate::error::{Error, Result};
use crate::linalg::{is_symmetric, principal_submatrix, sparse_eigenvalues, ENUMERATION_BUDGET};
use crate::set_function::{Incremental, SetFunction};

/// Restricted-gradient tolerance of the inner solver.
pub const INNER_TOL: f64 = 1e-8;
pub const INNER_MAX_ITERS: usize = 200;

/// Newton decrement, relative to `1 + |g|`, below which full steps are taken unsearched.
const NEGLIGIBLE_DECREMENT: f64 = 1e-12;

/// A smooth concave objective evaluated on sparse coefficient vectors.
///
/// `coef[i]` is the coefficient of coordinate `support[i]`; every other coordinate is zero.
pub trait SmoothObjective: Send + Sync {
    fn dim(&self) -> usize;

    fn value_on(&self, support: &[usize], coef: &[f64]) -> f64;

    /// Gradient components at the given point, for the coordinates in `support`.
    fn gradient_on(&self, support: &[usize], coef: &[f64]) -> DVector<f64>;

    /// Hessian block for `support` at the given point (negative semidefinite).
    fn hessian_on(&self, support: &[usize], coef: &[f64]) -> DMatrix<f64>;

    fn value(&self, x: &[f64]) -> f64 {
        let all: Vec<usize> = (0..self.dim()).collect();
        self.value_on(&all, x)
    }

    fn gradient(&self, x: &[f64]) -> DVector<f64> {
        let all: Vec<usize> = (0..self.dim()).collect();
        self.gradient_on(&all, x)
    }
}

/// `g(x) = −½ xᵀAx + bᵀx` with `A` symmetric positive definite.
#[derive(Debug, Clone)]
pub struct Quadratic {
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl Quadratic {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if !is_symmetric(&a, 1e-12) {
            return Err(Error::domain("quadratic form must be square and symmetric"));
        }
        if a.nrows() != b.len() {
            return Err(Error::domain("linear term has the wrong dimension"));
        }
        Ok(Quadratic { a, b })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }
}

impl SmoothObjective for Quadratic {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value_on(&self, support: &[usize], coef: &[f64]) -> f64 {
        let mut quad = 0.0;
        let mut lin = 0.0;
        for (i, &si) in support.iter().enumerate() {
            lin += self.b[si] * coef[i];
            for (t, &st) in support.iter().enumerate() {
                quad += coef[i] * self.a[(si, st)] * coef[t];
            }
        }
        lin - 0.5 * quad
    }

    fn gradient_on(&self, support: &[usize], coef: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            support.len(),
            support.iter().map(|&r| self.b[r] - support.iter().zip(coef).map(|(&c, v)| self.a[(r, c)] * v).sum::<f64>()),
        )
    }

    fn hessian_on(&self, support: &[usize], _coef: &[f64]) -> DMatrix<f64> {
        -principal_submatrix(&self.a, support)
    }
}

/// Logistic log-likelihood `g(β) = −Σ_i log(1 + exp(−y_i x_iᵀβ))`, labels `±1`, no intercept.
#[derive(Debug, Clone)]
pub struct Logistic {
    x: DMatrix<f64>,
    labels: DVector<f64>,
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl Logistic {
    pub fn new(x: DMatrix<f64>, labels: DVector<f64>) -> Result<Self> {
        if x.nrows() != labels.len() {
            return Err(Error::domain(format!("{} rows but {} labels", x.nrows(), labels.len())));
        }
        if let Some((i, v)) = labels.iter().enumerate().find(|(_, &v)| v != 1.0 && v != -1.0) {
            return Err(Error::domain(format!("label {v} in row {i} is not ±1")));
        }
        Ok(Logistic { x, labels })
    }

    /// CSV table whose last column holds `±1` labels.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let t = read_table_path(path)?;
        Logistic::new(t.features, t.response)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn labels(&self) -> &DVector<f64> {
        &self.labels
    }

    fn margins(&self, support: &[usize], coef: &[f64]) -> Vec<f64> {
        let mut m = vec![0.0; self.n()];
        for (&j, &c) in support.iter().zip(coef) {
            if c != 0.0 {
                for (mi, xi) in m.iter_mut().zip(self.x.column(j).iter()) {
                    *mi += xi * c;
                }
            }
        }
        m
    }

    /// Log-likelihood of a dense coefficient vector.
    pub fn log_likelihood(&self, beta: &DVector<f64>) -> f64 {
        self.value(beta.as_slice())
    }
}

impl SmoothObjective for Logistic {
    fn dim(&self) -> usize {
        self.x.ncols()
    }

    fn value_on(&self, support: &[usize], coef: &[f64]) -> f64 {
        self.margins(support, coef).iter().zip(self.labels.iter()).map(|(m, y)| -softplus(-y * m)).sum()
    }

    fn gradient_on(&self, support: &[usize], coef: &[f64]) -> DVector<f64> {
        let m = self.margins(support, coef);
        let weights: Vec<f64> = m.iter().zip(self.labels.iter()).map(|(mi, y)| y * sigmoid(-y * mi)).collect();
        DVector::from_iterator(
            support.len(),
            support.iter().map(|&j| self.x.column(j).iter().zip(&weights).map(|(x, w)| x * w).sum::<f64>()),
        )
    }

    fn hessian_on(&self, support: &[usize], coef: &[f64]) -> DMatrix<f64> {
        let m = self.margins(support, coef);
        let curv: Vec<f64> = m.iter().map(|&mi| {
            let p = sigmoid(mi);
            p * (1.0 - p)
        })
        .collect();
        let k = support.len();
        let mut h = DMatrix::zeros(k, k);
        for r in 0..k {
            let xr = self.x.column(support[r]);
            for c in r..k {
                let xc = self.x.column(support[c]);
                let v: f64 = xr.iter().zip(xc.iter()).zip(&curv).map(|((a, b), w)| a * b * w).sum();
                h[(r, c)] = -v;
                h[(c, r)] = -v;
            }
        }
        h
    }
}

/// Result of maximizing `g` over vectors supported on `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolveReport {
    pub support: Vec<usize>,
    /// Dense maximizer, exactly zero off the support.
    pub coefficients: DVector<f64>,
    pub value: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
}

/// Damped Newton ascent on the coordinates of `support`, optionally warm-started.
pub fn solve_on_support<G: SmoothObjective + ?Sized>(
    g: &G,
    support: &[usize],
    warm: Option<&[f64]>,
    tol: f64,
    max_iters: usize,
) -> InnerSolveReport {
    let k = support.len();
    let mut coef: Vec<f64> = warm.map_or_else(|| vec![0.0; k], |w| w.to_vec());
    let mut value = g.value_on(support, &coef);
    let mut grad = g.gradient_on(support, &coef);
    let mut iterations = 0;
    while grad.norm() > tol && iterations < max_iters {
        iterations += 1;
        let neg_h = -g.hessian_on(support, &coef);
        let step = match neg_h.clone().cholesky() {
            Some(ch) => ch.solve(&grad),
            None => {
                // flat direction: regularize, falling back to plain gradient ascent
                let ridge = 1e-8 * (1.0 + neg_h.diagonal().amax());
                let reg = neg_h + DMatrix::identity(k, k) * ridge;
                reg.cholesky().map_or_else(|| grad.clone(), |ch| ch.solve(&grad))
            }
        };
        let slope = grad.dot(&step);
        if slope <= NEGLIGIBLE_DECREMENT * (1.0 + value.abs()) {
            // the predicted increase is near the resolution of g: a line search can no longer
            // tell steps apart, and the full Newton step is safe this close to the optimum
            for (c, s) in coef.iter_mut().zip(step.iter()) {
                *c += s;
            }
            value = g.value_on(support, &coef);
            grad = g.gradient_on(support, &coef);
            continue;
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = coef.iter().zip(step.iter()).map(|(c, s)| c + t * s).collect();
            let v = g.value_on(support, &trial);
            if v >= value + 1e-4 * t * slope {
                coef = trial;
                value = v;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        grad = g.gradient_on(support, &coef);
    }
    let gradient_norm = grad.norm();
    let mut coefficients = DVector::zeros(g.dim());
    for (&j, &c) in support.iter().zip(&coef) {
        coefficients[j] = c;
    }
    InnerSolveReport {
        support: support.to_vec(),
        coefficients,
        value,
        iterations,
        gradient_norm,
        converged: gradient_norm <= tol,
    }
}

/// `f(S) = max_{supp(x) ⊆ S} g(x) − g(0)` as a [`SetFunction`].
///
/// The raw value is `max g` over the support; the oracle's normalization subtracts `g(0)`.
/// Non-converged inner solves still return the best iterate found (a valid lower bound) and
/// are tallied in [`SupportObjective::convergence_failures`].
pub struct SupportObjective<G> {
    objective: G,
    tol: f64,
    max_iters: usize,
    failures: AtomicUsize,
}

impl<G: SmoothObjective> SupportObjective<G> {
    pub fn new(objective: G) -> Self {
        SupportObjective { objective, tol: INNER_TOL, max_iters: INNER_MAX_ITERS, failures: AtomicUsize::new(0) }
    }

    pub fn with_solver(mut self, tol: f64, max_iters: usize) -> Self {
        self.tol = tol;
        self.max_iters = max_iters;
        self
    }

    pub fn objective(&self) -> &G {
        &self.objective
    }

    pub fn convergence_failures(&self) -> usize {
        self.failures.load(Ordering::Relaxed)
    }

    pub fn solve(&self, support: &[usize], warm: Option<&[f64]>) -> InnerSolveReport {
        let r = solve_on_support(&self.objective, support, warm, self.tol, self.max_iters);
        if !r.converged {
            self.failures.fetch_add(1, Ordering::Relaxed);
            log::warn!("inner solve on {support:?} stopped at gradient norm {:e}", r.gradient_norm);
        }
        r
    }
}

impl<G: SmoothObjective> SetFunction for SupportObjective<G> {
    fn ground_size(&self) -> usize {
        self.objective.dim()
    }

    fn raw_value(&self, set: &[usize]) -> f64 {
        if set.is_empty() {
            return self.objective.value_on(&[], &[]);
        }
        self.solve(set, None).value
    }

    fn incremental<'a>(&'a self, _candidates: &[usize]) -> Box<dyn Incremental + 'a> {
        Box::new(WarmStart { owner: self, support: Vec::new(), coef: Vec::new(), value: self.raw_value(&[]), pending: HashMap::new() })
    }
}

/// Incremental state that warm-starts each `S ∪ {j}` solve from the maximizer on `S`.
struct WarmStart<'a, G> {
    owner: &'a SupportObjective<G>,
    support: Vec<usize>,
    coef: Vec<f64>,
    value: f64,
    pending: HashMap<usize, (Vec<f64>, f64)>,
}

impl<G: SmoothObjective> WarmStart<'_, G> {
    fn solve_with(&self, j: usize) -> (Vec<f64>, f64) {
        let mut support = self.support.clone();
        support.push(j);
        let mut warm = self.coef.clone();
        warm.push(0.0);
        let r = self.owner.solve(&support, Some(&warm));
        let coef = support.iter().map(|&s| r.coefficients[s]).collect();
        (coef, r.value)
    }
}

impl<G: SmoothObjective> Incremental for WarmStart<'_, G> {
    fn value(&self) -> f64 {
        self.value
    }

    fn gain(&mut self, j: usize) -> f64 {
        let (coef, v) = self.solve_with(j);
        self.pending.insert(j, (coef, v));
        v - self.value
    }

    fn push(&mut self, j: usize) -> bool {
        let (coef, v) = match self.pending.remove(&j) {
            Some(p) => p,
            None => self.solve_with(j),
        };
        self.support.push(j);
        self.coef = coef;
        self.value = v;
        self.pending.clear();
        false
    }
}

/// `f(S) = g(β^(S)) − g(0)`, failing if the inner solver does not converge.
pub fn support_value<G: SmoothObjective>(objective: &G, support: &[usize]) -> Result<f64> {
    crate::set_function::GroundSet::new(objective.dim())?.check_subset(support)?;
    if support.is_empty() {
        return Ok(0.0);
    }
    let r = solve_on_support(objective, support, None, INNER_TOL, INNER_MAX_ITERS);
    if !r.converged {
        return Err(Error::Convergence { iterations: r.iterations, gradient_norm: r.gradient_norm });
    }
    Ok(r.value - objective.value_on(&[], &[]))
}

/// Restricted strong concavity and smoothness `(m, L)` of a quadratic at sparsity `s`:
/// extremal eigenvalues over all `s × s` principal submatrices of `A`.
pub fn rsc_rsm_quadratic(a: &DMatrix<f64>, s: usize) -> Result<(f64, f64)> {
    if !is_symmetric(a, 1e-12) {
        return Err(Error::domain("matrix must be square and symmetric"));
    }
    let b = sparse_eigenvalues(a, s, ENUMERATION_BUDGET)?;
    Ok((b.lambda_min, b.lambda_max))
}

fn check_curvature(m: f64, l: f64) -> Result<()> {
    if !(m > 0.0) {
        return Err(Error::domain(format!("m = {m}: objective is not strongly concave")));
    }
    if !(l >= m) {
        return Err(Error::domain(format!("smoothness L = {l} must be at least m = {m}")));
    }
    Ok(())
}

/// `γ ≥ m/L`.
pub fn gamma_lower_bound_rsc(m: f64, l: f64) -> Result<f64> {
    check_curvature(m, l)?;
    Ok(m / l)
}

/// `ν ≥ m/L`.
pub fn nu_lower_bound_rsc(m: f64, l: f64) -> Result<f64> {
    check_curvature(m, l)?;
    Ok(m / l)
}

/// Greedy, stochastic (when `delta` is given) and distributed certificates from `(m, L)`
/// supplied at sparsity `order`.
pub fn combined_certificates(m: f64, l: f64, delta: Option<f64>, order: usize) -> Result<Vec<BoundCertificate>> {
    let gamma = gamma_lower_bound_rsc(m, l)?;
    let nu = nu_lower_bound_rsc(m, l)?;
    let source = RatioSource::RestrictedConcavity { order };
    let mut out = vec![make_certificate(BoundKind::Greedy, gamma, None, None, None)?.with_source(source)];
    if let Some(d) = delta {
        out.push(make_certificate(BoundKind::Stochastic, gamma, None, Some(d), None)?.with_source(source));
    }
    out.push(make_certificate(BoundKind::Distributed, gamma, Some(nu), None, None)?.with_source(source));
    Ok(out)
}

/// `(‖∇g(0)_S‖²/(2L), ‖∇g(0)_S‖²/(2m))`, which sandwich `f(S)`.
pub fn gradient_sandwich<G: SmoothObjective>(objective: &G, support: &[usize], m: f64, l: f64) -> (f64, f64) {
    let zeros = vec![0.0; support.len()];
    let g0 = objective.gradient_on(support, &zeros).norm_squared();
    (g0 / (2.0 * l), g0 / (2.0 * m))
}
