//! Synthetic sparse designs with autoregressive feature correlation.

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::config::ExperimentConfig;
use crate::concave::Logistic;
use crate::error::Result;
use crate::regression::RegressionInstance;

/// Normalized train and test regression instances sharing one sparse coefficient vector.
#[derive(Debug, Clone)]
pub struct SyntheticRegression {
    pub train: RegressionInstance,
    pub test: RegressionInstance,
    pub beta: DVector<f64>,
    /// Sorted true support.
    pub support: Vec<usize>,
}

/// Train and test logistic instances sharing one sparse coefficient vector.
#[derive(Debug, Clone)]
pub struct SyntheticLogistic {
    pub train: Logistic,
    pub test: Logistic,
    pub beta: DVector<f64>,
    pub support: Vec<usize>,
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// `n × d` design whose rows follow `x_{t+1} = √(1−α²) x_t + α ε_t` with `x_0 ~ N(0, 1)`,
/// so every column has unit variance and adjacent columns correlate at `√(1−α²)`.
pub fn ar_design<R: Rng + ?Sized>(n: usize, d: usize, alpha: f64, rng: &mut R) -> DMatrix<f64> {
    let rho = (1.0 - alpha * alpha).sqrt();
    let mut x = DMatrix::zeros(n, d);
    for i in 0..n {
        let mut prev = normal(rng);
        x[(i, 0)] = prev;
        for t in 1..d {
            prev = rho * prev + alpha * normal(rng);
            x[(i, t)] = prev;
        }
    }
    x
}

/// `s`-sparse coefficients on a uniformly random support, with random signs and magnitudes
/// `5√(ln d / n) + N(0, 1)`.
pub fn sparse_coefficients<R: Rng + ?Sized>(n: usize, d: usize, s: usize, rng: &mut R) -> (DVector<f64>, Vec<usize>) {
    let mut support = sample(rng, d, s).into_vec();
    support.sort_unstable();
    let scale = 5.0 * ((d as f64).ln() / n as f64).sqrt();
    let mut beta = DVector::zeros(d);
    for &j in &support {
        let sign = if rng.random_bool(0.5) { -1.0 } else { 1.0 };
        beta[j] = sign * (scale + normal(rng));
    }
    (beta, support)
}

fn noisy_response<R: Rng + ?Sized>(x: &DMatrix<f64>, beta: &DVector<f64>, noise: f64, rng: &mut R) -> DVector<f64> {
    let signal = x * beta;
    let sd = (noise * 0.01 * signal.norm()).sqrt();
    signal.map(|v| v + sd * normal(rng))
}

/// Draws the regression experiment data. Train and test are normalized separately.
pub fn generate_synthetic<R: Rng + ?Sized>(config: &ExperimentConfig, rng: &mut R) -> Result<SyntheticRegression> {
    let (n, d) = (config.n, config.d);
    let (beta, support) = sparse_coefficients(n, d, config.s, rng);
    let draw = |rng: &mut R| -> Result<RegressionInstance> {
        let x = ar_design(n, d, config.alpha, rng);
        let y = noisy_response(&x, &beta, config.noise, rng);
        RegressionInstance::new(x, y)?.normalize()
    };
    let train = draw(rng)?;
    let test = draw(rng)?;
    Ok(SyntheticRegression { train, test, beta, support })
}

/// Draws the logistic experiment data: unit-variance AR features and labels
/// `y = ±1` with `P(y = 1) = σ(xᵀβ)`.
pub fn generate_logistic<R: Rng + ?Sized>(config: &ExperimentConfig, rng: &mut R) -> Result<SyntheticLogistic> {
    let (n, d) = (config.n, config.d);
    let (beta, support) = sparse_coefficients(n, d, config.s, rng);
    let draw = |rng: &mut R| -> Result<Logistic> {
        let x = ar_design(n, d, config.alpha, rng);
        let margins = &x * &beta;
        let labels = margins.map(|m| if rng.random_bool(1.0 / (1.0 + (-m).exp())) { 1.0 } else { -1.0 });
        Logistic::new(x, labels)
    };
    let train = draw(rng)?;
    let test = draw(rng)?;
    Ok(SyntheticLogistic { train, test, beta, support })
}
