//! Instance generators and from-scratch reference computations shared by the integration
//! tests. Nothing here calls the incremental solvers or enumerations under test.
#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use subsel_core::set_function::{Coverage, Modular};
use subsel_core::{RandomSource, RegressionInstance};

pub fn rng(seed: u64) -> ChaCha8Rng {
    RandomSource::new(seed).rng()
}

pub fn normal(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn gaussian_matrix(rng: &mut impl Rng, n: usize, d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, d, |_, _| normal(rng))
}

/// Random integer weights in `0..10`, so sums are exact.
pub fn random_modular(rng: &mut impl Rng, d: usize) -> Modular {
    Modular::new((0..d).map(|_| rng.random_range(0..10) as f64).collect())
}

pub fn random_coverage(rng: &mut impl Rng, d: usize, universe: usize) -> Coverage {
    Coverage::new((0..d).map(|_| (0..universe).filter(|_| rng.random_bool(0.3)).collect()).collect())
}

/// Normalized design with neighbouring columns mixed at a random strength, so the R²
/// objective is usually not submodular.
pub fn random_regression(rng: &mut impl Rng, n: usize, d: usize) -> RegressionInstance {
    let z = gaussian_matrix(rng, n, d);
    let rho: f64 = rng.random_range(0.0..0.95);
    let x = DMatrix::from_fn(n, d, |r, c| if c == 0 { z[(r, 0)] } else { z[(r, c)] + rho * z[(r, c - 1)] });
    let beta = DVector::from_fn(d, |_, _| if rng.random_bool(0.5) { normal(rng) } else { 0.0 });
    let noise = DVector::from_fn(n, |_, _| 0.3 * normal(rng));
    let y = &x * beta + noise;
    RegressionInstance::new(x, y).unwrap().normalize().unwrap()
}

/// `‖P_S y‖² / ‖y‖²` via an SVD least-squares solve on `X_S`.
pub fn lstsq_r2(x: &DMatrix<f64>, y: &DVector<f64>, s: &[usize]) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    let xs = x.select_columns(s);
    let beta = xs.clone().svd(true, true).solve(y, 1e-12).unwrap();
    (xs * beta).norm_squared() / y.norm_squared()
}

/// Elements of a bit mask, ascending.
pub fn members(mask: u32, d: usize) -> Vec<usize> {
    (0..d).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Memoized evaluation over bit masks.
pub struct MaskCache<'a> {
    f: &'a dyn Fn(&[usize]) -> f64,
    d: usize,
    memo: HashMap<u32, f64>,
}

impl<'a> MaskCache<'a> {
    pub fn new(f: &'a dyn Fn(&[usize]) -> f64, d: usize) -> Self {
        MaskCache { f, d, memo: HashMap::new() }
    }

    pub fn get(&mut self, mask: u32) -> f64 {
        if let Some(&v) = self.memo.get(&mask) {
            return v;
        }
        let v = (self.f)(&members(mask, self.d));
        self.memo.insert(mask, v);
        v
    }
}

const TAU: f64 = 1e-9;

/// `min γ_{L,S}` over masks, scanning from the highest mask down. `L` ranges over subsets of
/// `u_mask` with at most `max_l` elements, `S` over nonempty sets of at most `k` elements
/// disjoint from `L`. Same conventions as the library: 0/0 counts as 1, x/0 is skipped.
pub fn gamma_reference(f: &dyn Fn(&[usize]) -> f64, d: usize, u_mask: u32, max_l: usize, k: usize) -> f64 {
    let mut cache = MaskCache::new(f, d);
    let mut best = f64::INFINITY;
    let full = (1u32 << d) - 1;
    for l in (0..=full).rev() {
        if l & !u_mask != 0 || l.count_ones() as usize > max_l {
            continue;
        }
        let fl = cache.get(l);
        for s in (1..=full).rev() {
            if s & l != 0 || s.count_ones() as usize > k {
                continue;
            }
            let joint = cache.get(l | s) - fl;
            let singles: f64 = members(s, d).iter().map(|&j| cache.get(l | 1 << j) - fl).sum();
            let r = if joint <= TAU {
                if singles > TAU {
                    continue;
                }
                1.0
            } else {
                singles / joint
            };
            best = best.min(r);
        }
    }
    best
}

/// `ν_S` by scanning partitions from the top mask down.
pub fn nu_reference(f: &dyn Fn(&[usize]) -> f64, d: usize, s_mask: u32) -> f64 {
    let mut cache = MaskCache::new(f, d);
    let fs = cache.get(s_mask);
    let mut best = f64::INFINITY;
    let mut a = s_mask;
    loop {
        best = best.min((cache.get(a) + cache.get(s_mask & !a)) / fs);
        if a == 0 {
            break;
        }
        a = (a - 1) & s_mask;
    }
    best
}

/// Largest value over sets of size exactly `k`, scanning masks downward.
pub fn opt_reference(f: &dyn Fn(&[usize]) -> f64, d: usize, k: usize) -> f64 {
    (0..1u32 << d).rev().filter(|m| m.count_ones() as usize == k).map(|m| f(&members(m, d))).fold(f64::NEG_INFINITY, f64::max)
}

/// Extremal eigenvalues over all `k × k` principal submatrices, scanning masks downward.
pub fn sparse_eigen_reference(c: &DMatrix<f64>, k: usize) -> (f64, f64) {
    let d = c.nrows();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for m in (0..1u32 << d).rev().filter(|m| m.count_ones() as usize == k) {
        let idx = members(m, d);
        let sub = DMatrix::from_fn(k, k, |r, s| c[(idx[r], idx[s])]);
        let ev = sub.symmetric_eigenvalues();
        lo = lo.min(ev.min());
        hi = hi.max(ev.max());
    }
    (lo, hi)
}

/// Mean and standard deviation (sample, `n − 1`).
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Random positive definite matrix `BᵀB/n + εI`.
pub fn random_spd(rng: &mut impl Rng, d: usize) -> DMatrix<f64> {
    let n = d + 3;
    let b = gaussian_matrix(rng, n, d);
    let eps: f64 = rng.random_range(0.05..0.5);
    b.tr_mul(&b) / n as f64 + DMatrix::identity(d, d) * eps
}
