//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and exits nonzero if any
//! criterion fails or exceeds its time limit.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use nalgebra::DVector;
use rand::seq::index::sample;
use rand::Rng;

use common::*;
use subsel_core::certificate::{make_certificate, BoundKind};
use subsel_core::concave::{gamma_lower_bound_rsc, gradient_sandwich, nu_lower_bound_rsc, rsc_rsm_quadratic, Quadratic, SupportObjective};
use subsel_core::experiment::{run_experiment, Algorithm, ExperimentConfig, MetricsRow, Model, Sweep};
use subsel_core::greedy::{distributed_greedy, greedy, stochastic_greedy};
use subsel_core::linalg::principal_submatrix;
use subsel_core::linalg::symmetric_extremes;
use subsel_core::ratio::{
    brute_force_opt, subadditivity_ratio_k, subadditivity_ratio_set, submodularity_ratio_uk, submodularity_ratio_uniform,
};
use subsel_core::regression::{gamma_lower_bound_regression, nu_lower_bound_regression, r2_value};
use subsel_core::{Oracle, R2Objective, RandomSource, SetFunction};

const TOL: f64 = 1e-8;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn criterion(id: u32, name: &str, limit_s: f64, body: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let secs = start.elapsed().as_secs_f64();
    let (pass, detail) = match outcome {
        Ok(v) => (v.pass && secs <= limit_s, v.detail),
        Err(_) => (false, "panicked".to_string()),
    };
    println!("[{}] {id}. {name}: {detail} [{secs:.1}s of {limit_s:.0}s]", if pass { "PASS" } else { "FAIL" });
    pass
}

fn greedy_vs_certificate<F: SetFunction>(o: &Oracle<F>, k: usize) -> (f64, f64) {
    let all = o.ground_set().elements();
    let g = greedy(o, &all, k).unwrap();
    let gamma = submodularity_ratio_uk(o, &g.selected(), k).unwrap().value;
    let (_, opt) = brute_force_opt(o, k).unwrap();
    let cert = make_certificate(BoundKind::Greedy, gamma, None, None, Some(opt)).unwrap();
    (g.value(), cert.guaranteed_value().unwrap())
}

fn c1_greedy_guarantee() -> Verdict {
    let mut r = rng(1001);
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for i in 0..200 {
        let d = r.random_range(3..=8);
        let k = r.random_range(1..=3);
        let (value, bound) = match i % 3 {
            0 => greedy_vs_certificate(&Oracle::new(random_modular(&mut r, d)).unwrap(), k),
            1 => greedy_vs_certificate(&Oracle::new(random_coverage(&mut r, d, 10)).unwrap(), k),
            _ => {
                let n = d + r.random_range(2..=10);
                greedy_vs_certificate(&Oracle::new(R2Objective::new(random_regression(&mut r, n, d))).unwrap(), k)
            }
        };
        worst = worst.min(value - bound);
        if value < bound - TOL {
            violations += 1;
        }
    }
    verdict(violations == 0, format!("200 instances, {violations} violations, min f(G) - bound = {worst:.3e}"))
}

/// A random R² instance whose certificate factor is at least `floor`, so the check is not vacuous.
fn informative_instance(seed: u64, n: usize, d: usize, factor: impl Fn(&Oracle<R2Objective>) -> f64, floor: f64) -> (Oracle<R2Objective>, f64) {
    let mut r = rng(seed);
    loop {
        let o = Oracle::new(R2Objective::new(random_regression(&mut r, n, d))).unwrap();
        let f = factor(&o);
        if f >= floor {
            return (o, f);
        }
    }
}

fn monte_carlo_check(values: &[f64], bound: f64) -> (bool, f64, f64) {
    let (mean, sd) = mean_sd(values);
    let margin = 3.0 * sd / (values.len() as f64).sqrt();
    (mean >= bound - margin, mean, margin)
}

fn c2_stochastic() -> Verdict {
    let (d, k, delta, seeds) = (10, 3, 0.2, 20_000u64);
    let stochastic_factor = |o: &Oracle<R2Objective>| {
        let gamma = submodularity_ratio_uniform(o, k, k).unwrap().value;
        make_certificate(BoundKind::Stochastic, gamma, None, Some(delta), None).unwrap().factor
    };
    let (o, factor) = informative_instance(2002, 30, d, stochastic_factor, 0.2);
    let (_, opt) = brute_force_opt(&o, k).unwrap();
    let all: Vec<usize> = (0..d).collect();
    let values: Vec<f64> =
        (0..seeds).map(|s| stochastic_greedy(&o, &all, k, delta, RandomSource::new(s)).unwrap().value()).collect();
    let (ok, mean, margin) = monte_carlo_check(&values, factor * opt);

    // submodular limit: γ = 1 exactly for a modular objective
    let m = Oracle::new(random_modular(&mut rng(2003), d)).unwrap();
    let gamma_m = submodularity_ratio_uniform(&m, k, k).unwrap().value;
    let factor_m = make_certificate(BoundKind::Stochastic, gamma_m, None, Some(delta), None).unwrap().factor;
    let exact = gamma_m == 1.0 && factor_m == 1.0 - (-1.0f64).exp() - delta;
    let (_, opt_m) = brute_force_opt(&m, k).unwrap();
    let values_m: Vec<f64> =
        (0..seeds).map(|s| stochastic_greedy(&m, &all, k, delta, RandomSource::new(s)).unwrap().value()).collect();
    let (ok_m, mean_m, margin_m) = monte_carlo_check(&values_m, factor_m * opt_m);
    verdict(
        ok && ok_m && exact,
        format!(
            "R2: mean {mean:.5} >= {factor:.5}*OPT {opt:.5} - {margin:.1e}; modular: factor {factor_m:.6} (= 1-1/e-δ: {exact}), mean {mean_m:.3} >= {:.3} - {margin_m:.1e}",
            factor_m * opt_m
        ),
    )
}

fn c3_distributed() -> Verdict {
    let (d, k, l, seeds) = (12, 3, 3, 5_000u64);
    let ratios = |o: &Oracle<R2Objective>| {
        let gamma = submodularity_ratio_uniform(o, k, k).unwrap().value;
        let nu = subadditivity_ratio_k(o, k).unwrap().value;
        (gamma, nu)
    };
    let distributed_factor = |o: &Oracle<R2Objective>| {
        let (gamma, nu) = ratios(o);
        make_certificate(BoundKind::Distributed, gamma, Some(nu), None, None).unwrap().factor
    };
    let (o, factor) = informative_instance(3003, 36, d, distributed_factor, 0.1);
    let (gamma, nu) = ratios(&o);
    let (_, opt) = brute_force_opt(&o, k).unwrap();
    let all: Vec<usize> = (0..d).collect();
    let values: Vec<f64> =
        (0..seeds).map(|s| distributed_greedy(&o, &all, l, k, RandomSource::new(s)).unwrap().value).collect();
    let (ok, mean, margin) = monte_carlo_check(&values, factor * opt);
    verdict(
        ok,
        format!("γ={gamma:.4} ν_k={nu:.4} factor {factor:.5}; mean {mean:.5} >= {:.5} - {margin:.1e}", factor * opt),
    )
}

fn c4_regression_lemmas() -> Verdict {
    let mut r = rng(4004);
    let (mut gamma_viol, mut nu_viol) = (0, 0);
    let (mut gamma_slack, mut nu_slack) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..500 {
        let d = r.random_range(4..=8);
        let n = d + r.random_range(4..=12);
        let inst = random_regression(&mut r, n, d);
        let k = r.random_range(1..=3);
        let size = r.random_range(1..=(d - k).min(3));
        let mut s = sample(&mut r, d, size).into_vec();
        s.sort_unstable();
        let bound = gamma_lower_bound_regression(&inst, &s, k).unwrap();
        let o = Oracle::new(R2Objective::new(inst.clone())).unwrap();
        let gamma = submodularity_ratio_uk(&o, &s, k).unwrap().value;
        gamma_slack = gamma_slack.min(gamma - bound);
        if gamma < bound - TOL {
            gamma_viol += 1;
        }

        let size = r.random_range(2..=d.min(5));
        let s = sample(&mut r, d, size).into_vec();
        let bound = nu_lower_bound_regression(&inst, &s).unwrap();
        let nu = subadditivity_ratio_set(&o, &s).unwrap().value;
        nu_slack = nu_slack.min(nu - bound);
        if nu < bound - TOL {
            nu_viol += 1;
        }
    }
    verdict(
        gamma_viol == 0 && nu_viol == 0,
        format!(
            "500 designs: γ bound violations {gamma_viol} (min slack {gamma_slack:.2e}), ν bound violations {nu_viol} (min slack {nu_slack:.2e})"
        ),
    )
}

fn c5_quadratics() -> Verdict {
    let mut r = rng(5005);
    let (mut gamma_viol, mut nu_viol, mut lemma_viol) = (0, 0, 0);
    let mut supports_checked = 0;
    for _ in 0..200 {
        let d = r.random_range(3..=6);
        let a = random_spd(&mut r, d);
        let b = DVector::from_fn(d, |_, _| normal(&mut r));
        let q = Quadratic::new(a.clone(), b).unwrap();
        let o = Oracle::new(SupportObjective::new(q.clone())).unwrap();

        let u_size = r.random_range(0..=2usize.min(d - 1));
        let k = r.random_range(1..=3usize.min(d - u_size));
        let u = sample(&mut r, d, u_size).into_vec();
        let gamma = submodularity_ratio_uk(&o, &u, k).unwrap().value;
        let m = rsc_rsm_quadratic(&a, u_size + k).unwrap().0;
        let l = rsc_rsm_quadratic(&a, u_size + 1).unwrap().1;
        if gamma < gamma_lower_bound_rsc(m, l).unwrap() - TOL {
            gamma_viol += 1;
        }

        for mask in 1u32..1 << d {
            let s = members(mask, d);
            if s.len() > 4 {
                continue;
            }
            supports_checked += 1;
            let f = o.evaluate(&s).unwrap();
            let (lo, hi) = symmetric_extremes(&principal_submatrix(&a, &s));
            let (below, above) = gradient_sandwich(&q, &s, lo, hi);
            if f < below - TOL || f > above + TOL {
                lemma_viol += 1;
            }
            if s.len() >= 2 {
                let (m, l) = rsc_rsm_quadratic(&a, s.len()).unwrap();
                let nu = subadditivity_ratio_set(&o, &s).unwrap().value;
                if nu < nu_lower_bound_rsc(m, l).unwrap() - TOL {
                    nu_viol += 1;
                }
            }
        }
    }
    verdict(
        gamma_viol + nu_viol + lemma_viol == 0,
        format!(
            "200 quadratics, {supports_checked} supports: γ >= m/L violations {gamma_viol}, ν >= m/L violations {nu_viol}, gradient sandwich violations {lemma_viol}"
        ),
    )
}

fn nice_once<F: SetFunction>(o: &Oracle<F>, r: &mut impl Rng) -> Option<bool> {
    let d = o.ground_size();
    let size = r.random_range(2..=d);
    let mut s = sample(r, d, size).into_vec();
    s.sort_unstable();
    let k = r.random_range(1..size);
    let g = greedy(o, &s, k).unwrap().selected();
    let unselected: Vec<usize> = s.iter().copied().filter(|x| !g.contains(x)).collect();
    let x = unselected[r.random_range(0..unselected.len())];
    let rest: Vec<usize> = s.iter().copied().filter(|&e| e != x).collect();
    Some(greedy(o, &rest, k).unwrap().selected() == g)
}

fn c6_niceness() -> Verdict {
    let mut r = rng(6006);
    let mut violations = 0;
    for i in 0..1000 {
        let d = r.random_range(3..=10);
        let same = match i % 3 {
            0 => nice_once(&Oracle::new(random_modular(&mut r, d)).unwrap(), &mut r),
            1 => nice_once(&Oracle::new(random_coverage(&mut r, d, 12)).unwrap(), &mut r),
            _ => {
                let n = d + r.random_range(2..=10);
                nice_once(&Oracle::new(R2Objective::new(random_regression(&mut r, n, d))).unwrap(), &mut r)
            }
        };
        if same != Some(true) {
            violations += 1;
        }
    }
    verdict(violations == 0, format!("1000 trials, {violations} violations"))
}

fn rows_of<'a>(rows: &'a [MetricsRow], name: &str) -> Vec<&'a MetricsRow> {
    rows.iter().filter(|r| r.algorithm == name).collect()
}

fn c7_experiment_shape() -> Verdict {
    let cfg = ExperimentConfig { n: 200, d: 250, s: 25, l: 10, k: (1..=25).collect(), iterations: 10, seed: 7, ..Default::default() };
    let rows = run_experiment(&cfg).unwrap();
    // greedy FS and OMP are nested in k, so their means never decrease; the randomized
    // algorithms are not nested and may dip by Monte Carlo noise (combined standard error)
    let mut monotone_breaks = Vec::new();
    let mut largest_dip = (0.0f64, String::new());
    for alg in &cfg.algorithms {
        let series = rows_of(&rows, alg.name());
        for w in series.windows(2) {
            let dip = w[0].loglik - w[1].loglik;
            let allowed = match alg {
                Algorithm::GreedyFs | Algorithm::Omp => 1e-12,
                _ => (w[0].loglik_se.powi(2) + w[1].loglik_se.powi(2)).sqrt(),
            };
            if dip > largest_dip.0 {
                largest_dip = (dip, format!("{alg}@{} {dip:.4} (allowed {allowed:.4})", w[1].sweep));
            }
            if dip > allowed {
                monotone_breaks.push(format!("{alg}@{}", w[1].sweep));
            }
        }
    }
    let fs = rows_of(&rows, Algorithm::GreedyFs.name());
    let omp = rows_of(&rows, Algorithm::Omp.name());
    let fs_below: Vec<f64> = fs.iter().zip(&omp).filter(|(f, o)| f.loglik < o.loglik - o.loglik_se).map(|(f, _)| f.sweep).collect();

    // δ-sweep on a logistic instance with strongly redundant features, timed on one thread
    let logistic = ExperimentConfig {
        n: 2000,
        d: 500,
        s: 50,
        alpha: 0.1,
        k: vec![10],
        delta: vec![0.001, 0.01, 0.1, 0.5],
        algorithms: vec![Algorithm::GreedyFs, Algorithm::StochasticGreedy],
        model: Model::Logistic,
        sweep: Sweep::Delta,
        iterations: 2,
        seed: 17,
        ..Default::default()
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let lrows = pool.install(|| run_experiment(&logistic)).unwrap();
    let full = lrows.iter().find(|r| r.algorithm == "greedy-fs").unwrap();
    let sg: Vec<&MetricsRow> = rows_of(&lrows, "stochastic-greedy");
    let evals_dec = sg.windows(2).all(|w| w[1].evals < w[0].evals);
    let time_dec = sg.windows(2).all(|w| w[1].time_s < w[0].time_s);
    let at01 = sg.iter().find(|r| r.sweep == 0.1).unwrap();
    let loss = 1.0 - at01.loglik / full.loglik;
    let curve: Vec<String> = sg.iter().map(|r| format!("δ={} evals={} t={:.3}s ll={:.4}", r.sweep, r.evals, r.time_s, r.loglik)).collect();
    verdict(
        monotone_breaks.is_empty() && fs_below.is_empty() && evals_dec && time_dec && loss <= 0.05,
        format!(
            "(a) monotone breaks {monotone_breaks:?}, largest dip {}; (b) FS below OMP-SE at k={fs_below:?}; (c) greedy ll={:.4} evals={} | {} | evals decreasing {evals_dec}, time decreasing {time_dec}, loss at δ=0.1 {:.2}%",
            largest_dip.1,
            full.loglik,
            full.evals,
            curve.join(", "),
            100.0 * loss
        ),
    )
}

fn c8_incremental_equivalence() -> Verdict {
    let mut r = rng(8008);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let d = r.random_range(2..=10);
        let n = d + r.random_range(1..=20);
        let inst = random_regression(&mut r, n, d);
        let size = r.random_range(0..=d);
        let s = sample(&mut r, d, size).into_vec();
        let fast = r2_value(&inst, &s).unwrap();
        let slow = lstsq_r2(inst.x(), inst.y(), &s);
        worst = worst.max((fast - slow).abs());
    }
    verdict(worst <= TOL, format!("500 calls, max |incremental - least squares| = {worst:.2e}"))
}

fn main() {
    let results = [
        criterion(1, "greedy guarantee against brute force", 60.0, c1_greedy_guarantee),
        criterion(2, "stochastic greedy expectation bound", 120.0, c2_stochastic),
        criterion(3, "distributed greedy expectation bound", 300.0, c3_distributed),
        criterion(4, "sparse-eigenvalue bounds on γ and ν for R²", 300.0, c4_regression_lemmas),
        criterion(5, "restricted concavity bounds on quadratics", 300.0, c5_quadratics),
        criterion(6, "greedy is 1-nice", 300.0, c6_niceness),
        criterion(7, "experiment shape", 600.0, c7_experiment_shape),
        criterion(8, "incremental R² matches least squares", 300.0, c8_incremental_equivalence),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
