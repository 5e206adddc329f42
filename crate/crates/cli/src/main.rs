use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use subsel_core::experiment::{emit_outputs, generate_logistic, generate_synthetic, run_experiment, ExperimentConfig, Model};
use subsel_core::linalg::{sparse_eigenvalues, ENUMERATION_BUDGET};
use subsel_core::ratio::{brute_force_opt, subadditivity_ratio_k, submodularity_ratio_uniform, D_MAX_BRUTEFORCE};
use subsel_core::regression::format_support;
use subsel_core::{
    greedy, make_certificate, BoundKind, Error, Oracle, R2Objective, RandomSource, RatioSource, RegressionInstance,
    Result,
};

#[derive(Parser)]
#[command(name = "subsel", version, about = "Greedy subset selection for weakly submodular objectives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write metrics.csv plus a plot script.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (defaults to all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Brute-force ratios, the optimum and bound certificates for the R² objective of a CSV table.
    Ratios {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        k: usize,
        /// δ used for the stochastic certificate.
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
    },
    /// Write one synthetic training table (features, then the response or ±1 label).
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn run(config: PathBuf, out: PathBuf, seed: Option<u64>, threads: Option<usize>) -> Result<()> {
    let mut cfg = ExperimentConfig::from_path(&config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let rows = pool.install(|| run_experiment(&cfg))?;
    let summary = emit_outputs(&rows, &out)?;
    println!("rows={}", rows.len());
    println!("metrics={}", summary.metrics.display());
    println!("plot_script={}", summary.plot_script.display());
    if !summary.nan_rows.is_empty() {
        eprintln!("rows with undefined metrics (written as nan): {}", summary.nan_rows.join(", "));
    }
    Ok(())
}

fn ratios(csv: PathBuf, k: usize, delta: f64) -> Result<()> {
    let inst = RegressionInstance::from_csv(&csv)?.normalize()?;
    let d = inst.d();
    if d > D_MAX_BRUTEFORCE {
        return Err(Error::Resource { what: format!("brute-force ratios on {d} features"), limit: D_MAX_BRUTEFORCE as u64 });
    }
    if k == 0 || k > d {
        return Err(Error::Config(format!("k = {k} must lie in 1..={d}")));
    }
    let spectral = sparse_eigenvalues(inst.gram(), (2 * k).min(d), ENUMERATION_BUDGET)?;
    let oracle = Oracle::new(R2Objective::new(inst))?;
    let all: Vec<usize> = (0..d).collect();
    let gamma = submodularity_ratio_uniform(&oracle, k, k)?;
    let nu = subadditivity_ratio_k(&oracle, k)?;
    let (opt_set, opt) = brute_force_opt(&oracle, k)?;
    let g = greedy(&oracle, &all, k)?;

    let mut lines = vec![format!("d={d}"), format!("k={k}")];
    lines.extend(gamma.to_lines("gamma"));
    lines.extend(nu.to_lines("nu"));
    lines.push(format!("opt.value={opt}"));
    lines.push(format!("opt.support={}", format_support(&opt_set)));
    lines.push(format!("greedy_run.value={}", g.value()));
    lines.push(format!("greedy_run.support={}", format_support(&g.selected())));
    for cert in [
        make_certificate(BoundKind::Greedy, gamma.value, None, None, Some(opt))?,
        make_certificate(BoundKind::Stochastic, gamma.value, None, Some(delta), Some(opt))?,
        make_certificate(BoundKind::Distributed, gamma.value, Some(nu.value), None, Some(opt))?,
    ] {
        lines.extend(cert.to_lines());
    }
    let spectral_gamma = spectral.lambda_min.max(0.0);
    lines.push(format!("spectral.lambda_min_{}={}", spectral.k, spectral.lambda_min));
    let cert = make_certificate(BoundKind::Greedy, spectral_gamma, None, None, Some(opt))?
        .with_source(RatioSource::SparseEigenvalues);
    lines.extend(cert.to_lines().into_iter().map(|l| format!("spectral.{l}")));
    for l in lines {
        println!("{l}");
    }
    Ok(())
}

fn synth(out: PathBuf, config: Option<PathBuf>, seed: Option<u64>) -> Result<()> {
    let mut cfg = match config {
        Some(p) => ExperimentConfig::from_path(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let mut rng = RandomSource::new(cfg.seed).rng();
    let file = std::fs::File::create(&out)?;
    let support = match cfg.model {
        Model::Regression => {
            let data = generate_synthetic(&cfg, &mut rng)?;
            subsel_core::data::write_table(file, data.train.x(), data.train.y())?;
            data.support
        }
        Model::Logistic => {
            let data = generate_logistic(&cfg, &mut rng)?;
            subsel_core::data::write_table(file, data.train.x(), data.train.labels())?;
            data.support
        }
    };
    println!("support={}", format_support(&support));
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::Resource { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, seed, threads } => run(config, out, seed, threads),
        Command::Ratios { csv, k, delta } => ratios(csv, k, delta),
        Command::Synth { out, config, seed } => synth(out, config, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::debug!("{e:?}");
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
