use std::path::{Path, PathBuf};

use super::run::MetricsRow;
use crate::error::{Error, Result};

pub const METRICS_HEADER: [&str; 12] = [
    "algorithm",
    "sweep",
    "loglik",
    "test_r2",
    "auroc",
    "recovery",
    "time_s",
    "evals",
    "loglik_se",
    "test_r2_se",
    "auroc_se",
    "recovery_se",
];

pub const METRICS_FILE: &str = "metrics.csv";
pub const PLOT_SCRIPT_FILE: &str = "plot_metrics.py";

/// Files written by [`emit_outputs`].
#[derive(Debug, Clone, PartialEq)]
pub struct EmitSummary {
    pub metrics: PathBuf,
    pub plot_script: PathBuf,
    /// `algorithm@sweep` for every row holding a NaN metric.
    pub nan_rows: Vec<String>,
}

fn fmt_real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        v.to_string()
    }
}

fn parse_real(field: &str, line: usize) -> Result<f64> {
    field.parse().map_err(|_| Error::Parse(format!("{METRICS_FILE} line {line}: `{field}` is not a number")))
}

/// Writes `metrics.csv` and a matplotlib script plotting its four metric panels.
pub fn emit_outputs(rows: &[MetricsRow], dir: impl AsRef<Path>) -> Result<EmitSummary> {
    if rows.is_empty() {
        return Err(Error::domain("no metric rows to write"));
    }
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let metrics = dir.join(METRICS_FILE);
    let mut w = csv::Writer::from_path(&metrics)?;
    w.write_record(METRICS_HEADER)?;
    for r in rows {
        w.write_record([
            r.algorithm.clone(),
            fmt_real(r.sweep),
            fmt_real(r.loglik),
            fmt_real(r.test_r2),
            fmt_real(r.auroc),
            fmt_real(r.recovery),
            fmt_real(r.time_s),
            r.evals.to_string(),
            fmt_real(r.loglik_se),
            fmt_real(r.test_r2_se),
            fmt_real(r.auroc_se),
            fmt_real(r.recovery_se),
        ])?;
    }
    w.flush()?;
    let plot_script = dir.join(PLOT_SCRIPT_FILE);
    std::fs::write(&plot_script, PLOT_SCRIPT)?;
    let nan_rows = rows.iter().filter(|r| r.has_nan()).map(|r| format!("{}@{}", r.algorithm, r.sweep)).collect();
    Ok(EmitSummary { metrics, plot_script, nan_rows })
}

/// Reads a file written by [`emit_outputs`].
pub fn read_metrics(path: impl AsRef<Path>) -> Result<Vec<MetricsRow>> {
    let mut rdr = csv::Reader::from_path(path.as_ref())?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != METRICS_HEADER {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let f = |c: usize| parse_real(&rec[c], line);
        rows.push(MetricsRow {
            algorithm: rec[0].to_owned(),
            sweep: f(1)?,
            loglik: f(2)?,
            test_r2: f(3)?,
            auroc: f(4)?,
            recovery: f(5)?,
            time_s: f(6)?,
            evals: rec[7].parse().map_err(|_| Error::Parse(format!("line {line}: bad evaluation count")))?,
            loglik_se: f(8)?,
            test_r2_se: f(9)?,
            auroc_se: f(10)?,
            recovery_se: f(11)?,
        });
    }
    Ok(rows)
}

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Plot metrics.csv as four panels: log likelihood, test R^2, AUROC and support recovery."""
import csv
import os
import sys
from collections import OrderedDict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "metrics.csv")

series = OrderedDict()
with open(path, newline="") as fh:
    for row in csv.DictReader(fh):
        series.setdefault(row["algorithm"], []).append(row)

panels = [
    ("loglik", "Log likelihood (normalized)"),
    ("test_r2", "Generalization"),
    ("auroc", "Area under ROC"),
    ("recovery", "Support recovery (%)"),
]

fig, axes = plt.subplots(1, 4, figsize=(18, 4))
for ax, (key, title) in zip(axes, panels):
    for name, rows in series.items():
        rows = sorted(rows, key=lambda r: float(r["sweep"]))
        x = [float(r["sweep"]) for r in rows]
        y = [float(r[key]) for r in rows]
        err = [float(r[key + "_se"]) for r in rows]
        ax.errorbar(x, y, yerr=err, marker="o", markersize=3, capsize=2, label=name)
    ax.set_title(title)
    ax.set_xlabel("sweep")
axes[0].legend(fontsize="small")
fig.tight_layout()
out = os.path.splitext(path)[0] + ".png"
fig.savefig(out, dpi=150)
print(out)
"#;
