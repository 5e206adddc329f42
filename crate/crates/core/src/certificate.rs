use std::fmt;

use crate::error::{Error, Result};

/// Which approximation guarantee a certificate instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// `1 − e^{−γ}`
    Greedy,
    /// `1 − e^{−γ} − δ`, in expectation over subsamples.
    Stochastic,
    /// `(ν/2)(1 − e^{−γ})`, in expectation over partitions.
    Distributed,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Greedy => "greedy",
            BoundKind::Stochastic => "stochastic",
            BoundKind::Distributed => "distributed",
        })
    }
}

/// Where the ratio inputs came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioSource {
    BruteForce,
    /// k-sparse eigenvalues of the design covariance.
    SparseEigenvalues,
    /// Restricted strong concavity / smoothness constants supplied at sparsity `order`.
    RestrictedConcavity { order: usize },
}

impl fmt::Display for RatioSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatioSource::BruteForce => f.write_str("brute_force"),
            RatioSource::SparseEigenvalues => f.write_str("sparse_eigenvalues"),
            RatioSource::RestrictedConcavity { order } => write!(f, "rsc_order_{order}"),
        }
    }
}

/// A closed-form approximation factor instantiated with concrete ratio values.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCertificate {
    pub kind: BoundKind,
    pub gamma: f64,
    pub nu: Option<f64>,
    pub delta: Option<f64>,
    /// Factor clamped to `[0, 1]`.
    pub factor: f64,
    pub opt_value: Option<f64>,
    pub source: RatioSource,
}

impl BoundCertificate {
    pub fn with_source(mut self, source: RatioSource) -> Self {
        self.source = source;
        self
    }

    /// `factor · OPT` when the optimum is known.
    pub fn guaranteed_value(&self) -> Option<f64> {
        self.opt_value.map(|o| self.factor * o)
    }

    /// Flat `key=value` lines, keys prefixed with the bound kind.
    pub fn to_lines(&self) -> Vec<String> {
        let p = self.kind;
        let mut out = vec![format!("{p}.gamma={}", self.gamma)];
        if let Some(nu) = self.nu {
            out.push(format!("{p}.nu={nu}"));
        }
        if let Some(delta) = self.delta {
            out.push(format!("{p}.delta={delta}"));
        }
        out.push(format!("{p}.factor={}", self.factor));
        if let Some(opt) = self.opt_value {
            out.push(format!("{p}.opt={opt}"));
            out.push(format!("{p}.guaranteed={}", self.factor * opt));
        }
        out.push(format!("{p}.source={}", self.source));
        out
    }
}

/// Builds the certificate for `kind` from its closed form.
pub fn make_certificate(
    kind: BoundKind,
    gamma: f64,
    nu: Option<f64>,
    delta: Option<f64>,
    opt_value: Option<f64>,
) -> Result<BoundCertificate> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::domain(format!("submodularity ratio must be nonnegative, got {gamma}")));
    }
    let base = 1.0 - (-gamma).exp();
    let raw = match kind {
        BoundKind::Greedy => base,
        BoundKind::Stochastic => {
            let d = delta.ok_or_else(|| Error::domain("stochastic certificate needs delta"))?;
            if !(d > 0.0 && d < 1.0) {
                return Err(Error::domain(format!("delta = {d} must lie in (0, 1)")));
            }
            base - d
        }
        BoundKind::Distributed => {
            let n = nu.ok_or_else(|| Error::domain("distributed certificate needs nu"))?;
            if n.is_nan() || n < 0.0 {
                return Err(Error::domain(format!("subadditivity ratio must be nonnegative, got {n}")));
            }
            n / 2.0 * base
        }
    };
    Ok(BoundCertificate {
        kind,
        gamma,
        nu,
        delta,
        factor: raw.clamp(0.0, 1.0),
        opt_value,
        source: RatioSource::BruteForce,
    })
}
