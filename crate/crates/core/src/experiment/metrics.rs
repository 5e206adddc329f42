use nalgebra::DVector;

use crate::concave::{Logistic, SmoothObjective};
use crate::error::{Error, Result};
use crate::regression::RegressionInstance;

/// Scores from a selection order: the first pick scores `k`, the last `1`, unselected `0`.
pub fn selection_scores(d: usize, selected: &[usize]) -> Vec<f64> {
    let mut scores = vec![0.0; d];
    for (pos, &j) in selected.iter().enumerate() {
        scores[j] = (selected.len() - pos) as f64;
    }
    scores
}

/// Area under the ROC curve: the probability that a true-support feature outscores a
/// non-support feature, ties counting one half.
pub fn auroc(scores: &[f64], support: &[usize]) -> Result<f64> {
    let mut positive = vec![false; scores.len()];
    for &j in support {
        if j >= scores.len() {
            return Err(Error::domain(format!("support index {j} out of range")));
        }
        positive[j] = true;
    }
    let (pos, neg): (Vec<(usize, &f64)>, Vec<(usize, &f64)>) = scores.iter().enumerate().partition(|(j, _)| positive[*j]);
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::UndefinedMetric("AUROC needs both support and non-support features".into()));
    }
    let mut wins = 0.0;
    for (_, p) in &pos {
        for (_, q) in &neg {
            if p > q {
                wins += 1.0;
            } else if p == q {
                wins += 0.5;
            }
        }
    }
    Ok(wins / (pos.len() * neg.len()) as f64)
}

/// Percentage of the true support that was selected.
pub fn support_recovery(selected: &[usize], support: &[usize]) -> f64 {
    if support.is_empty() {
        return f64::NAN;
    }
    let hit = support.iter().filter(|j| selected.contains(j)).count();
    100.0 * hit as f64 / support.len() as f64
}

/// `1 − ‖y − Xβ‖² / ‖y‖²` on held-out data.
pub fn test_r2(test: &RegressionInstance, beta: &DVector<f64>) -> f64 {
    let resid = test.y() - test.x() * beta;
    1.0 - resid.norm_squared() / test.y().norm_squared()
}

/// Fraction of the null deviance explained: `(ℓ(β) − ℓ(0)) / (0 − ℓ(0))`, where `ℓ = 0` is
/// the saturated model.
pub fn normalized_log_likelihood(model: &Logistic, beta: &DVector<f64>) -> f64 {
    let null = model.value_on(&[], &[]);
    (model.log_likelihood(beta) - null) / -null
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn auroc_hand_enumerated() {
        assert_eq!(auroc(&[3.0, 1.0, 2.0], &[0, 2]).unwrap(), 1.0);
        assert_eq!(auroc(&[3.0, 1.0, 2.0], &[1]).unwrap(), 0.0);
        assert_eq!(auroc(&[1.0, 1.0], &[0]).unwrap(), 0.5);
        assert_eq!(auroc(&[4.0, 3.0, 2.0, 1.0], &[0, 1]).unwrap(), 1.0);
        assert_eq!(auroc(&[1.0, 2.0, 3.0, 4.0], &[0, 1]).unwrap(), 0.0);
        assert!(matches!(auroc(&[1.0, 2.0], &[0, 1]), Err(Error::UndefinedMetric(_))));
        assert!(matches!(auroc(&[1.0, 2.0], &[]), Err(Error::UndefinedMetric(_))));
    }

    #[test]
    fn scores_from_order() {
        assert_eq!(selection_scores(4, &[2, 0]), vec![1.0, 0.0, 2.0, 0.0]);
        // feature 3 is unselected and ties with feature 1 at the bottom
        let s = selection_scores(4, &[2, 0]);
        assert_eq!(auroc(&s, &[2, 3]).unwrap(), (1.0 + 1.0 + 0.0 + 0.5) / 4.0);
    }

    #[test]
    fn recovery_percent() {
        assert_eq!(support_recovery(&[1, 2, 9], &[2, 3, 9, 11]), 50.0);
        assert!(support_recovery(&[1], &[]).is_nan());
    }

    #[test]
    fn perfect_fit_scores_one() {
        let x = DMatrix::<f64>::identity(3, 3);
        let y = DVector::from_vec(vec![0.8, 0.6, 0.0]);
        let inst = RegressionInstance::new(x, y.clone()).unwrap();
        assert!((test_r2(&inst, &y) - 1.0).abs() < 1e-15);
        assert!((test_r2(&inst, &DVector::zeros(3))).abs() < 1e-15);
    }
}
