//! Two-sample Kolmogorov-Smirnov test and the normalisation gate built on it.

use serde::{Deserialize, Serialize};

use super::dataset::{check_schema, FeatureVector, RankedDataset};
use super::normalize::NormalizationScope;
use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsDecision {
    /// Supremum distance between the two empirical CDFs.
    pub statistic: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub rejected: bool,
}

/// `sup_x |F_a(x) - F_b(x)|` over the pooled sample, with ties handled by
/// advancing both ECDFs past a shared value before comparing.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("sample contains NaN".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

/// Survival function of the Kolmogorov distribution,
/// `Q(λ) = 2 Σ_{k≥1} (-1)^{k-1} exp(-2 k² λ²)`.
///
/// Below λ = 1.18 the alternating series converges slowly, so the CDF's
/// theta-function form is summed instead.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let q = if lambda < 1.18 {
        let y = (-std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda)).exp();
        let mut sum = 0.0;
        for k in 0..100 {
            let e = ((2 * k + 1) * (2 * k + 1)) as f64;
            let term = y.powf(e);
            sum += term;
            if term < 1e-17 {
                break;
            }
        }
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda * sum;
        1.0 - cdf
    } else {
        let mut sum = 0.0;
        let mut sign = 1.0;
        for k in 1..=100 {
            let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
            sum += sign * term;
            sign = -sign;
            if term < 1e-17 {
                break;
            }
        }
        2.0 * sum
    };
    q.clamp(0.0, 1.0)
}

/// Two-sample KS test with the asymptotic p-value at effective size
/// `nm / (n + m)`. Rejects when `p < alpha`.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<KsDecision> {
    let statistic = ks_statistic(a, b)?;
    let (n, m) = (a.len() as f64, b.len() as f64);
    let en = n * m / (n + m);
    let p_value = kolmogorov_survival(en.sqrt() * statistic);
    Ok(KsDecision {
        statistic,
        p_value,
        alpha,
        rejected: p_value < alpha,
    })
}

/// Runs one KS test per feature at the Bonferroni level `alpha / d`.
pub fn ks_gate<'a>(
    train: impl IntoIterator<Item = &'a FeatureVector>,
    test: impl IntoIterator<Item = &'a FeatureVector>,
    alpha: f64,
) -> Result<Vec<KsDecision>> {
    let train: Vec<&FeatureVector> = train.into_iter().collect();
    let test: Vec<&FeatureVector> = test.into_iter().collect();
    let d = train.first().ok_or(Error::EmptySample)?.dim();
    if test.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(bad) = train.iter().chain(&test).find(|r| r.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.dim(),
        });
    }
    let level = alpha / d.max(1) as f64;
    (0..d)
        .map(|k| {
            let a: Vec<f64> = train.iter().map(|r| r[k]).collect();
            let b: Vec<f64> = test.iter().map(|r| r[k]).collect();
            ks_two_sample(&a, &b, level)
        })
        .collect()
}

/// Test-only normalisation if any feature's distribution differs between the
/// two samples, pooled statistics otherwise.
pub fn choose_scope_for_items<'a>(
    train: impl IntoIterator<Item = &'a FeatureVector>,
    test: impl IntoIterator<Item = &'a FeatureVector>,
    alpha: f64,
) -> Result<NormalizationScope> {
    let decisions = ks_gate(train, test, alpha)?;
    Ok(if decisions.iter().any(|d| d.rejected) {
        NormalizationScope::TestOnly
    } else {
        NormalizationScope::TrainPlusTest
    })
}

pub fn choose_normalization_scope(
    train: &RankedDataset,
    test: &RankedDataset,
    alpha: f64,
) -> Result<NormalizationScope> {
    check_schema(&train.schema, &test.schema)?;
    choose_scope_for_items(train.items(), test.items(), alpha)
}
