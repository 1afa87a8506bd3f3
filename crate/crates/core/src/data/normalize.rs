//! Per-feature min-max rescaling and standardisation.
//!
//! Constant features map to 0 under both schemes. Min-max output is clamped
//! to `[0, 1]`, so statistics fitted on one sample can be applied to another
//! without leaving the analogy kernel's domain.

use serde::{Deserialize, Serialize};

use super::dataset::FeatureVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizationMode {
    MinMax,
    ZScore,
}

/// Which sample the statistics were fitted on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormalizationScope {
    /// Training and test data are normalised separately, each with its own
    /// statistics.
    #[serde(rename = "test-only")]
    TestOnly,
    /// Statistics pooled over training and test data.
    #[serde(rename = "train+test")]
    TrainPlusTest,
}

impl std::str::FromStr for NormalizationScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "test-only" => Ok(Self::TestOnly),
            "train+test" => Ok(Self::TrainPlusTest),
            other => Err(Error::InvalidArgument(format!(
                "unknown normalization scope '{other}' (expected 'train+test' or 'test-only')"
            ))),
        }
    }
}

impl std::fmt::Display for NormalizationScope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::TestOnly => "test-only",
            Self::TrainPlusTest => "train+test",
        })
    }
}

/// Fitted per-feature statistics.
///
/// For [`NormalizationMode::MinMax`] `location`/`spread` hold the minimum and
/// maximum; for [`NormalizationMode::ZScore`] the mean and sample standard
/// deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub mode: NormalizationMode,
    pub scope: NormalizationScope,
    pub location: Vec<f64>,
    pub spread: Vec<f64>,
}

impl NormalizationStats {
    pub fn fit<'a, I>(mode: NormalizationMode, scope: NormalizationScope, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a FeatureVector>,
    {
        let rows: Vec<&FeatureVector> = rows.into_iter().collect();
        let d = rows.first().ok_or(Error::EmptySample)?.dim();
        if let Some(bad) = rows.iter().find(|r| r.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.dim(),
            });
        }
        let (location, spread) = match mode {
            NormalizationMode::MinMax => {
                let mut min = vec![f64::INFINITY; d];
                let mut max = vec![f64::NEG_INFINITY; d];
                for r in &rows {
                    for (k, &v) in r.iter().enumerate() {
                        min[k] = min[k].min(v);
                        max[k] = max[k].max(v);
                    }
                }
                (min, max)
            }
            NormalizationMode::ZScore => {
                let n = rows.len() as f64;
                let mut mean = vec![0.0; d];
                for r in &rows {
                    for (k, &v) in r.iter().enumerate() {
                        mean[k] += v;
                    }
                }
                mean.iter_mut().for_each(|m| *m /= n);
                let mut var = vec![0.0; d];
                for r in &rows {
                    for (k, &v) in r.iter().enumerate() {
                        var[k] += (v - mean[k]).powi(2);
                    }
                }
                // a single observation has no spread
                let std = var
                    .into_iter()
                    .map(|s| if rows.len() < 2 { 0.0 } else { (s / (n - 1.0)).sqrt() })
                    .collect();
                (mean, std)
            }
        };
        Ok(Self {
            mode,
            scope,
            location,
            spread,
        })
    }

    pub fn dim(&self) -> usize {
        self.location.len()
    }

    pub fn apply_one(&self, x: &FeatureVector) -> Result<FeatureVector> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        let values = x
            .iter()
            .zip(self.location.iter().zip(&self.spread))
            .map(|(&v, (&a, &b))| match self.mode {
                NormalizationMode::MinMax => {
                    let range = b - a;
                    if range > 0.0 {
                        ((v - a) / range).clamp(0.0, 1.0)
                    } else {
                        0.0
                    }
                }
                NormalizationMode::ZScore => {
                    if b > 0.0 {
                        (v - a) / b
                    } else {
                        0.0
                    }
                }
            })
            .collect();
        Ok(FeatureVector(values))
    }

    pub fn apply(&self, rows: &[FeatureVector]) -> Result<Vec<FeatureVector>> {
        rows.iter().map(|r| self.apply_one(r)).collect()
    }
}

fn fit_apply(
    mode: NormalizationMode,
    data: &[FeatureVector],
    stats: Option<&NormalizationStats>,
) -> Result<(Vec<FeatureVector>, NormalizationStats)> {
    let stats = match stats {
        Some(s) => {
            if s.mode != mode {
                return Err(Error::InvalidArgument(format!(
                    "expected {mode:?} statistics, got {:?}",
                    s.mode
                )));
            }
            s.clone()
        }
        None => NormalizationStats::fit(mode, NormalizationScope::TestOnly, data)?,
    };
    Ok((stats.apply(data)?, stats))
}

/// Rescales every feature to `[0, 1]`. Without `stats` the statistics are
/// fitted on `data` itself.
pub fn minmax_fit_apply(
    data: &[FeatureVector],
    stats: Option<&NormalizationStats>,
) -> Result<(Vec<FeatureVector>, NormalizationStats)> {
    fit_apply(NormalizationMode::MinMax, data, stats)
}

/// Standardises every feature with the mean and sample standard deviation.
pub fn zscore_fit_apply(
    data: &[FeatureVector],
    stats: Option<&NormalizationStats>,
) -> Result<(Vec<FeatureVector>, NormalizationStats)> {
    fit_apply(NormalizationMode::ZScore, data, stats)
}

/// Statistics for the training and the test side under `scope`.
pub fn fit_pair<'a>(
    mode: NormalizationMode,
    scope: NormalizationScope,
    train: impl IntoIterator<Item = &'a FeatureVector> + Clone,
    test: impl IntoIterator<Item = &'a FeatureVector> + Clone,
) -> Result<(NormalizationStats, NormalizationStats)> {
    match scope {
        NormalizationScope::TrainPlusTest => {
            let pooled = NormalizationStats::fit(mode, scope, train.into_iter().chain(test))?;
            Ok((pooled.clone(), pooled))
        }
        NormalizationScope::TestOnly => Ok((
            NormalizationStats::fit(mode, scope, train)?,
            NormalizationStats::fit(mode, scope, test)?,
        )),
    }
}
