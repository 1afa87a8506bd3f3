//! Reciprocal preference relations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::PairInstance;
use crate::data::FeatureVector;
use crate::error::{Error, Result};
use crate::kernel::{pair_difference, KernelSpec};
use crate::svm::{platt_prob, SvmModel};

const RECIPROCITY_TOL: f64 = 1e-12;

/// `n x n` matrix with `p[i][j] + p[j][i] = 1` and `0.5` on the diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct PreferenceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl PreferenceMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NonSquare {
                rows: n,
                cols: r.len(),
            });
        }
        let values: Vec<f64> = rows.into_iter().flatten().collect();
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidArgument("preferences must lie in [0, 1]".into()));
        }
        let m = Self { n, values };
        for i in 0..n {
            for j in i..n {
                let s = m.get(i, j) + m.get(j, i);
                if (s - 1.0).abs() > RECIPROCITY_TOL {
                    return Err(Error::NotReciprocal { i, j });
                }
            }
        }
        Ok(m)
    }

    /// Builds the matrix from a rule `f(i, j)` that is reciprocal in exact
    /// arithmetic. For each pair the larger of `f(i, j)` and `f(j, i)` is
    /// kept and the other side is set to its complement, which makes the
    /// identity hold exactly and the result independent of item order.
    fn reciprocal_from(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut values = vec![0.5; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let a = f(i, j);
                let b = f(j, i);
                let (pij, pji) = if a >= b { (a, 1.0 - a) } else { (1.0 - b, b) };
                values[i * n + j] = pij;
                values[j * n + i] = pji;
            }
        }
        Self { n, values }
    }

    /// `p[i][j] = (1 + q[i][j] - q[j][i]) / 2` from degrees of support in
    /// `[0, 1]`; the diagonal of `q` is ignored.
    pub fn from_supports(q: &[Vec<f64>]) -> Result<Self> {
        let n = q.len();
        if let Some(r) = q.iter().find(|r| r.len() != n) {
            return Err(Error::NonSquare {
                rows: n,
                cols: r.len(),
            });
        }
        for (i, row) in q.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if i != j && !(0.0..=1.0).contains(v) {
                    return Err(Error::InvalidArgument(format!(
                        "support degree {v} at ({i}, {j}) is outside [0, 1]"
                    )));
                }
            }
        }
        Ok(Self::reciprocal_from(n, |i, j| (1.0 + q[i][j] - q[j][i]) / 2.0))
    }

    /// `p[i][j] = s[i][j] / (s[i][j] + s[j][i])` from non-negative evidence,
    /// or `0.5` when both sides are zero.
    pub fn from_evidence(s: &[Vec<f64>]) -> Result<Self> {
        let n = s.len();
        if let Some(r) = s.iter().find(|r| r.len() != n) {
            return Err(Error::NonSquare {
                rows: n,
                cols: r.len(),
            });
        }
        if s.iter().flatten().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument("evidence must be finite and non-negative".into()));
        }
        Ok(Self::reciprocal_from(n, |i, j| {
            let total = s[i][j] + s[j][i];
            if total > 0.0 {
                s[i][j] / total
            } else {
                0.5
            }
        }))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.n.max(1)).take(self.n).map(<[f64]>::to_vec).collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for PreferenceMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<PreferenceMatrix> for Vec<Vec<f64>> {
    fn from(m: PreferenceMatrix) -> Self {
        m.rows()
    }
}

/// Calibrated degrees of support `q[i][j]` for every ordered pair of
/// distinct query items, and the reciprocal matrix built from them.
///
/// `support_pairs[k]` must be the training pair of the k-th support vector
/// of `svm`. Query items must already be normalised to `[0, 1]`.
pub fn preference_matrix(
    svm: &SvmModel,
    support_pairs: &[PairInstance],
    kernel: KernelSpec,
    query: &[FeatureVector],
) -> Result<PreferenceMatrix> {
    if support_pairs.len() != svm.num_support() {
        return Err(Error::DimensionMismatch {
            expected: svm.num_support(),
            found: support_pairs.len(),
        });
    }
    let platt = svm
        .platt
        .ok_or_else(|| Error::InvalidArgument("model has no Platt calibration".into()))?;
    let support_diffs: Vec<Vec<f64>> = support_pairs
        .iter()
        .map(|p| pair_difference(&p.first, &p.second))
        .collect::<Result<_>>()?;
    let n = query.len();
    let q: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        return Ok(0.5);
                    }
                    let z = pair_difference(&query[i], &query[j])?;
                    if let Some(sd) = support_diffs.first() {
                        if sd.len() != z.len() {
                            return Err(Error::DimensionMismatch {
                                expected: sd.len(),
                                found: z.len(),
                            });
                        }
                    }
                    let f = svm.decision_with(|k| kernel.eval_diffs(&support_diffs[k], &z));
                    Ok(platt_prob(platt, f))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    PreferenceMatrix::from_supports(&q)
}
