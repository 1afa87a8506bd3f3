//! Analogical proportions and the analogy kernel.
//!
//! For four values in `[0, 1]` the proportion `a:b::c:d` holds to degree
//! `1 - |(a - b) - (c - d)|` when both differences have the same sign and to
//! degree 0 otherwise. Read as a function of the two differences this is a
//! positive semi-definite kernel on `[-1, 1]`, and averaging it over features
//! gives a kernel on pairs of feature vectors.
//!
//! The sign is three-valued: a zero difference only matches another zero
//! difference. This reproduces the Boolean proportion table exactly.

pub mod check;
pub mod psd;

use serde::{Deserialize, Serialize};

use crate::data::FeatureVector;
use crate::error::{Error, Result};

pub use check::{kernel_check, KernelCheckConfig, KernelCheckReport};
pub use psd::{is_psd, min_eigenvalue, principal_minors_nonnegative, GramMatrix};

/// How per-feature kernel values are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelVariant {
    /// Arithmetic mean over features.
    Mean,
    /// Square of the mean (homogeneous polynomial kernel of degree 2).
    #[default]
    Poly2,
}

impl std::str::FromStr for KernelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Self::Mean),
            "poly2" => Ok(Self::Poly2),
            other => Err(Error::InvalidArgument(format!(
                "unknown kernel variant '{other}' (expected 'mean' or 'poly2')"
            ))),
        }
    }
}

impl std::fmt::Display for KernelVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Mean => "mean",
            Self::Poly2 => "poly2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KernelSpec {
    pub variant: KernelVariant,
}

impl KernelSpec {
    pub const MEAN: KernelSpec = KernelSpec {
        variant: KernelVariant::Mean,
    };
    pub const POLY2: KernelSpec = KernelSpec {
        variant: KernelVariant::Poly2,
    };

    pub fn new(variant: KernelVariant) -> Self {
        Self { variant }
    }

    /// Kernel value between two difference vectors that are already known
    /// to lie in `[-1, 1]^d` and to share a dimension.
    pub fn eval_diffs(&self, u: &[f64], v: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), v.len());
        let d = u.len();
        if d == 0 {
            return 1.0;
        }
        let sum: f64 = u.iter().zip(v).map(|(&x, &y)| scalar_kernel_unchecked(x, y)).sum();
        let mean = sum / d as f64;
        match self.variant {
            KernelVariant::Mean => mean,
            KernelVariant::Poly2 => mean * mean,
        }
    }
}

/// Three-valued sign: -1, 0 or +1.
#[inline]
fn sign_class(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

#[inline]
pub(crate) fn scalar_kernel_unchecked(u: f64, v: f64) -> f64 {
    if sign_class(u) == sign_class(v) {
        1.0 - (u - v).abs()
    } else {
        0.0
    }
}

fn check_range(x: f64, lo: f64, hi: f64) -> Result<()> {
    if (lo..=hi).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain { value: x, lo, hi })
    }
}

/// The Boolean analogical proportion: true for exactly the six quadruples
/// in which `a` differs from `b` as `c` differs from `d`.
pub fn boolean_proportion(a: bool, b: bool, c: bool, d: bool) -> bool {
    matches!(
        (a, b, c, d),
        (false, false, false, false)
            | (false, false, true, true)
            | (false, true, false, true)
            | (true, false, true, false)
            | (true, true, false, false)
            | (true, true, true, true)
    )
}

/// Graded analogical proportion on `[0, 1]`.
pub fn proportion_degree(a: f64, b: f64, c: f64, d: f64) -> Result<f64> {
    for x in [a, b, c, d] {
        check_range(x, 0.0, 1.0)?;
    }
    Ok(scalar_kernel_unchecked(a - b, c - d))
}

/// The analogy kernel on scalar differences in `[-1, 1]`.
pub fn scalar_kernel(u: f64, v: f64) -> Result<f64> {
    check_range(u, -1.0, 1.0)?;
    check_range(v, -1.0, 1.0)?;
    Ok(scalar_kernel_unchecked(u, v))
}

/// Feature-wise differences `first - second`, checking both vectors lie in
/// the unit cube and share a dimension.
pub fn pair_difference(first: &[f64], second: &[f64]) -> Result<Vec<f64>> {
    if first.len() != second.len() {
        return Err(Error::DimensionMismatch {
            expected: first.len(),
            found: second.len(),
        });
    }
    first
        .iter()
        .zip(second)
        .map(|(&a, &b)| {
            check_range(a, 0.0, 1.0)?;
            check_range(b, 0.0, 1.0)?;
            Ok(a - b)
        })
        .collect()
}

/// Kernel between item pairs `p = (a, b)` and `q = (c, d)`.
pub fn pair_kernel(
    p: (&FeatureVector, &FeatureVector),
    q: (&FeatureVector, &FeatureVector),
    spec: KernelSpec,
) -> Result<f64> {
    let u = pair_difference(p.0, p.1)?;
    let v = pair_difference(q.0, q.1)?;
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(spec.eval_diffs(&u, &v))
}

/// Gram matrix over a list of item pairs.
pub fn gram_matrix(pairs: &[(FeatureVector, FeatureVector)], spec: KernelSpec) -> Result<GramMatrix> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("empty pair list".into()));
    }
    let diffs = pairs
        .iter()
        .map(|(a, b)| pair_difference(a, b))
        .collect::<Result<Vec<_>>>()?;
    let d = diffs[0].len();
    if let Some(bad) = diffs.iter().find(|u| u.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.len(),
        });
    }
    Ok(GramMatrix::from_diffs(&diffs, spec))
}

/// Gram matrix of the scalar kernel over values in `[-1, 1]`.
pub fn scalar_gram(values: &[f64]) -> Result<GramMatrix> {
    for &v in values {
        check_range(v, -1.0, 1.0)?;
    }
    Ok(GramMatrix::from_fn(values.len(), |i, j| {
        scalar_kernel_unchecked(values[i], values[j])
    }))
}
