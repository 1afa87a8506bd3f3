//! Bradley-Terry-Luce aggregation of a reciprocal preference relation.

use serde::{Deserialize, Serialize};

use super::PreferenceMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 10_000;
/// Preferences are kept inside `[EPS, 1 - EPS]` so the estimate stays finite.
pub const P_CLIP: f64 = 1e-6;

/// Positive utilities on the simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BtlParams {
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BtlFit {
    pub params: BtlParams,
    pub iterations: usize,
    pub converged: bool,
    /// Log-likelihood at the start and after every sweep.
    pub log_likelihoods: Vec<f64>,
}

/// Clipped copy of `p`; the larger side of each pair is capped at
/// `1 - P_CLIP` and the smaller is its complement.
fn clipped(p: &PreferenceMatrix) -> Vec<Vec<f64>> {
    let n = p.len();
    let mut c = vec![vec![0.5; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (p.get(i, j), p.get(j, i));
            if a >= b {
                let hi = a.min(1.0 - P_CLIP);
                c[i][j] = hi;
                c[j][i] = 1.0 - hi;
            } else {
                let hi = b.min(1.0 - P_CLIP);
                c[j][i] = hi;
                c[i][j] = 1.0 - hi;
            }
        }
    }
    c
}

/// `sum_{i != j} p_ij ln(theta_i / (theta_i + theta_j))`
pub fn log_likelihood(p: &[Vec<f64>], theta: &[f64]) -> f64 {
    let n = theta.len();
    let mut ll = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                ll += p[i][j] * (theta[i] / (theta[i] + theta[j])).ln();
            }
        }
    }
    ll
}

/// Maximum-likelihood utilities by minorisation-maximisation. All
/// coordinates are updated from the previous sweep and then rescaled to sum
/// to one. Stops once no coordinate moves by `tol` or more.
pub fn btl_fit(p: &PreferenceMatrix, tol: f64, max_iter: usize) -> Result<BtlFit> {
    let n = p.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty preference matrix".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let c = clipped(p);
    let wins: Vec<f64> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i).map(|j| c[i][j]).sum())
        .collect();

    let mut theta = vec![1.0 / n as f64; n];
    let mut lls = vec![log_likelihood(&c, &theta)];
    let mut iterations = 0;
    let mut converged = n == 1;
    while !converged && iterations < max_iter {
        iterations += 1;
        let mut next: Vec<f64> = (0..n)
            .map(|i| {
                let denom: f64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (c[i][j] + c[j][i]) / (theta[i] + theta[j]))
                    .sum();
                wins[i] / denom
            })
            .collect();
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|t| *t /= total);
        let delta = theta
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        theta = next;
        lls.push(log_likelihood(&c, &theta));
        converged = delta < tol;
    }
    if theta.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::NonFinite("BTL utilities"));
    }
    Ok(BtlFit {
        params: BtlParams { theta },
        iterations,
        converged,
        log_likelihoods: lls,
    })
}

/// Item indices from best to worst; equal utilities keep input order.
pub fn rank_from_theta(theta: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..theta.len()).collect();
    idx.sort_by(|&a, &b| theta[b].total_cmp(&theta[a]));
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two(p: f64) -> PreferenceMatrix {
        PreferenceMatrix::new(vec![vec![0.5, p], vec![1.0 - p, 0.5]]).unwrap()
    }

    #[test]
    fn two_items() {
        let fit = btl_fit(&two(0.5), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(fit.params.theta, vec![0.5, 0.5]);
        let fit = btl_fit(&two(0.75), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let t = &fit.params.theta;
        assert!((t[0] / t[1] - 3.0).abs() < 1e-6);
        assert!(fit.converged);
    }

    #[test]
    fn saturated_preferences_stay_finite() {
        let fit = btl_fit(&two(1.0), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let t = &fit.params.theta;
        let expected = (1.0 - P_CLIP) / P_CLIP;
        assert!((t[0] / t[1] / expected - 1.0).abs() < 1e-6);
    }

    #[test]
    fn single_item() {
        let p = PreferenceMatrix::new(vec![vec![0.5]]).unwrap();
        assert_eq!(btl_fit(&p, DEFAULT_TOL, 10).unwrap().params.theta, vec![1.0]);
    }

    #[test]
    fn ordering_examples() {
        assert_eq!(rank_from_theta(&[0.2, 0.5, 0.3]), vec![1, 2, 0]);
        assert_eq!(rank_from_theta(&[0.25; 4]), vec![0, 1, 2, 3]);
        assert_eq!(rank_from_theta(&[0.4, 0.3, 0.2, 0.1]), vec![0, 1, 2, 3]);
    }

    fn reciprocal(n: usize) -> impl Strategy<Value = PreferenceMatrix> {
        proptest::collection::vec(0.0f64..=1.0, n * (n - 1) / 2).prop_map(move |upper| {
            let mut rows = vec![vec![0.5; n]; n];
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    rows[i][j] = upper[k];
                    rows[j][i] = 1.0 - upper[k];
                    k += 1;
                }
            }
            PreferenceMatrix::new(rows).unwrap()
        })
    }

    proptest! {
        #[test]
        fn likelihood_never_decreases(p in (2usize..9).prop_flat_map(reciprocal)) {
            let fit = btl_fit(&p, DEFAULT_TOL, 2000).unwrap();
            for w in fit.log_likelihoods.windows(2) {
                prop_assert!(w[1] >= w[0] - 1e-12 * w[0].abs().max(1.0), "{} -> {}", w[0], w[1]);
            }
            let s: f64 = fit.params.theta.iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
            prop_assert!(fit.params.theta.iter().all(|&t| t > 0.0));
        }

        #[test]
        fn scaling_theta_keeps_the_order(
            values in Just((1..=10).map(f64::from).collect::<Vec<f64>>()).prop_shuffle(),
            k in 0.1f64..100.0,
        ) {
            let scaled: Vec<f64> = values.iter().map(|t| t * k).collect();
            let total: f64 = scaled.iter().sum();
            let normalized: Vec<f64> = scaled.iter().map(|t| t / total).collect();
            prop_assert_eq!(rank_from_theta(&values), rank_from_theta(&normalized));
        }

        #[test]
        fn dominating_row_gets_larger_utility(p in (3usize..7).prop_flat_map(reciprocal)) {
            let n = p.len();
            let fit = btl_fit(&p, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            let c = clipped(&p);
            for i in 0..n {
                for j in 0..n {
                    if i == j { continue; }
                    let dominates = (0..n).filter(|&k| k != i && k != j).all(|k| c[i][k] >= c[j][k])
                        && c[i][j] >= c[j][i]
                        && ((0..n).filter(|&k| k != i && k != j).any(|k| c[i][k] > c[j][k]) || c[i][j] > c[j][i]);
                    if dominates && fit.converged {
                        prop_assert!(fit.params.theta[i] > fit.params.theta[j]);
                    }
                }
            }
        }
    }
}
