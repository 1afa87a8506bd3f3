//! Platt scaling: a sigmoid `P(y = +1 | s) = 1 / (1 + exp(A s + B))` fitted
//! to decision values by a damped Newton method on the regularised
//! cross-entropy.

use serde::{Deserialize, Serialize};

use super::check_labels;
use crate::error::{Error, Result};

const MAX_ITER: usize = 100;
const MIN_STEP: f64 = 1e-10;
const SIGMA: f64 = 1e-12;
const GRAD_EPS: f64 = 1e-10;
const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlattParams {
    pub a: f64,
    pub b: f64,
}

/// Negative log-likelihood of soft targets under the sigmoid at `(a, b)`,
/// computed without overflow.
pub(crate) fn platt_objective(decisions: &[f64], targets: &[f64], a: f64, b: f64) -> f64 {
    decisions
        .iter()
        .zip(targets)
        .map(|(&s, &t)| {
            let z = s * a + b;
            if z >= 0.0 {
                t * z + (-z).exp().ln_1p()
            } else {
                (t - 1.0) * z + z.exp().ln_1p()
            }
        })
        .sum()
}

/// Soft targets `(N+ + 1)/(N+ + 2)` and `1/(N- + 2)`.
pub(crate) fn platt_targets(labels: &[i8]) -> Vec<f64> {
    let pos = labels.iter().filter(|&&y| y > 0).count() as f64;
    let neg = labels.len() as f64 - pos;
    let hi = (pos + 1.0) / (pos + 2.0);
    let lo = 1.0 / (neg + 2.0);
    labels.iter().map(|&y| if y > 0 { hi } else { lo }).collect()
}

pub fn platt_fit(decisions: &[f64], labels: &[i8]) -> Result<PlattParams> {
    if decisions.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            found: decisions.len(),
        });
    }
    check_labels(labels)?;
    if decisions.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("decision value"));
    }
    let targets = platt_targets(labels);
    let pos = labels.iter().filter(|&&y| y > 0).count() as f64;
    let neg = labels.len() as f64 - pos;

    let mut a = 0.0;
    let mut b = ((neg + 1.0) / (pos + 1.0)).ln();
    let mut fval = platt_objective(decisions, &targets, a, b);

    for _ in 0..MAX_ITER {
        let (mut h11, mut h22, mut h21) = (SIGMA, SIGMA, 0.0);
        let (mut g1, mut g2) = (0.0, 0.0);
        for (&s, &t) in decisions.iter().zip(&targets) {
            let z = s * a + b;
            let (p, q) = if z >= 0.0 {
                let e = (-z).exp();
                (e / (1.0 + e), 1.0 / (1.0 + e))
            } else {
                let e = z.exp();
                (1.0 / (1.0 + e), e / (1.0 + e))
            };
            let d2 = p * q;
            h11 += s * s * d2;
            h22 += d2;
            h21 += s * d2;
            let d1 = t - p;
            g1 += s * d1;
            g2 += d1;
        }
        if g1.abs() < GRAD_EPS && g2.abs() < GRAD_EPS {
            break;
        }
        let det = h11 * h22 - h21 * h21;
        let da = -(h22 * g1 - h21 * g2) / det;
        let db = -(-h21 * g1 + h11 * g2) / det;
        let gd = g1 * da + g2 * db;

        let mut step = 1.0;
        while step >= MIN_STEP {
            let na = a + step * da;
            let nb = b + step * db;
            let nf = platt_objective(decisions, &targets, na, nb);
            if nf < fval + 1e-4 * step * gd {
                a = na;
                b = nb;
                fval = nf;
                break;
            }
            step /= 2.0;
        }
        if step < MIN_STEP {
            break;
        }
    }
    Ok(PlattParams { a, b })
}

/// Sigmoid probability, clipped away from 0 and 1.
pub fn platt_prob(params: PlattParams, s: f64) -> f64 {
    let z = params.a * s + params.b;
    let p = if z >= 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    };
    p.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR)
}
