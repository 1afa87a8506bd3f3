//! Ranking loss.

use crate::error::{Error, Result};

/// Fraction of item pairs ordered differently by two rankings, given as
/// position vectors (`pi[k]` is the position of item `k`).
pub fn ranking_loss(pi: &[usize], pi_star: &[usize]) -> Result<f64> {
    let n = pi.len();
    if pi_star.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: pi_star.len(),
        });
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "ranking loss needs at least 2 items, got {n}"
        )));
    }
    for p in [pi, pi_star] {
        let mut sorted = p.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("positions must be distinct".into()));
        }
    }
    Ok(discordant_pairs(pi, pi_star) as f64 / (n * (n - 1) / 2) as f64)
}

/// Number of pairs `i < j` ordered one way by `a` and the other by `b`.
/// Counted by merge sort in `O(n log n)`.
pub fn discordant_pairs(a: &[usize], b: &[usize]) -> usize {
    let mut idx: Vec<usize> = (0..a.len()).collect();
    idx.sort_by_key(|&i| a[i]);
    let mut seq: Vec<usize> = idx.into_iter().map(|i| b[i]).collect();
    let mut buf = vec![0; seq.len()];
    count_inversions(&mut seq, &mut buf)
}

fn count_inversions(v: &mut [usize], buf: &mut [usize]) -> usize {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = count_inversions(&mut v[..mid], &mut buf[..mid]);
    count += count_inversions(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[i] <= v[j] {
            buf[k] = v[i];
            i += 1;
        } else {
            buf[k] = v[j];
            count += mid - i;
            j += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    count
}
