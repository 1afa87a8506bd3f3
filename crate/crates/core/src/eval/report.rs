//! CSV and text-table output of benchmark results.

use std::io::Write;

use super::{average_ranks, ExperimentResult, Method};
use crate::error::Result;

/// `problem,method,mean,std,rank` with six decimals.
pub fn write_csv<W: Write>(results: &[ExperimentResult], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["problem", "method", "mean", "std", "rank"])?;
    for r in results {
        w.write_record([
            r.problem.clone(),
            r.method.to_string(),
            format!("{:.6}", r.mean),
            format!("{:.6}", r.std),
            r.rank.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn first_appearance<T: PartialEq + Clone>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out = Vec::new();
    for x in items {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// One row per problem with `mean±std (rank)` per method, followed by the
/// average rank of each method.
pub fn format_table(results: &[ExperimentResult]) -> Result<String> {
    let problems: Vec<String> = first_appearance(results.iter().map(|r| r.problem.clone()));
    let methods: Vec<Method> = first_appearance(results.iter().map(|r| r.method));
    let find = |p: &str, m: Method| results.iter().find(|r| r.problem == p && r.method == m);

    let mut rows: Vec<Vec<String>> = vec![std::iter::once("problem".to_string())
        .chain(methods.iter().map(|m| m.to_string()))
        .collect()];
    let mut rank_matrix = Vec::new();
    for p in &problems {
        let mut row = vec![p.clone()];
        let mut ranks = Vec::new();
        for &m in &methods {
            match find(p, m) {
                Some(r) => {
                    row.push(format!("{:.3}±{:.3} ({})", r.mean, r.std, r.rank));
                    ranks.push(r.rank);
                }
                None => row.push("-".to_string()),
            }
        }
        if ranks.len() == methods.len() {
            rank_matrix.push(ranks);
        }
        rows.push(row);
    }
    if !rank_matrix.is_empty() {
        let avg = average_ranks(&rank_matrix)?;
        rows.push(
            std::iter::once("average rank".to_string())
                .chain(avg.iter().map(|a| format!("{a:.2}")))
                .collect(),
        );
    }

    let widths: Vec<usize> = (0..=methods.len())
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (cell, &w))| {
                let pad = w - cell.chars().count();
                if c == 0 {
                    format!("{cell}{}", " ".repeat(pad))
                } else {
                    format!("{}{cell}", " ".repeat(pad))
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
        if i == 0 || (i == problems.len() && !rank_matrix.is_empty()) {
            let total: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
            out.push_str(&"-".repeat(total));
            out.push('\n');
        }
    }
    Ok(out)
}
