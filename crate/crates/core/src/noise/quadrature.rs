//! Quadrature rules for the static noise averages.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::noise::von_mises::von_mises_pdf;

/// Default number of periodic trapezoid nodes per phase axis.
pub const DEFAULT_PHASE_GRID: usize = 129;
/// Default number of Gauss-Hermite nodes for weight noise.
pub const DEFAULT_HERMITE_NODES: usize = 61;

/// A node and its weight; weights of a rule sum to one.
pub type Node = (f64, f64);

/// `grid` equispaced points on the circle, symmetric about and including zero.
pub fn periodic_nodes(grid: usize) -> Result<Vec<f64>> {
    if grid < 3 || grid % 2 == 0 {
        return Err(Error::invalid(
            "grid",
            format!("must be odd and >= 3, got {grid}"),
        ));
    }
    let half = (grid / 2) as i64;
    let h = TAU / grid as f64;
    Ok((-half..=half).map(|j| j as f64 * h).collect())
}

/// Periodic trapezoid rule for the von Mises density.
///
/// Weights are `pdf(eps_j) h` normalized to sum to one. For moderate `k` the
/// normalization is a no-op at machine precision; for very large `k` it keeps the
/// mass that the grid cannot resolve on the node at zero.
pub fn von_mises_rule(k: f64, grid: usize) -> Result<Vec<Node>> {
    let nodes = periodic_nodes(grid)?;
    let h = TAU / grid as f64;
    let mut rule = nodes
        .into_iter()
        .map(|e| Ok((e, von_mises_pdf(e, k)? * h)))
        .collect::<Result<Vec<Node>>>()?;
    let total: f64 = rule.iter().map(|(_, w)| w).sum();
    for (_, w) in &mut rule {
        *w /= total;
    }
    Ok(rule)
}

/// Gauss-Hermite rule for expectations under the standard normal density
/// (probabilists' weight `e^{-x^2/2} / sqrt(2 pi)`), by Golub-Welsch.
///
/// Nodes are returned in increasing order and mirrored exactly about zero.
pub fn gauss_hermite(count: usize) -> Result<Vec<Node>> {
    if count == 0 {
        return Err(Error::invalid("nodes", "need at least one node"));
    }
    let mut jacobi = DMatrix::<f64>::zeros(count, count);
    for j in 1..count {
        let b = (j as f64).sqrt();
        jacobi[(j - 1, j)] = b;
        jacobi[(j, j - 1)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut rule: Vec<Node> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mirrored: Vec<Node> = (0..count)
        .map(|i| {
            let (x, w) = rule[i];
            let (xr, wr) = rule[count - 1 - i];
            (0.5 * (x - xr), 0.5 * (w + wr))
        })
        .collect();
    let total: f64 = mirrored.iter().map(|(_, w)| w).sum();
    Ok(mirrored.into_iter().map(|(x, w)| (x, w / total)).collect())
}
