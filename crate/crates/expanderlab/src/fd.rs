//! Finite-difference weights on arbitrary node sets (Fornberg's recursion)
//! and derivative sampling along grids.

use crate::grid::RadialGrid;

/// Weights for derivatives 0..=m at evaluation point `z` from the nodes `x`.
/// Returns `weights[k][j]`: the coefficient of f(x[j]) in the k-th derivative.
///
/// Classic recursion from Fornberg, "Generation of finite difference formulas
/// on arbitrarily spaced grids" (Math. Comp. 51, 1988).
pub fn fornberg_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    assert!(n > m, "need more than m+1 nodes for an order-m derivative");
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Derivative of order `order` of the sampled values at every node, using
/// centered stencils of `2*half_width + 1` nodes (shifted one-sided at the
/// ends). On a uniform grid a half-width of 2 gives 4th-order first
/// derivatives and 3rd-order second derivatives.
pub fn derivative_samples(
    grid: &RadialGrid,
    values: &[f64],
    order: usize,
    half_width: usize,
) -> Vec<f64> {
    let n = grid.len();
    assert_eq!(values.len(), n);
    let width = 2 * half_width + 1;
    assert!(n >= width, "grid too small for the requested stencil");
    let nodes = grid.nodes();
    let mut out = vec![0.0; n];
    for i in 0..n {
        let lo = i.saturating_sub(half_width).min(n - width);
        let w = fornberg_weights(nodes[i], &nodes[lo..lo + width], order);
        out[i] = w[order]
            .iter()
            .zip(&values[lo..lo + width])
            .map(|(c, v)| c * v)
            .sum();
    }
    out
}

/// Least-squares slope of log2(errors) against refinement level, i.e. the
/// empirical convergence order across successive grid doublings.
pub fn convergence_order(sups: &[f64]) -> f64 {
    assert!(sups.len() >= 2);
    let logs: Vec<f64> = sups.iter().map(|&e| e.max(1e-300).log2()).collect();
    let m = logs.len() as f64;
    let mean_i = (m - 1.0) / 2.0;
    let mean_l = logs.iter().sum::<f64>() / m;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &l) in logs.iter().enumerate() {
        let di = i as f64 - mean_i;
        num += di * (l - mean_l);
        den += di * di;
    }
    -num / den
}
