//! Radial grids on [0, r_max] with geometric stretching toward the axis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered radii r_0 = 0 < r_1 < ... < r_N. Consecutive spacing ratios are
/// bounded by `stretch`, so `stretch = 1` is a uniform grid and larger values
/// concentrate nodes near the axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    stretch: f64,
}

pub const MIN_INTERVALS: usize = 16;

impl RadialGrid {
    /// Validates the invariants: r_0 = 0, strictly increasing, at least 16
    /// intervals, spacing ratios within `stretch`.
    pub fn new(nodes: Vec<f64>, stretch: f64) -> Result<Self> {
        if nodes.len() < MIN_INTERVALS + 1 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {} nodes, got {}",
                MIN_INTERVALS + 1,
                nodes.len()
            )));
        }
        if nodes[0] != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "grid must start at r = 0, got {}",
                nodes[0]
            )));
        }
        if stretch < 1.0 || !stretch.is_finite() {
            return Err(Error::InvalidParameter(format!("stretch {stretch} < 1")));
        }
        for w in nodes.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "grid nodes not strictly increasing near r = {}",
                    w[0]
                )));
            }
        }
        // Ratio bound with a little slack for rounding in grid construction.
        for w in nodes.windows(3) {
            let ratio = (w[2] - w[1]) / (w[1] - w[0]);
            if ratio > stretch * (1.0 + 1e-12) {
                return Err(Error::InvalidParameter(format!(
                    "spacing ratio {ratio} exceeds stretch {stretch} near r = {}",
                    w[1]
                )));
            }
        }
        Ok(Self { nodes, stretch })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn r(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn stretch(&self) -> f64 {
        self.stretch
    }

    pub fn max_spacing(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn min_spacing(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Index of the last node with r <= x (clamped to a valid segment start).
    pub fn segment_of(&self, x: f64) -> usize {
        match self
            .nodes
            .binary_search_by(|r| r.partial_cmp(&x).unwrap())
        {
            Ok(i) => i.min(self.nodes.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.nodes.len() - 2),
        }
    }
}

/// Builds a grid of `n_intervals` intervals on [0, r_max] whose spacings grow
/// geometrically by `stretch` away from the axis, so r_N = r_max exactly.
pub fn make_radial_grid(n_intervals: usize, r_max: f64, stretch: f64) -> Result<RadialGrid> {
    if n_intervals < MIN_INTERVALS {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_INTERVALS} intervals, got {n_intervals}"
        )));
    }
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(Error::InvalidParameter(format!("r_max {r_max} <= 0")));
    }
    if stretch < 1.0 || !stretch.is_finite() {
        return Err(Error::InvalidParameter(format!("stretch {stretch} < 1")));
    }

    let n = n_intervals;
    let mut nodes = Vec::with_capacity(n + 1);
    if stretch == 1.0 {
        for i in 0..=n {
            nodes.push(r_max * i as f64 / n as f64);
        }
    } else {
        // h_i = h_0 * stretch^i with sum h_i = r_max.
        let h0 = r_max * (stretch - 1.0) / (stretch.powi(n as i32) - 1.0);
        let mut r = 0.0;
        let mut h = h0;
        nodes.push(0.0);
        for _ in 0..n {
            r += h;
            nodes.push(r);
            h *= stretch;
        }
    }
    // Pin the endpoint exactly regardless of accumulated rounding.
    *nodes.last_mut().unwrap() = r_max;
    nodes[0] = 0.0;
    RadialGrid::new(nodes, stretch)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_spacing() {
        let g = make_radial_grid(16, 1.0, 1.0).unwrap();
        assert_eq!(g.len(), 17);
        assert_eq!(g.r(0), 0.0);
        assert_eq!(g.r_max(), 1.0);
        for w in g.nodes().windows(2) {
            assert!((w[1] - w[0] - 1.0 / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn endpoints_exact() {
        for &(n, rm, s) in &[(32usize, 7.5, 1.0), (100, 40.0, 1.01), (64, 0.3, 1.05)] {
            let g = make_radial_grid(n, rm, s).unwrap();
            assert_eq!(g.r(0), 0.0);
            assert_eq!(g.r_max(), rm);
        }
    }

    #[test]
    fn doubling_n_halves_max_spacing_uniform() {
        let g1 = make_radial_grid(64, 2.0, 1.0).unwrap();
        let g2 = make_radial_grid(128, 2.0, 1.0).unwrap();
        assert!((g1.max_spacing() / g2.max_spacing() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn stretch_concentrates_near_axis() {
        let g = make_radial_grid(100, 10.0, 1.05).unwrap();
        let h_first = g.r(1) - g.r(0);
        let h_last = g.r(100) - g.r(99);
        assert!(h_first < h_last);
        // ratios bounded by stretch
        for w in g.nodes().windows(3) {
            let ratio = (w[2] - w[1]) / (w[1] - w[0]);
            assert!(ratio <= 1.05 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(make_radial_grid(15, 1.0, 1.0).is_err());
        assert!(make_radial_grid(16, 0.0, 1.0).is_err());
        assert!(make_radial_grid(16, -1.0, 1.0).is_err());
        assert!(make_radial_grid(16, 1.0, 0.9).is_err());
    }
}
