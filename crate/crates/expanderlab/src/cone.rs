//! Rotationally symmetric regular cones: the graph of x -> tau * |x| over R^n.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rotationally symmetric cone in R^{n+1}. `n` is the hypersurface
/// dimension (the cone lives over R^n), `tau >= 0` is the slope; `tau = 0`
/// encodes the flat hyperplane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub n: usize,
    pub tau: f64,
}

impl ConeSpec {
    pub fn new(n: usize, tau: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("dimension n = {n} < 2")));
        }
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::InvalidParameter(format!("cone slope tau = {tau}")));
        }
        Ok(Self { n, tau })
    }

    pub fn is_flat(&self) -> bool {
        self.tau == 0.0
    }

    /// cos of the link's polar angle from the positive vertical axis:
    /// points (x, tau|x|) on the unit sphere have height tau / sqrt(1+tau^2).
    pub fn link_cos_polar_angle(&self) -> f64 {
        self.tau / (1.0 + self.tau * self.tau).sqrt()
    }

    /// Polar radius of the link as a geodesic sphere in S^n, measured from
    /// the positive vertical axis.
    pub fn link_polar_angle(&self) -> f64 {
        self.link_cos_polar_angle().acos()
    }

    /// sup over the link of |A|^2 / H^2. The link of a rotationally symmetric
    /// cone is a geodesic sphere, which is umbilic: all n-1 principal
    /// curvatures coincide, so |A|^2/H^2 = (n-1) k^2 / ((n-1) k)^2 = 1/(n-1).
    pub fn link_curvature_ratio(&self) -> f64 {
        1.0 / (self.n as f64 - 1.0)
    }

    /// The constant K of the curvature bound |A|^2 <= K |x|^2:
    /// a quarter of the link ratio sup.
    pub fn curvature_bound_constant(&self) -> f64 {
        0.25 * self.link_curvature_ratio()
    }

    /// Slant factor sqrt(1 + tau^2): arc length along the cone per unit base radius.
    pub fn slant(&self) -> f64 {
        (1.0 + self.tau * self.tau).sqrt()
    }
}
