//! Discretized radial graph profiles u(r) with stored derivative samples.
//!
//! A `Profile` is the computational stand-in for a rotationally symmetric
//! hypersurface in R^{n+1}: the rotation of the meridian curve (r, u(r)).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cone::ConeSpec;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    grid: RadialGrid,
    u: Vec<f64>,
    du: Vec<f64>,
}

impl Profile {
    /// Validates: matching lengths, finite values, du[0] = 0 (smoothness at
    /// the axis; cone profiles set it by convention and flag the vertex in
    /// their envelope metadata).
    pub fn new(grid: RadialGrid, u: Vec<f64>, du: Vec<f64>) -> Result<Self> {
        if u.len() != grid.len() || du.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "profile lengths (u: {}, du: {}) do not match grid ({})",
                u.len(),
                du.len(),
                grid.len()
            )));
        }
        if let Some(i) = u.iter().chain(du.iter()).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("profile sample #{i}")));
        }
        if du[0] != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "du[0] = {} but the axis derivative must vanish",
                du[0]
            )));
        }
        Ok(Self { grid, u, du })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn du(&self) -> &[f64] {
        &self.du
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn r_max(&self) -> f64 {
        self.grid.r_max()
    }

    /// Ambient radius |x| = sqrt(r^2 + u^2) at node i.
    pub fn ambient_radius(&self, i: usize) -> f64 {
        let r = self.grid.r(i);
        (r * r + self.u[i] * self.u[i]).sqrt()
    }

    /// Largest ambient radius over the sampled curve (profiles with monotone
    /// u have it at the last node, but we scan to stay general).
    pub fn ambient_extent(&self) -> f64 {
        (0..self.len())
            .map(|i| self.ambient_radius(i))
            .fold(0.0, f64::max)
    }

    /// Cubic Hermite evaluation of u at an off-node radius.
    pub fn eval(&self, r: f64) -> f64 {
        self.hermite(r).0
    }

    /// Cubic Hermite evaluation of u' at an off-node radius.
    pub fn eval_du(&self, r: f64) -> f64 {
        self.hermite(r).1
    }

    fn hermite(&self, r: f64) -> (f64, f64) {
        let nodes = self.grid.nodes();
        let i = self.grid.segment_of(r.clamp(0.0, self.r_max()));
        let (r0, r1) = (nodes[i], nodes[i + 1]);
        let h = r1 - r0;
        let t = ((r - r0) / h).clamp(0.0, 1.0);
        hermite_segment(self.u[i], self.du[i], self.u[i + 1], self.du[i + 1], h, t)
    }

    /// Linear interpolation of u (used where the contracts ask for it).
    pub fn eval_linear(&self, r: f64) -> f64 {
        let nodes = self.grid.nodes();
        let i = self.grid.segment_of(r.clamp(0.0, self.r_max()));
        let (r0, r1) = (nodes[i], nodes[i + 1]);
        let t = ((r - r0) / (r1 - r0)).clamp(0.0, 1.0);
        self.u[i] * (1.0 - t) + self.u[i + 1] * t
    }

    /// Serializes to CSV with header `r,u,du`, one row per node, full double
    /// precision (17 significant digits, round-trips bit-exactly).
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.len() * 72 + 16);
        out.push_str("r,u,du\n");
        for i in 0..self.len() {
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt_g17(self.grid.r(i)),
                fmt_g17(self.u[i]),
                fmt_g17(self.du[i])
            );
        }
        out
    }

    /// Parses the CSV format written by [`Profile::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty profile CSV".into()))?;
        if header.trim() != "r,u,du" {
            return Err(Error::Parse(format!("unexpected CSV header `{header}`")));
        }
        let mut r = Vec::new();
        let mut u = Vec::new();
        let mut du = Vec::new();
        for (k, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split(',');
            let mut next = |name: &str| -> Result<f64> {
                it.next()
                    .ok_or_else(|| Error::Parse(format!("row {k}: missing {name}")))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {k}: {e}")))
            };
            r.push(next("r")?);
            u.push(next("u")?);
            du.push(next("du")?);
        }
        // Stretch is not stored in CSV; recover a bound from the data.
        let mut stretch: f64 = 1.0;
        for w in r.windows(3) {
            stretch = stretch.max((w[2] - w[1]) / (w[1] - w[0]));
        }
        let grid = RadialGrid::new(r, stretch)?;
        Profile::new(grid, u, du)
    }
}

/// Hermite basis on one segment; returns (value, derivative) at parameter t.
fn hermite_segment(u0: f64, m0: f64, u1: f64, m1: f64, h: f64, t: f64) -> (f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let v = h00 * u0 + h10 * h * m0 + h01 * u1 + h11 * h * m1;
    let dh00 = 6.0 * t2 - 6.0 * t;
    let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
    let dh01 = -dh00;
    let dh11 = 3.0 * t2 - 2.0 * t;
    let d = (dh00 * u0 + dh01 * u1) / h + dh10 * m0 + dh11 * m1;
    (v, d)
}

/// 17-significant-digit formatting (%.17g style); round-trips bit-exactly.
pub fn fmt_g17(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Samples the cone of slope tau on the grid: u = tau * r, du = tau away
/// from the axis. du[0] = 0 by convention; the cone is singular at the
/// vertex, which callers should flag in envelope metadata.
pub fn cone_profile(cone: &ConeSpec, grid: &RadialGrid) -> Profile {
    let tau = cone.tau;
    let u: Vec<f64> = grid.nodes().iter().map(|&r| tau * r).collect();
    let mut du = vec![tau; grid.len()];
    du[0] = 0.0;
    Profile::new(grid.clone(), u, du).expect("cone samples are finite")
}

/// JSON envelope for a profile with its cone metadata and free-form notes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileEnvelope {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cone: Option<ConeSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub profile: Profile,
}

impl ProfileEnvelope {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile envelope serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}
