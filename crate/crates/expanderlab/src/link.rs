//! Geodesic-sphere links under mean curvature flow on S^n, and the pinching
//! condition that guarantees they shrink to round points.
//!
//! A geodesic sphere at polar radius theta is umbilic with principal
//! curvatures cot(theta), so MCF reduces to d theta/dt = -(n-1) cot(theta),
//! which separates to cos(theta(t)) = cos(theta_0) e^{(n-1) t}. Both the
//! closed form and an adaptive ODE integration are provided and must agree.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{integrate_to, OdeOptions};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LinkState {
    pub n: usize,
    /// Polar radius of the geodesic sphere, in (0, pi).
    pub theta: f64,
    pub t: f64,
}

impl LinkState {
    pub fn new(n: usize, theta: f64, t: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n = {n} < 2")));
        }
        if !(theta > 0.0 && theta < std::f64::consts::PI) {
            return Err(Error::InvalidParameter(format!(
                "polar radius theta = {theta} outside (0, pi)"
            )));
        }
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("t = {t} < 0")));
        }
        Ok(Self { n, theta, t })
    }

    /// |A|^2 = (n-1) cot^2(theta) for the umbilic link.
    pub fn second_fundamental_sq(&self) -> f64 {
        let c = 1.0 / self.theta.tan();
        (self.n as f64 - 1.0) * c * c
    }

    /// H^2 = (n-1)^2 cot^2(theta).
    pub fn mean_curvature_sq(&self) -> f64 {
        let c = 1.0 / self.theta.tan();
        let nm1 = self.n as f64 - 1.0;
        nm1 * nm1 * c * c
    }

    /// Slope of the cone over this link: tau = cot(theta) for theta < pi/2
    /// (mean convex side); theta = pi/2 gives the flat hyperplane.
    pub fn cone_slope(&self) -> f64 {
        1.0 / self.theta.tan()
    }
}

/// Extinction time of the geodesic-sphere flow: the solution leaves (0, pi)
/// when |cos theta_0| e^{(n-1)t} reaches 1. Infinite for the equator.
pub fn extinction_time(n: usize, theta0: f64) -> f64 {
    let c = theta0.cos().abs();
    if c == 0.0 {
        f64::INFINITY
    } else {
        -c.ln() / (n as f64 - 1.0)
    }
}

/// Closed-form geodesic-sphere flow: cos(theta(t)) = cos(theta_0) e^{(n-1)t}.
pub fn link_sphere_flow(n: usize, theta0: f64, t: f64) -> Result<LinkState> {
    let init = LinkState::new(n, theta0, 0.0)?;
    let ext = extinction_time(n, theta0);
    if t >= ext {
        return Err(Error::PastExtinction { t, extinction: ext });
    }
    let c = init.theta.cos() * ((n as f64 - 1.0) * t).exp();
    LinkState::new(n, c.acos(), t)
}

/// Same flow by adaptive RK integration of d theta/dt = -(n-1) cot theta;
/// must agree with the closed form to integrator tolerance.
pub fn link_sphere_flow_ode(n: usize, theta0: f64, t: f64) -> Result<LinkState> {
    LinkState::new(n, theta0, 0.0)?;
    let ext = extinction_time(n, theta0);
    if t >= ext {
        return Err(Error::PastExtinction { t, extinction: ext });
    }
    if t == 0.0 {
        return LinkState::new(n, theta0, 0.0);
    }
    let nm1 = n as f64 - 1.0;
    let mut f = move |_t: f64, y: &[f64; 1]| [-nm1 / y[0].tan()];
    let y = integrate_to(
        &mut f,
        0.0,
        [theta0],
        t,
        &OdeOptions {
            rtol: 1e-12,
            atol: 1e-14,
            ..Default::default()
        },
    )?;
    LinkState::new(n, y[0], t)
}

/// Outcome of the curvature pinching test |A|^2 < H^2/(n-2) + 2 (n >= 4)
/// or |A|^2 < (3/4) H^2 + 4/3 (n = 3). Vacuous for n = 2.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PinchingCheck {
    pub holds: bool,
    /// Right-hand side minus left-hand side; infinite when vacuous.
    pub margin: f64,
}

pub fn pinching_check(link: &LinkState) -> PinchingCheck {
    if link.n == 2 {
        return PinchingCheck {
            holds: true,
            margin: f64::INFINITY,
        };
    }
    let a2 = link.second_fundamental_sq();
    let h2 = link.mean_curvature_sq();
    let rhs = if link.n >= 4 {
        h2 / (link.n as f64 - 2.0) + 2.0
    } else {
        0.75 * h2 + 4.0 / 3.0
    };
    PinchingCheck {
        holds: a2 < rhs,
        margin: rhs - a2,
    }
}
