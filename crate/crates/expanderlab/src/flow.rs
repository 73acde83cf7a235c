//! Radial graphical mean curvature flow.
//!
//! Evolves u_t = u''/(1+u'^2) + (n-1) u'/r by the method of lines with
//! second-order central differences and explicit adaptive time steps under a
//! CFL bound. At the axis the singular transport term is replaced by its
//! limit, giving u_t(0) = n u''(0). The far-field boundary pins
//! u(r_max, t) = u0(r_max) (Dirichlet) by default; a Neumann variant holding
//! u'(r_max) is provided for cross-checking.
//!
//! Flowing the mollified cones u_eps = tau sqrt(eps + r^2) to t = 1 and
//! comparing with the shooting solver reproduces the expander existence
//! construction numerically.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::profile::Profile;

/// Smooth strictly convex approximation of the cone: u = tau sqrt(eps + r^2).
/// Derivatives are closed-form; u'' = tau eps (eps + r^2)^{-3/2} > 0.
pub fn mollified_cone(tau: f64, eps: f64, grid: &RadialGrid) -> Result<Profile> {
    if !(tau > 0.0) || !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "mollified cone needs tau > 0 and eps > 0, got tau = {tau}, eps = {eps}"
        )));
    }
    let u: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&r| tau * (eps + r * r).sqrt())
        .collect();
    let du: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&r| tau * r / (eps + r * r).sqrt())
        .collect();
    Profile::new(grid.clone(), u, du)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    /// Hold u(r_max, t) = u0(r_max). The induced error is O(t_end / r_max).
    Dirichlet,
    /// Hold u'(r_max, t) at the given slope.
    Neumann { slope: f64 },
}

#[derive(Debug, Clone)]
pub struct FlowParams {
    pub cfl: f64,
    pub boundary: BoundaryMode,
    /// Aborts when max |u'| exceeds this (leaving the graphical regime is a
    /// bug signal: the continuum flow preserves the Lipschitz bound).
    pub slope_cap: Option<f64>,
    pub max_steps: usize,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            boundary: BoundaryMode::Dirichlet,
            slope_cap: None,
            max_steps: 400_000_000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowState {
    pub t: f64,
    pub profile: Profile,
    pub dt_last: f64,
    /// CFL number the run was driven at.
    pub cfl: f64,
    /// Largest max |u'(t)| / max |u0'| seen so far (slope-bound diagnostic).
    pub slope_ratio_max: f64,
    pub steps: usize,
}

struct Stencils {
    // First and second derivative 3-point weights per interior node.
    w1: Vec<[f64; 3]>,
    w2: Vec<[f64; 3]>,
    /// h_m h_p / 2 per interior node: the explicit stability limit is
    /// (1 + u'^2) times this.
    inv_center: Vec<f64>,
    r1_sq: f64,
}

fn build_stencils(grid: &RadialGrid) -> Stencils {
    let nodes = grid.nodes();
    let n = nodes.len();
    let mut w1 = vec![[0.0; 3]; n];
    let mut w2 = vec![[0.0; 3]; n];
    let mut inv_center = vec![0.0; n];
    for i in 1..n - 1 {
        let hm = nodes[i] - nodes[i - 1];
        let hp = nodes[i + 1] - nodes[i];
        // Nonuniform central weights (exact for quadratics).
        w1[i] = [
            -hp / (hm * (hm + hp)),
            (hp - hm) / (hm * hp),
            hm / (hp * (hm + hp)),
        ];
        w2[i] = [
            2.0 / (hm * (hm + hp)),
            -2.0 / (hm * hp),
            2.0 / (hp * (hm + hp)),
        ];
        inv_center[i] = 0.5 * hm * hp;
    }
    Stencils {
        w1,
        w2,
        inv_center,
        r1_sq: nodes[1] * nodes[1],
    }
}

/// Spatial operator of the radial MCF (the right-hand side of the PDE) on a
/// sampled state; exposed for mean-convexity diagnostics.
pub fn mcf_rhs(grid: &RadialGrid, u: &[f64], n: usize) -> Vec<f64> {
    let st = build_stencils(grid);
    let mut rhs = vec![0.0; u.len()];
    let mut slopes = vec![0.0; u.len()];
    eval_rhs(grid, &st, u, n, &mut rhs, &mut slopes);
    rhs
}

fn eval_rhs(
    grid: &RadialGrid,
    st: &Stencils,
    u: &[f64],
    n: usize,
    rhs: &mut [f64],
    slopes: &mut [f64],
) {
    let nodes = grid.nodes();
    let len = u.len();
    let nf = n as f64;
    // Axis: u_t = n u''(0), symmetric parabola through (0, u0), (r1, u1).
    let upp0 = 2.0 * (u[1] - u[0]) / st.r1_sq;
    rhs[0] = nf * upp0;
    slopes[0] = 0.0;
    for i in 1..len - 1 {
        let v = st.w1[i][0] * u[i - 1] + st.w1[i][1] * u[i] + st.w1[i][2] * u[i + 1];
        let w = st.w2[i][0] * u[i - 1] + st.w2[i][1] * u[i] + st.w2[i][2] * u[i + 1];
        slopes[i] = v;
        rhs[i] = w / (1.0 + v * v) + (nf - 1.0) * v / nodes[i];
    }
    rhs[len - 1] = 0.0;
    slopes[len - 1] = slopes[len - 2];
}

/// Evolves `u0` to each time in `times` (strictly increasing, > 0), returning
/// one state per requested time.
pub fn evolve_with_snapshots(
    u0: &Profile,
    n: usize,
    times: &[f64],
    params: &FlowParams,
) -> Result<Vec<FlowState>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n = {n} < 2")));
    }
    if times.is_empty() || times.windows(2).any(|w| w[1] <= w[0]) || times[0] <= 0.0 {
        return Err(Error::InvalidParameter(
            "snapshot times must be strictly increasing and positive".into(),
        ));
    }
    let grid = u0.grid().clone();
    let st = build_stencils(&grid);
    let len = grid.len();
    let mut u: Vec<f64> = u0.u().to_vec();
    let mut rhs = vec![0.0; len];
    let mut slopes = vec![0.0; len];
    let slope0 = u0.du().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cap = params
        .slope_cap
        .unwrap_or_else(|| 2.0 * slope0.max(1.0) + 1.0);
    let nf = n as f64;

    // One-sided Neumann closure at the far boundary (3-point, second order).
    let neumann = match params.boundary {
        BoundaryMode::Neumann { slope } => {
            let nodes = grid.nodes();
            let w = crate::fd::fornberg_weights(nodes[len - 1], &nodes[len - 3..len], 1);
            Some((slope, [w[1][0], w[1][1], w[1][2]]))
        }
        BoundaryMode::Dirichlet => None,
    };

    let mut out = Vec::with_capacity(times.len());
    let mut t = 0.0;
    let mut dt_last = 0.0;
    let mut slope_ratio_max: f64 = 1.0;
    let mut steps = 0usize;

    for &t_target in times {
        while t < t_target {
            if steps >= params.max_steps {
                return Err(Error::CflUnderflow { dt: dt_last, t });
            }
            eval_rhs(&grid, &st, &u, n, &mut rhs, &mut slopes);

            // Pointwise explicit stability limits.
            let mut dt = st.r1_sq / nf;
            for i in 1..len - 1 {
                let lim = (1.0 + slopes[i] * slopes[i]) * st.inv_center[i];
                if lim < dt {
                    dt = lim;
                }
            }
            dt *= params.cfl;
            if dt <= 1e-15 * t_target {
                return Err(Error::CflUnderflow { dt, t });
            }
            if t + dt > t_target {
                dt = t_target - t;
            }

            for i in 0..len - 1 {
                u[i] += dt * rhs[i];
            }
            if let Some((slope, w)) = neumann {
                u[len - 1] = (slope - w[0] * u[len - 3] - w[1] * u[len - 2]) / w[2];
            }
            t += dt;
            dt_last = dt;
            steps += 1;

            let max_slope = slopes.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if slope0 > 0.0 {
                slope_ratio_max = slope_ratio_max.max(max_slope / slope0);
            }
            if max_slope > cap {
                return Err(Error::SlopeBlowUp {
                    r: t,
                    slope: max_slope,
                    cap,
                });
            }
        }

        let mut du = vec![0.0; len];
        eval_rhs(&grid, &st, &u, n, &mut rhs, &mut du);
        // Endpoint slope by a one-sided stencil for the output profile.
        let nodes = grid.nodes();
        let wl = crate::fd::fornberg_weights(nodes[len - 1], &nodes[len - 3..len], 1);
        du[len - 1] = wl[1][0] * u[len - 3] + wl[1][1] * u[len - 2] + wl[1][2] * u[len - 1];
        du[0] = 0.0;
        out.push(FlowState {
            t,
            profile: Profile::new(grid.clone(), u.clone(), du)?,
            dt_last,
            cfl: params.cfl,
            slope_ratio_max,
            steps,
        });
    }
    Ok(out)
}

pub fn evolve_radial_mcf(
    u0: &Profile,
    n: usize,
    t_end: f64,
    params: &FlowParams,
) -> Result<FlowState> {
    if !(t_end > 0.0) {
        return Err(Error::InvalidParameter(format!("t_end = {t_end} <= 0")));
    }
    Ok(evolve_with_snapshots(u0, n, &[t_end], params)?.remove(0))
}

/// Self-similarity defect between two states of the same run:
/// sup over the inner half of the grid of
/// |u(t2, r) - sqrt(t2/t1) u(t1, r sqrt(t1/t2))|,
/// with linear interpolation for the off-node lookup.
pub fn self_similarity_defect(s1: &FlowState, s2: &FlowState) -> Result<f64> {
    if !(s1.t > 0.0 && s2.t > s1.t) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < t1 < t2, got t1 = {}, t2 = {}",
            s1.t, s2.t
        )));
    }
    let scale = (s2.t / s1.t).sqrt();
    let grid = s2.profile.grid();
    let r_half = grid.r_max() / 2.0;
    let mut sup = 0.0f64;
    for (i, &r) in grid.nodes().iter().enumerate() {
        if r > r_half {
            break;
        }
        let pulled = scale * s1.profile.eval_linear(r / scale);
        sup = sup.max((s2.profile.u()[i] - pulled).abs());
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_radial_grid;

    #[test]
    fn mollified_cone_shape() {
        let grid = make_radial_grid(64, 8.0, 1.0).unwrap();
        let p = mollified_cone(1.5, 1e-2, &grid).unwrap();
        // u(0) = tau sqrt(eps), u'(0) = 0
        assert!((p.u()[0] - 1.5 * (1e-2f64).sqrt()).abs() < 1e-15);
        assert_eq!(p.du()[0], 0.0);
        // 0 < u - tau r <= tau sqrt(eps)
        for (i, &r) in grid.nodes().iter().enumerate() {
            let gap = p.u()[i] - 1.5 * r;
            assert!(gap > 0.0 && gap <= 1.5 * (1e-2f64).sqrt() + 1e-15);
        }
    }

    #[test]
    fn plane_is_stationary() {
        let grid = make_radial_grid(32, 4.0, 1.0).unwrap();
        let zero =
            Profile::new(grid.clone(), vec![0.0; grid.len()], vec![0.0; grid.len()]).unwrap();
        let s = evolve_radial_mcf(&zero, 2, 0.5, &FlowParams::default()).unwrap();
        assert!(s.profile.u().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn slope_bound_is_preserved() {
        let grid = make_radial_grid(128, 8.0, 1.0).unwrap();
        let p0 = mollified_cone(1.0, 0.05, &grid).unwrap();
        let s = evolve_radial_mcf(&p0, 2, 0.5, &FlowParams::default()).unwrap();
        assert!(
            s.slope_ratio_max <= 1.0 + 1e-8,
            "slope ratio {}",
            s.slope_ratio_max
        );
    }

    #[test]
    fn comparison_principle_on_mollified_cones() {
        let grid = make_radial_grid(128, 8.0, 1.0).unwrap();
        let lo = mollified_cone(1.0, 0.02, &grid).unwrap();
        let hi = mollified_cone(1.0, 0.08, &grid).unwrap();
        let sl = evolve_radial_mcf(&lo, 2, 0.3, &FlowParams::default()).unwrap();
        let sh = evolve_radial_mcf(&hi, 2, 0.3, &FlowParams::default()).unwrap();
        for i in 0..grid.len() {
            assert!(
                sl.profile.u()[i] <= sh.profile.u()[i] + 1e-12,
                "avoidance violated at node {i}"
            );
        }
    }

    #[test]
    fn convexity_keeps_rhs_nonnegative() {
        let grid = make_radial_grid(128, 8.0, 1.0).unwrap();
        let p0 = mollified_cone(0.8, 0.1, &grid).unwrap();
        let snaps =
            evolve_with_snapshots(&p0, 2, &[0.05, 0.15, 0.3], &FlowParams::default()).unwrap();
        for s in &snaps {
            let rhs = mcf_rhs(s.profile.grid(), s.profile.u(), 2);
            let min = rhs[..grid.len() - 1]
                .iter()
                .fold(f64::INFINITY, |m, &v| m.min(v));
            assert!(
                min >= -1e-9,
                "spatial operator dipped to {min} at t = {}",
                s.t
            );
        }
    }

    #[test]
    fn refinement_self_convergence() {
        // Error against the next-finer grid decreases at order >= 1.
        let t_end = 0.1;
        let mut sols = Vec::new();
        for &n in &[64usize, 128, 256] {
            let grid = make_radial_grid(n, 8.0, 1.0).unwrap();
            let p0 = mollified_cone(1.0, 0.05, &grid).unwrap();
            let s = evolve_radial_mcf(&p0, 2, t_end, &FlowParams::default()).unwrap();
            sols.push(s.profile);
        }
        let mut errs = Vec::new();
        for k in 0..2 {
            let coarse = &sols[k];
            let fine = &sols[k + 1];
            let mut sup = 0.0f64;
            for (i, &r) in coarse.grid().nodes().iter().enumerate() {
                if r > 4.0 {
                    break;
                }
                sup = sup.max((coarse.u()[i] - fine.eval(r)).abs());
            }
            errs.push(sup);
        }
        let order = crate::fd::convergence_order(&errs);
        assert!(
            order >= 1.0,
            "self-convergence order {order}, errors {errs:?}"
        );
    }

    #[test]
    fn exact_self_similar_data_has_zero_defect() {
        // u(t, r) = sqrt(t) U(r/sqrt(t)) for a smooth U: defect is pure
        // interpolation error.
        let grid = make_radial_grid(512, 8.0, 1.0).unwrap();
        let cap_u = |x: f64| (1.0 + x * x).sqrt();
        let mk = |t: f64| {
            let s = t.sqrt();
            let u: Vec<f64> = grid.nodes().iter().map(|&r| s * cap_u(r / s)).collect();
            let mut du: Vec<f64> = grid
                .nodes()
                .iter()
                .map(|&r| (r / s) / (1.0 + (r / s) * (r / s)).sqrt())
                .collect();
            du[0] = 0.0;
            FlowState {
                t,
                profile: Profile::new(grid.clone(), u, du).unwrap(),
                dt_last: 0.0,
                cfl: 0.4,
                slope_ratio_max: 1.0,
                steps: 0,
            }
        };
        let defect = self_similarity_defect(&mk(0.5), &mk(1.0)).unwrap();
        assert!(defect < 5e-5, "defect {defect}");
    }

    #[test]
    fn neumann_boundary_cross_check() {
        let grid = make_radial_grid(128, 8.0, 1.0).unwrap();
        let p0 = mollified_cone(1.0, 0.05, &grid).unwrap();
        let d = evolve_radial_mcf(&p0, 2, 0.2, &FlowParams::default()).unwrap();
        let nm = evolve_radial_mcf(
            &p0,
            2,
            0.2,
            &FlowParams {
                boundary: BoundaryMode::Neumann { slope: 1.0 },
                ..Default::default()
            },
        )
        .unwrap();
        // The two boundary treatments agree away from the boundary.
        let mut sup = 0.0f64;
        for (i, &r) in grid.nodes().iter().enumerate() {
            if r > 4.0 {
                break;
            }
            sup = sup.max((d.profile.u()[i] - nm.profile.u()[i]).abs());
        }
        assert!(sup < 1e-3, "boundary influence {sup} on the inner half");
    }
}
