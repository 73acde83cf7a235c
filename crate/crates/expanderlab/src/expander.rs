//! The radial self-expander equation and its shooting solver.
//!
//! A rotation-invariant graph u(r) over R^n is a self-expander exactly when
//!
//!   u'' / (1 + u'^2) + (n-1) u'/r - (u - r u')/2 = 0,
//!
//! with the axis limit n u''(0) - u(0)/2 = 0 at r = 0. Shooting integrates
//! from the axis height a = u(0) and root-finds on a so the asymptotic slope
//! hits the requested cone slope tau. Mean convexity (H > 0) and uniqueness
//! of the root are checked, not assumed.

use serde::{Deserialize, Serialize};

use crate::cone::ConeSpec;
use crate::error::{Error, Result};
use crate::fd::derivative_samples;
use crate::grid::{make_radial_grid, RadialGrid};
use crate::norms::{trace_at_infinity, TraceReport};
use crate::ode::{integrate_checkpoints, OdeOptions};
use crate::profile::Profile;

/// Right-hand side of u'' = (1 + u'^2) ((u - r u')/2 - (n-1) u'/r).
#[inline]
fn curvature_rhs(n: usize, r: f64, u: f64, v: f64) -> f64 {
    (1.0 + v * v) * (0.5 * (u - r * v) - (n as f64 - 1.0) * v / r)
}

/// u'' from the expander equation itself; valid on solved profiles, where it
/// replaces finite differences (the "ODE substitution").
pub fn ode_second_derivative(n: usize, r: f64, u: f64, v: f64) -> f64 {
    if r == 0.0 {
        // Axis limit of the equation: n u''(0) = u(0)/2.
        u / (2.0 * n as f64)
    } else {
        curvature_rhs(n, r, u, v)
    }
}

/// Pointwise expander residual R(r) = u''/(1+u'^2) + (n-1)u'/r - (u - ru')/2.
///
/// u'' comes from 7-point finite differences of the stored du, so for
/// integrator output this is a genuine a-posteriori consistency check (the
/// differentiation route is independent of the ODE used to produce du).
/// NaNs are reported through the flag rather than propagated silently.
pub fn expander_residual(p: &Profile, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n = {n} < 2")));
    }
    let d2u = derivative_samples(p.grid(), p.du(), 1, 3);
    let nodes = p.grid().nodes();
    let nm1 = n as f64 - 1.0;
    let mut out = Vec::with_capacity(p.len());
    for i in 0..p.len() {
        let (r, u, v) = (nodes[i], p.u()[i], p.du()[i]);
        let res = if r == 0.0 {
            n as f64 * d2u[i] - 0.5 * u
        } else {
            d2u[i] / (1.0 + v * v) + nm1 * v / r - 0.5 * (u - r * v)
        };
        if !res.is_finite() {
            return Err(Error::NonFinite(format!("expander residual at r = {r}")));
        }
        out.push(res);
    }
    Ok(out)
}

pub fn residual_sup(p: &Profile, n: usize) -> Result<f64> {
    Ok(expander_residual(p, n)?
        .iter()
        .fold(0.0f64, |m, r| m.max(r.abs())))
}

#[derive(Debug, Clone)]
pub struct IntegrateOptions {
    pub tol: f64,
    /// |u'| above this aborts with a blow-up flag.
    pub slope_cap: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            slope_cap: 1e4,
        }
    }
}

/// Series start: u = a + (a/(4n)) r^2 + c4 r^4 + O(r^6) with
/// c4 = a (a^2 - n^2) / (32 n^3 (n+2)), obtained by matching orders in the
/// expander equation. Used on [0, r_ser] to step off the coordinate
/// singularity of the (n-1) u'/r term.
fn series_start(n: usize, a: f64, r: f64) -> (f64, f64) {
    let nf = n as f64;
    let c2 = a / (4.0 * nf);
    let c4 = a * (a * a - nf * nf) / (32.0 * nf.powi(3) * (nf + 2.0));
    let r2 = r * r;
    (a + c2 * r2 + c4 * r2 * r2, 2.0 * c2 * r + 4.0 * c4 * r2 * r)
}

/// Integrates the expander ODE from axis height a > 0, returning u and du on
/// the requested grid. Starts from the series expansion at
/// r_ser = 1e-3 min(1, 1/a) and continues with adaptive RK5(4).
pub fn integrate_profile(
    n: usize,
    a: f64,
    grid: &RadialGrid,
    opts: &IntegrateOptions,
) -> Result<Profile> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n = {n} < 2")));
    }
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("axis height a = {a} <= 0")));
    }
    let r_ser = 1e-3 * (1.0 / a).min(1.0);
    let nodes = p_nodes(grid);
    let mut u = vec![0.0; nodes.len()];
    let mut du = vec![0.0; nodes.len()];

    // Nodes inside the series region take series values directly.
    let mut first_ode = nodes.len();
    for (i, &r) in nodes.iter().enumerate() {
        if r <= r_ser {
            let (ui, vi) = series_start(n, a, r);
            u[i] = ui;
            du[i] = vi;
        } else {
            first_ode = i;
            break;
        }
    }
    du[0] = 0.0;

    if first_ode < nodes.len() {
        let (u0, v0) = series_start(n, a, r_ser);
        let checkpoints: Vec<f64> = nodes[first_ode..].to_vec();
        let slope_cap = opts.slope_cap;
        let mut f = move |r: f64, y: &[f64; 2]| [y[1], curvature_rhs(n, r, y[0], y[1])];
        let ode_opts = OdeOptions {
            rtol: opts.tol,
            atol: opts.tol * 1e-2,
            h_init: Some(r_ser * 0.1),
            h_max: f64::INFINITY,
            max_steps: 5_000_000,
        };
        let u_slice = &mut u[first_ode..];
        let du_slice = &mut du[first_ode..];
        integrate_checkpoints(
            &mut f,
            r_ser,
            [u0, v0],
            &checkpoints,
            &ode_opts,
            &mut |k, _r, y| {
                u_slice[k] = y[0];
                du_slice[k] = y[1];
            },
            &mut |r, y| {
                if y[1].abs() > slope_cap {
                    Err(Error::SlopeBlowUp {
                        r,
                        slope: y[1],
                        cap: slope_cap,
                    })
                } else if !y[0].is_finite() || !y[1].is_finite() {
                    Err(Error::NonFinite(format!("ODE state at r = {r}")))
                } else {
                    Ok(())
                }
            },
        )?;
    }

    Profile::new(grid.clone(), u, du)
}

fn p_nodes(grid: &RadialGrid) -> &[f64] {
    grid.nodes()
}

/// Asymptotic slope reached from axis height a, read by Richardson
/// extrapolation of u/r at the dyadic tail radii of a minimal checkpoint
/// set (the full grid is not materialized during root finding).
fn slope_of_axis_height(n: usize, a: f64, r_max: f64, opts: &IntegrateOptions) -> Result<f64> {
    let r_ser = 1e-3 * (1.0 / a).min(1.0);
    let checkpoints = [r_max / 4.0, r_max / 2.0, r_max];
    let mut samples = [0.0f64; 3];
    let slope_cap = opts.slope_cap;
    let (u0, v0) = series_start(n, a, r_ser);
    let mut f = move |r: f64, y: &[f64; 2]| [y[1], curvature_rhs(n, r, y[0], y[1])];
    integrate_checkpoints(
        &mut f,
        r_ser,
        [u0, v0],
        &checkpoints,
        &OdeOptions {
            rtol: opts.tol,
            atol: opts.tol * 1e-2,
            h_init: Some(r_ser * 0.1),
            ..Default::default()
        },
        &mut |k, r, y| samples[k] = y[0] / r,
        &mut |r, y| {
            if y[1].abs() > slope_cap {
                Err(Error::SlopeBlowUp {
                    r,
                    slope: y[1],
                    cap: slope_cap,
                })
            } else {
                Ok(())
            }
        },
    )?;
    let [s3, s2, s1] = samples;
    let ta = (4.0 * s1 - s2) / 3.0;
    let tb = (4.0 * s2 - s3) / 3.0;
    Ok((16.0 * ta - tb) / 15.0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShootingResult {
    pub profile: Profile,
    /// Axis height u(0) of the solved expander.
    pub a: f64,
    pub residual_sup: f64,
    pub slope_error: f64,
    pub iterations: usize,
    pub trace: TraceReport,
}

#[derive(Debug, Clone)]
pub struct ShootOptions {
    /// Tolerance on the asymptotic-slope mismatch |trace - tau|.
    pub tol: f64,
    pub integrate: IntegrateOptions,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_intervals: usize,
    pub r_max: f64,
    pub stretch: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_intervals: 2048,
            r_max: 40.0,
            stretch: 1.0,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<RadialGrid> {
        make_radial_grid(self.n_intervals, self.r_max, self.stretch)
    }
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            integrate: IntegrateOptions::default(),
            grid: GridSpec::default(),
        }
    }
}

/// Solves for the expander asymptotic to the cone of slope tau > 0.
///
/// The initial bracket scans a in {2^-6, ..., 2^3} tau sqrt(n) (the axis
/// relation u''(0) = a/2n suggests a scales with tau). Exactly one sign
/// change is required: none is a bracket failure, several contradict
/// uniqueness and abort with the scan table attached. Bisection guarded by
/// secant steps then refines the root.
pub fn shoot(n: usize, tau: f64, tol: f64) -> Result<ShootingResult> {
    shoot_with(
        n,
        tau,
        &ShootOptions {
            tol,
            ..Default::default()
        },
    )
}

pub fn shoot_with(n: usize, tau: f64, opts: &ShootOptions) -> Result<ShootingResult> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n = {n} < 2")));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "shooting needs tau > 0, got {tau} (tau = 0 is the hyperplane)"
        )));
    }
    let r_max = opts.grid.r_max;
    let g = |a: f64| -> Result<f64> {
        Ok(slope_of_axis_height(n, a, r_max, &opts.integrate)? - tau)
    };

    // Bracket scan.
    let base = tau * (n as f64).sqrt();
    let mut scan: Vec<(f64, f64)> = Vec::new();
    for e in -6..=3 {
        let a = base * (2.0f64).powi(e);
        match g(a) {
            Ok(v) => scan.push((a, v)),
            Err(Error::SlopeBlowUp { .. }) => scan.push((a, f64::NAN)),
            Err(e) => return Err(e),
        }
    }
    let mut brackets = Vec::new();
    for w in scan.windows(2) {
        let (_, g0) = w[0];
        let (_, g1) = w[1];
        if g0.is_finite() && g1.is_finite() && g0 * g1 < 0.0 {
            brackets.push((w[0], w[1]));
        }
    }
    if brackets.is_empty() {
        return Err(Error::BracketFailure { scan });
    }
    if brackets.len() > 1 {
        return Err(Error::BracketAmbiguous {
            changes: brackets.len(),
            scan,
        });
    }
    let ((mut a_lo, mut g_lo), (mut a_hi, mut g_hi)) = brackets[0];

    // Secant-accelerated bisection on g(a).
    let mut iterations = scan.len();
    let mut best = (a_lo, g_lo.abs());
    for _ in 0..200 {
        if g_lo.abs() <= opts.tol {
            best = (a_lo, g_lo.abs());
            break;
        }
        if g_hi.abs() <= opts.tol {
            best = (a_hi, g_hi.abs());
            break;
        }
        if (a_hi - a_lo).abs() <= 1e-15 * a_hi.abs() {
            best = if g_lo.abs() < g_hi.abs() {
                (a_lo, g_lo.abs())
            } else {
                (a_hi, g_hi.abs())
            };
            break;
        }
        // Secant proposal, safeguarded into the middle 90% of the bracket.
        let mut a_mid = a_hi - g_hi * (a_hi - a_lo) / (g_hi - g_lo);
        let lo_guard = a_lo + 0.05 * (a_hi - a_lo);
        let hi_guard = a_hi - 0.05 * (a_hi - a_lo);
        if !(a_mid.is_finite()) || a_mid < lo_guard || a_mid > hi_guard {
            a_mid = 0.5 * (a_lo + a_hi);
        }
        let g_mid = g(a_mid)?;
        iterations += 1;
        if g_mid.abs() < best.1 {
            best = (a_mid, g_mid.abs());
        }
        if g_lo * g_mid <= 0.0 {
            a_hi = a_mid;
            g_hi = g_mid;
        } else {
            a_lo = a_mid;
            g_lo = g_mid;
        }
    }
    let (a, best_g) = best;
    if best_g > opts.tol {
        return Err(Error::ToleranceNotMet {
            tol: opts.tol,
            best: best_g,
        });
    }

    let grid = opts.grid.build()?;
    let profile = integrate_profile(n, a, &grid, &opts.integrate)?;
    let trace = trace_at_infinity(&profile, 1e-4)?;
    let residual = residual_sup(&profile, n)?;
    Ok(ShootingResult {
        a,
        residual_sup: residual,
        slope_error: (trace.value - tau).abs(),
        iterations,
        trace,
        profile,
    })
}

/// Decay diagnostics of a profile against its asymptotic cone:
/// f = (u - tau r)/sqrt(1+tau^2) is the signed normal offset,
/// f' its tangential (arc-length) derivative along the cone, and
/// M = sup over the tail half of |x| (|f| + |f'|).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DecayReport {
    pub m_hat: f64,
    /// Radius at which the sup is attained.
    pub at_r: f64,
}

pub const DECAY_TRACE_TOL: f64 = 1e-3;

pub fn decay_constant(p: &Profile, cone: &ConeSpec) -> Result<DecayReport> {
    let trace = trace_at_infinity(p, 1e-2)?;
    if (trace.value - cone.tau).abs() > DECAY_TRACE_TOL {
        return Err(Error::TraceMismatch {
            found: trace.value,
            expected: cone.tau,
            tol: DECAY_TRACE_TOL,
        });
    }
    let tau = cone.tau;
    let slant = cone.slant();
    let nodes = p.grid().nodes();
    let half = p.r_max() / 2.0;
    let mut m_hat = 0.0f64;
    let mut at_r = half;
    for i in 0..p.len() {
        let r = nodes[i];
        if r < half {
            continue;
        }
        let f = (p.u()[i] - tau * r) / slant;
        // d/ds with s the arc length along the cone: ds = slant dr.
        let fp = (p.du()[i] - tau) / (slant * slant);
        let x = p.ambient_radius(i);
        let m = x * (f.abs() + fp.abs());
        if m > m_hat {
            m_hat = m;
            at_r = r;
        }
    }
    Ok(DecayReport { m_hat, at_r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_radial_grid;
    use crate::profile::cone_profile;

    #[test]
    fn hyperplane_residual_is_zero() {
        let grid = make_radial_grid(64, 10.0, 1.0).unwrap();
        let p = Profile::new(grid.clone(), vec![0.0; grid.len()], vec![0.0; grid.len()]).unwrap();
        let r = expander_residual(&p, 2).unwrap();
        assert!(r.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cone_residual_matches_direct_substitution() {
        // u = tau r: u'' = 0 and (u - r u') = 0, so R = (n-1) tau / r.
        let grid = make_radial_grid(64, 8.0, 1.0).unwrap();
        let cone = ConeSpec::new(2, 1.0).unwrap();
        let p = cone_profile(&cone, &grid);
        let res = expander_residual(&p, 2).unwrap();
        let i = grid.nodes().iter().position(|&r| r == 1.0).unwrap();
        // du[0] = 0 convention perturbs the first stencils; check away from it.
        assert!((res[i] - 1.0).abs() < 1e-9, "residual {}", res[i]);
        let j = grid.nodes().iter().position(|&r| r == 5.0).unwrap();
        assert!((res[j] - 0.2).abs() < 1e-9);
    }

    #[test]
    fn axis_curvature_relation() {
        // u''(0) = a/(2n), via the series start and via FD on integrator output.
        let n = 2;
        let a = 0.8;
        let grid = make_radial_grid(512, 10.0, 1.0).unwrap();
        let p = integrate_profile(n, a, &grid, &IntegrateOptions::default()).unwrap();
        let d2 = derivative_samples(p.grid(), p.du(), 1, 2);
        assert!(
            (d2[0] - a / (2.0 * n as f64)).abs() < 1e-6,
            "u''(0) = {} vs {}",
            d2[0],
            a / (2.0 * n as f64)
        );
    }

    #[test]
    fn small_axis_height_stays_small() {
        // Continuity toward the plane: sup u <= C a on [0, 1].
        let grid = make_radial_grid(64, 10.0, 1.0).unwrap();
        let mut prev_sup = f64::INFINITY;
        for &a in &[0.1, 0.05, 0.025] {
            let p = integrate_profile(2, a, &grid, &IntegrateOptions::default()).unwrap();
            let sup = p
                .grid()
                .nodes()
                .iter()
                .zip(p.u())
                .filter(|(&r, _)| r <= 1.0)
                .map(|(_, &u)| u)
                .fold(0.0f64, f64::max);
            assert!(sup <= 3.0 * a, "sup {} for a = {a}", sup);
            assert!(sup < prev_sup);
            prev_sup = sup;
        }
    }

    #[test]
    fn profile_slope_is_monotone_nonnegative() {
        let grid = make_radial_grid(256, 20.0, 1.0).unwrap();
        let p = integrate_profile(3, 1.2, &grid, &IntegrateOptions::default()).unwrap();
        assert!(p.du().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn shoot_recovers_unit_slope() {
        let res = shoot(2, 1.0, 1e-10).unwrap();
        assert!(res.a > 0.0);
        assert!(res.slope_error < 1e-6, "slope error {}", res.slope_error);
        assert!(res.residual_sup < 1e-8, "residual {}", res.residual_sup);
        assert!(res.trace.converged);
    }

    #[test]
    fn shoot_rejects_flat_and_bad_input() {
        assert!(shoot(2, 0.0, 1e-8).is_err());
        assert!(shoot(1, 1.0, 1e-8).is_err());
    }

    #[test]
    fn decay_of_cone_over_itself_is_zero() {
        let grid = make_radial_grid(128, 40.0, 1.0).unwrap();
        let cone = ConeSpec::new(2, 0.7).unwrap();
        let p = cone_profile(&cone, &grid);
        let rep = decay_constant(&p, &cone).unwrap();
        assert!(rep.m_hat < 1e-12);
    }

    #[test]
    fn decay_mismatch_is_rejected() {
        let grid = make_radial_grid(128, 40.0, 1.0).unwrap();
        let cone = ConeSpec::new(2, 0.7).unwrap();
        let p = cone_profile(&cone, &grid);
        let wrong = ConeSpec::new(2, 0.9).unwrap();
        assert!(matches!(
            decay_constant(&p, &wrong),
            Err(Error::TraceMismatch { .. })
        ));
    }
}
