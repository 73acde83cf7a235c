//! Adaptive explicit Runge-Kutta integration (Dormand-Prince 5(4)).
//!
//! Small fixed-dimension systems only; the embedded 4th-order error estimate
//! drives a PI step controller. Steps are clamped to land exactly on
//! requested checkpoints so solution values are recorded without dense
//! output interpolation.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 4th-order weights (for the error estimate b - b*).
const E1: f64 = B1 - 5179.0 / 57600.0;
const E3: f64 = B3 - 7571.0 / 16695.0;
const E4: f64 = B4 - 393.0 / 640.0;
const E5: f64 = B5 + 92097.0 / 339200.0;
const E6: f64 = B6 - 187.0 / 2100.0;
const E7: f64 = -1.0 / 40.0;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

/// Integrates y' = f(t, y) from t0 to each checkpoint in `checkpoints`
/// (strictly increasing, all > t0), invoking `on_node(k, t, y)` at the k-th
/// checkpoint. `guard` may inspect the state after every accepted step and
/// return an error to abort (slope caps and similar).
pub fn integrate_checkpoints<const D: usize>(
    f: &mut dyn FnMut(f64, &[f64; D]) -> [f64; D],
    t0: f64,
    y0: [f64; D],
    checkpoints: &[f64],
    opts: &OdeOptions,
    on_node: &mut dyn FnMut(usize, f64, &[f64; D]),
    guard: &mut dyn FnMut(f64, &[f64; D]) -> Result<()>,
) -> Result<[f64; D]> {
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let t_end = *checkpoints.last().expect("at least one checkpoint");
    let mut h = opts
        .h_init
        .unwrap_or(((t_end - t0) * 1e-4).max(1e-10))
        .min(opts.h_max);
    let mut next_cp = 0usize;
    let mut err_prev: f64 = 1.0;
    let mut steps = 0usize;

    while next_cp < checkpoints.len() {
        if steps >= opts.max_steps {
            return Err(Error::StepUnderflow { r: t, h });
        }
        steps += 1;

        let mut clamped = false;
        let mut h_try = h.min(opts.h_max);
        if t + h_try >= checkpoints[next_cp] {
            h_try = checkpoints[next_cp] - t;
            clamped = true;
        }
        if h_try <= t.abs().max(1.0) * 1e-15 {
            return Err(Error::StepUnderflow { r: t, h: h_try });
        }

        let add = |y: &[f64; D], terms: &[(f64, &[f64; D])]| {
            let mut out = *y;
            for (c, k) in terms {
                for d in 0..D {
                    out[d] += h_try * c * k[d];
                }
            }
            out
        };

        let k2 = f(t + C2 * h_try, &add(&y, &[(A21, &k1)]));
        let k3 = f(t + C3 * h_try, &add(&y, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h_try, &add(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h_try,
            &add(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h_try,
            &add(
                &y,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = add(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + h_try, &y_new);

        // Scaled error norm; non-finite states force a rejection.
        let mut err: f64 = 0.0;
        for d in 0..D {
            let e = h_try
                * (E1 * k1[d] + E3 * k3[d] + E4 * k4[d] + E5 * k5[d] + E6 * k6[d] + E7 * k7[d]);
            let sc = opts.atol + opts.rtol * y[d].abs().max(y_new[d].abs());
            let ratio = (e / sc).abs();
            if ratio.is_finite() && y_new[d].is_finite() {
                err = err.max(ratio);
            } else {
                err = f64::INFINITY;
            }
        }

        if err <= 1.0 {
            t += h_try;
            y = y_new;
            k1 = k7;
            guard(t, &y)?;
            if clamped {
                on_node(next_cp, t, &y);
                next_cp += 1;
            }
            // PI controller (orders 5/4).
            let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h = h_try * fac.clamp(0.2, 5.0);
            err_prev = err.max(1e-10);
        } else {
            let fac = (0.9 * err.powf(-1.0 / 5.0)).clamp(0.1, 1.0);
            h = h_try * fac;
            if !err.is_finite() {
                h = h_try * 0.1;
            }
        }
    }
    Ok(y)
}

/// Integrates to a single end time and returns the final state.
pub fn integrate_to<const D: usize>(
    f: &mut dyn FnMut(f64, &[f64; D]) -> [f64; D],
    t0: f64,
    y0: [f64; D],
    t1: f64,
    opts: &OdeOptions,
) -> Result<[f64; D]> {
    integrate_checkpoints(f, t0, y0, &[t1], opts, &mut |_, _, _| {}, &mut |_, _| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let mut f = |_t: f64, y: &[f64; 1]| [-y[0]];
        let y = integrate_to(&mut f, 0.0, [1.0], 2.0, &OdeOptions::default()).unwrap();
        assert!((y[0] - (-2.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_checkpoints() {
        let mut f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let cps: Vec<f64> = (1..=8).map(|k| k as f64 * 0.5).collect();
        let mut recorded = Vec::new();
        integrate_checkpoints(
            &mut f,
            0.0,
            [1.0, 0.0],
            &cps,
            &OdeOptions::default(),
            &mut |k, t, y| recorded.push((k, t, y[0])),
            &mut |_, _| Ok(()),
        )
        .unwrap();
        assert_eq!(recorded.len(), 8);
        for (k, t, v) in recorded {
            assert_eq!(t, cps[k]);
            assert!((v - t.cos()).abs() < 1e-9, "cos({t})");
        }
    }

    #[test]
    fn step_budget_is_enforced() {
        let mut f = |_t: f64, y: &[f64; 1]| [y[0]];
        let res = integrate_to(
            &mut f,
            0.0,
            [1.0],
            100.0,
            &OdeOptions {
                max_steps: 5,
                h_init: Some(1e-6),
                h_max: 1e-6,
                ..Default::default()
            },
        );
        assert!(res.is_err());
    }

    #[test]
    fn guard_aborts() {
        let mut f = |_t: f64, y: &[f64; 1]| [y[0]];
        let res = integrate_checkpoints(
            &mut f,
            0.0,
            [1.0],
            &[10.0],
            &OdeOptions::default(),
            &mut |_, _, _| {},
            &mut |t, y| {
                if y[0] > 5.0 {
                    Err(crate::error::Error::SlopeBlowUp {
                        r: t,
                        slope: y[0],
                        cap: 5.0,
                    })
                } else {
                    Ok(())
                }
            },
        );
        assert!(matches!(res, Err(crate::error::Error::SlopeBlowUp { .. })));
    }
}
