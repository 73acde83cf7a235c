//! Deterministic Nelder-Mead maximization in low dimension.
//!
//! Derivative-free on purpose: the entropy objective is a quadrature whose
//! gradients we do not implement. The seed only perturbs the initial simplex
//! shape; given (seed, tolerances) the decision sequence is reproducible.

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    pub max_iter: usize,
    /// Stop when the simplex diameter falls below this.
    pub x_tol: f64,
    /// Stop when the value spread falls below this.
    pub f_tol: f64,
    pub seed: u64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iter: 400,
            x_tol: 1e-9,
            f_tol: 1e-12,
            seed: 0,
        }
    }
}

/// xorshift* generator; enough randomness to break simplex degeneracy.
struct Rng(u64);

impl Rng {
    fn next_unit(&mut self) -> f64 {
        let mut x = self.0.wrapping_add(0x9E3779B97F4A7C15);
        self.0 = x;
        x ^= x >> 30;
        x = x.wrapping_mul(0xBF58476D1CE4E5B9);
        x ^= x >> 27;
        x = x.wrapping_mul(0x94D049BB133111EB);
        x ^= x >> 31;
        (x >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Maximizes f over the box [lo, hi]^dim starting from x0 with the given
/// initial step sizes. Returns (argmax, max). Proposals are clamped into the
/// box; the caller detects boundary maximizers by inspecting the result.
pub fn maximize(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    steps: &[f64],
    lo: &[f64],
    hi: &[f64],
    opts: &SimplexOptions,
) -> (Vec<f64>, f64) {
    let dim = x0.len();
    assert!(dim >= 1 && steps.len() == dim && lo.len() == dim && hi.len() == dim);
    let clamp = |x: &mut Vec<f64>| {
        for d in 0..dim {
            x[d] = x[d].clamp(lo[d], hi[d]);
        }
    };
    let mut rng = Rng(opts.seed ^ 0xD1B54A32D192ED03);

    // Initial simplex: x0 plus a perturbed step along each axis.
    let mut pts: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let mut x = x0.to_vec();
    clamp(&mut x);
    let v = f(&x);
    pts.push((x, v));
    for d in 0..dim {
        let mut x = x0.to_vec();
        let jitter = 0.75 + 0.5 * rng.next_unit();
        x[d] += steps[d] * jitter;
        if x[d] > hi[d] {
            x[d] = x0[d] - steps[d] * jitter;
        }
        clamp(&mut x);
        let v = f(&x);
        pts.push((x, v));
    }

    for _ in 0..opts.max_iter {
        // Sort descending by value (maximization).
        pts.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let diam = (0..dim)
            .map(|d| {
                let (mn, mx) = pts
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(mn, mx), p| {
                        (mn.min(p.0[d]), mx.max(p.0[d]))
                    });
                mx - mn
            })
            .fold(0.0f64, f64::max);
        let spread = pts[0].1 - pts[dim].1;
        if diam < opts.x_tol || spread < opts.f_tol {
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|d| pts[..dim].iter().map(|p| p.0[d]).sum::<f64>() / dim as f64)
            .collect();
        let worst = pts[dim].clone();
        let mk = |alpha: f64| {
            let mut x: Vec<f64> = (0..dim)
                .map(|d| centroid[d] + alpha * (centroid[d] - worst.0[d]))
                .collect();
            for d in 0..dim {
                x[d] = x[d].clamp(lo[d], hi[d]);
            }
            x
        };

        let xr = mk(1.0);
        let fr = f(&xr);
        if fr > pts[0].1 {
            let xe = mk(2.0);
            let fe = f(&xe);
            pts[dim] = if fe > fr { (xe, fe) } else { (xr, fr) };
        } else if fr > pts[dim - 1].1 {
            pts[dim] = (xr, fr);
        } else {
            let xc = mk(-0.5);
            let fc = f(&xc);
            if fc > pts[dim].1 {
                pts[dim] = (xc, fc);
            } else {
                // Shrink toward the best point.
                let best = pts[0].0.clone();
                for p in pts.iter_mut().skip(1) {
                    for d in 0..dim {
                        p.0[d] = best[d] + 0.5 * (p.0[d] - best[d]);
                    }
                    p.1 = f(&p.0);
                }
            }
        }
    }
    pts.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    pts.remove(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_maximum() {
        let mut f = |x: &[f64]| -(x[0] - 0.3).powi(2) - 2.0 * (x[1] + 0.7).powi(2) + 5.0;
        let (x, v) = maximize(
            &mut f,
            &[0.0, 0.0],
            &[0.5, 0.5],
            &[-4.0, -4.0],
            &[4.0, 4.0],
            &SimplexOptions::default(),
        );
        assert!((x[0] - 0.3).abs() < 1e-6 && (x[1] + 0.7).abs() < 1e-6);
        assert!((v - 5.0).abs() < 1e-10);
    }

    #[test]
    fn respects_bounds() {
        let mut f = |x: &[f64]| x[0]; // max at the upper bound
        let (x, v) = maximize(
            &mut f,
            &[0.0],
            &[0.4],
            &[-1.0],
            &[1.0],
            &SimplexOptions::default(),
        );
        assert!((x[0] - 1.0).abs() < 1e-9);
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn deterministic_given_seed() {
        let run = |seed| {
            let mut f = |x: &[f64]| -(x[0].powi(2) + (x[1] - 1.0).powi(2)).sqrt();
            maximize(
                &mut f,
                &[2.0, -2.0],
                &[0.7, 0.7],
                &[-5.0, -5.0],
                &[5.0, 5.0],
                &SimplexOptions {
                    seed,
                    ..Default::default()
                },
            )
        };
        let (a1, v1) = run(7);
        let (a2, v2) = run(7);
        assert_eq!(a1, a2);
        assert_eq!(v1, v2);
    }
}
