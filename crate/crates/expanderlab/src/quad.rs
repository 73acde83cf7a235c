//! Quadrature over profile curves and Gaussian angular averages.
//!
//! Surface integrals over a rotation hypersurface reduce to curve integrals
//! along the meridian: integral of f(r, u) r^(n-1) ds times |S^(n-1)|. Each
//! grid segment is integrated with Gauss-Legendre on the cubic Hermite
//! reconstruction; steep segments (|du| large, as near a sphere's equator)
//! switch the integration variable from r to u, where the inverse graph is
//! smooth, so profiles with near-vertical tangents stay accurate.

use crate::profile::Profile;

/// 8-point Gauss-Legendre rule on [-1, 1].
const GL8_X: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// 16-point Gauss-Legendre rule on [-1, 1] (angular averages).
const GL16_X: [f64; 16] = [
    -0.989_400_934_991_649_9,
    -0.944_575_023_073_232_6,
    -0.865_631_202_387_831_8,
    -0.755_404_408_355_003,
    -0.617_876_244_402_643_8,
    -0.458_016_777_657_227_4,
    -0.281_603_550_779_258_9,
    -0.095_012_509_837_637_4,
    0.095_012_509_837_637_4,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_8,
    0.755_404_408_355_003,
    0.865_631_202_387_831_8,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];
const GL16_W: [f64; 16] = [
    0.027_152_459_411_754_1,
    0.062_253_523_938_647_9,
    0.095_158_511_682_492_8,
    0.124_628_971_255_533_9,
    0.149_595_988_816_576_7,
    0.169_156_519_395_002_5,
    0.182_603_415_044_923_6,
    0.189_450_610_455_068_5,
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_5,
    0.149_595_988_816_576_7,
    0.124_628_971_255_533_9,
    0.095_158_511_682_492_8,
    0.062_253_523_938_647_9,
    0.027_152_459_411_754_1,
];

/// Gamma function at integer and half-integer arguments (n/2 for n >= 1).
pub fn gamma_half(n: usize) -> f64 {
    // Gamma(n/2) via Gamma(1/2) = sqrt(pi), Gamma(1) = 1, Gamma(x+1) = x Gamma(x).
    let mut val = if n % 2 == 1 {
        std::f64::consts::PI.sqrt()
    } else {
        1.0
    };
    let mut k = n % 2;
    if k == 0 {
        k = 2;
    }
    while k < n {
        val *= k as f64 / 2.0;
        k += 2;
    }
    val
}

/// Area of the unit sphere S^(n-1) in R^n.
pub fn sphere_area(n_minus_1_sphere_in_rn: usize) -> f64 {
    let n = n_minus_1_sphere_in_rn;
    2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// Normalization (4 pi)^(-n/2) |S^(n-1)| = 2 / (2^n Gamma(n/2)).
pub fn gaussian_prefactor(n: usize) -> f64 {
    2.0 / ((2.0f64).powi(n as i32) * gamma_half(n))
}

fn wallis(k: usize) -> f64 {
    // integral of sin^k over [0, pi]
    match k {
        0 => std::f64::consts::PI,
        1 => 2.0,
        _ => (k as f64 - 1.0) / k as f64 * wallis(k - 2),
    }
}

/// Average over the unit directions of the base R^n of exp(-|z|^2 / 4),
/// where the point has base length `rho_perp`, height `z_ax`, and the
/// translation has off-axis magnitude `y_off` (so |z|^2 depends on the
/// angle psi between the base direction and the offset direction).
///
/// Factorizes as exp(-z_ax^2/4) times an angular average computed with the
/// worst exponent folded out, so nothing overflows; returns 0 below 1e-300.
pub fn gaussian_angular_factor(n: usize, rho_perp: f64, z_ax: f64, y_off: f64) -> f64 {
    let rho_perp = rho_perp.abs();
    let y_off = y_off.abs();
    // Largest exponent over the angle (at cos psi = -1).
    let e_max = -((rho_perp - y_off).powi(2) + z_ax * z_ax) / 4.0;
    if e_max < -690.0 {
        return 0.0;
    }
    let c = rho_perp * y_off / 2.0;
    if c == 0.0 {
        return e_max.exp();
    }
    // avg over psi of exp(-c (1 + cos psi)) with weight sin^(n-2).
    let panels = (2 + (c / 4.0) as usize).min(64);
    let bn = wallis(n - 2);
    let mut acc = 0.0;
    let h = std::f64::consts::PI / panels as f64;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (x, w) in GL16_X.iter().zip(GL16_W.iter()) {
            let psi = mid + 0.5 * h * x;
            let val = (-c * (1.0 + psi.cos())).exp() * psi.sin().powi(n as i32 - 2);
            acc += w * 0.5 * h * val;
        }
    }
    e_max.exp() * acc / bn
}

/// Integral of f(r, u) r^(n-1) ds along the whole profile curve.
pub fn curve_integral(p: &Profile, n: usize, f: &dyn Fn(f64, f64) -> f64) -> f64 {
    let mut total = 0.0;
    for seg in 0..p.len() - 1 {
        total += segment_integral(p, seg, n, f);
    }
    total
}

/// Like [`curve_integral`] with every segment halved (embedded refinement,
/// used for a-posteriori error estimates).
pub fn curve_integral_refined(p: &Profile, n: usize, f: &dyn Fn(f64, f64) -> f64) -> f64 {
    let mut total = 0.0;
    for seg in 0..p.len() - 1 {
        total += segment_integral_halved(p, seg, n, f);
    }
    total
}

fn hermite_on_segment(x0: f64, v0: f64, m0: f64, x1: f64, v1: f64, m1: f64, t: f64) -> (f64, f64) {
    let h = x1 - x0;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let v = h00 * v0 + h10 * h * m0 + h01 * v1 + h11 * h * m1;
    let dv = (6.0 * t2 - 6.0 * t) * (v0 - v1) / h
        + (3.0 * t2 - 4.0 * t + 1.0) * m0
        + (3.0 * t2 - 2.0 * t) * m1;
    (v, dv)
}

fn segment_is_steep(p: &Profile, seg: usize) -> bool {
    let d0 = p.du()[seg];
    let d1 = p.du()[seg + 1];
    d0.abs() > 1.0 && d1.abs() > 1.0 && d0.signum() == d1.signum()
        && p.u()[seg + 1] != p.u()[seg]
}

/// Integral over one grid segment, restricted to the sub-interval
/// [t_lo_frac, t_hi_frac] in the segment parameter (1.0 = whole segment).
fn segment_integral_range(
    p: &Profile,
    seg: usize,
    n: usize,
    f: &dyn Fn(f64, f64) -> f64,
    t_lo: f64,
    t_hi: f64,
) -> f64 {
    let nodes = p.grid().nodes();
    let (r0, r1) = (nodes[seg], nodes[seg + 1]);
    let (u0, u1) = (p.u()[seg], p.u()[seg + 1]);
    let (d0, d1) = (p.du()[seg], p.du()[seg + 1]);
    let mut acc = 0.0;
    if segment_is_steep(p, seg) {
        // Integrate in the height variable: r(u) is the smooth graph here.
        let (m0, m1) = (1.0 / d0, 1.0 / d1);
        let ua = u0 + (u1 - u0) * t_lo;
        let ub = u0 + (u1 - u0) * t_hi;
        let span = ub - ua;
        for (x, w) in GL8_X.iter().zip(GL8_W.iter()) {
            let uu = 0.5 * (ua + ub) + 0.5 * span * x;
            let t = (uu - u0) / (u1 - u0);
            let (rr, drdu) = hermite_on_segment(u0, r0, m0, u1, r1, m1, t);
            let ds = (1.0 + drdu * drdu).sqrt();
            acc += w * 0.5 * span.abs() * f(rr, uu) * rr.abs().powi(n as i32 - 1) * ds;
        }
    } else {
        let ra = r0 + (r1 - r0) * t_lo;
        let rb = r0 + (r1 - r0) * t_hi;
        let span = rb - ra;
        for (x, w) in GL8_X.iter().zip(GL8_W.iter()) {
            let rr = 0.5 * (ra + rb) + 0.5 * span * x;
            let t = (rr - r0) / (r1 - r0);
            let (uu, dudr) = hermite_on_segment(r0, u0, d0, r1, u1, d1, t);
            let ds = (1.0 + dudr * dudr).sqrt();
            acc += w * 0.5 * span * f(rr, uu) * rr.powi(n as i32 - 1) * ds;
        }
    }
    acc
}

fn segment_integral(p: &Profile, seg: usize, n: usize, f: &dyn Fn(f64, f64) -> f64) -> f64 {
    segment_integral_range(p, seg, n, f, 0.0, 1.0)
}

fn segment_integral_halved(p: &Profile, seg: usize, n: usize, f: &dyn Fn(f64, f64) -> f64) -> f64 {
    segment_integral_range(p, seg, n, f, 0.0, 0.5) + segment_integral_range(p, seg, n, f, 0.5, 1.0)
}

/// Integral of f(r, u) r^(n-1) ds over the part of the curve with ambient
/// radius sqrt(r^2 + u^2) < radius. Crossing segments are split at the
/// crossing found by bisection on the Hermite reconstruction.
pub fn curve_integral_in_ball(
    p: &Profile,
    n: usize,
    radius: f64,
    f: &dyn Fn(f64, f64) -> f64,
) -> f64 {
    let rad2 = radius * radius;
    let nodes = p.grid().nodes();
    let mut total = 0.0;
    for seg in 0..p.len() - 1 {
        let in0 = nodes[seg].powi(2) + p.u()[seg].powi(2) < rad2;
        let in1 = nodes[seg + 1].powi(2) + p.u()[seg + 1].powi(2) < rad2;
        match (in0, in1) {
            (true, true) => total += segment_integral_range(p, seg, n, f, 0.0, 1.0),
            (false, false) => {}
            _ => {
                // Bisect the crossing in the segment parameter.
                let (r0, r1) = (nodes[seg], nodes[seg + 1]);
                let (u0, u1) = (p.u()[seg], p.u()[seg + 1]);
                let (d0, d1) = (p.du()[seg], p.du()[seg + 1]);
                let phi = |t: f64| {
                    let rr = r0 + (r1 - r0) * t;
                    let (uu, _) = hermite_on_segment(r0, u0, d0, r1, u1, d1, t);
                    rr * rr + uu * uu - rad2
                };
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if (phi(mid) < 0.0) == in0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let t_star = 0.5 * (lo + hi);
                if in0 {
                    total += segment_integral_range(p, seg, n, f, 0.0, t_star);
                } else {
                    total += segment_integral_range(p, seg, n, f, t_star, 1.0);
                }
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_radial_grid;
    use crate::profile::Profile;

    #[test]
    fn gamma_and_sphere_constants() {
        assert!((gamma_half(1) - std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert!((gamma_half(2) - 1.0).abs() < 1e-15);
        assert!((gamma_half(3) - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert!((gamma_half(4) - 1.0).abs() < 1e-15);
        // |S^1| = 2 pi, |S^2| = 4 pi, |S^3| = 2 pi^2
        assert!((sphere_area(2) - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!((sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!((sphere_area(4) - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }

    /// Series oracle for the modified Bessel function I_0.
    fn bessel_i0(x: f64) -> f64 {
        let q = x * x / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            term *= q / (k as f64 * k as f64);
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        sum
    }

    #[test]
    fn angular_factor_matches_bessel_oracle_n2() {
        // n = 2: avg over the circle of e^{-|z|^2/4} = e^{-(a^2+b^2+z^2)/4} I_0(ab/2).
        for &(a, b, z) in &[(0.5, 0.3, 0.2), (2.0, 1.5, -1.0), (4.0, 4.0, 0.0), (8.0, 7.5, 2.0)] {
            let got = gaussian_angular_factor(2, a, z, b);
            let expect = (-(a * a + b * b + z * z) / 4.0f64).exp() * bessel_i0(a * b / 2.0);
            assert!(
                (got - expect).abs() < 1e-12 * expect.max(1e-30),
                "a={a} b={b} z={z}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn angular_factor_matches_sinh_oracle_n3() {
        // n = 3: avg with weight sin(psi)/2 gives sinh(c)/c, c = ab/2.
        for &(a, b, z) in &[(0.7, 0.4, 0.1), (3.0, 2.0, 1.0), (6.0, 5.0, -0.5)] {
            let c = a * b / 2.0;
            let got = gaussian_angular_factor(3, a, z, b);
            let expect = (-(a * a + b * b + z * z) / 4.0f64).exp() * c.sinh() / c;
            assert!(
                (got - expect).abs() < 1e-12 * expect.max(1e-30),
                "a={a} b={b} z={z}"
            );
        }
    }

    #[test]
    fn angular_factor_without_offset() {
        let got = gaussian_angular_factor(4, 1.5, 2.0, 0.0);
        let expect = (-(1.5f64 * 1.5 + 4.0) / 4.0).exp();
        assert!((got - expect).abs() < 1e-15);
    }

    #[test]
    fn area_of_flat_disk() {
        // f = 1, plane profile: integral r^{n-1} dr over [0, R] times |S^{n-1}|
        // is the ball volume omega_n R^n; for n = 2 the disk of area pi R^2.
        let grid = make_radial_grid(64, 3.0, 1.0).unwrap();
        let zero = Profile::new(grid.clone(), vec![0.0; grid.len()], vec![0.0; grid.len()]).unwrap();
        let v = curve_integral(&zero, 2, &|_, _| 1.0) * sphere_area(2);
        assert!((v - std::f64::consts::PI * 9.0).abs() < 1e-12);
    }

    #[test]
    fn ball_restriction_cuts_the_cone() {
        // Cone tau = 1, n = 2: H^2(C intersect B_R) = sqrt(2) pi (R^2/2)
        // since |x| = sqrt(2) r: the piece has r < R/sqrt(2), area
        // = 2 pi integral_0^{R/sqrt2} sqrt(2) r dr = sqrt(2) pi R^2 / 2.
        let grid = make_radial_grid(128, 4.0, 1.0).unwrap();
        let cone = crate::cone::ConeSpec::new(2, 1.0).unwrap();
        let p = crate::profile::cone_profile(&cone, &grid);
        let rad = 2.5f64;
        let got = curve_integral_in_ball(&p, 2, rad, &|_, _| 1.0) * sphere_area(2);
        let expect = std::f64::consts::PI * rad * rad / (2.0f64).sqrt();
        assert!((got - expect).abs() < 1e-10 * expect, "{got} vs {expect}");
    }

    #[test]
    fn steep_segments_use_inverse_graph() {
        // Quarter circle u = sqrt(1 - r^2) sampled at r = sin(phi) for
        // uniform polar angles: segments near the equator are near-vertical.
        // With r^{n-1} = 1 (n = 1) the integral is the arc length, known
        // exactly: phi_max (we stop a hair short of pi/2).
        let m = 64usize;
        let delta = 1.5e-6;
        let phi_max = std::f64::consts::FRAC_PI_2 - delta;
        let nodes: Vec<f64> = (0..=m).map(|i| (phi_max * i as f64 / m as f64).sin()).collect();
        let grid = crate::grid::RadialGrid::new(nodes.clone(), 1.0).unwrap();
        let u: Vec<f64> = nodes.iter().map(|&r| (1.0 - r * r).sqrt()).collect();
        let mut du: Vec<f64> = nodes.iter().map(|&r| -r / (1.0 - r * r).sqrt()).collect();
        du[0] = 0.0;
        let p = Profile::new(grid, u, du).unwrap();
        let len = curve_integral(&p, 1, &|_, _| 1.0);
        assert!(
            (len - phi_max).abs() < 1e-8,
            "arc length {len} vs {phi_max}"
        );
    }
}
