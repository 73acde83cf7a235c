use expanderlab::expander::{residual_sup, shoot_with, GridSpec, ShootOptions};

fn main() {
    for &n in &[2usize, 3] {
        for &tau in &[0.5, 1.0, 2.0] {
            let mut sups = Vec::new();
            let mut a = 0.0;
            for &nn in &[512usize, 1024, 2048] {
                let opts = ShootOptions {
                    tol: 1e-10,
                    grid: GridSpec { n_intervals: nn, r_max: 40.0, stretch: 1.0 },
                    ..Default::default()
                };
                let res = shoot_with(n, tau, &opts).unwrap();
                a = res.a;
                sups.push(residual_sup(&res.profile, n).unwrap());
            }
            let order = expanderlab::fd::convergence_order(&sups);
            println!(
                "n={} tau={} a={:.6} residuals={:?} order={:.2}",
                n, tau, a, sups, order
            );
        }
    }
}
