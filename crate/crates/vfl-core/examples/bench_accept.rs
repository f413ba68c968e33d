use num_complex::Complex64;
use std::time::Instant;
use vfl_core::divisor::Divisor;
use vfl_core::solver::{solve_vortex, sup_bounds_check};

fn main() {
    let t0 = Instant::now();
    for rho in [Complex64::new(0.0, 1.0), Complex64::new(1.0, 2.0)] {
        for (d, pts) in [
            (1u32, vec![((0.5, 0.5), 1u32)]),
            (2, vec![((0.3, 0.4), 1), ((0.7, 0.6), 1)]),
            (3, vec![((0.25, 0.25), 1), ((0.75, 0.4), 1), ((0.5, 0.75), 1)]),
        ] {
            for tau in [100.0, 400.0, 1600.0] {
                let t1 = Instant::now();
                let torus = vfl_core::torus::FlatTorus::new(rho, 256).unwrap();
                let div = Divisor::new(&pts).unwrap();
                let (vf, rep) = solve_vortex(&torus, &div, tau).unwrap();
                let target = 2.0 * std::f64::consts::PI * d as f64 / tau;
                let rel = (rep.mass - target).abs() / target;
                let (wmin, excess) = sup_bounds_check(&vf);
                println!(
                    "rho={rho} d={d} tau={tau}: mass_rel={rel:.2e} wmin={wmin:+.2e} excess/sqrt={:+.2e} iters={} {:.2}s",
                    excess / tau.sqrt(), rep.newton_iters, t1.elapsed().as_secs_f64()
                );
            }
        }
    }
    println!("TOTAL: {:.1}s", t0.elapsed().as_secs_f64());
}
