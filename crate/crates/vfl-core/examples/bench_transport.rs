use num_complex::Complex64;
use std::time::Instant;
use vfl_core::divisor::Divisor;
use vfl_core::transport::{transport, ModulusPath};

fn main() {
    let path = ModulusPath { rho0: Complex64::new(0.0, 1.0), rho1: Complex64::new(1.0, 2.0) };
    let d = Divisor::single((0.5, 0.5));
    for (tau, n) in [(100.0f64, 256usize), (400.0, 256), (1600.0, 256)] {
        let steps = (2.0 * (tau as f64).sqrt()).ceil() as usize;
        let t0 = Instant::now();
        match transport(path, &d, tau, steps, n) {
            Ok(tr) => {
                let maxres = tr.residuals.iter().fold(0.0f64, |a, r| a.max(r.0.max(r.1)));
                let iters: usize = tr.eta_iterations.iter().sum::<usize>() / tr.eta_iterations.len().max(1);
                println!("tau={tau} N={n} steps={steps}: delta={:.4e} maxres={:.2e} eta-iters~{iters} in {:.1}s",
                    tr.displacement, maxres, t0.elapsed().as_secs_f64());
            }
            Err(e) => println!("tau={tau}: ERROR {e} after {:.1}s", t0.elapsed().as_secs_f64()),
        }
    }
}
