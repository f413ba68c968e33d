//! Jacobi ϑ₁ kernels on the lattice Z + ρZ.
//!
//! Everything the vortex solver needs from ϑ₁ is packaged as two
//! doubly-periodic kernels in the offset w = (x−pₓ) + ρ(y−p_y):
//!
//!   L(w) = 2 log|ϑ₁(w|ρ)| − 2π Im(w)²/Im ρ       (log-magnitude kernel)
//!   Z(w) = ϑ₁′/ϑ₁(w) + 2πi Im(w)/Im ρ             (its d/dz, meromorphic 1/w pole)
//!
//! L satisfies Δ_g L = 4π(δ₀ − 1) on the unit-area torus and
//! L(w) − 2 log d(w,0) stays bounded as w → 0.

use num_complex::Complex64;

/// ϑ₁(w|ρ) = 2 Σ_{n≥0} (−1)ⁿ q^{(n+1/2)²} sin((2n+1)πw), q = e^{iπρ}.
pub fn theta1(w: Complex64, rho: Complex64) -> Complex64 {
    let q_exponent = Complex64::new(0.0, std::f64::consts::PI) * rho;
    let pi_w = std::f64::consts::PI * w;
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..THETA_TERMS {
        let nf = n as f64 + 0.5;
        let coeff = (q_exponent * nf * nf).exp();
        let term = coeff * ((2 * n + 1) as f64 * pi_w).sin();
        sum += if n % 2 == 0 { term } else { -term };
    }
    2.0 * sum
}

/// ϑ₁′(w|ρ) (derivative in w).
pub fn theta1_prime(w: Complex64, rho: Complex64) -> Complex64 {
    let q_exponent = Complex64::new(0.0, std::f64::consts::PI) * rho;
    let pi_w = std::f64::consts::PI * w;
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..THETA_TERMS {
        let nf = n as f64 + 0.5;
        let m = (2 * n + 1) as f64;
        let coeff = (q_exponent * nf * nf).exp() * m * std::f64::consts::PI;
        let term = coeff * (m * pi_w).cos();
        sum += if n % 2 == 0 { term } else { -term };
    }
    2.0 * sum
}

const THETA_TERMS: usize = 14;

/// Offset reduction: wrap (dx, dy) to [−1/2, 1/2)².
pub fn reduce_offset(dx: f64, dy: f64) -> (f64, f64) {
    (dx - (dx + 0.5).floor(), dy - (dy + 0.5).floor())
}

/// The periodic log-magnitude kernel L at coordinate offset (dx, dy).
/// Returns −∞ exactly at the lattice point.
pub fn kernel_l(dx: f64, dy: f64, rho: Complex64) -> f64 {
    let (dx, dy) = reduce_offset(dx, dy);
    let w = Complex64::new(dx, 0.0) + rho * dy;
    let th = theta1(w, rho);
    let mag = th.norm();
    let log_part = if mag == 0.0 { f64::NEG_INFINITY } else { 2.0 * mag.ln() };
    let im_w = rho.im * dy;
    log_part - 2.0 * std::f64::consts::PI * im_w * im_w / rho.im
}

/// The periodic meromorphic kernel Z = ∂_z(L/2) at offset (dx, dy);
/// Z(w) ~ 1/w near the lattice.
pub fn kernel_z(dx: f64, dy: f64, rho: Complex64) -> Complex64 {
    let (dx, dy) = reduce_offset(dx, dy);
    let w = Complex64::new(dx, 0.0) + rho * dy;
    let ratio = theta1_prime(w, rho) / theta1(w, rho);
    let im_w = rho.im * dy;
    ratio + Complex64::new(0.0, 2.0 * std::f64::consts::PI) * im_w / rho.im
}

/// arg ϑ₁ at the reduced offset; the phase convention for materialized
/// vortex sections.
pub fn theta1_arg(dx: f64, dy: f64, rho: Complex64) -> f64 {
    let (dx, dy) = reduce_offset(dx, dy);
    let w = Complex64::new(dx, 0.0) + rho * dy;
    theta1(w, rho).arg()
}

#[cfg(test)]
mod tests {
    use super::*;

    const RHOS: [Complex64; 3] = [
        Complex64::new(0.0, 1.0),
        Complex64::new(1.0, 2.0),
        Complex64::new(0.3, 0.8),
    ];

    #[test]
    fn theta1_odd_and_zero() {
        for rho in RHOS {
            let w = Complex64::new(0.17, 0.23);
            let a = theta1(w, rho);
            let b = theta1(-w, rho);
            assert!((a + b).norm() < 1e-13 * a.norm().max(1.0));
            assert!(theta1(Complex64::new(0.0, 0.0), rho).norm() == 0.0);
        }
    }

    #[test]
    fn kernel_l_periodicity() {
        for rho in RHOS {
            for (dx, dy) in [(0.31, 0.08), (0.02, 0.45), (-0.2, -0.33)] {
                let base = kernel_l(dx, dy, rho);
                for (mx, my) in [(1.0, 0.0), (0.0, 1.0), (-1.0, 1.0), (2.0, -1.0)] {
                    let shifted = kernel_l(dx + mx, dy + my, rho);
                    assert!((shifted - base).abs() < 1e-11, "rho={rho} shift=({mx},{my})");
                }
            }
        }
    }

    #[test]
    fn kernel_z_periodicity_and_pole() {
        for rho in RHOS {
            let base = kernel_z(0.21, 0.13, rho);
            let shifted = kernel_z(1.21, -0.87, rho);
            assert!((base - shifted).norm() < 1e-11);
            // pole: w·Z(w) → 1
            let eps = 1e-6;
            let w = Complex64::new(eps, 0.0) + rho * eps;
            let z = kernel_z(eps, eps, rho);
            assert!((w * z - Complex64::new(1.0, 0.0)).norm() < 1e-4);
        }
    }

    #[test]
    fn kernel_l_green_flux() {
        // Δ_g L = 4π(δ − 1) ⟺ Im ∮_∂D Z dw = 2π(1_{0∈D} − area(D)) for
        // coordinate squares D; checked by quadrature of the analytic Z.
        // 16-point Gauss–Legendre on [0,1], nodes by Newton on P₁₆
        let gauss: Vec<(f64, f64)> = (0..16)
            .map(|i| {
                let n = 16usize;
                let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
                for _ in 0..60 {
                    let (mut p0, mut p1) = (1.0f64, x);
                    for k in 2..=n {
                        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0)
                            / k as f64;
                        p0 = p1;
                        p1 = p2;
                    }
                    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let dx = p1 / dp;
                    x -= dx;
                    if dx.abs() < 1e-15 {
                        break;
                    }
                }
                let (mut p0, mut p1) = (1.0f64, x);
                for k in 2..=n {
                    let p2 =
                        ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let w = 2.0 / ((1.0 - x * x) * dp * dp);
                ((1.0 - x) / 2.0, w / 2.0)
            })
            .collect();
        for rho in RHOS {
            for (center, enclosed) in [((0.0, 0.0), true), ((0.5, 0.5), false)] {
                let side = 0.4;
                let area = side * side;
                let corners = [
                    (center.0 - side / 2.0, center.1 - side / 2.0),
                    (center.0 + side / 2.0, center.1 - side / 2.0),
                    (center.0 + side / 2.0, center.1 + side / 2.0),
                    (center.0 - side / 2.0, center.1 + side / 2.0),
                ];
                // composite panels: in sheared metrics the pole passes close
                // to one side of the coordinate square
                let panels = 12;
                let mut flux = 0.0;
                for s in 0..4 {
                    let a = corners[s];
                    let b = corners[(s + 1) % 4];
                    let dw = (Complex64::new(b.0 - a.0, 0.0) + rho * (b.1 - a.1))
                        / panels as f64;
                    for pnl in 0..panels {
                        for &(t, wgt) in &gauss {
                            let tt = (pnl as f64 + t) / panels as f64;
                            let x = a.0 + tt * (b.0 - a.0);
                            let y = a.1 + tt * (b.1 - a.1);
                            flux += wgt * (kernel_z(x, y, rho) * dw).im;
                        }
                    }
                }
                let expect =
                    2.0 * std::f64::consts::PI * (if enclosed { 1.0 } else { 0.0 } - area);
                assert!(
                    (flux - expect).abs() < 1e-9,
                    "rho={rho} enclosed={enclosed}: flux {flux} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn kernel_z_is_derivative_of_l() {
        for rho in RHOS {
            // compare analytic ∂_z(L/2) = Z against finite differences in z:
            // f(x,y) moves with dz = dx + ρ dy; pick dz real: dx = ε, dy = 0
            let (x, y) = (0.27, 0.61);
            let eps = 1e-6;
            let z = kernel_z(x, y, rho);
            // ∂_x(L/2) = ∂_z(L/2) + ∂_z̄(L/2) = 2 Re Z / 2... : L real ⇒
            // ∂_x L = 2 Re(Z·∂_x z) = 2 Re Z, ∂_y L = 2 Re(ρZ)
            let fx = (kernel_l(x + eps, y, rho) - kernel_l(x - eps, y, rho)) / (2.0 * eps);
            let fy = (kernel_l(x, y + eps, rho) - kernel_l(x, y - eps, rho)) / (2.0 * eps);
            assert!((fx - 2.0 * z.re).abs() < 1e-5, "rho={rho}");
            assert!((fy - 2.0 * (rho * z).re).abs() < 1e-5, "rho={rho}");
        }
    }
}
