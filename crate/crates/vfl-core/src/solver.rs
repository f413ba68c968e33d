//! U(1) vortex solver via the scalar reduction: for a prescribed zero
//! divisor D = Σ mⱼ·pⱼ at coupling τ, the gauge-invariant log-density
//! u = log|θ|² solves
//!
//! ```text
//!   Δu = 2τ(e^u − 1) + 4π Σ mⱼ δ_{pⱼ},
//! ```
//!
//! the sign convention pinned by the mass identity ∫(1−e^u)ω = 2πd/τ.
//! Splitting u = u_sing + v with u_sing = Σ mⱼ L(z−pⱼ) (exact ϑ₁ kernels)
//! leaves the smooth periodic problem Δv = 2τ(e^{u_sing+v} − 1) + 4πd,
//! solved by Newton iteration with spectral Laplacians and a
//! constant-coefficient preconditioned CG for the linear steps. The
//! iteration runs on the τ-normalized residual Δv/(2τ) − (e^u − 1) − 2πd/τ,
//! whose f64 floor is far below the 1e−10 stopping tolerance.

use crate::divisor::Divisor;
use crate::lattice::{self, vortex_residual};
use crate::theta::{kernel_l, kernel_z, theta1, theta1_prime};
use crate::torus::{fft2, ComplexGrid, FlatTorus, GridField};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("non-admissible coupling: τ·area = {tau} must exceed 2πd = {bound}")]
    NonAdmissibleTau { tau: f64, bound: f64 },
    #[error("divisor points closer than 2 grid cells (separation {sep}, need {need})")]
    PointsTooClose { sep: f64, need: f64 },
    #[error("Newton iteration failed to contract; residual history: {history:?}")]
    NewtonDivergence { history: Vec<f64> },
    #[error("decay fit annulus has only {0} usable sites (need ≥ 50)")]
    InsufficientAnnulus(usize),
    #[error(transparent)]
    Torus(#[from] crate::torus::TorusError),
}

/// A gauge-fixed solution of the vortex equations.
#[derive(Debug, Clone)]
pub struct VortexField {
    pub torus: FlatTorus,
    pub tau: f64,
    pub divisor: Divisor,
    /// u = log|θ|² (−∞ exactly at divisor sites).
    pub u: GridField,
    /// Smooth periodic part v = u − u_sing.
    pub v: GridField,
    /// Gauge-fixed section samples.
    pub theta: ComplexGrid,
    /// Unit-modulus link variables on x-edges (i,j)→(i+1,j).
    pub link_x: ComplexGrid,
    /// Unit-modulus link variables on y-edges (i,j)→(i,j+1).
    pub link_y: ComplexGrid,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SolveReport {
    pub newton_iters: usize,
    pub final_residual: f64,
    pub mass: f64,
    pub decay_rate: Option<f64>,
}

/// Σⱼ mⱼ L(z−pⱼ) sampled on the grid.
pub fn u_singular(torus: &FlatTorus, divisor: &Divisor) -> GridField {
    let n = torus.grid_n();
    let rho = torus.modulus();
    let mut f = GridField::zeros(n);
    let h = 1.0 / n as f64;
    for ((px, py), m) in divisor.iter() {
        for ix in 0..n {
            let dx = ix as f64 * h - px;
            for iy in 0..n {
                let dy = iy as f64 * h - py;
                f.values[ix * n + iy] += m as f64 * kernel_l(dx, dy, rho);
            }
        }
    }
    f
}

/// Σⱼ mⱼ Z(z−pⱼ) sampled on the grid (the meromorphic part of ∂_z u).
pub fn z_singular(torus: &FlatTorus, divisor: &Divisor) -> ComplexGrid {
    let n = torus.grid_n();
    let rho = torus.modulus();
    let mut f = ComplexGrid::zeros(n);
    let h = 1.0 / n as f64;
    for ((px, py), m) in divisor.iter() {
        for ix in 0..n {
            let dx = ix as f64 * h - px;
            for iy in 0..n {
                let dy = iy as f64 * h - py;
                f.values[ix * n + iy] += m as f64 * kernel_z(dx, dy, rho);
            }
        }
    }
    f
}

/// Solve the vortex equations for the divisor at coupling τ.
pub fn solve_vortex(
    torus: &FlatTorus,
    divisor: &Divisor,
    tau: f64,
) -> Result<(VortexField, SolveReport), SolverError> {
    let d = divisor.degree() as f64;
    let bound = 2.0 * std::f64::consts::PI * d;
    if tau * torus.area() <= bound {
        return Err(SolverError::NonAdmissibleTau { tau: tau * torus.area(), bound });
    }
    let n = torus.grid_n();
    let divisor = &divisor.nudged_off_skeleton(n);
    let cell = torus.metric_len(torus.embed(1.0 / n as f64, 0.0))
        .max(torus.metric_len(torus.embed(0.0, 1.0 / n as f64)));
    let sep = divisor.min_separation(torus);
    if sep < 2.0 * cell {
        return Err(SolverError::PointsTooClose { sep, need: 2.0 * cell });
    }

    let using = u_singular(torus, divisor);
    let (v, iters, resid, history) = newton_reduced(torus, &using, tau, d, None)?;
    if resid > 1e-8 {
        return Err(SolverError::NewtonDivergence { history });
    }

    let field = build_field(torus, tau, divisor, using, v);
    let mass_val = mass(&field);
    let decay_rate = if divisor.degree() == 1 && divisor.is_simple() {
        decay_fit(&field).ok().map(|(c, _)| c)
    } else {
        None
    };
    let report = SolveReport {
        newton_iters: iters,
        final_residual: resid,
        mass: mass_val,
        decay_rate,
    };
    Ok((field, report))
}

pub(crate) fn build_field(
    torus: &FlatTorus,
    tau: f64,
    divisor: &Divisor,
    using: GridField,
    v: GridField,
) -> VortexField {
    let n = torus.grid_n();
    let mut u = GridField::zeros(n);
    for i in 0..n * n {
        u.values[i] = using.values[i] + v.values[i];
    }
    let mat = lattice::materialize(torus, divisor, &u, &v);
    VortexField {
        torus: *torus,
        tau,
        divisor: divisor.clone(),
        u,
        v,
        theta: mat.theta,
        link_x: mat.link_x,
        link_y: mat.link_y,
    }
}

/// Newton iteration on v for the τ-normalized reduced equation. Returns
/// (v, iterations, final residual, residual history). `v_init` overrides
/// the canonical constant initializer (used in uniqueness tests).
pub fn newton_reduced(
    torus: &FlatTorus,
    using: &GridField,
    tau: f64,
    degree: f64,
    v_init: Option<GridField>,
) -> Result<(GridField, usize, f64, Vec<f64>), SolverError> {
    let n = torus.grid_n();
    let m = n * n;
    let lam = torus.laplacian_symbol();
    let four_pi_d = 4.0 * std::f64::consts::PI * degree;
    let eus: Vec<f64> = using.values.iter().map(|&s| s.exp()).collect();

    let mut v = match v_init {
        Some(v0) => v0,
        None => {
            let mean_eus = eus.iter().sum::<f64>() / m as f64;
            let c0 = ((1.0 - four_pi_d / (2.0 * tau)) / mean_eus).ln();
            GridField::constant(n, c0)
        }
    };

    // residual of Δv/(2τ) − (e^u − 1) − 4πd/(2τ)
    let residual = |v: &GridField, eu: &mut Vec<f64>| -> (GridField, f64) {
        let lap = apply_symbol_real(&lam, v, n);
        let mut r = GridField::zeros(n);
        let mut sup = 0.0f64;
        for i in 0..m {
            eu[i] = eus[i] * v.values[i].exp();
            r.values[i] = lap.values[i] / (2.0 * tau) - (eu[i] - 1.0) - four_pi_d / (2.0 * tau);
            sup = sup.max(r.values[i].abs());
        }
        (r, sup)
    };

    let mut eu = vec![0.0; m];
    let (mut r, mut rn) = residual(&v, &mut eu);
    let mut history = vec![rn];
    let tol = 1e-10;
    let mut iters = 0;

    for it in 0..50 {
        if rn < tol {
            break;
        }
        iters = it + 1;
        // Newton step: (−Δ/(2τ) + e^u) dv = r, SPD; PCG with the
        // constant-coefficient spectral preconditioner.
        let abar = eu.iter().sum::<f64>() / m as f64;
        let inner_tol = (rn * 1e-2).max(1e-14);
        let dv = pcg_reduced(&lam, &eu, tau, abar, &r, inner_tol, n);
        // backtracking on the sup-residual (the energy is strictly convex,
        // full steps almost always pass)
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let mut trial = v.clone();
            for i in 0..m {
                trial.values[i] += step * dv.values[i];
            }
            let (rt, rtn) = residual(&trial, &mut eu);
            if rtn < rn || rtn < tol {
                v = trial;
                r = rt;
                rn = rtn;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        history.push(rn);
        if !accepted {
            // stalled at the floating-point floor: stop here
            let (_, refreshed) = residual(&v, &mut eu);
            rn = refreshed;
            break;
        }
    }
    if rn > 1e-8 && history.len() >= 2 && rn > 0.5 * history[0] {
        return Err(SolverError::NewtonDivergence { history });
    }
    Ok((v, iters, rn, history))
}

/// Solve (−Δ/(2τ) + diag(e^u)) x = b by the preconditioned CG used for the
/// Newton steps; the transport integrator uses it for the tangent of the
/// discrete solution manifold.
pub fn linearized_solve(
    torus: &FlatTorus,
    eu: &[f64],
    tau: f64,
    b: &GridField,
    tol: f64,
) -> GridField {
    let n = torus.grid_n();
    let lam = torus.laplacian_symbol();
    let abar = eu.iter().sum::<f64>() / (n * n) as f64;
    pcg_reduced(&lam, eu, tau, abar, b, tol.max(1e-14 * b.sup_norm()), n)
}

fn apply_symbol_real(sym: &GridField, f: &GridField, n: usize) -> GridField {
    let mut buf: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(&mut buf, n, true);
    for (b, s) in buf.iter_mut().zip(&sym.values) {
        *b *= *s;
    }
    fft2(&mut buf, n, false);
    GridField { n, values: buf.iter().map(|c| c.re).collect() }
}

/// PCG for (−Δ/(2τ) + diag(a)) x = b with preconditioner
/// (−Δ/(2τ) + ā)⁻¹ applied spectrally.
fn pcg_reduced(
    lam: &GridField,
    a: &[f64],
    tau: f64,
    abar: f64,
    b: &GridField,
    tol: f64,
    n: usize,
) -> GridField {
    let m = n * n;
    let apply = |x: &GridField| -> GridField {
        let lap = apply_symbol_real(lam, x, n);
        let mut out = GridField::zeros(n);
        for i in 0..m {
            out.values[i] = -lap.values[i] / (2.0 * tau) + a[i] * x.values[i];
        }
        out
    };
    let precond = |x: &GridField| -> GridField {
        let mut buf: Vec<Complex64> =
            x.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft2(&mut buf, n, true);
        for i in 0..m {
            buf[i] /= -lam.values[i] / (2.0 * tau) + abar;
        }
        fft2(&mut buf, n, false);
        GridField { n, values: buf.iter().map(|c| c.re).collect() }
    };

    let mut x = GridField::zeros(n);
    let mut r = b.clone();
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz: f64 = r.values.iter().zip(&z.values).map(|(a, b)| a * b).sum();
    for _ in 0..500 {
        if r.sup_norm() < tol {
            break;
        }
        let ap = apply(&p);
        let pap: f64 = p.values.iter().zip(&ap.values).map(|(a, b)| a * b).sum();
        if pap.abs() < 1e-300 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..m {
            x.values[i] += alpha * p.values[i];
            r.values[i] -= alpha * ap.values[i];
        }
        z = precond(&r);
        let rz_new: f64 = r.values.iter().zip(&z.values).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..m {
            p.values[i] = z.values[i] + beta * p.values[i];
        }
    }
    x
}

/// w = 1 − e^{u} evaluated at an arbitrary point: exact ϑ-kernels for the
/// singular part (so w = 1 exactly at divisor points) plus bicubic
/// interpolation of the smooth part.
pub fn w_at(vf: &VortexField, point: (f64, f64)) -> f64 {
    let rho = vf.torus.modulus();
    let mut u = 0.0;
    for ((px, py), m) in vf.divisor.iter() {
        u += m as f64 * kernel_l(point.0 - px, point.1 - py, rho);
    }
    if u == f64::NEG_INFINITY {
        return 1.0;
    }
    u += interp_bicubic(&vf.v, point);
    1.0 - u.exp()
}

fn interp_bicubic(f: &GridField, p: (f64, f64)) -> f64 {
    let n = f.n;
    let x = crate::torus::wrap_unit(p.0) * n as f64;
    let y = crate::torus::wrap_unit(p.1) * n as f64;
    let ix = x.floor() as usize % n;
    let iy = y.floor() as usize % n;
    let (fx, fy) = (x - x.floor(), y - y.floor());
    let wts = |t: f64| {
        let (t2, t3) = (t * t, t * t * t);
        [
            0.5 * (-t3 + 2.0 * t2 - t),
            0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
            0.5 * (-3.0 * t3 + 4.0 * t2 + t),
            0.5 * (t3 - t2),
        ]
    };
    let (wx, wy) = (wts(fx), wts(fy));
    let mut acc = 0.0;
    for (a, &wa) in wx.iter().enumerate() {
        let i = (ix + n + a - 1) % n;
        for (b, &wb) in wy.iter().enumerate() {
            let j = (iy + n + b - 1) % n;
            acc += wa * wb * f.values[i * n + j];
        }
    }
    acc
}

/// w = 1 − |θ|² on the grid.
pub fn w_field(vf: &VortexField) -> GridField {
    let n = vf.torus.grid_n();
    let mut w = GridField::zeros(n);
    for i in 0..n * n {
        w.values[i] = 1.0 - vf.u.values[i].exp();
    }
    w
}

/// ∫ w ω by the (periodic) trapezoidal rule — the plain grid mean.
pub fn mass(vf: &VortexField) -> f64 {
    w_field(vf).mean()
}

/// Per-site |d_Aθ| = √(2 Im ρ)·|e^{u/2} ∂_z u|, evaluated through the
/// regularized ϑ-product so divisor sites get their finite limits.
pub fn grad_theta_magnitude(vf: &VortexField) -> GridField {
    let field = grad_theta_component(vf);
    let n = vf.torus.grid_n();
    let scale = (2.0 * vf.torus.modulus().im).sqrt();
    GridField { n, values: field.values.iter().map(|c| scale * c.norm()).collect() }
}

/// The ∂_z-component of ∂_Aθ in the materialized gauge:
/// e^{σ/2}[Σ_l m_l ϑ′(w_l)ϑ(w_l)^{m_l−1}Π_{k≠l}ϑ(w_k)^{m_k} + P·(smooth ∂_z)].
pub fn grad_theta_component(vf: &VortexField) -> ComplexGrid {
    let n = vf.torus.grid_n();
    let rho = vf.torus.modulus();
    let h = 1.0 / n as f64;
    let dzv = vf.torus.d_z(&vf.v);
    let pts: Vec<((f64, f64), u32)> = vf.divisor.iter().collect();
    let mut out = ComplexGrid::zeros(n);
    let two_pi = 2.0 * std::f64::consts::PI;
    for ix in 0..n {
        for iy in 0..n {
            let idx = ix * n + iy;
            let x = ix as f64 * h;
            let y = iy as f64 * h;
            // σ = v + Σ −2π m Im(w)²/Imρ (reduced offsets), and the ϑ factors
            let mut sigma = vf.v.values[idx];
            let mut thetas: Vec<(Complex64, Complex64)> = Vec::with_capacity(pts.len());
            let mut smooth_dz = dzv.values[idx];
            for &((px, py), m) in &pts {
                let (dx, dy) = crate::theta::reduce_offset(x - px, y - py);
                let w = Complex64::new(dx, 0.0) + rho * dy;
                let imw = rho.im * dy;
                sigma -= two_pi * m as f64 * imw * imw / rho.im;
                smooth_dz += Complex64::new(0.0, two_pi) * m as f64 * imw / rho.im;
                thetas.push((theta1(w, rho), theta1_prime(w, rho)));
            }
            let amp = (sigma / 2.0).exp();
            // P and the Σ_l ϑ′ϑ^{m−1}Π_{k≠l} term
            let mut p_full = Complex64::new(1.0, 0.0);
            for (k, &(t, _)) in thetas.iter().enumerate() {
                p_full *= t.powu(pts[k].1);
            }
            let mut deriv = Complex64::new(0.0, 0.0);
            for (l, &(t, tp)) in thetas.iter().enumerate() {
                let m_l = pts[l].1;
                let mut term = tp * t.powu(m_l - 1) * m_l as f64;
                for (k, &(tk, _)) in thetas.iter().enumerate() {
                    if k != l {
                        term *= tk.powu(pts[k].1);
                    }
                }
                deriv += term;
            }
            out.values[idx] = amp * (deriv + p_full * smooth_dz);
        }
    }
    out
}

/// Maximum-principle / gradient-bound data: (min w, max(|d_Aθ| − 2√τ w)).
pub fn sup_bounds_check(vf: &VortexField) -> (f64, f64) {
    let w = w_field(vf);
    let grad = grad_theta_magnitude(vf);
    let n = vf.torus.grid_n();
    let s = 2.0 * vf.tau.sqrt();
    let mut wmin = f64::INFINITY;
    let mut excess = f64::NEG_INFINITY;
    for i in 0..n * n {
        wmin = wmin.min(w.values[i]);
        excess = excess.max(grad.values[i] - s * w.values[i]);
    }
    (wmin, excess)
}

/// Least-squares decay fit: log w against −d(z, p) over the annulus
/// 3τ^{−1/2} ≤ d ≤ min(0.4, 10τ^{−1/2}). Returns (c_fit, r²).
pub fn decay_fit(vf: &VortexField) -> Result<(f64, f64), SolverError> {
    let p = vf.divisor.points()[0];
    let n = vf.torus.grid_n();
    let h = 1.0 / n as f64;
    let w = w_field(vf);
    let r0 = 3.0 / vf.tau.sqrt();
    let r1 = (10.0 / vf.tau.sqrt()).min(0.4);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for ix in 0..n {
        for iy in 0..n {
            let dist = vf.torus.distance((ix as f64 * h, iy as f64 * h), p);
            let wv = w.values[ix * n + iy];
            if dist >= r0 && dist <= r1 && wv > 1e-280 {
                xs.push(dist);
                ys.push(wv.ln());
            }
        }
    }
    if xs.len() < 50 {
        return Err(SolverError::InsufficientAnnulus(xs.len()));
    }
    // fit y = a − c·x
    let m = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let a = (sy - slope * sx) / m;
    let c_fit = -slope;
    let ybar = sy / m;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let pred = a + slope * x;
        ss_res += (y - pred) * (y - pred);
        ss_tot += (y - ybar) * (y - ybar);
    }
    Ok((c_fit, 1.0 - ss_res / ss_tot))
}

/// The trivial d = 0 field: θ ≡ 1 on the trivial bundle.
pub fn trivial_field(torus: &FlatTorus, tau: f64) -> VortexField {
    let n = torus.grid_n();
    let one = Complex64::new(1.0, 0.0);
    VortexField {
        torus: *torus,
        tau,
        divisor: Divisor::empty(),
        u: GridField::zeros(n),
        v: GridField::zeros(n),
        theta: ComplexGrid { n, values: vec![one; n * n] },
        link_x: ComplexGrid { n, values: vec![one; n * n] },
        link_y: ComplexGrid { n, values: vec![one; n * n] },
    }
}

/// Convenience: full residual pair for a field (see `lattice`).
pub fn residuals(vf: &VortexField) -> (f64, f64) {
    vortex_residual(vf)
}


#[cfg(test)]
mod tests {
    use super::*;

    fn torus(n: usize) -> FlatTorus {
        FlatTorus::new(Complex64::new(0.0, 1.0), n).unwrap()
    }

    #[test]
    fn admissibility_boundary() {
        let t = torus(64);
        let d = Divisor::single((0.5, 0.5));
        let err = solve_vortex(&t, &d, 2.0 * std::f64::consts::PI);
        assert!(matches!(err, Err(SolverError::NonAdmissibleTau { .. })));
    }

    #[test]
    fn too_close_points_rejected() {
        let t = torus(64);
        let d = Divisor::new(&[((0.5, 0.5), 1), ((0.5 + 1.0 / 64.0, 0.5), 1)]).unwrap();
        assert!(matches!(
            solve_vortex(&t, &d, 100.0),
            Err(SolverError::PointsTooClose { .. })
        ));
    }

    #[test]
    fn mass_identity_small() {
        let t = torus(128);
        let d = Divisor::single((0.5, 0.5));
        let tau = 200.0;
        let (vf, report) = solve_vortex(&t, &d, tau).unwrap();
        let target = 2.0 * std::f64::consts::PI / tau;
        assert!(
            (report.mass - target).abs() / target < 1e-6,
            "mass {} vs {}",
            report.mass,
            target
        );
        assert!(report.final_residual < 1e-10);
        let (wmin, excess) = sup_bounds_check(&vf);
        assert!(wmin > -1e-8, "wmin {wmin}");
        assert!(excess <= 1e-2 * tau.sqrt(), "excess {excess}");
    }

    #[test]
    fn mass_scales_inverse_tau() {
        let t = torus(128);
        let d = Divisor::single((0.5, 0.5));
        let (_, r1) = solve_vortex(&t, &d, 150.0).unwrap();
        let (_, r4) = solve_vortex(&t, &d, 600.0).unwrap();
        assert!((r4.mass / r1.mass - 0.25).abs() < 1e-3);
    }

    #[test]
    fn trivial_field_mass_zero() {
        let vf = trivial_field(&torus(32), 100.0);
        assert_eq!(mass(&vf), 0.0);
    }

    #[test]
    fn uniqueness_across_initializations() {
        let t = torus(128);
        let d = Divisor::new(&[((0.3, 0.4), 1), ((0.7, 0.6), 1)]).unwrap();
        let tau = 300.0;
        let using = u_singular(&t, &d);
        let (v1, _, _, _) = newton_reduced(&t, &using, tau, 2.0, None).unwrap();
        let perturbed = GridField::constant(128, -1.5);
        let (v2, _, _, _) = newton_reduced(&t, &using, tau, 2.0, Some(perturbed)).unwrap();
        let mut diff = 0.0f64;
        for i in 0..128 * 128 {
            diff = diff.max((v1.values[i] - v2.values[i]).abs());
        }
        assert!(diff < 1e-8, "u disagreement {diff}");
    }

    #[test]
    fn merged_vs_split_multiplicity() {
        // one double point vs two points at small separation: masses agree
        let t = torus(192);
        let tau = 400.0;
        let merged = Divisor::new(&[((0.5, 0.5), 2)]).unwrap();
        let eps = 0.02;
        let split = Divisor::new(&[((0.5 - eps / 2.0, 0.5), 1), ((0.5 + eps / 2.0, 0.5), 1)])
            .unwrap();
        let (_, rm) = solve_vortex(&t, &merged, tau).unwrap();
        let (_, rs) = solve_vortex(&t, &split, tau).unwrap();
        assert!((rm.mass - rs.mass).abs() / rm.mass < 1e-3);
    }

    #[test]
    fn decay_fit_single_vortex() {
        let t = torus(256);
        let d = Divisor::single((0.5, 0.5));
        let tau = 400.0;
        let (vf, _) = solve_vortex(&t, &d, tau).unwrap();
        let (c, r2) = decay_fit(&vf).unwrap();
        let ratio = c / tau.sqrt();
        assert!((1.2..=2.0).contains(&ratio), "c/√τ = {ratio}");
        assert!(r2 > 0.99, "r² = {r2}");
        // w at the divisor point is exactly 1
        assert_eq!(w_at(&vf, vf.divisor.points()[0]), 1.0);
    }

    #[test]
    fn decay_fit_annulus_guard() {
        // tiny grid: annulus has too few sites
        let t = torus(12);
        let d = Divisor::single((0.5, 0.5));
        let (vf, _) = solve_vortex(&t, &d, 100.0).unwrap();
        assert!(matches!(
            decay_fit(&vf),
            Err(SolverError::InsufficientAnnulus(_))
        ));
    }
}
