//! Flat tori R²/(Z + ρZ) with unit area, their spectral calculus, geodesic
//! distances, and periodic Green functions.
//!
//! Conventions: fundamental-domain coordinates (x, y) ∈ [0,1)², complex
//! coordinate z = x + ρy, metric g = (1/Im ρ)|dx + ρ dy|² so the total area
//! is 1 and the area form is ω = dx∧dy. The Laplace–Beltrami operator is
//! diagonal on Fourier modes with the nonpositive symbol
//! Δ e^{2πi(k₁x+k₂y)} = −4π²|k₁ρ − k₂|²/Im ρ · e^{2πi(k₁x+k₂y)}.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TorusError {
    #[error("modulus must have positive imaginary part, got {0}")]
    NonPositiveModulus(Complex64),
    #[error("grid size must be a positive even number, got {0}")]
    BadGridSize(usize),
}

/// A flat torus with complex modulus ρ (Im ρ > 0), area normalized to 1,
/// and an N×N sample lattice on the fundamental domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatTorus {
    modulus: Complex64,
    grid_n: usize,
}

/// Real samples on the N×N lattice, row-major with index ix·N + iy.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub n: usize,
    pub values: Vec<f64>,
}

/// Complex samples on the N×N lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid {
    pub n: usize,
    pub values: Vec<Complex64>,
}

impl GridField {
    pub fn zeros(n: usize) -> Self {
        GridField { n, values: vec![0.0; n * n] }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        GridField { n, values: vec![c; n * n] }
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix * self.n + iy]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / (self.n * self.n) as f64
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Row-major binary dump: 8-byte little-endian N header, then f64 values.
    pub fn write_binary<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(&(self.n as u64).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: std::io::Read>(r: &mut R) -> std::io::Result<Self> {
        let mut hdr = [0u8; 8];
        r.read_exact(&mut hdr)?;
        let n = u64::from_le_bytes(hdr) as usize;
        let mut values = vec![0.0; n * n];
        let mut buf = [0u8; 8];
        for v in &mut values {
            r.read_exact(&mut buf)?;
            *v = f64::from_le_bytes(buf);
        }
        Ok(GridField { n, values })
    }
}

impl ComplexGrid {
    pub fn zeros(n: usize) -> Self {
        ComplexGrid { n, values: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[ix * self.n + iy]
    }

    /// Binary dump with f64 (re, im) pairs after the 8-byte N header.
    pub fn write_binary<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(&(self.n as u64).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }
}

fn plans(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

fn transpose(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// In-place 2D FFT on an n×n row-major buffer. The inverse includes the
/// 1/n² normalization.
pub fn fft2(buf: &mut [Complex64], n: usize, forward: bool) {
    let (fwd, inv) = plans(n);
    let plan = if forward { fwd } else { inv };
    plan.process(buf);
    transpose(buf, n);
    plan.process(buf);
    transpose(buf, n);
    if !forward {
        let s = 1.0 / (n * n) as f64;
        for v in buf.iter_mut() {
            *v *= s;
        }
    }
}

/// Integer wavenumber for index i on an N-point grid (negative branch for
/// the upper half).
pub fn wavenumber(i: usize, n: usize) -> i64 {
    if i < n.div_ceil(2) {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

impl FlatTorus {
    pub fn new(modulus: Complex64, grid_n: usize) -> Result<Self, TorusError> {
        if !(modulus.im > 0.0) {
            return Err(TorusError::NonPositiveModulus(modulus));
        }
        if grid_n == 0 || grid_n % 2 != 0 {
            return Err(TorusError::BadGridSize(grid_n));
        }
        Ok(FlatTorus { modulus, grid_n })
    }

    pub fn modulus(&self) -> Complex64 {
        self.modulus
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    /// Total area; fixed to 1 by the metric normalization.
    pub fn area(&self) -> f64 {
        1.0
    }

    /// Curvature defect κ = max{0, −sec}; identically zero on a flat torus.
    pub fn kappa(&self) -> f64 {
        0.0
    }

    /// Embed a coordinate offset in the flat chart: dz = dx + ρ·dy.
    pub fn embed(&self, dx: f64, dy: f64) -> Complex64 {
        Complex64::new(dx, 0.0) + self.modulus * dy
    }

    /// Metric length of a chart vector: |dz|/√Im ρ.
    pub fn metric_len(&self, dz: Complex64) -> f64 {
        dz.norm() / self.modulus.im.sqrt()
    }

    /// Geodesic distance between fundamental-domain points: the offsets are
    /// wrapped to [−1/2, 1/2) and minimized over the 9 nearest lattice
    /// translates.
    pub fn distance(&self, z: (f64, f64), w: (f64, f64)) -> f64 {
        let dx = wrap_half(z.0 - w.0);
        let dy = wrap_half(z.1 - w.1);
        let mut best = f64::INFINITY;
        for m in -1..=1 {
            for n in -1..=1 {
                let d = self.metric_len(self.embed(dx + m as f64, dy + n as f64));
                best = best.min(d);
            }
        }
        best
    }

    /// Laplace–Beltrami symbol −4π²|k₁ρ − k₂|²/Im ρ on the grid modes.
    pub fn laplacian_symbol(&self) -> GridField {
        let n = self.grid_n;
        let rho = self.modulus;
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            let k1 = wavenumber(i, n) as f64;
            for j in 0..n {
                let k2 = wavenumber(j, n) as f64;
                let z = k1 * rho - k2;
                values[i * n + j] = -4.0 * std::f64::consts::PI.powi(2) * z.norm_sqr() / rho.im;
            }
        }
        GridField { n, values }
    }

    /// Symbol of ∂_z = (−ρ̄∂_x + ∂_y)/(ρ−ρ̄); Nyquist modes zeroed.
    pub fn dz_symbol(&self) -> ComplexGrid {
        let n = self.grid_n;
        let rho = self.modulus;
        let den = rho - rho.conj();
        let tau = 2.0 * std::f64::consts::PI;
        let mut values = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let k1 = wavenumber(i, n);
            for j in 0..n {
                let k2 = wavenumber(j, n);
                if 2 * k1.unsigned_abs() as usize == n || 2 * k2.unsigned_abs() as usize == n {
                    continue;
                }
                let num = Complex64::new(0.0, tau) * (k2 as f64 - k1 as f64 * rho.conj());
                values[i * n + j] = num / den;
            }
        }
        ComplexGrid { n, values }
    }

    /// Apply the spectral Laplacian to a real field.
    pub fn laplacian(&self, f: &GridField) -> GridField {
        let n = self.grid_n;
        let sym = self.laplacian_symbol();
        let mut buf: Vec<Complex64> =
            f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft2(&mut buf, n, true);
        for (b, s) in buf.iter_mut().zip(&sym.values) {
            *b *= *s;
        }
        fft2(&mut buf, n, false);
        GridField { n, values: buf.iter().map(|c| c.re).collect() }
    }

    /// ∂_z of a real field, as a complex grid.
    pub fn d_z(&self, f: &GridField) -> ComplexGrid {
        let n = self.grid_n;
        let sym = self.dz_symbol();
        let mut buf: Vec<Complex64> =
            f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft2(&mut buf, n, true);
        for (b, s) in buf.iter_mut().zip(&sym.values) {
            *b *= *s;
        }
        fft2(&mut buf, n, false);
        ComplexGrid { n, values: buf }
    }

    /// Samples of ∂_z f on the grid shifted by (dx, dy) in fundamental
    /// coordinates, via a spectral phase shift.
    pub fn d_z_shifted(&self, f: &GridField, dx: f64, dy: f64) -> ComplexGrid {
        let n = self.grid_n;
        let sym = self.dz_symbol();
        let tau = 2.0 * std::f64::consts::PI;
        let mut buf: Vec<Complex64> =
            f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft2(&mut buf, n, true);
        for i in 0..n {
            let k1 = wavenumber(i, n) as f64;
            for j in 0..n {
                let k2 = wavenumber(j, n) as f64;
                let phase = Complex64::from_polar(1.0, tau * (k1 * dx + k2 * dy));
                buf[i * n + j] *= sym.values[i * n + j] * phase;
            }
        }
        fft2(&mut buf, n, false);
        ComplexGrid { n, values: buf }
    }

    /// Discrete periodic Green function: Δ G_p = δ_p − 1 with mean(G_p) = 0,
    /// where δ_p is the band-limited lattice delta at p. Nyquist modes are
    /// excluded from both (they lack conjugate partners, and for Re ρ ≠ 0
    /// the Laplacian symbol is asymmetric across the Nyquist row).
    pub fn periodic_green(&self, p: (f64, f64)) -> GridField {
        let n = self.grid_n;
        let sym = self.laplacian_symbol();
        let tau = 2.0 * std::f64::consts::PI;
        let mut buf = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let k1 = wavenumber(i, n);
            for j in 0..n {
                if i == 0 && j == 0 {
                    continue;
                }
                let k2 = wavenumber(j, n);
                if 2 * k1.unsigned_abs() as usize == n || 2 * k2.unsigned_abs() as usize == n {
                    continue;
                }
                let delta_hat = Complex64::from_polar(
                    (n * n) as f64,
                    -tau * (k1 as f64 * p.0 + k2 as f64 * p.1),
                );
                buf[i * n + j] = delta_hat / sym.values[i * n + j];
            }
        }
        fft2(&mut buf, n, false);
        GridField { n, values: buf.iter().map(|c| c.re).collect() }
    }

    /// Band-limited (Nyquist-free) lattice delta at p — what
    /// `periodic_green` inverts.
    pub fn lattice_delta(&self, p: (f64, f64)) -> GridField {
        let n = self.grid_n;
        let tau = 2.0 * std::f64::consts::PI;
        let mut buf = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let k1 = wavenumber(i, n);
            for j in 0..n {
                let k2 = wavenumber(j, n);
                if 2 * k1.unsigned_abs() as usize == n || 2 * k2.unsigned_abs() as usize == n {
                    continue;
                }
                buf[i * n + j] = Complex64::from_polar(
                    (n * n) as f64,
                    -tau * (k1 as f64 * p.0 + k2 as f64 * p.1),
                );
            }
        }
        fft2(&mut buf, n, false);
        GridField { n, values: buf.iter().map(|c| c.re).collect() }
    }
}

/// Wrap to [−1/2, 1/2).
pub fn wrap_half(x: f64) -> f64 {
    x - (x + 0.5).floor()
}

/// Wrap to [0, 1).
pub fn wrap_unit(x: f64) -> f64 {
    x - x.floor()
}

/// Straight-segment path of complex structures ρ(t) = (1−t)ρ₀ + tρ₁ in the
/// upper half-plane.
pub fn complex_structure_path(
    rho0: Complex64,
    rho1: Complex64,
    t: f64,
    grid_n: usize,
) -> Result<FlatTorus, TorusError> {
    if !(rho0.im > 0.0) {
        return Err(TorusError::NonPositiveModulus(rho0));
    }
    if !(rho1.im > 0.0) {
        return Err(TorusError::NonPositiveModulus(rho1));
    }
    FlatTorus::new(rho0 + (rho1 - rho0) * t, grid_n)
}
