//! Spin-c lattice computations on H₂(Y;Z)/torsion: the grading divisor
//! 𝔡(s_h) = gcd⟨c₁(s_h), ·⟩ with c₁(s_h) = e(T^{vt}Y) + 2PD(h), and the
//! Novikov-ring descriptors Λ̃_{h,c} (over ker⟨c₁,·⟩ with N = ⟨c,·⟩) and
//! Λ_{h,c} (over the quotient by ker⟨c₁,·⟩ ∩ ker⟨c,·⟩).

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpincError {
    #[error("vector lengths disagree: e has {0}, h has {1}, c has {2}")]
    LengthMismatch(usize, usize, usize),
}

/// Pairing data of a spin-c structure on a fibered 3-manifold against a
/// basis of H₂/torsion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpincLattice {
    /// ⟨e(T^{vt}Y), ·⟩ on the basis.
    pub e: Vec<i64>,
    /// ⟨2PD(h), ·⟩ on the basis.
    pub h2pd: Vec<i64>,
    /// ⟨c, ·⟩ on the basis (real-valued).
    pub c: Vec<f64>,
}

/// Description of the rings Λ̃_{h,c} and Λ_{h,c}.
#[derive(Debug, Clone, Serialize)]
pub struct RingDescriptors {
    /// Integer basis of ker⟨c₁(s_h), ·⟩.
    pub kernel_basis: Vec<Vec<i64>>,
    /// N = ⟨c, ·⟩ evaluated on the kernel basis (the Λ̃ data).
    pub n_values: Vec<f64>,
    /// Rank of ker⟨c₁,·⟩ / (ker⟨c₁,·⟩ ∩ ker⟨c,·⟩) (the Λ group rank).
    pub lambda_rank: usize,
    /// Set when c ∥ c₁(s_h): Λ_{h,c} degenerates to the base ring R.
    pub base_ring_flag: bool,
}

impl SpincLattice {
    pub fn new(e: Vec<i64>, h2pd: Vec<i64>, c: Vec<f64>) -> Result<Self, SpincError> {
        if e.len() != h2pd.len() || e.len() != c.len() {
            return Err(SpincError::LengthMismatch(e.len(), h2pd.len(), c.len()));
        }
        Ok(SpincLattice { e, h2pd, c })
    }

    /// ⟨c₁(s_h), ·⟩ = e + 2PD(h) entrywise.
    pub fn c1_vector(&self) -> Vec<i64> {
        self.e.iter().zip(&self.h2pd).map(|(a, b)| a + b).collect()
    }
}

/// gcd of the c₁ pairings; 0 when c₁ vanishes (fully relatively Z-graded).
pub fn grading_divisor(lattice: &SpincLattice) -> u64 {
    lattice
        .c1_vector()
        .iter()
        .fold(0u64, |acc, &x| acc.gcd(&x.unsigned_abs()))
}

/// Integer kernel basis of a single row vector, via unimodular column
/// operations bringing the row to (g, 0, …, 0) — the 1×n Smith normal form.
pub fn row_kernel_basis(row: &[i64]) -> Vec<Vec<i64>> {
    let n = row.len();
    let mut r: Vec<i128> = row.iter().map(|&x| x as i128).collect();
    // v columns: identity, transformed along with r
    let mut v: Vec<Vec<i128>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1 } else { 0 }).collect())
        .collect();
    loop {
        // find pivot: smallest nonzero |entry|
        let piv = (0..n)
            .filter(|&j| r[j] != 0)
            .min_by_key(|&j| r[j].unsigned_abs());
        let p = match piv {
            Some(p) => p,
            None => return v.into_iter().map(to_i64_vec).collect(), // zero row: full lattice
        };
        let mut done = true;
        for j in 0..n {
            if j == p || r[j] == 0 {
                continue;
            }
            let q = r[j].div_euclid(r[p]);
            r[j] -= q * r[p];
            for i in 0..n {
                let sub = q * v[p][i];
                v[j][i] -= sub;
            }
            if r[j] != 0 {
                done = false;
            }
        }
        if done {
            // r has a single nonzero entry at p; kernel = all other columns
            let mut basis: Vec<Vec<i64>> = Vec::with_capacity(n - 1);
            for (j, col) in v.iter().enumerate() {
                if j != p {
                    basis.push(to_i64_vec(col.clone()));
                }
            }
            return basis;
        }
    }
}

fn to_i64_vec(col: Vec<i128>) -> Vec<i64> {
    col.into_iter()
        .map(|x| i64::try_from(x).expect("kernel basis entry overflow"))
        .collect()
}

/// Whether c is proportional to ±c₁ (including the all-zero pair).
pub fn proportional(c: &[f64], c1: &[i64]) -> bool {
    let scale = c
        .iter()
        .map(|x| x.abs())
        .fold(0.0f64, f64::max)
        .max(c1.iter().map(|x| x.unsigned_abs() as f64).fold(0.0, f64::max))
        .max(1.0);
    let c_zero = c.iter().all(|&x| x.abs() <= 1e-12 * scale);
    let c1_zero = c1.iter().all(|&x| x == 0);
    if c_zero || c1_zero {
        return c_zero && c1_zero;
    }
    for i in 0..c.len() {
        for j in (i + 1)..c.len() {
            let cross = c[i] * c1[j] as f64 - c[j] * c1[i] as f64;
            if cross.abs() > 1e-9 * scale * scale {
                return false;
            }
        }
    }
    true
}

/// Rank of the sublattice {m ∈ Z^k : Σ m_i N_i = 0} for real values N_i.
///
/// Zero values contribute directly; the rest are grouped into
/// commensurability classes detected through continued fractions with
/// bounded denominators (a relation with denominator beyond the bound is
/// treated as absent — genuinely irrational ratios never produce one).
pub fn real_row_kernel_rank(values: &[f64]) -> usize {
    const TOL: f64 = 1e-9;
    // With q ≤ 1e4 a generic irrational's best convergent sits ~1/q² ≥ 1e-8
    // away, safely outside the 1e-9 acceptance band.
    const DEN_BOUND: i64 = 10_000;
    let scale = values.iter().map(|x| x.abs()).fold(0.0f64, f64::max).max(1.0);
    let mut rank = 0;
    let mut class_reps: Vec<f64> = Vec::new();
    for &x in values {
        if x.abs() <= TOL * scale {
            rank += 1;
            continue;
        }
        let mut found = false;
        for &rep in &class_reps {
            if rational_ratio(x / rep, DEN_BOUND, TOL).is_some() {
                rank += 1; // one new relation within this class
                found = true;
                break;
            }
        }
        if !found {
            class_reps.push(x);
        }
    }
    rank
}

/// Continued-fraction detection of a small rational p/q ≈ x.
fn rational_ratio(x: f64, den_bound: i64, tol: f64) -> Option<(i64, i64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, x.round() as i64, 1i64);
    let mut frac = x - x.round();
    for _ in 0..40 {
        if (p1 as f64 / q1 as f64 - x).abs() <= tol * (1.0 + x.abs()) {
            return Some((p1, q1));
        }
        if frac.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.round();
        frac = inv - a;
        let p2 = a as i64 * p1 + p0;
        let q2 = a as i64 * q1 + q0;
        if q2.abs() > den_bound || q2 == 0 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}

/// Compute the Λ̃ and Λ descriptions for the lattice.
pub fn ring_descriptors(lattice: &SpincLattice) -> RingDescriptors {
    let c1 = lattice.c1_vector();
    let kernel_basis = row_kernel_basis(&c1);
    let n_values: Vec<f64> = kernel_basis
        .iter()
        .map(|b| b.iter().zip(&lattice.c).map(|(&m, &ci)| m as f64 * ci).sum())
        .collect();
    let inner_rank = real_row_kernel_rank(&n_values);
    let base_ring_flag = proportional(&lattice.c, &c1);
    RingDescriptors {
        lambda_rank: kernel_basis.len() - inner_rank,
        kernel_basis,
        n_values,
        base_ring_flag,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_basic() {
        let l = SpincLattice::new(vec![2, 4, 6], vec![0, 0, 0], vec![0.0; 3]).unwrap();
        assert_eq!(grading_divisor(&l), 2);
        let z = SpincLattice::new(vec![0, 0], vec![0, 0], vec![0.0; 2]).unwrap();
        assert_eq!(grading_divisor(&z), 0);
    }

    #[test]
    fn torus_bundle_toy() {
        // e = (2g−2)·fiber-dual with g=2 gives 2 on the fiber class,
        // h2pd = 0: c₁ = (2, 0), gcd 2
        let l = SpincLattice::new(vec![2, 0], vec![0, 0], vec![1.0, 0.0]).unwrap();
        assert_eq!(grading_divisor(&l), 2);
    }

    #[test]
    fn kernel_annihilates() {
        let rows = [vec![2i64, -2, 0], vec![3, 5, 7], vec![0, 0, 0], vec![6, 10, 15, 1]];
        for row in rows {
            let basis = row_kernel_basis(&row);
            let expected_rank = if row.iter().all(|&x| x == 0) {
                row.len()
            } else {
                row.len() - 1
            };
            assert_eq!(basis.len(), expected_rank);
            for b in &basis {
                let dot: i64 = b.iter().zip(&row).map(|(x, y)| x * y).sum();
                assert_eq!(dot, 0, "row {row:?} basis vector {b:?}");
            }
        }
    }

    #[test]
    fn spec_example_kernel() {
        // c₁ = (2,−2,0), c = (1,0,√2): kernel rank 2, N values rationally
        // independent, quotient rank 2
        let l = SpincLattice::new(vec![2, -2, 0], vec![0, 0, 0], vec![1.0, 0.0, 2.0f64.sqrt()])
            .unwrap();
        let desc = ring_descriptors(&l);
        assert_eq!(desc.kernel_basis.len(), 2);
        for b in &desc.kernel_basis {
            let dot: i64 = b.iter().zip(&l.c1_vector()).map(|(x, y)| x * y).sum();
            assert_eq!(dot, 0);
        }
        assert_eq!(desc.lambda_rank, 2);
        assert!(!desc.base_ring_flag);
    }

    #[test]
    fn zero_c1_full_kernel() {
        let l = SpincLattice::new(vec![0, 0, 0], vec![0, 0, 0], vec![1.0, 2.0, 3.0]).unwrap();
        let desc = ring_descriptors(&l);
        assert_eq!(desc.kernel_basis.len(), 3);
    }

    #[test]
    fn proportional_flag() {
        // c = c₁ up to positive scale: Λ is just R
        let l = SpincLattice::new(vec![2, -4], vec![0, 0], vec![1.0, -2.0]).unwrap();
        let desc = ring_descriptors(&l);
        assert!(desc.base_ring_flag);
        assert_eq!(desc.lambda_rank, 0);
        let l2 = SpincLattice::new(vec![2, -4], vec![0, 0], vec![1.0, -1.9]).unwrap();
        assert!(!ring_descriptors(&l2).base_ring_flag);
    }

    #[test]
    fn rational_relations_detected() {
        // N = (1, 1): relation (1, −1): rank 1
        assert_eq!(real_row_kernel_rank(&[1.0, 1.0]), 1);
        // N = (1, √2): no bounded relation
        assert_eq!(real_row_kernel_rank(&[1.0, 2.0f64.sqrt()]), 0);
        // N = (2/3, 1, 0): zero gives one, 2/3 vs 1 gives one more
        assert_eq!(real_row_kernel_rank(&[2.0 / 3.0, 1.0, 0.0]), 2);
    }
}
