//! Effective divisors on the torus: points with positive multiplicities.

use crate::torus::{wrap_unit, FlatTorus};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DivisorError {
    #[error("divisor must have degree ≥ 1")]
    Empty,
    #[error("multiplicities must be ≥ 1")]
    ZeroMultiplicity,
    #[error("divisor points {0} and {1} coincide; merge into a multiplicity")]
    DuplicatePoint(usize, usize),
}

/// A degree-d effective divisor: distinct points in [0,1)² with positive
/// multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Divisor {
    points: Vec<(f64, f64)>,
    multiplicities: Vec<u32>,
}

impl Divisor {
    pub fn new(entries: &[((f64, f64), u32)]) -> Result<Self, DivisorError> {
        if entries.is_empty() {
            return Err(DivisorError::Empty);
        }
        let points: Vec<(f64, f64)> = entries
            .iter()
            .map(|&((x, y), _)| (wrap_unit(x), wrap_unit(y)))
            .collect();
        let multiplicities: Vec<u32> = entries.iter().map(|&(_, m)| m).collect();
        if multiplicities.iter().any(|&m| m == 0) {
            return Err(DivisorError::ZeroMultiplicity);
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i] == points[j] {
                    return Err(DivisorError::DuplicatePoint(i, j));
                }
            }
        }
        Ok(Divisor { points, multiplicities })
    }

    pub fn single(p: (f64, f64)) -> Self {
        Divisor::new(&[(p, 1)]).expect("single point divisor")
    }

    /// The degree-0 divisor of the trivial bundle (θ ≡ 1 edge input).
    pub fn empty() -> Self {
        Divisor { points: Vec::new(), multiplicities: Vec::new() }
    }

    pub fn degree(&self) -> u32 {
        self.multiplicities.iter().sum()
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    pub fn iter(&self) -> impl Iterator<Item = ((f64, f64), u32)> + '_ {
        self.points
            .iter()
            .copied()
            .zip(self.multiplicities.iter().copied())
    }

    /// Minimal pairwise geodesic separation (∞ for fewer than two points).
    pub fn min_separation(&self, torus: &FlatTorus) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                best = best.min(torus.distance(self.points[i], self.points[j]));
            }
        }
        best
    }

    pub fn is_simple(&self) -> bool {
        self.multiplicities.iter().all(|&m| m == 1)
    }

    /// Points lying exactly on grid lines make the winding bookkeeping of
    /// the link construction degenerate (a corner zero splits its 2π
    /// winding into sector angles across the four adjacent cells). Nudge
    /// any lattice-coincident coordinate to the neighboring cell center;
    /// everything measured (mass, decay, residuals) is
    /// position-independent at this scale.
    pub fn nudged_off_skeleton(&self, grid_n: usize) -> Divisor {
        let h = 1.0 / grid_n as f64;
        let fix = |x: f64| {
            let cells = x / h;
            if (cells - cells.round()).abs() < 1e-7 {
                wrap_unit((cells.round() + 0.5) * h)
            } else {
                x
            }
        };
        Divisor {
            points: self.points.iter().map(|&(x, y)| (fix(x), fix(y))).collect(),
            multiplicities: self.multiplicities.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_input() {
        assert!(Divisor::new(&[]).is_err());
        assert!(Divisor::new(&[((0.5, 0.5), 0)]).is_err());
        assert!(Divisor::new(&[((0.25, 0.5), 1), ((1.25, 0.5), 1)]).is_err());
        let d = Divisor::new(&[((0.25, 0.5), 2), ((0.75, 0.5), 1)]).unwrap();
        assert_eq!(d.degree(), 3);
        assert!(!d.is_simple());
    }
}
