//! Integer symplectic matrices Sp(2g, Z): exact verification of AᵀJA = J,
//! determinants by fraction-free elimination, and random words in the
//! elementary generators.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SymplecticError {
    #[error("matrix is {0}×{1}, expected even square")]
    BadShape(usize, usize),
    #[error("AᵀJA ≠ J at entry ({0},{1})")]
    NotSymplectic(usize, usize),
}

/// A 2g×2g integer matrix with AᵀJ₀A = J₀, where J₀ = [[0, I], [−I, 0]].
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    pub g: usize,
    entries: Vec<i64>,
}

impl SymplecticMatrix {
    pub fn new(g: usize, entries: Vec<i64>) -> Result<Self, SymplecticError> {
        let n = 2 * g;
        if entries.len() != n * n {
            return Err(SymplecticError::BadShape(entries.len() / n.max(1), n));
        }
        let m = SymplecticMatrix { g, entries };
        m.verify()?;
        Ok(m)
    }

    pub fn identity(g: usize) -> Self {
        let n = 2 * g;
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        SymplecticMatrix { g, entries }
    }

    pub fn n(&self) -> usize {
        2 * self.g
    }

    pub fn at(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.n() + c]
    }

    fn verify(&self) -> Result<(), SymplecticError> {
        let n = self.n();
        let g = self.g;
        // (AᵀJA)[r][c] = Σ_k A[k][r]·(JA)[k][c]; J rows: row i = row i+g of A·(+1), row i+g = row i of A·(−1)
        for r in 0..n {
            for c in 0..n {
                let mut s: i128 = 0;
                for k in 0..g {
                    s += self.at(k, r) as i128 * self.at(k + g, c) as i128;
                    s -= self.at(k + g, r) as i128 * self.at(k, c) as i128;
                }
                let expect: i128 = if c == r + g {
                    1
                } else if r == c + g {
                    -1
                } else {
                    0
                };
                if s != expect {
                    return Err(SymplecticError::NotSymplectic(r, c));
                }
            }
        }
        Ok(())
    }

    /// Exact determinant (always +1 for symplectic matrices; kept as a check).
    pub fn det(&self) -> BigInt {
        let n = self.n();
        let m: Vec<Vec<BigInt>> = (0..n)
            .map(|r| (0..n).map(|c| BigInt::from(self.at(r, c))).collect())
            .collect();
        det_bareiss(m)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.g, other.g);
        let n = self.n();
        let mut entries = vec![0i64; n * n];
        for r in 0..n {
            for c in 0..n {
                let mut s: i128 = 0;
                for k in 0..n {
                    s += self.at(r, k) as i128 * other.at(k, c) as i128;
                }
                entries[r * n + c] = i64::try_from(s).expect("symplectic product overflow");
            }
        }
        SymplecticMatrix { g: self.g, entries }
    }

    /// Random bounded word in elementary symplectic generators: the J₀ swap
    /// and the shears [[I,S],[0,I]], [[I,0],[S,I]] for random symmetric S
    /// with entries in {−1,0,1}. Exactness of AᵀJA = J is preserved by
    /// construction and verified.
    pub fn random_word<R: Rng>(g: usize, word_len: usize, rng: &mut R) -> Self {
        let n = 2 * g;
        let mut acc = Self::identity(g);
        for _ in 0..word_len {
            let kind = rng.gen_range(0..3);
            let factor = match kind {
                0 => {
                    // J₀: [[0, I], [-I, 0]]
                    let mut e = vec![0i64; n * n];
                    for i in 0..g {
                        e[i * n + (i + g)] = 1;
                        e[(i + g) * n + i] = -1;
                    }
                    SymplecticMatrix { g, entries: e }
                }
                kind => {
                    let mut s = vec![0i64; g * g];
                    for i in 0..g {
                        for j in i..g {
                            let x = rng.gen_range(-1..=1i64);
                            s[i * g + j] = x;
                            s[j * g + i] = x;
                        }
                    }
                    let mut e = vec![0i64; n * n];
                    for i in 0..n {
                        e[i * n + i] = 1;
                    }
                    for i in 0..g {
                        for j in 0..g {
                            if kind == 1 {
                                e[i * n + (j + g)] = s[i * g + j];
                            } else {
                                e[(i + g) * n + j] = s[i * g + j];
                            }
                        }
                    }
                    SymplecticMatrix { g, entries: e }
                }
            };
            acc = acc.mul(&factor);
        }
        acc.verify().expect("generator word must stay symplectic");
        acc
    }
}

/// Fraction-free (Bareiss) determinant of an exact integer matrix.
pub fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&r| !m[r][k].is_zero());
            match swap {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Minor det(A[rows, cols]) of an integer matrix given by a lookup.
pub fn minor_det(at: &dyn Fn(usize, usize) -> i64, rows: &[usize], cols: &[usize]) -> BigInt {
    let m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|&r| cols.iter().map(|&c| BigInt::from(at(r, c))).collect())
        .collect();
    det_bareiss(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_is_symplectic() {
        let m = SymplecticMatrix::identity(3);
        assert!(m.verify().is_ok());
        assert_eq!(m.det(), BigInt::one());
    }

    #[test]
    fn rejects_non_symplectic() {
        let mut e = vec![0i64; 16];
        for i in 0..4 {
            e[i * 4 + i] = 1;
        }
        e[1] = 1; // breaks the pairing
        assert!(SymplecticMatrix::new(2, e).is_err());
    }

    #[test]
    fn random_words_symplectic_det_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in 2..=5 {
            for _ in 0..20 {
                let m = SymplecticMatrix::random_word(g, 6, &mut rng);
                assert_eq!(m.det(), BigInt::one());
            }
        }
    }

    #[test]
    fn bareiss_matches_small_cases() {
        let m = vec![
            vec![BigInt::from(2), BigInt::from(3)],
            vec![BigInt::from(5), BigInt::from(7)],
        ];
        assert_eq!(det_bareiss(m), BigInt::from(-1));
    }
}
