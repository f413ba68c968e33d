//! Random constrained instances for the bifurcation checks: chain
//! complexes with strictly triangular parity-split differentials, columns
//! in the image of ∂ (so the death-birth constraints hold exactly), and
//! compatible handleslide sets.

use crate::novikov::NovikovScalar;
use rand_chacha::ChaCha8Rng;

pub type DeathBirthInstance = (
    crate::NovikovChainComplex,
    Vec<crate::NovikovScalar>,
    Vec<crate::NovikovScalar>,
    crate::NovikovScalar,
);

/// Random constrained death-birth instance: an even/odd split complex with
/// valuation-positive strictly upper-triangular differential (∂² = 0 via
/// an acyclic filtration), plus v in ker ∂⁻ ∩ (im μ)⊥-compatible data
/// satisfying μ∘v = 0, μ∘∂⁻ = 0, ∂⁻∘v = 0.
pub fn random_death_birth(
    rng: &mut ChaCha8Rng,
    max_generators: usize,
    cutoff: f64,
) -> DeathBirthInstance {
    use rand::Rng;
    let n = rng.gen_range(2..=max_generators.max(2));
    // alternate parities; differential from x_i to x_j allowed when
    // parity differs and i > j (strict triangularity gives ∂² = 0 when
    // composition paths vanish; we re-check and drop violating entries)
    let gradings: Vec<i64> = (0..n).map(|i| (i % 2) as i64).collect();
    let mut entries: Vec<(usize, usize, Vec<(f64, i64, i64)>)> = Vec::new();
    for col in 0..n {
        for row in 0..n {
            if gradings[row] == gradings[col] || row >= col {
                continue;
            }
            if rng.gen_bool(0.4) {
                let e = rng.gen_range(1..=40) as f64 * 0.25;
                let num = rng.gen_range(-3i64..=3);
                if num != 0 {
                    entries.push((row, col, vec![(e, num, 1)]));
                }
            }
        }
    }
    let mut complex = crate::complex_from_entries(&gradings, &entries, cutoff).unwrap();
    enforce_square_zero(&mut complex);

    // v: column with ∂⁻v = 0 — choose v supported on rows that ∂⁻ kills;
    // simplest robust choice: v in the image of ∂⁻ (then ∂⁻v = 0 by ∂²=0)
    let zero = NovikovScalar::zero(cutoff);
    let mut v = vec![zero.clone(); n];
    let vcol = rng.gen_range(0..n);
    for r in 0..n {
        let e = complex.differential.at(r, vcol).clone();
        if !e.is_zero() {
            v[r] = e.mul(&NovikovScalar::monomial_int(0.25, 1, 1, cutoff));
        }
    }
    // μ: row with μ∘∂⁻ = 0 and μ∘v = 0 — take μ = (∂⁻ applied then read a
    // row): μ := row r₀ of ∂⁻ composed... the simplest kernel row: μ_c :=
    // entry (r₀, c) of ∂⁻ would give μ∘∂⁻ = (∂²)-row = 0 and μ∘v = (∂v)_r₀
    // = 0 since ∂v = 0.
    let r0 = rng.gen_range(0..n);
    let mut mu = vec![zero; n];
    for c in 0..n {
        let e = complex.differential.at(r0, c).clone();
        if !e.is_zero() {
            mu[c] = e.mul(&NovikovScalar::monomial_int(0.5, 1, 1, cutoff));
        }
    }
    // α: a unit with small positive valuation plus a tail
    let tail = rng.gen_range(-2i64..=2);
    let alpha = NovikovScalar::one(cutoff)
        .add(&NovikovScalar::monomial_int(0.75, tail, 1, cutoff));
    (complex, v, mu, alpha)
}

/// Drop entries until ∂² = 0 holds (strict upper-triangular parity-split
/// differentials need at most a few removals).
fn enforce_square_zero(complex: &mut crate::NovikovChainComplex) {
    for _ in 0..64 {
        let sq = complex.differential.mul(&complex.differential);
        match sq.first_nonzero_below(complex.cutoff) {
            None => return,
            Some((r, c, _)) => {
                // remove one factor on a path r ← k ← c
                let n = complex.n();
                let mut removed = false;
                for k in 0..n {
                    if !complex.differential.at(r, k).is_zero()
                        && !complex.differential.at(k, c).is_zero()
                    {
                        *complex.differential.at_mut(k, c) =
                            NovikovScalar::zero(complex.cutoff);
                        removed = true;
                        break;
                    }
                }
                if !removed {
                    return;
                }
            }
        }
    }
}

/// Random complex plus a compatible handleslide set.
pub fn random_handleslide(
    rng: &mut ChaCha8Rng,
    max_generators: usize,
    cutoff: f64,
) -> (crate::NovikovChainComplex, Vec<crate::Handleslide>) {
    use rand::Rng;
    let n = rng.gen_range(2..=max_generators.max(2));
    // several generators share gradings so slides exist
    let gradings: Vec<i64> = (0..n).map(|i| (i % 4) as i64).collect();
    let mut entries: Vec<(usize, usize, Vec<(f64, i64, i64)>)> = Vec::new();
    for col in 0..n {
        for row in 0..n {
            if (gradings[row] - gradings[col]).rem_euclid(2) == 0 || row >= col {
                continue;
            }
            if rng.gen_bool(0.35) {
                let e = rng.gen_range(1..=40) as f64 * 0.25;
                let num = rng.gen_range(-3i64..=3);
                if num != 0 {
                    entries.push((row, col, vec![(e, num, 1)]));
                }
            }
        }
    }
    let mut complex = crate::complex_from_entries(&gradings, &entries, cutoff).unwrap();
    enforce_square_zero(&mut complex);
    let mut slides = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let from = rng.gen_range(0..n);
        let candidates: Vec<usize> = (0..n)
            .filter(|&z| z != from && gradings[z] == gradings[from])
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let to = candidates[rng.gen_range(0..candidates.len())];
        slides.push(crate::Handleslide {
            from,
            to,
            weight: NovikovScalar::monomial_int(
                rng.gen_range(1..=20) as f64 * 0.2,
                rng.gen_range(1..=3),
                1,
                cutoff,
            ),
            sign: if rng.gen_bool(0.5) { 1 } else { -1 },
        });
    }
    (complex, slides)
}
