//! Chain complexes over truncated Novikov scalars, and the bifurcation
//! moves relating them: handleslide isomorphisms T with ∂₁ = T⁻¹∂₀T, and
//! death-birth extensions with the block differential
//!
//! ```text
//!        ⎛ ∂⁻ + α⁻¹v∘μ   v   0 ⎞
//!   ∂⁺ = ⎜      0        0   0 ⎟
//!        ⎝      μ        α   0 ⎠
//! ```
//!
//! together with the chain maps i = (Id, −α⁻¹μ, 0)ᵀ, p = (Id, 0, −α⁻¹v)
//! and the homotopy K (∂⁺K + K∂⁺ = 1 − i∘p). Homology ranks are computed
//! by Gaussian elimination over the Novikov field with minimal-valuation
//! pivoting.

use crate::novikov::{NovikovError, NovikovScalar, EXP_MERGE_TOL};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("∂² ≠ 0 up to cutoff at entry ({row},{col}): {value}")]
    NotSquareZero { row: usize, col: usize, value: String },
    #[error("differential entry ({row},{col}) has non-positive valuation {val}")]
    NonPositiveValuation { row: usize, col: usize, val: f64 },
    #[error("differential entry ({row},{col}) violates Z/2 parity")]
    ParityViolation { row: usize, col: usize },
    #[error("handleslide {from}→{to} connects generators of unequal grading")]
    GradingMismatch { from: usize, to: usize },
    #[error("death-birth constraint {name} ≠ 0 (first violation at index {index}: {value})")]
    ConstraintViolated { name: &'static str, index: usize, value: String },
    #[error("α is not a unit")]
    NonUnit,
    #[error("pivot valuation {val} within 10% of cutoff {cutoff}; increase the cutoff")]
    CutoffTooSmall { val: f64, cutoff: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Novikov(#[from] NovikovError),
}

/// A generator with its Z/2 parity and caller-supplied relative grading.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub z2: u8,
    pub rel_grading: i64,
}

/// Square matrix of Novikov scalars, column-action convention:
/// ∂(e_c) = Σ_r m[r][c]·e_r.
#[derive(Debug, Clone, PartialEq)]
pub struct NovMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    entries: Vec<NovikovScalar>,
}

impl NovMatrix {
    pub fn zero(n_rows: usize, n_cols: usize, cutoff: f64) -> Self {
        NovMatrix {
            n_rows,
            n_cols,
            entries: vec![NovikovScalar::zero(cutoff); n_rows * n_cols],
        }
    }

    pub fn identity(n: usize, cutoff: f64) -> Self {
        let mut m = Self::zero(n, n, cutoff);
        for i in 0..n {
            *m.at_mut(i, i) = NovikovScalar::one(cutoff);
        }
        m
    }

    pub fn at(&self, r: usize, c: usize) -> &NovikovScalar {
        &self.entries[r * self.n_cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut NovikovScalar {
        &mut self.entries[r * self.n_cols + c]
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n_cols, other.n_rows);
        let cutoff = self.entries[0].cutoff().min(
            other.entries.first().map_or(f64::INFINITY, |e| e.cutoff()),
        );
        let mut out = Self::zero(self.n_rows, other.n_cols, cutoff);
        for r in 0..self.n_rows {
            for k in 0..self.n_cols {
                if self.at(r, k).is_zero() {
                    continue;
                }
                for c in 0..other.n_cols {
                    if other.at(k, c).is_zero() {
                        continue;
                    }
                    let prod = self.at(r, k).mul(other.at(k, c));
                    *out.at_mut(r, c) = out.at(r, c).add(&prod);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        let mut out = self.clone();
        for i in 0..self.entries.len() {
            out.entries[i] = self.entries[i].add(&other.entries[i]);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = e.neg();
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let cutoff = self.entries.first().map_or(f64::INFINITY, |e| e.cutoff());
        let mut out = Self::zero(self.n_cols, self.n_rows, cutoff);
        for r in 0..self.n_rows {
            for c in 0..self.n_cols {
                *out.at_mut(c, r) = self.at(r, c).clone();
            }
        }
        out
    }

    pub fn is_zero_below(&self, bound: f64) -> bool {
        self.first_nonzero_below(bound).is_none()
    }

    /// First entry (row-major) that is nonzero below `bound`.
    pub fn first_nonzero_below(&self, bound: f64) -> Option<(usize, usize, &NovikovScalar)> {
        for r in 0..self.n_rows {
            for c in 0..self.n_cols {
                let e = self.at(r, c);
                if !e.eq_below(&NovikovScalar::zero(e.cutoff()), bound) {
                    return Some((r, c, e));
                }
            }
        }
        None
    }

    /// Geometric-series inverse of a unipotent matrix I + U with val(U) > 0
    /// entrywise (or U structurally nilpotent).
    pub fn invert_unipotent(&self, cutoff: f64) -> Self {
        assert_eq!(self.n_rows, self.n_cols);
        let id = Self::identity(self.n_rows, cutoff);
        let u = self.sub(&id);
        let mut inv = id.clone();
        let mut pow = id;
        loop {
            pow = pow.mul(&u.neg());
            if pow.is_zero_below(cutoff) {
                break;
            }
            inv = inv.add(&pow);
        }
        inv
    }

    /// Rank over the Novikov field by Gaussian elimination with
    /// minimal-valuation pivoting (ties by row, then column index).
    pub fn rank(&self, cutoff: f64) -> Result<usize, ChainError> {
        let mut m = self.clone();
        let mut rank = 0;
        let mut live_rows: Vec<usize> = (0..m.n_rows).collect();
        let mut live_cols: Vec<usize> = (0..m.n_cols).collect();
        while !live_rows.is_empty() && !live_cols.is_empty() {
            // minimal-valuation pivot among live entries
            let mut best: Option<(f64, usize, usize)> = None;
            for (ri, &r) in live_rows.iter().enumerate() {
                for (ci, &c) in live_cols.iter().enumerate() {
                    if let Some(v) = m.at(r, c).valuation() {
                        let better = match best {
                            None => true,
                            Some((bv, _, _)) => v < bv - EXP_MERGE_TOL,
                        };
                        if better {
                            best = Some((v, ri, ci));
                        }
                    }
                }
            }
            let (val, ri, ci) = match best {
                Some(b) => b,
                None => break,
            };
            if val >= 0.9 * cutoff {
                return Err(ChainError::CutoffTooSmall { val, cutoff });
            }
            let r0 = live_rows[ri];
            let c0 = live_cols[ci];
            let pivot_inv = m.at(r0, c0).invert_unit()?;
            live_rows.remove(ri);
            live_cols.remove(ci);
            rank += 1;
            for &r in &live_rows {
                if m.at(r, c0).is_zero() {
                    continue;
                }
                let factor = m.at(r, c0).mul(&pivot_inv);
                for &c in &live_cols {
                    let delta = factor.mul(m.at(r0, c));
                    *m.at_mut(r, c) = m.at(r, c).sub(&delta);
                }
                *m.at_mut(r, c0) = NovikovScalar::zero(cutoff);
            }
        }
        Ok(rank)
    }
}

/// Graded free module over Novikov scalars with a differential matrix.
#[derive(Debug, Clone)]
pub struct NovikovChainComplex {
    pub generators: Vec<Generator>,
    pub differential: NovMatrix,
    pub cutoff: f64,
}

impl NovikovChainComplex {
    pub fn new(
        generators: Vec<Generator>,
        differential: NovMatrix,
        cutoff: f64,
    ) -> Result<Self, ChainError> {
        if differential.n_rows != generators.len() || differential.n_cols != generators.len() {
            return Err(ChainError::Dimension(format!(
                "differential is {}×{} for {} generators",
                differential.n_rows,
                differential.n_cols,
                generators.len()
            )));
        }
        Ok(NovikovChainComplex { generators, differential, cutoff })
    }

    pub fn n(&self) -> usize {
        self.generators.len()
    }

    /// Verify ∂² = 0 up to cutoff, strictly positive valuations, and odd
    /// Z/2 parity. Returns the first violation.
    pub fn check(&self) -> Result<(), ChainError> {
        self.check_with(true)
    }

    /// Like [`check`](Self::check) but with the valuation-positivity
    /// requirement relaxed to ≥ 0 (death-birth blocks contain the unit α).
    pub fn check_relaxed(&self) -> Result<(), ChainError> {
        self.check_with(false)
    }

    fn check_with(&self, strict_valuation: bool) -> Result<(), ChainError> {
        let d = &self.differential;
        for r in 0..self.n() {
            for c in 0..self.n() {
                let e = d.at(r, c);
                if e.is_zero() {
                    continue;
                }
                let val = e.valuation().unwrap();
                if (strict_valuation && val <= EXP_MERGE_TOL)
                    || (!strict_valuation && val < -EXP_MERGE_TOL)
                {
                    return Err(ChainError::NonPositiveValuation { row: r, col: c, val });
                }
                if self.generators[r].z2 == self.generators[c].z2 {
                    return Err(ChainError::ParityViolation { row: r, col: c });
                }
            }
        }
        let sq = d.mul(d);
        if let Some((r, c, e)) = sq.first_nonzero_below(self.cutoff) {
            return Err(ChainError::NotSquareZero { row: r, col: c, value: e.to_string() });
        }
        Ok(())
    }

    /// Homology ranks over the Novikov field, split by Z/2 parity:
    /// returns `[rank_even, rank_odd]`.
    pub fn homology_ranks(&self) -> Result<[usize; 2], ChainError> {
        let even: Vec<usize> =
            (0..self.n()).filter(|&i| self.generators[i].z2 == 0).collect();
        let odd: Vec<usize> =
            (0..self.n()).filter(|&i| self.generators[i].z2 == 1).collect();
        let block = |rows: &[usize], cols: &[usize]| {
            let mut m = NovMatrix::zero(rows.len(), cols.len(), self.cutoff);
            for (ri, &r) in rows.iter().enumerate() {
                for (ci, &c) in cols.iter().enumerate() {
                    *m.at_mut(ri, ci) = self.differential.at(r, c).clone();
                }
            }
            m
        };
        // ∂ restricted even→odd lands in odd rows, and vice versa
        let r_eo = block(&odd, &even).rank(self.cutoff)?;
        let r_oe = block(&even, &odd).rank(self.cutoff)?;
        Ok([even.len() - r_eo - r_oe, odd.len() - r_oe - r_eo])
    }

    /// Dual complex: transposed differential on the dual basis.
    pub fn dual(&self) -> Self {
        NovikovChainComplex {
            generators: self.generators.clone(),
            differential: self.differential.transpose(),
            cutoff: self.cutoff,
        }
    }

    /// Verify the pairing identity ⟨∂a, b⟩ = ⟨a, ∂ᵀb⟩ on all basis pairs and
    /// that the dual has the same homology ranks.
    pub fn duality_check(&self) -> Result<bool, ChainError> {
        let dual = self.dual();
        for a in 0..self.n() {
            for b in 0..self.n() {
                // ⟨∂ e_a, e_b⟩ = D[b][a]; ⟨e_a, ∂ᵀ e_b⟩ = Dᵀ[a][b]
                let lhs = self.differential.at(b, a);
                let rhs = dual.differential.at(a, b);
                if !lhs.eq_below(rhs, self.cutoff) {
                    return Ok(false);
                }
            }
        }
        Ok(self.homology_ranks()? == dual.homology_ranks()?)
    }
}

/// One handleslide: a flowline from generator `from` to generator `to` of
/// equal relative grading, with Novikov weight of positive valuation and a
/// coherent-orientation sign.
#[derive(Debug, Clone)]
pub struct Handleslide {
    pub from: usize,
    pub to: usize,
    pub weight: NovikovScalar,
    pub sign: i8,
}

/// Apply handleslides: builds the unipotent T with
/// Tx = x + Σ ε·z·[weight], returns (C′, T) with ∂₁ = T⁻¹∂₀T.
pub fn handleslide_transform(
    complex: &NovikovChainComplex,
    slides: &[Handleslide],
) -> Result<(NovikovChainComplex, NovMatrix), ChainError> {
    let n = complex.n();
    let cutoff = complex.cutoff;
    let mut t = NovMatrix::identity(n, cutoff);
    for s in slides {
        let gf = &complex.generators[s.from];
        let gt = &complex.generators[s.to];
        if gf.rel_grading != gt.rel_grading || gf.z2 != gt.z2 {
            return Err(ChainError::GradingMismatch { from: s.from, to: s.to });
        }
        match s.weight.valuation() {
            Some(v) if v > EXP_MERGE_TOL => {}
            Some(v) => {
                return Err(ChainError::NonPositiveValuation { row: s.to, col: s.from, val: v })
            }
            None => continue,
        }
        let signed = if s.sign >= 0 {
            s.weight.clone()
        } else {
            s.weight.neg()
        };
        *t.at_mut(s.to, s.from) = t.at(s.to, s.from).add(&signed);
    }
    let t_inv = t.invert_unipotent(cutoff);
    let d1 = t_inv.mul(&complex.differential).mul(&t);
    let out = NovikovChainComplex::new(complex.generators.clone(), d1, cutoff)?;
    out.check()?;
    Ok((out, t))
}

/// Result of a death-birth extension: the larger complex and the chain
/// homotopy equivalence data (i, p, K).
#[derive(Debug, Clone)]
pub struct DeathBirth {
    pub plus: NovikovChainComplex,
    pub include: NovMatrix,
    pub project: NovMatrix,
    pub homotopy: NovMatrix,
}

/// Extend ∂⁻ by a canceling pair (x⁺, x⁻) with connecting data (v, μ, α).
///
/// Preconditions μ∘v = 0, μ∘∂⁻ = 0, ∂⁻∘v = 0 are required of the input; the
/// four identities ((∂⁺)² = 0, i and p chain maps, p∘i = Id,
/// ∂⁺K + K∂⁺ = 1 − i∘p) are verified to cutoff before returning.
pub fn death_birth_extend(
    dminus: &NovikovChainComplex,
    v: &[NovikovScalar],
    mu: &[NovikovScalar],
    alpha: &NovikovScalar,
) -> Result<DeathBirth, ChainError> {
    let n = dminus.n();
    let cutoff = dminus.cutoff;
    if v.len() != n || mu.len() != n {
        return Err(ChainError::Dimension(format!(
            "v has {} entries, μ has {}, expected {n}",
            v.len(),
            mu.len()
        )));
    }
    let alpha_inv = alpha.invert_unit().map_err(|_| ChainError::NonUnit)?;

    // constraint checks, reporting the first offending index
    let mut mv = NovikovScalar::zero(cutoff);
    for i in 0..n {
        mv = mv.add(&mu[i].mul(&v[i]));
    }
    if !mv.eq_below(&NovikovScalar::zero(cutoff), cutoff) {
        return Err(ChainError::ConstraintViolated { name: "μ∘v", index: 0, value: mv.to_string() });
    }
    for c in 0..n {
        let mut s = NovikovScalar::zero(cutoff);
        for r in 0..n {
            s = s.add(&mu[r].mul(dminus.differential.at(r, c)));
        }
        if !s.eq_below(&NovikovScalar::zero(cutoff), cutoff) {
            return Err(ChainError::ConstraintViolated { name: "μ∘∂⁻", index: c, value: s.to_string() });
        }
    }
    for r in 0..n {
        let mut s = NovikovScalar::zero(cutoff);
        for k in 0..n {
            s = s.add(&dminus.differential.at(r, k).mul(&v[k]));
        }
        if !s.eq_below(&NovikovScalar::zero(cutoff), cutoff) {
            return Err(ChainError::ConstraintViolated { name: "∂⁻∘v", index: r, value: s.to_string() });
        }
    }

    // parities: x⁻ receives α from x⁺, so they are opposite; v lands in the
    // parity opposite to x⁺ and μ consumes that same parity.
    let vm_parity = v
        .iter()
        .enumerate()
        .find(|(_, e)| !e.is_zero())
        .map(|(i, _)| dminus.generators[i].z2)
        .or_else(|| {
            mu.iter()
                .enumerate()
                .find(|(_, e)| !e.is_zero())
                .map(|(i, _)| dminus.generators[i].z2)
        });
    let xplus_z2 = 1 - vm_parity.unwrap_or(1);
    for (i, e) in v.iter().enumerate() {
        if !e.is_zero() && dminus.generators[i].z2 == xplus_z2 {
            return Err(ChainError::ParityViolation { row: i, col: n });
        }
    }
    for (i, e) in mu.iter().enumerate() {
        if !e.is_zero() && dminus.generators[i].z2 != xplus_z2 {
            return Err(ChainError::ParityViolation { row: n + 1, col: i });
        }
    }

    let xplus_grading = dminus
        .generators
        .iter()
        .zip(v.iter())
        .find(|(_, e)| !e.is_zero())
        .map(|(g, _)| g.rel_grading + 1)
        .unwrap_or(0);
    let mut gens = dminus.generators.clone();
    gens.push(Generator { name: "x+".into(), z2: xplus_z2, rel_grading: xplus_grading });
    gens.push(Generator {
        name: "x-".into(),
        z2: 1 - xplus_z2,
        rel_grading: xplus_grading - 1,
    });

    // ∂⁺ block assembly
    let m = n + 2;
    let mut dplus = NovMatrix::zero(m, m, cutoff);
    for r in 0..n {
        for c in 0..n {
            let corr = alpha_inv.mul(&v[r]).mul(&mu[c]);
            *dplus.at_mut(r, c) = dminus.differential.at(r, c).add(&corr);
        }
        *dplus.at_mut(r, n) = v[r].clone();
    }
    for c in 0..n {
        *dplus.at_mut(n + 1, c) = mu[c].clone();
    }
    *dplus.at_mut(n + 1, n) = alpha.clone();

    // i = [Id; −α⁻¹μ; 0],  p = [Id, 0, −α⁻¹v],  K = e_{x⁺,x⁻}·α⁻¹
    let mut inc = NovMatrix::zero(m, n, cutoff);
    let mut proj = NovMatrix::zero(n, m, cutoff);
    for i in 0..n {
        *inc.at_mut(i, i) = NovikovScalar::one(cutoff);
        *proj.at_mut(i, i) = NovikovScalar::one(cutoff);
    }
    for c in 0..n {
        *inc.at_mut(n, c) = alpha_inv.mul(&mu[c]).neg();
    }
    for r in 0..n {
        *proj.at_mut(r, n + 1) = alpha_inv.mul(&v[r]).neg();
    }
    let mut k = NovMatrix::zero(m, m, cutoff);
    *k.at_mut(n, n + 1) = alpha_inv.clone();

    let plus = NovikovChainComplex::new(gens, dplus, cutoff)?;
    plus.check_relaxed()?;

    // chain maps: ∂⁺ i = i ∂⁻ and p ∂⁺ = ∂⁻ p
    let lhs = plus.differential.mul(&inc).sub(&inc.mul(&dminus.differential));
    if let Some((r, c, e)) = lhs.first_nonzero_below(cutoff) {
        return Err(ChainError::ConstraintViolated { name: "∂⁺i − i∂⁻", index: r * m + c, value: e.to_string() });
    }
    let lhs = proj.mul(&plus.differential).sub(&dminus.differential.mul(&proj));
    if let Some((r, c, e)) = lhs.first_nonzero_below(cutoff) {
        return Err(ChainError::ConstraintViolated { name: "p∂⁺ − ∂⁻p", index: r * m + c, value: e.to_string() });
    }
    // p∘i = Id
    let pi = proj.mul(&inc).sub(&NovMatrix::identity(n, cutoff));
    if let Some((r, c, e)) = pi.first_nonzero_below(cutoff) {
        return Err(ChainError::ConstraintViolated { name: "p∘i − Id", index: r * n + c, value: e.to_string() });
    }
    // ∂⁺K + K∂⁺ = 1 − i∘p
    let anti = plus.differential.mul(&k).add(&k.mul(&plus.differential));
    let target = NovMatrix::identity(m, cutoff).sub(&inc.mul(&proj));
    let diff = anti.sub(&target);
    if let Some((r, c, e)) = diff.first_nonzero_below(cutoff) {
        return Err(ChainError::ConstraintViolated { name: "∂⁺K + K∂⁺ − (1 − i∘p)", index: r * m + c, value: e.to_string() });
    }

    Ok(DeathBirth { plus, include: inc, project: proj, homotopy: k })
}

// --- JSON wire format ---

/// Serialized form: generators plus the differential as sparse triples
/// `[row, col, [[λ, num, den], …]]`.
#[derive(Debug, Serialize, Deserialize)]
pub struct ComplexJson {
    pub generators: Vec<Generator>,
    pub differential: Vec<(usize, usize, Vec<(f64, i64, i64)>)>,
    pub cutoff: f64,
}

impl ComplexJson {
    pub fn to_complex(&self) -> Result<NovikovChainComplex, ChainError> {
        let n = self.generators.len();
        let mut d = NovMatrix::zero(n, n, self.cutoff);
        for (r, c, terms) in &self.differential {
            if *r >= n || *c >= n {
                return Err(ChainError::Dimension(format!("entry ({r},{c}) out of range")));
            }
            let terms = terms
                .iter()
                .map(|&(e, num, den)| {
                    (e, BigRational::new(num.into(), den.into()))
                })
                .collect();
            *d.at_mut(*r, *c) = NovikovScalar::from_terms(terms, self.cutoff);
        }
        NovikovChainComplex::new(self.generators.clone(), d, self.cutoff)
    }

    pub fn from_complex(c: &NovikovChainComplex) -> Self {
        let mut triples = Vec::new();
        for r in 0..c.n() {
            for col in 0..c.n() {
                let e = c.differential.at(r, col);
                if e.is_zero() {
                    continue;
                }
                let terms = e
                    .terms()
                    .iter()
                    .map(|(ex, q)| {
                        // best-effort i64 conversion for the wire format
                        let num = q.numer().try_into().unwrap_or(i64::MAX);
                        let den = q.denom().try_into().unwrap_or(i64::MAX);
                        (*ex, num, den)
                    })
                    .collect();
                triples.push((r, col, terms));
            }
        }
        ComplexJson {
            generators: c.generators.clone(),
            differential: triples,
            cutoff: c.cutoff,
        }
    }
}

/// Convenience constructor used across the tests: parity from the listed
/// gradings, entries given as monomial lists.
pub fn complex_from_entries(
    gradings: &[i64],
    entries: &[(usize, usize, Vec<(f64, i64, i64)>)],
    cutoff: f64,
) -> Result<NovikovChainComplex, ChainError> {
    let generators = gradings
        .iter()
        .enumerate()
        .map(|(i, &g)| Generator {
            name: format!("x{i}"),
            z2: (g.rem_euclid(2)) as u8,
            rel_grading: g,
        })
        .collect();
    let json = ComplexJson {
        generators,
        differential: entries.to_vec(),
        cutoff,
    };
    json.to_complex()
}
