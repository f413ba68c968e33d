//! Exact algebra companion to the vortex lab: symmetric-product cohomology
//! in the Macdonald presentation, Lefschetz numbers of induced maps on
//! symmetric products, truncated Novikov-ring arithmetic, spin-c lattice
//! descriptors, and the handleslide / death-birth bifurcation moves on
//! Novikov chain complexes.
//!
//! Everything here is exact: integer and rational arithmetic throughout,
//! with floating point confined to Novikov exponents (wire format) and the
//! S²-local-model map.

pub mod chain;
pub mod instances;
pub mod novikov;
pub mod spinc;
pub mod symplectic;
pub mod symprod;

pub use chain::{
    complex_from_entries, death_birth_extend, handleslide_transform, ChainError, ComplexJson,
    DeathBirth, Generator, Handleslide, NovMatrix, NovikovChainComplex,
};
pub use novikov::{NovikovError, NovikovScalar, EXP_MERGE_TOL};
pub use spinc::{
    grading_divisor, proportional, ring_descriptors, row_kernel_basis, RingDescriptors,
    SpincLattice,
};
pub use symplectic::{det_bareiss, SymplecticMatrix};
pub use symprod::{
    basis, betti_oracle, cup, euler_oracle, induced_map, lefschetz, lefschetz_series,
    lefschetz_series_check, nielsen_triple, pi2_chern, s2_local_model, s2_local_model_via_roots,
    w_plus_monotone, LocalModelParams, MacdonaldBasisElement,
};
