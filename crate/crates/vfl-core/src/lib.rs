//! Desk-scale numerical laboratory for U(1) vortex equations on flat tori:
//! spectral solution of the Taubes scalar reduction for prescribed zero
//! divisors, lattice gauge materialization with discrete residuals, and
//! adiabatic parallel transport of vortices along paths of complex
//! structures.

pub mod divisor;
pub mod eta;
pub mod lattice;
pub mod matching;
pub mod solver;
pub mod theta;
pub mod torus;
pub mod transport;

pub use divisor::{Divisor, DivisorError};
pub use lattice::{locate_zeros, vortex_residual, LatticeError};
pub use solver::{
    decay_fit, mass, solve_vortex, sup_bounds_check, SolveReport, SolverError, VortexField,
};
pub use torus::{complex_structure_path, ComplexGrid, FlatTorus, GridField, TorusError};
pub use transport::{transport, transport_step, TransportError, TransportState, TransportTrace};
