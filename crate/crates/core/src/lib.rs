//! Numerical tools for regular de Branges spaces generated by 2×2 canonical systems.
//!
//! The crate computes fundamental solutions of `J u' = -z H u`, spectra of the
//! self-adjoint boundary extensions, reproducing kernels, the taper-weight
//! oversampling kernel, and the reconstruction experiments built on top of them.
//! The Airy system `H = diag(1, x)` has a closed-form treatment in [`airy`] that
//! doubles as a high-precision reference for the generic pipeline.

// Negated comparisons are deliberate: they also reject NaN inputs.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod airy;
mod dd;
pub mod error;
pub mod hamiltonian;
pub mod kernels;
pub mod linalg;
pub mod quadrature;
pub mod reconstruct;
pub mod solver;
pub mod spectrum;

pub use error::{Error, Result};
pub use hamiltonian::{Hamiltonian, Segment, SegmentKind, SingularInterval};
pub use kernels::{KernelEval, TaperWeight};
pub use linalg::{Vec2, C64};
pub use reconstruct::{NoiseMode, NoiseSpec, ReconstructionReport, SampleSet, SampleSource};
pub use solver::{FundamentalValue, GenericSolver, PruferState, SolutionSource, SolverOptions};
pub use spectrum::{BoundaryAngle, Spectrum, SpectrumEntry};
