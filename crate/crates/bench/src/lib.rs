//! Shared fixtures for the benchmarks.

use debranges_core::{GenericSolver, Hamiltonian, Segment, SegmentKind};

/// Constant Hamiltonian `diag(1/2, 1/2)` on `[0, 2]`.
pub fn constant() -> GenericSolver {
    GenericSolver::new(Hamiltonian::constant_diagonal(0.0, 2.0).expect("valid Hamiltonian"))
}

/// The Airy system `diag(1, x)` on `[0, 1]`.
pub fn airy() -> GenericSolver {
    GenericSolver::new(Hamiltonian::airy(1.0).expect("valid Hamiltonian"))
}

/// A non-constant diagonal profile on `[0, 2]`.
pub fn variable() -> GenericSolver {
    let g = debranges_core::hamiltonian::Profile::Polynomial { poly: vec![0.1, 0.15, -0.1] };
    GenericSolver::new(Hamiltonian::new(vec![Segment::new(0.0, 2.0, SegmentKind::DiagonalFunction { g })]).expect("valid Hamiltonian"))
}
