use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("hamiltonian: domain [0, {b}] is empty")]
    EmptyDomain { b: f64 },
    #[error("hamiltonian: segments do not partition the domain near x = {at}")]
    GapInPartition { at: f64 },
    #[error("hamiltonian: H(x) has eigenvalue {eigenvalue:e} < 0 at x = {x}")]
    NonPositiveSemidefinite { x: f64, eigenvalue: f64 },
    #[error("hamiltonian: H vanishes identically on [{from}, {to}]")]
    ZeroHamiltonian { from: f64, to: f64 },
    #[error("hamiltonian: invalid segment on [{from}, {to}]: {reason}")]
    InvalidSegment { from: f64, to: f64, reason: String },

    #[error("solver: step control could not reach tolerance on [{from}, {to}] with {steps} steps")]
    StepUnderflow { from: f64, to: f64, steps: usize },
    #[error("solver: the Prüfer system requires a diagonal Hamiltonian")]
    NonDiagonalHamiltonian,
    #[error("solver: norm forms disagree at lambda = {lambda}: quadrature {quadrature}, wronskian {wronskian}")]
    FormMismatch { lambda: f64, quadrature: f64, wronskian: f64 },

    #[error("spectrum: gamma = {gamma} selects the exceptional extension (omega = {omega})")]
    ExceptionalExtension { gamma: f64, omega: f64 },
    #[error("spectrum: boundary angle theta(lambda, b) is not increasing near lambda = {lambda}")]
    MonotonicityFailure { lambda: f64 },

    #[error("kernels: quotient and integral forms disagree ({quotient} vs {integral})")]
    CoincidenceInstability { quotient: f64, integral: f64 },
    #[error("kernels: Paley-Wiener normalization ratio varies by {variation:e}")]
    NonConstantRatio { variation: f64 },
    #[error("kernels: taper [{a}, {c}] is not admissible: {reason}")]
    InvalidTaper { a: f64, c: f64, reason: String },

    #[error("reconstruct: coefficient function has mass outside [0, {support}]")]
    SupportViolation { support: f64 },
    #[error("reconstruct: samples belong to B_{declared}, taper starts at a = {taper_a}")]
    SubspaceMismatch { declared: f64, taper_a: f64 },
    #[error("reconstruct: perturbation exponent p = {p} must lie in (2, inf]")]
    UnsupportedP { p: f64 },

    #[error("airy: series and asymptotic branches disagree by {difference:e} at x = {x}")]
    BranchMismatch { x: f64, difference: f64 },
    #[error("airy: zero enumeration found a gap between index {index} and {next}", next = index + 1)]
    EnumerationGap { index: usize },

    #[error("quadrature did not converge on [{from}, {to}]")]
    QuadratureFailure { from: f64, to: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Failures that signal numerical trouble rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepUnderflow { .. }
                | Error::FormMismatch { .. }
                | Error::MonotonicityFailure { .. }
                | Error::CoincidenceInstability { .. }
                | Error::NonConstantRatio { .. }
                | Error::BranchMismatch { .. }
                | Error::EnumerationGap { .. }
                | Error::QuadratureFailure { .. }
        )
    }
}
