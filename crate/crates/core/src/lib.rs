//! Accessible density matrices for multi-photon polarization states.
//!
//! When photons carry spatio-temporal (hidden) degrees of freedom that a
//! detector cannot resolve, the most complete description available from
//! polarization measurements is the partial trace over the hidden modes. For
//! a permutation-symmetric bosonic state that partial trace is block diagonal
//! across the SU(2) sectors `j` of the N-qubit polarization space, and every
//! copy of a given `j` carries the same block. This crate builds those
//! objects and the measurement chain around them:
//!
//! - [`schur`]: multiplicities, Weyl dimensions, parameter counts and an
//!   explicit Schur basis for up to [`schur::N_MAX`] qubits.
//! - [`states`]: creation-operator expressions with hidden-mode labels,
//!   bosonic symmetrization, hidden-mode tracing and S_N twirling.
//! - [`measurement`]: waveplate/PBS/number-resolving counter POVMs, outcome
//!   probabilities and Poisson count simulation.
//! - [`tomography`]: linear inversion, diluted maximum-likelihood
//!   reconstruction, fidelity and the indistinguishability report.
//! - [`io`]: the on-disk formats shared with the command-line tool.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); combinatorial
//! counts are exact integers and Clebsch-Gordan coefficients are derived from
//! exact rationals.

pub mod error;
pub mod io;
pub mod linalg;
pub mod measurement;
pub mod scalar;
pub mod schur;
pub mod states;
pub mod tomography;

pub use error::{Error, Result};
pub use scalar::Real;

pub use measurement::{CountRecord, Outcome, PovmElement, WaveplateSetting};
pub use schur::{IrrepLabel, Partition, SchurBasis, SchurLabel};
pub use states::{
    AccessibleDensityMatrix, BlockOperator, CoupledCoefficients, CreationOperatorExpression, FirstQuantizedState,
    ModeTable,
};
pub use tomography::{IndistinguishabilityReport, MleOptions, ReconstructionResult, Verdict};

/// Complex scalar used throughout.
pub type C<T> = nalgebra::Complex<T>;
/// Dense complex matrix.
pub type CMatrix<T> = nalgebra::DMatrix<C<T>>;

pub type SchurBasis64 = SchurBasis<f64>;
pub type SchurBasis32 = SchurBasis<f32>;
pub type AccessibleDensityMatrix64 = AccessibleDensityMatrix<f64>;
pub type AccessibleDensityMatrix32 = AccessibleDensityMatrix<f32>;
pub type FirstQuantizedState64 = FirstQuantizedState<f64>;
pub type FirstQuantizedState32 = FirstQuantizedState<f32>;
pub type BlockOperator64 = BlockOperator<f64>;
pub type PovmElement64 = PovmElement<f64>;
pub type ReconstructionResult64 = ReconstructionResult<f64>;
pub type Complex64 = C<f64>;
