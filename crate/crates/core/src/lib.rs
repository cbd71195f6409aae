//! K-biframe analysis over finite-dimensional complex Hilbert spaces.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`]: dense complex matrices, Jacobi eigen/SVD, rank, pseudoinverse,
//!   subspaces.
//! * [`operator`]: reduced minimum modulus, EP / normal / semi-regular tests,
//!   generalized range, Douglas majorization constant, `phi(K) = (K^+)^H`.
//! * [`biframe`]: pair operators, optimal (K-)biframe bounds via pencil
//!   bisection, verification of claimed bounds with witnesses.
//! * [`transforms`]: the biframe-preserving constructions.
//! * [`generators`]: seeded random operators realizing each hypothesis class.
//! * [`harness`]: randomized theorem suites, run in parallel with the
//!   `parallel` feature.
//!
//! Inner products follow `<u, v> = v^H u`, so the middle sum
//! `sum_j <x, x_j><y_j, x>` equals `x^H G x` with `G = sum_j y_j x_j^H`.

pub mod biframe;
pub mod error;
pub mod generators;
pub mod harness;
pub mod linalg;
pub mod operator;
pub mod transforms;

pub use biframe::{BoundsReport, VectorPairSystem, Verdict};
pub use error::{BiframeError, Result};
pub use linalg::{ComplexMatrix, Subspace, ToleranceProfile, C64};
pub use operator::OperatorProfile;
