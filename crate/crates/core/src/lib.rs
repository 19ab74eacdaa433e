//! Unitary correlation sets `B_t(n, m)` on `M_n ⊗ M_m`.
//!
//! The crate builds finite-dimensional embezzlement protocols and their
//! correlations, certifies membership in the operator-norm ball through an
//! explicit Choi-matrix construction, bounds the injective and projective
//! cross norms, and handles the non-signalling box polytope.
//!
//! Module map:
//! - [`linalg`]: dense complex matrices, SVD, Hermitian eigensolver, Schmidt
//! - [`correlation`]: correlation matrices, full coordinate families, twirl
//! - [`embezzle`]: the interpolating-chain embezzlement protocol
//! - [`norms`]: injective / operator / projective bounds, local membership
//! - [`qmaxcert`]: quotient-map data and Choi certificates
//! - [`nsbox`]: non-signalling boxes
//! - [`io`], [`cli`], [`report`]: interchange formats and the command line

pub mod cli;
pub mod correlation;
pub mod embezzle;
pub mod error;
pub mod io;
pub mod linalg;
pub mod norms;
pub mod nsbox;
pub mod qmaxcert;
pub mod report;
pub mod rng;

pub use correlation::{ClaimedClass, CorrelationMatrix, FullCorrelation, Generator};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
