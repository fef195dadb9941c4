//! Primitivity of quantum channels: Kraus spans and the index `i(A)`,
//! brackets on the primitivity index `q(E)`, the classical exponent,
//! Wielandt-type bounds, spectral classification, the zero-error dichotomy
//! and MPS injectivity.
//!
//! ```
//! use qprim::{generators::pauli_channel, indices::kraus_rank_index, TolerancePolicy};
//!
//! let pol = TolerancePolicy::default();
//! assert_eq!(kraus_rank_index(&pauli_channel(), &pol).unwrap(), Some(2));
//! ```

pub mod channel;
pub mod cli;
mod error;
pub mod generators;
pub mod indices;
pub mod io;
pub mod mps;
pub mod numerics;
pub mod report;
pub mod spans;
pub mod spectral;

pub use channel::{KrausChannel, StochasticMatrix};
pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, TolerancePolicy, C64};
