//! Dense complex linear algebra for composite few-level systems.
//!
//! All Hilbert spaces handled here are small (dimension ≲ 40): two three-level
//! atoms plus a weakly excited cavity mode. Dense row-major storage is used
//! throughout; subsystem structure is tracked as an ordered list of
//! dimensions, with the first subsystem varying slowest in the composite
//! index.

mod eig;
mod expm;
mod operator;
mod state;

pub use eig::{eigh, trace_distance};
pub use expm::{expm, expm_apply, MAX_STEP_NORM};
pub use operator::{kron, kron_all, Operator};
pub use state::{apply, fidelity, partial_trace, MixedState, PureState};

pub(crate) use operator::matvec_into as operator_matvec;

use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used everywhere in the simulator.
pub type C64 = Complex64;

/// Errors from linear-algebra level operations.
#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid subsystem indices: {0}")]
    InvalidSubsystems(String),
    #[error("non-finite entries encountered in {0}")]
    NonFinite(&'static str),
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("data length {got} does not match dims product {expected}")]
    BadLength { got: usize, expected: usize },
    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
}
