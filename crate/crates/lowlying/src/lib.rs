//! Numerical laboratory for low-lying zeros of modular L-function families.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: primes, multiplicative functions, Kloosterman sums and the
//!   twisted sums `S_n(c)`.
//! * [`specfun`]: quadrature, Bessel functions, digamma, the smooth window `h`,
//!   the transform `V_h` and the test-function library.
//! * [`modforms`]: exact q-expansions, the Victor Miller basis, Hecke matrices,
//!   eigenforms and `L(1, sym^2 f)`.
//! * [`petersson`]: both sides of the Petersson formula and the weighted
//!   averages built on it.
//! * [`density`]: explicit-formula statistics, symmetry classes and the
//!   prime exponential-sum experiment.
//! * [`rmt`]: Haar samples from the classical compact groups.
//! * [`extremal`]: the Fredholm problem for optimal test functions and the
//!   nonvanishing bounds derived from it.
//!
//! Floating point work is done in `f64` with compensated summation where
//! cancellation matters; everything upstream of eigenvalue extraction is exact.

pub mod arith;
pub mod density;
pub mod extremal;
pub mod modforms;
pub mod petersson;
pub mod rmt;
pub mod specfun;
mod sum;

pub use sum::{fsum, NeumaierSum};

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    Domain { name: &'static str, reason: String },
    #[error("insufficient precision: need index {needed}, have {available}")]
    Precision { needed: u64, available: u64 },
    #[error("eigenvalue collision in weight {k}: {detail}")]
    EigenvalueCollision { k: u32, detail: String },
    #[error("truncation too small: {0}")]
    Truncation(String),
    #[error("linear system is numerically singular: {0}")]
    Singular(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("cache error: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(name: &'static str, reason: impl Into<String>) -> Result<T> {
    Err(Error::Domain {
        name,
        reason: reason.into(),
    })
}
