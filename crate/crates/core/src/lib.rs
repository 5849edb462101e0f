//! Spectral analysis of Bernoulli convolution measures.
//!
//! A Bernoulli convolution `μ_λ` is the distribution of the random series
//! `Σ ±λ^k` with independent fair signs, equivalently the equilibrium measure
//! of the iterated function system `{λ(x+1), λ(x-1)}`. Its Fourier transform
//! is the infinite product `μ̂_λ(t) = Π_{k≥1} cos(2πλ^k t)`, so orthogonality
//! of exponentials `e_γ(x) = exp(2πiγx)` in `L²(μ_λ)` reduces to exact
//! arithmetic on the zero set `{(2m+1)/(4λ^k)}`.
//!
//! The crate provides:
//!
//! * [`measure`] — transform evaluation with certified truncation bounds,
//!   sampling, and the scaling identity `μ̂(t) = cos(2πλt)·μ̂(λt)`;
//! * [`lattice`] — the candidate spectra `pΓ(1/2n)` built from digit
//!   expansions with digits `{0, n/2}` in base `2n`, plus Hadamard triples;
//! * [`zeros`] — exact rational decisions for zero-set membership, hence
//!   exact orthogonality certificates;
//! * [`spectral`] — truncated spectral functions `c_Γ(t) = Σ_γ |μ̂(t+γ)|²`,
//!   scans, Gram sections, and frame-bound estimates;
//! * [`transfer`] — the weighted transfer operators whose fixed point the
//!   spectral function is, with contractivity diagnostics;
//! * [`maximal`] — constructive witnesses that the family `E(Γ(1/8))` is
//!   maximally orthogonal in `L²(μ_{3/8})`.
//!
//! Everything that feeds an exactness claim (zero-set membership, lattice
//! digits, witness verification) is computed in exact rational arithmetic;
//! floating point only enters where a real number is the deliverable.

pub mod lattice;
pub mod maximal;
pub mod measure;
pub mod rational;
pub mod spectral;
pub mod transfer;
pub mod zeros;

pub use measure::BernoulliParam;

/// Crate-wide error type. The discriminants map onto process exit codes in
/// the CLI: contract violations exit 1, resource caps exit 2, unresolved
/// searches exit 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition of an operation was violated.
    #[error("contract violation: {0}")]
    Contract(String),
    /// A configured size/enumeration cap was exceeded.
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    /// A bounded search finished without producing a verified result.
    #[error("unresolved: {0}")]
    Unresolved(String),
}

impl Error {
    /// Process exit code the CLI reports for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Contract(_) => 1,
            Error::ResourceCap(_) => 2,
            Error::Unresolved(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
